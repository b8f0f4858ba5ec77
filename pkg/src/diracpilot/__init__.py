"""Covariant pilot-wave dynamics for the Dirac equation.

Spinor fields on a 1+1D space-time window, sigma-parameterized guidance
trajectories driven by the scalar space-time density |psibar psi|, the
lab-time law they reduce to, statistical equivariance checks, the
semiclassical limit, and the non-local two-particle extension.
"""

__version__ = "0.1.0"

from .constants import PhysicalConstants, NATURAL
from .algebra import (
    BoostSpec,
    NodeError,
    alpha,
    bar_density,
    current,
    gamma,
    lorentz_boost_matrix,
    minkowski,
    nikolic_velocity,
    spin_boost,
)
from .field import (
    ConstantElectricField,
    ConstantScalarPotential,
    EMPotential,
    GridSpec,
    OutOfWindowError,
    PlaneWaveSpec,
    SpinorField,
    TabulatedPotential,
    ZeroPotential,
    dirac_residual,
    evolve,
    export_field,
    import_field,
    interpolate,
    plane_wave,
    squared_equation_residual,
    superpose,
)
from .guidance import (
    IntegratorConfig,
    Trajectory,
    integrate_bohm_dirac,
    integrate_sigma,
    proper_time_defect,
)
from .equilibrium import (
    EnsembleReport,
    SpacetimeWindow,
    continuity_residual,
    equivariance_test_sigma,
    equivariance_test_spatial,
    make_window,
    region_probability_covariance,
    sample_born_nikolic,
)
from .classical import (
    ActionFunction,
    ClassicalState,
    WKBFamily,
    build_wkb_field,
    classical_spinor,
    classical_velocity,
    hamilton_jacobi_residual,
    hbar_convergence_study,
    lorentz_force_oracle,
    squared_term_limits,
)
from .twoparticle import (
    TwoParticleConfiguration,
    TwoParticleField,
    antisymmetrized_field,
    conservation_8d_residual,
    evaluate,
    integrate_pair,
    product_field,
    two_continuity_residual,
    two_currents,
    two_density,
)
