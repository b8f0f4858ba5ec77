"""Spinor fields on a 1+1-dimensional space-time window.

Fields keep full 4-component spinors and the full gamma set; only the grid
is reduced to (z, t). Analytic constructions (plane waves, superpositions)
carry a closed-form evaluator alongside their sampled node values, so
trajectory integration can query them off-grid exactly; evolved or imported
fields fall back to bilinear interpolation.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import Callable, Literal

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import algebra
from .constants import PhysicalConstants

__all__ = [
    "GridSpec",
    "OutOfWindowError",
    "EvolveError",
    "EMPotential",
    "ZeroPotential",
    "ConstantScalarPotential",
    "ConstantElectricField",
    "TabulatedPotential",
    "PlaneWaveSpec",
    "SpinorField",
    "plane_wave",
    "superpose",
    "evolve",
    "interpolate",
    "dirac_residual",
    "squared_equation_residual",
    "export_field",
    "import_field",
]


class OutOfWindowError(ValueError):
    """Point lies outside the field's time window."""


class EvolveError(RuntimeError):
    """The time stepper failed (singular solve or non-finite state)."""


@dataclass(frozen=True)
class GridSpec:
    """Space-time window: z periodic on [z_min, z_max), t on [t_min, t_max]."""

    z_min: float
    z_max: float
    t_min: float
    t_max: float
    n_z: int
    n_t: int

    def __post_init__(self):
        if not (self.z_max > self.z_min and self.t_max > self.t_min):
            raise ValueError("grid bounds must be increasing")
        if self.n_z < 8 or self.n_t < 8:
            raise ValueError("need n_z >= 8 and n_t >= 8")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_z

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_t - 1)

    def z_nodes(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_z)

    def t_nodes(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)


# ---------------------------------------------------------------------------
# External electromagnetic potentials
# ---------------------------------------------------------------------------


class EMPotential:
    """Four-potential A_mu, stored in real components [A1, A2, A3, phi].

    Subclasses provide values, the four-divergence and the field tensor in
    complex ict components F[mu, nu] = dA_mu/dx_nu - dA_nu/dx_mu (the
    combination entering both the force law and the squared wave equation).
    """

    is_static = True

    def vector_potential(self, z, ct):
        raise NotImplementedError

    def divergence(self, z, ct):
        raise NotImplementedError

    def field_tensor_ict(self, z, ct):
        raise NotImplementedError

    @staticmethod
    def _tensor_from_gradients(dA_dz, dA_dct):
        """Assemble F (ict) from d/dz and d/d(ct) of the stored components."""
        shape = dA_dz.shape[:-1]
        F = np.zeros(shape + (4, 4), dtype=complex)
        # spatial-spatial: only z-derivatives survive for (z, ct) potentials
        F[..., 0, 2] = dA_dz[..., 0]
        F[..., 1, 2] = dA_dz[..., 1]
        # spatial-temporal: F_i4 = -i (d_ct A_i + d_i phi)
        F[..., 0, 3] = -1j * dA_dct[..., 0]
        F[..., 1, 3] = -1j * dA_dct[..., 1]
        F[..., 2, 3] = -1j * (dA_dct[..., 2] + dA_dz[..., 3])
        F -= np.swapaxes(F, -1, -2)
        return F


class ZeroPotential(EMPotential):
    def vector_potential(self, z, ct):
        z = np.asarray(z, dtype=float)
        return np.zeros(z.shape + (4,))

    def divergence(self, z, ct):
        return np.zeros(np.shape(z))

    def field_tensor_ict(self, z, ct):
        z = np.asarray(z, dtype=float)
        return np.zeros(z.shape + (4, 4), dtype=complex)


@dataclass(frozen=True)
class ConstantScalarPotential(EMPotential):
    phi0: float

    def vector_potential(self, z, ct):
        z = np.asarray(z, dtype=float)
        A = np.zeros(z.shape + (4,))
        A[..., 3] = self.phi0
        return A

    def divergence(self, z, ct):
        return np.zeros(np.shape(z))

    def field_tensor_ict(self, z, ct):
        z = np.asarray(z, dtype=float)
        return np.zeros(z.shape + (4, 4), dtype=complex)


@dataclass(frozen=True)
class ConstantElectricField(EMPotential):
    """Uniform electric field of magnitude e0 along z, phi = -e0 * z."""

    e0: float

    def vector_potential(self, z, ct):
        z = np.asarray(z, dtype=float)
        A = np.zeros(z.shape + (4,))
        A[..., 3] = -self.e0 * z
        return A

    def divergence(self, z, ct):
        return np.zeros(np.shape(z))

    def field_tensor_ict(self, z, ct):
        z = np.asarray(z, dtype=float)
        F = np.zeros(z.shape + (4, 4), dtype=complex)
        F[..., 2, 3] = 1j * self.e0
        F[..., 3, 2] = -1j * self.e0
        return F


class TabulatedPotential(EMPotential):
    """A_mu tabulated on a grid; bilinear interpolation, derivatives by
    central differences of the table (one-sided at the time edges)."""

    def __init__(self, grid: GridSpec, values: np.ndarray, consts: PhysicalConstants):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n_t, grid.n_z, 4):
            raise ValueError(f"expected table of shape {(grid.n_t, grid.n_z, 4)}")
        if not np.all(np.isfinite(values)):
            raise ValueError("tabulated potential has non-finite entries")
        self.grid = grid
        self.values = values
        self.consts = consts
        dz = grid.dz
        dct = grid.dt * consts.c
        self._dA_dz = np.empty_like(values)
        for k in range(4):
            self._dA_dz[:, :, k] = _periodic_dz(values[:, :, k], dz)
        self._dA_dct = np.gradient(values, dct, axis=0, edge_order=2)
        self.is_static = bool(np.allclose(values, values[:1], atol=0.0))

    def _interp(self, table, z, ct):
        return _bilinear(table, self.grid, self.consts, z, ct, extrapolate=True)

    def vector_potential(self, z, ct):
        return self._interp(self.values, z, ct)

    def divergence(self, z, ct):
        d3 = self._interp(self._dA_dz, z, ct)[..., 2]
        d0 = self._interp(self._dA_dct, z, ct)[..., 3]
        return d3 + d0

    def field_tensor_ict(self, z, ct):
        dz = self._interp(self._dA_dz, z, ct)
        dt = self._interp(self._dA_dct, z, ct)
        return self._tensor_from_gradients(dz, dt)


def linear_potential(
    grid: GridSpec, consts: PhysicalConstants, a3_z: float = 0.0, a3_ct: float = 0.0
) -> TabulatedPotential:
    """Tabulated A3 = a3_z * z + a3_ct * ct (bilinear-exact linear table).

    Has nonzero four-divergence (a3_z) and a nonzero field tensor (a3_ct),
    which no closed-form potential here provides at the same time.
    """
    z = grid.z_nodes()
    ct = consts.c * grid.t_nodes()
    vals = np.zeros((grid.n_t, grid.n_z, 4))
    vals[:, :, 2] = a3_z * z[None, :] + a3_ct * ct[:, None]
    return TabulatedPotential(grid, vals, consts)


# ---------------------------------------------------------------------------
# Spinor fields
# ---------------------------------------------------------------------------


def _periodic_dz(table: np.ndarray, dz: float) -> np.ndarray:
    return (np.roll(table, -1, axis=1) - np.roll(table, 1, axis=1)) / (2 * dz)


def _bilinear(values, grid: GridSpec, consts: PhysicalConstants, z, ct, extrapolate=False):
    """Bilinear interpolation of per-node data; z wraps periodically.

    With extrapolate=True, out-of-window times are clamped to the window
    edge (integrator stages may probe past a boundary; such trajectories
    terminate anyway). Otherwise out-of-window times raise OutOfWindowError.
    """
    z = np.asarray(z, dtype=float)
    ct = np.asarray(ct, dtype=float)
    t = ct / consts.c
    dt = grid.dt
    if extrapolate:
        t = np.clip(t, grid.t_min, grid.t_max)
    else:
        slack = 1e-12 * max(abs(grid.t_min), abs(grid.t_max), 1.0)
        if np.any(t < grid.t_min - slack) or np.any(t > grid.t_max + slack):
            raise OutOfWindowError(
                f"time out of window [{grid.t_min}, {grid.t_max}]"
            )
    s = (z - grid.z_min) / grid.dz
    i0 = np.floor(s).astype(int)
    fz = s - i0
    i0 = np.mod(i0, grid.n_z)
    i1 = np.mod(i0 + 1, grid.n_z)
    u = (t - grid.t_min) / dt
    j0 = np.clip(np.floor(u).astype(int), 0, grid.n_t - 2)
    ft = u - j0
    v00 = values[j0, i0]
    v01 = values[j0, i1]
    v10 = values[j1 := j0 + 1, i0]
    v11 = values[j1, i1]
    fz = fz[..., None] if values.ndim == 3 else fz
    ft = ft[..., None] if values.ndim == 3 else ft
    return (
        v00 * (1 - fz) * (1 - ft)
        + v01 * fz * (1 - ft)
        + v10 * (1 - fz) * ft
        + v11 * fz * ft
    )


@dataclass
class SpinorField:
    """Grid of 4-spinor values over a space-time window.

    values has shape (n_t, n_z, 4). `analytic`, when present, is the exact
    closed form (z, ct) -> spinor used instead of interpolation by consumers
    that tolerate off-window evaluation (trajectories, quadratures).
    """

    grid: GridSpec
    consts: PhysicalConstants
    values: np.ndarray
    provenance: Literal["analytic", "evolved", "imported"] = "analytic"
    analytic: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    _bar_scale: float | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_t, self.grid.n_z, 4):
            raise ValueError("values shape does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field has non-finite entries")
        if self.provenance == "evolved":
            norms = self.slice_norms()
            drift = np.max(np.abs(norms / norms[0] - 1.0))
            if drift > 1e-6:
                raise EvolveError(f"evolved field norm drift {drift:.2e} > 1e-6")

    # geometry -------------------------------------------------------------
    @property
    def ct_min(self) -> float:
        return self.consts.c * self.grid.t_min

    @property
    def ct_max(self) -> float:
        return self.consts.c * self.grid.t_max

    @property
    def z_min(self) -> float:
        return self.grid.z_min

    @property
    def z_max(self) -> float:
        return self.grid.z_max

    # evaluation -----------------------------------------------------------
    def at(self, z, ct):
        """Spinor at (z, ct): exact closed form when available, else bilinear."""
        if self.analytic is not None:
            return self.analytic(np.asarray(z, float), np.asarray(ct, float))
        return _bilinear(self.values, self.grid, self.consts, z, ct, extrapolate=True)

    def bar_density_at(self, z, ct):
        return algebra.bar_density(self.at(z, ct))

    def bar_scale(self) -> float:
        """Max |psibar psi| over the grid nodes; node thresholds are relative to it."""
        if self._bar_scale is None:
            self._bar_scale = float(np.max(np.abs(algebra.bar_density(self.values))))
        return self._bar_scale

    def slice_norms(self) -> np.ndarray:
        """Spatial norm integral of psi^+ psi per time slice (periodic rule)."""
        return np.sum(np.abs(self.values) ** 2, axis=(1, 2)) * self.grid.dz

    def with_global_phase(self, theta: float) -> "SpinorField":
        ph = np.exp(1j * theta)
        ana = None
        if self.analytic is not None:
            inner = self.analytic
            ana = lambda z, ct: ph * inner(z, ct)
        return replace(self, values=self.values * ph, analytic=ana)


@dataclass(frozen=True)
class PlaneWaveSpec:
    momentum: float
    spin: Literal["up", "down"] = "up"
    energy_sign: Literal["positive", "negative"] = "positive"


def plane_wave_spinor(spec: PlaneWaveSpec, consts: PhysicalConstants) -> tuple[np.ndarray, float]:
    """Constant spinor u (u^+ u = 1) and energy E of a free plane wave."""
    p = spec.momentum
    E = consts.energy(p)
    if spec.energy_sign == "negative":
        E = -E
        g = p * consts.c / (E - consts.rest_energy)
        u = np.array([g, 0, 1, 0], complex) if spec.spin == "up" else np.array([0, -g, 0, 1], complex)
    else:
        g = p * consts.c / (E + consts.rest_energy)
        u = np.array([1, 0, g, 0], complex) if spec.spin == "up" else np.array([0, 1, 0, -g], complex)
    return u / np.linalg.norm(u), E


def plane_wave(spec: PlaneWaveSpec, consts: PhysicalConstants, grid: GridSpec) -> SpinorField:
    """Free solution u(p) exp(i(p z - E t)/hbar) sampled on the grid."""
    u, E = plane_wave_spinor(spec, consts)
    p, hbar, c = spec.momentum, consts.hbar, consts.c

    def evaluate(z, ct):
        phase = np.exp(1j * (p * z - (E / c) * ct) / hbar)
        return phase[..., None] * u

    zg, ctg = np.meshgrid(grid.z_nodes(), consts.c * grid.t_nodes(), indexing="xy")
    vals = evaluate(zg, ctg)
    return SpinorField(grid, consts, vals, "analytic", evaluate)


def superpose(fields: list[SpinorField], weights) -> SpinorField:
    """Pointwise weighted sum of fields on identical grids."""
    if not fields:
        raise ValueError("need at least one field")
    base = fields[0]
    for f in fields[1:]:
        if f.grid != base.grid:
            raise ValueError("superpose requires identical grids")
    w = np.asarray(weights, dtype=complex)
    if w.shape != (len(fields),):
        raise ValueError("one weight per field required")
    vals = sum(wk * f.values for wk, f in zip(w, fields))
    ana = None
    if all(f.analytic is not None for f in fields):
        evals = [f.analytic for f in fields]

        def ana(z, ct, _evals=tuple(evals), _w=w.copy()):
            out = _w[0] * _evals[0](z, ct)
            for wk, ek in zip(_w[1:], _evals[1:]):
                out = out + wk * ek(z, ct)
            return out

    prov = "analytic" if ana is not None else base.provenance
    return SpinorField(base.grid, base.consts, vals, prov, ana)


# ---------------------------------------------------------------------------
# Evolution (implicit midpoint, norm-preserving)
# ---------------------------------------------------------------------------


def _derivative_matrix(n: int, dz: float) -> sp.spmatrix:
    """4th-order periodic central first derivative (antisymmetric circulant)."""
    e = np.ones(n)
    D = sp.diags(
        [8 * e, -8 * e, -e, e], [1, -1, 2, -2], shape=(n, n), format="lil"
    )
    # periodic wrap
    D[0, n - 1] = -8
    D[1, n - 1] = 1
    D[0, n - 2] = 1
    D[n - 1, 0] = 8
    D[n - 2, 0] = -1
    D[n - 1, 1] = -1
    return (D / (12 * dz)).tocsr()


def _hamiltonian(
    grid: GridSpec, potential: EMPotential, consts: PhysicalConstants, t: float
) -> tuple[sp.spmatrix, float]:
    """Discrete H = c alpha3 (p - (e/c)A3) + e phi + m c^2 beta on one slice.

    Returns (H with its spatially-constant scalar part removed, that scalar).
    The constant is applied as an exact phase by the stepper, which keeps
    spatially constant potentials gauge-exact.
    """
    z = grid.z_nodes()
    ct = np.full_like(z, consts.c * t)
    A = potential.vector_potential(z, ct)
    e = consts.charge
    a3 = algebra.alpha(3)
    beta = np.asarray(algebra.BETA)
    D = _derivative_matrix(grid.n_z, grid.dz)
    H = consts.c * (consts.hbar / 1j) * sp.kron(D, a3)
    H = H + sp.kron(sp.diags(-e * A[:, 2]), a3)
    scalar = e * A[:, 3]
    shift = float(np.mean(scalar))
    H = H + sp.kron(sp.diags(scalar - shift), np.eye(4))
    H = H + consts.rest_energy * sp.kron(sp.eye(grid.n_z), beta)
    return H.tocsc(), shift


def evolve(
    initial_slice: np.ndarray,
    potential: EMPotential,
    consts: PhysicalConstants,
    grid: GridSpec,
    substeps: int = 4,
) -> SpinorField:
    """Time-step the Hamiltonian form with the unitary implicit-midpoint rule.

    Periodic spatial boundary; `substeps` internal steps are taken per stored
    slice (the scheme's phase error at the default slice spacing alone would
    dominate the error budget). Spatially constant potential parts advance by
    an exact phase factor.
    """
    psi = np.asarray(initial_slice, dtype=complex)
    if psi.shape != (grid.n_z, 4):
        raise ValueError(f"initial slice must have shape {(grid.n_z, 4)}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("initial slice has non-finite entries")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")

    h = grid.dt / substeps
    values = np.empty((grid.n_t, grid.n_z, 4), dtype=complex)
    values[0] = psi
    state = psi.reshape(-1)

    lu = None
    B = None
    shift = 0.0
    for j in range(1, grid.n_t):
        for k in range(substeps):
            if lu is None or not potential.is_static:
                t_mid = grid.t_min + ((j - 1) * substeps + k + 0.5) * h
                H, shift = _hamiltonian(grid, potential, consts, t_mid)
                coef = 1j * h / (2 * consts.hbar)
                ident = sp.eye(4 * grid.n_z, format="csc")
                A_mat = (ident + coef * H).tocsc()
                B = (ident - coef * H).tocsr()
                try:
                    lu = spla.splu(A_mat)
                except RuntimeError as exc:  # singular factorization
                    raise EvolveError(f"implicit solve failed: {exc}") from exc
            state = lu.solve(B @ state)
            if shift != 0.0:
                state = state * np.exp(-1j * shift * h / consts.hbar)
            if not np.all(np.isfinite(state)):
                raise EvolveError("non-finite state during evolution")
        values[j] = state.reshape(grid.n_z, 4)

    return SpinorField(grid, consts, values, "evolved", None)


def interpolate(field: SpinorField, point: np.ndarray) -> np.ndarray:
    """Bilinear interpolation at a four-position [x, y, z, ct].

    z wraps periodically; strictly enforces the time window.
    """
    point = np.asarray(point, dtype=float)
    return _bilinear(
        field.values, field.grid, field.consts, point[..., 2], point[..., 3],
        extrapolate=False,
    )


# ---------------------------------------------------------------------------
# Residual diagnostics
# ---------------------------------------------------------------------------


def _interior_derivatives(field: SpinorField):
    """Central-difference d/dz and d/dt of the node values on interior nodes."""
    v = field.values
    dz = field.grid.dz
    dt = field.grid.dt
    dpsi_dz = (v[1:-1, 2:, :] - v[1:-1, :-2, :]) / (2 * dz)
    dpsi_dt = (v[2:, 1:-1, :] - v[:-2, 1:-1, :]) / (2 * dt)
    return v[1:-1, 1:-1, :], dpsi_dz, dpsi_dt


def dirac_residual(
    field: SpinorField, potential: EMPotential, consts: PhysicalConstants
) -> float:
    """Max-abs residual of gamma_mu (p_mu - (e/c)A_mu) psi + m c psi.

    Central differences over interior nodes; order 2 on smooth fields.
    """
    psi, dpsi_dz, dpsi_dt = _interior_derivatives(field)
    g3 = algebra.gamma(3)
    beta = np.asarray(algebra.BETA)
    grid = field.grid
    z = grid.z_nodes()[1:-1]
    ct = consts.c * grid.t_nodes()[1:-1]
    zg, ctg = np.meshgrid(z, ct, indexing="xy")
    A = potential.vector_potential(zg, ctg)
    e, c, hbar, mc = consts.charge, consts.c, consts.hbar, consts.mass * consts.c

    res = (hbar / 1j) * np.einsum("ij,tzj->tzi", g3, dpsi_dz)
    res = res - (1j * hbar / c) * np.einsum("ij,tzj->tzi", beta, dpsi_dt)
    res = res + (e / c) * A[..., 3, None] * np.einsum("ij,tzj->tzi", beta, psi)
    for i in range(3):
        gi = algebra.gamma(i + 1)
        res = res - (e / c) * A[..., i, None] * np.einsum("ij,tzj->tzi", gi, psi)
    res = res + mc * psi
    return float(np.max(np.abs(res)))


def squared_equation_residual(
    field: SpinorField, potential: EMPotential, consts: PhysicalConstants
) -> float:
    """Max-abs residual of the second-order (squared) wave equation,
    including the spin coupling term (i e hbar / 2c) gamma_mu gamma_nu F_mu_nu."""
    v = field.values
    grid = field.grid
    dz, dt = grid.dz, grid.dt
    c = consts.c
    psi = v[1:-1, 1:-1, :]
    d2z = (v[1:-1, 2:, :] - 2 * psi + v[1:-1, :-2, :]) / dz**2
    d2t = (v[2:, 1:-1, :] - 2 * psi + v[:-2, 1:-1, :]) / dt**2
    dzp = (v[1:-1, 2:, :] - v[1:-1, :-2, :]) / (2 * dz)
    dtp = (v[2:, 1:-1, :] - v[:-2, 1:-1, :]) / (2 * dt)
    box = d2z - d2t / c**2  # d^2/dx_mu dx_mu on (z, t) fields

    z = grid.z_nodes()[1:-1]
    ct = c * grid.t_nodes()[1:-1]
    zg, ctg = np.meshgrid(z, ct, indexing="xy")
    A = potential.vector_potential(zg, ctg)
    divA = potential.divergence(zg, ctg)
    F = potential.field_tensor_ict(zg, ctg)
    e, hbar = consts.charge, consts.hbar

    a_dot_grad = A[..., 2, None] * dzp + (A[..., 3, None] / c) * dtp
    a_sq = A[..., 0] ** 2 + A[..., 1] ** 2 + A[..., 2] ** 2 - A[..., 3] ** 2

    gam = np.stack([algebra.gamma(mu) for mu in range(1, 5)])
    spin_mat = np.einsum("mij,njk,...mn->...ik", gam, gam, F)

    res = -(hbar**2) * box
    res = res - (e * hbar / (1j * c)) * divA[..., None] * psi
    res = res - (2 * e * hbar / (1j * c)) * a_dot_grad
    res = res + (e**2 / c**2) * a_sq[..., None] * psi
    res = res + (1j * e * hbar / (2 * c)) * np.einsum("...ik,...k->...i", spin_mat, psi)
    res = res + (consts.mass * c) ** 2 * psi
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# Line-oriented text export/import
# ---------------------------------------------------------------------------

_FORMAT_HEADER = "diracpilot-field 1"


def export_field(field: SpinorField, path) -> None:
    """Write the field in the documented line-oriented text format.

    Line 1: format tag; line 2: z_min z_max t_min t_max n_z n_t;
    line 3: c hbar mass charge; line 4: provenance; then one record per node
    (t-major, then z) with 8 reals: Re/Im of the 4 components.
    """
    g, k = field.grid, field.consts
    with open(path, "w") as fh:
        fh.write(_FORMAT_HEADER + "\n")
        fh.write(
            f"{g.z_min!r} {g.z_max!r} {g.t_min!r} {g.t_max!r} {g.n_z} {g.n_t}\n"
        )
        fh.write(f"{k.c!r} {k.hbar!r} {k.mass!r} {k.charge!r}\n")
        fh.write(field.provenance + "\n")
        flat = field.values.reshape(-1, 4)
        for row in flat:
            nums = []
            for comp in row:
                nums.append(repr(float(comp.real)))
                nums.append(repr(float(comp.imag)))
            fh.write(" ".join(nums) + "\n")


def import_field(path) -> SpinorField:
    with open(path) as fh:
        tag = fh.readline().strip()
        if tag != _FORMAT_HEADER:
            raise ValueError(f"unrecognized field format: {tag!r}")
        gparts = fh.readline().split()
        grid = GridSpec(
            float(gparts[0]), float(gparts[1]), float(gparts[2]), float(gparts[3]),
            int(gparts[4]), int(gparts[5]),
        )
        kparts = [float(x) for x in fh.readline().split()]
        consts = PhysicalConstants(*kparts)
        provenance = fh.readline().strip()
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (grid.n_t * grid.n_z, 8):
        raise ValueError("field record count does not match the grid")
    vals = (data[:, 0::2] + 1j * data[:, 1::2]).reshape(grid.n_t, grid.n_z, 4)
    prov = provenance if provenance in ("analytic", "evolved") else "imported"
    if prov != "evolved":
        prov = "imported"
    return SpinorField(grid, consts, vals, prov, None)
