"""Clifford algebra, bilinear densities/currents and Lorentz transformations.

Conventions used throughout the package:

* Spinors are complex ndarrays of shape (4,) (or trailing axis 4 for fields).
* Four-vectors are real ndarrays ``[x, y, z, ct]``; index 3 is temporal.
  A quantity W whose textbook fourth component is imaginary (W4 = i*W0)
  is stored through W0 = -i*W4, so all stored components are real.
* Minkowski product: a.b = ax*bx + ay*by + az*bz - a0*b0.
* Gamma matrices follow the representation with gamma_i built from Pauli
  blocks ((0, sigma_i), (-sigma_i, 0)) and gamma_4 = i*beta. They satisfy
  gamma_mu gamma_nu + gamma_nu gamma_mu = -2 delta_{mu nu}.
* Boosts: spin_boost(chi, n) = cosh(chi/2) I - sinh(chi/2) (alpha . n) is
  paired with the real vector boost whose space-time mixing entries are
  -sinh(chi) n; this pairing satisfies gamma_mu = Lambda_{eta mu} S^-1
  gamma_eta S (checked in the test suite, not assumed).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import PhysicalConstants

__all__ = [
    "NodeError",
    "BoostSpec",
    "PAULI",
    "BETA",
    "gamma",
    "alpha",
    "bar_density",
    "current",
    "nikolic_velocity",
    "spin_boost",
    "lorentz_boost_matrix",
    "minkowski",
]


class NodeError(ValueError):
    """Raised when a guidance velocity is requested at a density node."""


def _pauli() -> np.ndarray:
    s = np.zeros((3, 2, 2), dtype=complex)
    s[0] = [[0, 1], [1, 0]]
    s[1] = [[0, -1j], [1j, 0]]
    s[2] = [[1, 0], [0, -1]]
    return s


PAULI = _pauli()
PAULI.setflags(write=False)

BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
BETA.setflags(write=False)

_GAMMA = np.zeros((4, 4, 4), dtype=complex)
for _i in range(3):
    _GAMMA[_i, :2, 2:] = PAULI[_i]
    _GAMMA[_i, 2:, :2] = -PAULI[_i]
_GAMMA[3] = 1j * BETA
_GAMMA.setflags(write=False)

_ALPHA = np.einsum("ij,kjl->kil", BETA, _GAMMA[:3])
_ALPHA.setflags(write=False)


def gamma(mu: int) -> np.ndarray:
    """Gamma matrix for mu in 1..4 (4 is the temporal index)."""
    if not 1 <= mu <= 4:
        raise IndexError(f"gamma index must be in 1..4, got {mu}")
    return _GAMMA[mu - 1].copy()


def alpha(i: int) -> np.ndarray:
    """alpha_i = beta @ gamma_i for i in 1..3."""
    if not 1 <= i <= 3:
        raise IndexError(f"alpha index must be in 1..3, got {i}")
    return _ALPHA[i - 1].copy()


def minkowski(a: np.ndarray, b: np.ndarray) -> float | np.ndarray:
    """a.b with signature (+,+,+,-) on the stored [x, y, z, ct] components."""
    a = np.asarray(a)
    b = np.asarray(b)
    return (
        a[..., 0] * b[..., 0]
        + a[..., 1] * b[..., 1]
        + a[..., 2] * b[..., 2]
        - a[..., 3] * b[..., 3]
    )


def bar_density(psi: np.ndarray) -> float | np.ndarray:
    """psibar psi = |psi1|^2 + |psi2|^2 - |psi3|^2 - |psi4|^2 (may be negative)."""
    psi = np.asarray(psi)
    a = np.abs(psi) ** 2
    return a[..., 0] + a[..., 1] - a[..., 2] - a[..., 3]


def current(psi: np.ndarray, consts: PhysicalConstants) -> np.ndarray:
    """Four-current c*psibar gamma_mu psi in real components [Jx, Jy, Jz, J0].

    The temporal entry is the real image J0 = c psi^+ psi of J4 = i c psi^+ psi.
    Works on a single spinor or on an array of spinors (trailing axis 4).
    """
    psi = np.asarray(psi, dtype=complex)
    pc = psi.conj()
    out = np.empty(psi.shape[:-1] + (4,), dtype=float)
    for i in range(3):
        out[..., i] = consts.c * np.einsum(
            "...i,ij,...j->...", pc, _ALPHA[i], psi
        ).real
    out[..., 3] = consts.c * np.einsum("...i,...i->...", pc, psi).real
    return out


def nikolic_velocity(
    psi: np.ndarray,
    consts: PhysicalConstants,
    node_epsilon: float = 1e-10,
    density_scale: float = 1.0,
) -> np.ndarray:
    """Guidance four-velocity dX_mu/dsigma = c psibar gamma_mu psi / |psibar psi|.

    node_epsilon is relative to density_scale (the max |psibar psi| over the
    field the spinor came from). Raises NodeError at a density node, where
    the velocity is undefined.
    """
    rho = bar_density(psi)
    if abs(rho) <= node_epsilon * density_scale:
        raise NodeError(f"|psibar psi| = {abs(rho):.3e} at or below node threshold")
    return current(psi, consts) / abs(rho)


@dataclass(frozen=True)
class BoostSpec:
    """Pure boost: rapidity chi along the unit 3-vector axis."""

    rapidity: float
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        n = np.asarray(self.axis, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError(f"boost axis must be a unit vector, got {self.axis}")


def spin_boost(spec: BoostSpec) -> np.ndarray:
    """Spinor boost matrix S = cosh(chi/2) I - sinh(chi/2) (alpha . n)."""
    n = np.asarray(spec.axis, dtype=float)
    a_dot_n = np.einsum("k,kij->ij", n, _ALPHA)
    return np.cosh(spec.rapidity / 2) * np.eye(4) - np.sinh(spec.rapidity / 2) * a_dot_n


def lorentz_boost_matrix(spec: BoostSpec) -> np.ndarray:
    """Real boost matrix acting on stored [x, y, z, ct] four-vectors.

    Sign convention matches spin_boost: a rest four-velocity (0,0,0,c) maps
    to (-c sinh(chi) n, c cosh(chi)).
    """
    n = np.asarray(spec.axis, dtype=float)
    ch, sh = np.cosh(spec.rapidity), np.sinh(spec.rapidity)
    L = np.zeros((4, 4))
    L[:3, :3] = np.eye(3) + (ch - 1.0) * np.outer(n, n)
    L[:3, 3] = -sh * n
    L[3, :3] = -sh * n
    L[3, 3] = ch
    return L
