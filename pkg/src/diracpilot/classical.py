"""Semiclassical (hbar -> 0) machinery.

A field family with equal component phases in the limit is described by a
common action S, per-component amplitudes R_i and first-order phases S1_i:
psi_i = R_i exp(i(S/hbar + S1_i)). An optional O(hbar) spinor correction
term W makes the family's guidance bilinears genuinely hbar-dependent
(without it every bilinear is exactly hbar-free, since the common phase
cancels); the phase-equality property is unaffected.

The classical side: the relativistic Hamilton-Jacobi residual, the spinor
constrained by the limiting wave equation, the velocity field of the action,
and a proper-time Lorentz-force integrator used as the oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from . import algebra, guidance
from .constants import PhysicalConstants
from .field import EMPotential, GridSpec, SpinorField

__all__ = [
    "ActionFunction",
    "free_action",
    "rest_action",
    "constant_field_action",
    "WKBFamily",
    "ClassicalState",
    "DEFAULT_HBAR_SEQUENCE",
    "build_wkb_field",
    "hamilton_jacobi_residual",
    "classical_spinor",
    "classical_velocity",
    "classical_family",
    "lorentz_force_oracle",
    "squared_term_limits",
    "hbar_convergence_study",
    "fit_order",
]

DEFAULT_HBAR_SEQUENCE = (0.4, 0.2, 0.1, 0.05, 0.025)


@dataclass(frozen=True)
class ActionFunction:
    """Scalar action S(z, ct) with an optional exact four-gradient.

    The stored gradient follows the vector convention: [d_x S, d_y S,
    d_z S, -d_ct S], so kinetic vectors combine with potentials by plain
    component arithmetic."""

    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def gradient_at(self, z, ct, h: float = 1e-5) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        ct = np.asarray(ct, dtype=float)
        if self.gradient is not None:
            return self.gradient(z, ct)
        G = np.zeros(z.shape + (4,))
        G[..., 2] = (self.value(z + h, ct) - self.value(z - h, ct)) / (2 * h)
        G[..., 3] = -(self.value(z, ct + h) - self.value(z, ct - h)) / (2 * h)
        return G


def free_action(p: float, consts: PhysicalConstants) -> ActionFunction:
    """S = p z - E t for the on-shell positive energy E(p)."""
    E = consts.energy(p)
    c = consts.c

    def val(z, ct):
        return p * z - (E / c) * ct

    def grad(z, ct):
        z = np.asarray(z, dtype=float)
        G = np.zeros(z.shape + (4,))
        G[..., 2] = p
        G[..., 3] = E / c
        return G

    return ActionFunction(val, grad)


def rest_action(consts: PhysicalConstants) -> ActionFunction:
    return free_action(0.0, consts)


def constant_field_action(
    e0: float, energy_level: float, consts: PhysicalConstants
) -> ActionFunction:
    """Separable solution S = -E t + W(z) of the HJ equation with phi = -e0 z.

    W' = sqrt(u^2 - (mc)^2) with u(z) = (E + e*e0*z)/c; only valid where
    u > mc (away from the classical turning point)."""
    c, m, e = consts.c, consts.mass, consts.charge
    E = energy_level
    k = e * e0
    if k == 0:
        raise ValueError("need a nonzero field (e * e0 != 0)")
    mc = m * c

    def u_of(z):
        return (E + k * np.asarray(z, dtype=float)) / c

    def val(z, ct):
        u = u_of(z)
        if np.any(u <= mc):
            raise ValueError("action evaluated beyond the classical turning point")
        root = np.sqrt(u**2 - mc**2)
        W = (c / (2 * k)) * (u * root - mc**2 * np.log(u + root))
        return -(E / c) * np.asarray(ct, dtype=float) + W

    def grad(z, ct):
        z = np.asarray(z, dtype=float)
        u = u_of(z)
        if np.any(u <= mc):
            raise ValueError("action evaluated beyond the classical turning point")
        G = np.zeros(z.shape + (4,))
        G[..., 2] = np.sqrt(u**2 - mc**2)
        G[..., 3] = E / c
        return G

    return ActionFunction(val, grad)


def hamilton_jacobi_residual(
    S: ActionFunction,
    potential: EMPotential,
    consts: PhysicalConstants,
    grid: GridSpec,
) -> np.ndarray:
    """Pointwise (dS - (e/c)A).(dS - (e/c)A) + m^2 c^2 over the grid."""
    z = grid.z_nodes()
    ct = consts.c * grid.t_nodes()
    zg, ctg = np.meshgrid(z, ct, indexing="xy")
    G = S.gradient_at(zg, ctg)
    A = potential.vector_potential(zg, ctg)
    K = G - (consts.charge / consts.c) * A
    return algebra.minkowski(K, K) + (consts.mass * consts.c) ** 2


def classical_spinor(
    U: np.ndarray, psi1: complex, psi2: complex, consts: PhysicalConstants
) -> np.ndarray:
    """Spinor solving the limiting wave equation (gamma.U + c) psi = 0.

    The lower components follow from the upper pair; the denominator
    c + U0 degenerates only for past-pointing velocities."""
    U = np.asarray(U, dtype=float)
    denom = consts.c + U[..., 3]
    if np.any(np.abs(denom) < 1e-14 * consts.c):
        raise ZeroDivisionError("degenerate denominator c + U0 ~ 0")
    u1, u2, u3 = U[..., 0], U[..., 1], U[..., 2]
    out = np.empty(U.shape[:-1] + (4,), dtype=complex)
    out[..., 0] = psi1
    out[..., 1] = psi2
    out[..., 2] = (u3 * psi1 + (u1 - 1j * u2) * psi2) / denom
    out[..., 3] = ((u1 + 1j * u2) * psi1 - u3 * psi2) / denom
    return out


def classical_velocity(
    S: ActionFunction,
    potential: EMPotential,
    point: np.ndarray,
    consts: PhysicalConstants,
    case: Literal["case_i", "case_ii"] = "case_i",
) -> np.ndarray:
    """U_mu = (1/m) dS/dx_mu - (e/mc) A_mu, negated in the flipped-sign region."""
    point = np.asarray(point, dtype=float)
    z, ct = point[..., 2], point[..., 3]
    G = S.gradient_at(z, ct)
    A = potential.vector_potential(z, ct)
    U = G / consts.mass - (consts.charge / (consts.mass * consts.c)) * A
    if case == "case_ii":
        U = -U
    elif case != "case_i":
        raise ValueError(f"unknown charge-sign case {case!r}")
    return U


@dataclass(frozen=True)
class ClassicalState:
    """Proper-time-parameterized point state; U.U = -c^2 in the stored units."""

    position: np.ndarray
    four_velocity: np.ndarray
    charge_sign_case: Literal["case_i", "case_ii"] = "case_i"

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(
            self, "four_velocity", np.asarray(self.four_velocity, dtype=float)
        )

    def mass_shell_defect(self, consts: PhysicalConstants) -> float:
        return float(algebra.minkowski(self.four_velocity, self.four_velocity)) + consts.c**2


def _mass_shell_check(U: np.ndarray, consts: PhysicalConstants, tol: float = 1e-8):
    defect = float(algebra.minkowski(U, U)) + consts.c**2
    if abs(defect) > tol * consts.c**2:
        raise ValueError(f"four-velocity off the mass shell by {defect:.3e}")


def lorentz_force_oracle(
    potential: EMPotential,
    consts: PhysicalConstants,
    initial: ClassicalState,
    tau_range: tuple[float, float],
    step: float,
) -> list[ClassicalState]:
    """Proper-time RK4 on m dU_nu/dtau = (q/c) U_mu F_mu_nu, dX/dtau = U.

    The flipped-sign region (case_ii) moves with charge -e."""
    _mass_shell_check(initial.four_velocity, consts)
    q = consts.charge if initial.charge_sign_case == "case_i" else -consts.charge
    m, c = consts.mass, consts.c

    def rhs(state: np.ndarray) -> np.ndarray:
        X, U = state[:4], state[4:]
        F = potential.field_tensor_ict(X[2], X[3])
        U_ict = np.array([U[0], U[1], U[2], 1j * U[3]], dtype=complex)
        dU_ict = (q / (m * c)) * np.einsum("m,mn->n", U_ict, F)
        dU = np.empty(4)
        dU[:3] = dU_ict[:3].real
        dU[3] = (-1j * dU_ict[3]).real
        return np.concatenate([U, dU])

    t0, t1 = tau_range
    n_steps = max(1, int(round((t1 - t0) / step)))
    h = (t1 - t0) / n_steps
    state = np.concatenate([initial.position, initial.four_velocity])
    out = [initial]
    for _ in range(n_steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(
            ClassicalState(state[:4].copy(), state[4:].copy(), initial.charge_sign_case)
        )
    return out


# ---------------------------------------------------------------------------
# WKB families
# ---------------------------------------------------------------------------

FieldFunc = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WKBFamily:
    """Equal-phase spinor family psi_i = (R_i e^{i S1_i} + hbar W_i) e^{i S/hbar}.

    R_i are non-negative amplitudes, S1_i the first-order phases (dimensionless
    multipliers of hbar); higher-order phase terms are zero. W is the optional
    O(hbar) spinor correction (default absent)."""

    action: ActionFunction
    amplitudes: tuple[FieldFunc, FieldFunc, FieldFunc, FieldFunc]
    phases1: tuple[FieldFunc, FieldFunc, FieldFunc, FieldFunc]
    hbar_sequence: tuple[float, ...] = DEFAULT_HBAR_SEQUENCE
    correction: tuple[FieldFunc, FieldFunc, FieldFunc, FieldFunc] | None = None

    def __post_init__(self):
        hs = self.hbar_sequence
        if len(hs) < 4:
            raise ValueError("hbar_sequence needs at least 4 entries")
        if not all(a > b > 0 for a, b in zip(hs, hs[1:])):
            raise ValueError("hbar_sequence must be strictly decreasing and positive")

    def classical_part(self, z, ct) -> np.ndarray:
        """psi_class, the hbar -> 0 limit of e^{-iS/hbar} psi."""
        z = np.asarray(z, dtype=float)
        ct = np.asarray(ct, dtype=float)
        out = np.empty(np.broadcast(z, ct).shape + (4,), dtype=complex)
        for i in range(4):
            R = np.asarray(self.amplitudes[i](z, ct), dtype=float)
            if np.any(R < 0):
                raise ValueError("amplitudes must be non-negative")
            out[..., i] = R * np.exp(1j * np.asarray(self.phases1[i](z, ct)))
        return out

    def spinor(self, z, ct, hbar: float) -> np.ndarray:
        psi = self.classical_part(z, ct)
        if self.correction is not None:
            for i in range(4):
                psi[..., i] += hbar * np.asarray(self.correction[i](z, ct))
        phase = np.exp(1j * np.asarray(self.action.value(z, ct)) / hbar)
        return psi * phase[..., None]


def build_wkb_field(
    family: WKBFamily, hbar: float, grid: GridSpec, consts: PhysicalConstants
) -> SpinorField:
    """Sample the family at one hbar onto a grid (closed form kept attached).

    The field uses the family's hbar for its phases; `consts.hbar` governs
    everything else and is typically set equal by the caller."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")

    def evaluate(z, ct):
        return family.spinor(z, ct, hbar)

    zg, ctg = np.meshgrid(grid.z_nodes(), consts.c * grid.t_nodes(), indexing="xy")
    vals = evaluate(zg, ctg)
    if np.all(np.abs(vals).sum(axis=-1) == 0):
        raise ValueError("family vanishes identically on the grid")
    return SpinorField(grid, consts, vals, "analytic", evaluate)


def _const(x):
    return lambda z, ct: np.broadcast_to(np.asarray(x), np.broadcast(z, ct).shape)


def classical_family(
    action: ActionFunction,
    potential: EMPotential,
    consts: PhysicalConstants,
    psi1: complex = 1.0,
    psi2: complex = 0.0,
    correction: tuple[FieldFunc, FieldFunc, FieldFunc, FieldFunc] | None = None,
    hbar_sequence: tuple[float, ...] = DEFAULT_HBAR_SEQUENCE,
) -> WKBFamily:
    """Family whose classical part is the constrained spinor of the action.

    Its guidance velocity converges to the classical flow as hbar -> 0
    (exactly equal at every hbar when no correction is present)."""

    def spinor_field(z, ct):
        pt = np.zeros(np.broadcast(np.asarray(z), np.asarray(ct)).shape + (4,))
        pt[..., 2] = z
        pt[..., 3] = ct
        U = classical_velocity(action, potential, pt, consts)
        return classical_spinor(U, psi1, psi2, consts)

    def amp(i):
        return lambda z, ct: np.abs(spinor_field(z, ct)[..., i])

    def ph(i):
        return lambda z, ct: np.angle(spinor_field(z, ct)[..., i])

    return WKBFamily(
        action=action,
        amplitudes=tuple(amp(i) for i in range(4)),
        phases1=tuple(ph(i) for i in range(4)),
        hbar_sequence=tuple(hbar_sequence),
        correction=correction,
    )


# ---------------------------------------------------------------------------
# Limit checks for the expanded second-order equation
# ---------------------------------------------------------------------------


def squared_term_limits(
    family: WKBFamily,
    potential: EMPotential,
    consts: PhysicalConstants,
    probe_points: np.ndarray,
    fd_rel: float = 1e-3,
) -> dict:
    """Evaluate the six terms of the expanded second-order wave equation,
    each multiplied by e^{-iS/hbar}, against their stated hbar -> 0 limits.

    Derivatives are central differences with step fd_rel * hbar (the phase
    wavelength shrinks with hbar, so the step tracks it). Returns per-term
    distances over the family's hbar sequence and fitted convergence orders.
    """
    probes = np.asarray(probe_points, dtype=float)
    z = probes[:, 0]
    ct = probes[:, 1]
    e, c, m = consts.charge, consts.c, consts.mass

    psi_class = family.classical_part(z, ct)
    G = family.action.gradient_at(z, ct)
    A = potential.vector_potential(z, ct)
    divA = potential.divergence(z, ct)
    F = potential.field_tensor_ict(z, ct)
    gam = np.stack([algebra.gamma(mu) for mu in range(1, 5)])
    spin_mat = np.einsum("mij,njk,...mn->...ik", gam, gam, F)
    g_dot_g = algebra.minkowski(G, G)
    g_dot_a = algebra.minkowski(G, A)
    a_dot_a = algebra.minkowski(A, A)

    limits = {
        "i": g_dot_g[..., None] * psi_class,
        "ii": np.zeros_like(psi_class),
        "iii": -(2 * e / c) * g_dot_a[..., None] * psi_class,
        "iv": (e**2 / c**2) * a_dot_a[..., None] * psi_class,
        "v": np.zeros_like(psi_class),
        "vi": -(m * c) ** 2 * psi_class,
    }

    distances = {k: [] for k in limits}
    for hbar in family.hbar_sequence:
        h = fd_rel * hbar
        psi0 = family.spinor(z, ct, hbar)
        pzp = family.spinor(z + h, ct, hbar)
        pzm = family.spinor(z - h, ct, hbar)
        ptp = family.spinor(z, ct + h, hbar)
        ptm = family.spinor(z, ct - h, hbar)
        dpsi_dz = (pzp - pzm) / (2 * h)
        dpsi_dct = (ptp - ptm) / (2 * h)
        box = (pzp - 2 * psi0 + pzm) / h**2 - (ptp - 2 * psi0 + ptm) / h**2
        dephase = np.exp(-1j * family.action.value(z, ct) / hbar)[..., None]

        terms = {
            "i": -(hbar**2) * dephase * box,
            "ii": -(e * hbar / (1j * c)) * dephase * divA[..., None] * psi0,
            "iii": -(2 * e * hbar / (1j * c))
            * dephase
            * (A[..., 2, None] * dpsi_dz + A[..., 3, None] * dpsi_dct),
            "iv": (e**2 / c**2) * a_dot_a[..., None] * dephase * psi0,
            "v": (1j * e * hbar / (2 * c))
            * dephase
            * np.einsum("...ik,...k->...i", spin_mat, psi0),
            "vi": -((m * c) ** 2) * dephase * psi0,
        }
        for k in limits:
            distances[k].append(float(np.max(np.abs(terms[k] - limits[k]))))

    orders = {}
    for k in limits:
        d = np.asarray(distances[k])
        if np.all(d > 1e-13):
            orders[k] = fit_order(family.hbar_sequence, d)
        else:
            orders[k] = None  # term already exact (distance at roundoff)
    return {
        "hbars": list(family.hbar_sequence),
        "distances": {k: list(v) for k, v in distances.items()},
        "orders": orders,
    }


def fit_order(hs, errs) -> float:
    """Least-squares slope of log(err) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if np.any(errs <= 0):
        raise ValueError("order fit needs positive errors")
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


# ---------------------------------------------------------------------------
# hbar convergence study
# ---------------------------------------------------------------------------


def hbar_convergence_study(
    family: WKBFamily,
    potential: EMPotential,
    consts: PhysicalConstants,
    start: np.ndarray,
    grid: GridSpec,
    config: guidance.IntegratorConfig,
    sigma_end: float = 2.0,
) -> dict:
    """Per-hbar: guidance trajectory vs the proper-time force oracle.

    Reports (a) the max spatial distance between the trajectory and the
    classical worldline through the same start (compared at equal ct) and
    (b) the max |V.V + c^2| proper-time defect along the trajectory."""
    start = np.asarray(start, dtype=float)
    base_nz, base_nt = grid.n_z, grid.n_t
    h0 = family.hbar_sequence[0]
    rows = []
    for hbar in family.hbar_sequence:
        scale = max(1.0, h0 / hbar)
        g = GridSpec(
            grid.z_min, grid.z_max, grid.t_min, grid.t_max,
            int(base_nz * scale), int(base_nt * scale),
        )
        consts_h = PhysicalConstants(consts.c, hbar, consts.mass, consts.charge)
        fld_h = build_wkb_field(family, hbar, g, consts_h)
        row = {"hbar": hbar}
        try:
            traj = guidance.integrate_sigma(fld_h, start, config, consts_h, sigma_end)
        except algebra.NodeError:
            row["node_terminated"] = True
            rows.append(row)
            continue
        row["node_terminated"] = traj.termination == "node_hit"
        row["termination"] = traj.termination

        rho0 = float(fld_h.bar_density_at(start[2], start[3]))
        case = "case_i" if rho0 > 0 else "case_ii"
        U0 = classical_velocity(family.action, potential, start, consts_h, case)
        tau_span = 1.2 * sigma_end
        states = lorentz_force_oracle(
            potential, consts_h, ClassicalState(start, U0, case),
            (0.0, tau_span), step=min(config.d_sigma, 0.01),
        )
        cl_pos = np.array([s.position for s in states])

        ct_lo = max(traj.positions[0, 3], cl_pos[0, 3])
        ct_hi = min(traj.positions[-1, 3], cl_pos[-1, 3])
        ct_common = np.linspace(ct_lo, ct_hi, 200)
        sp_traj = traj.interp_spatial(ct_common)
        sp_cl = np.empty_like(sp_traj)
        for k in range(3):
            sp_cl[..., k] = np.interp(ct_common, cl_pos[:, 3], cl_pos[:, k])
        row["trajectory_distance"] = float(
            np.max(np.linalg.norm(sp_traj - sp_cl, axis=-1))
        )
        defect = guidance.proper_time_defect(traj, consts_h, fld_h)
        row["proper_time_defect"] = float(np.max(np.abs(defect)))
        rows.append(row)

    ok = [r for r in rows if "trajectory_distance" in r]
    report = {"rows": rows}
    if len(ok) >= 2:
        hs = [r["hbar"] for r in ok]
        dists = [r["trajectory_distance"] for r in ok]
        defects = [r["proper_time_defect"] for r in ok]
        report["distance_monotone"] = all(a >= b for a, b in zip(dists, dists[1:]))
        report["defect_monotone"] = all(a >= b for a, b in zip(defects, defects[1:]))
        if min(dists) > 0:
            report["distance_order"] = fit_order(hs, dists)
        if min(defects) > 0:
            report["defect_order"] = fit_order(hs, defects)
        report["defect_final_over_initial"] = (
            defects[-1] / defects[0] if defects[0] > 0 else 0.0
        )
    return report
