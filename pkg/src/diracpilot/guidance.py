"""Particle trajectory integration.

Two laws are provided: the covariant sigma-parameterized law
dX_mu/dsigma = c psibar gamma_mu psi / |psibar psi| and the lab-time form
dX/dT = c psi^+ alpha psi / psi^+ psi. Integration is classic fixed-step RK4,
vectorized over ensembles. Steps never cross a sign change of the density:
the step is bisected to the node and the trajectory terminates there.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import algebra
from .constants import PhysicalConstants
from .field import SpinorField

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "integrate_sigma",
    "integrate_bohm_dirac",
    "advance_ensemble",
    "proper_time_defect",
    "trajectory_csv",
]

STATUS_ACTIVE = 0
STATUS_COMPLETED = 1
STATUS_NODE = 2
STATUS_EXIT = 3

_TAGS = {
    STATUS_COMPLETED: "completed",
    STATUS_NODE: "node_hit",
    STATUS_EXIT: "window_exit",
    STATUS_ACTIVE: "max_steps",
}


@dataclass(frozen=True)
class IntegratorConfig:
    d_sigma: float = 0.01
    max_steps: int = 100_000
    node_epsilon: float = 1e-10
    error_tolerance: float = 1e-8

    def __post_init__(self):
        if self.d_sigma <= 0:
            raise ValueError("d_sigma must be positive")
        if not 0 < self.node_epsilon < 1e-2:
            raise ValueError("node_epsilon must lie in (0, 1e-2)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass
class Trajectory:
    """sigma-ordered samples of the configurational four-position.

    For Bohm-Dirac runs the parameter column holds lab time T instead of
    sigma. The parameter and the temporal coordinate both increase strictly
    (enforced at construction for forward runs)."""

    sigmas: np.ndarray
    positions: np.ndarray  # shape (n, 4) as [x, y, z, ct]
    termination: Literal["completed", "node_hit", "window_exit", "max_steps"]

    def __post_init__(self):
        self.sigmas = np.asarray(self.sigmas, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if len(self.sigmas) != len(self.positions):
            raise ValueError("sample count mismatch")
        if len(self.sigmas) > 1:
            dsig = np.diff(self.sigmas)
            if np.all(dsig > 0) and not np.all(np.diff(self.positions[:, 3]) > 0):
                raise ValueError("temporal coordinate must increase along sigma")

    def __len__(self) -> int:
        return len(self.sigmas)

    @property
    def final_position(self) -> np.ndarray:
        return self.positions[-1]

    def interp_spatial(self, ct: np.ndarray) -> np.ndarray:
        """Spatial coordinates interpolated onto given ct values."""
        ct = np.asarray(ct, dtype=float)
        out = np.empty(ct.shape + (3,))
        for k in range(3):
            out[..., k] = np.interp(ct, self.positions[:, 3], self.positions[:, k])
        return out


class _SigmaVelocity:
    """Batched guidance velocity c psibar gamma psi / |psibar psi|."""

    def __init__(self, field: SpinorField, consts: PhysicalConstants, node_epsilon: float):
        self.field = field
        self.consts = consts
        self.node_threshold = node_epsilon * field.bar_scale()

    def bar(self, X: np.ndarray) -> np.ndarray:
        return algebra.bar_density(self.field.at(X[..., 2], X[..., 3]))

    def __call__(self, X: np.ndarray) -> np.ndarray:
        psi = self.field.at(X[..., 2], X[..., 3])
        rho = algebra.bar_density(psi)
        J = algebra.current(psi, self.consts)
        denom = np.abs(rho)
        safe = np.where(denom > 0, denom, 1.0)
        return J / safe[..., None]


class _BohmDiracVelocity:
    """Batched lab-time velocity c psi^+ alpha psi / psi^+ psi (dct/dt = c)."""

    def __init__(self, field: SpinorField, consts: PhysicalConstants, node_epsilon: float):
        self.field = field
        self.consts = consts
        self.node_threshold = node_epsilon  # relative to psi^+psi itself

    def bar(self, X: np.ndarray) -> np.ndarray:
        psi = self.field.at(X[..., 2], X[..., 3])
        return np.einsum("...i,...i->...", psi.conj(), psi).real

    def __call__(self, X: np.ndarray) -> np.ndarray:
        psi = self.field.at(X[..., 2], X[..., 3])
        dens = np.einsum("...i,...i->...", psi.conj(), psi).real
        J = algebra.current(psi, self.consts)
        safe = np.where(dens > 0, dens, 1.0)
        V = J / safe[..., None]
        V[..., 3] = self.consts.c  # parameter is lab time; d(ct)/dt = c
        return V


def _rk4(vel, X: np.ndarray, h: float) -> np.ndarray:
    k1 = vel(X)
    k2 = vel(X + 0.5 * h * k1)
    k3 = vel(X + 0.5 * h * k2)
    k4 = vel(X + h * k3)
    return X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _controlled_rk4(vel, X: np.ndarray, h: float, tol: float, depth: int = 0) -> np.ndarray:
    """One step of size h with recursive step halving.

    The guidance speed scales like 1/|psibar psi|, so fixed steps lose
    accuracy badly near density nodes; halving keeps the local error below
    tol. Single-trajectory use only (ensembles trade this for throughput)."""
    full = _rk4(vel, X, h)
    mid = _rk4(vel, X, 0.5 * h)
    half2 = _rk4(vel, mid, 0.5 * h)
    if float(np.max(np.abs(full - half2))) <= tol or depth >= 24:
        return half2
    first = _controlled_rk4(vel, X, 0.5 * h, tol, depth + 1)
    return _controlled_rk4(vel, first, 0.5 * h, tol, depth + 1)


def _bisect_step(
    vel, x0: np.ndarray, h: float, sign0: float, tol: float | None = None
) -> tuple[np.ndarray, float]:
    """Largest partial RK4 step from x0 that stays on sign0's side of the node."""
    lo, hi = 0.0, h
    x_best = x0

    def probe(step):
        if tol is None:
            return _rk4(vel, x0[None, :], step)[0]
        return _controlled_rk4(vel, x0[None, :], step, tol)[0]

    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        x_try = probe(mid)
        rho = float(vel.bar(x_try[None, :])[0])
        if np.sign(rho) == sign0 and abs(rho) > vel.node_threshold:
            lo, x_best = mid, x_try
        else:
            hi = mid
    return x_best, lo


def _advance(
    vel,
    X0: np.ndarray,
    param_total: float,
    n_steps: int,
    ct_lo: float,
    ct_hi: float,
):
    """Batched fixed-step driver. Returns (final states, status, param reached).

    Terminated ensemble members freeze at their pre-crossing position: for
    statistics they are excluded by status, so the node/boundary is not
    located precisely (single-trajectory runs do that in integrate_sigma)."""
    X = np.array(X0, dtype=float)
    n = X.shape[0]
    h = param_total / n_steps
    status = np.full(n, STATUS_ACTIVE, dtype=int)
    param = np.zeros(n)

    on_node = np.abs(vel.bar(X)) <= vel.node_threshold
    status[on_node] = STATUS_NODE

    for _ in range(n_steps):
        act = status == STATUS_ACTIVE
        if not np.any(act):
            break
        Xa = X[act]
        sign_before = np.sign(vel.bar(Xa))
        X_new = _rk4(vel, Xa, h)
        rho_new = vel.bar(X_new)
        crossed = (np.sign(rho_new) != sign_before) | (
            np.abs(rho_new) <= vel.node_threshold
        )
        exited = ~crossed & ((X_new[:, 3] > ct_hi) | (X_new[:, 3] < ct_lo))

        idx_act = np.flatnonzero(act)
        status[idx_act[crossed]] = STATUS_NODE
        status[idx_act[exited]] = STATUS_EXIT
        ok = ~crossed & ~exited
        param[idx_act[ok]] += h
        X[idx_act[ok]] = X_new[ok]

    status[status == STATUS_ACTIVE] = STATUS_COMPLETED
    return X, status, param


def _bisect_boundary(vel, x0: np.ndarray, h: float, ct_max: float):
    """Largest partial RK4 step from x0 that stays below the top of the window."""
    lo, hi = 0.0, h
    x_best = x0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        x_try = _rk4(vel, x0[None, :], mid)[0]
        if x_try[3] <= ct_max:
            lo, x_best = mid, x_try
        else:
            hi = mid
    return x_best, lo


def integrate_sigma(
    field: SpinorField,
    start: np.ndarray,
    config: IntegratorConfig,
    consts: PhysicalConstants,
    sigma_end: float | None = None,
) -> Trajectory:
    """Integrate the covariant guidance law from a four-position.

    Runs until sigma_end (tag completed), window exit, a node, or the step
    budget (tag max_steps)."""
    start = np.asarray(start, dtype=float)
    if not (field.ct_min <= start[3] <= field.ct_max):
        raise ValueError("start lies outside the field's time window")
    vel = _SigmaVelocity(field, consts, config.node_epsilon)
    if abs(float(vel.bar(start[None, :])[0])) <= vel.node_threshold:
        raise algebra.NodeError("start point sits on a density node")

    if sigma_end is None:
        n_steps = config.max_steps
    else:
        n_steps = min(config.max_steps, max(1, int(round(sigma_end / config.d_sigma))))
    h = (sigma_end / n_steps) if (sigma_end is not None and n_steps < config.max_steps) \
        else config.d_sigma

    X = start.copy()
    sigma = 0.0
    sigmas = [0.0]
    samples = [X.copy()]
    tag = None
    for _ in range(n_steps):
        sign_before = np.sign(float(vel.bar(X[None, :])[0]))
        X_new = _controlled_rk4(vel, X[None, :], h, config.error_tolerance)[0]
        rho_new = float(vel.bar(X_new[None, :])[0])
        if np.sign(rho_new) != sign_before or abs(rho_new) <= vel.node_threshold:
            x_stop, frac = _bisect_step(vel, X, h, sign_before, config.error_tolerance)
            if frac > 0 and x_stop[3] > samples[-1][3]:
                sigmas.append(sigma + frac)
                samples.append(x_stop)
            tag = "node_hit"
            break
        if X_new[3] > field.ct_max + 1e-12 * max(abs(field.ct_max), 1.0):
            x_stop, frac = _bisect_boundary(vel, X, h, field.ct_max)
            if frac > 0 and x_stop[3] > samples[-1][3]:
                sigmas.append(sigma + frac)
                samples.append(x_stop)
            tag = "window_exit"
            break
        X = X_new
        sigma += h
        sigmas.append(sigma)
        samples.append(X.copy())
    if tag is None:
        tag = "completed" if sigma_end is not None and n_steps < config.max_steps else "max_steps"
    return Trajectory(np.array(sigmas), np.array(samples), tag)


def integrate_bohm_dirac(
    field: SpinorField,
    start_z: float,
    t_range: tuple[float, float],
    config: IntegratorConfig,
    consts: PhysicalConstants,
    start_xy: tuple[float, float] = (0.0, 0.0),
) -> Trajectory:
    """Integrate the lab-time law dX/dT between two times.

    t_range may run backward (t1 < t0); the parameter column holds T."""
    t0, t1 = t_range
    if not (field.grid.t_min <= t0 <= field.grid.t_max):
        raise ValueError("start time outside window")
    if not (field.grid.t_min <= t1 <= field.grid.t_max):
        raise ValueError("end time outside window")
    start = np.array([start_xy[0], start_xy[1], start_z, consts.c * t0])
    vel = _BohmDiracVelocity(field, consts, config.node_epsilon)
    if float(vel.bar(start[None, :])[0]) <= 0:
        raise algebra.NodeError("psi^+ psi vanishes at the start point")

    span = t1 - t0
    n_steps = min(config.max_steps, max(1, int(round(abs(span) / config.d_sigma))))
    h = span / n_steps
    X = start.copy()
    times = [t0]
    samples = [X.copy()]
    tag = "completed"
    for k in range(n_steps):
        X = _rk4(vel, X[None, :], h)[0]
        dens = float(vel.bar(X[None, :])[0])
        if dens <= vel.node_threshold:
            tag = "node_hit"
            break
        times.append(t0 + (k + 1) * h)
        samples.append(X.copy())
    return Trajectory(np.array(times), np.array(samples), tag)


def advance_ensemble(
    field: SpinorField,
    starts: np.ndarray,
    sigma_star: float,
    config: IntegratorConfig,
    consts: PhysicalConstants,
    backward: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance a batch of four-positions by sigma_star under the sigma law.

    Returns (final positions, status codes). `backward` reverses the flow and
    exists for density-transport checks; it is not part of the public
    trajectory surface."""
    starts = np.asarray(starts, dtype=float)
    if sigma_star == 0.0:
        return starts.copy(), np.full(len(starts), STATUS_COMPLETED)
    vel = _SigmaVelocity(field, consts, config.node_epsilon)
    if backward:
        fwd = vel

        class _Rev:
            node_threshold = vel.node_threshold

            def bar(self, X):
                return fwd.bar(X)

            def __call__(self, X):
                return -fwd(X)

        vel_eff = _Rev()
        ct_lo, ct_hi = field.ct_min, np.inf  # backward flow exits at the bottom
    else:
        vel_eff = vel
        ct_lo, ct_hi = -np.inf, field.ct_max
    n_steps = max(1, int(round(sigma_star / config.d_sigma)))
    X, status, _ = _advance(vel_eff, starts, sigma_star, n_steps, ct_lo, ct_hi)
    return X, status


def proper_time_defect(
    traj: Trajectory, consts: PhysicalConstants, field: SpinorField | None = None
) -> np.ndarray:
    """Per-sample V.V + c^2 along a sigma trajectory.

    With the field available the guidance velocity is re-evaluated at the
    samples (the exact RHS of the integrated ODE); otherwise dX/dsigma is
    estimated by central differences of the samples."""
    if len(traj) < 3:
        raise ValueError("need at least 3 samples")
    if field is not None:
        psi = field.at(traj.positions[:, 2], traj.positions[:, 3])
        rho = np.abs(algebra.bar_density(psi))
        V = algebra.current(psi, consts) / rho[..., None]
        return algebra.minkowski(V, V) + consts.c**2
    ds = traj.sigmas[2:] - traj.sigmas[:-2]
    V = (traj.positions[2:] - traj.positions[:-2]) / ds[:, None]
    return algebra.minkowski(V, V) + consts.c**2


def trajectory_csv(traj: Trajectory, path) -> None:
    """CSV export: sigma,x,y,z,ct,termination (termination on last row only)."""
    with open(path, "w") as fh:
        fh.write("sigma,x,y,z,ct,termination\n")
        last = len(traj) - 1
        for i, (s, X) in enumerate(zip(traj.sigmas, traj.positions)):
            tag = traj.termination if i == last else ""
            cells = [repr(float(v)) for v in (s, X[0], X[1], X[2], X[3])]
            fh.write(",".join(cells) + f",{tag}\n")
