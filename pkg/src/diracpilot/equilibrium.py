"""Statistical verification of the space-time density and its flows.

The space-time density is |psibar psi| normalized over a finite window.
Equivariance of the sigma-flow is tested by pushing samples forward and
comparing the empirical histogram against the same density; bins whose
backward-flow preimages leave the window are excluded from the comparison
and reported as such.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra, guidance
from .constants import PhysicalConstants
from .field import SpinorField

__all__ = [
    "SpacetimeWindow",
    "EnsembleReport",
    "make_window",
    "sample_born_nikolic",
    "equivariance_test_sigma",
    "equivariance_test_spatial",
    "continuity_residual",
    "region_probability_covariance",
    "ks_distance",
    "KS_CRIT_99",
]

KS_CRIT_99 = 1.63  # critical K-S coefficient at 99% confidence (D < 1.63/sqrt(n))


class DegenerateDensityError(ValueError):
    """The density integrates to (numerically) zero over the window."""


class NodeFractionError(RuntimeError):
    """Too many trajectories terminated on nodes for the test to be meaningful."""


@dataclass(frozen=True)
class SpacetimeWindow:
    """(z, ct) rectangle with the density normalization over it."""

    z_min: float
    z_max: float
    ct_min: float
    ct_max: float
    normalization: float  # integral of |psibar psi| over the rectangle
    density_max: float  # upper bound of |psibar psi| used by rejection

    def __post_init__(self):
        if not (self.z_max > self.z_min and self.ct_max > self.ct_min):
            raise ValueError("window bounds must be increasing")
        if not (np.isfinite(self.normalization) and self.normalization > 0):
            raise DegenerateDensityError(
                f"window normalization must be positive, got {self.normalization}"
            )

    @property
    def area(self) -> float:
        return (self.z_max - self.z_min) * (self.ct_max - self.ct_min)


@dataclass(frozen=True)
class EnsembleReport:
    n_samples: int
    statistic: float
    threshold: float
    passed: bool
    seed: int
    kind: str
    exclusion_fraction: float = 0.0
    node_fraction: float = 0.0
    baseline: float | None = None

    def __post_init__(self):
        if self.statistic < 0:
            raise ValueError("statistic must be nonnegative")
        if self.n_samples < 100:
            raise ValueError("need at least 100 samples")

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "n_samples": self.n_samples,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
            "seed": self.seed,
            "exclusion_fraction": self.exclusion_fraction,
            "node_fraction": self.node_fraction,
        }
        if self.baseline is not None:
            d["baseline"] = self.baseline
        return d


def make_window(
    field: SpinorField,
    bounds: tuple[float, float, float, float] | None = None,
    refine: int = 2,
) -> SpacetimeWindow:
    """Build a sampling window (default: the whole field window).

    The normalization integral uses the trapezoid rule on a refined grid and
    the rejection bound is the refined max with a 5% safety factor."""
    if bounds is None:
        bounds = (field.z_min, field.z_max, field.ct_min, field.ct_max)
    z0, z1, ct0, ct1 = bounds
    nz = max(64, field.grid.n_z * refine)
    nt = max(64, field.grid.n_t * refine)
    z = np.linspace(z0, z1, nz)
    ct = np.linspace(ct0, ct1, nt)
    zg, ctg = np.meshgrid(z, ct, indexing="xy")
    rho = np.abs(algebra.bar_density(field.at(zg, ctg)))
    Z = float(np.trapezoid(np.trapezoid(rho, z, axis=1), ct))
    return SpacetimeWindow(z0, z1, ct0, ct1, Z, float(rho.max()) * 1.05)


def sample_born_nikolic(
    field: SpinorField,
    window: SpacetimeWindow,
    n: int,
    seed: int,
) -> np.ndarray:
    """Draw n four-positions from |psibar psi|/Z by rejection sampling.

    Uniform proposal over the window rectangle; deterministic given seed.
    Returns an (n, 4) array of [x, y, z, ct] with x = y = 0."""
    rng = np.random.default_rng(seed)
    out = np.empty((n, 4))
    out[:, :2] = 0.0
    got = 0
    # acceptance rate is Z / (M * area); draw in batches sized accordingly
    rate = window.normalization / (window.density_max * window.area)
    batch = int(min(4_000_000, max(1024, 1.5 * n / max(rate, 1e-6))))
    while got < n:
        z = rng.uniform(window.z_min, window.z_max, batch)
        ct = rng.uniform(window.ct_min, window.ct_max, batch)
        u = rng.uniform(0.0, window.density_max, batch)
        rho = np.abs(algebra.bar_density(field.at(z, ct)))
        acc = u <= rho
        k = min(int(acc.sum()), n - got)
        out[got : got + k, 2] = z[acc][:k]
        out[got : got + k, 3] = ct[acc][:k]
        got += k
    return out


def mc_normalization(
    field: SpinorField, window: SpacetimeWindow, n: int, seed: int
) -> float:
    """Monte-Carlo estimate of the window normalization: the rejection
    sampler's acceptance rate times the proposal volume, i.e. the mean
    density over uniform proposals times the window area."""
    rng = np.random.default_rng(seed)
    z = rng.uniform(window.z_min, window.z_max, n)
    ct = rng.uniform(window.ct_min, window.ct_max, n)
    rho = np.abs(algebra.bar_density(field.at(z, ct)))
    return float(rho.mean() * window.area)


def _hist2d(points: np.ndarray, window: SpacetimeWindow, bins: int) -> np.ndarray:
    H, _, _ = np.histogram2d(
        points[:, 2],
        points[:, 3],
        bins=bins,
        range=[[window.z_min, window.z_max], [window.ct_min, window.ct_max]],
    )
    return H


def _density_per_bin(
    field: SpinorField, window: SpacetimeWindow, bins: int, sub: int = 6
) -> np.ndarray:
    """Integral of |psibar psi| over each histogram bin (midpoint rule)."""
    nz = bins * sub
    nt = bins * sub
    dz = (window.z_max - window.z_min) / nz
    dct = (window.ct_max - window.ct_min) / nt
    z = window.z_min + dz * (np.arange(nz) + 0.5)
    ct = window.ct_min + dct * (np.arange(nt) + 0.5)
    zg, ctg = np.meshgrid(z, ct, indexing="ij")
    rho = np.abs(algebra.bar_density(field.at(zg, ctg))) * dz * dct
    return rho.reshape(bins, sub, bins, sub).sum(axis=(1, 3))


def _l1_distance(counts: np.ndarray, reference: np.ndarray, mask: np.ndarray) -> float:
    """L1 distance of the masked, renormalized histograms (range [0, 2])."""
    c = np.where(mask, counts, 0.0)
    r = np.where(mask, reference, 0.0)
    if c.sum() <= 0 or r.sum() <= 0:
        raise DegenerateDensityError("empty comparison region")
    return float(np.abs(c / c.sum() - r / r.sum()).sum())


def _in_window(points: np.ndarray, window: SpacetimeWindow) -> np.ndarray:
    return (
        (points[:, 2] >= window.z_min)
        & (points[:, 2] <= window.z_max)
        & (points[:, 3] >= window.ct_min)
        & (points[:, 3] <= window.ct_max)
    )


def _valid_bin_mask(
    field: SpinorField,
    window: SpacetimeWindow,
    bins: int,
    sigma_star: float,
    config: guidance.IntegratorConfig,
    consts: PhysicalConstants,
) -> np.ndarray:
    """Bins whose backward-flow preimages stay inside the window.

    A pushed-forward sample can land in such a bin only by having started
    inside the window, so the conditional comparison is exact there. All
    four corners and the center of a bin must have interior preimages
    (coarse bins straddling the validity boundary would otherwise bias
    the histogram)."""
    if sigma_star == 0.0:
        return np.ones((bins, bins), dtype=bool)

    def back_ok(z, ct):
        pts = np.zeros((z.size, 4))
        pts[:, 2] = z.ravel()
        pts[:, 3] = ct.ravel()
        back, status = guidance.advance_ensemble(
            field, pts, sigma_star, config, consts, backward=True
        )
        ok = (status == guidance.STATUS_COMPLETED) & _in_window(back, window)
        return ok.reshape(z.shape)

    z_edges = np.linspace(window.z_min, window.z_max, bins + 1)
    ct_edges = np.linspace(window.ct_min, window.ct_max, bins + 1)
    zg, ctg = np.meshgrid(z_edges, ct_edges, indexing="ij")
    corner_ok = back_ok(zg, ctg)
    zc, ctc = np.meshgrid(
        0.5 * (z_edges[:-1] + z_edges[1:]), 0.5 * (ct_edges[:-1] + ct_edges[1:]),
        indexing="ij",
    )
    center_ok = back_ok(zc, ctc)
    return (
        corner_ok[:-1, :-1]
        & corner_ok[1:, :-1]
        & corner_ok[:-1, 1:]
        & corner_ok[1:, 1:]
        & center_ok
    )


def equivariance_test_sigma(
    field: SpinorField,
    window: SpacetimeWindow,
    n: int,
    sigma_star: float,
    config: guidance.IntegratorConfig,
    consts: PhysicalConstants,
    seed: int,
    bins: int = 64,
    max_node_fraction: float = 0.10,
) -> EnsembleReport:
    """Push n density samples forward by sigma_star and compare with the
    same density. Threshold: 1.5x the sigma*=0 sampling-noise baseline."""
    if sigma_star < 0:
        raise ValueError("sigma_star must be nonnegative")
    pts = sample_born_nikolic(field, window, n, seed)
    adv, status = guidance.advance_ensemble(field, pts, sigma_star, config, consts)
    node_frac = float(np.mean(status == guidance.STATUS_NODE))
    if node_frac > max_node_fraction:
        raise NodeFractionError(
            f"{node_frac:.1%} of the ensemble hit nodes (limit {max_node_fraction:.0%})"
        )
    survived = (status == guidance.STATUS_COMPLETED) & _in_window(adv, window)
    excl = 1.0 - float(np.mean(survived))

    mask = _valid_bin_mask(field, window, bins, sigma_star, config, consts)
    counts = _hist2d(adv[survived], window, bins)
    reference = _density_per_bin(field, window, bins)
    dist = _l1_distance(counts, reference, mask)

    base_pts = sample_born_nikolic(field, window, n, seed + 1)
    base = _l1_distance(_hist2d(base_pts, window, bins), reference, mask)
    threshold = 1.5 * base
    return EnsembleReport(
        n_samples=n,
        statistic=dist,
        threshold=threshold,
        passed=dist < threshold,
        seed=seed,
        kind="equivariance_sigma",
        exclusion_fraction=excl,
        node_fraction=node_frac,
        baseline=base,
    )


def _spatial_density(field: SpinorField, t: float, nz: int = 4096):
    z = np.linspace(field.z_min, field.z_max, nz)
    psi = field.at(z, np.full_like(z, field.consts.c * t))
    dens = np.einsum("...i,...i->...", psi.conj(), psi).real
    return z, dens


def _cdf_from_density(z: np.ndarray, dens: np.ndarray):
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * np.diff(z) / 2)])
    if cdf[-1] <= 0:
        raise DegenerateDensityError("spatial density integrates to zero")
    return cdf / cdf[-1]


def ks_distance(samples: np.ndarray, z_grid: np.ndarray, cdf: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance against a numeric CDF."""
    x = np.sort(samples)
    F = np.interp(x, z_grid, cdf)
    n = len(x)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(np.abs(i / n - F), np.abs((i - 1) / n - F))))


def sample_spatial(field: SpinorField, t: float, n: int, seed: int) -> np.ndarray:
    """Draw z-values from the normalized psi^+ psi(., t) by rejection."""
    z_grid, dens = _spatial_density(field, t)
    m = dens.max() * 1.05
    rng = np.random.default_rng(seed)
    out = np.empty(n)
    got = 0
    while got < n:
        z = rng.uniform(field.z_min, field.z_max, 4 * n)
        u = rng.uniform(0, m, 4 * n)
        psi = field.at(z, np.full_like(z, field.consts.c * t))
        dens_z = np.einsum("...i,...i->...", psi.conj(), psi).real
        acc = u <= dens_z
        k = min(int(acc.sum()), n - got)
        out[got : got + k] = z[acc][:k]
        got += k
    return out


def equivariance_test_spatial(
    field: SpinorField,
    t0: float,
    t1: float,
    n: int,
    config: guidance.IntegratorConfig,
    consts: PhysicalConstants,
    seed: int,
) -> EnsembleReport:
    """Bohm-Dirac spatial equivariance: sample psi^+psi(., t0), advance each
    point to t1 in lab time, K-S test against psi^+psi(., t1) at 99%."""
    z0 = sample_spatial(field, t0, n, seed)
    vel = guidance._BohmDiracVelocity(field, consts, config.node_epsilon)
    X = np.zeros((n, 4))
    X[:, 2] = z0
    X[:, 3] = consts.c * t0
    span = t1 - t0
    n_steps = max(1, int(round(abs(span) / config.d_sigma)))
    h = span / n_steps
    for _ in range(n_steps):
        X = guidance._rk4(vel, X, h)
    # z is periodic on the window; fold wrapped-around arrivals back in
    width = field.z_max - field.z_min
    z_final = field.z_min + np.mod(X[:, 2] - field.z_min, width)
    z_grid, dens1 = _spatial_density(field, t1)
    stat = ks_distance(z_final, z_grid, _cdf_from_density(z_grid, dens1))
    threshold = KS_CRIT_99 / np.sqrt(n)
    return EnsembleReport(
        n_samples=n,
        statistic=stat,
        threshold=threshold,
        passed=stat < threshold,
        seed=seed,
        kind="equivariance_spatial",
    )


def continuity_residual(
    field: SpinorField, consts: PhysicalConstants, which: str = "eq_current"
) -> float:
    """Max-abs of the four-divergence of the current over interior nodes.

    The space-time density form and the bare current form coincide
    analytically; the tag only labels reports."""
    if which not in ("eq_current", "eq_density_flow", "eq2_4", "eq2_6"):
        raise ValueError(f"unknown continuity form {which!r}")
    J = algebra.current(field.values, consts)
    dz = field.grid.dz
    dct = consts.c * field.grid.dt
    dJz = (J[1:-1, 2:, 2] - J[1:-1, :-2, 2]) / (2 * dz)
    dJ0 = (J[2:, 1:-1, 3] - J[:-2, 1:-1, 3]) / (2 * dct)
    return float(np.max(np.abs(dJz + dJ0)))


def _gauss_legendre_2d(bounds, n_side: int):
    """Tensor Gauss-Legendre nodes/weights on a rectangle."""
    (a, b), (c, d) = bounds
    x, wx = np.polynomial.legendre.leggauss(n_side)
    u = 0.5 * (b - a) * x + 0.5 * (a + b)
    v = 0.5 * (d - c) * x + 0.5 * (c + d)
    wu = 0.5 * (b - a) * wx
    wv = 0.5 * (d - c) * wx
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    return U, V, W


def region_probability_covariance(
    field: SpinorField,
    region: tuple[float, float, float, float],
    boost: algebra.BoostSpec,
    n_quadrature: int,
    consts: PhysicalConstants,
) -> tuple[float, float]:
    """Probability of a (z, ct) region computed in two frames.

    P integrates |psibar psi|/Z over the region; P' repeats the computation
    in the boosted frame: boosted region, transformed spinor S psi evaluated
    at pulled-back points, its own normalization over the boosted window.
    For any nonzero rapidity the primed quadrature nodes pull back to
    different physical points, so the two evaluations are independent;
    at zero rapidity they coincide exactly."""
    if tuple(boost.axis) != (0.0, 0.0, 1.0):
        raise ValueError("region probabilities support boosts along z only")
    z0, z1, ct0, ct1 = region
    if not (
        field.z_min <= z0 < z1 <= field.z_max
        and field.ct_min <= ct0 < ct1 <= field.ct_max
    ):
        raise ValueError("region clipped by the field window")
    S = algebra.spin_boost(boost)
    L = algebra.lorentz_boost_matrix(boost)
    L2 = L[np.ix_([2, 3], [2, 3])]  # (z, ct) block
    L2_inv = np.linalg.inv(L2)

    def unprimed_integral(bounds, n_side):
        U, V, W = _gauss_legendre_2d(bounds, n_side)
        rho = np.abs(algebra.bar_density(field.at(U, V)))
        return float(np.sum(W * rho))

    def primed_integral(bounds, n_side):
        # parameterize the boosted image of the rectangle by the rectangle
        U, V, W = _gauss_legendre_2d(bounds, n_side)
        zp = L2[0, 0] * U + L2[0, 1] * V
        ctp = L2[1, 0] * U + L2[1, 1] * V
        # pull the primed points back and transform the spinor
        zb = L2_inv[0, 0] * zp + L2_inv[0, 1] * ctp
        ctb = L2_inv[1, 0] * zp + L2_inv[1, 1] * ctp
        psi = field.at(zb, ctb)
        psi_p = np.einsum("ij,...j->...i", S, psi)
        rho = np.abs(algebra.bar_density(psi_p))
        jac = abs(np.linalg.det(L2))
        return float(np.sum(W * rho) * jac)

    n_side = max(8, int(np.sqrt(n_quadrature)))
    win = ((field.z_min, field.z_max), (field.ct_min, field.ct_max))
    reg = ((z0, z1), (ct0, ct1))
    P = unprimed_integral(reg, n_side) / unprimed_integral(win, n_side)
    Pp = primed_integral(reg, n_side) / primed_integral(win, n_side)
    return P, Pp
