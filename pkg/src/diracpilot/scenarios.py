"""Named experiment scenarios executed by the CLI.

Each scenario consumes a validated ScenarioConfig, writes its artifacts into
the output directory and returns (passed, report, output file names). Pass
criteria and tolerances are fixed here, not in the configs.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from . import algebra, classical, equilibrium, field as fld, guidance, twoparticle as tp
from .config import ConfigError, ScenarioConfig
from .reporting import pmap, write_csv, write_json

REGISTRY: dict[str, tuple[str, object]] = {}


def scenario(name: str, description: str):
    def wrap(fn):
        REGISTRY[name] = (description, fn)
        return fn

    return wrap


def list_scenarios(filter_text: str = "") -> list[tuple[str, str]]:
    out = []
    for name in sorted(REGISTRY):
        desc = REGISTRY[name][0]
        if filter_text.lower() in name.lower():
            out.append((name, desc))
    return out


def run_scenario(cfg: ScenarioConfig, out_dir: Path, workers: int = 1):
    if cfg.scenario not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigError(f"unknown scenario {cfg.scenario!r} (known: {known})")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return REGISTRY[cfg.scenario][1](cfg, out_dir, workers)


def _check_run_keys(cfg: ScenarioConfig, allowed: set):
    unknown = set(cfg.run) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in run")


def _integrator(cfg: ScenarioConfig) -> guidance.IntegratorConfig:
    return guidance.IntegratorConfig(
        d_sigma=float(cfg.run.get("d_sigma", 0.01)),
        max_steps=int(cfg.run.get("max_steps", 100_000)),
        node_epsilon=float(cfg.run.get("node_epsilon", 1e-10)),
        error_tolerance=float(cfg.run.get("error_tolerance", 1e-8)),
    )


_COMMON_RUN = {"d_sigma", "max_steps", "node_epsilon", "error_tolerance"}


def path_deviation(tr_sigma: guidance.Trajectory, tr_smooth: guidance.Trajectory) -> float:
    """Max |z| gap between the sigma-law samples and the lab-time path.

    The sigma samples can be sparse in ct where the density is small, so
    they are compared pointwise against a spline through the (dense,
    uniform-in-t) lab-time samples rather than interpolated themselves."""
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(tr_smooth.positions[:, 3], tr_smooth.positions[:, 2])
    ct = tr_sigma.positions[:, 3]
    inside = (ct >= tr_smooth.positions[0, 3]) & (ct <= tr_smooth.positions[-1, 3])
    if not np.any(inside):
        raise ValueError("trajectories share no common time range")
    return float(np.max(np.abs(tr_sigma.positions[inside, 2] - spline(ct[inside]))))


# ---------------------------------------------------------------------------


@scenario("plane-wave-residual", "wave-equation residual convergence for an analytic plane wave")
def _plane_wave_residual(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"refinements"} | _COMMON_RUN)
    if cfg.grid is None:
        raise ConfigError("plane-wave-residual needs a grid")
    refinements = [int(r) for r in cfg.run.get("refinements", [1, 2, 4])]
    potential = cfg.build_potential()

    def residuals(factor: int) -> tuple[int, float, float]:
        g = replace(cfg.grid, n_z=cfg.grid.n_z * factor, n_t=cfg.grid.n_t * factor)
        f = cfg.build_field(g)
        return (
            g.n_z,
            fld.dirac_residual(f, potential, cfg.constants),
            fld.squared_equation_residual(f, potential, cfg.constants),
        )

    rows = pmap(residuals, refinements, workers)
    ns = np.array([r[0] for r in rows], dtype=float)
    r1 = np.array([r[1] for r in rows])
    r2 = np.array([r[2] for r in rows])
    order1 = -classical.fit_order(ns, r1)
    order2 = -classical.fit_order(ns, r2)
    passed = bool(1.8 <= order1 <= 2.2 and 1.8 <= order2 <= 2.2)

    base_field = cfg.build_field()
    fld.export_field(base_field, out / "field.txt")
    write_csv(out / "residuals.csv", ["n", "dirac_residual", "squared_residual"], rows)
    report = {
        "scenario": cfg.scenario,
        "dirac_order": order1,
        "squared_order": order2,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["residuals.csv", "report.json", "field.txt"]


@scenario("rest-plane-wave-trajectory", "guidance trajectory of the rest plane wave (static worldline)")
def _rest_trajectory(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"sigma_end", "start"} | _COMMON_RUN)
    f = cfg.build_field()
    start = np.asarray(cfg.run.get("start", [0.0, 0.0, 0.0, 0.0]), dtype=float)
    traj = guidance.integrate_sigma(
        f, start, _integrator(cfg), cfg.constants, float(cfg.run.get("sigma_end", 5.0))
    )
    drift = float(np.max(np.abs(traj.positions[:, :3] - traj.positions[0, :3])))
    passed = drift < 1e-12
    guidance.trajectory_csv(traj, out / "trajectory.csv")
    fld.export_field(f, out / "field.txt")
    report = {
        "scenario": cfg.scenario,
        "spatial_drift": drift,
        "termination": traj.termination,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["trajectory.csv", "report.json", "field.txt"]


@scenario("plane-wave-trajectory", "guidance trajectory slope pc/E for a single plane wave")
def _plane_trajectory(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"sigma_end", "start"} | _COMMON_RUN)
    waves = cfg.field_spec.get("plane_waves", [])
    if len(waves) != 1:
        raise ConfigError("plane-wave-trajectory expects exactly one plane wave")
    p = float(waves[0].get("momentum", 0.0))
    f = cfg.build_field()
    start = np.asarray(cfg.run.get("start", [0.0, 0.0, 0.0, 0.0]), dtype=float)
    traj = guidance.integrate_sigma(
        f, start, _integrator(cfg), cfg.constants, float(cfg.run.get("sigma_end", 5.0))
    )
    dz = traj.positions[-1, 2] - traj.positions[0, 2]
    dct = traj.positions[-1, 3] - traj.positions[0, 3]
    slope_err = abs(dz / dct - p * cfg.constants.c / cfg.constants.energy(p))
    passed = slope_err < 1e-8
    guidance.trajectory_csv(traj, out / "trajectory.csv")
    fld.export_field(f, out / "field.txt")
    report = {
        "scenario": cfg.scenario,
        "slope_error": float(slope_err),
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["trajectory.csv", "report.json", "field.txt"]


@scenario("bohm-dirac-equivalence", "sigma-flow vs lab-time paths coincide after reparameterization")
def _bd_equivalence(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"starts", "t0", "t1"} | _COMMON_RUN)
    f = cfg.build_field()
    icfg = _integrator(cfg)
    t0 = float(cfg.run.get("t0", f.grid.t_min))
    t1 = float(cfg.run.get("t1", f.grid.t_max))
    starts = cfg.run.get("starts", [0.0])
    worst = 0.0
    files = ["report.json"]
    for k, z0 in enumerate(starts):
        start = np.array([0.0, 0.0, float(z0), cfg.constants.c * t0])
        tr_sigma = guidance.integrate_sigma(f, start, icfg, cfg.constants)
        tr_bd = guidance.integrate_bohm_dirac(f, float(z0), (t0, t1), icfg, cfg.constants)
        worst = max(worst, path_deviation(tr_sigma, tr_bd))
        if k == 0:
            guidance.trajectory_csv(tr_sigma, out / "trajectory_sigma.csv")
            guidance.trajectory_csv(tr_bd, out / "trajectory_lab.csv")
            fld.export_field(f, out / "field.txt")
            files += ["trajectory_sigma.csv", "trajectory_lab.csv", "field.txt"]
    passed = worst < 1e-6
    report = {
        "scenario": cfg.scenario,
        "max_path_deviation": worst,
        "n_starts": len(starts),
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, files


@scenario("equivariance-superposition", "sigma-flow pushforward preserves the space-time density")
def _equiv_sigma(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"n", "sigma_star", "bins"} | _COMMON_RUN)
    f = cfg.build_field()
    window = equilibrium.make_window(f)
    rep = equilibrium.equivariance_test_sigma(
        f,
        window,
        int(cfg.run.get("n", 100_000)),
        float(cfg.run.get("sigma_star", 1.0)),
        _integrator(cfg),
        cfg.constants,
        cfg.seed,
        bins=int(cfg.run.get("bins", 64)),
    )
    report = {"scenario": cfg.scenario, **rep.to_dict()}
    write_json(out / "report.json", report)
    return bool(rep.passed), report, ["report.json"]


@scenario("equivariance-spatial", "lab-time flow preserves the spatial density (K-S at 99%)")
def _equiv_spatial(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"n", "t0", "t1", "hist_bins"} | _COMMON_RUN)
    f = cfg.build_field()
    t0 = float(cfg.run.get("t0", f.grid.t_min))
    t1 = float(cfg.run.get("t1", f.grid.t_max))
    n = int(cfg.run.get("n", 100_000))
    icfg = _integrator(cfg)
    rep = equilibrium.equivariance_test_spatial(f, t0, t1, n, icfg, cfg.constants, cfg.seed)

    # histogram artifact for the figure component
    bins = int(cfg.run.get("hist_bins", 64))
    z0 = equilibrium.sample_spatial(f, t0, n, cfg.seed)
    vel = equilibrium.guidance._BohmDiracVelocity(f, cfg.constants, icfg.node_epsilon)
    X = np.zeros((n, 4))
    X[:, 2] = z0
    X[:, 3] = cfg.constants.c * t0
    steps = max(1, int(round(abs(t1 - t0) / icfg.d_sigma)))
    h = (t1 - t0) / steps
    for _ in range(steps):
        X = equilibrium.guidance._rk4(vel, X, h)
    width = f.z_max - f.z_min
    zf = f.z_min + np.mod(X[:, 2] - f.z_min, width)
    counts, edges = np.histogram(zf, bins=bins, range=(f.z_min, f.z_max))
    dens_grid, dens = equilibrium._spatial_density(f, t1)
    norm = np.trapezoid(dens, dens_grid)
    centers = 0.5 * (edges[:-1] + edges[1:])
    ref = np.interp(centers, dens_grid, dens) / norm
    emp = counts / counts.sum() / np.diff(edges)
    write_csv(
        out / "equivariance_histogram.csv",
        ["z_lo", "z_hi", "empirical_density", "reference_density"],
        [(edges[i], edges[i + 1], emp[i], ref[i]) for i in range(bins)],
    )
    report = {"scenario": cfg.scenario, **rep.to_dict()}
    write_json(out / "report.json", report)
    return bool(rep.passed), report, ["report.json", "equivariance_histogram.csv"]


@scenario("region-probability-covariance", "region probability is frame-independent under a boost")
def _region_prob(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"region", "rapidity", "n_quadrature", "tolerance"} | _COMMON_RUN)
    f = cfg.build_field()
    region = tuple(float(x) for x in cfg.run["region"])
    rapidity = float(cfg.run.get("rapidity", 1.0))
    tol = float(cfg.run.get("tolerance", 1e-4))
    P, Pp = equilibrium.region_probability_covariance(
        f, region, algebra.BoostSpec(rapidity), int(cfg.run.get("n_quadrature", 10**6)),
        cfg.constants,
    )
    diff = abs(P - Pp)
    passed = diff < tol
    report = {
        "scenario": cfg.scenario,
        "P": P,
        "P_boosted": Pp,
        "difference": diff,
        "tolerance": tol,
        "rapidity": rapidity,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["report.json"]


@scenario("covariance-identities", "transformation identities over random spinors and boosts")
def _covariance(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"n_trials", "max_rapidity", "tolerance"} | _COMMON_RUN)
    n = int(cfg.run.get("n_trials", 100))
    max_rap = float(cfg.run.get("max_rapidity", 2.0))
    tol = float(cfg.run.get("tolerance", 1e-10))
    rng = np.random.default_rng(cfg.seed)
    consts = cfg.constants

    errs = {
        "sbeta_identity": 0.0,
        "bar_density_scalar": 0.0,
        "current_four_vector": 0.0,
        "gamma_transformation": 0.0,
        "two_density_scalar": 0.0,
        "two_currents_four_vector": 0.0,
    }
    gammas = [algebra.gamma(mu) for mu in range(1, 5)]
    for _ in range(n):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        spec = algebra.BoostSpec(rng.uniform(-max_rap, max_rap), tuple(axis))
        S = algebra.spin_boost(spec)
        L = algebra.lorentz_boost_matrix(spec)
        Sinv = np.linalg.inv(S)
        errs["sbeta_identity"] = max(
            errs["sbeta_identity"],
            float(np.abs(S.conj().T @ algebra.BETA - algebra.BETA @ Sinv).max()),
        )
        Lam = np.zeros((4, 4), dtype=complex)
        Lam[:3, :3] = L[:3, :3]
        Lam[:3, 3] = -1j * L[:3, 3]
        Lam[3, :3] = 1j * L[3, :3]
        Lam[3, 3] = L[3, 3]
        for mu in range(4):
            rhs = sum(Lam[eta, mu] * (Sinv @ gammas[eta] @ S) for eta in range(4))
            errs["gamma_transformation"] = max(
                errs["gamma_transformation"], float(np.abs(rhs - gammas[mu]).max())
            )
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi_p = S @ psi
        errs["bar_density_scalar"] = max(
            errs["bar_density_scalar"],
            abs(float(algebra.bar_density(psi_p) - algebra.bar_density(psi))),
        )
        J = algebra.current(psi, consts)
        Jp = algebra.current(psi_p, consts)
        errs["current_four_vector"] = max(
            errs["current_four_vector"],
            float(np.abs(Jp - L @ J).max() / max(np.abs(J).max(), 1e-30)),
        )
        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        Mp = np.einsum("si,rj,ij->sr", S, S, M)
        errs["two_density_scalar"] = max(
            errs["two_density_scalar"],
            abs(float(tp.density_of_matrix(Mp) - tp.density_of_matrix(M))),
        )
        J1, J2 = tp.currents_of_matrix(M, consts)
        J1p, J2p = tp.currents_of_matrix(Mp, consts)
        scale = max(np.abs(J1).max(), np.abs(J2).max(), 1e-30)
        errs["two_currents_four_vector"] = max(
            errs["two_currents_four_vector"],
            float(np.abs(J1p - L @ J1).max() / scale),
            float(np.abs(J2p - L @ J2).max() / scale),
        )
    passed = all(v < tol for v in errs.values())
    report = {
        "scenario": cfg.scenario,
        "n_trials": n,
        "max_rapidity": max_rap,
        "tolerance": tol,
        "errors": errs,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["report.json"]


def _term_check_family(cfg: ScenarioConfig) -> classical.WKBFamily:
    p = float(cfg.run.get("momentum", 0.8))
    hbars = tuple(float(h) for h in cfg.run.get("hbar_sequence", classical.DEFAULT_HBAR_SEQUENCE))
    S = classical.free_action(p, cfg.constants)
    return classical.WKBFamily(
        action=S,
        amplitudes=(
            lambda z, ct: 1.0 + 0.1 * np.cos(0.5 * z),
            lambda z, ct: 0.5 + 0.0 * z,
            lambda z, ct: 0.3 + 0.05 * np.sin(0.4 * z),
            lambda z, ct: 0.2 + 0.0 * z,
        ),
        phases1=(
            lambda z, ct: 0.2 * z,
            lambda z, ct: 0.1 * ct,
            lambda z, ct: 0.0 * z,
            lambda z, ct: 0.05 * (z + ct),
        ),
        hbar_sequence=hbars,
    )


@scenario("classical-term-limits", "hbar -> 0 limits of the six expanded wave-equation terms")
def _term_limits(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(
        cfg, {"momentum", "hbar_sequence", "probes", "fd_rel"} | _COMMON_RUN
    )
    if cfg.grid is None:
        raise ConfigError("classical-term-limits needs a grid")
    family = _term_check_family(cfg)
    potential = cfg.build_potential()
    probes = np.asarray(
        cfg.run.get("probes", [[-2.0, 1.0], [0.5, 2.0], [3.0, 1.5], [1.0, 3.0]]),
        dtype=float,
    )
    rep = classical.squared_term_limits(
        family, potential, cfg.constants, probes, float(cfg.run.get("fd_rel", 1e-3))
    )
    ok_terms = []
    for term in ("ii", "v"):
        order = rep["orders"][term]
        ok_terms.append(order is None or abs(order - 1.0) <= 0.3)
    passed = all(ok_terms)
    rows = []
    for i, h in enumerate(rep["hbars"]):
        rows.append([h] + [rep["distances"][k][i] for k in ("i", "ii", "iii", "iv", "v", "vi")])
    write_csv(
        out / "term_distances.csv",
        ["hbar", "term_i", "term_ii", "term_iii", "term_iv", "term_v", "term_vi"],
        rows,
    )
    report = {"scenario": cfg.scenario, **rep, "pass": passed, "seed": cfg.seed}
    write_json(out / "report.json", report)
    return passed, report, ["report.json", "term_distances.csv"]


@scenario("hbar-convergence", "trajectories approach the proper-time force worldline as hbar -> 0")
def _hbar_convergence(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(
        cfg,
        {"momentum", "energy_level", "hbar_sequence", "start", "sigma_end", "psi1", "psi2"}
        | _COMMON_RUN,
    )
    if cfg.grid is None:
        raise ConfigError("hbar-convergence needs a grid")
    potential = cfg.build_potential()
    hbars = tuple(float(h) for h in cfg.run.get("hbar_sequence", classical.DEFAULT_HBAR_SEQUENCE))
    if isinstance(potential, fld.ConstantElectricField):
        action = classical.constant_field_action(
            potential.e0, float(cfg.run.get("energy_level", 2.0)), cfg.constants
        )
    else:
        action = classical.free_action(float(cfg.run.get("momentum", 0.8)), cfg.constants)
    correction = (
        lambda z, ct: 0.25 + 0.1j + 0.0 * z,
        lambda z, ct: 0.15j * np.cos(0.3 * z),
        lambda z, ct: 0.1 - 0.2j + 0.0 * z,
        lambda z, ct: 0.2j * np.sin(0.2 * ct),
    )
    family = classical.classical_family(
        action,
        potential,
        cfg.constants,
        psi1=complex(cfg.run.get("psi1", 1.0)),
        psi2=complex(cfg.run.get("psi2", 0.4)),
        correction=correction,
        hbar_sequence=hbars,
    )
    start = np.asarray(cfg.run.get("start", [0.0, 0.0, 0.5, 0.2]), dtype=float)
    rep = classical.hbar_convergence_study(
        family, potential, cfg.constants, start, cfg.grid, _integrator(cfg),
        sigma_end=float(cfg.run.get("sigma_end", 2.0)),
    )
    ok_rows = [r for r in rep["rows"] if "trajectory_distance" in r]
    passed = bool(
        len(ok_rows) == len(hbars)
        and rep.get("distance_monotone")
        and rep.get("defect_monotone")
        and rep.get("defect_final_over_initial", 1.0) < 0.10
    )
    write_csv(
        out / "convergence.csv",
        ["hbar", "trajectory_distance", "proper_time_defect"],
        [
            (r["hbar"], r.get("trajectory_distance", float("nan")), r.get("proper_time_defect", float("nan")))
            for r in rep["rows"]
        ],
    )
    report = {"scenario": cfg.scenario, **rep, "pass": passed, "seed": cfg.seed}
    write_json(out / "report.json", report)
    return passed, report, ["report.json", "convergence.csv"]


def _pair_factors(cfg: ScenarioConfig):
    p1 = float(cfg.run.get("p1", 0.8))
    p2 = float(cfg.run.get("p2", -0.5))
    f1 = fld.plane_wave(fld.PlaneWaveSpec(p1), cfg.constants, cfg.grid)
    f2 = fld.plane_wave(fld.PlaneWaveSpec(p2), cfg.constants, cfg.grid)
    return f1, f2


@scenario("two-particle-separable", "separable pair trajectories reduce to single-particle runs")
def _tp_separable(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"p1", "p2", "start1", "start2", "sigma_end"} | _COMMON_RUN)
    if cfg.grid is None:
        raise ConfigError("two-particle scenarios need a grid")
    f1, f2 = _pair_factors(cfg)
    pf = tp.product_field(f1, f2)
    icfg = _integrator(cfg)
    start = tp.TwoParticleConfiguration(
        np.asarray(cfg.run.get("start1", [0.0, 0.0, 0.5, 0.1]), float),
        np.asarray(cfg.run.get("start2", [0.0, 0.0, -1.0, 0.2]), float),
    )
    sigma_end = float(cfg.run.get("sigma_end", 3.0))
    tr1, tr2 = tp.integrate_pair(pf, start, icfg, cfg.constants, sigma_end)
    s1 = guidance.integrate_sigma(f1, start.pos1, icfg, cfg.constants, sigma_end)
    s2 = guidance.integrate_sigma(f2, start.pos2, icfg, cfg.constants, sigma_end)
    m = min(len(tr1), len(s1), len(tr2), len(s2))
    dev = max(
        float(np.max(np.abs(tr1.positions[:m] - s1.positions[:m]))),
        float(np.max(np.abs(tr2.positions[:m] - s2.positions[:m]))),
    )
    passed = dev < 1e-8
    tp.pair_trajectory_csv(tr1, tr2, out / "pair_trajectory.csv")
    report = {
        "scenario": cfg.scenario,
        "max_deviation_from_single": dev,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["report.json", "pair_trajectory.csv"]


@scenario("two-particle-entangled", "velocity of one particle depends on the other's position")
def _tp_entangled(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(
        cfg, {"p1", "p2", "weights", "start1", "start2", "sigma_end", "probe_z2"} | _COMMON_RUN
    )
    if cfg.grid is None:
        raise ConfigError("two-particle scenarios need a grid")
    f1, f2 = _pair_factors(cfg)
    w = cfg.run.get("weights", [[0.8, 0.0], [0.6, 0.0]])
    ent = tp.TwoParticleField(
        (
            (complex(w[0][0], w[0][1]), f1, f2),
            (complex(w[1][0], w[1][1]), f2, f1),
        )
    )
    sep = tp.product_field(f1, f2)
    icfg = _integrator(cfg)
    start1 = np.asarray(cfg.run.get("start1", [0.0, 0.0, 0.5, 0.1]), float)
    probe_z2 = cfg.run.get("probe_z2", list(np.linspace(-3.0, 3.0, 7)))

    def variation(ff):
        vs = []
        for z2 in probe_z2:
            X2 = np.array([0.0, 0.0, float(z2), 0.3])
            vs.append(tp.pair_velocity(ff, start1, X2, icfg, cfg.constants)[:4])
        return float(np.max(np.ptp(np.asarray(vs), axis=0)))

    witness_ent = variation(ent)
    witness_sep = variation(sep)
    tol = icfg.error_tolerance
    passed = witness_ent > 10 * tol and witness_sep < tol

    start = tp.TwoParticleConfiguration(
        start1, np.asarray(cfg.run.get("start2", [0.0, 0.0, -1.0, 0.2]), float)
    )
    tr1, tr2 = tp.integrate_pair(
        ent, start, icfg, cfg.constants, float(cfg.run.get("sigma_end", 3.0))
    )
    tp.pair_trajectory_csv(tr1, tr2, out / "pair_trajectory.csv")
    report = {
        "scenario": cfg.scenario,
        "witness_entangled": witness_ent,
        "witness_separable": witness_sep,
        "tolerance": tol,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["report.json", "pair_trajectory.csv"]


@scenario("two-particle-covariance", "pair density scalar and currents four-vector under boosts")
def _tp_covariance(cfg: ScenarioConfig, out: Path, workers: int):
    _check_run_keys(cfg, {"n_trials", "max_rapidity", "tolerance"} | _COMMON_RUN)
    n = int(cfg.run.get("n_trials", 100))
    tol = float(cfg.run.get("tolerance", 1e-10))
    rng = np.random.default_rng(cfg.seed)
    worst_d = 0.0
    worst_j = 0.0
    for _ in range(n):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        spec = algebra.BoostSpec(rng.uniform(-2.0, 2.0), tuple(axis))
        S = algebra.spin_boost(spec)
        L = algebra.lorentz_boost_matrix(spec)
        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        Mp = np.einsum("si,rj,ij->sr", S, S, M)
        worst_d = max(
            worst_d, abs(float(tp.density_of_matrix(Mp) - tp.density_of_matrix(M)))
        )
        J1, J2 = tp.currents_of_matrix(M, cfg.constants)
        J1p, J2p = tp.currents_of_matrix(Mp, cfg.constants)
        scale = max(np.abs(J1).max(), np.abs(J2).max(), 1e-30)
        worst_j = max(
            worst_j,
            float(np.abs(J1p - L @ J1).max() / scale),
            float(np.abs(J2p - L @ J2).max() / scale),
        )
    passed = worst_d < tol and worst_j < tol
    report = {
        "scenario": cfg.scenario,
        "density_scalar_error": worst_d,
        "currents_four_vector_error": worst_j,
        "tolerance": tol,
        "pass": passed,
        "seed": cfg.seed,
    }
    write_json(out / "report.json", report)
    return passed, report, ["report.json"]
