"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single pass/fail line (visible with pytest -s or in the
captured output) including its runtime, and asserts both the physics bound
and the runtime budget.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest

from diracpilot import algebra, classical as cl, cli, equilibrium as eq
from diracpilot import field as fld, guidance as gd, twoparticle as tp
from diracpilot.classical import fit_order
from diracpilot.constants import PhysicalConstants
from diracpilot.scenarios import path_deviation

CONSTS = PhysicalConstants()
L = 4 * np.pi
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


class Criterion:
    def __init__(self, name: str, budget_s: float):
        self.name = name
        self.budget = budget_s
        self.t0 = time.perf_counter()
        self.failures = []

    def check(self, label: str, ok: bool):
        if not ok:
            self.failures.append(label)

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        ok = not self.failures
        status = "PASS" if ok else f"FAIL ({', '.join(self.failures)})"
        print(f"[{status}] {self.name}  ({elapsed:.1f}s / budget {self.budget:.0f}s)")
        assert ok, f"{self.name}: {self.failures}"
        assert elapsed < self.budget, f"{self.name} exceeded its runtime budget"


def grid(n=128):
    return fld.GridSpec(-L / 2, L / 2, 0.0, L, n, n)


def two_wave(g=None):
    g = g or grid()
    fp = fld.plane_wave(fld.PlaneWaveSpec(1.0), CONSTS, g)
    fm = fld.plane_wave(fld.PlaneWaveSpec(-0.5), CONSTS, g)
    return fld.superpose([fp, fm], [0.8, 0.6])


def random_boost(rng, max_rapidity=2.0):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return algebra.BoostSpec(rng.uniform(-max_rapidity, max_rapidity), tuple(axis))


def test_clifford_representation_suite():
    crit = Criterion("Clifford/representation suite", budget_s=1.0)
    tol = 1e-12
    for mu in range(1, 5):
        for nu in range(1, 5):
            g1, g2 = algebra.gamma(mu), algebra.gamma(nu)
            target = -2.0 * (mu == nu) * np.eye(4)
            crit.check(
                f"anticommutator {mu}{nu}",
                np.abs(g1 @ g2 + g2 @ g1 - target).max() < tol,
            )
    beta = np.asarray(algebra.BETA)
    for i in range(1, 4):
        a = algebra.alpha(i)
        crit.check(f"alpha{i} hermitian", np.abs(a - a.conj().T).max() < tol)
        crit.check(f"alpha{i} squared", np.abs(a @ a - np.eye(4)).max() < tol)
        crit.check(f"beta gamma{i}", np.abs(beta @ algebra.gamma(i) - a).max() < tol)
    crit.check("beta gamma4 = i", np.abs(beta @ algebra.gamma(4) - 1j * np.eye(4)).max() < tol)
    crit.check("beta squared", np.abs(beta @ beta - np.eye(4)).max() < tol)
    crit.finish()


def test_covariance_suite():
    crit = Criterion("Covariance suite", budget_s=10.0)
    tol = 1e-10
    rng = np.random.default_rng(42)
    gammas = [algebra.gamma(mu) for mu in range(1, 5)]
    beta = np.asarray(algebra.BETA)
    for _ in range(100):
        spec = random_boost(rng)
        S = algebra.spin_boost(spec)
        Sinv = np.linalg.inv(S)
        Lb = algebra.lorentz_boost_matrix(spec)
        crit.check("S+b=bS-1", np.abs(S.conj().T @ beta - beta @ Sinv).max() < tol)

        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        crit.check(
            "bar scalar",
            abs(algebra.bar_density(S @ psi) - algebra.bar_density(psi)) < tol * max(1, abs(algebra.bar_density(psi))),
        )
        J = algebra.current(psi, CONSTS)
        crit.check(
            "current four-vector",
            np.abs(algebra.current(S @ psi, CONSTS) - Lb @ J).max() < tol * max(1.0, np.abs(J).max()),
        )

        Lam = np.zeros((4, 4), dtype=complex)
        Lam[:3, :3] = Lb[:3, :3]
        Lam[:3, 3] = -1j * Lb[:3, 3]
        Lam[3, :3] = 1j * Lb[3, :3]
        Lam[3, 3] = Lb[3, 3]
        for mu in range(4):
            rhs = sum(Lam[eta, mu] * (Sinv @ gammas[eta] @ S) for eta in range(4))
            crit.check("gamma law", np.abs(rhs - gammas[mu]).max() < tol)

        M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        Mp = np.einsum("si,rj,ij->sr", S, S, M)
        crit.check(
            "two-density scalar",
            abs(tp.density_of_matrix(Mp) - tp.density_of_matrix(M)) < tol * max(1, abs(tp.density_of_matrix(M))),
        )
        J1, J2 = tp.currents_of_matrix(M, CONSTS)
        J1p, J2p = tp.currents_of_matrix(Mp, CONSTS)
        scale = max(np.abs(J1).max(), np.abs(J2).max(), 1.0)
        crit.check("two-currents four-vector", np.abs(J1p - Lb @ J1).max() < tol * scale)
        crit.check("two-currents four-vector", np.abs(J2p - Lb @ J2).max() < tol * scale)
    crit.finish()


def test_pde_suite():
    crit = Criterion("PDE suite", budget_s=120.0)
    # residual order over 3 refinements
    ns = [64, 128, 256]
    res = [
        fld.dirac_residual(
            fld.plane_wave(fld.PlaneWaveSpec(1.0), CONSTS, grid(n)), fld.ZeroPotential(), CONSTS
        )
        for n in ns
    ]
    order = -fit_order(ns, res)
    crit.check("residual order 2.0+-0.2", 1.8 <= order <= 2.2)

    # evolver accuracy and norm drift at 256x256 (>= 1000 internal steps)
    g = grid(256)
    exact = fld.plane_wave(fld.PlaneWaveSpec(1.0), CONSTS, g)
    ev = fld.evolve(exact.values[0], fld.ZeroPotential(), CONSTS, g)
    crit.check("evolver error < 1e-3", np.abs(ev.values - exact.values).max() < 1e-3)
    norms = ev.slice_norms()
    crit.check("norm drift < 1e-8", np.abs(norms / norms[0] - 1).max() < 1e-8)

    # constant-phi gauge phase
    g64 = grid(64)
    slice0 = two_wave(g64).values[0]
    phi0 = 0.37
    ev0 = fld.evolve(slice0, fld.ZeroPotential(), CONSTS, g64)
    ev1 = fld.evolve(slice0, fld.ConstantScalarPotential(phi0), CONSTS, g64)
    t = g64.t_nodes()
    phase = np.exp(-1j * CONSTS.charge * phi0 * (t - t[0]) / CONSTS.hbar)
    crit.check(
        "gauge phase 1e-8",
        np.abs(ev1.values - ev0.values * phase[:, None, None]).max() < 1e-8,
    )
    crit.finish()


def test_guidance_suite():
    crit = Criterion("Guidance suite", budget_s=60.0)
    cfg = gd.IntegratorConfig(d_sigma=0.01)

    p = 1.0
    f = fld.plane_wave(fld.PlaneWaveSpec(p), CONSTS, grid())
    tr = gd.integrate_sigma(f, np.zeros(4), cfg, CONSTS, 5.0)
    dz = tr.positions[-1, 2] - tr.positions[0, 2]
    dct = tr.positions[-1, 3] - tr.positions[0, 3]
    crit.check("slope pc/E 1e-8", abs(dz / dct - p * CONSTS.c / CONSTS.energy(p)) < 1e-8)

    momenta = [-1.5, -1.0, -0.5, 0.5, 1.0, 1.5]
    for seed in range(10):
        rng = np.random.default_rng(seed)
        ps = rng.choice(momenta, size=2, replace=False)
        parts = [fld.plane_wave(fld.PlaneWaveSpec(float(q)), CONSTS, grid()) for q in ps]
        w = rng.uniform(0.4, 1.0, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
        field = fld.superpose(parts, w)
        z0 = rng.uniform(-3, 3)
        tr_s = gd.integrate_sigma(field, np.array([0, 0, z0, 0.5]), cfg, CONSTS)
        tr_b = gd.integrate_bohm_dirac(field, z0, (0.5, 11.5), cfg, CONSTS)
        crit.check(f"path coincidence seed {seed}", path_deviation(tr_s, tr_b) < 1e-6)

    # weights of comparable size put a deep density dip on the path, giving
    # truncation errors far above roundoff so the order is measurable
    field = fld.superpose(
        [fld.plane_wave(fld.PlaneWaveSpec(1.5), CONSTS, grid()),
         fld.plane_wave(fld.PlaneWaveSpec(-1.0), CONSTS, grid())],
        [0.8, 0.7],
    )
    vel = gd._SigmaVelocity(field, CONSTS, 1e-10)
    start = np.array([[0.0, 0.0, 1.0, 0.2]])

    def final(h):
        X = start.copy()
        for _ in range(int(round(4.0 / h))):
            X = gd._rk4(vel, X, h)
        return X[0]

    ref = final(0.000625)
    hs = [0.04, 0.02, 0.01]
    errs = [np.abs(final(h) - ref).max() for h in hs]
    rk4_order = fit_order(hs, errs)
    crit.check("RK4 order 4+-0.3", 3.7 <= rk4_order <= 4.3)
    crit.finish()


def test_equivariance_suite():
    crit = Criterion("Equivariance suite", budget_s=180.0)
    cfg = gd.IntegratorConfig(d_sigma=0.05)
    f = two_wave()
    w = eq.make_window(f)
    rep = eq.equivariance_test_sigma(f, w, 100_000, 1.0, cfg, CONSTS, seed=7, bins=64)
    crit.check("sigma-flow L1 < 1.5x baseline", rep.passed)
    crit.check("exclusion fraction reported", 0.0 <= rep.exclusion_fraction < 1.0)

    rep_sp = eq.equivariance_test_spatial(
        f, 1.0, 9.0, 100_000, gd.IntegratorConfig(d_sigma=0.1), CONSTS, seed=7
    )
    crit.check("spatial K-S at 99%", rep_sp.passed)

    ns = [64, 128, 256]
    res = [eq.continuity_residual(two_wave(grid(n)), CONSTS) for n in ns]
    order = -fit_order(ns, res)
    crit.check("continuity order 2.0+-0.2", 1.8 <= order <= 2.2)
    crit.finish()


def test_frame_independence():
    crit = Criterion("Frame-independence", budget_s=60.0)
    P, Pp = eq.region_probability_covariance(
        two_wave(), (-2.0, 3.0, 2.0, 9.0), algebra.BoostSpec(1.0), 10**6, CONSTS
    )
    crit.check("|P - P'| < 1e-4", abs(P - Pp) < 1e-4)
    crit.finish()


def test_classical_limit_suite():
    crit = Criterion("Classical-limit suite", budget_s=300.0)
    g = fld.GridSpec(-5, 5, 0, 10, 64, 64)
    r = cl.hamilton_jacobi_residual(cl.free_action(0.8, CONSTS), fld.ZeroPotential(), CONSTS, g)
    crit.check("free HJ residual < 1e-12", np.abs(r).max() < 1e-12)

    rng = np.random.default_rng(1)
    for _ in range(20):
        u = rng.normal(size=3)
        U = np.array([u[0], u[1], u[2], np.sqrt(CONSTS.c**2 + u @ u)])
        psi = cl.classical_spinor(U, 0.7 + 0.2j, -0.3 + 0.5j, CONSTS)
        U_ict = np.array([U[0], U[1], U[2], 1j * U[3]])
        M = sum(algebra.gamma(mu + 1) * U_ict[mu] for mu in range(4))
        crit.check("linear system 1e-12", np.abs((M + CONSTS.c * np.eye(4)) @ psi).max() < 1e-12)
        R2 = abs(0.7 + 0.2j) ** 2 + abs(-0.3 + 0.5j) ** 2
        density_identity = R2 * 2 * CONSTS.c / (U[3] + CONSTS.c)
        crit.check(
            "density identity 1e-10",
            abs(algebra.bar_density(psi) - density_identity) < 1e-10,
        )
        crit.check(
            "velocity identity 1e-10",
            np.abs(algebra.nikolic_velocity(psi, CONSTS) - U).max() < 1e-10,
        )

    fam = cl.WKBFamily(
        action=cl.free_action(0.8, CONSTS),
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
    )
    g_pot = fld.GridSpec(-6, 6, 0, 4, 64, 64)
    pot = fld.linear_potential(g_pot, CONSTS, a3_z=0.3, a3_ct=0.2)
    probes = np.array([[-2.0, 1.0], [0.5, 2.0], [3.0, 1.5], [1.0, 3.0]])
    rep = cl.squared_term_limits(fam, pot, CONSTS, probes)
    crit.check("term (ii) order 1.0+-0.3", abs(rep["orders"]["ii"] - 1.0) <= 0.3)
    crit.check("term (v) order 1.0+-0.3", abs(rep["orders"]["v"] - 1.0) <= 0.3)

    correction = (
        lambda z, ct: 0.25 + 0.1j + 0.0 * z,
        lambda z, ct: 0.15j * np.cos(0.3 * z),
        lambda z, ct: 0.1 - 0.2j + 0.0 * z,
        lambda z, ct: 0.2j * np.sin(0.2 * ct),
    )
    fam2 = cl.classical_family(
        cl.free_action(0.8, CONSTS), fld.ZeroPotential(), CONSTS,
        psi1=1.0, psi2=0.4, correction=correction,
    )
    study = cl.hbar_convergence_study(
        fam2, fld.ZeroPotential(), CONSTS, np.array([0, 0, 0.5, 0.2]),
        fld.GridSpec(-8, 8, 0, 6, 64, 64), gd.IntegratorConfig(d_sigma=0.01), sigma_end=3.0,
    )
    crit.check("trajectory distance monotone", bool(study["distance_monotone"]))
    crit.check("defect monotone", bool(study["defect_monotone"]))
    crit.check("final defect < 10% of initial", study["defect_final_over_initial"] < 0.10)

    e0 = -1.0
    potE = fld.ConstantElectricField(e0)
    rest = cl.ClassicalState(np.zeros(4), np.array([0, 0, 0, CONSTS.c]))
    states = cl.lorentz_force_oracle(potE, CONSTS, rest, (0, 2.0), 0.001)
    k = CONSTS.charge * e0 / (CONSTS.mass * CONSTS.c)
    taus = np.linspace(0, 2.0, len(states))
    z_exact = (CONSTS.c / k) * (np.cosh(k * taus) - 1)
    zs = np.array([s.position[2] for s in states])
    crit.check("hyperbolic motion 1e-6", np.abs(zs - z_exact).max() < 1e-6)

    rest2 = cl.ClassicalState(np.zeros(4), np.array([0, 0, 0, CONSTS.c]), "case_ii")
    states2 = cl.lorentz_force_oracle(potE, CONSTS, rest2, (0, 2.0), 0.001)
    zs2 = np.array([s.position[2] for s in states2])
    crit.check("case_ii sign-flipped force", np.abs(zs2 + zs).max() < 1e-10)
    crit.finish()


def test_two_particle_suite():
    crit = Criterion("Two-particle suite", budget_s=120.0)
    cfg = gd.IntegratorConfig(d_sigma=0.02)
    g = grid(64)
    f1 = fld.plane_wave(fld.PlaneWaveSpec(0.8), CONSTS, g)
    f2 = fld.plane_wave(fld.PlaneWaveSpec(-0.5), CONSTS, g)

    pf = tp.product_field(f1, f2)
    start = tp.TwoParticleConfiguration(
        np.array([0, 0, 0.5, 0.1]), np.array([0, 0, -1.0, 0.2])
    )
    tr1, tr2 = tp.integrate_pair(pf, start, cfg, CONSTS, 3.0)
    s1 = gd.integrate_sigma(f1, start.pos1, cfg, CONSTS, 3.0)
    s2 = gd.integrate_sigma(f2, start.pos2, cfg, CONSTS, 3.0)
    m = min(len(tr1), len(s1))
    dev = max(
        np.abs(tr1.positions[:m] - s1.positions[:m]).max(),
        np.abs(tr2.positions[:m] - s2.positions[:m]).max(),
    )
    crit.check("separable matches single 1e-8", dev < 1e-8)

    af = tp.antisymmetrized_field(f1, f2)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        a = np.array([0, 0, rng.uniform(-5, 5), rng.uniform(0.5, 12)])
        b = np.array([0, 0, rng.uniform(-5, 5), rng.uniform(0.5, 12)])
        worst = max(worst, np.abs(tp.evaluate(af, b, a) + tp.evaluate(af, a, b).T).max())
    crit.check("exchange antisymmetry 1e-10", worst < 1e-10)

    sup1 = fld.superpose([f1, f2], [0.8, 0.6])
    sup2 = fld.superpose(
        [fld.plane_wave(fld.PlaneWaveSpec(0.5), CONSTS, g),
         fld.plane_wave(fld.PlaneWaveSpec(-1.0), CONSTS, g)],
        [0.5, -0.7],
    )
    pf_sup = tp.product_field(sup1, sup2)
    hs = [4e-2, 2e-2, 1e-2]
    r1s, r2s, r8s = [], [], []
    ent = tp.TwoParticleField(((0.8 + 0j, f1, f2), (0.6 + 0j, f2, f1)))
    for h in hs:
        r1, r2 = tp.two_continuity_residual(pf_sup, CONSTS, h=h)
        r1s.append(r1)
        r2s.append(r2)
        r8s.append(tp.conservation_8d_residual(ent, CONSTS, h=h))
    crit.check("continuity-1 order 2.0+-0.2", 1.8 <= fit_order(hs, r1s) <= 2.2)
    crit.check("continuity-2 order 2.0+-0.2", 1.8 <= fit_order(hs, r2s) <= 2.2)
    crit.check("8D conservation order 2.0+-0.2", 1.8 <= fit_order(hs, r8s) <= 2.2)

    def variation(ff):
        vs = []
        for z2 in np.linspace(-3, 3, 7):
            X2 = np.array([0, 0, z2, 0.3])
            vs.append(tp.pair_velocity(ff, start.pos1, X2, cfg, CONSTS)[:4])
        return np.max(np.ptp(np.asarray(vs), axis=0))

    tol = cfg.error_tolerance
    crit.check("entangled witness > 10x tol", variation(ent) > 10 * tol)
    crit.check("separable witness < tol", variation(pf) < tol)
    crit.finish()


def test_determinism(tmp_path):
    crit = Criterion("Determinism", budget_s=120.0)
    for name in ("rest_plane_wave_trajectory.yaml", "covariance_identities.yaml",
                 "plane_wave_residual.yaml"):
        cfg = CONFIGS / name
        d1 = tmp_path / (name + "-a")
        d2 = tmp_path / (name + "-b")
        rc1 = cli.main(["run", str(cfg), "--output-dir", str(d1)])
        rc2 = cli.main(["run", str(cfg), "--output-dir", str(d2)])
        crit.check(f"{name} exits", rc1 == rc2 == 0)
        for p1 in sorted(d1.iterdir()):
            p2 = d2 / p1.name
            if p1.name == "manifest.json":
                m1 = json.loads(p1.read_text())
                m2 = json.loads(p2.read_text())
                for volatile in ("timestamp", "wall_time_s"):
                    m1.pop(volatile)
                    m2.pop(volatile)
                crit.check(f"{name}/{p1.name}", m1 == m2)
            else:
                crit.check(f"{name}/{p1.name}", p1.read_bytes() == p2.read_bytes())
    crit.finish()
