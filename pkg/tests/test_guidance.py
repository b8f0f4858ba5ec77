import numpy as np
import pytest

from diracpilot import algebra, field as fld, guidance as gd
from diracpilot.classical import fit_order
from diracpilot.constants import PhysicalConstants
from diracpilot.scenarios import path_deviation

CONSTS = PhysicalConstants()
L = 4 * np.pi


def grid(n=128):
    return fld.GridSpec(-L / 2, L / 2, 0.0, L, n, n)


def superposition(seed, g=None, n_waves=2):
    """Window-periodic two-wave superposition with a seeded composition."""
    rng = np.random.default_rng(seed)
    g = g or grid()
    momenta = rng.choice([-1.5, -1.0, -0.5, 0.5, 1.0, 1.5], size=n_waves, replace=False)
    fields = [fld.plane_wave(fld.PlaneWaveSpec(float(p)), CONSTS, g) for p in momenta]
    weights = rng.uniform(0.4, 1.0, n_waves) * np.exp(1j * rng.uniform(0, 2 * np.pi, n_waves))
    return fld.superpose(fields, weights)


CFG = gd.IntegratorConfig(d_sigma=0.01)


class TestIntegratorConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            gd.IntegratorConfig(d_sigma=0.0)
        with pytest.raises(ValueError):
            gd.IntegratorConfig(node_epsilon=0.1)


class TestSigmaLaw:
    def test_rest_wave_static(self):
        f = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, grid())
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.0, 0.0]), CFG, CONSTS, 5.0)
        assert tr.termination == "completed"
        assert np.abs(tr.positions[:, :3]).max() == 0.0
        # T = sigma for the rest wave
        assert np.abs(tr.positions[:, 3] - CONSTS.c * tr.sigmas).max() < 1e-12

    def test_plane_wave_slope(self):
        p = 1.0
        f = fld.plane_wave(fld.PlaneWaveSpec(p), CONSTS, grid())
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.0, 0.0]), CFG, CONSTS, 5.0)
        dz = tr.positions[-1, 2] - tr.positions[0, 2]
        dct = tr.positions[-1, 3] - tr.positions[0, 3]
        assert abs(dz / dct - p * CONSTS.c / CONSTS.energy(p)) < 1e-8

    def test_step_halving_richardson(self):
        f = superposition(3)
        start = np.array([0.0, 0.0, 0.3, 0.1])
        tr1 = gd.integrate_sigma(f, start, gd.IntegratorConfig(d_sigma=0.02), CONSTS, 2.0)
        tr2 = gd.integrate_sigma(f, start, gd.IntegratorConfig(d_sigma=0.01), CONSTS, 2.0)
        assert np.abs(tr1.final_position - tr2.final_position).max() < CFG.error_tolerance

    def test_start_on_node_raises(self):
        g = grid()
        fp = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, g)
        fn = fld.plane_wave(fld.PlaneWaveSpec(0.0, energy_sign="negative"), CONSTS, g)
        f = fld.superpose([fp, fn], [1.0, 1.0])
        # equal-weight positive/negative rest waves: bar density vanishes
        # where the relative phase is +-pi/2
        z0 = 0.0
        ct0 = np.pi / 2  # phase difference 2 m c^2 t / hbar = pi
        with pytest.raises(algebra.NodeError):
            gd.integrate_sigma(f, np.array([0, 0, z0, ct0 / 2]), CFG, CONSTS, 1.0)

    def test_start_outside_window(self):
        f = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, grid())
        with pytest.raises(ValueError):
            gd.integrate_sigma(f, np.array([0, 0, 0, -1.0]), CFG, CONSTS, 1.0)

    def test_window_exit_tag(self):
        f = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, grid())
        start = np.array([0.0, 0.0, 0.0, CONSTS.c * (f.grid.t_max - 0.5)])
        tr = gd.integrate_sigma(f, start, CFG, CONSTS, 5.0)
        assert tr.termination == "window_exit"
        assert abs(tr.positions[-1, 3] - f.ct_max) < 1e-9

    def test_max_steps_tag(self):
        f = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, grid())
        cfg = gd.IntegratorConfig(d_sigma=0.01, max_steps=10)
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.0, 0.0]), cfg, CONSTS, 5.0)
        assert tr.termination == "max_steps"
        assert len(tr) == 11

    def test_node_stop_does_not_cross_sign(self):
        f = superposition(1)
        start = np.array([0.0, 0.0, 1.3, 0.5])
        tr = gd.integrate_sigma(f, start, CFG, CONSTS)
        if tr.termination == "node_hit":
            signs = np.sign(f.bar_density_at(tr.positions[:, 2], tr.positions[:, 3]))
            assert len(set(signs.tolist())) == 1

    def test_temporal_monotonicity(self):
        for seed in range(5):
            f = superposition(seed)
            tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.2, 0.3]), CFG, CONSTS, 3.0)
            assert np.all(np.diff(tr.positions[:, 3]) > 0)

    def test_global_phase_invariance(self):
        f = superposition(2)
        fp = f.with_global_phase(1.234)
        tr1 = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.5, 0.2]), CFG, CONSTS, 2.0)
        tr2 = gd.integrate_sigma(fp, np.array([0.0, 0.0, 0.5, 0.2]), CFG, CONSTS, 2.0)
        assert tr1.termination == tr2.termination
        assert np.abs(tr1.positions - tr2.positions).max() < 1e-12


class TestBohmDirac:
    def test_rest_wave_static(self):
        f = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, grid())
        tr = gd.integrate_bohm_dirac(f, 0.4, (0.0, 5.0), CFG, CONSTS)
        assert np.abs(tr.positions[:, 2] - 0.4).max() < 1e-14

    def test_plane_wave_velocity(self):
        p = 1.0
        f = fld.plane_wave(fld.PlaneWaveSpec(p), CONSTS, grid())
        tr = gd.integrate_bohm_dirac(f, 0.0, (0.0, 8.0), CFG, CONSTS)
        v = (tr.positions[-1, 2] - tr.positions[0, 2]) / 8.0
        assert abs(v - p * CONSTS.c**2 / CONSTS.energy(p)) < 1e-8

    def test_reparameterization_equivalence_10_random(self):
        cfg = gd.IntegratorConfig(d_sigma=0.01)
        for seed in range(10):
            f = superposition(seed)
            rng = np.random.default_rng(100 + seed)
            z0 = rng.uniform(-3, 3)
            tr_s = gd.integrate_sigma(f, np.array([0, 0, z0, 0.5]), cfg, CONSTS)
            tr_b = gd.integrate_bohm_dirac(f, z0, (0.5, 11.5), cfg, CONSTS)
            assert path_deviation(tr_s, tr_b) < 1e-6

    def test_backward_in_lab_time(self):
        f = superposition(4)
        fwd = gd.integrate_bohm_dirac(f, 0.7, (1.0, 9.0), CFG, CONSTS)
        back = gd.integrate_bohm_dirac(
            f, float(fwd.positions[-1, 2]), (9.0, 1.0), CFG, CONSTS
        )
        assert abs(back.positions[-1, 2] - 0.7) < 1e-7


class TestRK4Order:
    def test_order_fit(self):
        # near-equal weights give a velocity field varying strongly enough
        # along the path that truncation dominates roundoff
        g = grid()
        f = fld.superpose(
            [fld.plane_wave(fld.PlaneWaveSpec(1.5), CONSTS, g),
             fld.plane_wave(fld.PlaneWaveSpec(-1.0), CONSTS, g)],
            [0.8, 0.7],
        )
        start = np.array([0.0, 0.0, 1.0, 0.2])
        vel = gd._SigmaVelocity(f, CONSTS, 1e-10)
        sigma_end = 4.0

        def final_z(h):
            X = start[None, :].copy()
            for _ in range(int(round(sigma_end / h))):
                X = gd._rk4(vel, X, h)
            return X[0]

        ref = final_z(0.000625)
        hs = [0.04, 0.02, 0.01]
        errs = [np.abs(final_z(h) - ref).max() for h in hs]
        order = fit_order(hs, errs)
        assert 3.7 <= order <= 4.3


class TestProperTimeDefect:
    def test_rest_wave_zero(self):
        f = fld.plane_wave(fld.PlaneWaveSpec(0.0), CONSTS, grid())
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.0, 0.0]), CFG, CONSTS, 3.0)
        d = gd.proper_time_defect(tr, CONSTS, f)
        assert np.abs(d).max() < 1e-12

    def test_plane_wave_matches_closed_form(self):
        # V = (0, 0, p/m, E/mc) for a plane wave: the defect closed form
        # p^2/m^2 - E^2/(mc)^2 + c^2 evaluates to exactly zero on shell
        p = 0.9
        E = CONSTS.energy(p)
        closed = (p / CONSTS.mass) ** 2 - (E / (CONSTS.mass * CONSTS.c)) ** 2 + CONSTS.c**2
        f = fld.plane_wave(fld.PlaneWaveSpec(p), CONSTS, grid())
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.0, 0.0]), CFG, CONSTS, 3.0)
        d = gd.proper_time_defect(tr, CONSTS, f)
        assert np.abs(d - closed).max() < 1e-12

    def test_finite_difference_fallback(self):
        f = superposition(5)
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.2, 0.3]), CFG, CONSTS, 2.0)
        d_field = gd.proper_time_defect(tr, CONSTS, f)
        d_fd = gd.proper_time_defect(tr, CONSTS)
        # finite differences agree with the field evaluation at O(h^2)
        inner = slice(1, len(tr) - 1)
        assert np.abs(d_fd - d_field[inner]).max() < 1e-2

    def test_needs_three_samples(self):
        with pytest.raises(ValueError):
            gd.proper_time_defect(
                gd.Trajectory(np.array([0.0, 1.0]), np.zeros((2, 4)), "completed"),
                CONSTS,
            )


class TestTrajectoryCSV:
    def test_format(self, tmp_path):
        f = fld.plane_wave(fld.PlaneWaveSpec(1.0), CONSTS, grid())
        tr = gd.integrate_sigma(f, np.array([0.0, 0.0, 0.0, 0.0]), CFG, CONSTS, 0.1)
        path = tmp_path / "traj.csv"
        gd.trajectory_csv(tr, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "sigma,x,y,z,ct,termination"
        assert lines[-1].endswith(",completed")
        assert all(line.endswith(",") for line in lines[1:-1])
        data = np.loadtxt(
            path, delimiter=",", skiprows=1, usecols=(0, 1, 2, 3, 4)
        )
        assert np.allclose(data[:, 0], tr.sigmas)
