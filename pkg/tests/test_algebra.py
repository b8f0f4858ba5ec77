import numpy as np
import pytest

from diracpilot import algebra
from diracpilot.constants import PhysicalConstants

CONSTS = PhysicalConstants()


def random_spinors(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))


def random_boost(rng, max_rapidity=2.0):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return algebra.BoostSpec(rng.uniform(-max_rapidity, max_rapidity), tuple(axis))


class TestGamma:
    def test_gamma3_rows(self):
        expected = np.array(
            [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]], dtype=complex
        )
        assert np.array_equal(algebra.gamma(3), expected)

    def test_gamma4_is_i_beta(self):
        assert np.array_equal(algebra.gamma(4), 1j * np.diag([1, 1, -1, -1]))

    def test_clifford_relation(self):
        # independent oracle: explicit matrix products over all 16 pairs
        for mu in range(1, 5):
            for nu in range(1, 5):
                g1, g2 = algebra.gamma(mu), algebra.gamma(nu)
                anti = g1 @ g2 + g2 @ g1
                target = -2.0 * (mu == nu) * np.eye(4)
                assert np.abs(anti - target).max() < 1e-14

    def test_index_range(self):
        with pytest.raises(IndexError):
            algebra.gamma(0)
        with pytest.raises(IndexError):
            algebra.gamma(5)

    def test_returns_copy(self):
        g = algebra.gamma(1)
        g[0, 0] = 99
        assert algebra.gamma(1)[0, 0] == 0


class TestAlpha:
    def test_alpha1_from_beta_gamma_product(self):
        expected = np.asarray(algebra.BETA) @ algebra.gamma(1)
        assert np.array_equal(algebra.alpha(1), expected)
        rows = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
        assert np.array_equal(algebra.alpha(1).real, rows)

    def test_hermitian_and_involutive(self):
        for i in range(1, 4):
            a = algebra.alpha(i)
            assert np.abs(a - a.conj().T).max() < 1e-14
            assert np.abs(a @ a - np.eye(4)).max() < 1e-14

    def test_index_range(self):
        with pytest.raises(IndexError):
            algebra.alpha(4)


class TestBarDensity:
    def test_signature(self):
        assert algebra.bar_density(np.array([1, 0, 0, 0], complex)) == 1.0
        assert algebra.bar_density(np.array([0, 0, 1, 0], complex)) == -1.0
        s = 1 / np.sqrt(2)
        assert abs(algebra.bar_density(np.array([s, 0, s, 0], complex))) < 1e-15

    def test_always_real_and_phase_invariant(self):
        for psi in random_spinors(50, seed=1):
            rho = algebra.bar_density(psi)
            assert isinstance(rho, float) or np.isrealobj(rho)
            rho2 = algebra.bar_density(np.exp(0.7j) * psi)
            assert abs(rho - rho2) < 1e-13


class TestCurrent:
    def test_rest_spinor(self):
        J = algebra.current(np.array([1, 0, 0, 0], complex), CONSTS)
        assert np.allclose(J, [0, 0, 0, 1], atol=1e-15)

    def test_mixed_spinor_value(self):
        # oracle: direct evaluation of psi^+ alpha_i psi with explicit matrices
        s = 1 / np.sqrt(2)
        psi = np.array([s, 0, s, 0], complex)
        expected = [
            (psi.conj() @ (np.asarray(algebra.BETA) @ algebra.gamma(i)) @ psi).real
            for i in range(1, 4)
        ] + [(psi.conj() @ psi).real]
        J = algebra.current(psi, CONSTS)
        assert np.allclose(J, expected, atol=1e-15)
        assert np.allclose(J, [0, 0, 1, 1], atol=1e-15)

    def test_causal_for_random_spinors(self):
        for psi in random_spinors(200, seed=2):
            J = algebra.current(psi, CONSTS)
            assert algebra.minkowski(J, J) <= 1e-12 * np.dot(J, J)

    def test_batched_matches_scalar(self):
        batch = random_spinors(10, seed=3)
        J = algebra.current(batch, CONSTS)
        for k in range(10):
            assert np.allclose(J[k], algebra.current(batch[k], CONSTS))


class TestNikolicVelocity:
    def test_rest_spinor(self):
        V = algebra.nikolic_velocity(np.array([1, 0, 0, 0], complex), CONSTS)
        assert np.allclose(V, [0, 0, 0, 1], atol=1e-15)

    def test_node_raises(self):
        s = 1 / np.sqrt(2)
        with pytest.raises(algebra.NodeError):
            algebra.nikolic_velocity(np.array([s, 0, s, 0], complex), CONSTS)

    def test_plane_wave_ratio(self):
        from diracpilot.field import PlaneWaveSpec, plane_wave_spinor

        p = 0.7
        u, E = plane_wave_spinor(PlaneWaveSpec(p), CONSTS)
        V = algebra.nikolic_velocity(u, CONSTS)
        assert abs(V[2] / V[3] - p * CONSTS.c / E) < 1e-14

    def test_temporal_component_positive(self):
        for psi in random_spinors(100, seed=4):
            if abs(algebra.bar_density(psi)) < 1e-6:
                continue
            assert algebra.nikolic_velocity(psi, CONSTS)[3] > 0

    def test_phase_invariance(self):
        for psi in random_spinors(20, seed=5):
            if abs(algebra.bar_density(psi)) < 1e-6:
                continue
            v1 = algebra.nikolic_velocity(psi, CONSTS)
            v2 = algebra.nikolic_velocity(np.exp(1.3j) * psi, CONSTS)
            assert np.abs(v1 - v2).max() < 1e-12 * max(1.0, np.abs(v1).max())


class TestBoosts:
    def test_axis_validation(self):
        with pytest.raises(ValueError):
            algebra.BoostSpec(1.0, (1.0, 1.0, 0.0))

    def test_zero_rapidity(self):
        spec = algebra.BoostSpec(0.0)
        assert np.allclose(algebra.spin_boost(spec), np.eye(4))
        assert np.allclose(algebra.lorentz_boost_matrix(spec), np.eye(4))

    def test_s_beta_identity_z_axis(self):
        spec = algebra.BoostSpec(1.0)
        S = algebra.spin_boost(spec)
        lhs = S.conj().T @ algebra.BETA
        rhs = np.asarray(algebra.BETA) @ np.linalg.inv(S)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_bar_density_scalar_under_boost(self):
        S = algebra.spin_boost(algebra.BoostSpec(1.0))
        for psi in random_spinors(100, seed=6):
            d1 = abs(algebra.bar_density(psi))
            d2 = abs(algebra.bar_density(S @ psi))
            assert abs(d1 - d2) < 1e-10 * max(1.0, d1)

    def test_boost_of_rest_four_velocity(self):
        L = algebra.lorentz_boost_matrix(algebra.BoostSpec(0.8))
        out = L @ np.array([0.0, 0.0, 0.0, 1.0])
        assert np.allclose(out, [0, 0, -np.sinh(0.8), np.cosh(0.8)], atol=1e-14)

    def test_minkowski_preserved_and_unimodular(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            spec = random_boost(rng)
            L = algebra.lorentz_boost_matrix(spec)
            assert abs(np.linalg.det(L) - 1) < 1e-12
            for _ in range(4):
                a = rng.normal(size=4)
                b = rng.normal(size=4)
                assert abs(
                    algebra.minkowski(L @ a, L @ b) - algebra.minkowski(a, b)
                ) < 1e-12 * max(1.0, abs(algebra.minkowski(a, b)))

    def test_inverse_composition(self):
        L1 = algebra.lorentz_boost_matrix(algebra.BoostSpec(1.3))
        L2 = algebra.lorentz_boost_matrix(algebra.BoostSpec(-1.3))
        assert np.abs(L1 @ L2 - np.eye(4)).max() < 1e-12

    def test_gamma_transformation_law(self):
        # the sign convention is *defined* by this law holding numerically
        rng = np.random.default_rng(8)
        gammas = [algebra.gamma(mu) for mu in range(1, 5)]
        for _ in range(20):
            spec = random_boost(rng)
            S = algebra.spin_boost(spec)
            Sinv = np.linalg.inv(S)
            L = algebra.lorentz_boost_matrix(spec)
            Lam = np.zeros((4, 4), dtype=complex)
            Lam[:3, :3] = L[:3, :3]
            Lam[:3, 3] = -1j * L[:3, 3]
            Lam[3, :3] = 1j * L[3, :3]
            Lam[3, 3] = L[3, 3]
            for mu in range(4):
                rhs = sum(Lam[eta, mu] * (Sinv @ gammas[eta] @ S) for eta in range(4))
                assert np.abs(rhs - gammas[mu]).max() < 1e-10

    def test_current_four_vector_law(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            spec = random_boost(rng)
            S = algebra.spin_boost(spec)
            L = algebra.lorentz_boost_matrix(spec)
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            J = algebra.current(psi, CONSTS)
            Jp = algebra.current(S @ psi, CONSTS)
            assert np.abs(Jp - L @ J).max() < 1e-10 * max(1.0, np.abs(J).max())
