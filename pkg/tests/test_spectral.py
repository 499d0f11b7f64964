import numpy as np
import pytest

from memwave import (
    DimensionMismatch,
    ProductState,
    SpectralModel,
    Trajectory,
    fractional_apply,
    norm_beta,
    product_norm,
)


@pytest.fixture
def model149():
    return SpectralModel(eigenvalues=[1.0, 4.0, 9.0], gamma=0.5, alpha=0.5)


class TestSpectralModel:
    def test_mode_expansion(self):
        m = SpectralModel(eigenvalues=[1.0, 4.0], multiplicities=[1, 3], gamma=1.0)
        assert m.mode_count == 4
        assert m.n_distinct == 2
        np.testing.assert_array_equal(m.mode_eigenvalues, [1.0, 4.0, 4.0, 4.0])
        assert m.slot_labels == ((1, 1), (2, 1), (2, 2), (2, 3))

    def test_validation(self):
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[2.0, 1.0], gamma=1.0)
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[-1.0, 1.0], gamma=1.0)
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[1.0], gamma=0.0)
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[1.0], gamma=1.0, alpha=1.0)
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[1.0], gamma=1.0, beta=0.0)
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[1.0, 2.0], multiplicities=[1], gamma=1.0)
        with pytest.raises(ValueError):
            SpectralModel(eigenvalues=[1.0], multiplicities=[0], gamma=1.0)

    def test_zero_eigenvalue_constructible(self):
        # needed so the stability certifier can exhibit a refusal witness
        m = SpectralModel(eigenvalues=[0.0, 1.0], gamma=1.0)
        assert m.mode_count == 2

    def test_arrays_frozen(self, model149):
        with pytest.raises(ValueError):
            model149.eigenvalues[0] = 5.0


class TestFractionalApply:
    def test_identity_exponent(self, model149):
        u = np.array([1.0 + 2.0j, -0.5, 3.0])
        out = fractional_apply(model149, 0.0, u)
        np.testing.assert_array_equal(out, u)

    def test_square_root_powers(self, model149):
        out = fractional_apply(model149, 0.5, [1.0, 1.0, 1.0])
        np.testing.assert_allclose(out, [1.0, 2.0, 3.0], rtol=0, atol=0)

    def test_single_mode_full_power(self):
        m = SpectralModel(eigenvalues=[2.0], gamma=1.0)
        np.testing.assert_array_equal(fractional_apply(m, 1.0, [3.0]), [6.0])

    def test_dimension_error(self, model149):
        with pytest.raises(DimensionMismatch):
            fractional_apply(model149, 0.5, [1.0, 2.0])

    def test_negative_exponent_rejected(self, model149):
        with pytest.raises(ValueError):
            fractional_apply(model149, -0.5, [1.0, 2.0, 3.0])

    def test_semigroup_law_of_powers(self, model149):
        rng = np.random.default_rng(42)
        for _ in range(20):
            a, b = rng.uniform(0.0, 2.0, size=2)
            u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            left = fractional_apply(model149, a, fractional_apply(model149, b, u))
            right = fractional_apply(model149, a + b, u)
            np.testing.assert_allclose(left, right, rtol=1e-13)


class TestNormBeta:
    def test_zero_vector(self, model149):
        assert norm_beta(model149, np.zeros(3), 0.5) == 0.0

    def test_single_mode_closed_form(self):
        m = SpectralModel(eigenvalues=[4.0], gamma=1.0)
        assert norm_beta(m, [1.0], 0.5) == 2.0

    def test_euclidean_at_zero_exponent(self):
        m = SpectralModel(eigenvalues=[1.0, 4.0], gamma=1.0)
        assert norm_beta(m, [3.0, 4.0], 0.0) == 5.0

    def test_homogeneity_and_triangle(self, model149):
        rng = np.random.default_rng(7)
        for _ in range(50):
            u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            c = rng.standard_normal()
            nu = norm_beta(model149, u, 0.5)
            assert norm_beta(model149, c * u, 0.5) == pytest.approx(abs(c) * nu, rel=1e-12)
            assert norm_beta(model149, u + v, 0.5) <= (
                nu + norm_beta(model149, v, 0.5)
            ) * (1.0 + 1e-12)

    def test_dimension_error(self, model149):
        with pytest.raises(DimensionMismatch):
            norm_beta(model149, [1.0], 0.5)


class TestProductNorm:
    def test_zero_state(self, model149):
        assert product_norm(model149, ProductState.zero(model149)) == 0.0

    def test_single_mode(self):
        m = SpectralModel(eigenvalues=[4.0], gamma=1.0)
        assert product_norm(m, ProductState([1.0], [0.0])) == 2.0

    def test_pythagorean(self):
        m = SpectralModel(eigenvalues=[1.0], gamma=1.0)
        assert product_norm(m, ProductState([3.0], [4.0])) == 5.0

    def test_splits_into_components(self, model149):
        rng = np.random.default_rng(3)
        for _ in range(50):
            s = ProductState(rng.standard_normal(3), rng.standard_normal(3))
            expected = np.sqrt(
                norm_beta(model149, s.position, 0.5) ** 2
                + norm_beta(model149, s.velocity, 0.0) ** 2
            )
            assert product_norm(model149, s) == pytest.approx(expected, rel=1e-12)

    def test_dimension_error(self, model149):
        with pytest.raises(DimensionMismatch):
            product_norm(model149, ProductState([1.0], [1.0]))


class TestProductState:
    def test_arithmetic(self):
        a = ProductState([1.0, 2.0], [0.0, 1.0])
        b = ProductState([0.5, 0.0], [1.0, -1.0])
        s = a + 2.0 * b
        np.testing.assert_allclose(s.position, [2.0, 2.0])
        np.testing.assert_allclose(s.velocity, [2.0, -1.0])
        d = a - b
        np.testing.assert_allclose(d.position, [0.5, 2.0])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ProductState([1.0, 2.0], [1.0])

    def test_imag_residue(self):
        real = ProductState([1.0], [2.0])
        assert real.is_real and real.imag_residue() == 0.0
        cplx = ProductState([1.0 + 1e-15j], [2.0 + 0j])
        assert not cplx.is_real
        assert cplx.imag_residue() == pytest.approx(1e-15)


class TestTrajectory:
    def test_grid_and_indexing(self, model149):
        traj = Trajectory.zeros(model149, t0=-1.0, dt=0.5, n_nodes=5)
        np.testing.assert_allclose(traj.times, [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert traj.node_index(0.5) == 3
        assert traj.t_end == 1.0
        assert traj.window == (-1.0, 1.0)
        with pytest.raises(Exception):
            traj.node_index(0.3)
        with pytest.raises(Exception):
            traj.node_index(2.0)

    def test_norms_and_restriction(self, model149):
        rng = np.random.default_rng(0)
        pos = rng.standard_normal((6, 3))
        vel = rng.standard_normal((6, 3))
        traj = Trajectory(0.0, 0.25, pos, vel)
        norms = traj.norms(model149)
        assert norms.shape == (6,)
        assert traj.sup_norm(model149) == pytest.approx(np.max(norms))
        manual = product_norm(model149, traj.state(2))
        assert norms[2] == pytest.approx(manual, rel=1e-14)
        sub = traj.restricted(0.25, 1.0)
        assert sub.n_nodes == 4
        assert sub.t0 == 0.25
        np.testing.assert_array_equal(sub.position, pos[1:5])

    def test_states_share_grid(self, model149):
        traj = Trajectory.zeros(model149, 0.0, 0.1, 4)
        assert len(traj.states) == 4
