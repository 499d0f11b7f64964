import numpy as np
import pytest
from scipy.integrate import solve_ivp

from memwave import (
    InstabilityError,
    ProductState,
    SpectralModel,
    apply_generator,
    block_semigroup,
    check_AS1,
    decay_envelope,
    estimate_sector,
    product_norm,
    scalar_semigroup,
    smoothing_constants,
    smoothing_from_m,
)

from oracles import expm_block, rk4_forced_oscillator


@pytest.fixture
def model4():
    return SpectralModel(eigenvalues=[4.0], gamma=0.5, alpha=0.5)


@pytest.fixture
def model149():
    return SpectralModel(eigenvalues=[1.0, 4.0, 9.0], gamma=0.5, alpha=0.5)


class TestScalarSemigroup:
    def test_identity_at_zero(self, model149):
        u = np.array([1.0, -2.0, 0.5])
        np.testing.assert_array_equal(scalar_semigroup(model149, 0.0, u), u)

    def test_single_mode_exponential(self):
        m = SpectralModel(eigenvalues=[1.0], gamma=1.0, alpha=0.5)
        out = scalar_semigroup(m, 1.0, [1.0])
        assert out[0] == pytest.approx(np.exp(-1.0), rel=1e-15)

    def test_closed_form_at_log2(self):
        m = SpectralModel(eigenvalues=[1.0, 2.0], gamma=1.0, alpha=0.5)
        out = scalar_semigroup(m, np.log(2.0), [1.0, 1.0])
        np.testing.assert_allclose(out, [0.5, 0.25], rtol=1e-14)

    def test_negative_time_rejected(self, model149):
        with pytest.raises(ValueError):
            scalar_semigroup(model149, -0.1, np.zeros(3))

    def test_semigroup_law_and_decay(self, model149):
        rng = np.random.default_rng(1)
        for _ in range(100):
            t, s = rng.uniform(0.0, 3.0, size=2)
            u = rng.standard_normal(3)
            left = scalar_semigroup(model149, t, scalar_semigroup(model149, s, u))
            right = scalar_semigroup(model149, t + s, u)
            np.testing.assert_allclose(left, right, rtol=1e-13, atol=1e-300)
            assert np.linalg.norm(scalar_semigroup(model149, t, u)) <= (
                np.exp(-1.0 * t) * np.linalg.norm(u) * (1.0 + 1e-12)
            )


class TestBlockSemigroup:
    def test_identity_at_zero_exact(self, model4):
        s = ProductState([0.3], [-1.7])
        out = block_semigroup(model4, 0.0, s)
        assert out.position[0] == 0.3 and out.velocity[0] == -1.7

    def test_damped_oscillator_closed_form(self, model4):
        # x'' + 2 x' + 4 x = 0, x(0)=1, x'(0)=0:
        # x(t) = e^-t (cos(sqrt3 t) + sin(sqrt3 t)/sqrt3)
        out = block_semigroup(model4, 1.0, ProductState([1.0], [0.0]))
        w = np.sqrt(3.0)
        x1 = np.exp(-1.0) * (np.cos(w) + np.sin(w) / w)
        v1 = -np.exp(-1.0) * np.sin(w) * 4.0 / w
        assert out.position[0] == pytest.approx(x1, rel=1e-12)
        assert out.velocity[0] == pytest.approx(v1, rel=1e-12)
        # independent RK4 oracle
        _, xs = rk4_forced_oscillator(4.0, 0.5, 0.5, lambda t: 0.0,
                                      0.0, 1.0, 1e-4, x0=1.0, v0=0.0)
        assert out.position[0] == pytest.approx(xs[-1], abs=1e-11)

    def test_matches_expm_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            lam = rng.uniform(0.2, 30.0)
            gamma = rng.uniform(0.1, 2.0)
            alpha = rng.uniform(0.1, 0.9)
            if abs(gamma * gamma - lam ** (1.0 - 2.0 * alpha)) < 1e-4:
                continue
            tau = rng.uniform(0.0, 3.0)
            m = SpectralModel(eigenvalues=[lam], gamma=gamma, alpha=alpha)
            s = ProductState(rng.standard_normal(1), rng.standard_normal(1))
            out = block_semigroup(m, tau, s)
            ref = expm_block(lam, gamma, alpha, tau) @ np.array(
                [s.position[0], s.velocity[0]]
            )
            np.testing.assert_allclose(
                [out.position[0], out.velocity[0]], ref, rtol=1e-9, atol=1e-12
            )

    def test_semigroup_law(self, model149):
        rng = np.random.default_rng(2)
        for _ in range(50):
            t1, t2 = rng.uniform(0.0, 2.0, size=2)
            s = ProductState(rng.standard_normal(3), rng.standard_normal(3))
            a = block_semigroup(model149, t1, block_semigroup(model149, t2, s))
            b = block_semigroup(model149, t1 + t2, s)
            np.testing.assert_allclose(a.position, b.position, rtol=1e-10, atol=1e-14)
            np.testing.assert_allclose(a.velocity, b.velocity, rtol=1e-10, atol=1e-14)

    def test_real_states_stay_real(self, model149):
        rng = np.random.default_rng(3)
        s = ProductState(rng.standard_normal(3), rng.standard_normal(3))
        out = block_semigroup(model149, 0.7, s)
        assert out.is_real
        assert out.imag_residue() == 0.0

    def test_matches_high_accuracy_ode(self, model149):
        # per-mode second-order equation integrated with DOP853
        s = ProductState([1.0, -0.5, 0.25], [0.0, 1.0, -1.0])
        for tau in [0.5, 2.0, 10.0]:
            out = block_semigroup(model149, tau, s)
            for j, lam in enumerate([1.0, 4.0, 9.0]):
                damping = 2.0 * 0.5 * lam ** 0.5

                def rhs(t, y):
                    return [y[1], -damping * y[1] - lam * y[0]]

                sol = solve_ivp(rhs, (0.0, tau),
                                [s.position[j], s.velocity[j]],
                                method="DOP853", rtol=1e-12, atol=1e-14)
                assert out.position[j] == pytest.approx(sol.y[0, -1], rel=1e-8, abs=1e-10)
                assert out.velocity[j] == pytest.approx(sol.y[1, -1], rel=1e-8, abs=1e-10)

    def test_decay_bound_with_reported_constant(self, model149):
        est = estimate_sector(model149)
        report = check_AS1(model149)
        rng = np.random.default_rng(4)
        taus = np.linspace(0.0, 50.0 / report.delta0, 101)
        for tau in taus:
            s = ProductState(rng.standard_normal(3), rng.standard_normal(3))
            lhs = product_norm(model149, block_semigroup(model149, tau, s))
            rhs = est.n_prime * np.exp(-report.delta0 * tau) * product_norm(model149, s)
            assert lhs <= rhs * (1.0 + 1e-9)

    def test_generator_derivative(self, model149):
        rng = np.random.default_rng(5)
        s = ProductState(rng.standard_normal(3), rng.standard_normal(3))
        h = 1e-5
        for tau in [0.1, 1.0]:
            plus = block_semigroup(model149, tau + h, s)
            minus = block_semigroup(model149, tau - h, s)
            fd_pos = (plus.position - minus.position) / (2.0 * h)
            fd_vel = (plus.velocity - minus.velocity) / (2.0 * h)
            ref = apply_generator(model149, block_semigroup(model149, tau, s))
            np.testing.assert_allclose(fd_pos, ref.position, rtol=1e-6, atol=1e-9)
            np.testing.assert_allclose(fd_vel, ref.velocity, rtol=1e-6, atol=1e-9)

    def test_negative_tau_rejected(self, model4):
        with pytest.raises(ValueError):
            block_semigroup(model4, -0.1, ProductState([1.0], [0.0]))

    def test_uncertified_model_rejected(self):
        m = SpectralModel(eigenvalues=[0.0, 1.0], gamma=0.5, alpha=0.5)
        with pytest.raises(InstabilityError):
            block_semigroup(m, 1.0, ProductState([1.0, 0.0], [0.0, 0.0]))


class TestDecayEnvelope:
    def test_identity_ratio_at_zero(self, model149):
        pairs = decay_envelope(model149, [0.0, 1.0, 5.0])
        assert pairs[0] == (0.0, 1.0)

    def test_ratios_finite_nonnegative_bounded(self, model149):
        report = check_AS1(model149)
        taus = np.linspace(0.0, 50.0 / report.delta0, 400)
        pairs = decay_envelope(model149, taus)
        ratios = np.array([r for _, r in pairs])
        assert np.all(np.isfinite(ratios))
        assert np.all(ratios >= 0.0)
        est = estimate_sector(model149)
        assert np.max(ratios) <= est.n_prime * (1.0 + 1e-9)

    def test_negative_tau_rejected(self, model149):
        with pytest.raises(ValueError):
            decay_envelope(model149, [-1.0])


class TestSmoothingConstants:
    def test_single_mode_calculus_oracle(self):
        # maximizer t* = 2 beta / (2 lam - delta); lam = delta = 1, beta = 1/2
        m = SpectralModel(eigenvalues=[1.0], gamma=1.0, alpha=0.5)
        sc = smoothing_constants(m, 0.5, 1.0)
        assert sc.m_beta == pytest.approx(np.exp(-0.5), rel=1e-12)

    def test_random_models_match_calculus(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            lam1 = rng.uniform(0.5, 5.0)
            beta = rng.uniform(0.1, 0.9)
            delta = rng.uniform(0.1, 1.0) * lam1
            m = SpectralModel(eigenvalues=[lam1, lam1 * 4.0], gamma=1.0, alpha=0.5)
            sc = smoothing_constants(m, beta, delta)
            # per-mode closed form, decreasing in lam: mode 1 dominates
            rate = lam1 - delta / 2.0
            expected = lam1 ** beta * (beta / rate) ** beta * np.exp(-beta)
            assert sc.m_beta == pytest.approx(expected, rel=1e-10)

    def test_gamma_half_value(self):
        sc = smoothing_from_m(0.5, 1.0, 2.0)
        assert sc.d_beta == pytest.approx(np.sqrt(np.pi), abs=1e-10)

    def test_plate_rate_identity(self):
        # d(1/2) = M sqrt(2 pi / eta) at delta = eta
        for eta in [0.5, 2.0, 2.0 * np.pi]:
            sc = smoothing_from_m(0.5, 1.0, eta)
            assert sc.d_beta == pytest.approx(np.sqrt(2.0 * np.pi / eta), rel=1e-13)

    def test_monotonicity(self):
        base = smoothing_from_m(0.5, 1.0, 1.0)
        assert smoothing_from_m(0.5, 2.0, 1.0).d_beta >= base.d_beta
        assert smoothing_from_m(0.5, 1.0, 0.5).d_beta >= base.d_beta

    def test_domain_errors(self):
        m = SpectralModel(eigenvalues=[1.0], gamma=1.0, alpha=0.5)
        with pytest.raises(ValueError):
            smoothing_constants(m, 1.0, 0.5)
        with pytest.raises(ValueError):
            smoothing_constants(m, 0.5, -1.0)
        with pytest.raises(ValueError, match="inconsistent"):
            smoothing_constants(m, 0.5, 2.0)
