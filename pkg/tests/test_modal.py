import numpy as np
import pytest

from memwave import (
    InstabilityError,
    RepeatedRootError,
    SpectralModel,
    SpectrumError,
    check_AS1,
    estimate_sector,
    mode_block_factors,
    mode_roots,
    resolvent_norm,
)
from memwave.modal import SectorGrid, _two_by_two_norm, weighted_exp_norms

from oracles import companion_block, poly_residual, weighted_norm_2x2


def single_mode(lam, gamma, alpha=0.5):
    return SpectralModel(eigenvalues=[lam], gamma=gamma, alpha=alpha)


def random_parameters(rng, count):
    """Random (gamma, alpha, lam) with well-separated roots and tame scales."""
    out = []
    while len(out) < count:
        gamma = rng.uniform(0.05, 2.0)
        alpha = rng.uniform(0.05, 0.95)
        lam = 10.0 ** rng.uniform(-2.0, np.log10(500.0))
        if abs(gamma * gamma - lam ** (1.0 - 2.0 * alpha)) > 1e-6:
            out.append((gamma, alpha, lam))
    return out


class TestModeRoots:
    def test_real_root_pair(self):
        r = mode_roots(single_mode(9.0, 2.0), 1)
        assert r.rho1 == pytest.approx(-6.0 + 3.0 * np.sqrt(3.0), abs=1e-12)
        assert r.rho2 == pytest.approx(-6.0 - 3.0 * np.sqrt(3.0), abs=1e-12)
        assert poly_residual(r.rho1, 9.0, 2.0, 0.5) < 1e-12 * 10.0
        assert poly_residual(r.rho2, 9.0, 2.0, 0.5) < 1e-12 * 10.0
        assert (r.rho1 + r.rho2) == pytest.approx(-12.0, rel=1e-12)
        assert (r.rho1 * r.rho2) == pytest.approx(9.0, rel=1e-12)

    def test_complex_root_pair(self):
        r = mode_roots(single_mode(4.0, 0.5), 1)
        assert r.rho1 == pytest.approx(-1.0 + 1j * np.sqrt(3.0), abs=1e-12)
        assert r.rho2 == pytest.approx(-1.0 - 1j * np.sqrt(3.0), abs=1e-12)
        assert poly_residual(r.rho1, 4.0, 0.5, 0.5) < 1e-12 * 5.0

    def test_repeated_root_rejected(self):
        with pytest.raises(RepeatedRootError):
            mode_roots(single_mode(1.0, 1.0), 1)

    def test_labeling_convention(self):
        r = mode_roots(single_mode(9.0, 2.0), 1)
        assert r.rho1.real > r.rho2.real
        c = mode_roots(single_mode(4.0, 0.5), 1)
        assert c.rho1.imag > c.rho2.imag

    def test_index_validation(self):
        with pytest.raises(ValueError):
            mode_roots(single_mode(1.0, 0.5), 2)

    def test_random_residuals_and_vieta(self):
        rng = np.random.default_rng(2024)
        for gamma, alpha, lam in random_parameters(rng, 200):
            m = single_mode(lam, gamma, alpha)
            r = mode_roots(m, 1)
            assert r.rho1 != r.rho2
            bound = 1e-12 * (1.0 + lam)
            assert poly_residual(r.rho1, lam, gamma, alpha) < bound
            assert poly_residual(r.rho2, lam, gamma, alpha) < bound
            assert r.rho1 + r.rho2 == pytest.approx(-2.0 * gamma * lam ** alpha, rel=1e-10)
            assert r.rho1 * r.rho2 == pytest.approx(lam, rel=1e-10)

    def test_alpha_half_closed_form(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            lam = rng.uniform(0.1, 50.0)
            gamma = rng.uniform(0.05, 0.999)
            r = mode_roots(single_mode(lam, gamma), 1)
            assert r.discriminant < 0.0
            assert r.rho1.imag != 0.0
            # real part is the single product -gamma * lam**0.5, exact
            assert r.rho1.real == -gamma * lam ** 0.5
        gamma_big = rng.uniform(1.001, 5.0)
        r = mode_roots(single_mode(2.0, gamma_big), 1)
        assert r.rho1.imag == 0.0


class TestCheckAS1:
    def test_uniform_gap_alpha_half(self):
        m = SpectralModel(eigenvalues=[1.0, 4.0, 9.0], gamma=0.5, alpha=0.5)
        report = check_AS1(m)
        assert report.delta0 == pytest.approx(0.5, abs=1e-12)
        assert report.worst_mode == 1
        np.testing.assert_allclose(report.per_mode_max_real, [-0.5, -1.0, -1.5])

    def test_real_root_gap(self):
        report = check_AS1(single_mode(9.0, 2.0))
        assert report.delta0 == pytest.approx(6.0 - 3.0 * np.sqrt(3.0), abs=1e-10)

    def test_rescaling_scales_gap(self):
        rng = np.random.default_rng(5)
        base = np.array([1.0, 2.5, 7.0])
        d0 = check_AS1(SpectralModel(eigenvalues=base, gamma=0.5, alpha=0.5)).delta0
        for _ in range(10):
            c = rng.uniform(0.2, 20.0)
            dc = check_AS1(SpectralModel(eigenvalues=c * base, gamma=0.5, alpha=0.5)).delta0
            assert dc == pytest.approx(np.sqrt(c) * d0, rel=1e-12)

    def test_zero_mode_is_refused_with_witness(self):
        m = SpectralModel(eigenvalues=[0.0, 1.0], gamma=0.5, alpha=0.5)
        with pytest.raises(InstabilityError) as err:
            check_AS1(m)
        assert err.value.worst_mode == 1
        assert err.value.max_real_part >= 0.0

    def test_no_root_on_imaginary_axis_when_certified(self):
        rng = np.random.default_rng(6)
        for gamma, alpha, lam in random_parameters(rng, 50):
            m = single_mode(lam, gamma, alpha)
            report = check_AS1(m)
            r = mode_roots(m, 1)
            assert max(r.rho1.real, r.rho2.real) <= -report.delta0 + 1e-15


class TestBlockFactors:
    def test_reconstructs_companion_block(self):
        r = mode_roots(single_mode(4.0, 0.5), 1)
        K, J, K_inv = mode_block_factors(r)
        block = K @ J @ K_inv
        np.testing.assert_allclose(block.real, companion_block(4.0, 0.5, 0.5),
                                   atol=1e-10)
        np.testing.assert_allclose(block.imag, 0.0, atol=1e-10)

    def test_inverse_identity(self):
        r = mode_roots(single_mode(9.0, 2.0), 1)
        K, _, K_inv = mode_block_factors(r)
        np.testing.assert_allclose(K @ K_inv, np.eye(2), atol=1e-12)

    def test_trace_preserved(self):
        rng = np.random.default_rng(8)
        for gamma, alpha, lam in random_parameters(rng, 30):
            r = mode_roots(single_mode(lam, gamma, alpha), 1)
            _, J, _ = mode_block_factors(r)
            assert np.trace(J) == pytest.approx(-2.0 * gamma * lam ** alpha, rel=1e-10)

    def test_random_reconstruction(self):
        rng = np.random.default_rng(99)
        for gamma, alpha, lam in random_parameters(rng, 100):
            r = mode_roots(single_mode(lam, gamma, alpha), 1)
            K, J, K_inv = mode_block_factors(r)
            expected = companion_block(lam, gamma, alpha)
            scale = np.max(np.abs(expected)) + 1.0
            np.testing.assert_allclose((K @ J @ K_inv).real, expected,
                                       atol=1e-9 * scale)


class TestTwoByTwoNorm:
    def test_matches_dense_svd(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            mine = _two_by_two_norm(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
            ref = np.linalg.svd(m, compute_uv=False)[0]
            assert mine == pytest.approx(ref, rel=1e-12)


class TestResolvent:
    def test_matches_dense_oracle(self):
        m = single_mode(4.0, 0.5)
        for lam_s in [10.0, 1.0 + 2.0j, -0.1 + 5.0j]:
            block = companion_block(4.0, 0.5, 0.5)
            dense = np.linalg.inv(lam_s * np.eye(2) - block)
            assert resolvent_norm(m, lam_s) == pytest.approx(
                weighted_norm_2x2(dense, 4.0), rel=1e-12
            )

    def test_neumann_limit(self):
        m = single_mode(4.0, 0.5)
        assert 1e6 * resolvent_norm(m, 1e6) == pytest.approx(1.0, rel=1e-4)

    def test_pole_rejected(self):
        m = single_mode(4.0, 0.5)
        rho1 = mode_roots(m, 1).rho1
        with pytest.raises(SpectrumError):
            resolvent_norm(m, rho1)

    def test_max_over_modes(self):
        m = SpectralModel(eigenvalues=[1.0, 4.0, 9.0], gamma=0.5, alpha=0.5)
        lam_s = 2.0 + 1.0j
        per_mode = []
        for lam in [1.0, 4.0, 9.0]:
            dense = np.linalg.inv(lam_s * np.eye(2) - companion_block(lam, 0.5, 0.5))
            per_mode.append(weighted_norm_2x2(dense, lam))
        assert resolvent_norm(m, lam_s) == pytest.approx(max(per_mode), rel=1e-12)


class TestSectorEstimate:
    def test_constants_and_bound(self):
        m = single_mode(4.0, 0.5)
        est = estimate_sector(m)
        assert est.K >= 1.0
        assert est.omega == pytest.approx(-est.delta0 / 2.0)
        assert est.omega < 0.0
        assert est.n_prime >= 1.0
        # sampled resolvent norms obey the reported bound
        for lam_s in est.grid.points(est.omega)[::37]:
            assert resolvent_norm(m, lam_s) <= est.K / abs(lam_s) * (1.0 + 1e-9)

    def test_grid_refinement_consistency(self):
        m = single_mode(4.0, 0.5)
        est = estimate_sector(m)
        fine = estimate_sector(m, SectorGrid().refined(2))
        assert fine.K == pytest.approx(est.K, rel=0.05)

    def test_instability_propagates(self):
        m = SpectralModel(eigenvalues=[0.0, 1.0], gamma=0.5, alpha=0.5)
        with pytest.raises(InstabilityError):
            estimate_sector(m)

    def test_decay_constant_bounds_grid(self):
        m = SpectralModel(eigenvalues=[1.0, 4.0, 9.0], gamma=0.5, alpha=0.5)
        est = estimate_sector(m)
        taus = np.linspace(0.0, 50.0 / est.delta0, 173)
        ratios = weighted_exp_norms(m, taus) * np.exp(est.delta0 * taus)
        assert np.all(ratios <= est.n_prime * (1.0 + 1e-9))
