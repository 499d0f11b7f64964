"""Semigroup evaluation and the smoothing/decay constants.

Two semigroups appear.  The scalar one, e^(-tA), acts as e^(-lam_j t) per
mode and decays at rate lam_1.  The block one, T(tau) = e^(tau G) with G
the first-order block generator, is evaluated per mode through the
diagonal factorization K e^(tau J) K^(-1); that factorization is exact for
distinct roots, so no series or Pade approximation is ever used.

The smoothing constant M(beta) and the convolution constant

    d(beta) = M(beta) * (2/delta)^(1-beta) * Gamma(1-beta)

are computed tightly for the truncated model by maximizing
lam^beta t^beta e^(-(lam - delta/2) t) over modes and t.  The decay rate
delta is lam_1 in the scalar context and the spectral gap delta0 in the
block context; callers state which one they pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_function

from .errors import DimensionMismatch
from .modal import check_AS1, slot_roots, weighted_exp_norms
from .spectral import ProductState, SpectralModel, as_mode_coeffs

__all__ = [
    "SmoothingConstants",
    "scalar_semigroup",
    "block_semigroup",
    "block_propagator_entries",
    "apply_generator",
    "decay_envelope",
    "smoothing_constants",
    "smoothing_from_m",
]


def scalar_semigroup(model: SpectralModel, t: float, u) -> np.ndarray:
    """Apply e^(-tA): multiplies each slot by e^(-lam_j t).

    Exponentially stable: the result's norm is bounded by e^(-lam_1 t)
    times the input norm.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    u = as_mode_coeffs(model, u)
    return np.exp(-model.mode_eigenvalues * t) * u


def block_propagator_entries(model: SpectralModel, tau: float):
    """Entries (m11, m12, m21, m22) of e^(tau G) per coefficient slot.

    The entries of the exponential of a real 2x2 matrix are real, so the
    imaginary roundoff of the complex evaluation is discarded exactly.
    """
    rho1, rho2 = slot_roots(model)
    lam = model.mode_eigenvalues
    den = rho1 - rho2
    e1 = np.exp(rho1 * tau)
    e2 = np.exp(rho2 * tau)
    m11 = ((rho1 * e2 - rho2 * e1) / den).real
    m12 = ((e1 - e2) / den).real
    m21 = (lam * (e2 - e1) / den).real
    m22 = ((rho1 * e1 - rho2 * e2) / den).real
    return m11, m12, m21, m22


def block_semigroup(model: SpectralModel, tau: float, s: ProductState) -> ProductState:
    """Apply the block semigroup T(tau) to a product-space state.

    Per mode this is the exact solution operator of
    x'' + 2*gamma*lam^alpha x' + lam x = 0 acting on (x, x').  Requires a
    certified spectral gap; T(0) is the identity and
    ||T(tau)s|| <= N' e^(-delta0 tau) ||s||.
    """
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    check_AS1(model)
    pos = as_mode_coeffs(model, s.position)
    vel = as_mode_coeffs(model, s.velocity)
    m11, m12, m21, m22 = block_propagator_entries(model, tau)
    return ProductState(m11 * pos + m12 * vel, m21 * pos + m22 * vel)


def apply_generator(model: SpectralModel, s: ProductState) -> ProductState:
    """Apply the block generator: (u, v) -> (v, -lam u - 2 gamma lam^alpha v)."""
    pos = as_mode_coeffs(model, s.position)
    vel = as_mode_coeffs(model, s.velocity)
    lam = model.mode_eigenvalues
    damp = 2.0 * model.gamma * lam ** model.alpha
    return ProductState(vel, -lam * pos - damp * vel)


def decay_envelope(model: SpectralModel, taus):
    """Measured decay ratios ||T(tau)|| / e^(-delta0 tau) on a tau grid.

    Returns a list of (tau, ratio) pairs; the max ratio over a sufficiently
    fine grid is the semigroup constant N'.  The ratio at tau = 0 is
    exactly 1.
    """
    report = check_AS1(model)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(taus < 0.0):
        raise ValueError("tau values must be nonnegative")
    norms = weighted_exp_norms(model, taus)
    ratios = norms * np.exp(report.delta0 * taus)
    return list(zip(taus.tolist(), ratios.tolist()))


@dataclass(frozen=True)
class SmoothingConstants:
    """Constants of the smoothing estimate and the induced convolution bound.

    m_beta is the constant of ||A^beta e^(-tA) x|| <= m_beta e^(-delta t / 2)
    t^(-beta) ||x|| on the truncated model, delta the decay rate used, and

        d_beta = m_beta * (2/delta)^(1-beta) * Gamma(1-beta)

    the resulting bound on the convolution integral of the estimate.
    """

    beta: float
    m_beta: float
    delta: float
    d_beta: float


def smoothing_from_m(beta: float, m_beta: float, delta: float) -> SmoothingConstants:
    """Build the constants from a user-supplied (or abstract) m_beta."""
    if not (0.0 < beta < 1.0):
        raise ValueError("beta must lie in (0, 1)")
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    if not m_beta > 0.0:
        raise ValueError("m_beta must be positive")
    d_beta = m_beta * (2.0 / delta) ** (1.0 - beta) * float(gamma_function(1.0 - beta))
    return SmoothingConstants(beta=beta, m_beta=m_beta, delta=delta, d_beta=d_beta)


def smoothing_constants(model: SpectralModel, beta: float, delta: float) -> SmoothingConstants:
    """Tight smoothing constants of the truncated scalar semigroup.

    m_beta = sup over modes j and t > 0 of lam_j^beta t^beta
    e^(-(lam_j - delta/2) t).  The per-mode maximizer t* = beta/(lam - delta/2)
    is included in the evaluation grid, so the reported sup is exact to
    roundoff.  Requires 0 < delta <= lam_1 so every mode decays at least at
    rate delta.
    """
    if not (0.0 < beta < 1.0):
        raise ValueError("beta must lie in (0, 1)")
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    lam1 = float(model.eigenvalues[0])
    if delta > lam1:
        raise ValueError(
            f"inconsistent decay rate: delta={delta:g} exceeds the smallest "
            f"eigenvalue lam_1={lam1:g}"
        )
    m_beta = 0.0
    offsets = np.logspace(-2.0, 2.0, 401)
    for lam in model.eigenvalues:
        rate = lam - 0.5 * delta
        t_star = beta / rate
        ts = np.concatenate((t_star * offsets, [t_star]))
        vals = lam ** beta * ts ** beta * np.exp(-rate * ts)
        m_beta = max(m_beta, float(np.max(vals)))
    return smoothing_from_m(beta, m_beta, delta)
