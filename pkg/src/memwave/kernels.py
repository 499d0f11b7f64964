"""Scalar memory kernels b(t) and the history convolution they generate.

The memory term of the second-order equation is the scalar convolution
of b against the position coefficients; in the first-order system it
lands, like the forcing, in the velocity slot of the plain product space
H x H.  A kernel carries its exact L1 mass and a tail-mass function so
truncation budgets stay checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erfc

from .certificates import Certificate
from .errors import CoverageError
from .spectral import ProductState, Trajectory

__all__ = [
    "MemoryKernel",
    "zero_kernel",
    "exponential_kernel",
    "gaussian_kernel",
    "memory_convolve",
    "check_H6",
]


@dataclass(frozen=True, eq=False)
class MemoryKernel:
    """Nonnegative scalar kernel with exact integral data.

    evaluate maps an array of lags t >= 0 to b(t) >= 0; l1_norm is the
    integral of b over [0, inf); tail_bound(T) is the remaining mass
    beyond lag T (nonincreasing, -> 0).
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    l1_norm: float
    tail_bound: Callable[[float], float]

    def __call__(self, t):
        return self.evaluate(np.asarray(t, dtype=float))

    @property
    def is_zero(self) -> bool:
        return self.l1_norm == 0.0


def zero_kernel() -> MemoryKernel:
    return MemoryKernel(
        name="zero",
        evaluate=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        l1_norm=0.0,
        tail_bound=lambda T: 0.0,
    )


def exponential_kernel(amplitude: float, rate: float = 1.0) -> MemoryKernel:
    """b(t) = amplitude * e^(-rate t); mass amplitude/rate."""
    if amplitude < 0.0 or rate <= 0.0:
        raise ValueError("exponential kernel needs amplitude >= 0, rate > 0")
    a, r = float(amplitude), float(rate)
    return MemoryKernel(
        name="exponential",
        evaluate=lambda t: a * np.exp(-r * np.asarray(t, dtype=float)),
        l1_norm=a / r,
        tail_bound=lambda T: (a / r) * np.exp(-r * T),
    )


def gaussian_kernel(amplitude: float, rate: float = 1.0) -> MemoryKernel:
    """b(t) = amplitude * e^(-(rate t)^2); mass amplitude*sqrt(pi)/(2 rate)."""
    if amplitude < 0.0 or rate <= 0.0:
        raise ValueError("gaussian kernel needs amplitude >= 0, rate > 0")
    a, r = float(amplitude), float(rate)
    return MemoryKernel(
        name="gaussian",
        evaluate=lambda t: a * np.exp(-((r * np.asarray(t, dtype=float)) ** 2)),
        l1_norm=a * np.sqrt(np.pi) / (2.0 * r),
        tail_bound=lambda T: a * np.sqrt(np.pi) / (2.0 * r) * float(erfc(r * T)),
    )


def memory_convolve(kernel: MemoryKernel, traj: Trajectory, t: float,
                    horizon: float) -> ProductState:
    """Evaluate the memory term at time t from trajectory history.

    Returns the product-space vector with zero position component and
    velocity component

        integral over [t - horizon, t] of b(t - s) * position(s) ds,

    by trapezoidal quadrature on the trajectory grid.  The neglected tail
    is bounded by tail_bound(horizon) times the trajectory sup norm.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    i_t = traj.node_index(t)
    m = int(np.ceil(horizon / traj.dt - 1e-9))
    i_0 = i_t - m
    if i_0 < 0:
        raise CoverageError(
            f"trajectory starts at {traj.t0:g}, cannot reach back to {t - horizon:g}"
        )
    n_modes = traj.position.shape[1]
    dtype = complex if np.iscomplexobj(traj.position) else float
    if kernel.is_zero or m == 0:
        zero = np.zeros(n_modes, dtype=dtype)
        return ProductState(zero, zero.copy())
    lags = traj.dt * np.arange(m + 1, dtype=float)
    weights = kernel.evaluate(lags) * traj.dt
    weights[0] *= 0.5
    weights[-1] *= 0.5
    # lag j pairs with node i_t - j
    block = traj.position[i_0 : i_t + 1][::-1]
    conv = weights @ block
    return ProductState(np.zeros(n_modes, dtype=dtype), conv.astype(dtype))


def check_H6(kernel: MemoryKernel, d_beta: float) -> Certificate:
    """Memory-mass hypothesis: the kernel's L1 norm must not exceed 1/(2 d_beta)."""
    if not d_beta > 0.0:
        raise ValueError("d_beta must be positive")
    bound = 1.0 / (2.0 * d_beta)
    value = float(kernel.l1_norm)
    return Certificate(
        name="H6",
        passed=value <= bound,
        value=value,
        bound=bound,
        description="kernel L1 mass vs 1/(2 d_beta)",
        details={"kernel": kernel.name, "d_beta": float(d_beta)},
    )
