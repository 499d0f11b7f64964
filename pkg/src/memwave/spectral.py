"""Spectral data of the operator A and the product-space coordinates.

Everything downstream works in the coordinates defined here: a finite
truncation of the eigenvalue sequence of a positive self-adjoint operator
A, coefficient vectors against its eigenbasis, and the weighted norms

    ||u||_b   = ( sum_j lam_j^(2b) |u_j|^2 )^(1/2)        (H norm at b = 0)
    ||(u,v)|| = ( ||u||_{1/2}^2 + ||v||_0^2 )^(1/2)        (product norm)

Repeated eigenvalues are stored once with a multiplicity; coefficient
vectors carry one slot per repeated copy, in sorted eigenvalue order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CoverageError, DimensionMismatch

__all__ = [
    "SpectralModel",
    "ProductState",
    "Trajectory",
    "as_mode_coeffs",
    "fractional_apply",
    "norm_beta",
    "product_norm",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Finite spectral truncation of the operator pencil.

    Parameters
    ----------
    eigenvalues : array_like
        Distinct eigenvalues of A, strictly increasing and positive.
    multiplicities : array_like of int, optional
        One multiplicity per eigenvalue (default: all one).
    alpha : float
        Damping exponent in (0, 1); the damping operator is 2*gamma*A^alpha.
    gamma : float
        Damping strength, > 0.
    beta : float
        Exponent of the working graph norm, in (0, 1).  The product-space
        construction fixes beta = 1/2.
    """

    eigenvalues: np.ndarray
    multiplicities: np.ndarray = None
    alpha: float = 0.5
    gamma: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=float)
        if eig.ndim != 1 or eig.size == 0:
            raise ValueError("eigenvalues must be a nonempty 1-D sequence")
        # zero is admitted so stability refusals have a constructible witness;
        # every gap-certified computation rejects such models
        if not np.all(eig >= 0.0):
            raise ValueError("eigenvalues must be nonnegative")
        if not np.all(np.diff(eig) > 0.0):
            raise ValueError("eigenvalues must be strictly increasing")
        if self.multiplicities is None:
            mult = np.ones(eig.size, dtype=np.int64)
        else:
            mult = np.asarray(self.multiplicities)
            if mult.shape != eig.shape:
                raise ValueError("multiplicities must match eigenvalues")
            if not np.issubdtype(mult.dtype, np.integer):
                raised = mult.astype(np.int64)
                if np.any(raised != mult):
                    raise ValueError("multiplicities must be integers")
                mult = raised
            if np.any(mult < 1):
                raise ValueError("multiplicities must be >= 1")
            mult = mult.astype(np.int64)
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")
        object.__setattr__(self, "eigenvalues", _frozen(eig))
        object.__setattr__(self, "multiplicities", _frozen(mult))

    @property
    def n_distinct(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def mode_count(self) -> int:
        """Total number of coefficient slots, sum of multiplicities."""
        return int(self.multiplicities.sum())

    @cached_property
    def mode_eigenvalues(self) -> np.ndarray:
        """Eigenvalue of each coefficient slot (repeats expanded)."""
        return _frozen(np.repeat(self.eigenvalues, self.multiplicities))

    @cached_property
    def slot_labels(self) -> tuple:
        """(eigenvalue index, copy index) per slot, both 1-based."""
        labels = []
        for j, m in enumerate(self.multiplicities, start=1):
            labels.extend((j, k) for k in range(1, int(m) + 1))
        return tuple(labels)

    def __repr__(self):
        return (
            f"SpectralModel(n={self.mode_count}, lam1={self.eigenvalues[0]:g}, "
            f"lamN={self.eigenvalues[-1]:g}, alpha={self.alpha:g}, "
            f"gamma={self.gamma:g}, beta={self.beta:g})"
        )


def as_mode_coeffs(model: SpectralModel, values) -> np.ndarray:
    """Validate a coefficient vector against the model's slot count."""
    arr = np.asarray(values)
    if arr.ndim != 1 or arr.shape[0] != model.mode_count:
        raise DimensionMismatch(
            f"expected {model.mode_count} mode coefficients, got shape {arr.shape}"
        )
    if not np.issubdtype(arr.dtype, np.inexact):
        arr = arr.astype(float)
    return arr


def fractional_apply(model: SpectralModel, exponent: float, u) -> np.ndarray:
    """Apply the fractional power A^exponent to a coefficient vector.

    Acts as lam_j^exponent on each slot.  exponent = 0 is the identity,
    exponent = 1 is A itself.  Negative exponents are rejected: inverse
    powers are not part of the contract.
    """
    if exponent < 0.0:
        raise ValueError("exponent must be nonnegative")
    u = as_mode_coeffs(model, u)
    if exponent == 0.0:
        return u.copy()
    return model.mode_eigenvalues ** exponent * u


def norm_beta(model: SpectralModel, u, exponent: float) -> float:
    """Graph norm ||A^exponent u|| = (sum lam_j^(2 exponent) |u_j|^2)^(1/2).

    exponent = 0 gives the plain H (Euclidean) norm.
    """
    u = as_mode_coeffs(model, u)
    if exponent == 0.0:
        return float(np.linalg.norm(u))
    w = model.mode_eigenvalues ** (2.0 * exponent)
    return float(np.sqrt(np.sum(w * np.abs(u) ** 2)))


@dataclass(frozen=True, eq=False)
class ProductState:
    """A point (u, v) of the product space D(A^(1/2)) x H, per-mode coefficients."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pos = np.atleast_1d(np.asarray(self.position))
        vel = np.atleast_1d(np.asarray(self.velocity))
        if pos.shape != vel.shape or pos.ndim != 1:
            raise DimensionMismatch(
                f"position/velocity shapes differ: {pos.shape} vs {vel.shape}"
            )
        if not np.issubdtype(pos.dtype, np.inexact):
            pos = pos.astype(float)
        if not np.issubdtype(vel.dtype, np.inexact):
            vel = vel.astype(float)
        object.__setattr__(self, "position", _frozen(pos.copy()))
        object.__setattr__(self, "velocity", _frozen(vel.copy()))

    @classmethod
    def zero(cls, model: SpectralModel, dtype=float) -> "ProductState":
        n = model.mode_count
        return cls(np.zeros(n, dtype=dtype), np.zeros(n, dtype=dtype))

    def __add__(self, other: "ProductState") -> "ProductState":
        return ProductState(self.position + other.position, self.velocity + other.velocity)

    def __sub__(self, other: "ProductState") -> "ProductState":
        return ProductState(self.position - other.position, self.velocity - other.velocity)

    def __mul__(self, scalar) -> "ProductState":
        return ProductState(scalar * self.position, scalar * self.velocity)

    __rmul__ = __mul__

    @property
    def is_real(self) -> bool:
        return not (np.iscomplexobj(self.position) or np.iscomplexobj(self.velocity))

    def imag_residue(self) -> float:
        """Largest imaginary magnitude, 0.0 for real-typed states."""
        if self.is_real:
            return 0.0
        return float(
            max(np.max(np.abs(self.position.imag)), np.max(np.abs(self.velocity.imag)))
        )


def product_norm(model: SpectralModel, s: ProductState) -> float:
    """Product-space norm (||u||_{1/2}^2 + ||v||^2)^(1/2)."""
    pos = as_mode_coeffs(model, s.position)
    vel = as_mode_coeffs(model, s.velocity)
    lam = model.mode_eigenvalues
    return float(np.sqrt(np.sum(lam * np.abs(pos) ** 2) + np.sum(np.abs(vel) ** 2)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on a uniform time grid t0 + k*dt, k = 0 .. n_nodes-1.

    The discrete stand-in for a bounded continuous function of time with
    values in the product space: coefficients are stored as (n_nodes,
    mode_count) arrays, one row per grid node.
    """

    t0: float
    dt: float
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        pos = np.asarray(self.position)
        vel = np.asarray(self.velocity)
        if pos.ndim != 2 or pos.shape != vel.shape:
            raise DimensionMismatch(
                f"trajectory arrays must share a 2-D shape, got {pos.shape} vs {vel.shape}"
            )
        if not np.issubdtype(pos.dtype, np.inexact):
            pos = pos.astype(float)
        if not np.issubdtype(vel.dtype, np.inexact):
            vel = vel.astype(float)
        object.__setattr__(self, "position", _frozen(pos))
        object.__setattr__(self, "velocity", _frozen(vel))

    @classmethod
    def zeros(cls, model: SpectralModel, t0: float, dt: float, n_nodes: int,
              dtype=float) -> "Trajectory":
        shape = (int(n_nodes), model.mode_count)
        return cls(t0, dt, np.zeros(shape, dtype=dtype), np.zeros(shape, dtype=dtype))

    @property
    def n_nodes(self) -> int:
        return int(self.position.shape[0])

    @property
    def t_end(self) -> float:
        return self.t0 + (self.n_nodes - 1) * self.dt

    @property
    def window(self) -> tuple:
        return (self.t0, self.t_end)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_nodes)

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(self.n_nodes)]

    def state(self, i: int) -> ProductState:
        return ProductState(self.position[i], self.velocity[i])

    def node_index(self, t: float, tol: float = 1e-6) -> int:
        """Grid index of time t; t must sit on a node within tol*dt."""
        k = (t - self.t0) / self.dt
        i = int(round(k))
        if abs(k - i) > tol:
            raise CoverageError(f"t={t!r} is not on the trajectory grid (offset {k - i:g} steps)")
        if not (0 <= i < self.n_nodes):
            raise CoverageError(
                f"t={t!r} outside trajectory window [{self.t0:g}, {self.t_end:g}]"
            )
        return i

    def norms(self, model: SpectralModel) -> np.ndarray:
        """Product norm at every node."""
        if self.position.shape[1] != model.mode_count:
            raise DimensionMismatch("trajectory does not match the model's mode count")
        lam = model.mode_eigenvalues
        sq = np.sum(lam * np.abs(self.position) ** 2, axis=1) + np.sum(
            np.abs(self.velocity) ** 2, axis=1
        )
        return np.sqrt(sq)

    def sup_norm(self, model: SpectralModel) -> float:
        """Sup over the grid of the product norm."""
        return float(np.max(self.norms(model)))

    def restricted(self, ta: float, tb: float) -> "Trajectory":
        """Sub-trajectory covering [ta, tb] (node-aligned endpoints)."""
        i0 = self.node_index(ta)
        i1 = self.node_index(tb)
        if i1 < i0:
            raise CoverageError("empty restriction window")
        return Trajectory(
            self.t0 + i0 * self.dt,
            self.dt,
            self.position[i0 : i1 + 1].copy(),
            self.velocity[i0 : i1 + 1].copy(),
        )

    def shifted(self, delta: float) -> "Trajectory":
        """Same data on a grid translated by delta."""
        return Trajectory(self.t0 + delta, self.dt, self.position.copy(), self.velocity.copy())
