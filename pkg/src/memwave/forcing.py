"""Forcing functions built from recurrent and vanishing-mean components.

A forcing f(t, u) maps time and the position coefficients into the
velocity slot of the plain product space.  It is stored as the sum of a
recurrent (almost automorphic) component and an ergodic component whose
sliding mean (1/2r) * integral of its norm over [-r, r] vanishes as r
grows.  Membership in either class is not decidable from finitely many
samples, so the diagnostics here are falsification/consistency checks
with a three-valued outcome, never proofs.

The shipped signal library covers the standard witnesses: trigonometric
two-tone combinations with irrational frequency ratio, the classical
recurrent-but-not-periodic signal sin(1/(2 + cos t + cos sqrt(2) t)),
and the vanishing-mean signals e^(-|t|), 1/(1+t^2), e^(-t^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .certificates import Certificate
from .spectral import SpectralModel

__all__ = [
    "Signal",
    "ForcingFunction",
    "ShiftDiagnostic",
    "sine_signal",
    "two_tone_signal",
    "exotic_aa_signal",
    "exp_abs_signal",
    "lorentz_signal",
    "gauss_signal",
    "zero_forcing",
    "vector_forcing",
    "ergodic_mean",
    "shift_convergence_test",
    "check_H4",
    "estimate_lipschitz",
    "AA_LIBRARY",
    "PAP0_LIBRARY",
]

SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class Signal:
    """Scalar time signal with a declared sup bound."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    sup_bound: float

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


def sine_signal(amplitude: float = 1.0, omega: float = 1.0, phase: float = 0.0) -> Signal:
    return Signal(
        name=f"sine(a={amplitude:g}, w={omega:g})",
        fn=lambda t: amplitude * np.sin(omega * t + phase),
        sup_bound=abs(amplitude),
    )


def two_tone_signal(amplitude: float = 1.0, omega1: float = 1.0,
                    omega2: float = SQRT2) -> Signal:
    """amplitude * (sin(omega1 t) + sin(omega2 t)), irrational ratio by default."""
    return Signal(
        name=f"two_tone(a={amplitude:g})",
        fn=lambda t: amplitude * (np.sin(omega1 * t) + np.sin(omega2 * t)),
        sup_bound=2.0 * abs(amplitude),
    )


def exotic_aa_signal(amplitude: float = 1.0) -> Signal:
    """amplitude * sin(1/(2 + cos t + cos(sqrt(2) t))).

    Recurrent under shifts but not uniformly so: the denominator comes
    arbitrarily close to zero along resonant times.
    """
    return Signal(
        name=f"exotic_aa(a={amplitude:g})",
        fn=lambda t: amplitude * np.sin(1.0 / (2.0 + np.cos(t) + np.cos(SQRT2 * t))),
        sup_bound=abs(amplitude),
    )


def exp_abs_signal(amplitude: float = 1.0) -> Signal:
    return Signal(
        name=f"exp_abs(a={amplitude:g})",
        fn=lambda t: amplitude * np.exp(-np.abs(t)),
        sup_bound=abs(amplitude),
    )


def lorentz_signal(amplitude: float = 1.0) -> Signal:
    return Signal(
        name=f"lorentz(a={amplitude:g})",
        fn=lambda t: amplitude / (1.0 + t * t),
        sup_bound=abs(amplitude),
    )


def gauss_signal(amplitude: float = 1.0) -> Signal:
    return Signal(
        name=f"gauss(a={amplitude:g})",
        fn=lambda t: amplitude * np.exp(-t * t),
        sup_bound=abs(amplitude),
    )


AA_LIBRARY = {
    "two_tone": two_tone_signal(),
    "exotic_aa": exotic_aa_signal(),
}

PAP0_LIBRARY = {
    "exp_abs": exp_abs_signal(),
    "lorentz": lorentz_signal(),
    "gauss": gauss_signal(),
}


@dataclass(frozen=True, eq=False)
class ForcingFunction:
    """Forcing f = (recurrent part) + (ergodic part) with declared bounds.

    aa_part and ergodic_part map (t, u) to a mode-coefficient vector; u is
    the position-coefficient vector of the state.  State-independent
    forcings additionally accept an array of times with u = None and
    return an (n_times, mode_count) block, which the solver exploits.

    lipschitz_bound bounds ||f(t,u) - f(t,v)|| by that multiple of the
    beta-norm of u - v over the working ball; ball_bound bounds ||f||
    there.  Both may be declared from closed forms or estimated by
    sampling (see estimate_lipschitz).
    """

    name: str
    mode_count: int
    aa_part: Callable
    ergodic_part: Optional[Callable] = None
    lipschitz_bound: float = 0.0
    ball_bound: float = 0.0
    state_dependent: bool = False

    def __call__(self, t, u=None) -> np.ndarray:
        val = self.aa_part(t, u)
        if self.ergodic_part is not None:
            val = val + self.ergodic_part(t, u)
        return val

    def sample_grid(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized samples on a time grid; state-independent forcings only."""
        if self.state_dependent:
            raise ValueError("state-dependent forcing cannot be sampled without states")
        return self(np.asarray(ts, dtype=float), None)

    @property
    def has_ergodic_part(self) -> bool:
        return self.ergodic_part is not None

    def aa_only(self) -> "ForcingFunction":
        """The same forcing with its ergodic component dropped."""
        if self.ergodic_part is None:
            return self
        return ForcingFunction(
            name=self.name + "|aa_only",
            mode_count=self.mode_count,
            aa_part=self.aa_part,
            ergodic_part=None,
            lipschitz_bound=self.lipschitz_bound,
            ball_bound=self.ball_bound,
            state_dependent=self.state_dependent,
        )


def _column_map(signal: Optional[Signal], slot: int, mode_count: int):
    """Lift a scalar signal onto one coefficient slot."""

    def evaluate(t, u=None):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            out = np.zeros(mode_count)
            if signal is not None:
                out[slot] = float(signal(t_arr))
            return out
        out = np.zeros((t_arr.size, mode_count))
        if signal is not None:
            out[:, slot] = signal(t_arr)
        return out

    return evaluate


def zero_forcing(model: SpectralModel) -> ForcingFunction:
    return ForcingFunction(
        name="zero",
        mode_count=model.mode_count,
        aa_part=_column_map(None, 0, model.mode_count),
    )


def vector_forcing(model: SpectralModel, aa_signal: Optional[Signal] = None,
                   ergodic_signal: Optional[Signal] = None, mode: int = 1,
                   coupling: float = 0.0, coupling_mode: int = None,
                   name: str = None) -> ForcingFunction:
    """Forcing acting along one eigen-slot, with optional state feedback.

    The recurrent and ergodic signals act on slot `mode` (1-based).  A
    nonzero `coupling` adds kappa * tanh(Re u_d) on slot `coupling_mode`,
    a bounded state feedback with exact Lipschitz constant
    kappa * lam_1^(-beta) in the beta-norm.
    """
    n = model.mode_count
    if not (1 <= mode <= n):
        raise ValueError(f"mode {mode} out of range 1..{n}")
    slot = mode - 1
    c_slot = (coupling_mode - 1) if coupling_mode is not None else slot
    if not (0 <= c_slot < n):
        raise ValueError(f"coupling mode {coupling_mode} out of range 1..{n}")

    base_aa = _column_map(aa_signal, slot, n)
    if coupling != 0.0:
        kappa = float(coupling)

        def aa_part(t, u=None):
            out = base_aa(t, u)
            if u is not None:
                out = out.copy()
                out[c_slot] += kappa * np.tanh(np.real(u[c_slot]))
            return out

        state_dependent = True
        lipschitz = abs(kappa) * float(model.eigenvalues[0]) ** (-model.beta)
    else:
        aa_part = base_aa
        state_dependent = False
        lipschitz = 0.0

    ergodic_part = _column_map(ergodic_signal, slot, n) if ergodic_signal else None
    ball = (aa_signal.sup_bound if aa_signal else 0.0)
    ball += ergodic_signal.sup_bound if ergodic_signal else 0.0
    ball += abs(coupling)
    if name is None:
        parts = [s.name for s in (aa_signal, ergodic_signal) if s is not None]
        if coupling:
            parts.append(f"tanh_feedback(k={coupling:g})")
        name = "+".join(parts) if parts else "zero"
    return ForcingFunction(
        name=name,
        mode_count=n,
        aa_part=aa_part,
        ergodic_part=ergodic_part,
        lipschitz_bound=lipschitz,
        ball_bound=ball,
        state_dependent=state_dependent,
    )


def _value_norms(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim == 1:
        return np.abs(values)
    return np.linalg.norm(values, axis=-1)


def ergodic_mean(fn, r: float, grid_step: float = 0.01) -> float:
    """Sliding mean (1/2r) * integral of ||fn(s)|| over [-r, r], trapezoidal.

    fn must accept an array of times; values may be scalar or vector
    (vector samples are reduced by the Euclidean norm).
    """
    if r <= 0.0 or grid_step <= 0.0:
        raise ValueError("r and grid_step must be positive")
    half = int(np.ceil(r / grid_step))
    ts = np.linspace(-r, r, 2 * half + 1)
    vals = _value_norms(fn(ts))
    if not np.all(np.isfinite(vals)):
        raise ValueError("fn produced nonfinite samples")
    return float(np.trapezoid(vals, ts) / (2.0 * r))


@dataclass(frozen=True)
class ShiftDiagnostic:
    """Finite-sample shift-recurrence diagnostic (not a proof).

    verdict is "pass", "fail", or "inconclusive": a convergent cluster of
    shifted samples was found and the back-shifted limit matched / did not
    match the original samples, or no convergent cluster existed among the
    offered shifts.
    """

    verdict: str
    selected_shifts: tuple
    forward_residual: Optional[float]
    back_residual: Optional[float]
    tol: float


def shift_convergence_test(fn, shifts, probe_times, tol: float) -> ShiftDiagnostic:
    """Two-sided shift-convergence test on a probe grid.

    Looks for a cluster of shifts along which fn(t + s) agrees within
    tol/2 on the probe grid, forms the limit candidate g there, then
    demands that back-shifted evaluations recover fn within tol:
    g(t - s_k), approximated by averaging fn(t - s_k + s_n) over the
    other selected shifts, must match fn(t).
    """
    shifts = np.asarray(list(shifts), dtype=float)
    probe = np.asarray(list(probe_times), dtype=float)
    if shifts.size == 0 or probe.size == 0:
        raise ValueError("shifts and probe grid must be nonempty")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    samples = np.stack([np.asarray(fn(probe + s)) for s in shifts])
    if not np.all(np.isfinite(samples)):
        raise ValueError("fn produced nonfinite samples")

    n_s = shifts.size
    dist = np.zeros((n_s, n_s))
    for i in range(n_s):
        for j in range(i + 1, n_s):
            d = float(np.max(_value_norms(samples[i] - samples[j])))
            dist[i, j] = dist[j, i] = d
    within = dist <= 0.5 * tol
    counts = within.sum(axis=1)
    medoid = int(np.argmax(counts))
    selected = np.flatnonzero(within[medoid])
    if selected.size < 3:
        return ShiftDiagnostic(
            verdict="inconclusive",
            selected_shifts=tuple(shifts[selected].tolist()),
            forward_residual=None,
            back_residual=None,
            tol=tol,
        )
    forward = float(np.max(dist[np.ix_(selected, selected)]))

    back = 0.0
    probes_back = selected[-6:]
    for k in probes_back:
        others = [n for n in selected if n != k]
        acc = None
        for n in others:
            vals = np.asarray(fn(probe - shifts[k] + shifts[n]))
            acc = vals if acc is None else acc + vals
        candidate = acc / len(others)
        reference = np.asarray(fn(probe))
        back = max(back, float(np.max(_value_norms(candidate - reference))))

    verdict = "pass" if back <= tol else "fail"
    return ShiftDiagnostic(
        verdict=verdict,
        selected_shifts=tuple(shifts[selected].tolist()),
        forward_residual=forward,
        back_residual=back,
        tol=tol,
    )


def _ball_samples(model: SpectralModel, L: float, count: int, rng) -> np.ndarray:
    """Random real coefficient vectors with beta-norm at most L."""
    n = model.mode_count
    w = model.mode_eigenvalues ** model.beta
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g * w, axis=1)
    norms[norms == 0.0] = 1.0
    radii = L * rng.uniform(0.0, 1.0, size=count) ** (1.0 / n)
    return g * (radii / norms)[:, None]


def estimate_lipschitz(model: SpectralModel, fn, L: float, budget: int = 256,
                       seed: int = 0) -> float:
    """Sampled Lipschitz constant of fn over the beta-ball, with 25% headroom."""
    rng = np.random.default_rng(seed)
    us = _ball_samples(model, L, budget, rng)
    vs = _ball_samples(model, L, budget, rng)
    ts = rng.uniform(-1000.0, 1000.0, size=budget)
    w = model.mode_eigenvalues ** model.beta
    worst = 0.0
    for t, u, v in zip(ts, us, vs):
        du = np.linalg.norm((u - v) * w)
        if du == 0.0:
            continue
        df = np.linalg.norm(np.asarray(fn(t, u)) - np.asarray(fn(t, v)))
        worst = max(worst, df / du)
    return 1.25 * worst


def check_H4(model: SpectralModel, forcing: ForcingFunction, d_beta: float,
             L: float, sample_budget: int = 400, seed: int = 0) -> Certificate:
    """Forcing-size hypothesis: sampled sup of ||f|| over the beta-ball.

    Passes when the sampled sup over times and states with beta-norm <= L
    stays below L/(2 d_beta) and the sampled increment ratios stay
    consistent with the declared Lipschitz bound.  Sampling is seeded, so
    certificates are reproducible.
    """
    if not L > 0.0:
        raise ValueError("L must be positive")
    if not d_beta > 0.0:
        raise ValueError("d_beta must be positive")
    rng = np.random.default_rng(seed)
    ts = rng.uniform(-1000.0, 1000.0, size=sample_budget)
    us = _ball_samples(model, L, sample_budget, rng)
    w = model.mode_eigenvalues ** model.beta

    sup_f = 0.0
    witness_t = 0.0
    lip_worst = 0.0
    prev = None
    for t, u in zip(ts, us):
        val = float(np.linalg.norm(np.asarray(forcing(t, u))))
        if val > sup_f:
            sup_f, witness_t = val, float(t)
        if prev is not None:
            t_p, u_p = prev
            du = np.linalg.norm((u - u_p) * w)
            if du > 0.0:
                df = np.linalg.norm(np.asarray(forcing(t, u)) - np.asarray(forcing(t, u_p)))
                lip_worst = max(lip_worst, df / du)
        prev = (t, u)

    bound = L / (2.0 * d_beta)
    lip_consistent = lip_worst <= forcing.lipschitz_bound * (1.0 + 1e-7) + 1e-14
    return Certificate(
        name="H4",
        passed=(sup_f <= bound * (1.0 + 1e-12)) and lip_consistent,
        value=sup_f,
        bound=bound,
        description="sampled sup of ||f|| over the beta-ball vs L/(2 d_beta)",
        details={
            "forcing": forcing.name,
            "L": float(L),
            "d_beta": float(d_beta),
            "witness_t": witness_t,
            "sampled_lipschitz": lip_worst,
            "declared_lipschitz": float(forcing.lipschitz_bound),
            "lipschitz_consistent": bool(lip_consistent),
            "sample_budget": int(sample_budget),
            "seed": int(seed),
        },
    )
