"""Decoherence factor of the two-mode non-demolition model.

Each reservoir mode j contributes a two-time transition amplitude

    F_j = <0| e^{iV(1,1)t} e^{-iV(0,1)t} e^{iV(0,1)t'} e^{-iV(1,0)t'}
              e^{iV(1,0)t} e^{-iV(1,1)t} |0>,

    V(m, n) = w_j a^+a + (m d_V + n d_H)(a^+ + a).

Read right to left, the string is six steps of constant single-mode
Hamiltonians ``alpha a^+a + beta a^+ + gamma a``. The Wei-Norman ansatz
``u = e^{g1 a^+} e^{g2 a^+a} e^{g3 a} e^{g4}`` gives ``<0|u|0> = e^{g4}``,
and g1, g4 obey a closed linear recursion across steps.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .core_model import DomainError, ReservoirMode, ReservoirSpec

# Sector (m, n) and sign of the exponent for each factor, rightmost first.
# sign=+1 means e^{-iV tau}; sign=-1 means e^{+iV tau}.
OPERATOR_STRING = (
    ((1, 1), +1, "t"),
    ((1, 0), -1, "t"),
    ((1, 0), +1, "t_prime"),
    ((0, 1), -1, "t_prime"),
    ((0, 1), +1, "t"),
    ((1, 1), -1, "t"),
)


@dataclass(frozen=True)
class StepParams:
    alpha: float
    beta: float
    gamma: float
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise DomainError(f"step duration must be >= 0, got {self.duration}")
        if self.alpha == 0 and self.duration > 0:
            raise DomainError("alpha = 0 with positive duration")


@dataclass(frozen=True)
class DecoherenceExponent:
    """``g4 = -R + i*Omega``; the mode's factor is ``exp(g4)``."""

    g4: complex

    @property
    def R(self) -> float:
        return -self.g4.real

    @property
    def Omega(self) -> float:
        return self.g4.imag

    @property
    def factor(self) -> complex:
        return cmath.exp(self.g4)


@dataclass(frozen=True)
class DecoherenceResult:
    per_mode: tuple[DecoherenceExponent, ...]
    total_log: complex
    F_modulus: float
    F_phase: float
    F_phase_raw: float
    G: float | None = None

    @property
    def F(self) -> complex:
        return self.F_modulus * cmath.exp(1j * self.F_phase)


def _check_times(t: float, t_prime: float):
    if t < 0 or t_prime < 0:
        raise DomainError(f"times must be >= 0, got t={t}, t_prime={t_prime}")


def step_params(step_index: int, t: float, t_prime: float, mode: ReservoirMode) -> StepParams:
    """Coefficients of step 1..6, derived from the operator string."""
    if not 1 <= step_index <= 6:
        raise DomainError(f"step_index must be in 1..6, got {step_index}")
    _check_times(t, t_prime)
    (m, n), sign, which = OPERATOR_STRING[step_index - 1]
    lam = mode.coupling(m, n)
    tau = t if which == "t" else t_prime
    return StepParams(sign * mode.omega, sign * lam, sign * lam, tau)


def all_step_params(mode: ReservoirMode, t: float, t_prime: float) -> list[StepParams]:
    return [step_params(k, t, t_prime, mode) for k in range(1, 7)]


def flipped_step_params(mode: ReservoirMode, t: float, t_prime: float) -> list[StepParams]:
    """Negative control: step 2 with +d_V couplings and step 6 with +omega."""
    steps = all_step_params(mode, t, t_prime)
    s2, s6 = steps[1], steps[5]
    steps[1] = StepParams(s2.alpha, -s2.beta, -s2.gamma, s2.duration)
    steps[5] = StepParams(-s6.alpha, s6.beta, s6.gamma, s6.duration)
    return steps


def iterate_steps(steps) -> complex:
    """Run the g1/g4 recursion over ``steps`` from g1 = g4 = 0; return g4."""
    g1 = 0j
    g4 = 0j
    for s in steps:
        if s.duration == 0:
            continue
        a, b, c, T = s.alpha, s.beta, s.gamma, s.duration
        if a == 0:
            raise DomainError("alpha = 0 with positive duration")
        rot = cmath.exp(-1j * a * T)
        shifted = g1 + b / a
        g4 = g4 + (c / a) * shifted * (rot - 1) + 1j * b * c * T / a
        g1 = shifted * rot - b / a
    return g4


def wei_norman_iterate(mode: ReservoirMode, t: float, t_prime: float) -> DecoherenceExponent:
    return DecoherenceExponent(iterate_steps(all_step_params(mode, t, t_prime)))


def g4_closed_form(mode: ReservoirMode, t: float, t_prime: float) -> DecoherenceExponent:
    w, dV, dH = mode.omega, mode.d_V, mode.d_H
    x = w * (t_prime - t)
    R = 2 / w**2 * (dH - dV) ** 2 * math.sin(x / 2) ** 2
    Omega = (dV**2 - dH**2) / w**2 * (
        x + 2 * (1 - math.cos(x)) * math.sin(w * t) + (1 - 2 * math.cos(w * t)) * math.sin(x))
    return DecoherenceExponent(complex(-R, Omega))


def reduce_phase(phi: float) -> float:
    """Map to (-pi, pi]."""
    r = math.remainder(phi, 2 * math.pi)
    return math.pi if r == -math.pi else r


def decoherence_product(reservoir: ReservoirSpec, t: float, t_prime: float,
                        method: str = "iteration") -> DecoherenceResult:
    """Aggregate factor F = prod_j F_j, accumulated as a sum of exponents."""
    per_mode_fn = {"iteration": wei_norman_iterate, "closed": g4_closed_form}[method]
    per_mode = tuple(per_mode_fn(m, t, t_prime) for m in reservoir)
    # fixed ascending-index reduction for bit-reproducibility
    re = 0.0
    im = 0.0
    for e in per_mode:
        re += e.g4.real
        im += e.g4.imag
    return DecoherenceResult(per_mode, complex(re, im), math.exp(re), reduce_phase(im), im)


def coherence_term(omega_V: float, t: float, t_prime: float, total_log: complex) -> float:
    """Re(e^{i w_V (t - t')} F), computed as |F| cos(phase) without forming F."""
    return math.exp(total_log.real) * math.cos(omega_V * (t - t_prime) + total_log.imag)


def g2_model(reservoir: ReservoirSpec, omega_V: float, t: float, t_prime: float,
             method: str = "iteration") -> DecoherenceResult:
    """G(t, t') = (1 + Re(e^{i w_V (t - t')} F)) / 2 for c_V = c_H = 1/sqrt(2).

    The real part is required for the empty reservoir to reproduce the free
    two-mode law (1 + cos[w_V (t' - t)]) / 2.
    """
    if not math.isfinite(omega_V) or omega_V < 0:
        raise DomainError(f"omega_V must be finite and >= 0, got {omega_V}")
    res = decoherence_product(reservoir, t, t_prime, method)
    G = 0.5 * (1 + coherence_term(omega_V, t, t_prime, res.total_log))
    if not -1e-12 <= G <= 1 + 1e-12:
        raise ArithmeticError(f"G = {G} outside [0, 1]")
    return DecoherenceResult(res.per_mode, res.total_log, res.F_modulus,
                             res.F_phase, res.F_phase_raw, G)
