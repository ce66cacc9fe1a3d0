"""Random reservoirs and G(t, t') scans over the delay t' - t."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core_model import DomainError, ReservoirMode, ReservoirSpec, SizeError
from .propagator import coherence_term, decoherence_product, g4_closed_form

MAX_MODES = 100_000
CROSSING_LEVEL = 0.5
DEFAULT_DT_MAX = 20.0
DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class SamplingRanges:
    omega: tuple[float, float] = (0.5, 1.5)
    d_V: tuple[float, float] = (0.8, 1.0)
    d_H: tuple[float, float] = (0.2, 0.4)

    def __post_init__(self):
        for name in ("omega", "d_V", "d_H"):
            lo, hi = (float(x) for x in getattr(self, name))
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise DomainError(f"{name} range must satisfy lo < hi, got ({lo}, {hi})")
            object.__setattr__(self, name, (lo, hi))
        if self.omega[0] <= 0:
            raise DomainError("omega range must be strictly positive")


DEFAULT_RANGES = SamplingRanges()


@dataclass(frozen=True)
class CurvePoint:
    dt: float
    G: float
    F_modulus: float
    F_phase: float


@dataclass(frozen=True)
class CorrelationCurve:
    t_fixed: float
    points: tuple[CurvePoint, ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def _uniform(u: float, lo: float, hi: float) -> float:
    x = lo + (hi - lo) * u
    # guard the half-open interval against rounding up to hi
    return x if x < hi else float(np.nextafter(hi, lo))


def sample_reservoir(n: int, seed: int, ranges: SamplingRanges = DEFAULT_RANGES) -> ReservoirSpec:
    """Draw ``n`` modes from numpy's PCG64 stream seeded with ``seed``.

    Each mode consumes three consecutive doubles in the order (omega, d_V,
    d_H), so the first k modes of any larger draw with the same seed are
    identical to a draw of size k.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > MAX_MODES:
        raise SizeError(f"n = {n} exceeds cap {MAX_MODES}")
    rng = np.random.Generator(np.random.PCG64(int(seed) % 2**64))
    u = rng.random(3 * n).reshape(n, 3)
    modes = tuple(
        ReservoirMode(_uniform(a, *ranges.omega), _uniform(b, *ranges.d_V), _uniform(c, *ranges.d_H))
        for a, b, c in u)
    return ReservoirSpec(modes)


def dt_grid(dt_max: float = DEFAULT_DT_MAX, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    if not dt_max > 0:
        raise DomainError(f"dt_max must be > 0, got {dt_max}")
    return np.linspace(0.0, dt_max, n_points)


def scan_g2(reservoir: ReservoirSpec, omega_V: float, t_fixed: float,
            dt_max: float = DEFAULT_DT_MAX, n_points: int = DEFAULT_POINTS) -> CorrelationCurve:
    """G at t = t_fixed, t' = t_fixed + dt on a uniform dt grid."""
    if omega_V < 0:
        raise DomainError(f"omega_V must be >= 0, got {omega_V}")
    points = []
    for dt in dt_grid(dt_max, n_points):
        t, tp = t_fixed, t_fixed + float(dt)
        res = decoherence_product(reservoir, t, tp)
        G = 0.5 * (1 + coherence_term(omega_V, t, tp, res.total_log))
        points.append(CurvePoint(float(dt), G, res.F_modulus, res.F_phase))
    return CorrelationCurve(float(t_fixed), tuple(points))


def total_R(reservoir: ReservoirSpec, dt: float) -> float:
    s = 0.0
    for m in reservoir:
        s += g4_closed_form(m, 0.0, dt).R
    return s


def envelope(reservoir: ReservoirSpec, dt: float) -> float:
    """|F| = exp(-sum_j R_j(dt)); depends on the delay only."""
    return math.exp(-total_R(reservoir, dt))


@dataclass(frozen=True)
class ScalingRow:
    N: int
    min_envelope: float
    first_crossing: float | None


def scaling_study(Ns: Sequence[int], seed: int, ranges: SamplingRanges = DEFAULT_RANGES,
                  omega_V: float = 1.0, t_fixed: float = 0.0,
                  dt_max: float = DEFAULT_DT_MAX,
                  n_points: int = DEFAULT_POINTS) -> list[ScalingRow]:
    """Minimum envelope and first dt with envelope < 0.5, for nested reservoirs.

    The envelope does not depend on ``omega_V`` or ``t_fixed``; they are
    accepted so a scaling run can share a config with a scan.
    """
    Ns = [int(n) for n in Ns]
    if not Ns:
        raise DomainError("Ns must be non-empty")
    if any(b < a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("Ns must be ascending")
    full = sample_reservoir(Ns[-1], seed, ranges)
    grid = dt_grid(dt_max, n_points)
    rows = []
    for N in Ns:
        res = full[:N]
        env = np.array([envelope(res, float(dt)) for dt in grid])
        below = np.nonzero(env < CROSSING_LEVEL)[0]
        crossing = float(grid[below[0]]) if below.size else None
        rows.append(ScalingRow(N, float(env.min()), crossing))
    return rows

