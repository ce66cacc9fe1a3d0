"""Shared value types: measurement vectors, Fock inputs, reservoir modes.

All quantities are dimensionless with hbar = 1. Complex amplitudes are plain
Python ``complex`` values; constructors reject NaN/Inf.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

NORM_TOL = 1e-12
MAX_OCCUPATION = 12


class ModelError(ValueError):
    """Base class for invalid model inputs."""


class NormalizationError(ModelError):
    pass


class DomainError(ModelError):
    pass


class SizeError(ModelError):
    pass


class ShapeError(ModelError):
    pass


class ConvergenceError(RuntimeError):
    pass


def as_amp(z, name: str = "amplitude") -> complex:
    """Coerce ``z`` to a finite complex number."""
    z = complex(z)
    if not cmath.isfinite(z):
        raise DomainError(f"{name} must be finite, got {z!r}")
    return z


def _finite(x, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class ModePair:
    omega_V: float
    omega_H: float

    def __post_init__(self):
        for name in ("omega_V", "omega_H"):
            v = _finite(getattr(self, name), name)
            if v < 0:
                raise DomainError(f"{name} must be >= 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class MeasurementVector:
    """Coefficients (c_V, c_H) of the measuring operator c_V b_V + c_H b_H."""

    c_V: complex
    c_H: complex

    def __post_init__(self):
        c_V = as_amp(self.c_V, "c_V")
        c_H = as_amp(self.c_H, "c_H")
        norm = abs(c_V) ** 2 + abs(c_H) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(
                f"|c_V|^2 + |c_H|^2 = {norm!r}, expected 1 within {NORM_TOL}")
        object.__setattr__(self, "c_V", c_V)
        object.__setattr__(self, "c_H", c_H)

    def coeff(self, label: str) -> complex:
        return self.c_V if label == "V" else self.c_H


def make_measurement(c_V, c_H) -> MeasurementVector:
    return MeasurementVector(c_V, c_H)


DIAGONAL = MeasurementVector(1 / math.sqrt(2), 1 / math.sqrt(2))


@dataclass(frozen=True)
class FockState2:
    n_V: int
    n_H: int
    max_total: int = MAX_OCCUPATION

    def __post_init__(self):
        for name in ("n_V", "n_H"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.total > self.max_total:
            raise SizeError(
                f"total occupation {self.total} exceeds maximum {self.max_total}")

    @property
    def total(self) -> int:
        return self.n_V + self.n_H


@dataclass(frozen=True)
class ReservoirMode:
    omega: float
    d_V: float
    d_H: float

    def __post_init__(self):
        for name in ("omega", "d_V", "d_H"):
            object.__setattr__(self, name, _finite(getattr(self, name), name))
        if self.omega <= 0:
            raise DomainError(f"omega must be > 0, got {self.omega}")

    def coupling(self, m: int, n: int) -> float:
        """Driving strength m*d_V + n*d_H felt by the mode in sector (m, n)."""
        return m * self.d_V + n * self.d_H


@dataclass(frozen=True)
class ReservoirSpec:
    modes: tuple[ReservoirMode, ...] = ()

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return ReservoirSpec(self.modes[idx])
        return self.modes[idx]

    def __add__(self, other: "ReservoirSpec") -> "ReservoirSpec":
        return ReservoirSpec(self.modes + tuple(other.modes))


def validate_reservoir(modes: Iterable) -> ReservoirSpec:
    """Build a ReservoirSpec from modes or ``(omega, d_V, d_H)`` triples.

    Raises DomainError naming the index of the first invalid entry.
    """
    out = []
    for j, m in enumerate(modes):
        try:
            if not isinstance(m, ReservoirMode):
                omega, d_V, d_H = m
                m = ReservoirMode(omega, d_V, d_H)
        except DomainError as exc:
            raise DomainError(f"reservoir mode {j}: {exc}") from None
        except (TypeError, ValueError) as exc:
            raise DomainError(f"reservoir mode {j}: {exc}") from None
        out.append(m)
    return ReservoirSpec(tuple(out))


@dataclass(frozen=True)
class TimePair:
    t: float
    t_prime: float

    def __post_init__(self):
        object.__setattr__(self, "t", _finite(self.t, "t"))
        object.__setattr__(self, "t_prime", _finite(self.t_prime, "t_prime"))


def check_times(times: Sequence[float], n: int) -> list[float]:
    times = [float(x) for x in times]
    if len(times) != n:
        raise ShapeError(f"expected {n} times, got {len(times)}")
    for k, x in enumerate(times):
        _finite(x, f"times[{k}]")
    return times
