"""Multi-particle paths and effective multi-time wave functions for two free modes.

A path is the order in which quanta are removed from ``|n_V, n_H>`` by
successive applications of the measuring operator
``phi(t) = c_V e^{-i w_V t} b_V + c_H e^{-i w_H t} b_H``. Step ``k`` happens
at ``times[k]``; the n-th order correlation function is the squared modulus of
the coherent sum over paths.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .core_model import (
    FockState2,
    MeasurementVector,
    ModePair,
    ShapeError,
    check_times,
)

Path = tuple[str, ...]


@dataclass(frozen=True)
class EffectiveWaveFunction:
    value: complex
    terms: tuple[tuple[Path, complex], ...]

    @property
    def intensity(self) -> float:
        return abs(self.value) ** 2


def enumerate_paths(initial: FockState2) -> list[Path]:
    """All distinct V/H interleavings, lexicographic with V < H."""
    n = initial.total
    paths = []
    # combinations() yields index sets in lexicographic order; taking them as
    # the V positions gives paths sorted with V < H.
    for v_pos in combinations(range(n), initial.n_V):
        steps = ["H"] * n
        for k in v_pos:
            steps[k] = "V"
        paths.append(tuple(steps))
    return paths


def path_to_str(path: Path) -> str:
    return "".join(path)


def path_amplitude(path: Sequence[str], times: Sequence[float],
                   meas: MeasurementVector, modes: ModePair,
                   initial: FockState2) -> complex:
    path = tuple(path)
    if len(times) != len(path):
        raise ShapeError(f"path has {len(path)} steps but {len(times)} times given")
    if path.count("V") != initial.n_V or path.count("H") != initial.n_H:
        raise ShapeError(
            f"path {path_to_str(path)!r} inconsistent with |{initial.n_V},{initial.n_H}>")
    left = {"V": initial.n_V, "H": initial.n_H}
    omega = {"V": modes.omega_V, "H": modes.omega_H}
    amp = 1 + 0j
    for label, t in zip(path, times):
        amp *= meas.coeff(label) * cmath.exp(-1j * omega[label] * t) * math.sqrt(left[label])
        left[label] -= 1
    return amp


def effective_wavefunction(initial: FockState2, times: Sequence[float],
                           meas: MeasurementVector, modes: ModePair) -> EffectiveWaveFunction:
    times = check_times(times, initial.total)
    terms = tuple((p, path_amplitude(p, times, meas, modes, initial))
                  for p in enumerate_paths(initial))
    value = sum((a for _, a in terms), 0j)
    return EffectiveWaveFunction(value, terms)


def gn_free(initial: FockState2, times: Sequence[float],
            meas: MeasurementVector, modes: ModePair) -> float:
    """n-th order correlation function of the free field as ``|Psi|^2``."""
    return effective_wavefunction(initial, times, meas, modes).intensity


def g2_free_closed(meas: MeasurementVector, modes: ModePair, t1: float, t2: float) -> float:
    delta = (modes.omega_V - modes.omega_H) * (t2 - t1)
    return 2 * abs(meas.c_V * meas.c_H) ** 2 * (1 + math.cos(delta))


def g3_free_closed(meas: MeasurementVector, modes: ModePair,
                   t1: float, t2: float, t3: float) -> float:
    """Closed form for the initial state |2_V, 1_H>."""
    dw = modes.omega_V - modes.omega_H
    coef = 4 * abs(meas.c_V ** 2 * meas.c_H) ** 2
    return coef * (1.5 + math.cos(dw * (t2 - t1)) + math.cos(dw * (t3 - t1))
                   + math.cos(dw * (t2 - t3)))


def g1_spatial(k: float, r: float) -> float:
    # single photon in (|1_k> + |1_-k>)/sqrt(2), unit field constant
    return math.cos(k * r) ** 2


def g2_spatial_biphoton(k: float, k_prime: float, r1: float, r2: float, E_k: float) -> float:
    return 2 * E_k ** 4 * (1 + math.cos((k - k_prime) * (r1 - r2)))
