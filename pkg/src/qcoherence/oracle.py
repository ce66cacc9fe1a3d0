"""Independent reference computations.

Group elements represent the unitary ``e^{i phase} D(disp) e^{-i rot a^+a}``
with ``D(z) = exp(z a^+ - conj(z) a)``. In this ordering

    D(x) e^{-i r n} = e^{-i r n} D(x e^{i r})        (rotation transport)
    D(x) D(y) = e^{i Im(x conj(y))} D(x + y)

so ``compose(a, b)`` (the operator product a*b, b acting first) is

    phase = a.phase + b.phase + Im(a.disp * conj(b.disp e^{-i a.rot}))
    disp  = a.disp + b.disp e^{-i a.rot}
    rot   = a.rot + b.rot

and ``<0|g|0> = e^{i phase} e^{-|disp|^2 / 2}``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .core_model import (
    ConvergenceError,
    DomainError,
    FockState2,
    MeasurementVector,
    ModePair,
    ReservoirMode,
    check_times,
)
from .propagator import OPERATOR_STRING

DEFAULT_DIM_CAP = 1024


@dataclass(frozen=True)
class GroupElement:
    phase: float = 0.0
    disp: complex = 0j
    rot: float = 0.0

    def inverse(self) -> "GroupElement":
        return GroupElement(-self.phase, -self.disp * cmath.exp(1j * self.rot), -self.rot)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)


IDENTITY = GroupElement()


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    moved = b.disp * cmath.exp(-1j * a.rot)
    area = (a.disp * moved.conjugate()).imag
    return GroupElement(a.phase + b.phase + area, a.disp + moved, a.rot + b.rot)


def displaced_evolution_element(omega: float, lam: float, tau: float) -> GroupElement:
    """Exact form of ``exp(-i (omega a^+a + lam (a^+ + a)) tau)``.

    With ``mu = lam/omega`` the generator is ``omega b^+b - lam^2/omega`` for
    ``b = a + mu = D(mu)^+ a D(mu)``, hence
    ``e^{i lam^2 tau/omega} D(-mu) e^{-i omega tau n} D(mu)``.
    """
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    mu = lam / omega
    theta = omega * tau
    phase = lam * lam * tau / omega - mu * mu * math.sin(theta)
    return GroupElement(phase, mu * (cmath.exp(-1j * theta) - 1), theta)


def vacuum_expectation(e: GroupElement) -> complex:
    return cmath.exp(complex(-0.5 * abs(e.disp) ** 2, e.phase))


def operator_string_elements(mode: ReservoirMode, t: float, t_prime: float) -> list[GroupElement]:
    """The six factors of F_j, rightmost (first acting) first."""
    out = []
    for (m, n), sign, which in OPERATOR_STRING:
        tau = t if which == "t" else t_prime
        g = displaced_evolution_element(mode.omega, mode.coupling(m, n), tau)
        out.append(g if sign > 0 else g.inverse())
    return out


def factor_oracle_group(mode: ReservoirMode, t: float, t_prime: float) -> complex:
    total = IDENTITY
    for g in operator_string_elements(mode, t, t_prime):
        total = compose(g, total)
    return vacuum_expectation(total)


# --------------------------------------------------------------------------
# truncated Fock space


@dataclass(frozen=True)
class FockMatrixConfig:
    dim: int = 32
    tol: float = 1e-12
    cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError(f"dim must be >= 2, got {self.dim}")
        if self.dim > self.cap:
            raise DomainError(f"dim {self.dim} exceeds cap {self.cap}")
        if not self.tol > 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")


def _eig_displaced(omega: float, lam: float, dim: int):
    n = np.arange(dim, dtype=float)
    off = lam * np.sqrt(n[1:])
    return eigh_tridiagonal(omega * n, off)


def _factor_fock(mode: ReservoirMode, t: float, t_prime: float, dim: int) -> complex:
    eig = {}
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    for (m, n), sign, which in OPERATOR_STRING:
        lam = mode.coupling(m, n)
        if lam not in eig:
            eig[lam] = _eig_displaced(mode.omega, lam, dim)
        w, Q = eig[lam]
        tau = t if which == "t" else t_prime
        v = Q @ (np.exp(-1j * sign * w * tau) * (Q.T @ v))
    return complex(v[0])


def _converge(fn, cfg: FockMatrixConfig, what: str):
    dim = cfg.dim
    prev = fn(dim)
    while True:
        nxt = 2 * dim
        if nxt > cfg.cap:
            raise ConvergenceError(f"{what} not converged to {cfg.tol} at dim {dim}")
        cur = fn(nxt)
        if np.max(np.abs(np.asarray(cur) - np.asarray(prev))) < cfg.tol:
            return cur
        prev, dim = cur, nxt


def factor_oracle_fock(mode: ReservoirMode, t: float, t_prime: float,
                       cfg: FockMatrixConfig = FockMatrixConfig()) -> complex:
    """F_j from dense propagation of the vacuum in a truncated Fock basis.

    The dimension doubles until two successive values differ by less than
    ``cfg.tol``.
    """
    return _converge(lambda d: _factor_fock(mode, t, t_prime, d), cfg, "factor_oracle_fock")


def _lowering(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def two_mode_operator_oracle(initial: FockState2, times: Sequence[float],
                             meas: MeasurementVector, modes: ModePair) -> complex:
    """``<0,0| phi(t_n) ... phi(t_1) |n_V, n_H>`` with explicit matrices."""
    times = check_times(times, initial.total)
    dV, dH = initial.n_V + 1, initial.n_H + 1
    bV = np.kron(_lowering(dV), np.eye(dH))
    bH = np.kron(np.eye(dV), _lowering(dH))
    psi = np.zeros(dV * dH, dtype=complex)
    psi[initial.n_V * dH + initial.n_H] = 1.0
    for t in times:
        phi = (meas.c_V * cmath.exp(-1j * modes.omega_V * t) * bV
               + meas.c_H * cmath.exp(-1j * modes.omega_H * t) * bH)
        psi = phi @ psi
    return complex(psi[0])


def _two_time_state(mode: ReservoirMode, t: float, t_prime: float, omega_V: float,
                    meas: MeasurementVector, dim: int) -> np.ndarray:
    """``B(t') B(t) |1_V, 1_H> |0>`` on the space (n_V<=1) x (n_H<=1) x dim."""
    a = _lowering(dim)
    a2 = _lowering(2)
    I2 = np.eye(2)
    Id = np.eye(dim)
    bV = np.kron(np.kron(a2, I2), Id)
    bH = np.kron(np.kron(I2, a2), Id)
    nV = bV.T @ bV
    nH = bH.T @ bH
    A = np.kron(np.eye(4), a)
    V = mode.omega * (A.T @ A) + (mode.d_V * nV + mode.d_H * nH) @ (A + A.T)
    w, Q = eigh(V)

    def evolve(s):
        return (Q * np.exp(-1j * w * s)) @ Q.T

    def B(s):
        phi = meas.c_H * bH + meas.c_V * cmath.exp(-1j * omega_V * s) * bV
        return evolve(-s) @ phi @ evolve(s)

    psi0 = np.zeros(4 * dim, dtype=complex)
    psi0[(1 * 2 + 1) * dim] = 1.0
    return B(t_prime) @ (B(t) @ psi0)


def parseval_check(reservoir_mode: ReservoirMode, t: float, t_prime: float,
                   cfg: FockMatrixConfig = FockMatrixConfig(dim=16, tol=1e-10, cap=512),
                   omega_V: float = 1.0,
                   meas: MeasurementVector | None = None) -> tuple[float, float]:
    """Norm of the two-time state vector vs. the sum over reservoir Fock states.

    lhs = <psi_B|psi_B> on the full truncated joint space; rhs = sum over
    reservoir basis states beta of |<0,0,beta|psi_B>|^2.
    """
    if meas is None:
        meas = MeasurementVector(1 / math.sqrt(2), 1 / math.sqrt(2))

    def both(dim):
        psi = _two_time_state(reservoir_mode, t, t_prime, omega_V, meas, dim)
        lhs = float(np.vdot(psi, psi).real)
        rhs = float(sum(abs(psi[beta]) ** 2 for beta in range(dim)))
        return np.array([lhs, rhs])

    lhs, rhs = _converge(both, cfg, "parseval_check")
    return float(lhs), float(rhs)
