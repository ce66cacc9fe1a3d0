"""Cross-validation of every route to the same quantities.

Each check reports its maximum absolute deviation and the parameters at
which it occurred. ``run_verification`` also produces the convention
findings printed by ``qcoherence verify``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_model import DIAGONAL, FockState2, MeasurementVector, ModePair, ReservoirSpec
from .experiment import DEFAULT_RANGES, SamplingRanges, sample_reservoir
from .multipath import effective_wavefunction, g2_free_closed
from .oracle import (
    FockMatrixConfig,
    factor_oracle_fock,
    factor_oracle_group,
    parseval_check,
    two_mode_operator_oracle,
)
from .propagator import (
    all_step_params,
    flipped_step_params,
    g2_model,
    g4_closed_form,
    iterate_steps,
)


@dataclass
class Check:
    name: str
    tol: float
    max_dev: float = 0.0
    worst: str = ""

    def update(self, dev: float, where: str):
        if math.isnan(dev) or dev > self.max_dev:
            self.max_dev, self.worst = dev, where

    @property
    def ok(self) -> bool:
        return self.max_dev < self.tol


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "PASS" if c.ok else "FAIL"
            line = f"{status} {c.name}: max |dev| = {c.max_dev:.3e} (tol {c.tol:.0e})"
            if not c.ok:
                line += f" at {c.worst}"
            out.append(line)
        out.append("")
        out.extend(self.findings)
        return out


def run_verification(draws: int = 100, seed: int = 0, tol: float = 1e-8,
                     ranges: SamplingRanges = DEFAULT_RANGES, t_max: float = 20.0,
                     flip_steps: bool = False, parseval_draws: int = 5) -> Report:
    rng = np.random.Generator(np.random.PCG64(seed))
    modes = sample_reservoir(draws, seed, ranges)
    times = rng.random((draws, 2)) * t_max
    steps_fn = flipped_step_params if flip_steps else all_step_params
    label = "iteration (flipped steps)" if flip_steps else "iteration"

    closed = Check(f"{label} vs closed form, g4", 1e-10)
    it_group = Check(f"{label} vs group oracle, F_j", tol)
    group_fock = Check("group oracle vs Fock oracle, F_j", tol)
    limits = Check("F_j(t,t) = 1 and F_j(d_V=d_H) = 1", 1e-12)
    cfg = FockMatrixConfig(dim=32, tol=min(tol, 1e-10) * 1e-2)
    for m, (t, tp) in zip(modes, times):
        where = f"omega={m.omega!r} d_V={m.d_V!r} d_H={m.d_H!r} t={t!r} t'={tp!r}"
        g4 = iterate_steps(steps_fn(m, t, tp))
        closed.update(abs(g4 - g4_closed_form(m, t, tp).g4), where)
        fg = factor_oracle_group(m, t, tp)
        it_group.update(abs(np.exp(g4) - fg), where)
        group_fock.update(abs(fg - factor_oracle_fock(m, t, tp, cfg)), where)
        same = type(m)(m.omega, m.d_V, m.d_V)
        limits.update(abs(np.exp(iterate_steps(steps_fn(m, t, t))) - 1), where + " (t'=t)")
        limits.update(abs(np.exp(iterate_steps(steps_fn(same, t, tp))) - 1), where + " (d_H=d_V)")

    paths = Check("multipath vs two-mode operator oracle, Psi", 1e-12)
    for total in range(7):
        for n_V in range(total + 1):
            init = FockState2(n_V, total - n_V)
            for _ in range(10):
                ts = list(rng.random(total) * t_max)
                c = rng.normal(size=2) + 1j * rng.normal(size=2)
                c = c / np.linalg.norm(c)
                meas = MeasurementVector(c[0], c[1])
                mp = ModePair(*(rng.random(2) * 2))
                dev = abs(effective_wavefunction(init, ts, meas, mp).value
                          - two_mode_operator_oracle(init, ts, meas, mp))
                paths.update(dev, f"state=({init.n_V},{init.n_H}) times={ts}")

    free = Check("empty-reservoir G vs free two-mode G2 (Re convention)", 1e-12)
    empty = ReservoirSpec()
    for dt in np.linspace(0, t_max, 100):
        t = float(rng.random() * t_max)
        g_model = g2_model(empty, 1.0, t, t + dt).G
        g_free = g2_free_closed(DIAGONAL, ModePair(1.0, 0.0), t, t + dt)
        free.update(abs(g_model - g_free), f"t={t} dt={dt}")

    parseval = Check("joint-space norm vs reservoir-basis sum (Parseval)", 1e-10)
    joint_vs_re = Check("joint-space norm vs factorized G with Re", 1e-8)
    joint_vs_im = 0.0
    for m, (t, tp) in list(zip(modes, times))[:parseval_draws]:
        lhs, rhs = parseval_check(m, t, tp)
        where = f"omega={m.omega!r} d_V={m.d_V!r} d_H={m.d_H!r} t={t!r} t'={tp!r}"
        parseval.update(abs(lhs - rhs), where)
        res = g2_model(ReservoirSpec((m,)), 1.0, t, tp)
        joint_vs_re.update(abs(lhs - res.G), where)
        im_G = 0.5 * (1 + (np.exp(1j * (t - tp)) * res.F).imag)
        joint_vs_im = max(joint_vs_im, abs(lhs - im_G))

    report = Report([closed, it_group, group_fock, limits, paths, free, parseval, joint_vs_re])

    im_at_zero = 0.5 * (1 + (np.exp(0j) * 1.0).imag)
    report.findings += [
        "Convention findings:",
        "- G = (1 + Re(e^{i w_V (t-t')} prod F_j)) / 2 selected. With an empty reservoir "
        f"and t'=t the Re form gives 1 = free G2, the Im form gives {im_at_zero}.",
        f"  Direct joint-space norm of B(t')B(t)|1,1>|0> matches Re to {joint_vs_re.max_dev:.1e}; "
        f"the Im form misses by up to {joint_vs_im:.2e}.",
        "- Re(e^{i w_V (t-t')} F) = |F| cos[w_V (t-t') + Omega] (no extra factor 1/2).",
    ]
    flipped = max(abs(np.exp(iterate_steps(flipped_step_params(m, t, tp))) - factor_oracle_group(m, t, tp))
                  for m, (t, tp) in list(zip(modes, times))[:20])
    report.findings += [
        "- Step coefficients follow the operator string: step 2 is e^{+iV(1,0)t} "
        "(alpha=-w, beta=gamma=-d_V); step 6 is e^{+iV(1,1)t} (alpha=-w, beta=gamma=-(d_V+d_H)).",
        f"  Flipping those signs deviates from the group oracle by up to {flipped:.2e}.",
        f"- The closed form for g4 agrees with the corrected iteration to {closed.max_dev:.1e}"
        if not flip_steps else "- Closed-form comparison ran against the flipped step table.",
    ]
    return report
