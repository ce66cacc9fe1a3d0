"""Command-line front end.

Parameters come from an optional ``key=value`` config file (``#`` starts a
comment) and are overridden by flags. Exit codes: 0 success, 1 numerical or
verification failure, 2 usage/config error.
"""
from __future__ import annotations

import argparse
import io
import math
import os
import sys
import tempfile

from .core_model import (
    ConvergenceError,
    FockState2,
    MeasurementVector,
    ModelError,
    ModePair,
    ReservoirSpec,
    validate_reservoir,
)
from .experiment import (
    DEFAULT_DT_MAX,
    DEFAULT_POINTS,
    SamplingRanges,
    dt_grid,
    envelope,
    sample_reservoir,
    scaling_study,
    scan_g2,
)
from .multipath import effective_wavefunction, enumerate_paths, path_to_str
from .oracle import factor_oracle_group
from .propagator import g2_model
from .verify import run_verification

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    def __init__(self, key: str, msg: str):
        super().__init__(f"config field {key!r}: {msg}")
        self.key = key


def fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def read_config(path: str | None) -> dict[str, str]:
    cfg: dict[str, str] = {}
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key] = value
    return cfg


class Params:
    """Typed lookup over the merged config dict; errors name the field."""

    def __init__(self, values: dict[str, str]):
        self.values = values

    def _get(self, key, default, conv):
        if key not in self.values:
            return default
        try:
            return conv(self.values[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, f"cannot parse {self.values[key]!r} ({exc})") from None

    def float(self, key, default=None) -> float:
        def conv(s):
            x = float(s)
            if not math.isfinite(x):
                raise ValueError("not finite")
            return x
        return self._get(key, default, conv)

    def int(self, key, default=None) -> int:
        return self._get(key, default, int)

    def complex(self, key, default=None) -> complex:
        return self._get(key, default, lambda s: complex(s.replace(" ", "")))

    def bool(self, key, default=False) -> bool:
        def conv(s):
            s = s.lower()
            if s in ("1", "true", "yes", "on"):
                return True
            if s in ("0", "false", "no", "off"):
                return False
            raise ValueError("expected true/false")
        return self._get(key, default, conv)

    def str(self, key, default=None) -> str:
        return self.values.get(key, default)

    def floats(self, key, default=None) -> list[float]:
        return self._get(key, default, lambda s: [float(x) for x in s.replace(";", ",").split(",") if x.strip()])

    def ints(self, key, default=None) -> list[int]:
        return self._get(key, default, lambda s: [int(x) for x in s.split(",") if x.strip()])

    def rows(self, key) -> list[list[float]] | None:
        return self._get(key, None, lambda s: [[float(x) for x in row.split(",")]
                                               for row in s.split(";") if row.strip()])


def write_text(path: str, text: str):
    """Write ``text`` to ``path`` atomically, or to stdout for ``-``."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _measurement(p: Params) -> MeasurementVector:
    c = 1 / math.sqrt(2)
    try:
        return MeasurementVector(p.complex("c_V", c), p.complex("c_H", c))
    except ModelError as exc:
        raise ConfigError("c_V/c_H", str(exc)) from None


def _modes(p: Params) -> ModePair:
    try:
        return ModePair(p.float("omega_V", 1.0), p.float("omega_H", 0.0))
    except ModelError as exc:
        raise ConfigError("omega_V/omega_H", str(exc)) from None


def _initial(p: Params) -> FockState2:
    try:
        return FockState2(p.int("n_V", 1), p.int("n_H", 1))
    except ModelError as exc:
        raise ConfigError("n_V/n_H", str(exc)) from None


def _ranges(p: Params) -> SamplingRanges:
    d = SamplingRanges()
    try:
        return SamplingRanges(
            (p.float("omega_lo", d.omega[0]), p.float("omega_hi", d.omega[1])),
            (p.float("d_V_lo", d.d_V[0]), p.float("d_V_hi", d.d_V[1])),
            (p.float("d_H_lo", d.d_H[0]), p.float("d_H_hi", d.d_H[1])))
    except ModelError as exc:
        raise ConfigError("ranges", str(exc)) from None


def read_reservoir_csv(path: str) -> ReservoirSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError("reservoir_file", str(exc)) from None
    if not lines or lines[0].replace(" ", "") != "j,omega,d_V,d_H":
        raise ConfigError("reservoir_file", "expected header j,omega,d_V,d_H")
    triples = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ConfigError("reservoir_file", f"bad row {ln!r}")
        try:
            triples.append(tuple(float(x) for x in parts[1:]))
        except ValueError:
            raise ConfigError("reservoir_file", f"bad row {ln!r}") from None
    try:
        return validate_reservoir(triples)
    except ModelError as exc:
        raise ConfigError("reservoir_file", str(exc)) from None


def reservoir_csv(reservoir: ReservoirSpec) -> str:
    return csv_text(["j", "omega", "d_V", "d_H"],
                    ([str(j), m.omega, m.d_V, m.d_H] for j, m in enumerate(reservoir, 1)))


def _reservoir(p: Params) -> ReservoirSpec:
    source = p.str("reservoir", "sampled")
    if source == "file" or "reservoir_file" in p.values:
        path = p.str("reservoir_file")
        if not path:
            raise ConfigError("reservoir_file", "required when reservoir=file")
        return read_reservoir_csv(path)
    if source != "sampled":
        raise ConfigError("reservoir", f"expected 'sampled' or 'file', got {source!r}")
    n = p.int("n", 5)
    try:
        return sample_reservoir(n, p.int("seed", 42), _ranges(p))
    except ModelError as exc:
        raise ConfigError("n", str(exc)) from None


def _grid(p: Params):
    try:
        return dt_grid(p.float("dt_max", DEFAULT_DT_MAX), p.int("grid", DEFAULT_POINTS))
    except ModelError as exc:
        raise ConfigError("grid/dt_max", str(exc)) from None


# --------------------------------------------------------------------------
# subcommands


def cmd_free_gn(p: Params) -> int:
    init = _initial(p)
    meas, modes = _measurement(p), _modes(p)
    n = init.total
    rows = p.rows("times")
    if rows is None:
        # t_1 = t0, every later time at t0 + dt
        t0 = p.float("t0", 0.0)
        rows = [[t0] + [t0 + float(dt)] * (n - 1) if n else [] for dt in _grid(p)]
    for k, r in enumerate(rows):
        if len(r) != n:
            raise ConfigError("times", f"row {k} has {len(r)} entries, expected {n}")
    out = []
    for r in rows:
        psi = effective_wavefunction(init, r, meas, modes).value
        out.append([*r, abs(psi) ** 2, psi.real, psi.imag])
    header = [f"t{k}" for k in range(1, n + 1)] + ["G", "psi_re", "psi_im"]
    write_text(p.str("out", "-"), csv_text(header, out))
    return EXIT_OK


def cmd_paths(p: Params) -> int:
    init = _initial(p)
    meas, modes = _measurement(p), _modes(p)
    times = p.floats("times", [0.0] * init.total)
    if len(times) != init.total:
        raise ConfigError("times", f"expected {init.total} entries, got {len(times)}")
    wf = effective_wavefunction(init, times, meas, modes)
    if p.bool("csv"):
        rows = [[path_to_str(path) or "-", a.real, a.imag, abs(a) ** 2] for path, a in wf.terms]
        rows.append(["total", wf.value.real, wf.value.imag, wf.intensity])
        text = csv_text(["path", "amp_re", "amp_im", "abs2"], rows)
    else:
        lines = [f"{path_to_str(path) or '(empty)':>14}  {a.real:+.12f}{a.imag:+.12f}j"
                 for path, a in wf.terms]
        lines.append(f"{'total':>14}  {wf.value.real:+.12f}{wf.value.imag:+.12f}j"
                     f"   |Psi|^2 = {wf.intensity:.12g}")
        lines.append(f"{len(enumerate_paths(init))} paths")
        text = "\n".join(lines) + "\n"
    write_text(p.str("out", "-"), text)
    return EXIT_OK


def cmd_decoherence_scan(p: Params) -> int:
    reservoir = _reservoir(p)
    omega_V = p.float("omega_V", 1.0)
    t_fixed = p.float("t_fixed", 0.0)
    if omega_V < 0:
        raise ConfigError("omega_V", "must be >= 0")
    if t_fixed < 0:
        raise ConfigError("t_fixed", "must be >= 0")
    grid = _grid(p)
    check = p.bool("check_oracles")
    tol = p.float("tol", 1e-8)
    curve = scan_g2(reservoir, omega_V, t_fixed, float(grid[-1]), len(grid))
    rows = []
    worst = 0.0
    for pt in curve.points:
        env = envelope(reservoir, pt.dt)
        rows.append([pt.dt, pt.G, pt.F_modulus, pt.F_phase, 0.5 * (1 + env), 0.5 * (1 - env)])
        if check:
            F_group = 1 + 0j
            for m in reservoir:
                F_group *= factor_oracle_group(m, t_fixed, t_fixed + pt.dt)
            G_group = 0.5 * (1 + (F_group * complex(math.cos(omega_V * pt.dt),
                                                    -math.sin(omega_V * pt.dt))).real)
            worst = max(worst, abs(G_group - pt.G), abs(abs(F_group) - pt.F_modulus))
    out = p.str("out", "-")
    write_text(out, csv_text(["dt", "G", "F_modulus", "F_phase", "envelope_hi", "envelope_lo"], rows))
    sidecar = p.str("reservoir_out") or (None if out == "-" else out + ".reservoir.csv")
    if sidecar:
        write_text(sidecar, reservoir_csv(reservoir))
    else:
        print("note: no reservoir sidecar written (set reservoir_out or --out)", file=sys.stderr)
    if check:
        status = "ok" if worst <= tol else "FAILED"
        print(f"oracle cross-check {status}: max |dev| = {worst:.3e} (tol {tol:.0e})", file=sys.stderr)
        if worst > tol:
            return EXIT_NUMERIC
    return EXIT_OK


def cmd_scaling(p: Params) -> int:
    Ns = p.ints("Ns", [5, 10])
    grid = _grid(p)
    try:
        rows = scaling_study(Ns, p.int("seed", 42), _ranges(p), p.float("omega_V", 1.0),
                             p.float("t_fixed", 0.0), float(grid[-1]), len(grid))
    except ModelError as exc:
        raise ConfigError("Ns", str(exc)) from None
    text = csv_text(["N", "min_envelope", "first_crossing"],
                    ([str(r.N), r.min_envelope, r.first_crossing] for r in rows))
    write_text(p.str("out", "-"), text)
    return EXIT_OK


def cmd_verify(p: Params) -> int:
    report = run_verification(draws=p.int("draws", 100), seed=p.int("seed", 0),
                              tol=p.float("tol", 1e-8), ranges=_ranges(p),
                              flip_steps=p.bool("flip_steps"))
    text = "\n".join(report.lines()) + "\n"
    text += ("verify: all checks passed\n" if report.ok
             else f"verify: {sum(not c.ok for c in report.checks)} check(s) failed\n")
    write_text(p.str("out", "-"), text)
    return EXIT_OK if report.ok else EXIT_NUMERIC


COMMANDS = {
    "free-gn": cmd_free_gn,
    "paths": cmd_paths,
    "decoherence-scan": cmd_decoherence_scan,
    "scaling": cmd_scaling,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcoherence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path, '-' for stdout")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--grid", type=int, help="number of dt grid points")
        sp.add_argument("--dt-max", type=float)
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config field (repeatable)")
        if name == "paths":
            sp.add_argument("--csv", action="store_true")
        if name == "decoherence-scan":
            sp.add_argument("--check-oracles", action="store_true")
        if name == "verify":
            sp.add_argument("--flip-steps", action="store_true",
                            help="debug: use a sign-flipped step table (must fail)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        values = read_config(args.config)
        for item in args.set:
            if "=" not in item:
                raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            values[k.strip()] = v.strip()
        flags = {"seed": args.seed, "out": args.out, "tol": args.tol,
                 "grid": args.grid, "dt_max": args.dt_max}
        for k, v in flags.items():
            if v is not None:
                values[k] = str(v)
        for k in ("csv", "check_oracles", "flip_steps"):
            if getattr(args, k, False):
                values[k] = "true"
        return COMMANDS[args.command](Params(values))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
