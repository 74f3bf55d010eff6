"""Command-line driver: construct digit streams, analyze prefixes, compute
dimension quantities, and run the invariant battery.

Everything is deterministic (there is no randomness anywhere in the tool),
so identical configs produce byte-identical outputs. Text and CSV artifacts
begin with a '#' provenance line carrying a hash of the effective config;
JSON artifacts carry the same provenance as their first key, since JSON has
no comments. Exit status: 0 on success, 1 if a verification check failed,
2 for usage or config errors.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from . import __version__
from .construct import (
    ProbabilityVector,
    block_stream,
    construction_from_config,
    greedy_stream,
    mean_target_stream,
)
from .digits import Base, DigitStream, expand, stream_from_digits
from .entropy import (
    be_dimension,
    neg_entropy_minimum,
    neg_entropy_minimum_grid,
    sweep_csv,
    theta_sweep,
)
from .stats import DEFAULT_CHECKPOINTS, convergence_trace, format_decimal
from .verify import MODULES, report_dict, run_checks

MAX_CONSTRUCT_LENGTH = 10**8
DEFAULT_PRECISION = 12
PRECISION_ENV = "ADICLAB_PRECISION"


class UsageError(Exception):
    """Flag/config validation problem; maps to exit status 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalized parameters of one command invocation.

    Built by merging an optional JSON config file with command-line flags
    (flags win, with a warning on conflicts). Round-trips through
    `to_json_dict`/`from_json_dict`; the config hash in output headers is
    computed from the canonical JSON form.
    """

    command: str
    base: int = 4
    out: str | None = None
    fmt: str | None = None
    tau: str | None = None
    mean: str | None = None
    rational: str | None = None
    length: int | None = None
    schedule: dict | None = None
    columns: dict | None = None
    source: str | None = None
    checkpoints: tuple[int, ...] | None = None
    normality_tol: str | None = None
    theta: str | None = None
    sweep: str | None = None
    oracle: bool = False
    grid_step: str | None = None
    precision: int = DEFAULT_PRECISION
    modules: tuple[str, ...] | None = None

    _KEYMAP = {"fmt": "format", "source": "in"}

    def to_json_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or value == f.default:
                continue
            key = self._KEYMAP.get(f.name, f.name)
            out[key] = list(value) if isinstance(value, tuple) else value
        out["command"] = self.command
        return out

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ExperimentConfig":
        inverse = {v: k for k, v in cls._KEYMAP.items()}
        kwargs = {}
        names = {f.name for f in fields(cls)}
        for key, value in doc.items():
            name = inverse.get(key, key)
            if name not in names:
                raise UsageError(f"unknown config key {key!r}")
            if name in ("checkpoints", "modules") and value is not None:
                value = tuple(value)
            kwargs[name] = value
        return cls(**kwargs)

    def config_hash(self) -> str:
        canon = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class RunArtifact:
    """Where a command wrote its output, and under which config hash."""

    path: Path | None
    fmt: str
    config_hash: str
    sidecar: Path | None = None


def _provenance_line(config_hash: str) -> str:
    return f"# adiclab {__version__} config={config_hash}"


def _provenance_dict(config_hash: str) -> dict:
    return {"tool": "adiclab", "version": __version__, "config_hash": config_hash}


def _parse_fraction(text: str, flag: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{flag}: not a rational number: {text!r} ({exc})")


def _write_artifact(cfg: ExperimentConfig, text: str, header: bool = True) -> RunArtifact:
    h = cfg.config_hash()
    body = (_provenance_line(h) + "\n" + text) if header else text
    if cfg.out is None:
        sys.stdout.write(body)
        return RunArtifact(path=None, fmt=cfg.fmt or "text", config_hash=h)
    path = Path(cfg.out)
    path.write_text(body)
    return RunArtifact(path=path, fmt=cfg.fmt or "text", config_hash=h)


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def _stream_from_config(cfg: ExperimentConfig) -> DigitStream:
    base = Base(cfg.base)
    picks = [flag for flag in ("tau", "mean", "rational") if getattr(cfg, flag) is not None]
    if cfg.schedule is not None or cfg.columns is not None:
        picks.append("blocks")
    if len(picks) != 1:
        raise UsageError(
            "pick exactly one digit source: --tau (greedy), --mean, --rational, "
            f"or a schedule+columns config; got {picks or 'none'}"
        )
    try:
        if cfg.tau is not None:
            tau = ProbabilityVector.parse(cfg.tau)
            if tau.s != base.s:
                raise UsageError(f"--tau has {tau.s} entries but base is {base.s}")
            return greedy_stream(tau, base)
        if cfg.mean is not None:
            return mean_target_stream(_parse_fraction(cfg.mean, "--mean"), base)
        if cfg.rational is not None:
            return expand(_parse_fraction(cfg.rational, "--rational"), base)
        if cfg.schedule is None or cfg.columns is None:
            raise UsageError("block construction needs both 'schedule' and 'columns' in the config")
        columns, spec = construction_from_config({"schedule": cfg.schedule, "columns": cfg.columns})
        return block_stream(columns, spec, base)
    except UsageError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc))


def _digit_chunks(stream: DigitStream, length: int, chunk: int = 1 << 16) -> Iterator[str]:
    it = itertools.islice(stream.iter_digits(), length)
    produced = 0
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        produced += len(block)
        yield "".join(str(d) for d in block)
    if produced < length:
        raise UsageError(f"digit source ended after {produced} digits, wanted {length}")


def cmd_construct(cfg: ExperimentConfig) -> int:
    if cfg.length is None:
        raise UsageError("construct needs --length")
    if not 1 <= cfg.length <= MAX_CONSTRUCT_LENGTH:
        raise UsageError(f"--length must lie in [1, {MAX_CONSTRUCT_LENGTH}], got {cfg.length}")
    if cfg.base > 10:
        raise UsageError("digit text output is defined for bases <= 10 only")
    if cfg.fmt not in (None, "text"):
        raise UsageError(f"construct emits digit text; --format {cfg.fmt} is not applicable")
    stream = _stream_from_config(cfg)
    h = cfg.config_hash()
    if cfg.out is None:
        for chunk in _digit_chunks(stream, cfg.length):
            sys.stdout.write(chunk)
        sys.stdout.write("\n")
        return 0
    path = Path(cfg.out)
    with open(path, "w") as handle:
        handle.write(_provenance_line(h) + "\n")
        for chunk in _digit_chunks(stream, cfg.length):
            handle.write(chunk)
        handle.write("\n")
    sidecar = path.with_name(path.name + ".json")
    sidecar.write_text(
        json.dumps(
            {"provenance": _provenance_dict(h), "config": cfg.to_json_dict()}, indent=2
        )
        + "\n"
    )
    return 0


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _read_digit_file(path: str, base: Base) -> tuple[int, ...]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read digit file: {exc}")
    digits = []
    for line in text.splitlines():
        if line.startswith("#"):
            continue
        for ch in line.strip():
            if not ch.isdigit() or int(ch) >= base.s:
                raise UsageError(f"non-digit character {ch!r} for base {base.s} in {path}")
            digits.append(int(ch))
    if not digits:
        raise UsageError(f"no digits found in {path}")
    return tuple(digits)


def _default_file_checkpoints(length: int) -> tuple[int, ...]:
    points = [10**k for k in range(1, 7) if 10**k < length]
    points.append(length)
    return tuple(points)


def cmd_analyze(cfg: ExperimentConfig) -> int:
    fmt = cfg.fmt or "csv"
    if fmt not in ("csv", "json"):
        raise UsageError(f"analyze supports --format csv or json, got {fmt!r}")
    base = Base(cfg.base)
    if cfg.source is not None:
        inline = [f for f in ("tau", "mean", "rational") if getattr(cfg, f) is not None]
        if inline:
            raise UsageError(f"--in conflicts with inline constructor flag(s) {inline}")
        digits = _read_digit_file(cfg.source, base)
        stream = stream_from_digits(digits, base)
        checkpoints = cfg.checkpoints or _default_file_checkpoints(len(digits))
    else:
        stream = _stream_from_config(cfg)
        checkpoints = cfg.checkpoints or DEFAULT_CHECKPOINTS
    try:
        trace = convergence_trace(stream, checkpoints)
    except ValueError as exc:
        raise UsageError(str(exc))

    normality = None
    if cfg.normality_tol is not None:
        tol = _parse_fraction(cfg.normality_tol, "--normality-tol")
        if tol < 0:
            raise UsageError(f"--normality-tol must be >= 0, got {tol}")
        final = trace.reports[-1]
        target = Fraction(1, base.s)
        deviation = max(abs(f - target) for f in final.freqs)
        normality = {
            "n": final.n,
            "tol": format_decimal(tol, cfg.precision),
            "max_deviation": format_decimal(deviation, cfg.precision),
            "consistent": deviation <= tol,
        }

    if fmt == "json":
        doc = {"provenance": _provenance_dict(cfg.config_hash())}
        doc.update(trace.to_json_dict(cfg.precision))
        if normality is not None:
            doc["normality"] = normality
        _write_artifact(cfg, json.dumps(doc, indent=2) + "\n", header=False)
    else:
        text = trace.to_csv(cfg.precision)
        if normality is not None:
            verdict = "consistent" if normality["consistent"] else "inconsistent"
            text += (
                f"# normality: {verdict} max_deviation={normality['max_deviation']}"
                f" tol={normality['tol']}\n"
            )
        _write_artifact(cfg, text)
    return 0


# ---------------------------------------------------------------------------
# dimension
# ---------------------------------------------------------------------------


def _parse_sweep(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--sweep wants start:stop:step, got {text!r}")
    start, stop, step = (_parse_fraction(p, "--sweep") for p in parts)
    if step <= 0 or stop < start:
        raise UsageError(f"--sweep needs step > 0 and stop >= start, got {text!r}")
    thetas = []
    value = start
    while value <= stop:
        thetas.append(float(value))
        value += step
    return thetas


def cmd_dimension(cfg: ExperimentConfig) -> int:
    base = Base(cfg.base)
    picks = [flag for flag in ("tau", "theta", "sweep") if getattr(cfg, flag) is not None]
    if len(picks) != 1:
        raise UsageError(f"pick exactly one of --tau, --theta, --sweep; got {picks or 'none'}")
    if cfg.oracle and cfg.theta is None:
        raise UsageError("--oracle needs --theta (the grid oracle scans one mean slice)")

    if cfg.sweep is not None:
        thetas = _parse_sweep(cfg.sweep)
        try:
            results = theta_sweep(thetas, base)
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"--sweep: {exc}")
        _write_artifact(cfg, sweep_csv(results, cfg.precision))
        return 0

    doc: dict = {"provenance": _provenance_dict(cfg.config_hash())}
    if cfg.tau is not None:
        try:
            tau = ProbabilityVector.parse(cfg.tau)
            value = be_dimension(tau.entries, base)
        except ValueError as exc:
            raise UsageError(f"--tau: {exc}")
        doc.update({"tau": tau.as_strings(), "dimension": value})
    else:
        theta = _parse_fraction(cfg.theta, "--theta")
        try:
            result = neg_entropy_minimum(float(theta), base)
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"--theta: {exc}")
        doc.update(result.to_json_dict())
        if cfg.oracle:
            step = float(_parse_fraction(cfg.grid_step, "--grid-step")) if cfg.grid_step else 1e-3
            try:
                grid = neg_entropy_minimum_grid(float(theta), base, step)
            except (ValueError, ArithmeticError) as exc:
                raise UsageError(f"--oracle: {exc}")
            doc["oracle"] = {
                "step": grid.step,
                "m": grid.m_value,
                "argmin": list(grid.argmin),
                "difference": result.m_value - grid.m_value,
            }
    _write_artifact(cfg, json.dumps(doc, indent=2) + "\n", header=False)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(cfg: ExperimentConfig) -> int:
    if cfg.fmt not in (None, "json"):
        raise UsageError(f"verify reports are JSON; --format {cfg.fmt} is not applicable")
    try:
        results = run_checks(cfg.modules)
    except ValueError as exc:
        raise UsageError(str(exc))
    doc = {"provenance": _provenance_dict(cfg.config_hash())}
    doc["modules"] = list(cfg.modules) if cfg.modules else list(MODULES)
    doc.update(report_dict(results))
    _write_artifact(cfg, json.dumps(doc, indent=2) + "\n", header=False)
    return 0 if doc["failed"] == 0 else 1


# ---------------------------------------------------------------------------
# argument parsing and config merging
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiclab",
        description="Digit statistics, constructive digit streams, and "
        "entropy-based dimension bounds for base-s expansions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--base", type=int, default=None, help="radix (default 4)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json", "text"), default=None)
        p.add_argument("--config", default=None, help="JSON config file; flags win on conflict")

    c = sub.add_parser("construct", help="write a digit prefix from a named constructor")
    common(c)
    c.add_argument("--tau", default=None, help="greedy construction, e.g. 1/4,1/4,1/4,1/4")
    c.add_argument("--mean", default=None, help="target asymptotic digit mean, e.g. 3/2")
    c.add_argument("--rational", default=None, help="expand this rational, e.g. 1/3")
    c.add_argument("--length", type=int, default=None, help=f"digits to emit (<= {MAX_CONSTRUCT_LENGTH})")

    a = sub.add_parser("analyze", help="frequency/mean trace of a digit source")
    common(a)
    a.add_argument("--in", dest="source", default=None, help="digit text file to analyze")
    a.add_argument("--tau", default=None, help="inline greedy constructor")
    a.add_argument("--mean", default=None, help="inline mean-target constructor")
    a.add_argument("--rational", default=None, help="inline rational expansion")
    a.add_argument("--checkpoints", default=None, help="comma list of prefix lengths")
    a.add_argument("--normality-tol", default=None, help="also report the uniformity verdict")
    a.add_argument("--precision", type=int, default=None, help="significant digits (default 12)")

    d = sub.add_parser("dimension", help="dimension of a frequency vector or a mean level set")
    common(d)
    d.add_argument("--tau", default=None, help="frequency vector, e.g. 1,0,0,0")
    d.add_argument("--theta", default=None, help="digit mean in [0, s-1]")
    d.add_argument("--sweep", default=None, help="theta sweep start:stop:step, emits CSV")
    d.add_argument("--oracle", action="store_true", default=None, help="also run the grid oracle")
    d.add_argument("--grid-step", default=None, help="grid oracle step (default 1/1000)")
    d.add_argument("--precision", type=int, default=None, help="significant digits (default 12)")

    v = sub.add_parser("verify", help="run the cross-module invariant battery")
    common(v)
    v.add_argument(
        "--module",
        dest="modules",
        action="append",
        default=None,
        help=f"restrict to a module (repeatable); one of {', '.join(MODULES)}",
    )
    return parser


def _load_config_file(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    return doc


def _resolve_precision(flag_value: int | None) -> int:
    if flag_value is None:
        env = os.environ.get(PRECISION_ENV)
        if env is None:
            return DEFAULT_PRECISION
        try:
            flag_value = int(env)
        except ValueError:
            raise UsageError(f"{PRECISION_ENV} must be an integer, got {env!r}")
    if not 1 <= flag_value <= 17:
        raise UsageError(f"precision must lie in [1, 17], got {flag_value}")
    return flag_value


def _parse_checkpoints(value) -> tuple[int, ...]:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    else:
        parts = list(value)
    try:
        points = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"checkpoints must be integers, got {value!r}")
    if not points or points[0] < 1 or any(b <= a for a, b in zip(points, points[1:])):
        raise UsageError(f"checkpoints must be >= 1 and strictly increasing, got {points}")
    return points


def effective_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge the config file (if any) with explicit flags; flags win."""
    file_doc = _load_config_file(args.config) if getattr(args, "config", None) else {}
    file_doc.pop("command", None)

    merged: dict = dict(file_doc)
    keymap = ExperimentConfig._KEYMAP
    for f in fields(ExperimentConfig):
        if f.name == "command" or not hasattr(args, f.name):
            continue
        flag_value = getattr(args, f.name)
        if flag_value is None:
            continue
        key = keymap.get(f.name, f.name)
        if key in merged and merged[key] != flag_value:
            print(
                f"warning: flag --{key.replace('_', '-')}={flag_value!r} overrides "
                f"config file value {merged[key]!r}",
                file=sys.stderr,
            )
        merged[key] = flag_value

    merged["command"] = args.command
    if "checkpoints" in merged and merged["checkpoints"] is not None:
        merged["checkpoints"] = _parse_checkpoints(merged["checkpoints"])
    if "modules" in merged and merged["modules"] is not None:
        names: list[str] = []
        for item in merged["modules"]:
            names.extend(p.strip() for p in str(item).split(",") if p.strip())
        merged["modules"] = tuple(names)
    merged["precision"] = _resolve_precision(merged.get("precision"))
    if merged.get("base") is None:
        merged.pop("base", None)
    try:
        cfg = ExperimentConfig.from_json_dict(merged)
    except TypeError as exc:
        raise UsageError(str(exc))
    if cfg.base < 2:
        raise UsageError(f"--base must be >= 2, got {cfg.base}")
    return cfg


_COMMANDS = {
    "construct": cmd_construct,
    "analyze": cmd_analyze,
    "dimension": cmd_dimension,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = effective_config(args)
        return _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
