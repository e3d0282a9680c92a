"""Batch command line: ``ctcsim {classify,trace,cycles,compare,circuit} FILE [options]``.

Exit status is 0 on success, 1 for bad input or usage, 2 when an internal
consistency check fails. Every artifact starts with ``"schema": 1`` and the
effective run configuration, so identical flags give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import ctc_circuit, cycle_modes, halting_oracle, tm_core
from .markov import Distribution

SCHEMA = 1
COMMANDS = ("classify", "trace", "cycles", "compare", "circuit")
DEFAULT_DEPTH = 64
DEFAULT_CYCLES = 100
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: str
    depth: int = DEFAULT_DEPTH
    cycles: int = DEFAULT_CYCLES
    seed: int = DEFAULT_SEED
    modes: list[str] = field(default_factory=list)
    intervals: list[tuple[str, str]] = field(default_factory=list)
    init: Optional[str] = None
    cr_input: Optional[str] = None
    output_format: str = "json"
    output_path: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "input_path": self.input_path,
            "N": self.depth,
            "cycles": self.cycles,
            "seed": self.seed,
            "modes": list(self.modes),
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "init": self.init,
            "cr_input": self.cr_input,
            "output_format": self.output_format,
        }


# --- rendering --------------------------------------------------------------


def render_label(label) -> str:
    if isinstance(label, bytes):
        return label.decode("utf-8", "backslashreplace")
    return str(label)


def render_number(p) -> str | float:
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    return float(format(float(p), ".17g"))


def render_distribution(d: Distribution) -> list[dict]:
    return [{"state": render_label(k), "p": render_number(d[k])} for k in d if d[k]]


def render_trace_record(r: cycle_modes.CycleRecord) -> dict:
    return {
        "cycle": r.cycle,
        "start": render_label(r.register_at_start),
        "operator_output": render_distribution(r.operator_output),
        "survived": r.survived,
        "next_start": render_label(r.register_at_next_start),
        "output": r.output,
    }


def render_comparison(report: cycle_modes.ModeComparison) -> dict:
    return {
        "modes": [
            {
                "mode": s.mode.label(),
                "reaches_halting_history": s.reaches_halting_history,
                "information_preserving": s.information_preserving,
                "distinct_registers": s.distinct_registers,
                "equivalence_class": s.equivalence_class,
                "warnings": list(s.warnings),
            }
            for s in report.summaries
        ],
        "equivalence_classes": report.classes(),
    }


def render_paradox(r: ctc_circuit.ParadoxReport) -> dict:
    return {
        "cr_input": r.cr_input,
        "classical_paradox": r.classical_paradox,
        "deterministic_fixed_points": [
            {"ctc": y, "cr_output": render_distribution(r.deterministic_cr_outputs[y])}
            for y in r.deterministic_fixed_points
        ],
        "distribution_fixed_points": [
            {"distribution": render_distribution(d), "cr_output": render_distribution(o)}
            for d, o in zip(r.distribution_fixed_points, r.distribution_cr_outputs)
        ],
    }


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2) + "\n"


def emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _header(cfg: RunConfig) -> dict:
    return {"schema": SCHEMA, "config": cfg.to_json()}


def _csv(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(_header(cfg), ensure_ascii=False) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


# --- commands ---------------------------------------------------------------


def _load_machine(path: str) -> tm_core.TuringMachine:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return tm_core.parse_machine(text)


def _modes(cfg: RunConfig) -> list[cycle_modes.SemanticsMode]:
    ivs = [(Fraction(lo), Fraction(hi)) for lo, hi in cfg.intervals]
    return [cycle_modes.mode_from_name(name, ivs) for name in cfg.modes]


def _init(cfg: RunConfig, m: tm_core.TuringMachine) -> bytes:
    if cfg.init is None:
        return tm_core.serialize_configuration(m, tm_core.initial_configuration(m))
    return cfg.init.encode("utf-8")


def run_classify(cfg: RunConfig) -> str:
    if cfg.output_format != "json":
        raise UsageError("classify only supports --format json")
    m = _load_machine(cfg.input_path)
    verdict = halting_oracle.classify(m, cfg.depth)
    body = _header(cfg)
    body["verdict"] = verdict.to_json()
    if isinstance(verdict, halting_oracle.Halts):
        body["fixed_point"] = render_distribution(verdict.fixed_point)
    else:
        body["stationary"] = render_distribution(verdict.stationary)
    return dumps(body)


def run_trace(cfg: RunConfig) -> str:
    m = _load_machine(cfg.input_path)
    hist = tm_core.run_until(m, cfg.depth)
    rows = [
        (t, tm_core.serialize_configuration(m, c).decode("ascii"), tm_core.is_halting(m, c))
        for t, c in enumerate(hist)
    ]
    if cfg.output_format == "csv":
        return _csv(cfg, ["t", "configuration", "halting"], [(t, s, int(h)) for t, s, h in rows])
    body = _header(cfg)
    body["history"] = [{"t": t, "configuration": s, "halting": h} for t, s, h in rows]
    return dumps(body)


def run_cycles_cmd(cfg: RunConfig) -> str:
    if len(cfg.modes) != 1:
        raise UsageError("cycles takes exactly one --mode")
    m = _load_machine(cfg.input_path)
    (mode,) = _modes(cfg)
    trace = cycle_modes.run_cycles(m, _init(cfg, m), mode, cfg.cycles, cfg.depth, cfg.seed)
    if cfg.output_format == "csv":
        rows = [
            (
                r.cycle,
                render_label(r.register_at_start),
                int(r.survived),
                render_label(r.register_at_next_start),
            )
            for r in trace.records
        ]
        return _csv(cfg, ["cycle", "start", "survived", "next_start"], rows)
    head = _header(cfg)
    head.update(
        mode=mode.label(),
        converged=trace.converged,
        verdict=trace.verdict,
        warnings=list(trace.warnings),
    )
    lines = [head] + [render_trace_record(r) for r in trace.records]
    return "".join(json.dumps(obj, ensure_ascii=False) + "\n" for obj in lines)


def run_compare(cfg: RunConfig) -> str:
    if cfg.output_format != "json":
        raise UsageError("compare only supports --format json")
    m = _load_machine(cfg.input_path)
    report = cycle_modes.compare_modes(
        m, _init(cfg, m), _modes(cfg), cfg.cycles, cfg.depth, cfg.seed
    )
    body = _header(cfg)
    body.update(render_comparison(report))
    return dumps(body)


def run_circuit(cfg: RunConfig) -> str:
    if cfg.output_format != "json":
        raise UsageError("circuit only supports --format json")
    try:
        text = Path(cfg.input_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input_path}: {exc}") from None
    c = ctc_circuit.parse_circuit(text)
    if cfg.cr_input is not None:
        x = "" if cfg.cr_input == "-" else cfg.cr_input
        reports = [ctc_circuit.evaluate(c, x)]
    else:
        reports = ctc_circuit.evaluate_all(c)
    body = _header(cfg)
    body.update(m=c.m, n=c.n, delay=render_number(c.delay), reports=[render_paradox(r) for r in reports])
    return dumps(body)


RUNNERS = {
    "classify": run_classify,
    "trace": run_trace,
    "cycles": run_cycles_cmd,
    "compare": run_compare,
    "circuit": run_circuit,
}


# --- argument parsing -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctcsim", description="Classical CTC computation simulator.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input_path", help="machine (.tm) or circuit (.ckt) file")
    p.add_argument("--depth", "-N", type=int, default=DEFAULT_DEPTH, help="truncation depth / decode bound")
    p.add_argument("--cycles", type=int, default=DEFAULT_CYCLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument(
        "--mode",
        action="append",
        choices=[k.value for k in cycle_modes.ModeKind],
        help="semantics mode; repeat for compare (default: all modes)",
    )
    p.add_argument(
        "--interval",
        nargs=2,
        action="append",
        metavar=("LO", "HI"),
        help="relay machine availability interval; repeatable",
    )
    p.add_argument("--init", help="initial CTC register content (default: sigma_0)")
    p.add_argument("--input", dest="cr_input", help="single CR input for circuit ('-' for none)")
    p.add_argument("--format", dest="output_format", choices=("json", "csv"))
    p.add_argument("--output", "-o", dest="output_path")
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    modes = ns.mode
    if modes is None:
        modes = [k.value for k in cycle_modes.ModeKind] if ns.command == "compare" else []
    fmt = ns.output_format or ("csv" if ns.command == "cycles" else "json")
    if ns.depth < 1:
        raise UsageError("--depth must be >= 1")
    if ns.cycles < 1:
        raise UsageError("--cycles must be >= 1")
    if not 0 <= ns.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    intervals = [tuple(iv) for iv in (ns.interval or [])]
    for lo, hi in intervals:
        try:
            Fraction(lo), Fraction(hi)
        except ValueError:
            raise UsageError(f"bad interval {lo} {hi}") from None
    return RunConfig(
        command=ns.command,
        input_path=ns.input_path,
        depth=ns.depth,
        cycles=ns.cycles,
        seed=ns.seed,
        modes=modes,
        intervals=intervals,
        init=ns.init,
        cr_input=ns.cr_input,
        output_format=fmt,
        output_path=ns.output_path,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        text = RUNNERS[cfg.command](cfg)
        emit(text, cfg.output_path)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, tm_core.MachineError, ctc_circuit.CircuitError, ValueError) as exc:
        print(f"ctcsim: error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"ctcsim: internal check failed: {exc}", file=sys.stderr)
        return 2
    return 0
