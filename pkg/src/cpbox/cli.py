"""Command-line front end: ``cpbox <verb> [options]``.

Exit codes: 0 success, 2 usage error, 3 domain error (promise violation,
invalid device, ...), 4 reproduction tolerance missed under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import calib, ideal, oracles, sim
from .compiler import CompileMode
from .device import DeviceConfig, validate
from .errors import CpboxError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_TOLERANCE = 4
DEVICE_ENV = "CPBOX_DEVICE"

CLASS_NAMES = {
    "constant": ideal.GateKind.CONSTANT_IDENTITY,
    "separable": ideal.GateKind.SEPARABLE,
    "i": ideal.GateKind.BIPARTITE,
    "bipartite": ideal.GateKind.BIPARTITE,
    "ii": ideal.GateKind.CLASS_II,
    "iii": ideal.GateKind.CLASS_III,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpbox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv", "md"), default="json")
        p.add_argument("--out", type=Path, help="write the result here instead of stdout")

    def device_opt(p: argparse.ArgumentParser) -> None:
        p.add_argument("--device", type=Path, default=os.environ.get(DEVICE_ENV),
                       help=f"device JSON (default: ${DEVICE_ENV} or the ideal 3-qubit ring)")
        p.add_argument("--ek", type=float, help="override the capacitive coupling on every coupler")

    dj = sub.add_parser("dj", help="run Deutsch-Jozsa")
    src = dj.add_mutually_exclusive_group(required=True)
    src.add_argument("--f", help="truth table bitmask, e.g. 0x96")
    src.add_argument("--class", dest="gate_class", choices=sorted(CLASS_NAMES),
                     help="pick a function by entanglement class (n = 3)")
    dj.add_argument("--variant", type=int, default=1, help="1-based member index within --class")
    dj.add_argument("--n", type=int, default=3)
    dj.add_argument("--mode", choices=("ideal", "pulse"), default="ideal")
    dj.add_argument("--compile", choices=("sequence", "single"), default="sequence")
    dj.add_argument("--full-physics", action="store_true",
                    help="simulate one-qubit rotations instead of applying them exactly")
    dj.add_argument("--shots", type=int, default=0)
    dj.add_argument("--seed", type=int, default=0)
    device_opt(dj)
    common(dj)

    bv = sub.add_parser("bv", help="run Bernstein-Vazirani")
    bv.add_argument("--a", required=True, help="mask, e.g. 0b101")
    bv.add_argument("--b", type=int, default=0, choices=(0, 1))
    bv.add_argument("--mode", choices=("ideal", "pulse"), default="ideal")
    bv.add_argument("--shots", type=int, default=0)
    bv.add_argument("--seed", type=int, default=0)
    device_opt(bv)
    common(bv)

    tables = sub.add_parser("tables", help="reproduce the timing and accuracy tables")
    tables.add_argument("--which", action="append", help="1, 2 or 3; repeat or comma-separate (default all)")
    tables.add_argument("--strict", action="store_true", help="exit 4 if any graded row misses its tolerance")
    tables.add_argument("--no-times", action="store_true", help="skip the optimal-time rows")
    common(tables)

    cal = sub.add_parser("calibrate", help="recover operation times by scan and refine")
    cal.add_argument("--target", choices=(*calib.NAMED_TARGETS, "all"), default="all")
    cal.add_argument("--grid", type=int, help="grid points for the time scan")
    cal.add_argument("--no-co-optimize", action="store_true", help="skip the e_j3 pass for SingleShotIII")
    common(cal)

    cls = sub.add_parser("classify", help="classify oracles and their gates")
    grp = cls.add_mutually_exclusive_group(required=True)
    grp.add_argument("--f", help="truth table bitmask")
    grp.add_argument("--all", action="store_true", help="every canonical function of --n bits")
    cls.add_argument("--n", type=int, default=3)
    common(cls)

    val = sub.add_parser("validate", help="check a device file against the charge-qubit regime")
    device_opt(val)
    common(val)
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


# ------------------------------------------------------------------ output

def _flatten(d: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(d, dict):
        out: list[tuple[str, Any]] = []
        for k, v in d.items():
            out += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(d, list) and d and isinstance(d[0], (dict, list)):
        out = []
        for i, v in enumerate(d):
            out += _flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, d)]


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def render(result: Any, fmt: str, columns: Sequence[str] | None = None) -> str:
    """Encode a dict or a list of flat dicts as json, csv or markdown."""
    if fmt == "json":
        return json.dumps(result, indent=2) + "\n"
    if isinstance(result, list):
        cols = list(columns or (result[0].keys() if result else []))
        rows = [[_cell(r.get(c)) for c in cols] for r in result]
    else:
        cols = ["key", "value"]
        rows = [[k, _cell(v)] for k, v in _flatten(result)]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    lines += ["| " + " | ".join(c.replace("|", "\\|") for c in r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


# ------------------------------------------------------------------ verbs

def _device(args: argparse.Namespace, n: int) -> DeviceConfig | None:
    cfg = DeviceConfig.load(args.device) if args.device else None
    if cfg is None and args.ek is None:
        return None
    cfg = cfg or DeviceConfig.default(n)
    return cfg.with_ek(args.ek) if args.ek is not None else cfg


def members_of(kind: ideal.GateKind) -> list[oracles.BooleanFunction]:
    return [f for f in oracles.enumerate_canonical(3) if ideal.uf_gate(f).gate_class.kind is kind]


def _pick_function(args: argparse.Namespace) -> oracles.BooleanFunction:
    if args.f is not None:
        return oracles.BooleanFunction.parse(args.f, args.n)
    members = members_of(CLASS_NAMES[args.gate_class])
    if not 1 <= args.variant <= len(members):
        raise CpboxError(f"class {args.gate_class} has {len(members)} members; --variant must be 1..{len(members)}")
    return members[args.variant - 1]


def _report_dict(rep: sim.RunReport) -> dict[str, Any]:
    d = rep.to_dict()
    if d.get("samples") is None:
        d.pop("samples", None)
    return d


def cmd_dj(args: argparse.Namespace) -> int:
    f = _pick_function(args)
    compile_mode = CompileMode.SINGLE_SHOT if args.compile == "single" else CompileMode.SEQUENCE
    dev = _device(args, f.n)
    rep = sim.run_dj(f, args.mode, compile_mode=compile_mode, device=dev,
                     ideal_one_qubit=not args.full_physics, shots=args.shots, seed=args.seed)
    emit(render(_report_dict(rep), args.format), args.out)
    return EXIT_OK


def cmd_bv(args: argparse.Namespace) -> int:
    g = oracles.BVFunction.from_dict({"a": args.a, "b": args.b})
    dev = _device(args, g.n)
    rep = sim.run_bv(g, args.mode, device=dev, shots=args.shots, seed=args.seed)
    emit(render(_report_dict(rep), args.format), args.out)
    return EXIT_OK


def cmd_tables(args: argparse.Namespace) -> int:
    which = [w.strip() for item in (args.which or ["1,2,3"]) for w in item.split(",") if w.strip()]
    bad = [w for w in which if w.upper() not in ("1", "2", "3", "I", "II", "III")]
    if bad:
        raise CpboxError(f"unknown table {bad[0]!r}; use 1, 2 or 3")
    rows = sim.reproduce_tables(which, include_times=not args.no_times)
    if args.format == "csv":
        text = sim.tables_csv(rows)
    elif args.format == "md":
        text = sim.tables_markdown(rows)
    else:
        text = sim.tables_json(rows)
    emit(text, args.out)
    if args.strict and any(r.graded and not r.passed for r in rows):
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    targets = calib.NAMED_TARGETS if args.target == "all" else (args.target,)
    records = [calib.calibrate_named(t, grid_points=args.grid, co_optimize=not args.no_co_optimize).to_dict()
               for t in targets]
    if args.format == "json":
        emit(render(records, "json"), args.out)
    else:
        cols = ["target", "t_star", "objective", "objective_kind", "bounds", "grid_points", "e_j3_star"]
        emit(render(records, args.format, cols), args.out)
    return EXIT_OK


def _classify_row(f: oracles.BooleanFunction) -> dict[str, Any]:
    kind = oracles.classify(f)
    row: dict[str, Any] = {"table": f.hex(), "n": f.n, "classification": kind.value}
    if kind is oracles.Classification.NEITHER:
        row.update(signs=None, gate_class=None)
        return row
    gate = ideal.uf_gate(oracles.canonicalize(f))
    row.update(signs=gate.text, gate_class=str(gate.gate_class) if gate.gate_class else None)
    return row


def cmd_classify(args: argparse.Namespace) -> int:
    if args.all:
        rows = [_classify_row(f) for f in oracles.enumerate_canonical(args.n)]
        emit(render(rows, args.format), args.out)
    else:
        emit(render(_classify_row(oracles.BooleanFunction.parse(args.f, args.n)), args.format), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _device(args, 3) or DeviceConfig.default(3)
    violations = validate(cfg)
    rows = [{"severity": v.severity, "where": v.where, "message": v.message} for v in violations]
    if args.format == "json":
        emit(render({"device": cfg.to_dict(), "violations": rows}, "json"), args.out)
    else:
        emit(render(rows, args.format, ["severity", "where", "message"]), args.out)
    return EXIT_DOMAIN if any(v.severity == "error" for v in violations) else EXIT_OK


COMMANDS = {
    "dj": cmd_dj,
    "bv": cmd_bv,
    "tables": cmd_tables,
    "calibrate": cmd_calibrate,
    "classify": cmd_classify,
    "validate": cmd_validate,
}


def execute(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.verb](args)
    except (CpboxError, ValueError, OSError) as exc:
        print(f"cpbox {args.verb}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
