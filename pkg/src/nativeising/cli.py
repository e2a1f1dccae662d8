"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 infeasible synthesis,
4 capacity error. Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import anneal, composer, device, logic
from .errors import CapacityError, InfeasibleEncodingError
from .ising import IsingProblem, clamp

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_CAPACITY = 0, 2, 3, 4

UNITS = {
    "nor": logic.GateKind.NOR,
    "nand": logic.GateKind.NAND,
    "or": logic.GateKind.OR,
    "and": logic.GateKind.AND,
    "multiplier": logic.GateKind.MULTIPLIER_CELL,
}


class ValidationFailure(Exception):
    """A check ran and did not pass; carries the report to print."""

    def __init__(self, report: dict):
        super().__init__("validation failed")
        self.report = report


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _load_problem(args) -> IsingProblem:
    if getattr(args, "unit", None):
        if args.unit not in UNITS:
            raise ValueError(f"unknown unit {args.unit!r}; choose from {sorted(UNITS)}")
        return logic.gate(UNITS[args.unit])
    if not getattr(args, "problem", None):
        raise ValueError("give a problem file or --unit")
    return IsingProblem.from_json(Path(args.problem).read_text())


def _parse_assignment(text: str | dict | None) -> dict:
    """``"0=1,B=0"`` -> {0: 1, "B": 0}; indices stay ints, labels stay strings."""
    if not text:
        return {}
    if isinstance(text, dict):
        return {int(k) if str(k).isdigit() else k: int(v) for k, v in text.items()}
    out = {}
    for part in text.split(","):
        key, value = part.split("=")
        key = key.strip()
        out[int(key) if key.isdigit() else key] = int(value)
    return out


def _parse_grid(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _schedule(args) -> anneal.Schedule:
    spec = getattr(args, "schedule", None)
    base = {}
    if isinstance(spec, dict):
        base = spec
    elif spec:
        text = Path(spec).read_text() if Path(spec).exists() else spec
        base = json.loads(text)
    for key, attr in (("Ta", "Ta"), ("A0", "A0"), ("B0", "B0"), ("steps", "steps")):
        value = getattr(args, attr, None)
        if value is not None:
            base[key] = value
    return anneal.Schedule.from_dict(base)


def _thermal(args) -> anneal.ThermalConfig:
    return anneal.ThermalConfig(
        temperature=args.temp, sweeps=args.sweeps, schedule=args.cooling,
        initial_temperature=args.t0, seed=args.seed)


def _add_problem_args(p) -> None:
    p.add_argument("problem", nargs="?", help="IsingProblem JSON file")
    p.add_argument("--unit", help=f"built-in unit instead of a file: {', '.join(UNITS)}")


def _add_engine_args(p, engines=("exact", "thermal"), default="thermal") -> None:
    p.add_argument("--engine", choices=engines, default=default)
    p.add_argument("--iters", type=int, default=10000)
    p.add_argument("--seed", type=int, default=anneal.DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--temp", type=float, default=0.01, help="final thermal temperature")
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--cooling", choices=("fixed", "geometric"), default="geometric")
    p.add_argument("--t0", type=float, default=None, help="initial temperature for cooling")
    p.add_argument("--schedule", help="schedule JSON (file or literal)")
    p.add_argument("--Ta", type=float, default=None)
    p.add_argument("--A0", type=float, default=None)
    p.add_argument("--B0", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)


def cmd_encode(args) -> int:
    table = logic.TruthTable.from_json(Path(args.table).read_text())
    fixed = {}
    for item in args.fix or []:
        pair, value = item.split("=")
        i, j = (int(x) for x in pair.split(","))
        fixed[(i, j)] = float(value)
    cfg = logic.SynthesisConfig(fixed_couplings=fixed or None, bound=args.bound,
                                min_gap=args.gap, mode=args.mode)
    problem = logic.synthesize(table, cfg)
    _emit(problem.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = _load_problem(args)
    table = logic.TruthTable.from_json(Path(args.table).read_text())
    report = logic.verify(problem, table).to_dict()
    if not report["passed"]:
        raise ValidationFailure(report)
    _emit(_dump(report), args.out)
    return EXIT_OK


def cmd_anneal(args) -> int:
    problem = _load_problem(args)
    hist = anneal.run_histogram(problem, args.engine, args.iters, _schedule(args), _thermal(args),
                                args.threads)
    _emit(hist.to_csv(), args.out)
    return EXIT_OK


def cmd_clamp(args) -> int:
    problem = _load_problem(args)
    out = clamp(problem, _parse_assignment(args.targets), args.alpha)
    _emit(out.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    problem = _load_problem(args)
    if args.targets_table:
        targets = logic.TruthTable.from_json(Path(args.targets_table).read_text()).rows
    else:
        targets = [t for t in (args.targets or "").split(",") if t]
    rows = anneal.sweep(problem, args.variable, _parse_grid(args.grid), args.engine, targets,
                        args.iters, _parse_assignment(args.clamp), _schedule(args),
                        _thermal(args), args.threads)
    _emit(anneal.sweep_to_csv(rows), args.out)
    return EXIT_OK


def cmd_factor(args) -> int:
    engine = args.engine
    query = composer.FactorQuery(args.n, args.xbits, args.ybits, args.alpha, engine, args.iters,
                                 _thermal(args), _schedule(args), args.threads)
    result = composer.factor(query)
    hist_path = args.histogram
    Path(hist_path).write_text(result.histogram.to_csv())
    out = {
        "pairs": [list(p) for p in sorted(result.pairs)],
        "success": result.success,
        "frequencies": [{"x": x, "y": y, "frequency": f} for (x, y), f in result.frequencies.items()],
        "histogram": hist_path,
    }
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_device(args) -> int:
    if args.preset:
        params = device.gate_device(args.ip) if args.preset == "gate" else device.cell_device(args.ip)
        reported = device.CELL_REPORTED_BETA_L if args.preset == "cell" else None
    else:
        if not args.params:
            raise ValueError("give a device parameter file or --preset")
        data = json.loads(Path(args.params).read_text())
        if args.ip is not None:
            data["I_p"] = args.ip
        params = device.DeviceParams.from_dict(data)
        reported = data.get("reported_beta_L")
    if args.reported_beta_l is not None:
        reported = args.reported_beta_l
    _emit(_dump(device.device_report(params, reported)), args.out)
    return EXIT_OK


def cmd_units(args) -> int:
    out = {name: {"kind": kind.name, "labels": list(logic.truth_table(kind).labels)}
           for name, kind in UNITS.items()}
    _emit(_dump(out), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nativeising", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file supplying default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="synthesise an Ising problem from a truth table")
    p.add_argument("table")
    p.add_argument("--bound", type=float, default=4.0)
    p.add_argument("--gap", type=float, default=1.0)
    p.add_argument("--mode", choices=("lp", "grid"), default="lp")
    p.add_argument("--fix", action="append", help="fixed coupling, e.g. 0,1=0.5")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("verify", help="check a problem's ground set against a truth table")
    _add_problem_args(p)
    p.add_argument("--table", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("anneal", help="histogram of repeated anneals (CSV)")
    _add_problem_args(p)
    _add_engine_args(p)
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("clamp", help="bias qubits toward chosen bits")
    _add_problem_args(p)
    p.add_argument("--targets", required=True, help="e.g. 0=0,1=0 or A=0,B=0")
    p.add_argument("--alpha", type=float, required=True)
    p.set_defaults(func=cmd_clamp)

    p = sub.add_parser("sweep", help="success probability over a parameter grid (CSV)")
    _add_problem_args(p)
    _add_engine_args(p)
    p.add_argument("--variable", choices=("alpha", "T_a", "temperature"), required=True)
    p.add_argument("--grid", required=True, help="comma-separated ascending values")
    p.add_argument("--targets", help="comma-separated target bitstrings")
    p.add_argument("--targets-table", help="truth table whose rows are the targets")
    p.add_argument("--clamp", help="clamp targets for an alpha sweep, e.g. 0=0,1=0")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("factor", help="factor N by clamping a multiplier array's product bits")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xbits", type=int, default=2)
    p.add_argument("--ybits", type=int, default=2)
    p.add_argument("--alpha", type=float, default=3.0)
    _add_engine_args(p, engines=("exhaustive", "thermal", "exact"), default="exhaustive")
    p.add_argument("--histogram", default="factor_histogram.csv", help="histogram CSV path")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("device", help="derive h, J and beta_L from device parameters")
    p.add_argument("params", nargs="?", help="DeviceParams JSON (SI units)")
    p.add_argument("--preset", choices=("gate", "cell"))
    p.add_argument("--ip", type=float, default=None, help="persistent current I_p in amperes")
    p.add_argument("--reported-beta-l", type=float, default=None)
    p.set_defaults(func=cmd_device)

    p = sub.add_parser("units", help="list the built-in problem units")
    p.set_defaults(func=cmd_units)

    for sp in sub.choices.values():
        sp.add_argument("--out", help="output path (default: stdout)")
    return parser


def _parse(argv):
    """Parse ``argv``; values from ``--config`` become defaults that flags override."""
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        config = {k.replace("-", "_"): v for k, v in
                  json.loads(Path(known.config).read_text()).items()}
        sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        for sp in sub.choices.values():
            for action in sp._actions:
                if action.dest in config:
                    action.default = config[action.dest]
                    action.required = False
    return parser.parse_args(argv)


def _error(kind: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code, **extra}) + "\n")
    return code


def main(argv=None) -> int:
    args = _parse(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        sys.stdout.write(_dump(exc.report))
        return _error("ValidationFailure", "ground set does not match the truth table",
                      EXIT_INVALID, report=exc.report)
    except InfeasibleEncodingError as exc:
        cert = {k: str(v) for k, v in (exc.certificate or {}).items()}
        return _error("InfeasibleEncodingError", exc.report, EXIT_INFEASIBLE, certificate=cert)
    except CapacityError as exc:
        return _error("CapacityError", str(exc), EXIT_CAPACITY)
    except (ValueError, KeyError, OSError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
