"""Command-line front end: validate models, list transitions, run traces.

Exit codes are a stable contract: 0 success, 1 validation or semantics
error, 2 I/O and usage errors. Set TSCLS_COLOR=0|1 to force diagnostic
coloring off or on (default: on when stderr is a terminal).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, TextIO

from .engine import Trace, TraceEvent, simulate
from .errors import ModelError, TsclsError
from .matching import path_text
from .model import ModelFile
from .semantics import transitions
from .syntax import parse_model, parse_term, print_term

CSV_FIXED_COLUMNS = ("time", "step", "rule", "path", "rate")


def _color_enabled() -> bool:
    flag = os.environ.get("TSCLS_COLOR")
    if flag == "0":
        return False
    if flag == "1":
        return True
    return sys.stderr.isatty()


def _error(message: str) -> None:
    prefix = "error:"
    if _color_enabled():
        prefix = "\x1b[31merror:\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips the exact 64-bit float."""
    return repr(float(x))


def _load_model(path: str) -> ModelFile:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_model(text)


# ---------------------------------------------------------------------------
# check


def cmd_check(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    name = model.name or "model"
    print(f"{name}: {len(model.rules)} rules, {len(model.elements())} elements")
    return 0


# ---------------------------------------------------------------------------
# transitions


def cmd_transitions(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    state = model.init
    if args.state is not None:
        state = parse_term(args.state)
    trs = transitions(state, model.rules, model.type_env(),
                      model.constants, model.typing)
    for tr in sorted(trs, key=lambda t: (t.rule_id, t.path, t.target.key)):
        print(f"{tr.rule_id}  {path_text(tr.path)}  {_fmt(tr.rate)}  "
              f"{print_term(tr.target)}")
    return 0


# ---------------------------------------------------------------------------
# run


def _records(trace: Trace):
    """Events and samples merged into one time-ordered stream."""
    merged: list[tuple[tuple, object]] = []
    for ev in trace.events:
        merged.append(((ev.time, ev.step, 0), ev))
    for sm in trace.samples:
        merged.append(((sm.time, sm.step, 1), sm))
    merged.sort(key=lambda pair: pair[0])
    return [rec for _, rec in merged]


def _write_csv(trace: Trace, out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(CSV_FIXED_COLUMNS + trace.observable_names)
    for rec in _records(trace):
        if isinstance(rec, TraceEvent):
            row = [_fmt(rec.time), rec.step, rec.rule_id,
                   path_text(rec.path), _fmt(rec.rate)]
        else:
            row = [_fmt(rec.time), rec.step, "", "", ""]
        writer.writerow(row + list(rec.observables))


def _write_json(trace: Trace, out: TextIO) -> None:
    names = trace.observable_names
    for rec in _records(trace):
        obj = {
            "kind": "event" if isinstance(rec, TraceEvent) else "sample",
            "time": rec.time,
            "step": rec.step,
            "rule": rec.rule_id if isinstance(rec, TraceEvent) else None,
            "path": (path_text(rec.path)
                     if isinstance(rec, TraceEvent) else None),
            "rate": rec.rate if isinstance(rec, TraceEvent) else None,
            "observables": dict(zip(names, rec.observables)),
        }
        out.write(json.dumps(obj) + "\n")


def _write_trace(trace: Trace, fmt: str, out: TextIO) -> None:
    if fmt == "csv":
        _write_csv(trace, out)
    else:
        _write_json(trace, out)


def _seed_path(path: str, seed: int) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}.seed{seed}{ext}"


def _summary(trace: Trace, seed: int) -> str:
    return (f"seed={seed} steps={trace.steps} "
            f"time={_fmt(trace.final_time)} halt={trace.halt_reason}")


def cmd_run(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    cfg = model.sim_config(seed=args.seed, tmax=args.tmax,
                           max_steps=args.max_steps, samples=args.samples)
    bad = cfg.violations()
    if bad:
        for msg in bad:
            _error(msg)
        return 1
    if args.replicas < 1:
        _error("--replicas must be at least 1")
        return 2
    if args.replicas > 1:
        if not args.out:
            _error("--replicas needs --out (one file per seed)")
            return 2
        seeds = list(range(cfg.seed, cfg.seed + args.replicas))
        with ThreadPoolExecutor(max_workers=min(8, len(seeds))) as pool:
            futures = [pool.submit(simulate, model,
                                   model.sim_config(seed=s, tmax=cfg.tmax,
                                                    max_steps=cfg.max_steps,
                                                    samples=cfg.samples))
                       for s in seeds]
            traces = [f.result() for f in futures]
        for seed, trace in zip(seeds, traces):
            path = _seed_path(args.out, seed)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                _write_trace(trace, args.format, fh)
            print(f"{_summary(trace, seed)} out={path}")
        return 0

    trace = simulate(model, cfg)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _write_trace(trace, args.format, fh)
        print(f"{_summary(trace, cfg.seed)} out={args.out}")
    else:
        _write_trace(trace, args.format, sys.stdout)
        print(_summary(trace, cfg.seed), file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tscls",
        description="Typed stochastic calculus of looping sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and validate a model file")
    p_check.add_argument("model")
    p_check.set_defaults(func=cmd_check)

    p_tr = sub.add_parser("transitions",
                          help="list every enabled transition of a state")
    p_tr.add_argument("model")
    p_tr.add_argument("--state", help="term overriding the model's init")
    p_tr.set_defaults(func=cmd_transitions)

    p_run = sub.add_parser("run", help="simulate and write a trace")
    p_run.add_argument("model")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--tmax", type=float)
    p_run.add_argument("--max-steps", type=int)
    p_run.add_argument("--samples", type=int)
    p_run.add_argument("--out", help="output file (default: stdout)")
    p_run.add_argument("--format", choices=("csv", "json"), default="csv")
    p_run.add_argument("--replicas", type=int, default=1,
                       help="run this many consecutive seeds concurrently")
    p_run.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelError as exc:
        for msg in exc.diagnostics:
            _error(msg)
        return 1
    except TsclsError as exc:
        _error(str(exc))
        return 1
    except OSError as exc:
        _error(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
