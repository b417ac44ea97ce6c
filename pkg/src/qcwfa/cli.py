"""Command-line front end.

Exit codes: 0 in language / zero sum / all agree, 1 not in language /
non-zero sum / disagreement, 2 usage or file error, 3 step budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import formats
from .compiler import CheckReport, check_string, compile_qcfa, strings_upto
from .qcfa import (
    BudgetExhausted,
    Halt,
    ValidationError,
    Verdict,
    build_palindrome_machine,
    check_valid,
    membership_verdict,
    run,
)
from .scalar import FormatError, render_rational
from .wfa import HeadNondeterminism, WfaError, evaluate

EXIT_IN, EXIT_OUT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

EXAMPLES = {"palindrome": build_palindrome_machine}


class CliError(Exception):
    pass


def _show(x: str) -> str:
    return x if x else "ε"


def _verdict_code(v: Verdict) -> int:
    return EXIT_IN if v is Verdict.IN_LANGUAGE else EXIT_OUT


def _load_machine(path):
    try:
        return check_valid(formats.load_machine(path))
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None
    except ValidationError as exc:
        lines = "\n".join(f"  {d}" for d in exc.diagnostics)
        raise CliError(f"{path}: invalid machine\n{lines}") from None
    except FormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _load_wfa(path):
    try:
        return formats.load_wfa(path)
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}") from None
    except FormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_simulate(args) -> int:
    m = _load_machine(args.machine)
    try:
        r = run(m, args.input, args.max_steps, trace=args.trace)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.trace:
        print("step | classical-state | head | amplitudes")
        for row in r.trace:
            amps = ", ".join(str(z) for z in row.v)
            print(f"{row.step} | {row.state} | {row.head} | {amps}")
    print(f"p_acc = {render_rational(r.p_acc)}")
    print(f"p_rej = {render_rational(r.p_rej)}")
    print(f"halt: {r.halt.value} after {r.steps} steps")
    if r.halt is Halt.BUDGET_EXHAUSTED:
        print("verdict: unknown (step budget exhausted)")
        return EXIT_BUDGET
    v = membership_verdict(r)
    print(f"verdict: {v.value}")
    return _verdict_code(v)


def cmd_compile(args) -> int:
    m = _load_machine(args.machine)
    w = compile_qcfa(m)
    _write(formats.render_wfa(w), args.output)
    if args.output not in (None, "-"):
        print(f"wrote {len(w.states)} states, {len(w.transitions)} transitions to {args.output}")
    return EXIT_IN


def cmd_eval(args) -> int:
    w = _load_wfa(args.wfa)
    try:
        ev = evaluate(w, args.input, args.max_steps, trace=args.trace)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}")
        return EXIT_BUDGET
    except (HeadNondeterminism, WfaError, ValueError) as exc:
        raise CliError(str(exc)) from None
    if args.trace:
        print("step | head | active")
        for k, ((head, _), frame) in enumerate(zip(ev.scan, ev.trace), start=1):
            body = ", ".join(f"{s}: {wt}" for s, wt in frame.items())
            print(f"{k} | {head} | {{{body}}}")
    print(f"W∘x = {ev.result}")
    for tag, c in ev.result.terms.items():
        print(f"  {tag}:{c}")
    print(f"steps: {ev.steps}")
    v = Verdict.IN_LANGUAGE if ev.result.is_zero() else Verdict.NOT_IN_LANGUAGE
    print(f"verdict: {v.value}")
    return _verdict_code(v)


_worker_state: dict = {}


def _init_worker(machine, wfa, max_steps):
    _worker_state.update(m=machine, w=wfa, max_steps=max_steps)


def _check_one(x):
    st = _worker_state
    return check_string(st["m"], st["w"], x, st["max_steps"], stepwise=True)


def cmd_check(args) -> int:
    m = _load_machine(args.machine)
    w = compile_qcfa(m)
    xs = list(strings_upto(m.sigma, args.max_len))
    report = CheckReport()
    if args.jobs > 1:
        with ProcessPoolExecutor(
            args.jobs, initializer=_init_worker, initargs=(m, w, args.max_steps)
        ) as pool:
            report.rows.extend(pool.map(_check_one, xs, chunksize=32))
    else:
        report.rows.extend(check_string(m, w, x, args.max_steps) for x in xs)

    print("string | simulator | weighted | agree | p_rej")
    for r in report.rows:
        sim = r.sim_verdict.value if r.sim_verdict else "-"
        wv = r.wfa_verdict.value if r.wfa_verdict else "-"
        p = render_rational(r.p_rej) if r.p_rej is not None else "-"
        print(f"{_show(r.string)} | {sim} | {wv} | {'yes' if r.agree else 'NO'} | {p}")
        for problem in r.problems:
            print(f"    {problem}")
        if args.trace and r.sim_verdict is not None:
            for row in run(m, r.string, args.max_steps, trace=True).trace:
                amps = ", ".join(str(z) for z in row.v)
                print(f"    {row.step} | {row.state} | {row.head} | {amps}")
    print(f"{report.total} strings, {report.agreeing} agree")
    if any(r.sim_verdict is not None and not r.agree for r in report.rows):
        return EXIT_OUT
    if not report.ok:
        return EXIT_BUDGET
    return EXIT_IN


def cmd_example(args) -> int:
    m = EXAMPLES[args.name]()
    _write(formats.render_machine(m), args.output)
    return EXIT_IN


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qcwfa",
        description="Simulate 2QCFA exactly, compile them to weighted automata, and cross-check.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run the quantum machine on one input")
    s.add_argument("machine")
    s.add_argument("--input", required=True)
    s.add_argument("--max-steps", type=int)
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compile", help="write the equivalent weighted automaton")
    c.add_argument("machine")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compile)

    e = sub.add_parser("eval", help="evaluate a weighted automaton on one input")
    e.add_argument("wfa")
    e.add_argument("--input", required=True)
    e.add_argument("--max-steps", type=int)
    e.add_argument("--trace", action="store_true")
    e.set_defaults(func=cmd_eval)

    k = sub.add_parser("check", help="compare simulator and compiled automaton on all short strings")
    k.add_argument("machine")
    k.add_argument("--max-len", type=int, required=True)
    k.add_argument("--max-steps", type=int)
    k.add_argument("--jobs", type=int, default=1)
    k.add_argument("--trace", action="store_true")
    k.set_defaults(func=cmd_check)

    x = sub.add_parser("example", help="write a built-in machine file")
    x.add_argument("name", choices=sorted(EXAMPLES))
    x.add_argument("-o", "--output")
    x.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
