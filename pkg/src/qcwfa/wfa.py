"""Two-way weighted automata over C with formal exponential-sum weights.

Evaluation keeps a sparse frontier ``state -> weight`` and advances it one
tape read at a time.  Every enabled transition in a step must agree on the
head direction, which is what makes the scanned symbol sequence well defined.
Final states absorb: weight entering them is moved into an accumulator and
takes no further part in the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .qcfa import END_MARKERS, LEFT_END, RIGHT_END, BudgetExhausted, Verdict
from .scalar import ExpSum


class WfaError(ValueError):
    """Structural problem with a weighted automaton."""


class HeadNondeterminism(Exception):
    def __init__(self, step: int, head: int, symbol: str, moves: Mapping[int, list]):
        self.step, self.head, self.symbol = step, head, symbol
        self.moves = {d: sorted(v) for d, v in moves.items()}
        detail = ", ".join(f"dir {d:+d} from {v}" for d, v in sorted(self.moves.items()))
        super().__init__(
            f"head nondeterminism at step {step} (head {head}, symbol {symbol!r}): {detail}"
        )


@dataclass(frozen=True)
class WTransition:
    src: str
    symbol: str
    weight: ExpSum
    dst: str
    dir: int


@dataclass(frozen=True)
class Wfa:
    """A 2-way weighted automaton with one initial state and unit boundary weights."""

    states: tuple[str, ...]
    sigma: tuple[str, ...]
    initial: str
    finals: frozenset[str]
    transitions: tuple[WTransition, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        problems = self.problems()
        if problems:
            raise WfaError("; ".join(problems))
        index: dict[tuple[str, str], list[WTransition]] = {}
        for t in self.transitions:
            index.setdefault((t.src, t.symbol), []).append(t)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    def __hash__(self) -> int:
        return hash((self.states, self.initial, self.transitions))

    def problems(self) -> list[str]:
        out = []
        sset = set(self.states)
        gamma = set(self.tape_alphabet)
        if len(sset) != len(self.states):
            out.append("duplicate state names")
        if self.initial not in sset:
            out.append(f"unknown initial state {self.initial!r}")
        for f in sorted(self.finals - sset):
            out.append(f"unknown final state {f!r}")
        for c in self.sigma:
            if c in END_MARKERS:
                out.append(f"end-marker {c!r} in alphabet")
        for k, t in enumerate(self.transitions):
            where = f"transition {k} ({t.src} -{t.symbol}-> {t.dst})"
            if t.src not in sset or t.dst not in sset:
                out.append(f"{where}: unknown state")
            if t.symbol not in gamma:
                out.append(f"{where}: unknown symbol")
            if t.dir not in (-1, 0, 1):
                out.append(f"{where}: direction {t.dir!r} not in -1, 0, +1")
            if not isinstance(t.weight, ExpSum) or t.weight.is_zero():
                out.append(f"{where}: weight must be a non-zero ExpSum")
            if t.src in self.finals:
                out.append(f"{where}: final states may not have outgoing transitions")
        return out

    @property
    def tape_alphabet(self) -> tuple[str, ...]:
        return (LEFT_END, *self.sigma, RIGHT_END)

    def out(self, state: str, symbol: str) -> tuple[WTransition, ...]:
        return self._index.get((state, symbol), ())

    def tape(self, x: str | Sequence[str]) -> tuple[str, ...]:
        bad = [c for c in x if c not in self.sigma]
        if bad:
            raise ValueError(f"input symbols {bad!r} not in alphabet {self.sigma!r}")
        return (LEFT_END, *x, RIGHT_END)

    def default_max_steps(self, n: int) -> int:
        return 10 * (n + 2) * len(self.states)


@dataclass(frozen=True)
class Evaluation:
    result: ExpSum
    scan: tuple[tuple[int, str], ...]
    steps: int
    trace: tuple[dict[str, ExpSum], ...] | None = None


def _advance(w: Wfa, active: Mapping[str, ExpSum], sym: str):
    new: dict[str, ExpSum] = {}
    moves: dict[int, list[str]] = {}
    for state, weight in active.items():
        for t in w.out(state, sym):
            moves.setdefault(t.dir, []).append(state)
            contrib = weight * t.weight
            if t.dst in new:
                new[t.dst] = new[t.dst] + contrib
            else:
                new[t.dst] = contrib
    return {k: v for k, v in new.items() if v}, moves


def evaluate(
    w: Wfa, x: str | Sequence[str], max_steps: int | None = None, trace: bool = False
) -> Evaluation:
    """Sum of weights of all initial-to-final paths along the head schedule on ``¢x$``."""
    tape = w.tape(x)
    if max_steps is None:
        max_steps = w.default_max_steps(len(tape) - 2)
    accum = ExpSum.zero()
    active: dict[str, ExpSum] = {w.initial: ExpSum.one()}
    if w.initial in w.finals:
        accum, active = ExpSum.one(), {}
    head, steps = 0, 0
    scan: list[tuple[int, str]] = []
    frames: list[dict[str, ExpSum]] | None = [] if trace else None
    while active:
        if steps >= max_steps:
            raise BudgetExhausted(steps)
        sym = tape[head]
        active, moves = _advance(w, active, sym)
        steps += 1
        if len(moves) > 1:
            raise HeadNondeterminism(steps, head, sym, moves)
        scan.append((head, sym))
        for f in [s for s in active if s in w.finals]:
            accum = accum + active.pop(f)
        if frames is not None:
            frames.append(dict(active))
        head += next(iter(moves)) if moves else 0
        if active and not 0 <= head < len(tape):
            raise WfaError(f"head moved to {head}, outside the tape at step {steps}")
    return Evaluation(accum, tuple(scan), steps, tuple(frames) if frames is not None else None)


def recognize_zero(w: Wfa, x: str | Sequence[str], max_steps: int | None = None) -> Verdict:
    """Accept exactly when the path-weight sum is the zero sum."""
    if evaluate(w, x, max_steps).result.is_zero():
        return Verdict.IN_LANGUAGE
    return Verdict.NOT_IN_LANGUAGE


@dataclass(frozen=True)
class Violation:
    step: int
    head: int
    symbol: str
    moves: dict[int, list[str]]

    def __str__(self) -> str:
        detail = ", ".join(f"dir {d:+d} from {v}" for d, v in sorted(self.moves.items()))
        return f"step {self.step} (head {self.head}, symbol {self.symbol!r}): {detail}"


def check_head_determinism(
    w: Wfa, x: str | Sequence[str], max_steps: int | None = None
) -> Violation | None:
    """Walk the structurally reachable state sets (ignoring weight cancellation).

    Returns the first step whose enabled transitions disagree on direction,
    or None when none is found within the budget.
    """
    tape = w.tape(x)
    if max_steps is None:
        max_steps = w.default_max_steps(len(tape) - 2)
    active = set() if w.initial in w.finals else {w.initial}
    head = 0
    for step_no in range(1, max_steps + 1):
        if not active or not 0 <= head < len(tape):
            return None
        sym = tape[head]
        moves: dict[int, list[str]] = {}
        nxt = set()
        for state in sorted(active):
            for t in w.out(state, sym):
                moves.setdefault(t.dir, []).append(state)
                if t.dst not in w.finals:
                    nxt.add(t.dst)
        if len(moves) > 1:
            return Violation(step_no, head, sym, {d: sorted(set(v)) for d, v in moves.items()})
        head += next(iter(moves)) if moves else 0
        active = nxt
    return None


def enumerate_paths(
    w: Wfa, x: str | Sequence[str], max_len: int
) -> Iterable[tuple[tuple[WTransition, ...], ExpSum]]:
    """Yield every path from the initial state to a final state that reads the tape
    consistently with its own head trajectory, with its weight.  Brute force:
    exponential in ``max_len``; meant as an oracle for small machines."""
    tape = w.tape(x)

    def walk(state, head, path, weight):
        if state in w.finals:
            yield tuple(path), weight
            return
        if len(path) >= max_len or not 0 <= head < len(tape):
            return
        for t in w.out(state, tape[head]):
            path.append(t)
            yield from walk(t.dst, head + t.dir, path, weight * t.weight)
            path.pop()

    yield from walk(w.initial, 0, [], ExpSum.one())


def brute_force_weight(w: Wfa, x: str | Sequence[str], max_len: int) -> ExpSum:
    total = ExpSum.zero()
    for _, weight in enumerate_paths(w, x, max_len):
        total = total + weight
    return total
