"""Two-way finite automata with quantum and classical states.

The simulator is exact and never renormalizes: after a non-halting
measurement it keeps the projected vector ``P_nh v`` as is.  Squared norms of
these unnormalized vectors are exactly the probabilities of reaching them, so
``p_acc + p_rej + |v|^2 == 1`` holds at every step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .scalar import (
    ZERO,
    Matrix,
    Vector,
    basis_vector,
    is_unitary,
    mat_apply,
    vec_norm_sq,
)

LEFT_END = "¢"
RIGHT_END = "$"
END_MARKERS = (LEFT_END, RIGHT_END)


class ModelError(Exception):
    """The machine did something a validated machine cannot do."""


class BudgetExhausted(Exception):
    """A run or evaluation hit its step budget without halting."""

    def __init__(self, steps: int):
        super().__init__(f"step budget of {steps} exhausted")
        self.steps = steps


@dataclass(frozen=True)
class Observable:
    """Partition of the quantum states into accept, reject and non-halting parts.

    A final measurement has an empty ``nh``.
    """

    acc: frozenset[str]
    rej: frozenset[str]
    nh: frozenset[str] = frozenset()

    def __init__(self, acc=(), rej=(), nh=()):
        object.__setattr__(self, "acc", frozenset(acc))
        object.__setattr__(self, "rej", frozenset(rej))
        object.__setattr__(self, "nh", frozenset(nh))

    @property
    def is_final(self) -> bool:
        return not self.nh


@dataclass(frozen=True)
class Unitary:
    matrix: Matrix


@dataclass(frozen=True)
class Measure:
    obs: Observable


ThetaEntry = Union[Unitary, Measure]


@dataclass(frozen=True)
class Move:
    """Classical transition.  For a measurement entry it is the nh continuation."""

    next: str
    dir: int


@dataclass(frozen=True)
class Qcfa:
    quantum_states: tuple[str, ...]
    classical_states: tuple[str, ...]
    sigma: tuple[str, ...]
    theta: Mapping[tuple[str, str], ThetaEntry]
    delta: Mapping[tuple[str, str], Move]
    q0: str
    s0: str
    s_acc: frozenset[str] = frozenset()
    s_rej: frozenset[str] = frozenset()
    _qindex: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("quantum_states", "classical_states", "sigma"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "s_acc", frozenset(self.s_acc))
        object.__setattr__(self, "s_rej", frozenset(self.s_rej))
        object.__setattr__(self, "theta", dict(self.theta))
        object.__setattr__(self, "delta", dict(self.delta))
        object.__setattr__(
            self, "_qindex", {q: j for j, q in enumerate(self.quantum_states)}
        )

    def __hash__(self) -> int:
        return hash((self.quantum_states, self.classical_states, self.sigma, self.q0, self.s0))

    @property
    def tape_alphabet(self) -> tuple[str, ...]:
        return (LEFT_END, *self.sigma, RIGHT_END)

    @property
    def halting_states(self) -> frozenset[str]:
        return self.s_acc | self.s_rej

    @property
    def working_states(self) -> tuple[str, ...]:
        return tuple(s for s in self.classical_states if s not in self.halting_states)

    def qindex(self, q: str) -> int:
        return self._qindex[q]

    @property
    def measurement_states(self) -> tuple[str, ...]:
        """States with a measurement entry on some tape symbol."""
        return tuple(
            s
            for s in self.working_states
            if any(isinstance(self.theta.get((s, g)), Measure) for g in self.tape_alphabet)
        )

    @property
    def unitary_states(self) -> tuple[str, ...]:
        m = set(self.measurement_states)
        return tuple(s for s in self.working_states if s not in m)

    def rejecting_qstates(self, s: str) -> tuple[str, ...]:
        """Union of the rej parts of every observable used in state ``s``, in Q order."""
        rej: set[str] = set()
        for g in self.tape_alphabet:
            entry = self.theta.get((s, g))
            if isinstance(entry, Measure):
                rej |= entry.obs.rej
        return tuple(q for q in self.quantum_states if q in rej)

    def tape(self, x: str | Sequence[str]) -> tuple[str, ...]:
        bad = [c for c in x if c not in self.sigma]
        if bad:
            raise ValueError(f"input symbols {bad!r} not in alphabet {self.sigma!r}")
        return (LEFT_END, *x, RIGHT_END)

    def default_max_steps(self, n: int) -> int:
        return 10 * (n + 2) * len(self.classical_states)


@dataclass(frozen=True)
class Diagnostic:
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


class ValidationError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


def validate(m: Qcfa) -> list[Diagnostic]:
    """Return every violated model constraint; an empty list means valid."""
    out: list[Diagnostic] = []

    def bad(where, msg):
        out.append(Diagnostic(where, msg))

    qset, sset = set(m.quantum_states), set(m.classical_states)
    if len(qset) != len(m.quantum_states) or not qset:
        bad("quantum_states", "must be non-empty and distinct")
    if len(sset) != len(m.classical_states) or not sset:
        bad("classical_states", "must be non-empty and distinct")
    for c in m.sigma:
        if c in END_MARKERS:
            bad("sigma", f"end-marker {c!r} may not be an input symbol")
        elif len(c) != 1:
            bad("sigma", f"symbol {c!r} is not a single character")
    if len(set(m.sigma)) != len(m.sigma):
        bad("sigma", "duplicate symbols")
    if m.q0 not in qset:
        bad("q0", f"unknown quantum state {m.q0!r}")
    if m.s0 not in sset:
        bad("s0", f"unknown classical state {m.s0!r}")
    for name in ("s_acc", "s_rej"):
        for s in sorted(getattr(m, name) - sset):
            bad(name, f"unknown classical state {s!r}")
    if m.s_acc & m.s_rej:
        bad("s_acc/s_rej", f"states in both: {sorted(m.s_acc & m.s_rej)}")

    gamma = m.tape_alphabet
    n = len(m.quantum_states)
    for key in m.theta:
        if key[0] not in sset or key[1] not in gamma:
            bad(f"theta[{key[0]}:{key[1]}]", "unknown state or symbol")
    for key in m.delta:
        if key[0] not in sset or key[1] not in gamma:
            bad(f"delta[{key[0]}:{key[1]}]", "unknown state or symbol")

    for s in m.working_states:
        for g in gamma:
            where = f"({s}, {g})"
            entry = m.theta.get((s, g))
            move = m.delta.get((s, g))
            if entry is None:
                bad(where, "theta undefined")
            elif isinstance(entry, Unitary):
                u = entry.matrix
                if u.rows != n or u.cols != n:
                    bad(where, f"matrix is {u.rows}x{u.cols}, expected {n}x{n}")
                elif not is_unitary(u):
                    bad(where, "matrix is not unitary")
            elif isinstance(entry, Measure):
                obs = entry.obs
                parts = (obs.acc, obs.rej, obs.nh)
                if (
                    obs.acc & obs.rej
                    or obs.acc & obs.nh
                    or obs.rej & obs.nh
                    or frozenset().union(*parts) != qset
                ):
                    bad(where, "observable is not a partition of the quantum states")
                if obs.nh and m.q0 not in obs.nh:
                    bad(where, f"q0={m.q0!r} is not in the non-halting part")
            else:
                bad(where, f"theta entry {entry!r} is neither unitary nor measurement")
            if move is None:
                bad(where, "delta undefined")
                continue
            if move.next not in sset:
                bad(where, f"delta targets unknown state {move.next!r}")
            if move.dir not in (-1, 0, 1):
                bad(where, f"direction {move.dir!r} not in -1, 0, +1")
            elif g == LEFT_END and move.dir == -1:
                bad(where, "moves left of the left end-marker")
            elif g == RIGHT_END and move.dir == 1:
                bad(where, "moves right of the right end-marker")
    return out


def check_valid(m: Qcfa) -> Qcfa:
    diags = validate(m)
    if diags:
        raise ValidationError(diags)
    return m


def measure(
    v: Sequence, obs: Observable, qstates: Sequence[str]
) -> tuple[Fraction, Fraction, Vector]:
    """Project ``v`` onto the three parts of ``obs``.

    Returns the accept and reject probabilities and the unnormalized
    non-halting projection.
    """
    p_acc = p_rej = Fraction(0)
    v_nh = []
    for q, z in zip(qstates, v):
        if q in obs.nh:
            v_nh.append(z)
            continue
        v_nh.append(ZERO)
        if q in obs.acc:
            p_acc += z.norm_sq()
        elif q in obs.rej:
            p_rej += z.norm_sq()
    return p_acc, p_rej, tuple(v_nh)


@dataclass(frozen=True)
class SimConfig:
    state: str
    head: int
    v: Vector
    p_acc: Fraction = Fraction(0)
    p_rej: Fraction = Fraction(0)
    steps: int = 0

    def halted(self, m: Qcfa) -> bool:
        return self.state in m.halting_states or not any(self.v)


@dataclass(frozen=True)
class TraceRow:
    """One simulator step: the state and head it ran in and the vector it left."""

    step: int
    state: str
    head: int
    symbol: str
    v: Vector


class Halt(enum.Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    MIXED_FINAL = "mixedFinal"
    BUDGET_EXHAUSTED = "budgetExhausted"


class Verdict(enum.Enum):
    IN_LANGUAGE = "in language"
    NOT_IN_LANGUAGE = "not in language"


@dataclass(frozen=True)
class SimResult:
    p_acc: Fraction
    p_rej: Fraction
    halt: Halt
    steps: int
    trace: tuple[TraceRow, ...] | None = None


def initial_config(m: Qcfa) -> SimConfig:
    return SimConfig(m.s0, 0, basis_vector(len(m.quantum_states), m.qindex(m.q0)))


def step(c: SimConfig, m: Qcfa, tape: Sequence[str]) -> SimConfig:
    """Apply one Θ/δ step.  Entering a classical halting state settles its mass."""
    if c.state in m.halting_states:
        raise ModelError(f"step from halting state {c.state!r}")
    if not 0 <= c.head < len(tape):
        raise ModelError(f"head at {c.head} outside tape of length {len(tape)}")
    sym = tape[c.head]
    entry = m.theta[(c.state, sym)]
    move = m.delta[(c.state, sym)]
    p_acc, p_rej = c.p_acc, c.p_rej
    if isinstance(entry, Unitary):
        v = mat_apply(entry.matrix, c.v)
    else:
        da, dr, v = measure(c.v, entry.obs, m.quantum_states)
        p_acc, p_rej = p_acc + da, p_rej + dr
    head = c.head + move.dir
    if not 0 <= head < len(tape):
        raise ModelError(f"({c.state}, {sym}) moves head to {head}, outside the tape")
    if move.next in m.s_acc:
        p_acc += vec_norm_sq(v)
        v = tuple(ZERO for _ in v)
    elif move.next in m.s_rej:
        p_rej += vec_norm_sq(v)
        v = tuple(ZERO for _ in v)
    return SimConfig(move.next, head, v, p_acc, p_rej, c.steps + 1)


def _halt_kind(p_acc: Fraction, p_rej: Fraction) -> Halt:
    if p_rej == 0:
        return Halt.ACCEPTED
    if p_acc == 0:
        return Halt.REJECTED
    return Halt.MIXED_FINAL


def run(
    m: Qcfa, x: str | Sequence[str], max_steps: int | None = None, trace: bool = False
) -> SimResult:
    """Run ``m`` on ``x`` from ``(s0, head on ¢, |q0>)`` until it halts.

    The machine halts when it enters a classical accept/reject state or when
    no amplitude is left (always the case after a final measurement).
    """
    tape = m.tape(x)
    if max_steps is None:
        max_steps = m.default_max_steps(len(tape) - 2)
    c = initial_config(m)
    rows: list[TraceRow] | None = [] if trace else None
    while not c.halted(m):
        if c.steps >= max_steps:
            return SimResult(
                c.p_acc, c.p_rej, Halt.BUDGET_EXHAUSTED, c.steps,
                tuple(rows) if rows is not None else None,
            )
        nxt = step(c, m, tape)
        if rows is not None:
            rows.append(TraceRow(nxt.steps, c.state, c.head, tape[c.head], nxt.v))
        c = nxt
    return SimResult(
        c.p_acc, c.p_rej, _halt_kind(c.p_acc, c.p_rej), c.steps,
        tuple(rows) if rows is not None else None,
    )


def membership_verdict(r: SimResult) -> Verdict:
    """One-sided error: members are accepted with probability exactly 1."""
    if r.halt is Halt.BUDGET_EXHAUSTED:
        raise BudgetExhausted(r.steps)
    return Verdict.IN_LANGUAGE if r.p_rej == 0 else Verdict.NOT_IN_LANGUAGE


# the two rotations of the three-state palindrome recognizer
PAL_A = Matrix([[4, 3, 0], [-3, 4, 0], [0, 0, 5]]).scale(Fraction(1, 5))
PAL_B = Matrix([[4, 0, 3], [0, 5, 0], [-3, 0, 4]]).scale(Fraction(1, 5))


def build_palindrome_machine() -> Qcfa:
    """Palindromes over {a, b} with one-sided error.

    ``scan1`` applies A/B left to right, ``rewind`` returns to ¢ doing
    nothing to the quantum part, ``scan2`` applies the inverses A^T/B^T left
    to right, and ``final`` measures with q0 accepting.  For a palindrome the
    second scan undoes the first exactly, so q0 is observed with certainty.
    """
    qs = ("q0", "q1", "q2")
    ident = Unitary(Matrix.identity(3))
    ua, ub = Unitary(PAL_A), Unitary(PAL_B)
    uat, ubt = Unitary(PAL_A.transpose()), Unitary(PAL_B.transpose())
    final_obs = Measure(Observable(acc={"q0"}, rej={"q1", "q2"}))
    theta: dict = {}
    delta: dict = {}

    def put(s, g, entry, nxt, d):
        theta[(s, g)] = entry
        delta[(s, g)] = Move(nxt, d)

    put("scan1", LEFT_END, ident, "scan1", 1)
    put("scan1", "a", ua, "scan1", 1)
    put("scan1", "b", ub, "scan1", 1)
    put("scan1", RIGHT_END, ident, "rewind", -1)

    put("rewind", LEFT_END, ident, "scan2", 1)
    put("rewind", "a", ident, "rewind", -1)
    put("rewind", "b", ident, "rewind", -1)
    put("rewind", RIGHT_END, ident, "rewind", -1)

    put("scan2", LEFT_END, ident, "scan2", 1)
    put("scan2", "a", uat, "scan2", 1)
    put("scan2", "b", ubt, "scan2", 1)
    put("scan2", RIGHT_END, ident, "final", 0)

    for g in (LEFT_END, "a", "b", RIGHT_END):
        put("final", g, final_obs, "accept", 0)

    return Qcfa(
        quantum_states=qs,
        classical_states=("scan1", "rewind", "scan2", "final", "accept"),
        sigma=("a", "b"),
        theta=theta,
        delta=delta,
        q0="q0",
        s0="scan1",
        s_acc={"accept"},
    )


def with_entry(m: Qcfa, state: str, symbol: str, entry: ThetaEntry) -> Qcfa:
    """Copy of ``m`` with one Θ entry replaced."""
    theta = dict(m.theta)
    theta[(state, symbol)] = entry
    return replace(m, theta=theta)
