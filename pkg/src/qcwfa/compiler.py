"""Compile a 2QCFA into an equivalent 2-way weighted automaton.

Each classical state ``s`` gets a block of ``2|Q|`` weighted states: the
``q`` copies carry amplitudes into the block, the ``s`` copies carry them out.
Θ becomes intra-block edges (head still) and δ becomes weight-1 inter-block
edges (head moves).  Rejecting outcomes of a measurement are routed into
dedicated final states with weight ``e**tag`` for pairwise distinct tags, so
the total weight is zero exactly when every rejection amplitude is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .qcfa import (
    BudgetExhausted,
    Halt,
    Measure,
    Qcfa,
    Unitary,
    Verdict,
    check_valid,
    membership_verdict,
    run,
)
from .scalar import ZERO, ExpSum, GaussianRational
from .wfa import Evaluation, HeadNondeterminism, WTransition, Wfa, WfaError, evaluate


class CompileError(ValueError):
    pass


@dataclass(frozen=True)
class BlockLayout:
    """Names of the weighted states for each (classical, quantum) pair."""

    def q_state(self, s: str, q: str) -> str:
        return f"q[{s}|{q}]"

    def s_state(self, s: str, q: str) -> str:
        return f"s[{s}|{q}]"

    def f_state(self, s: str, q: str) -> str:
        return f"f[{s}|{q}]"


LAYOUT = BlockLayout()


def assign_exponents(m: Qcfa) -> dict[tuple[str, str], int]:
    """Tags 1, 2, ... for each (measurement state, rejecting quantum state), in
    declaration order of classical then quantum states."""
    tags: dict[tuple[str, str], int] = {}
    for s in m.measurement_states:
        for q in m.rejecting_qstates(s):
            tags[(s, q)] = len(tags) + 1
    return tags


def compile_qcfa(m: Qcfa) -> Wfa:
    check_valid(m)
    for (s, g), move in sorted(m.delta.items()):
        if s in m.working_states and move.next in m.s_rej:
            raise CompileError(
                f"({s}, {g}) enters classical rejecting state {move.next!r}; "
                "only measurement rejection can be compiled"
            )
    tags = assign_exponents(m)
    L = LAYOUT
    qs = m.quantum_states
    states: list[str] = []
    for s in m.classical_states:
        states += [L.q_state(s, q) for q in qs]
        states += [L.s_state(s, q) for q in qs]
    states += [L.f_state(s, q) for s, q in tags]

    edges: list[WTransition] = []
    one = ExpSum.one()
    for s in m.working_states:
        for g in m.tape_alphabet:
            entry = m.theta[(s, g)]
            if isinstance(entry, Unitary):
                u = entry.matrix
                # column j1 of U is the image of basis vector j1
                for j1, j2 in product(range(len(qs)), repeat=2):
                    a = u[j2, j1]
                    if a:
                        edges.append(
                            WTransition(L.q_state(s, qs[j1]), g, ExpSum.const(a), L.s_state(s, qs[j2]), 0)
                        )
            elif isinstance(entry, Measure):
                obs = entry.obs
                for q in qs:
                    if q in obs.nh:
                        edges.append(WTransition(L.q_state(s, q), g, one, L.s_state(s, q), 0))
                    elif q in obs.rej:
                        edges.append(
                            WTransition(L.q_state(s, q), g, ExpSum.exp(tags[(s, q)]), L.f_state(s, q), 0)
                        )
                    # accepting outcomes carry weight 0 and are left out
            else:  # pragma: no cover - check_valid rejects this
                raise CompileError(f"unsupported theta entry at ({s}, {g})")
            move = m.delta[(s, g)]
            for q in qs:
                edges.append(WTransition(L.s_state(s, q), g, one, L.q_state(move.next, q), move.dir))

    return Wfa(
        states=tuple(states),
        sigma=m.sigma,
        initial=L.q_state(m.s0, m.q0),
        finals=frozenset(L.f_state(s, q) for s, q in tags),
        transitions=tuple(edges),
    )


def expected_size(m: Qcfa) -> int:
    return 2 * len(m.classical_states) * len(m.quantum_states) + len(assign_exponents(m))


def block_kinds(m: Qcfa) -> dict[str, str]:
    """Classify each block: ``unitary`` (some non-identity unitary), ``trivial``
    (identity on every symbol), ``measurement`` or ``halting``."""
    kinds = {}
    for s in m.classical_states:
        if s in m.halting_states:
            kinds[s] = "halting"
        elif s in m.measurement_states:
            kinds[s] = "measurement"
        elif all(m.theta[(s, g)].matrix.is_identity() for g in m.tape_alphabet):
            kinds[s] = "trivial"
        else:
            kinds[s] = "unitary"
    return kinds


def block_vector(active, s: str, qstates: Sequence[str]) -> tuple[GaussianRational, ...]:
    """Outgoing half of block ``s`` as an amplitude vector (plain weights only)."""
    out = []
    for q in qstates:
        w = active.get(LAYOUT.s_state(s, q), ExpSum.zero())
        if any(tag != 0 for tag in w.terms):
            raise ValueError(f"exponential weight inside block {s!r}: {w}")
        out.append(w.coeff(0) if w else ZERO)
    return tuple(out)


def stepwise_mismatches(m: Qcfa, sim_trace, wfa_trace) -> list[str]:
    """Compare each simulator step with the weighted run after its intra-block edge.

    Simulator step ``k`` (1-based) lines up with weighted step ``2k - 1``.
    """
    problems = []
    for row in sim_trace:
        t = 2 * row.step - 1
        if t > len(wfa_trace):
            problems.append(f"step {row.step}: weighted run ended after {len(wfa_trace)} steps")
            break
        got = block_vector(wfa_trace[t - 1], row.state, m.quantum_states)
        if got != tuple(row.v):
            problems.append(
                f"step {row.step} in {row.state}: weights {[str(z) for z in got]} "
                f"!= amplitudes {[str(z) for z in row.v]}"
            )
    return problems


@dataclass(frozen=True)
class CheckRow:
    string: str
    sim_verdict: Verdict | None
    wfa_verdict: Verdict | None
    p_rej: Fraction | None
    weight: ExpSum | None
    problems: tuple[str, ...] = ()

    @property
    def agree(self) -> bool:
        return (
            self.sim_verdict is not None
            and self.sim_verdict == self.wfa_verdict
            and not self.problems
        )


@dataclass
class CheckReport:
    rows: list[CheckRow] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def agreeing(self) -> int:
        return sum(r.agree for r in self.rows)

    @property
    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.agree]

    @property
    def ok(self) -> bool:
        return not self.failures


def strings_upto(sigma: Sequence[str], max_len: int) -> Iterator[str]:
    """Σ* up to ``max_len``, by length then lexicographically."""
    for n in range(max_len + 1):
        for letters in product(sorted(sigma), repeat=n):
            yield "".join(letters)


def check_string(
    m: Qcfa, w: Wfa, x: str, max_steps: int | None = None, stepwise: bool = True
) -> CheckRow:
    problems: list[str] = []
    sim = run(m, x, max_steps, trace=stepwise)
    if sim.halt is Halt.BUDGET_EXHAUSTED:
        return CheckRow(x, None, None, None, None, ("simulator budget exhausted",))
    sim_v = membership_verdict(sim)
    wfa_steps = None if max_steps is None else 2 * max_steps + 1
    try:
        ev: Evaluation = evaluate(w, x, wfa_steps, trace=stepwise)
    except BudgetExhausted:
        return CheckRow(x, sim_v, None, sim.p_rej, None, ("weighted budget exhausted",))
    except (HeadNondeterminism, WfaError) as exc:
        return CheckRow(x, sim_v, None, sim.p_rej, None, (str(exc),))
    wfa_v = Verdict.IN_LANGUAGE if ev.result.is_zero() else Verdict.NOT_IN_LANGUAGE
    if stepwise:
        try:
            problems += stepwise_mismatches(m, sim.trace, ev.trace)
        except ValueError as exc:
            problems.append(str(exc))
    return CheckRow(x, sim_v, wfa_v, sim.p_rej, ev.result, tuple(problems))


def cross_check(
    m: Qcfa,
    max_len: int,
    max_steps: int | None = None,
    wfa: Wfa | None = None,
    stepwise: bool = True,
) -> CheckReport:
    """Check zero-sum ⇔ p_rej = 0 on every string up to ``max_len``, and
    optionally the step-by-step weight/amplitude correspondence."""
    w = wfa if wfa is not None else compile_qcfa(m)
    report = CheckReport()
    for x in strings_upto(m.sigma, max_len):
        report.rows.append(check_string(m, w, x, max_steps, stepwise))
    return report
