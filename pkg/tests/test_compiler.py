import random
from dataclasses import replace
from fractions import Fraction as F

import pytest

from qcwfa import formats
from qcwfa.compiler import (
    LAYOUT,
    CompileError,
    assign_exponents,
    block_kinds,
    check_string,
    compile_qcfa,
    cross_check,
    expected_size,
    strings_upto,
)
from qcwfa.generate import random_machine
from qcwfa.qcfa import (
    RIGHT_END,
    Measure,
    Move,
    Observable,
    ValidationError,
    Unitary,
    build_palindrome_machine,
    run,
    with_entry,
)
from qcwfa.scalar import ExpSum, GaussianRational as G, Matrix
from qcwfa.wfa import WTransition, Wfa, check_head_determinism, evaluate

PAL = build_palindrome_machine()
PAL_W = compile_qcfa(PAL)


def test_exponents_palindrome():
    assert assign_exponents(PAL) == {("final", "q1"): 1, ("final", "q2"): 2}


def test_exponents_none():
    m = replace(PAL, theta={k: v for k, v in PAL.theta.items() if k[0] != "final"} | {
        ("final", g): Unitary(Matrix.identity(3)) for g in PAL.tape_alphabet
    })
    assert assign_exponents(m) == {}


def test_exponents_two_measurement_states():
    theta = dict(PAL.theta)
    for g in PAL.tape_alphabet:
        theta[("rewind", g)] = Measure(Observable(acc=(), rej={"q1", "q2"}, nh={"q0"}))
    m = replace(PAL, theta=theta)
    tags = assign_exponents(m)
    assert tags == {("rewind", "q1"): 1, ("rewind", "q2"): 2, ("final", "q1"): 3, ("final", "q2"): 4}


def test_block_structure():
    kinds = block_kinds(PAL)
    assert sorted(s for s, k in kinds.items() if k == "unitary") == ["scan1", "scan2"]
    assert kinds["rewind"] == "trivial"
    assert kinds["final"] == "measurement"


def test_a_entry_edge():
    edge = WTransition(
        LAYOUT.q_state("scan1", "q0"), "a", ExpSum.const(F(4, 5)), LAYOUT.s_state("scan1", "q0"), 0
    )
    assert edge in PAL_W.transitions


def test_column_convention():
    # A sends |q0> to 4/5|q0> - 3/5|q1>, so q0 -> q1 carries A[1][0] = -3/5
    edge = WTransition(
        LAYOUT.q_state("scan1", "q0"), "a", ExpSum.const(F(-3, 5)), LAYOUT.s_state("scan1", "q1"), 0
    )
    assert edge in PAL_W.transitions


def test_trivial_block_edges():
    q, s = LAYOUT.q_state, LAYOUT.s_state
    rewind_a = [t for t in PAL_W.transitions if t.src.startswith("q[rewind") and t.symbol == "a"]
    assert sorted((t.src, t.dst) for t in rewind_a) == sorted(
        (q("rewind", j), s("rewind", j)) for j in PAL.quantum_states
    )
    assert all(t.weight == ExpSum.one() for t in rewind_a)


def test_size_formula():
    assert len(PAL_W.states) == 2 * 5 * 3 + 2 == expected_size(PAL)
    rng = random.Random(11)
    for _ in range(10):
        m = random_machine(rng)
        assert len(compile_qcfa(m).states) == expected_size(m)


def test_structure_observations():
    for m in (PAL, random_machine(random.Random(5)), random_machine(random.Random(6))):
        w = compile_qcfa(m)
        for t in w.transitions:
            if t.src.startswith("q["):
                assert t.dir == 0
            else:
                assert t.src.startswith("s[") and t.weight == ExpSum.one()
        assert all(t.weight.terms.keys() <= {0} for t in w.transitions if not t.dst.startswith("f["))


def test_head_determinism_random():
    rng = random.Random(8)
    for _ in range(5):
        m = random_machine(rng)
        w = compile_qcfa(m)
        for x in strings_upto(m.sigma, 4):
            assert check_head_determinism(w, x) is None


def test_compile_deterministic():
    assert formats.render_wfa(compile_qcfa(PAL)) == formats.render_wfa(compile_qcfa(build_palindrome_machine()))


def test_rejects_invalid_machine():
    with pytest.raises(ValidationError):
        compile_qcfa(with_entry(PAL, "scan1", "a", Unitary(Matrix.identity(3).scale(2))))


def test_rejects_classical_reject_state():
    delta = dict(PAL.delta)
    delta[("scan1", RIGHT_END)] = Move("reject", 0)
    m = replace(
        PAL, classical_states=PAL.classical_states + ("reject",), s_rej={"reject"}, delta=delta
    )
    with pytest.raises(CompileError, match="reject"):
        compile_qcfa(m)


def test_strings_upto_order():
    assert list(strings_upto("ba", 2)) == ["", "a", "b", "aa", "ab", "ba", "bb"]


def test_cross_check_palindrome():
    report = cross_check(PAL, 8)
    assert report.total == 511 and report.agreeing == 511 and report.ok


def test_cross_check_random_machines():
    rng = random.Random(21)
    for _ in range(6):
        m = random_machine(rng)
        report = cross_check(m, 3)
        assert report.ok, [r.problems for r in report.failures]


def test_cross_check_catches_corruption():
    ts = list(PAL_W.transitions)
    k = next(i for i, t in enumerate(ts) if t.src == LAYOUT.q_state("scan2", "q0") and t.symbol == "b"
             and t.dst == LAYOUT.s_state("scan2", "q0"))
    ts[k] = replace(ts[k], weight=ExpSum.const(F(3, 5)))
    bad = Wfa(PAL_W.states, PAL_W.sigma, PAL_W.initial, PAL_W.finals, tuple(ts))
    report = cross_check(PAL, 3, wfa=bad)
    failing = {r.string for r in report.failures}
    assert "b" in failing and "bb" in failing
    assert "" not in failing and "a" not in failing


def test_trace_alignment_ab():
    row = check_string(PAL, PAL_W, "ab")
    assert row.agree and not row.problems
    assert row.weight == ExpSum({1: G(F(-12, 125)), 2: G(F(87, 625))})
    sim = run(PAL, "ab", trace=True)
    ev = evaluate(PAL_W, "ab", trace=True)
    # the last aligned step is the measurement; rejection weights sit in the finals
    assert sim.trace[-1].state == "final"
    pre_measure = sim.trace[-2].v
    assert (pre_measure[1], pre_measure[2]) == (G(F(-12, 125)), G(F(87, 625)))
    assert len(ev.trace) == 2 * len(sim.trace) - 1


def test_stepwise_mismatch_reported():
    # flips the sign of A's q2 -> q2 entry; "ba" is rejected either way, only the
    # intermediate amplitudes differ
    ts = list(PAL_W.transitions)
    k = next(i for i, t in enumerate(ts) if t.src == LAYOUT.q_state("scan1", "q2") and t.symbol == "a")
    ts[k] = replace(ts[k], weight=ExpSum.const(-1))
    bad = Wfa(PAL_W.states, PAL_W.sigma, PAL_W.initial, PAL_W.finals, tuple(ts))
    row = check_string(PAL, bad, "ba")
    assert any("amplitudes" in p for p in row.problems)
    assert not row.agree
