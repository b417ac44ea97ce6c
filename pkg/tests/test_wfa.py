import itertools
import random
from fractions import Fraction as F

import pytest
from hand_machines import HAND_MACHINES, bounce, c, cancel, conflicting, one_way

from qcwfa.compiler import compile_qcfa
from qcwfa.qcfa import LEFT_END as L, RIGHT_END as R, BudgetExhausted, Verdict, build_palindrome_machine
from qcwfa.scalar import ExpSum, GaussianRational as G
from qcwfa.wfa import (
    HeadNondeterminism,
    WTransition as T,
    Wfa,
    WfaError,
    brute_force_weight,
    check_head_determinism,
    enumerate_paths,
    evaluate,
    recognize_zero,
)

PAL = build_palindrome_machine()
PAL_W = compile_qcfa(PAL)


def inputs(sigma, max_len):
    for n in range(max_len + 1):
        for t in itertools.product(sigma, repeat=n):
            yield "".join(t)


def test_evaluate_palindrome_examples():
    assert evaluate(PAL_W, "aa").result.is_zero()
    assert evaluate(PAL_W, "ab").result == ExpSum({1: G(F(-12, 125)), 2: G(F(87, 625))})
    assert evaluate(PAL_W, "").result.is_zero()


def test_recognize_zero():
    assert recognize_zero(PAL_W, "abba") is Verdict.IN_LANGUAGE
    assert recognize_zero(PAL_W, "ab") is Verdict.NOT_IN_LANGUAGE
    assert recognize_zero(PAL_W, "a") is Verdict.IN_LANGUAGE


@pytest.mark.parametrize("name", sorted(HAND_MACHINES))
def test_matches_path_enumeration(name):
    w = HAND_MACHINES[name]()
    for x in inputs(w.sigma, 3):
        ev = evaluate(w, x)
        assert ev.result == brute_force_weight(w, x, max_len=4 * (len(x) + 2)), x


def test_hand_values():
    # one_way on "a": p -¢-> p -a-> {p: 2, r: i}; at $: 2*(-e^1) + i*(e^1 + e^2/2)
    assert evaluate(one_way(), "a").result == ExpSum({1: G(-2, 1), 2: G(0, F(1, 2))})
    # cancel on "b": the two branches cancel exactly
    assert evaluate(cancel(), "b").result.is_zero()
    assert evaluate(cancel(), "").result == ExpSum({2: F(-3, 4)})
    # bounce on "": -2/3 * e^2 from the turn-around path plus 5 e^3
    assert evaluate(bounce(), "").result == ExpSum({2: F(-2, 3), 3: 5})


def test_path_enumeration_counts_paths():
    paths = list(enumerate_paths(one_way(), "ab", max_len=10))
    # through p on both letters, or branching to r on 'a'
    assert len(paths) == 2


def test_scan_record():
    ev = evaluate(bounce(), "ab")
    assert [p for p, _ in ev.scan] == [0, 1, 2, 3, 2, 1, 0]
    assert [s for _, s in ev.scan] == [L, "a", "b", R, "b", "a", L]
    assert ev.steps == len(ev.scan)


def test_head_nondeterminism():
    with pytest.raises(HeadNondeterminism) as info:
        evaluate(conflicting(), "a")
    assert info.value.step == 1
    v = check_head_determinism(conflicting(), "a")
    assert v is not None and v.step == 1 and set(v.moves) == {0, 1}


def test_head_determinism_ok():
    for x in inputs("ab", 8):
        assert check_head_determinism(PAL_W, x) is None
    empty = Wfa(states=("p",), sigma=("a",), initial="p", finals=set(), transitions=())
    assert check_head_determinism(empty, "aa") is None
    assert evaluate(empty, "aa").result.is_zero()


def test_shuffled_transition_order():
    rng = random.Random(3)
    for make in (one_way, bounce, cancel):
        w = make()
        ts = list(w.transitions)
        for _ in range(5):
            rng.shuffle(ts)
            w2 = Wfa(w.states, w.sigma, w.initial, w.finals, tuple(ts))
            for x in inputs(w.sigma, 3):
                assert evaluate(w2, x).result == evaluate(w, x).result
    ts = list(PAL_W.transitions)
    rng.shuffle(ts)
    w2 = Wfa(PAL_W.states, PAL_W.sigma, PAL_W.initial, PAL_W.finals, tuple(ts))
    for x in ("ab", "abba", "babb"):
        assert evaluate(w2, x).result == evaluate(PAL_W, x).result


def test_budget():
    loop = Wfa(("p",), ("a",), "p", set(), (T("p", L, c(1), "p", 0),))
    with pytest.raises(BudgetExhausted):
        evaluate(loop, "a", max_steps=50)


def test_structural_problems():
    with pytest.raises(WfaError, match="final states"):
        Wfa(("p", "f"), ("a",), "p", {"f"}, (T("f", "a", c(1), "p", 1),))
    with pytest.raises(WfaError, match="non-zero"):
        Wfa(("p",), ("a",), "p", set(), (T("p", "a", ExpSum.zero(), "p", 1),))
    with pytest.raises(WfaError, match="unknown state"):
        Wfa(("p",), ("a",), "p", set(), (T("p", "a", c(1), "z", 1),))


def test_head_off_tape():
    w = Wfa(("p",), ("a",), "p", set(), (T("p", L, c(1), "p", -1),))
    with pytest.raises(WfaError, match="outside the tape"):
        evaluate(w, "a")


def test_trace_frames():
    ev = evaluate(PAL_W, "a", trace=True)
    assert len(ev.trace) == ev.steps
    assert ev.trace[0] == {"s[scan1|q0]": ExpSum.one()}
    assert ev.trace[-1] == {}


def test_step_count_linear():
    counts = {}
    for n in (0, 1, 2, 5, 10):
        counts[n] = evaluate(PAL_W, "ab" * (n // 2) + "a" * (n % 2)).steps
    # every 2QCFA step is two weighted steps; the final measurement is one
    assert all(counts[n] == 2 * (3 * n + 5) - 1 for n in counts)
