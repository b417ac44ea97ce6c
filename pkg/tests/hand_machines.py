"""Small head-deterministic weighted automata used as Eq.-(1)-style oracle subjects."""

from fractions import Fraction as F

from qcwfa.qcfa import LEFT_END as L, RIGHT_END as R
from qcwfa.scalar import ExpSum, GaussianRational as G
from qcwfa.wfa import WTransition as T, Wfa


def c(re, im=0):
    return ExpSum.const(G(re, im))


def one_way() -> Wfa:
    """Right-moving with two branches that may rejoin at the right end-marker."""
    return Wfa(
        states=("p", "r", "f"),
        sigma=("a", "b"),
        initial="p",
        finals={"f"},
        transitions=(
            T("p", L, c(1), "p", 1),
            T("p", "a", c(2), "p", 1),
            T("p", "a", c(0, 1), "r", 1),
            T("p", "b", c(F(1, 3)), "p", 1),
            T("r", "b", c(F(3, 5), F(-4, 5)), "r", 1),
            T("r", "a", c(-1), "p", 1),
            T("p", R, ExpSum.exp(1, -1), "f", 0),
            T("r", R, ExpSum({1: 1, 2: F(1, 2)}), "f", 0),
        ),
    )


def bounce() -> Wfa:
    """Sweeps right, then left back to the left end-marker before finishing."""
    return Wfa(
        states=("p", "r", "f"),
        sigma=("a", "b"),
        initial="p",
        finals={"f"},
        transitions=(
            T("p", L, c(1), "p", 1),
            T("p", "a", c(F(1, 2)), "p", 1),
            T("p", "b", c(0, 1), "p", 1),
            T("p", R, c(F(-2, 3)), "r", -1),
            T("p", R, ExpSum.exp(3, 5), "f", -1),
            T("r", "a", c(1, 1), "r", -1),
            T("r", "b", c(3), "r", -1),
            T("r", L, ExpSum.exp(2), "f", 0),
        ),
    )


def cancel() -> Wfa:
    """Stationary branch-and-merge: partial cancellation on 'a', total on 'b'."""
    return Wfa(
        states=("p", "q", "r", "f"),
        sigma=("a", "b"),
        initial="p",
        finals={"f"},
        transitions=(
            T("p", L, c(1), "p", 1),
            T("p", "a", c(1), "q", 0),
            T("p", "a", c(1), "r", 0),
            T("p", "b", c(2), "q", 0),
            T("p", "b", c(1), "r", 0),
            T("q", "a", c(1), "p", 1),
            T("r", "a", c(F(-1, 2), 1), "p", 1),
            T("r", "a", ExpSum.exp(1, F(1, 3)), "f", 1),
            T("q", "b", c(1), "p", 1),
            T("r", "b", c(-2), "p", 1),
            T("p", R, ExpSum.exp(2, F(-3, 4)), "f", 0),
        ),
    )


HAND_MACHINES = {"one_way": one_way, "bounce": bounce, "cancel": cancel}


def conflicting() -> Wfa:
    """The two transitions out of the initial state on ¢ disagree on direction."""
    return Wfa(
        states=("p", "q", "r"),
        sigma=("a",),
        initial="p",
        finals=set(),
        transitions=(
            T("p", L, c(1), "q", 1),
            T("p", L, c(1), "r", 0),
            T("q", "a", c(1), "q", 1),
        ),
    )
