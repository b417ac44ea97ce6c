"""Random valid 2QCFA for property tests.

Machines sweep the tape a few times.  Each sweep applies a random unitary per
symbol, optionally measures at the right end-marker (q0 always continues),
then rewinds.  The last sweep ends in a final measurement.  Unitaries are
products of rational Givens rotations, Gaussian-rational phases and
permutations, so they are exactly unitary over Q(i).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .qcfa import LEFT_END, RIGHT_END, Measure, Move, Observable, Qcfa, Unitary
from .scalar import GaussianRational, Matrix

_TRIPLES = ((3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29))
_PHASES = (
    GaussianRational(Fraction(3, 5), Fraction(4, 5)),
    GaussianRational(Fraction(5, 13), Fraction(-12, 13)),
    GaussianRational(0, 1),
    GaussianRational(-1),
    GaussianRational(1),
)


def givens(n: int, i: int, j: int, a: int, b: int, c: int) -> Matrix:
    rows = [[Fraction(int(r == k)) for k in range(n)] for r in range(n)]
    rows[i][i] = rows[j][j] = Fraction(a, c)
    rows[i][j], rows[j][i] = Fraction(b, c), Fraction(-b, c)
    return Matrix(rows)


def random_unitary(rng: random.Random, n: int, factors: int = 2) -> Matrix:
    u = Matrix.identity(n)
    for _ in range(factors):
        i, j = rng.sample(range(n), 2)
        a, b, c = rng.choice(_TRIPLES)
        if rng.random() < 0.5:
            a, b = b, a
        u = givens(n, i, j, a, b, c) @ u
        u = Matrix.diag([rng.choice(_PHASES) for _ in range(n)]) @ u
    perm = list(range(n))
    rng.shuffle(perm)
    return Matrix([[int(perm[r] == k) for k in range(n)] for r in range(n)]) @ u


def random_machine(
    rng: random.Random,
    n_quantum: int | None = None,
    sigma: str | None = None,
    sweeps: int | None = None,
) -> Qcfa:
    n = n_quantum or rng.randint(2, 4)
    sigma = sigma or rng.choice(["ab", "abc", "a"])
    sweeps = sweeps or rng.randint(1, 3)
    qs = tuple(f"q{j}" for j in range(n))
    gamma = (LEFT_END, *sigma, RIGHT_END)
    ident = Unitary(Matrix.identity(n))
    theta: dict = {}
    delta: dict = {}
    states: list[str] = []

    def put(s, g, entry, nxt, d):
        theta[(s, g)] = entry
        delta[(s, g)] = Move(nxt, d)

    for k in range(sweeps):
        sweep, back = f"sweep{k}", f"back{k}"
        last = k == sweeps - 1
        states.append(sweep)
        put(sweep, LEFT_END, ident, sweep, 1)
        for c in sigma:
            put(sweep, c, Unitary(random_unitary(rng, n)), sweep, 1)
        if last:
            put(sweep, RIGHT_END, ident, "final", 0)
            break
        if rng.random() < 0.5:
            mid = f"measure{k}"
            states.append(mid)
            put(sweep, RIGHT_END, Unitary(random_unitary(rng, n, 1)), mid, 0)
            others = list(qs[1:])
            rng.shuffle(others)
            cut1 = rng.randint(0, len(others))
            cut2 = rng.randint(cut1, len(others))
            obs = Observable(acc=others[:cut1], rej=others[cut1:cut2], nh=[qs[0], *others[cut2:]])
            for g in gamma:
                put(mid, g, Measure(obs), back, 0)
        else:
            put(sweep, RIGHT_END, ident, back, -1)
        states.append(back)
        put(back, LEFT_END, ident, f"sweep{k + 1}", 1)
        for c in sigma:
            put(back, c, ident, back, -1)
        put(back, RIGHT_END, ident, back, -1)

    shuffled = list(qs)
    rng.shuffle(shuffled)
    cut = rng.randint(1, n)
    final_obs = Observable(acc=shuffled[cut:], rej=shuffled[:cut])
    for g in gamma:
        put("final", g, Measure(final_obs), "done", 0)
    states += ["final", "done"]
    return Qcfa(
        quantum_states=qs,
        classical_states=tuple(states),
        sigma=tuple(sigma),
        theta=theta,
        delta=delta,
        q0=qs[0],
        s0="sweep0",
        s_acc={"done"},
    )
