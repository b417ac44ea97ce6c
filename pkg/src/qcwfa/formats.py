"""JSON machine files for 2QCFA and weighted automata.

End-markers are spelled ``cent`` and ``dollar`` in keys and symbol fields.
Complex entries are ``{"re": "4/5", "im": "0"}`` objects.
"""

from __future__ import annotations

import json
from pathlib import Path

from .qcfa import LEFT_END, RIGHT_END, Measure, Move, Observable, Qcfa, Unitary
from .scalar import ExpSum, FormatError, GaussianRational, Matrix
from .wfa import WTransition, Wfa, WfaError

_TO_FILE = {LEFT_END: "cent", RIGHT_END: "dollar"}
_FROM_FILE = {v: k for k, v in _TO_FILE.items()}


def symbol_to_file(g: str) -> str:
    return _TO_FILE.get(g, g)


def symbol_from_file(name: str) -> str:
    if name in (LEFT_END, RIGHT_END):
        raise FormatError(f"write end-markers as 'cent'/'dollar', not {name!r}")
    return _FROM_FILE.get(name, name)


def _require(obj: dict, key: str, kind, where: str = "machine"):
    if key not in obj:
        raise FormatError(f"{where}: missing key {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise FormatError(f"{where}: {key!r} has the wrong type")
    return value


def _split_key(key: str) -> tuple[str, str]:
    state, sep, sym = key.rpartition(":")
    if not sep or not state or not sym:
        raise FormatError(f"key {key!r} is not of the form 'state:symbol'")
    return state, symbol_from_file(sym)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def machine_to_dict(m: Qcfa) -> dict:
    theta, delta = {}, {}
    for s in m.classical_states:
        for g in m.tape_alphabet:
            key = f"{s}:{symbol_to_file(g)}"
            if (s, g) in m.theta:
                entry = m.theta[(s, g)]
                if isinstance(entry, Unitary):
                    theta[key] = {
                        "unitary": [[z.to_literal() for z in row] for row in entry.matrix]
                    }
                else:
                    obs = entry.obs
                    theta[key] = {
                        "measure": {
                            part: [q for q in m.quantum_states if q in getattr(obs, part)]
                            for part in ("acc", "rej", "nh")
                        }
                    }
            if (s, g) in m.delta:
                move = m.delta[(s, g)]
                delta[key] = {"next": move.next, "dir": move.dir}
    return {
        "sigma": list(m.sigma),
        "quantum_states": list(m.quantum_states),
        "classical_states": list(m.classical_states),
        "q0": m.q0,
        "s0": m.s0,
        "s_acc": [s for s in m.classical_states if s in m.s_acc],
        "s_rej": [s for s in m.classical_states if s in m.s_rej],
        "theta": theta,
        "delta": delta,
    }


def machine_from_dict(obj) -> Qcfa:
    if not isinstance(obj, dict):
        raise FormatError("machine file must hold a JSON object")
    sigma = _require(obj, "sigma", list)
    qstates = _require(obj, "quantum_states", list)
    cstates = _require(obj, "classical_states", list)
    q0 = _require(obj, "q0", str)
    s0 = _require(obj, "s0", str)
    s_acc = obj.get("s_acc", [])
    s_rej = obj.get("s_rej", [])
    theta_in = _require(obj, "theta", dict)
    delta_in = _require(obj, "delta", dict)
    for name, seq in (("sigma", sigma), ("quantum_states", qstates),
                      ("classical_states", cstates), ("s_acc", s_acc), ("s_rej", s_rej)):
        if not isinstance(seq, list) or not all(isinstance(x, str) for x in seq):
            raise FormatError(f"machine: {name!r} must be a list of strings")
    qset = set(qstates)

    theta = {}
    for key, value in theta_in.items():
        where = f"theta[{key}]"
        state, sym = _split_key(key)
        if not isinstance(value, dict) or len(value) != 1:
            raise FormatError(f"{where}: expected {{'unitary': ...}} or {{'measure': ...}}")
        if "unitary" in value:
            rows = value["unitary"]
            if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
                raise FormatError(f"{where}: unitary must be a list of rows")
            try:
                mat = Matrix([[GaussianRational.from_literal(z) for z in r] for r in rows])
            except ValueError as exc:
                raise FormatError(f"{where}: {exc}") from None
            theta[(state, sym)] = Unitary(mat)
        elif "measure" in value:
            parts = value["measure"]
            if not isinstance(parts, dict) or not set(parts) <= {"acc", "rej", "nh"}:
                raise FormatError(f"{where}: measure needs 'acc', 'rej', 'nh' lists")
            for part, names in parts.items():
                if not isinstance(names, list):
                    raise FormatError(f"{where}: {part!r} must be a list")
                for q in names:
                    if q not in qset:
                        raise FormatError(f"{where}: unknown quantum state {q!r}")
            theta[(state, sym)] = Measure(
                Observable(parts.get("acc", []), parts.get("rej", []), parts.get("nh", []))
            )
        else:
            raise FormatError(f"{where}: expected 'unitary' or 'measure'")

    delta = {}
    for key, value in delta_in.items():
        where = f"delta[{key}]"
        state, sym = _split_key(key)
        if not isinstance(value, dict) or set(value) != {"next", "dir"}:
            raise FormatError(f"{where}: expected {{'next', 'dir'}}")
        d = value["dir"]
        if not isinstance(d, int) or isinstance(d, bool):
            raise FormatError(f"{where}: dir must be -1, 0 or 1")
        if value["next"] not in cstates:
            raise FormatError(f"{where}: unknown classical state {value['next']!r}")
        delta[(state, sym)] = Move(value["next"], d)

    return Qcfa(
        quantum_states=tuple(qstates),
        classical_states=tuple(cstates),
        sigma=tuple(sigma),
        theta=theta,
        delta=delta,
        q0=q0,
        s0=s0,
        s_acc=frozenset(s_acc),
        s_rej=frozenset(s_rej),
    )


def render_machine(m: Qcfa) -> str:
    return _dump(machine_to_dict(m))


def parse_machine(text: str) -> Qcfa:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return machine_from_dict(obj)


def load_machine(path: str | Path) -> Qcfa:
    return parse_machine(Path(path).read_text(encoding="utf-8"))


def save_machine(m: Qcfa, path: str | Path) -> None:
    Path(path).write_text(render_machine(m), encoding="utf-8")


def wfa_to_dict(w: Wfa) -> dict:
    return {
        "sigma": list(w.sigma),
        "states": list(w.states),
        "initial": w.initial,
        "finals": [s for s in w.states if s in w.finals],
        "transitions": [
            {
                "from": t.src,
                "symbol": symbol_to_file(t.symbol),
                "weight": t.weight.to_literal(),
                "to": t.dst,
                "dir": t.dir,
            }
            for t in w.transitions
        ],
    }


def wfa_from_dict(obj) -> Wfa:
    if not isinstance(obj, dict):
        raise FormatError("automaton file must hold a JSON object")
    where = "automaton"
    sigma = _require(obj, "sigma", list, where)
    states = _require(obj, "states", list, where)
    initial = _require(obj, "initial", str, where)
    finals = _require(obj, "finals", list, where)
    items = _require(obj, "transitions", list, where)
    sset = set(states)
    transitions = []
    for k, t in enumerate(items):
        tw = f"transitions[{k}]"
        if not isinstance(t, dict) or set(t) != {"from", "symbol", "weight", "to", "dir"}:
            raise FormatError(f"{tw}: expected keys from, symbol, weight, to, dir")
        for end in ("from", "to"):
            if t[end] not in sset:
                raise FormatError(f"{tw}: unknown state {t[end]!r}")
        d = t["dir"]
        if not isinstance(d, int) or isinstance(d, bool):
            raise FormatError(f"{tw}: dir must be -1, 0 or 1")
        try:
            weight = ExpSum.from_literal(t["weight"])
        except FormatError as exc:
            raise FormatError(f"{tw}: {exc}") from None
        transitions.append(
            WTransition(t["from"], symbol_from_file(t["symbol"]), weight, t["to"], d)
        )
    try:
        return Wfa(tuple(states), tuple(sigma), initial, frozenset(finals), tuple(transitions))
    except WfaError as exc:
        raise FormatError(str(exc)) from None


def render_wfa(w: Wfa) -> str:
    return _dump(wfa_to_dict(w))


def parse_wfa(text: str) -> Wfa:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return wfa_from_dict(obj)


def load_wfa(path: str | Path) -> Wfa:
    return parse_wfa(Path(path).read_text(encoding="utf-8"))


def save_wfa(w: Wfa, path: str | Path) -> None:
    Path(path).write_text(render_wfa(w), encoding="utf-8")
