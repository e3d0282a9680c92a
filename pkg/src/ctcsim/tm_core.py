"""Deterministic single-tape Turing machines and their configuration histories.

A configuration is serialized to the canonical ASCII form::

    cfg|<state>|<head>|<cell>:<symbol>,<cell>:<symbol>,...

with non-blank cells only, sorted by cell index. That byte string is the
register content passed around by the oracle and cycle simulators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

MOVES = {"L": -1, "R": 1, "S": 0}

# Characters that would make the configuration serialization ambiguous.
_RESERVED = set("|:,#") | {" ", "\t", "\n", "\r"}
_INT_RE = re.compile(r"-?(0|[1-9][0-9]*)\Z")


class MachineError(ValueError):
    """Raised for malformed or inconsistent machine descriptions."""


class MachineSyntaxError(MachineError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MachineSemanticError(MachineError):
    pass


class HaltedError(RuntimeError):
    """Stepping a configuration whose state is already a halt state."""


class HistoryBeyondHalt(ValueError):
    def __init__(self, requested: int, halt_step: int):
        super().__init__(
            f"history beyond halt: requested step {requested}, machine halts at step {halt_step}"
        )
        self.requested = requested
        self.halt_step = halt_step


def _check_token(token: str, what: str) -> None:
    if not token or any(ch in _RESERVED for ch in token):
        raise MachineSemanticError(f"invalid {what} name {token!r}")


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    start_state: str
    halt_states: frozenset[str]
    alphabet: tuple[str, ...]
    blank: str
    transitions: Mapping[tuple[str, str], tuple[str, str, str]]

    def __post_init__(self):
        for s in self.states:
            _check_token(s, "state")
        for a in self.alphabet:
            _check_token(a, "symbol")
        if len(set(self.states)) != len(self.states):
            raise MachineSemanticError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise MachineSemanticError("duplicate alphabet symbols")
        if self.start_state not in self.states:
            raise MachineSemanticError(f"unknown start state {self.start_state!r}")
        if not self.halt_states:
            raise MachineSemanticError("no halt state")
        unknown = self.halt_states - set(self.states)
        if unknown:
            raise MachineSemanticError(f"unknown halt state {sorted(unknown)[0]!r}")
        if self.blank not in self.alphabet:
            raise MachineSemanticError(f"blank symbol {self.blank!r} not in alphabet")
        for (state, read), (nxt, write, move) in self.transitions.items():
            if state not in self.states:
                raise MachineSemanticError(f"unknown state {state!r} in transition")
            if state in self.halt_states:
                raise MachineSemanticError(f"transition from halt state {state!r}")
            if read not in self.alphabet:
                raise MachineSemanticError(f"unknown symbol {read!r} in transition")
            if nxt not in self.states:
                raise MachineSemanticError(f"unknown state {nxt!r} in transition")
            if write not in self.alphabet:
                raise MachineSemanticError(f"unknown symbol {write!r} in transition")
            if move not in MOVES:
                raise MachineSemanticError(f"unknown head move {move!r}")
        for state in self.states:
            if state in self.halt_states:
                continue
            for sym in self.alphabet:
                if (state, sym) not in self.transitions:
                    raise MachineSemanticError(
                        f"incomplete transition table: missing {state} {sym}"
                    )
        object.__setattr__(self, "transitions", dict(self.transitions))

    def __hash__(self):
        return hash(encode_machine(self))


@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    tape: tuple[tuple[int, str], ...] = ()
    step_hint: Optional[int] = field(default=None, compare=False)

    @classmethod
    def make(cls, state, head, tape: Mapping[int, str], blank, step_hint=None):
        cells = tuple(sorted((i, s) for i, s in tape.items() if s != blank))
        return cls(state, head, cells, step_hint)

    def read(self, cell: int, blank: str) -> str:
        return dict(self.tape).get(cell, blank)


@dataclass(frozen=True)
class IsHistory:
    t: int
    halting: bool


@dataclass(frozen=True)
class NotAHistory:
    pass


def parse_machine(text: str) -> TuringMachine:
    """Parse the line-based machine format.

    Keys: ``states``, ``start``, ``halt``, ``blank``, ``alphabet`` and any
    number of ``delta: Q a -> Q' b M`` lines. ``states`` defaults to the
    names in order of first appearance, ``blank`` to ``_`` and ``alphabet``
    to the blank plus every symbol mentioned by a delta line.
    """
    header: dict[str, list[str]] = {}
    deltas: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise MachineSyntaxError(lineno, f"expected 'key: value', got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        tokens = value.split()
        if key == "delta":
            if len(tokens) != 6 or tokens[2] != "->":
                raise MachineSyntaxError(
                    lineno, "delta must read 'delta: STATE SYMBOL -> STATE SYMBOL MOVE'"
                )
            deltas.append((lineno, tokens))
        elif key in ("states", "start", "halt", "blank", "alphabet"):
            if key in header:
                raise MachineSyntaxError(lineno, f"duplicate key {key!r}")
            if key in ("start", "blank") and len(tokens) != 1:
                raise MachineSyntaxError(lineno, f"{key!r} takes exactly one value")
            if not tokens:
                raise MachineSyntaxError(lineno, f"{key!r} has no value")
            header[key] = tokens
        else:
            raise MachineSyntaxError(lineno, f"unknown key {key!r}")

    if "start" not in header:
        raise MachineSemanticError("missing start state")
    if "halt" not in header:
        raise MachineSemanticError("no halt state")
    start = header["start"][0]
    blank = header.get("blank", ["_"])[0]

    transitions: dict[tuple[str, str], tuple[str, str, str]] = {}
    for lineno, (q, a, _, q2, b, move) in deltas:
        if (q, a) in transitions:
            raise MachineSyntaxError(lineno, f"duplicate transition for {q} {a}")
        transitions[(q, a)] = (q2, b, move)

    if "states" in header:
        states = tuple(header["states"])
    else:
        seen = [start, *header["halt"]]
        for _, (q, _, _, q2, _, _) in deltas:
            seen += [q, q2]
        states = tuple(dict.fromkeys(seen))
    if "alphabet" in header:
        alphabet = tuple(header["alphabet"])
    else:
        seen = [blank]
        for _, (_, a, _, _, b, _) in deltas:
            seen += [a, b]
        alphabet = tuple(dict.fromkeys(seen))

    return TuringMachine(
        states=states,
        start_state=start,
        halt_states=frozenset(header["halt"]),
        alphabet=alphabet,
        blank=blank,
        transitions=transitions,
    )


def encode_machine(m: TuringMachine) -> str:
    """Canonical machine text; doubles as the machine's description string."""
    lines = [
        "states: " + " ".join(m.states),
        "start: " + m.start_state,
        "halt: " + " ".join(s for s in m.states if s in m.halt_states),
        "blank: " + m.blank,
        "alphabet: " + " ".join(m.alphabet),
    ]
    for q in m.states:
        for a in m.alphabet:
            if (q, a) in m.transitions:
                q2, b, move = m.transitions[(q, a)]
                lines.append(f"delta: {q} {a} -> {q2} {b} {move}")
    return "\n".join(lines) + "\n"


def initial_configuration(m: TuringMachine) -> Configuration:
    return Configuration(m.start_state, 0, (), step_hint=0)


def is_halting(m: TuringMachine, c: Configuration) -> bool:
    return c.state in m.halt_states


def step(m: TuringMachine, c: Configuration) -> Configuration:
    if is_halting(m, c):
        raise HaltedError(f"cannot step halted configuration in state {c.state!r}")
    tape = dict(c.tape)
    nxt, write, move = m.transitions[(c.state, tape.get(c.head, m.blank))]
    if write == m.blank:
        tape.pop(c.head, None)
    else:
        tape[c.head] = write
    hint = None if c.step_hint is None else c.step_hint + 1
    return Configuration(nxt, c.head + MOVES[move], tuple(sorted(tape.items())), hint)


def history(m: TuringMachine, t: int) -> Configuration:
    """Return the configuration after exactly ``t`` steps from the blank tape."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    c = initial_configuration(m)
    for i in range(t):
        if is_halting(m, c):
            raise HistoryBeyondHalt(t, i)
        c = step(m, c)
    return c


def run_until(m: TuringMachine, bound: int) -> list[Configuration]:
    """sigma_0, sigma_1, ... up to the first halt or sigma_bound, whichever comes first."""
    c = initial_configuration(m)
    out = [c]
    while len(out) <= bound and not is_halting(m, c):
        c = step(m, c)
        out.append(c)
    return out


def halting_step(m: TuringMachine, bound: int) -> Optional[int]:
    hist = run_until(m, bound)
    return len(hist) - 1 if is_halting(m, hist[-1]) else None


def serialize_configuration(m: TuringMachine, c: Configuration) -> bytes:
    tape = ",".join(f"{i}:{s}" for i, s in c.tape if s != m.blank)
    return f"cfg|{c.state}|{c.head}|{tape}".encode("ascii")


def parse_configuration(m: TuringMachine, y: Union[bytes, str]) -> Configuration:
    """Inverse of :func:`serialize_configuration`; rejects non-canonical input."""
    if isinstance(y, bytes):
        try:
            text = y.decode("ascii")
        except UnicodeDecodeError:
            raise ValueError("configuration string is not ASCII") from None
    else:
        text = y
    parts = text.split("|")
    if len(parts) != 4 or parts[0] != "cfg":
        raise ValueError(f"not a configuration string: {text!r}")
    _, state, head, tape_text = parts
    if state not in m.states:
        raise ValueError(f"unknown state {state!r}")
    if not _INT_RE.match(head) or head == "-0":
        raise ValueError(f"bad head position {head!r}")
    cells: list[tuple[int, str]] = []
    if tape_text:
        for item in tape_text.split(","):
            idx, sep, sym = item.partition(":")
            if not sep or not _INT_RE.match(idx) or idx == "-0":
                raise ValueError(f"bad tape cell {item!r}")
            if sym not in m.alphabet or sym == m.blank:
                raise ValueError(f"bad tape symbol {sym!r}")
            cells.append((int(idx), sym))
    if [i for i, _ in cells] != sorted({i for i, _ in cells}):
        raise ValueError("tape cells must be strictly ascending")
    return Configuration(state, int(head), tuple(cells))


def decode_history(m: TuringMachine, y: bytes, bound: int) -> Union[IsHistory, NotAHistory]:
    """Search sigma_0..sigma_bound (stopping at the first halt) for ``y``.

    The bound stands in for an unbounded search; strings that only match a
    later configuration are reported as not-a-history.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    try:
        target = parse_configuration(m, y)
    except ValueError:
        return NotAHistory()
    c = initial_configuration(m)
    t = 0
    while True:
        if c == target:
            return IsHistory(t, is_halting(m, c))
        if t >= bound or is_halting(m, c):
            return NotAHistory()
        c = step(m, c)
        t += 1
