"""Classical CTC networks in standard form.

``m`` chronology-respecting (CR) bits and ``n`` CTC bits pass through one
combined gate. Fixing the CR input ``x`` turns the gate into a stochastic map
on the CTC bits; its deterministic fixed points are the classically
consistent loop values, and its stationary distributions are the mixed
(Deutschian) fixed points that always exist.

Bit vectors are plain strings such as ``"01"``; the empty string stands for
zero CR bits.

Circuit file format::

    cr: 0
    ctc: 1
    delay: 1          # optional, informational
    row: - 0 -> - 1
    row: - 1 -> - 0 @ 1/2 - 1 @ 1/2

``-`` denotes an empty bit string. An outcome without ``@ p/q`` has
probability 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from . import markov
from .markov import Distribution, StochasticMap

MAX_CTC_BITS = 12

TAKE_BOTH = 0
TAKE_B_ONLY = 1


class CircuitError(ValueError):
    pass


def bitstrings(width: int) -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=width)]


@dataclass(frozen=True)
class CtcCircuit:
    m: int
    n: int
    gate: Mapping[tuple[str, str], Distribution]
    delay: Fraction = Fraction(1)
    max_ctc_bits: int = field(default=MAX_CTC_BITS, compare=False)

    def __post_init__(self):
        if self.m < 0 or self.n < 1:
            raise CircuitError("need m >= 0 CR bits and n >= 1 CTC bits")
        if self.n > self.max_ctc_bits:
            raise CircuitError(f"{self.n} CTC bits exceeds the cap of {self.max_ctc_bits}")
        for x in bitstrings(self.m):
            for y in bitstrings(self.n):
                if (x, y) not in self.gate:
                    raise CircuitError(f"gate undefined on input {x or '-'} {y}")
                for xo, yo in self.gate[(x, y)]:
                    if len(xo) != self.m or len(yo) != self.n or set(xo + yo) - {"0", "1"}:
                        raise CircuitError(f"bad gate output {xo!r} {yo!r}")
        if len(self.gate) != 2 ** (self.m + self.n):
            raise CircuitError("gate has entries outside {0,1}^(m+n)")
        object.__setattr__(self, "gate", dict(self.gate))
        object.__setattr__(self, "delay", Fraction(self.delay))


@dataclass(frozen=True)
class ParadoxReport:
    cr_input: str
    deterministic_fixed_points: tuple[str, ...]
    distribution_fixed_points: tuple[Distribution, ...]
    deterministic_cr_outputs: Mapping[str, Distribution]
    distribution_cr_outputs: tuple[Distribution, ...]

    @property
    def classical_paradox(self) -> bool:
        return not self.deterministic_fixed_points


def deterministic_circuit(m: int, n: int, f: Callable[[str, str], tuple[str, str]], **kw) -> CtcCircuit:
    gate = {
        (x, y): Distribution.point(f(x, y)) for x in bitstrings(m) for y in bitstrings(n)
    }
    return CtcCircuit(m, n, gate, **kw)


def _check_input(c: CtcCircuit, x: str) -> None:
    if len(x) != c.m or set(x) - {"0", "1"}:
        raise CircuitError(f"CR input {x!r} is not a {c.m}-bit string")


def induced_map(c: CtcCircuit, x: str) -> StochasticMap:
    _check_input(c, x)
    return markov.build_map(
        bitstrings(c.n), lambda y: [(yo, p) for (_, yo), p in c.gate[(x, y)].items()]
    )


def _cr_output(c: CtcCircuit, x: str, d: Distribution) -> Distribution:
    out: dict[str, Fraction] = {}
    for y in d.support():
        for (xo, _), p in c.gate[(x, y)].items():
            out[xo] = out.get(xo, Fraction(0)) + d[y] * p
    return Distribution(dict(sorted(out.items())))


def evaluate(c: CtcCircuit, x: str) -> ParadoxReport:
    s = induced_map(c, x)
    det = tuple(markov.deterministic_fixed_points(s))
    mixed = tuple(markov.stationary_distributions(s, method="exact"))
    return ParadoxReport(
        cr_input=x,
        deterministic_fixed_points=det,
        distribution_fixed_points=mixed,
        deterministic_cr_outputs={y: _cr_output(c, x, Distribution.point(y)) for y in det},
        distribution_cr_outputs=tuple(_cr_output(c, x, d) for d in mixed),
    )


def evaluate_all(c: CtcCircuit) -> list[ParadoxReport]:
    return [evaluate(c, x) for x in bitstrings(c.m)]


def parse_circuit(text: str, max_ctc_bits: int = MAX_CTC_BITS) -> CtcCircuit:
    header: dict[str, str] = {}
    gate: dict[tuple[str, str], Distribution] = {}

    def bits(tok: str, lineno: int) -> str:
        if tok == "-":
            return ""
        if not tok or set(tok) - {"0", "1"}:
            raise CircuitError(f"line {lineno}: bad bit string {tok!r}")
        return tok

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep:
            raise CircuitError(f"line {lineno}: expected 'key: value'")
        if key in ("cr", "ctc", "delay"):
            if key in header:
                raise CircuitError(f"line {lineno}: duplicate key {key!r}")
            header[key] = value.strip()
            continue
        if key != "row":
            raise CircuitError(f"line {lineno}: unknown key {key!r}")
        lhs, arrow, rhs = value.partition("->")
        lhs_toks, rhs_toks = lhs.split(), rhs.split()
        if not arrow or len(lhs_toks) != 2 or not rhs_toks:
            raise CircuitError(f"line {lineno}: row must read 'row: X Y -> X' Y' [@ p/q] ...'")
        x, y = (bits(t, lineno) for t in lhs_toks)
        outcomes: dict[tuple[str, str], Fraction] = {}
        i = 0
        while i < len(rhs_toks):
            if i + 1 >= len(rhs_toks):
                raise CircuitError(f"line {lineno}: incomplete outcome")
            out = (bits(rhs_toks[i], lineno), bits(rhs_toks[i + 1], lineno))
            i += 2
            p = Fraction(1)
            if i < len(rhs_toks) and rhs_toks[i] == "@":
                if i + 1 >= len(rhs_toks):
                    raise CircuitError(f"line {lineno}: missing probability after '@'")
                try:
                    p = Fraction(rhs_toks[i + 1])
                except ValueError:
                    raise CircuitError(f"line {lineno}: bad probability {rhs_toks[i + 1]!r}") from None
                i += 2
            outcomes[out] = outcomes.get(out, Fraction(0)) + p
        if (x, y) in gate:
            raise CircuitError(f"line {lineno}: duplicate row for {x or '-'} {y}")
        try:
            gate[(x, y)] = Distribution(outcomes)
        except ValueError as exc:
            raise CircuitError(f"line {lineno}: {exc}") from None

    for key in ("cr", "ctc"):
        if key not in header:
            raise CircuitError(f"missing '{key}:' header")
    try:
        m, n = int(header["cr"]), int(header["ctc"])
        delay = Fraction(header.get("delay", "1"))
    except ValueError as exc:
        raise CircuitError(f"bad header value: {exc}") from None
    return CtcCircuit(m, n, gate, delay, max_ctc_bits)


def format_circuit(c: CtcCircuit) -> str:
    lines = [f"cr: {c.m}", f"ctc: {c.n}", f"delay: {c.delay}"]
    for x in bitstrings(c.m):
        for y in bitstrings(c.n):
            outs = []
            for (xo, yo), p in c.gate[(x, y)].items():
                outs.append(f"{xo or '-'} {yo}" + ("" if p == 1 else f" @ {p}"))
            lines.append(f"row: {x or '-'} {y} -> " + " ".join(outs))
    return "\n".join(lines) + "\n"


# --- built-in examples ------------------------------------------------------


def not_gate_circuit() -> CtcCircuit:
    """One CTC bit that is flipped on every pass: the grandfather paradox."""
    return deterministic_circuit(0, 1, lambda x, y: ("", "1" if y == "0" else "0"))


def identity_circuit(n: int = 1) -> CtcCircuit:
    return deterministic_circuit(0, n, lambda x, y: ("", y))


def payoff_table() -> tuple[tuple[int, int], tuple[int, int]]:
    """Dollar payoff indexed ``[choice][prediction]`` (0 = both boxes, 1 = box B only)."""
    return ((1000, 1_001_000), (0, 1_000_000))


def newcomb_circuit(strategy: Mapping[int, int] | Sequence[int]) -> CtcCircuit:
    """One CR bit carrying the chooser's pick and one CTC bit carrying the prediction.

    The chooser reads the prediction ``b`` and picks ``strategy[b]``; an
    infallible predictor is exactly the loop condition that the next
    prediction equals that pick.
    """
    choose = {b: int(strategy[b]) for b in (0, 1)}
    if set(choose.values()) - {0, 1}:
        raise CircuitError("strategy must map {0,1} to {0,1}")

    def gate(x, y):
        c = str(choose[int(y)])
        return c, c

    return deterministic_circuit(1, 1, gate)


NEWCOMB_STRATEGIES = {
    "take-both": (TAKE_BOTH, TAKE_BOTH),
    "take-b": (TAKE_B_ONLY, TAKE_B_ONLY),
    "contrarian": (TAKE_B_ONLY, TAKE_BOTH),
}


def newcomb_payoff(strategy: Mapping[int, int] | Sequence[int], prediction: Distribution) -> Fraction:
    """Expected payoff when the prediction bit follows ``prediction``."""
    table = payoff_table()
    return sum(
        (prediction[b] * table[int(strategy[int(b)])][int(b)] for b in prediction.support()),
        Fraction(0),
    )


# --- the halting-oracle operator as a circuit -------------------------------


def oracle_circuit(chain, n: Optional[int] = None) -> tuple[CtcCircuit, list]:
    """Encode an oracle chain's states as n-bit CTC values.

    Codes follow ``chain.map.states``; unused codes behave like non-history
    strings and reset to sigma_0. The single CR output bit is 1 exactly when
    the CTC register holds a halting history. Returns the circuit and the
    code-to-label table.
    """
    labels = list(chain.map.states)
    need = max(1, (len(labels) - 1).bit_length())
    n = need if n is None else n
    if 2**n < len(labels):
        raise CircuitError(f"{len(labels)} chain states do not fit in {n} bits")
    codes = bitstrings(n)
    code_of = {label: codes[i] for i, label in enumerate(labels)}
    halting = {
        label for label in chain.labels if chain.halted_within_bound and label == chain.labels[-1]
    }
    sigma0 = code_of[labels[0]]
    gate = {}
    for x in ("0", "1"):
        for i, y in enumerate(codes):
            if i < len(labels):
                label = labels[i]
                bit = "1" if label in halting else "0"
                gate[(x, y)] = Distribution(
                    {(bit, code_of[t]): p for t, p in chain.map.rows[label]}
                )
            else:
                gate[(x, y)] = Distribution.point(("0", sigma0))
    table = labels + [None] * (len(codes) - len(labels))
    return CtcCircuit(1, n, gate), table
