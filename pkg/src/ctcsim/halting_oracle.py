"""The halting-oracle operator over configuration-history strings.

For a machine P and register content y:

* y is a halting history sigma_t: y maps to itself (output bit 1);
* y is a non-halting history sigma_t: sigma_{t+1} or sigma_0, each with
  probability 1/2;
* anything else: sigma_0.

:func:`build_oracle_chain` truncates this infinite chain after sigma_N,
sending all of sigma_N's mass back to sigma_0, and collapses every
non-history string into a single transient sink ``BOTTOM``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import markov
from .markov import Distribution, StochasticMap
from .tm_core import (
    IsHistory,
    TuringMachine,
    decode_history,
    initial_configuration,
    is_halting,
    parse_configuration,
    serialize_configuration,
    step,
)

BOTTOM = "⊥".encode("utf-8")
TAIL = "tail"
HALF = Fraction(1, 2)


class OracleConstructionError(AssertionError):
    pass


@dataclass(frozen=True)
class OracleChain:
    machine: TuringMachine
    depth: int
    histories: tuple
    labels: tuple[bytes, ...]
    map: StochasticMap
    halted_within_bound: bool
    loop_to: Optional[int] = None

    @property
    def states(self) -> tuple[bytes, ...]:
        return self.labels + (BOTTOM,)

    @property
    def truncated(self) -> bool:
        return not self.halted_within_bound and self.loop_to is None


@dataclass(frozen=True)
class Halts:
    halt_step: int
    fixed_point: Distribution
    output: int = 1

    def to_json(self) -> dict:
        return {"kind": "halts", "halt_step": self.halt_step, "output": self.output}


@dataclass(frozen=True)
class Undetermined:
    depth: int
    stationary: Distribution
    geometric_tv: Fraction

    def to_json(self) -> dict:
        return {"kind": "undetermined", "N": self.depth, "geometric_tv": _ratio(self.geometric_tv)}


OracleVerdict = Union[Halts, Undetermined]


def _ratio(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def s_operator(m: TuringMachine, y: bytes, bound: int) -> Distribution:
    sigma0 = serialize_configuration(m, initial_configuration(m))
    found = decode_history(m, y, bound)
    if not isinstance(found, IsHistory):
        return Distribution.point(sigma0)
    if found.halting:
        return Distribution.point(bytes(y))
    # decode_history only matches canonical strings, so y parses back to sigma_t
    nxt = serialize_configuration(m, step(m, parse_configuration(m, y)))
    if nxt == sigma0:
        return Distribution.point(sigma0)
    return Distribution({nxt: HALF, sigma0: HALF})


def build_oracle_chain(m: TuringMachine, depth: int) -> OracleChain:
    """Enumerate sigma_0..sigma_K and wire the truncated operator over them.

    K is the halting step if the machine halts within ``depth`` steps,
    otherwise ``depth``. A machine that revisits an earlier configuration
    before that point closes its own loop and needs no truncation.
    """
    if depth < 1:
        raise ValueError("truncation depth must be >= 1")
    c = initial_configuration(m)
    hist = [c]
    seen = {c: 0}
    loop_to = None
    while not is_halting(m, c) and len(hist) <= depth:
        c = step(m, c)
        if c in seen:
            loop_to = seen[c]
            break
        seen[c] = len(hist)
        hist.append(c)
    halted = is_halting(m, hist[-1])
    labels = tuple(serialize_configuration(m, c) for c in hist)
    sigma0 = labels[0]
    pos = {label: i for i, label in enumerate(labels)}
    last = len(labels) - 1

    def row(label):
        if label == BOTTOM:
            return [(sigma0, 1)]
        i = pos[label]
        if i < last:
            return [(labels[i + 1], HALF), (sigma0, HALF)]
        if halted:
            return [(label, 1)]
        if loop_to is not None:
            return [(labels[loop_to], HALF), (sigma0, HALF)]
        return [(sigma0, 1)]

    chain_map = markov.build_map(labels + (BOTTOM,), row)
    return OracleChain(m, depth, tuple(hist), labels, chain_map, halted, loop_to)


def ideal_geometric(depth: int) -> Distribution:
    """Masses (1/2)^(i+1) on 0..depth plus the remaining tail mass."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    weights: dict = {i: HALF ** (i + 1) for i in range(depth + 1)}
    weights[TAIL] = HALF ** (depth + 1)
    return Distribution(weights)


def index_distribution(chain: OracleChain, d: Distribution) -> Distribution:
    """Relabel a distribution over chain labels by history index (BOTTOM must carry no mass)."""
    if d[BOTTOM]:
        raise ValueError("distribution puts mass on the non-history sink")
    pos = {label: i for i, label in enumerate(chain.labels)}
    return Distribution({pos[k]: d[k] for k in d.support()}, exact=d.exact)


def classify(m: TuringMachine, depth: int) -> OracleVerdict:
    chain = build_oracle_chain(m, depth)
    classes = markov.closed_classes(chain.map)
    stationary = markov.stationary_distributions(chain.map)
    if len(classes) != 1 or len(stationary) != 1:
        raise OracleConstructionError(
            f"expected exactly one closed class, found {len(classes)}"
        )
    (pi,) = stationary
    if chain.halted_within_bound:
        halt_label = chain.labels[-1]
        if classes[0] != frozenset([halt_label]) or pi != Distribution.point(halt_label):
            raise OracleConstructionError("halting chain is not absorbed at its halting history")
        return Halts(len(chain.labels) - 1, pi)
    tv = markov.total_variation(index_distribution(chain, pi), ideal_geometric(depth))
    return Undetermined(depth, pi, tv)
