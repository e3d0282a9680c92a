"""Repeated CTC rounds under different assumptions about what survives a round.

Each cycle applies the halting-oracle operator to the register content,
samples one outcome, and then decides whether that outcome reaches the start
of the next round. Modes differ only in that survival decision:

* ``deutschian`` and ``data-transfer``: the sampled output always survives
  (in the latter a second machine carries it back unaltered).
* ``weak-reset`` and ``last-moment``: the machine is destroyed before the
  round closes, so the next round starts from the initial string again.
* ``relay``: survival iff the availability intervals of the relaying
  machines cover the whole loop ``[t2, t1]``.
* ``opposite-direction``: behaves as a reset and attaches a warning, since
  a handover between machines with opposite time directions is not
  considered feasible.

Randomness comes from :class:`random.Random` (Mersenne Twister) seeded with
the caller's seed; every cycle consumes exactly one ``random()`` draw,
whatever the mode, so traces with the same seed stay aligned across modes.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .halting_oracle import s_operator
from .markov import Distribution
from .tm_core import (
    IsHistory,
    TuringMachine,
    decode_history,
    run_until,
    serialize_configuration,
)

OPPOSITE_DIRECTION_WARNING = (
    "opposite-direction transfer assumed infeasible: machines meet for an instant "
    "and cannot exchange an arbitrary amount of data; treated as reset"
)


class ModeKind(enum.Enum):
    DEUTSCHIAN = "deutschian"
    WEAK_AXIOM_RESET = "weak-reset"
    DATA_TRANSFER = "data-transfer"
    LAST_MOMENT_DESTRUCTION = "last-moment"
    MULTI_MACHINE_RELAY = "relay"
    OPPOSITE_DIRECTION_TRANSFER = "opposite-direction"


@dataclass(frozen=True)
class Timeline:
    t0: Fraction = Fraction(1)
    t1: Fraction = Fraction(2)
    t2: Fraction = Fraction(0)
    destruction_point: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("t0", "t1", "t2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not self.t2 <= self.t0 <= self.t1:
            raise ValueError("timeline requires t2 <= t0 <= t1")
        if self.destruction_point is not None:
            d = Fraction(self.destruction_point)
            object.__setattr__(self, "destruction_point", d)
            if not self.t2 <= d <= self.t1:
                raise ValueError("destruction point must lie in [t2, t1]")


DEFAULT_TIMELINE = Timeline()


@dataclass(frozen=True)
class SemanticsMode:
    kind: ModeKind
    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        ivs = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if lo > hi:
                raise ValueError(f"malformed interval [{lo}, {hi}]")
        if ivs and self.kind is not ModeKind.MULTI_MACHINE_RELAY:
            raise ValueError("only relay modes take intervals")
        object.__setattr__(self, "intervals", ivs)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def feasible(self) -> bool:
        return self.kind is not ModeKind.OPPOSITE_DIRECTION_TRANSFER

    def label(self) -> str:
        if self.kind is ModeKind.MULTI_MACHINE_RELAY:
            body = ",".join(f"[{lo},{hi}]" for lo, hi in self.intervals)
            return f"relay{body and ':' + body}"
        return self.name


DEUTSCHIAN = SemanticsMode(ModeKind.DEUTSCHIAN)
WEAK_AXIOM_RESET = SemanticsMode(ModeKind.WEAK_AXIOM_RESET)
DATA_TRANSFER = SemanticsMode(ModeKind.DATA_TRANSFER)
LAST_MOMENT_DESTRUCTION = SemanticsMode(ModeKind.LAST_MOMENT_DESTRUCTION)
OPPOSITE_DIRECTION_TRANSFER = SemanticsMode(ModeKind.OPPOSITE_DIRECTION_TRANSFER)


def relay(intervals: Sequence[Sequence]) -> SemanticsMode:
    return SemanticsMode(ModeKind.MULTI_MACHINE_RELAY, tuple(tuple(iv) for iv in intervals))


def mode_from_name(name: str, intervals: Sequence[Sequence] = ()) -> SemanticsMode:
    kind = ModeKind(name)
    if kind is ModeKind.MULTI_MACHINE_RELAY:
        return relay(intervals)
    return SemanticsMode(kind)


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    register_at_start: bytes
    operator_output: Distribution
    survived: bool
    register_at_next_start: bytes
    output: Optional[int] = None


@dataclass(frozen=True)
class CycleTrace:
    mode: SemanticsMode
    records: tuple[CycleRecord, ...]
    converged: bool
    verdict: Optional[int]
    warnings: tuple[str, ...] = field(default=())

    def starts(self) -> list[bytes]:
        return [r.register_at_start for r in self.records]


def relay_covers(intervals: Sequence[Sequence], timeline: Timeline = DEFAULT_TIMELINE) -> bool:
    """True iff the union of closed intervals covers ``[timeline.t2, timeline.t1]``."""
    reach = timeline.t2
    for lo, hi in sorted((Fraction(lo), Fraction(hi)) for lo, hi in intervals):
        if lo > hi:
            raise ValueError(f"malformed interval [{lo}, {hi}]")
        if lo > reach:
            break
        reach = max(reach, hi)
        if reach >= timeline.t1:
            return True
    return reach >= timeline.t1


def survives(mode: SemanticsMode, timeline: Timeline = DEFAULT_TIMELINE) -> bool:
    """Whether the sampled operator output reaches the next round under ``mode``."""
    kind = mode.kind
    if kind in (ModeKind.DEUTSCHIAN, ModeKind.DATA_TRANSFER):
        return True
    if kind is ModeKind.MULTI_MACHINE_RELAY:
        return relay_covers(mode.intervals, timeline)
    # the destruction point (t3 on the backward leg or t3' on the forward leg)
    # does not change what is lost
    return False


def _sample(d: Distribution, u: float) -> bytes:
    acc = Fraction(0)
    u = Fraction(u)
    labels = [k for k in d if d[k] > 0]
    for label in labels:
        acc += d[label]
        if u < acc:
            return label
    return labels[-1]


def run_cycles(
    m: TuringMachine,
    y0: bytes,
    mode: SemanticsMode,
    cycles: int,
    depth: int,
    seed: int,
    timeline: Timeline = DEFAULT_TIMELINE,
) -> CycleTrace:
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    rng = random.Random(seed)
    keep = survives(mode, timeline)
    y0 = bytes(y0)
    current = y0
    records = []
    verdict = None
    for i in range(cycles):
        found = decode_history(m, current, depth)
        halting = isinstance(found, IsHistory) and found.halting
        out = s_operator(m, current, depth)
        sampled = _sample(out, rng.random())
        nxt = sampled if keep else y0
        if halting:
            verdict = 1
        records.append(CycleRecord(i, current, out, keep, nxt, 1 if halting else None))
        current = nxt
    last = records[-1]
    converged = (
        last.output == 1
        and last.register_at_next_start == last.register_at_start
    )
    warnings = () if mode.feasible else (OPPOSITE_DIRECTION_WARNING,)
    return CycleTrace(mode, tuple(records), converged, verdict, warnings)


def random_register(m: TuringMachine, seed: int, depth: int) -> bytes:
    """A reproducible initial register: either some sigma_t with t <= depth or junk bytes."""
    rng = random.Random(seed)
    if rng.random() < 0.5:
        hist = run_until(m, depth)
        return serialize_configuration(m, hist[rng.randrange(len(hist))])
    return bytes(rng.randrange(256) for _ in range(rng.randrange(1, 17)))


@dataclass(frozen=True)
class ModeSummary:
    mode: SemanticsMode
    reaches_halting_history: bool
    information_preserving: bool
    distinct_registers: int
    equivalence_class: str
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class ModeComparison:
    summaries: tuple[ModeSummary, ...]

    def classes(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {"deutschian-equivalent": [], "reset-equivalent": []}
        for s in self.summaries:
            out[s.equivalence_class].append(s.mode.label())
        return out


def compare_modes(
    m: TuringMachine,
    y0: bytes,
    modes: Sequence[SemanticsMode],
    cycles: int,
    depth: int,
    seed: int,
    timeline: Timeline = DEFAULT_TIMELINE,
) -> ModeComparison:
    if not modes:
        raise ValueError("at least one mode is required")
    summaries = []
    for mode in modes:
        trace = run_cycles(m, y0, mode, cycles, depth, seed, timeline)
        preserving = survives(mode, timeline)
        summaries.append(
            ModeSummary(
                mode=mode,
                reaches_halting_history=trace.verdict == 1,
                information_preserving=preserving,
                distinct_registers=len(set(trace.starts())),
                equivalence_class="deutschian-equivalent" if preserving else "reset-equivalent",
                warnings=trace.warnings,
            )
        )
    return ModeComparison(tuple(summaries))


def absorption_probability(halt_step: int, cycles: int) -> Fraction:
    """Exact chance that a Deutschian trace started at sigma_0 holds the halting
    history at the start of some cycle among the first ``cycles``.

    Only the index of the current history matters: each non-halting index
    advances or resets with probability 1/2.
    """
    p = [Fraction(0)] * (halt_step + 1)
    p[0] = Fraction(1)
    for _ in range(cycles - 1):
        q = [Fraction(0)] * (halt_step + 1)
        for i in range(halt_step):
            q[i + 1] += p[i] / 2
            q[0] += p[i] / 2
        q[halt_step] += p[halt_step]
        p = q
    return p[halt_step]
