"""Finite stochastic maps, their closed classes and stationary distributions.

Rows are stored as exact :class:`fractions.Fraction` probabilities. Small
closed classes are solved exactly with the Grassmann-Taksar-Heyman
elimination, which never subtracts and so stays exact without pivoting;
larger ones fall back to power iteration averaged over one period of the
class, which converges for periodic chains as well.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

Label = Hashable
Number = Union[Fraction, float]

EXACT_THRESHOLD = 512
FLOAT_TOL = 1e-12
MAX_ITERS = 10**6


class StochasticMapError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class StochasticMap:
    states: tuple
    rows: Mapping[Label, tuple[tuple[Label, Fraction], ...]]

    def row(self, state) -> dict:
        return dict(self.rows[state])

    def successors(self, state) -> list:
        return [t for t, p in self.rows[state] if p > 0]

    def __len__(self):
        return len(self.states)


class Distribution(Mapping):
    """Probability weights over state labels.

    ``exact`` is True when every weight is a Fraction. Labels absent from
    the mapping have probability 0. Iteration follows insertion order.
    """

    def __init__(self, weights: Mapping | Iterable, exact: bool | None = None):
        items = dict(weights)
        if exact is None:
            exact = all(isinstance(p, (int, Fraction)) for p in items.values())
        if exact:
            items = {k: Fraction(p) for k, p in items.items()}
        else:
            items = {k: float(p) for k, p in items.items()}
        if any(p < 0 for p in items.values()):
            raise ValueError("negative probability")
        total = sum(items.values())
        if exact and total != 1:
            raise ValueError(f"total mass {total} != 1")
        if not exact and abs(total - 1.0) > 1e-12:
            raise ValueError(f"total mass {total!r} != 1")
        self._w = items
        self.exact = exact

    @classmethod
    def point(cls, label) -> "Distribution":
        return cls({label: Fraction(1)})

    @classmethod
    def uniform(cls, labels: Iterable) -> "Distribution":
        labels = list(labels)
        return cls({x: Fraction(1, len(labels)) for x in labels})

    def __getitem__(self, key):
        return self._w.get(key, Fraction(0) if self.exact else 0.0)

    def __contains__(self, key):
        return key in self._w

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.support() == other.support() and all(
            self[k] == other[k] for k in self.support()
        )

    def __hash__(self):
        return hash(frozenset((k, self[k]) for k in self.support()))

    def __repr__(self):
        body = ", ".join(f"{k!r}: {p}" for k, p in self._w.items())
        return f"Distribution({{{body}}})"

    def support(self) -> frozenset:
        return frozenset(k for k, p in self._w.items() if p > 0)

    def is_point_mass(self) -> bool:
        return len(self.support()) == 1

    def relabel(self, f: Callable) -> "Distribution":
        out: dict = {}
        for k, p in self._w.items():
            key = f(k)
            out[key] = out.get(key, 0) + p
        return Distribution(out, exact=self.exact)


def build_map(states: Sequence, transition: Callable[[Label], Iterable]) -> StochasticMap:
    states = tuple(states)
    known = set(states)
    if len(known) != len(states):
        raise StochasticMapError("duplicate state labels")
    rows = {}
    for s in states:
        merged: dict = {}
        for target, p in transition(s):
            p = Fraction(p)
            if target not in known:
                raise StochasticMapError(f"unknown target label {target!r} in row {s!r}")
            if p < 0:
                raise StochasticMapError(f"negative probability {p} in row {s!r}")
            merged[target] = merged.get(target, Fraction(0)) + p
        total = sum(merged.values(), Fraction(0))
        if total != 1:
            raise StochasticMapError(f"row sum {total} ≠ 1 in row {s!r}")
        rows[s] = tuple((t, p) for t, p in merged.items() if p != 0)
    return StochasticMap(states, rows)


def from_rows(rows: Mapping[Label, Mapping[Label, Number]]) -> StochasticMap:
    """Convenience constructor from a dict of dicts."""
    return build_map(list(rows), lambda s: rows[s].items())


def deterministic_fixed_points(s: StochasticMap) -> list:
    return [x for x in s.states if s.rows[x] == ((x, Fraction(1)),)]


def _sccs(s: StochasticMap) -> list[list]:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in s.states:
        if root in index:
            continue
        work = [(root, iter(s.successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(s.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def closed_classes(s: StochasticMap) -> list[frozenset]:
    """Closed communicating classes, ordered by their first state in ``s.states``."""
    order = {x: i for i, x in enumerate(s.states)}
    closed = []
    for comp in _sccs(s):
        members = set(comp)
        if all(t in members for x in comp for t in s.successors(x)):
            closed.append(frozenset(comp))
    closed.sort(key=lambda c: min(order[x] for x in c))
    return closed


def _ordered(s: StochasticMap, cls: frozenset) -> list:
    return [x for x in s.states if x in cls]


def _gth(s: StochasticMap, labels: list) -> dict:
    """Exact stationary vector of an irreducible block via GTH elimination."""
    k = len(labels)
    pos = {x: i for i, x in enumerate(labels)}
    P = [[Fraction(0)] * k for _ in range(k)]
    for x in labels:
        for t, p in s.rows[x]:
            P[pos[x]][pos[t]] += p
    for n in range(k - 1, 0, -1):
        out_mass = sum(P[n][:n], Fraction(0))
        for i in range(n):
            if P[i][n] == 0:
                continue
            f = P[i][n] / out_mass
            row_i, row_n = P[i], P[n]
            for j in range(n):
                if row_n[j]:
                    row_i[j] += f * row_n[j]
    pi = [Fraction(0)] * k
    pi[0] = Fraction(1)
    for n in range(1, k):
        out_mass = sum(P[n][:n], Fraction(0))
        pi[n] = sum((pi[i] * P[i][n] for i in range(n)), Fraction(0)) / out_mass
    total = sum(pi, Fraction(0))
    return {labels[i]: pi[i] / total for i in range(k)}


def period(s: StochasticMap, cls: frozenset) -> int:
    """Period of an irreducible class: gcd of level differences over its edges."""
    labels = _ordered(s, cls)
    level = {labels[0]: 0}
    frontier = [labels[0]]
    while frontier:
        nxt = []
        for v in frontier:
            for w in s.successors(v):
                if w not in level:
                    level[w] = level[v] + 1
                    nxt.append(w)
        frontier = nxt
    g = 0
    for v in labels:
        for w in s.successors(v):
            g = math.gcd(g, level[v] + 1 - level[w])
    return g or 1


def _power_iteration(s: StochasticMap, cls: frozenset, tol: float, max_iters: int) -> dict:
    labels = _ordered(s, cls)
    k = len(labels)
    pos = {x: i for i, x in enumerate(labels)}
    P = np.zeros((k, k))
    for x in labels:
        for t, p in s.rows[x]:
            P[pos[x], pos[t]] += float(p)
    d = period(s, cls)
    # averaging d consecutive iterates of a period-d chain removes the oscillation
    x = np.full(k, 1.0 / k)
    window = [x]
    for _ in range(d - 1):
        window.append(window[-1] @ P)
    avg = np.mean(window, axis=0)
    for _ in range(max_iters):
        window.append(window[-1] @ P)
        window.pop(0)
        new_avg = np.mean(window, axis=0)
        if 0.5 * np.abs(new_avg - avg).sum() <= tol:
            new_avg = new_avg / new_avg.sum()
            return {labels[i]: float(new_avg[i]) for i in range(k)}
        avg = new_avg
    raise ConvergenceError(f"power iteration did not converge in {max_iters} iterations")


def stationary_distributions(
    s: StochasticMap,
    *,
    method: str = "auto",
    exact_threshold: int = EXACT_THRESHOLD,
    tol: float = FLOAT_TOL,
    max_iters: int = MAX_ITERS,
) -> list[Distribution]:
    """One extreme stationary distribution per closed class, in class order.

    ``method`` is ``"auto"`` (exact up to ``exact_threshold`` states),
    ``"exact"`` or ``"float"``.
    """
    if method not in ("auto", "exact", "float"):
        raise ValueError(f"unknown method {method!r}")
    out = []
    for cls in closed_classes(s):
        exact = method == "exact" or (method == "auto" and len(s) <= exact_threshold)
        if exact:
            weights = _gth(s, _ordered(s, cls))
            out.append(Distribution(weights, exact=True))
        else:
            weights = _power_iteration(s, cls, tol, max_iters)
            out.append(Distribution(weights, exact=False))
    return out


def push_forward(d: Distribution, s: StochasticMap) -> Distribution:
    """The distribution d·s."""
    zero = Fraction(0) if d.exact else 0.0
    out = {x: zero for x in s.states}
    for x in d.support():
        px = d[x]
        for t, p in s.rows[x]:
            out[t] += px * (p if d.exact else float(p))
    return Distribution({k: v for k, v in out.items() if v}, exact=d.exact)


def total_variation(d1: Distribution, d2: Distribution) -> Number:
    keys = list(dict.fromkeys([*d1, *d2]))
    if d1.exact and d2.exact:
        return sum((abs(d1[k] - d2[k]) for k in keys), Fraction(0)) / 2
    return 0.5 * sum(abs(float(d1[k]) - float(d2[k])) for k in keys)


def is_fixed_point(s: StochasticMap, d: Distribution, tol: float = 0) -> bool:
    return total_variation(d, push_forward(d, s)) <= tol
