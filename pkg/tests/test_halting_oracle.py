from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ctcsim import markov
from ctcsim.halting_oracle import (
    BOTTOM,
    TAIL,
    Halts,
    Undetermined,
    build_oracle_chain,
    classify,
    ideal_geometric,
    index_distribution,
    s_operator,
)
from ctcsim.markov import Distribution
from ctcsim.tm_core import history, parse_machine, serialize_configuration

from conftest import HALTING, MACHINES, NON_HALTING, load

F = Fraction


def sig(m, t):
    return serialize_configuration(m, history(m, t))


def delay_machine(k):
    """Walks right through k-1 counting states and halts on step k."""
    names = [f"Q{i}" for i in range(k)] + ["H"]
    lines = [f"states: {' '.join(names)}", "start: Q0", "halt: H", "alphabet: 1 _"]
    for i in range(k):
        for a in ("_", "1"):
            lines.append(f"delta: Q{i} {a} -> {names[i + 1]} 1 R")
    return parse_machine("\n".join(lines))


# --- s_operator -------------------------------------------------------------


def test_halting_history_is_fixed(halter):
    y = sig(halter, 1)
    assert s_operator(halter, y, 10) == Distribution.point(y)


def test_nonhalting_history_branches(rightmover):
    out = s_operator(rightmover, sig(rightmover, 2), 10)
    assert out == Distribution({sig(rightmover, 3): F(1, 2), sig(rightmover, 0): F(1, 2)})


@pytest.mark.parametrize("name", MACHINES)
def test_garbage_resets(name):
    m = load(name)
    assert s_operator(m, b"garbage", 10) == Distribution.point(sig(m, 0))


# --- build_oracle_chain -----------------------------------------------------


def test_halter_chain(halter):
    chain = build_oracle_chain(halter, 10)
    s0, s1 = sig(halter, 0), sig(halter, 1)
    assert chain.map.states == (s0, s1, BOTTOM)
    assert chain.halted_within_bound
    assert chain.map.row(s0) == {s1: F(1, 2), s0: F(1, 2)}
    assert chain.map.row(s1) == {s1: 1}
    assert chain.map.row(BOTTOM) == {s0: 1}


def test_rightmover_chain_depth_2(rightmover):
    chain = build_oracle_chain(rightmover, 2)
    s0, s1, s2 = (sig(rightmover, t) for t in range(3))
    assert chain.map.states == (s0, s1, s2, BOTTOM)
    assert not chain.halted_within_bound and chain.truncated
    assert chain.map.row(s0) == {s1: F(1, 2), s0: F(1, 2)}
    assert chain.map.row(s1) == {s2: F(1, 2), s0: F(1, 2)}
    assert chain.map.row(s2) == {s0: 1}
    assert chain.map.row(BOTTOM) == {s0: 1}


@pytest.mark.parametrize("name", MACHINES)
def test_depth_one_minimal(name):
    chain = build_oracle_chain(load(name), 1)
    assert len(chain.map.states) == 3


def test_depth_must_be_positive(halter):
    with pytest.raises(ValueError):
        build_oracle_chain(halter, 0)


@pytest.mark.parametrize("name", MACHINES)
@pytest.mark.parametrize("depth", [1, 3, 8])
def test_chain_rows_match_operator(name, depth):
    m = load(name)
    chain = build_oracle_chain(m, depth)
    enumerated = set(chain.map.states)
    s0 = chain.labels[0]
    for label in chain.map.states:
        op = s_operator(m, label, depth)
        # truncation: mass leaving the enumerated strings is sent to sigma_0
        folded = op.relabel(lambda y: y if y in enumerated else s0)
        assert Distribution(chain.map.row(label)) == folded


def test_cycling_machine_closes_its_own_loop():
    # A bounces between two configurations without ever writing
    m = parse_machine("states: A B H\nstart: A\nhalt: H\nalphabet: _\n"
                      "delta: A _ -> B _ R\ndelta: B _ -> A _ L\n")
    chain = build_oracle_chain(m, 10)
    assert chain.loop_to == 0 and not chain.truncated
    for label in chain.map.states:
        assert Distribution(chain.map.row(label)) == s_operator(m, label, 10)
    verdict = classify(m, 10)
    assert isinstance(verdict, Undetermined)


# --- ideal_geometric --------------------------------------------------------


def test_ideal_geometric_examples():
    assert dict(ideal_geometric(0)) == {0: F(1, 2), TAIL: F(1, 2)}
    assert dict(ideal_geometric(2)) == {0: F(1, 2), 1: F(1, 4), 2: F(1, 8), TAIL: F(1, 8)}


@given(st.integers(0, 80))
def test_ideal_geometric_total_mass(n):
    assert sum(ideal_geometric(n).values()) == 1


# --- classify ---------------------------------------------------------------


def test_classify_halter(halter):
    v = classify(halter, 10)
    assert v == Halts(1, Distribution.point(sig(halter, 1)))
    assert v.output == 1
    assert v.to_json() == {"kind": "halts", "halt_step": 1, "output": 1}


def closed_form_tv(depth):
    """TV between pi_i = 2^-i / (2 - 2^-N) and the ideal geometric with its tail bucket."""
    pi = {i: F(1, 2**i) / (2 - F(1, 2**depth)) for i in range(depth + 1)}
    g = {i: F(1, 2 ** (i + 1)) for i in range(depth + 1)}
    return (sum(abs(pi[i] - g[i]) for i in pi) + F(1, 2 ** (depth + 1))) / 2


@pytest.mark.parametrize("name", NON_HALTING)
def test_classify_nonhalting(name):
    v = classify(load(name), 20)
    assert isinstance(v, Undetermined)
    assert v.geometric_tv == closed_form_tv(20) == F(1, 2**21)
    assert v.geometric_tv <= F(1, 2**20)
    assert v.to_json() == {"kind": "undetermined", "N": 20, "geometric_tv": "1/2097152"}


def test_boundary_halt_at_depth():
    m = delay_machine(7)
    assert classify(m, 7) == Halts(7, Distribution.point(sig(m, 7)))
    assert isinstance(classify(m, 6), Undetermined)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 12), extra=st.integers(0, 20))
def test_halts_is_monotone_in_depth(k, extra):
    m = delay_machine(k)
    v = classify(m, k)
    assert isinstance(v, Halts)
    assert classify(m, k + extra) == v


@pytest.mark.parametrize("name", NON_HALTING)
@pytest.mark.parametrize("depth", [1, 2, 5, 13])
def test_truncated_stationary_halves(name, depth):
    chain = build_oracle_chain(load(name), depth)
    (cls,) = markov.closed_classes(chain.map)
    assert chain.labels[0] in cls and BOTTOM not in cls
    (pi,) = markov.stationary_distributions(chain.map)
    idx = index_distribution(chain, pi)
    for i in range(depth):
        assert idx[i + 1] == idx[i] / 2
    assert markov.total_variation(idx, ideal_geometric(depth)) <= F(1, 2**depth)


@pytest.mark.parametrize("name, halt_step", HALTING.items())
def test_halting_single_closed_class(name, halt_step):
    m = load(name)
    chain = build_oracle_chain(m, 64)
    assert markov.closed_classes(chain.map) == [frozenset([sig(m, halt_step)])]
    # brute-force scan of the rows: exactly one state maps to itself
    fixed = [x for x in chain.map.states if chain.map.row(x) == {x: 1}]
    assert fixed == markov.deterministic_fixed_points(chain.map) == [sig(m, halt_step)]
