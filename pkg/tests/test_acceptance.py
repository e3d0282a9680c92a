"""Exit criteria. Each test reports one PASS/FAIL line in the terminal summary."""

import contextlib
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from ctcsim import markov
from ctcsim.ctc_circuit import (
    NEWCOMB_STRATEGIES,
    evaluate,
    identity_circuit,
    newcomb_circuit,
    newcomb_payoff,
    not_gate_circuit,
    oracle_circuit,
)
from ctcsim.cycle_modes import (
    DATA_TRANSFER,
    DEUTSCHIAN,
    WEAK_AXIOM_RESET,
    random_register,
    relay,
    run_cycles,
)
from ctcsim.halting_oracle import (
    BOTTOM,
    Halts,
    Undetermined,
    build_oracle_chain,
    classify,
    ideal_geometric,
    index_distribution,
    s_operator,
)
from ctcsim.markov import Distribution
from ctcsim.tm_core import history, serialize_configuration

from conftest import CORPUS, HALTING, MACHINES, NON_HALTING, load

RESULTS: dict[str, str] = {}


@contextlib.contextmanager
def criterion(key, text):
    try:
        yield
    except BaseException:
        RESULTS[key] = f"FAIL  {key}: {text}"
        raise
    RESULTS[key] = f"PASS  {key}: {text}"


def sig(m, t):
    return serialize_configuration(m, history(m, t))


def timed(f, *args):
    start = time.perf_counter()
    out = f(*args)
    return out, time.perf_counter() - start


def test_ac1_halting_fixed_point():
    with criterion("AC1", "halting machines: exact point-mass fixed point at N=64, <1 s"):
        for name, halt_step in HALTING.items():
            m = load(name)
            verdict, elapsed = timed(classify, m, 64)
            assert isinstance(verdict, Halts)
            assert verdict.halt_step == halt_step and verdict.output == 1
            pi = verdict.fixed_point
            assert pi.exact and pi == Distribution.point(sig(m, halt_step))
            assert pi[sig(m, halt_step)] == Fraction(1)
            assert elapsed < 1.0


def test_ac2_geometric_fixed_point():
    with criterion("AC2", "non-halting machines: TV <= 2^-20 from geometric, exact halving, <1 s"):
        for name in NON_HALTING:
            m = load(name)
            verdict, elapsed = timed(classify, m, 20)
            assert isinstance(verdict, Undetermined)
            assert verdict.geometric_tv <= Fraction(1, 2**20)
            idx = index_distribution(build_oracle_chain(m, 20), verdict.stationary)
            assert markov.total_variation(idx, ideal_geometric(20)) == verdict.geometric_tv
            for i in range(20):
                assert idx[i + 1] == idx[i] / 2
            assert elapsed < 1.0


def test_ac3_grandfather_paradox():
    with criterion("AC3", "NOT gate: no deterministic point, exact uniform mixture; identity: both points"):
        r = evaluate(not_gate_circuit(), "")
        assert r.deterministic_fixed_points == ()
        assert r.distribution_fixed_points == (Distribution({"0": Fraction(1, 2), "1": Fraction(1, 2)}),)
        r = evaluate(identity_circuit(), "")
        assert r.deterministic_fixed_points == ("0", "1")
        assert r.distribution_fixed_points == (Distribution.point("0"), Distribution.point("1"))


def test_ac4_weak_axiom_stagnation():
    with criterion("AC4", "weak-axiom reset keeps register_at_start constant (all machines, seeds 0-9)"):
        for name in MACHINES:
            m = load(name)
            for seed in range(10):
                y0 = random_register(m, seed, 64)
                trace = run_cycles(m, y0, WEAK_AXIOM_RESET, 100, 64, seed)
                assert trace.starts() == [y0] * 100


def _records(trace):
    return [
        (r.cycle, r.register_at_start, r.operator_output, r.register_at_next_start, r.output)
        for r in trace.records
    ]


def test_ac5_data_transfer_equivalence():
    covering = relay([[0, 1], [1, 2]])
    gapped = relay([[0, Fraction(1, 2)], [Fraction(3, 4), 2]])
    with criterion("AC5", "data transfer and covering relay equal Deutschian; gapped relay equals reset"):
        for name in MACHINES:
            m = load(name)
            for seed in range(10):
                for y0 in (sig(m, 0), random_register(m, seed, 64)):
                    deut = run_cycles(m, y0, DEUTSCHIAN, 100, 64, seed)
                    assert _records(run_cycles(m, y0, DATA_TRANSFER, 100, 64, seed)) == _records(deut)
                    assert _records(run_cycles(m, y0, covering, 100, 64, seed)) == _records(deut)
                    reset = run_cycles(m, y0, WEAK_AXIOM_RESET, 100, 64, seed)
                    gap = run_cycles(m, y0, gapped, 100, 64, seed)
                    assert _records(gap) == _records(reset)
                    assert [r.survived for r in gap.records] == [r.survived for r in reset.records]


def test_ac6_deutschian_absorption():
    m = load("delay5")
    halt = sig(m, 5)
    with criterion("AC6", "step-5 halter: 0 absorption violations, >= 95/100 traces absorbed"):
        violations = 0
        absorbed = 0
        for seed in range(100):
            starts = run_cycles(m, sig(m, 0), DEUTSCHIAN, 200, 64, seed).starts()
            if halt in starts:
                absorbed += 1
                first = starts.index(halt)
                violations += sum(1 for y in starts[first:] if y != halt)
        print(f"absorbed {absorbed}/100, violations {violations}")
        assert violations == 0
        assert absorbed >= 95


def test_ac7_oracle_equivalence():
    with criterion("AC7", "chain rows equal the operator; circuit encoding gives the same fixed points"):
        for name in MACHINES:
            m = load(name)
            for depth in (1, 2, 5, 20, 64):
                chain = build_oracle_chain(m, depth)
                states = set(chain.map.states)
                s0 = chain.labels[0]
                for label in chain.map.states:
                    op = s_operator(m, label, depth)
                    if not chain.truncated or label != chain.labels[-1]:
                        assert Distribution(chain.map.row(label)) == op
                    else:
                        assert Distribution(chain.map.row(label)) == op.relabel(
                            lambda y: y if y in states else s0
                        )
                assert chain.map.row(BOTTOM) == {s0: 1}
        m = load("halter1")
        chain = build_oracle_chain(m, 64)
        circuit, table = oracle_circuit(chain)
        report = evaluate(circuit, "0")
        assert [table[int(y, 2)] for y in report.deterministic_fixed_points] == [sig(m, 1)]
        assert [d.relabel(lambda y: table[int(y, 2)]) for d in report.distribution_fixed_points] == (
            markov.stationary_distributions(chain.map)
        )


def test_ac8_newcomb():
    with criterion("AC8", "Newcomb: take-both 1000, take-B 1000000, contrarian paradox with uniform mixture"):
        strategies = NEWCOMB_STRATEGIES
        r = evaluate(newcomb_circuit(strategies["take-both"]), "0")
        assert r.deterministic_fixed_points == ("0",)
        assert newcomb_payoff(strategies["take-both"], Distribution.point(0)) == 1000
        r = evaluate(newcomb_circuit(strategies["take-b"]), "0")
        assert r.deterministic_fixed_points == ("1",)
        assert newcomb_payoff(strategies["take-b"], Distribution.point(1)) == 1_000_000
        r = evaluate(newcomb_circuit(strategies["contrarian"]), "0")
        assert r.classical_paradox
        assert r.distribution_fixed_points == (Distribution({"0": Fraction(1, 2), "1": Fraction(1, 2)}),)


INVOCATIONS = [
    ["classify", "halter1.tm", "--depth", "10"],
    ["classify", "rightmover.tm"],
    ["trace", "pingpong.tm", "--depth", "12", "--format", "csv"],
    ["cycles", "rightmover.tm", "--mode", "weak-reset", "--cycles", "100", "--seed", "7"],
    ["cycles", "delay5.tm", "--mode", "deutschian", "--cycles", "200", "--seed", "3", "--format", "json"],
    ["compare", "pingpong.tm", "--seed", "11"],
    ["circuit", "not_gate.ckt"],
    ["circuit", "newcomb_contrarian.ckt"],
]


def test_ac9_determinism(tmp_path):
    with criterion("AC9", "repeated CLI invocations produce byte-identical files"):
        for i, argv in enumerate(INVOCATIONS):
            argv = [str(CORPUS / a) if a.endswith((".tm", ".ckt")) else a for a in argv]
            outputs = []
            for rep in range(2):
                path = tmp_path / f"{i}-{rep}.out"
                subprocess.run([sys.executable, "-m", "ctcsim", *argv, "-o", str(path)], check=True)
                outputs.append(path.read_bytes())
            assert outputs[0] == outputs[1] and outputs[0]
