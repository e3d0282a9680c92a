"""Desk-scale simulator of classical closed-timelike-curve computation."""

from .ctc_circuit import CtcCircuit, ParadoxReport, evaluate, newcomb_circuit, parse_circuit
from .cycle_modes import SemanticsMode, Timeline, compare_modes, relay_covers, run_cycles
from .halting_oracle import Halts, Undetermined, build_oracle_chain, classify, s_operator
from .markov import Distribution, StochasticMap, build_map, stationary_distributions
from .tm_core import Configuration, TuringMachine, parse_machine

__version__ = "0.1.0"
