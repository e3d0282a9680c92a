"""Run every cycle-semantics mode over the machine corpus and tabulate the outcome."""

import argparse
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ctcsim.cycle_modes import (
    DATA_TRANSFER,
    DEUTSCHIAN,
    LAST_MOMENT_DESTRUCTION,
    OPPOSITE_DIRECTION_TRANSFER,
    WEAK_AXIOM_RESET,
    compare_modes,
    relay,
)
from ctcsim.tm_core import initial_configuration, parse_machine, serialize_configuration

MODES = [
    DEUTSCHIAN,
    DATA_TRANSFER,
    WEAK_AXIOM_RESET,
    LAST_MOMENT_DESTRUCTION,
    relay([[0, 1], [1, 2]]),
    relay([[0, Fraction(1, 2)], [1, 2]]),
    OPPOSITE_DIRECTION_TRANSFER,
]


@dataclass
class Config:
    corpus: Path = Path("corpus")
    cycles: int = 200
    depth: int = 64
    seed: int = 0


def main(cfg: Config) -> None:
    print(f"{'machine':<12} {'mode':<28} {'halting?':>8} {'distinct':>8}  class")
    for path in sorted(cfg.corpus.glob("*.tm")):
        m = parse_machine(path.read_text())
        y0 = serialize_configuration(m, initial_configuration(m))
        report = compare_modes(m, y0, MODES, cfg.cycles, cfg.depth, cfg.seed)
        for s in report.summaries:
            print(
                f"{path.stem:<12} {s.mode.label():<28} {str(s.reaches_halting_history):>8} "
                f"{s.distinct_registers:>8}  {s.equivalence_class}"
            )


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--corpus", type=Path, default=Config.corpus)
    p.add_argument("--cycles", type=int, default=Config.cycles)
    p.add_argument("--depth", type=int, default=Config.depth)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(a.corpus, a.cycles, a.depth, a.seed))
