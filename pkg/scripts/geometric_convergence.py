"""Exact TV distance between the truncated oracle fixed point and the ideal geometric law.

    python scripts/geometric_convergence.py --machine corpus/rightmover.tm --depths 1 2 4 8 16 32 64
"""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from ctcsim.halting_oracle import Undetermined, classify
from ctcsim.tm_core import parse_machine


@dataclass
class Config:
    machine: Path = Path("corpus/rightmover.tm")
    depths: list[int] = field(default_factory=lambda: [1, 2, 4, 8, 16, 32, 64])


def main(cfg: Config) -> None:
    m = parse_machine(cfg.machine.read_text())
    print(f"{'N':>4}  {'TV':>24}  {'TV * 2^(N+1)':>12}")
    for n in cfg.depths:
        v = classify(m, n)
        if not isinstance(v, Undetermined):
            print(f"{n:>4}  halts at step {v.halt_step}")
            continue
        print(f"{n:>4}  {float(v.geometric_tv):>24.6e}  {str(v.geometric_tv * 2 ** (n + 1)):>12}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--machine", type=Path, default=Config.machine)
    p.add_argument("--depths", type=int, nargs="+", default=Config().depths)
    args = p.parse_args()
    main(Config(args.machine, args.depths))
