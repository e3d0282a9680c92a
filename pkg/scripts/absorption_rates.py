"""Empirical vs exact absorption rate of Deutschian cycle traces for delay-then-halt machines."""

import argparse
from dataclasses import dataclass

from ctcsim.cycle_modes import DEUTSCHIAN, absorption_probability, run_cycles
from ctcsim.tm_core import history, parse_machine, serialize_configuration


@dataclass
class Config:
    halt_steps: tuple[int, ...] = (1, 3, 5, 7)
    cycles: int = 200
    seeds: int = 200


def delay_machine(k: int):
    names = [f"Q{i}" for i in range(k)] + ["H"]
    lines = [f"states: {' '.join(names)}", "start: Q0", "halt: H", "alphabet: 1 _"]
    lines += [f"delta: Q{i} {a} -> {names[i + 1]} 1 R" for i in range(k) for a in ("_", "1")]
    return parse_machine("\n".join(lines))


def main(cfg: Config) -> None:
    print(f"{'halt step':>9}  {'exact':>8}  {'empirical':>9}  {'mean cycles to absorb':>22}")
    for k in cfg.halt_steps:
        m = delay_machine(k)
        y0 = serialize_configuration(m, history(m, 0))
        halt = serialize_configuration(m, history(m, k))
        hits, first = 0, []
        for seed in range(cfg.seeds):
            starts = run_cycles(m, y0, DEUTSCHIAN, cfg.cycles, k + 1, seed).starts()
            if halt in starts:
                hits += 1
                first.append(starts.index(halt))
        mean = sum(first) / len(first) if first else float("nan")
        exact = float(absorption_probability(k, cfg.cycles))
        print(f"{k:>9}  {exact:>8.4f}  {hits / cfg.seeds:>9.4f}  {mean:>22.1f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--halt-steps", type=int, nargs="+", default=list(Config.halt_steps))
    p.add_argument("--cycles", type=int, default=Config.cycles)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    a = p.parse_args()
    main(Config(tuple(a.halt_steps), a.cycles, a.seeds))
