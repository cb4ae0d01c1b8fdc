"""Mean forward coupling time of the extremal paths against n, with a log-log slope."""

import argparse
import csv
import sys
from dataclasses import dataclass, field

import numpy as np

from pathmc import FamilySpec, build_weight_table, coupling_times


@dataclass
class Config:
    family: str = "meander"
    ns: list[int] = field(default_factory=lambda: [16, 32, 64, 128])
    a: int = 1
    b: int = 1
    seeds: int = 200
    weights: str = "quadratic"


def main(cfg: Config) -> float:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n", "mean", "median", "max"])
    means = []
    for n in cfg.ns:
        spec = FamilySpec.build(cfg.family, n, cfg.a, cfg.b)
        times = coupling_times(spec, build_weight_table(n, cfg.weights), range(cfg.seeds))
        means.append(times.mean())
        writer.writerow([n, times.mean(), np.median(times), times.max()])
    slope = np.polyfit(np.log(cfg.ns), np.log(means), 1)[0]
    print(f"# least-squares slope of log mean vs log n: {slope:.3f}", file=sys.stderr)
    return slope


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", default=Config.family)
    p.add_argument("--ns", type=int, nargs="+", default=[16, 32, 64, 128])
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--weights", choices=["quadratic", "uniform"], default="quadratic")
    a = p.parse_args()
    main(Config(a.family, a.ns, a.a, a.b, a.seeds, a.weights))
