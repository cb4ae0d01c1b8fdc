"""Draw long paths of every family (n = 600, a = 1, b = 2) and write SVGs.

Also prints the final height of exact culminating samples, which stays far
below the O(n) heights reached by meanders of the same length.
"""

import argparse
import os
from dataclasses import dataclass

from pathmc import FamilySpec, build_weight_table, cftp_sample, mcmc_run, bound_steps
from pathmc.render import render_svg


@dataclass
class Config:
    n: int = 600
    a: int = 1
    b: int = 2
    seed: int = 7
    steps: int | None = None
    culminating_samples: int = 5
    outdir: str = "figures"


def main(cfg: Config) -> None:
    os.makedirs(cfg.outdir, exist_ok=True)
    table = build_weight_table(cfg.n)
    steps = cfg.steps if cfg.steps is not None else bound_steps(cfg.n)
    specs = {
        "meander": FamilySpec.build("meander", cfg.n, cfg.a, cfg.b),
        "excursion": FamilySpec.build("excursion", cfg.n, cfg.a, cfg.b),
        "wall": FamilySpec.build("wall", cfg.n, cfg.a, cfg.b, h=cfg.n // 10,
                                 r=cfg.n // 3, s=cfg.n // 2),
    }
    for name, spec in specs.items():
        path = mcmc_run(spec, table, steps, cfg.seed)
        out = os.path.join(cfg.outdir, f"{name}_n{cfg.n}.svg")
        with open(out, "w") as fh:
            fh.write(render_svg(path, spec, width=1200, height=400))
        print(f"{name}: final height {int(path.heights[-1])}, max {int(path.heights.max())} -> {out}")

    culm = FamilySpec.build("culminating", cfg.n, cfg.a, cfg.b)
    finals = []
    for k in range(cfg.culminating_samples):
        res = cftp_sample(culm, table, cfg.seed + k)
        finals.append(int(res.path.heights[-1]))
        print(f"culminating seed {cfg.seed + k}: final height {finals[-1]}, horizon {res.tau_final}")
    with open(os.path.join(cfg.outdir, f"culminating_n{cfg.n}.svg"), "w") as fh:
        fh.write(render_svg(res.path, culm, width=1200, height=400))
    print(f"culminating mean final height {sum(finals) / len(finals):.1f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=Config.n)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--steps", type=int, help="forward steps (default: contraction-bound count)")
    p.add_argument("--culminating-samples", type=int, default=Config.culminating_samples)
    p.add_argument("--outdir", default=Config.outdir)
    a = p.parse_args()
    main(Config(n=a.n, seed=a.seed, steps=a.steps, culminating_samples=a.culminating_samples,
                outdir=a.outdir))
