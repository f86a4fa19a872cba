"""Consecutive-term ratios of the stable holonomy on the series family at two distortions."""

import argparse

import numpy as np

from cocyclelab import families as fam
from cocyclelab import holonomy as hol
from cocyclelab import sft


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--eps", type=float, nargs="+", default=[0.02, 0.3])
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    space = sft.SftSpace.full_shift(2, 0.5)
    rng = np.random.default_rng(args.seed)
    x = sft.random_point(space, rng, radius=40)
    y = sft.perturb_past(x, args.depth, rng)
    for eps in args.eps:
        res = hol.stable_holonomy(fam.f3_series(space, eps=eps), x, y, n_eval=1024)
        rat = res.ratios()
        print(f"distortion {eps:g}: n = {res.n_used}, theta* = {res.theta_star:.3f}, theta_hat = {res.theta_hat:.3f}, "
              f"step ok {res.decay_ok(mode='step')}, window ok {res.decay_ok(mode='window')}")
        print("  ratios " + " ".join(f"{v:.2f}" for v in rat))


if __name__ == "__main__":
    main()
