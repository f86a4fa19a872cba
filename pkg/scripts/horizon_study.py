"""Invariance defect of the orbit-set metric against the horizon k.

Generic rotation angles close the pullback-set extremes slowly; half-turn
angles close them after a few steps. Prints the sup defect over Parry samples.
"""

import argparse

import numpy as np

from cocyclelab import diffeo1d as d1
from cocyclelab import families as fam
from cocyclelab import invmetric as im
from cocyclelab import sft


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ks", type=int, nargs="+", default=[10, 20, 40, 80, 160])
    p.add_argument("--points", type=int, default=6)
    p.add_argument("--grid", type=int, default=128)
    args = p.parse_args()
    space = sft.SftSpace.full_shift(2, 0.5)
    pts = sft.sample(sft.parry_measure(space), seed=0, count=args.points, radius=max(args.ks) + 10)
    t = d1.uniform_grid(args.grid)
    families = {"F3 generic angles": fam.f3_conjugated(space), "F3 half-turn": fam.f3_series(space, half_turn=True)}
    print(f"{'k':>5}" + "".join(f"{name:>22}" for name in families))
    for k in args.ks:
        vals = [max(im.invariance_defect(c, x, t, k).value for x in pts) for c in families.values()]
        print(f"{k:>5}" + "".join(f"{v:>22.3e}" for v in vals))


if __name__ == "__main__":
    main()
