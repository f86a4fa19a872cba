"""Run every scenario through every labcli command and print a verdict grid.

usage: python3 scripts/sweep.py [--scenarios DIR] [--out DIR] [--only NAME ...]
"""

import argparse
import contextlib
import io
import json
import time
from pathlib import Path

from cocyclelab.labcli.main import main

COMMANDS = [("check", "cocycle-eq"), ("run", "holonomy"), ("run", "growth"), ("run", "boundedness"),
            ("run", "invariant-metric"), ("verify", "thm12"), ("verify", "thm13")]


def run(path: Path, out: Path) -> dict[str, str]:
    row = {}
    for group, name in COMMANDS:
        t0 = time.perf_counter()
        with contextlib.redirect_stdout(io.StringIO()):
            main([group, name, "--scenario", str(path), "--out", str(out)])
        slug = f"{group}_{name}".replace("-", "_")
        verdict = json.loads((out / f"{slug}.json").read_text())["verdict"]
        row[f"{group} {name}"] = f"{verdict} ({time.perf_counter() - t0:.0f}s)"
    return row


def main_() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--scenarios", default="scenarios")
    p.add_argument("--out", default="out")
    p.add_argument("--only", nargs="*")
    args = p.parse_args()
    paths = sorted(Path(args.scenarios).glob("*.json"))
    if args.only:
        paths = [q for q in paths if q.stem in args.only]
    for path in paths:
        row = run(path, Path(args.out) / path.stem)
        print(path.stem)
        for cmd, v in row.items():
            print(f"  {cmd:<24} {v}")


if __name__ == "__main__":
    main_()
