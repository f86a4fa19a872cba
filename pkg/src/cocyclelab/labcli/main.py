"""``cocyclelab`` command line.

Exit codes: 0 all checks pass, 1 a check failed (or a verdict is not PASS),
2 configuration error. Reports are byte-stable JSON; wall-clock and
timestamps go to a separate ``*.meta.json``.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import __version__
from . import commands
from .scenario import ScenarioError, load


def canonical(obj):
    """JSON-safe copy: numpy scalars to Python, tuples to lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def _slug(command: str) -> str:
    return command.replace(" ", "_").replace("-", "_")


def write_outputs(rep: commands.Report, out: Path, strict: bool, formats, meta: dict) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    slug = _slug(rep.command)
    data = rep.to_dict(strict)
    if "json" in formats:
        (out / f"{slug}.json").write_text(dumps(data))
        for name, text in rep.artifacts.items():
            (out / f"{slug}.{name}").write_text(text + "\n")
    if "csv" in formats:
        for name, lines in rep.tables.items():
            (out / f"{slug}.{name}.csv").write_text("\n".join(lines) + "\n")
    (out / f"{slug}.meta.json").write_text(dumps(meta))
    return data


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--out", help="output directory (default: the scenario's outputs.dir)")
    common.add_argument("--seed", type=int, help="override run.seed")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for field construction")
    common.add_argument("--strict", action="store_true", help="advisory tolerance breaches also fail")

    p = argparse.ArgumentParser(prog="cocyclelab", description="Cocycle rigidity laboratory")
    p.add_argument("--version", action="version", version=__version__)
    groups = p.add_subparsers(dest="group", required=True)
    for group, names in (("check", ["cocycle-eq"]), ("run", ["holonomy", "growth", "boundedness", "invariant-metric"]),
                         ("verify", ["thm12", "thm13"])):
        g = groups.add_parser(group).add_subparsers(dest="name", required=True)
        for name in names:
            g.add_parser(name, parents=[common])
    spd = groups.add_parser("spd").add_subparsers(dest="name", required=True)
    meb = spd.add_parser("meb", parents=[common], help="minimal enclosing ball of SPD matrices in a JSON file")
    meb.add_argument("file")
    rpt = groups.add_parser("report").add_subparsers(dest="name", required=True)
    ren = rpt.add_parser("render", help="print a report JSON as a table")
    ren.add_argument("file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0

    if args.group == "report":
        try:
            data = json.loads(Path(args.file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(commands.render(data))
        return 0 if data.get("verdict") == "PASS" else 1

    t0 = time.perf_counter()
    try:
        if args.group == "spd":
            rep = commands.spd_meb(args.file)
            out_dir, formats = Path(args.out or "out"), ("json", "csv")
        else:
            if not args.scenario:
                raise ScenarioError("--scenario is required")
            sc = load(args.scenario)
            if args.seed is not None:
                if args.seed < 0:
                    raise ScenarioError("--seed must be non-negative")
                sc = sc.with_seed(args.seed)
            if args.jobs < 1:
                raise ScenarioError("--jobs must be >= 1")
            rep = commands.COMMANDS[(args.group, args.name)](sc, jobs=args.jobs)
            out_dir, formats = Path(args.out or sc.outputs.dir), sc.outputs.formats
    except ScenarioError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    meta = {
        "command": rep.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "finished_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock_s": round(time.perf_counter() - t0, 3),
        "library_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    data = write_outputs(rep, out_dir, args.strict, formats, meta)
    print(commands.render(canonical(data)))
    return 0 if data["verdict"] == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
