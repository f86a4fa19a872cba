"""Scenario files: declarative JSON with every real number written as a decimal string."""

from __future__ import annotations

import dataclasses
import hashlib
import inspect
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .. import families as fam
from .. import sft
from ..cocycle import Cocycle, CocycleError


class ScenarioError(ValueError):
    """Schema or invariant violation in a scenario (exit code 2)."""


def real(value, where: str) -> float:
    if not isinstance(value, str):
        raise ScenarioError(f"{where}: real numbers must be decimal strings, got {value!r}")
    try:
        out = float(Decimal(value))
    except InvalidOperation as exc:
        raise ScenarioError(f"{where}: {value!r} is not a decimal number") from exc
    if not math.isfinite(out):
        raise ScenarioError(f"{where}: {value!r} is not finite")
    return out


def integer(value, where: str, lo: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ScenarioError(f"{where}: must be >= {lo}")
    return value


def _block(raw: dict, name: str, required: bool = True) -> dict:
    blk = raw.get(name)
    if blk is None and not required:
        return {}
    if not isinstance(blk, dict):
        raise ScenarioError(f"missing or malformed block {name!r}")
    return blk


def _known(blk: dict, keys: set, where: str):
    extra = set(blk) - keys
    if extra:
        raise ScenarioError(f"{where}: unknown keys {sorted(extra)}")


@dataclass(frozen=True)
class SftConfig:
    matrix: tuple[tuple[int, ...], ...]
    lam: float

    def space(self) -> sft.SftSpace:
        try:
            return sft.SftSpace(self.matrix, self.lam)
        except sft.SftError as exc:
            raise ScenarioError(f"sft: {exc}") from exc


@dataclass(frozen=True)
class GeneratorConfig:
    family: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegularityConfig:
    q: float = 1.5
    r: float = 1.25
    alpha: float = 0.25
    beta_declared: float = 1.0
    eps0: float = 0.25

    @property
    def gamma(self) -> float:
        return self.q - (math.ceil(self.q) - 1)


@dataclass(frozen=True)
class Tolerances:
    cocycle: float = 1e-9
    holonomy: float = 1e-9
    defect: float = 1e-3
    exponent_slack: float = 0.1
    scan_flat: float = 0.05
    gate: float = 1.5


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    n_max: int = 200
    k_horizon: int = 40
    n_grid: int = 1024
    n_eval: int = 1024
    samples: int = 100
    periodic_max: int = 6
    cocycle_checks: int = 200
    cocycle_range: int = 10
    holonomy_pairs: int = 3
    pair_depth: int = 3
    scan_n: int = 60
    scan_early: int = 10
    scan_samples: int = 2
    scan_r: tuple[float, ...] = (1.0, 1.25, 2.25)
    base_pairs: int = 4
    holonomy_checks: int = 2
    tolerances: Tolerances = field(default_factory=Tolerances)


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    formats: tuple[str, ...] = ("json", "csv")


@dataclass(frozen=True)
class Scenario:
    name: str
    sft: SftConfig
    generator: GeneratorConfig
    regularity: RegularityConfig
    run: RunConfig
    outputs: OutputConfig
    raw: dict = field(repr=False, compare=False, default_factory=dict)

    def with_seed(self, seed: int) -> "Scenario":
        raw = json.loads(json.dumps(self.raw))
        raw.setdefault("run", {})["seed"] = seed
        return dataclasses.replace(self, run=dataclasses.replace(self.run, seed=seed), raw=raw)

    @property
    def digest(self) -> str:
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def space(self) -> sft.SftSpace:
        return self.sft.space()

    def cocycle(self) -> Cocycle:
        space = self.space()
        try:
            c = fam.build(self.generator.family, space, **self.generator.params)
            return dataclasses.replace(c, q=self.regularity.q, r=self.regularity.r, beta=self.regularity.beta_declared)
        except (CocycleError, ValueError, TypeError) as exc:
            raise ScenarioError(f"generator: {exc}") from exc

    def rng(self, label: str) -> np.random.Generator:
        """Independent stream per component, derived from the global seed and a fixed label."""
        key = int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "little")
        return np.random.default_rng(np.random.SeedSequence(self.run.seed, spawn_key=(key,)))


def _param(value, where: str):
    if isinstance(value, str):
        return real(value, where)
    if isinstance(value, bool) or isinstance(value, int):
        return value
    if isinstance(value, list):
        return tuple(_param(v, f"{where}[{i}]") for i, v in enumerate(value))
    raise ScenarioError(f"{where}: unsupported value {value!r} (reals must be decimal strings)")


def _generator(blk: dict) -> GeneratorConfig:
    _known(blk, {"family", "params"}, "generator")
    family = blk.get("family")
    if family not in fam.BUILDERS:
        raise ScenarioError(f"generator.family must be one of {sorted(fam.BUILDERS)}, got {family!r}")
    params = {}
    accepted = set(inspect.signature(fam.BUILDERS[family]).parameters) - {"space", "profile"}
    for key, value in (blk.get("params") or {}).items():
        if key not in accepted:
            raise ScenarioError(f"generator.params: {family} does not take {key!r}")
        params[key] = _param(value, f"generator.params.{key}")
    return GeneratorConfig(family, params)


def _run(blk: dict) -> RunConfig:
    base = RunConfig()
    ints = {f.name for f in dataclasses.fields(RunConfig)} - {"scan_r", "tolerances"}
    _known(blk, ints | {"scan_r", "tolerances"}, "run")
    kw = {}
    for key in ints & set(blk):
        kw[key] = integer(blk[key], f"run.{key}", lo=0)
    if "scan_r" in blk:
        if not isinstance(blk["scan_r"], list) or not blk["scan_r"]:
            raise ScenarioError("run.scan_r must be a non-empty list of decimal strings")
        kw["scan_r"] = tuple(real(v, f"run.scan_r[{i}]") for i, v in enumerate(blk["scan_r"]))
    tol = blk.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ScenarioError("run.tolerances must be an object")
    names = {f.name for f in dataclasses.fields(Tolerances)}
    _known(tol, names, "run.tolerances")
    tvals = {key: real(v, f"run.tolerances.{key}") for key, v in tol.items()}
    for key, v in tvals.items():
        if v <= 0:
            raise ScenarioError(f"run.tolerances.{key} must be positive")
    out = dataclasses.replace(base, tolerances=Tolerances(**tvals), **kw)
    for key in ("n_grid", "n_eval", "n_max", "cocycle_checks"):
        if getattr(out, key) < 1:
            raise ScenarioError(f"run.{key} must be >= 1")
    if out.n_grid % 256:
        raise ScenarioError("run.n_grid must be a multiple of 256 (dyadic fiber offsets)")
    return out


def parse(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    _known(raw, {"name", "sft", "generator", "regularity", "run", "outputs"}, "scenario")
    name = raw.get("name", "scenario")
    if not isinstance(name, str):
        raise ScenarioError("name must be a string")

    sb = _block(raw, "sft")
    _known(sb, {"matrix", "lambda"}, "sft")
    mat = sb.get("matrix")
    if not isinstance(mat, list) or not all(isinstance(row, list) for row in mat):
        raise ScenarioError("sft.matrix must be a list of rows")
    matrix = tuple(tuple(integer(v, "sft.matrix") for v in row) for row in mat)
    sft_cfg = SftConfig(matrix, real(sb.get("lambda", "0.5"), "sft.lambda"))
    sft_cfg.space()

    gen = _generator(_block(raw, "generator"))

    rb = _block(raw, "regularity", required=False)
    _known(rb, {f.name for f in dataclasses.fields(RegularityConfig)}, "regularity")
    reg = RegularityConfig(**{k: real(v, f"regularity.{k}") for k, v in rb.items()})
    if not reg.r < reg.q:
        raise ScenarioError("regularity: r must be below q")
    if not 0.0 < reg.alpha < reg.gamma:
        raise ScenarioError(f"regularity: alpha must lie in (0, gamma) with gamma = {reg.gamma:g}")
    if not 0.0 < reg.beta_declared <= 1.0 or not reg.eps0 > 0:
        raise ScenarioError("regularity: beta_declared must lie in (0, 1] and eps0 must be positive")

    run = _run(_block(raw, "run", required=False))

    ob = _block(raw, "outputs", required=False)
    _known(ob, {"dir", "formats"}, "outputs")
    formats = tuple(ob.get("formats", ("json", "csv")))
    if not set(formats) <= {"json", "csv"}:
        raise ScenarioError("outputs.formats may only contain 'json' and 'csv'")
    out = OutputConfig(str(ob.get("dir", "out")), formats)

    sc = Scenario(name, sft_cfg, gen, reg, run, out, raw)
    sc.cocycle()
    return sc


def load(path: str | Path) -> Scenario:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
    return parse(raw)
