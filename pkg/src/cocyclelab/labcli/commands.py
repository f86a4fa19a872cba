"""Subcommand pipelines. Each returns a report dict plus CSV tables.

CSV schemas
  check cocycle-eq      cocycle_eq.csv     case,x,n,k,eq_defect,inv_defect
  run holonomy          holonomy.csv       side,pair,n_used,theta_hat,tail_bound,converged,H1,H2,error
  run growth            scan_r<r>.csv      x_id,n,norm_r,norm_1,log_deriv_rate
                        growth.csv         n,exponent
  run boundedness       periodic.csv       point,period,norm_q,norm_1
  run invariant-metric  field.csv          point,provenance,min_log,max_log,invariance_defect
  verify thm12          scan_r<r>.csv      as in run growth
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path

import numpy as np

from .. import __version__
from .. import cocycle as cc
from .. import diffeo1d as d1
from .. import holonomy as hol
from .. import invmetric as im
from .. import sft
from .. import spdspace as sp
from .scenario import Scenario, ScenarioError, real


class Report:
    def __init__(self, command: str, sc: Scenario | None):
        self.command = command
        self.checks: list[dict] = []
        self.tables: dict[str, list[str]] = {}
        self.artifacts: dict[str, str] = {}
        self.extra: dict = {}
        self.verdict: str | None = None
        self.header = {"command": command, "library_version": __version__}
        if sc is not None:
            self.header.update(scenario=sc.name, scenario_hash=sc.digest, seed=sc.run.seed, family=sc.generator.family)

    def check(self, name: str, invariant: str, value, threshold, ok: bool, advisory: bool = False, **evidence):
        self.checks.append({"name": name, "invariant": invariant, "value": value, "threshold": threshold,
                            "pass": bool(ok), "advisory": advisory, "evidence": evidence})

    def failed(self, strict: bool) -> list[str]:
        return [ch["name"] for ch in self.checks if not ch["pass"] and (strict or not ch["advisory"])]

    def to_dict(self, strict: bool) -> dict:
        failing = self.failed(strict)
        verdict = self.verdict or ("PASS" if not failing else "FAIL")
        return {**self.header, **self.extra, "strict": strict, "verdict": verdict, "failing": failing,
                "checks": self.checks}


def _c1_gap(g: d1.CircleMap, h: d1.CircleMap, n_eval: int) -> float:
    t = d1.uniform_grid(n_eval)
    return float(np.abs(d1.circle_dist(g.lift(t) - h.lift(t))).max()
                 + np.abs(g.derivative(1, t) - h.derivative(1, t)).max())


def _g(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------------------


def check_cocycle_eq(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("check cocycle-eq", sc)
    c, run = sc.cocycle(), sc.run
    rng = sc.rng("cocycle-eq")
    rows, eq_max, inv_max = ["case,x,n,k,eq_defect,inv_defect"], 0.0, 0.0
    for i in range(run.cocycle_checks):
        x = sft.random_point(c.base, rng)
        n, k = (int(v) for v in rng.integers(-run.cocycle_range, run.cocycle_range + 1, size=2))
        lhs = cc.iterate(c, x, n + k)
        rhs = d1.compose(cc.iterate(c, sft.shift(x, k), n), cc.iterate(c, x, k))
        eq = _c1_gap(lhs, rhs, run.n_eval)
        inv = _c1_gap(cc.iterate(c, sft.shift(x, n), -n), d1.invert(cc.iterate(c, x, n)), run.n_eval)
        eq_max, inv_max = max(eq_max, eq), max(inv_max, inv)
        rows.append(f"{i},{x.serialize()},{n},{k},{_g(eq)},{_g(inv)}")
    tol = run.tolerances.cocycle
    rep.check("cocycle_equation", "cocycle.iterate: A(x,n+k) = A(f^k x,n) A(x,k)", eq_max, tol, eq_max <= tol,
              cases=run.cocycle_checks)
    rep.check("inverse_branch", "cocycle.iterate: A(f^n x,-n) = A(x,n)^-1", inv_max, tol, inv_max <= tol,
              cases=run.cocycle_checks)
    rep.tables["cocycle_eq"] = rows
    return rep


def run_holonomy(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("run holonomy", sc)
    c, run = sc.cocycle(), sc.run
    rng = sc.rng("holonomy")
    kw = {"tol": run.tolerances.holonomy, "n_max": run.n_max, "n_eval": run.n_eval}
    rows = ["side,pair,n_used,theta_hat,tail_bound,converged,H1,H2,error"]
    pairs = []
    for side, perturb in (("stable", sft.perturb_past), ("unstable", sft.perturb_future)):
        for i in range(run.holonomy_pairs):
            x = sft.random_point(c.base, rng, radius=30)
            y, z = perturb(x, run.pair_depth, rng), perturb(x, run.pair_depth + 1, rng)
            try:
                r = hol.holonomy_report(c, x, y, z, side=side, **kw)
            except hol.NoDecayError as exc:
                rows.append(f"{side},{i},,,,False,,,no-decay")
                rep.check(f"{side}_{i}", "holonomy: consecutive terms decay", "no-decay", kw["tol"], False,
                          diagnostics=exc.diagnostics, message=str(exc))
                continue
            h1, h2 = r["defects"]["H1"], r["defects"]["H2"]
            rows.append(f"{side},{i},{r['n_used']},{_g(r['theta_hat'])},{_g(r['tail_bound'])},{r['converged']},"
                        f"{_g(h1['value'])},{_g(h2['value'])},")
            ok = r["converged"] and h1["value"] <= h1["budget"] and h2["value"] <= h2["budget"]
            rep.check(f"{side}_{i}", "holonomy: converged, (H1) and (H2) within budget", h2["value"], h2["budget"],
                      ok, report=r)
            pairs.append((side, x))
    for side in ("stable", "unstable"):
        perturb = sft.perturb_past if side == "stable" else sft.perturb_future
        xs = [x for s, x in pairs if s == side]
        if not xs:
            continue
        x = xs[0]
        chain = [(x, perturb(x, d, rng)) for d in (1, 3, 5, 7, 9, 11)]
        fit = hol.fit_H3(c, chain, side=side, **kw)
        need = c.beta * c.rho - run.tolerances.exponent_slack
        rep.check(f"H3_{side}", "holonomy.fit_H3 exponent", fit.exponent if fit.exact else fit.slope, need,
                  fit.exact or fit.slope >= need, exact=fit.exact, constant=fit.constant,
                  intermediate_ok=fit.intermediate_ok)
        rep.check(f"H3_{side}_intermediate", "holonomy.fit_H3 intermediate terms", fit.worst_intermediate, 1.1,
                  fit.intermediate_ok, advisory=True)
    rep.tables["holonomy"] = rows
    return rep


def _scan_samples(sc: Scenario, c: cc.Cocycle):
    return sft.sample(sft.parry_measure(c.base), seed=sc.run.seed, count=sc.run.scan_samples)


def _scans(sc: Scenario, c: cc.Cocycle, rep: Report, advisory: bool):
    run = sc.run
    samples = _scan_samples(sc, c)
    for r in run.scan_r:
        res = cc.value_bound_scan(c, samples, run.scan_n, r, run.scan_early, run.tolerances.scan_flat, run.n_eval)
        tag = f"scan_r{r:g}"
        rep.tables[tag] = res.csv_lines()
        rep.check(tag, "cocycle.value_bound_scan plateaued", res.ratio, 1 + run.tolerances.scan_flat,
                  res.trend == "plateaued", advisory=advisory, sup=res.sup, sup_early=res.sup_early,
                  argmax=list(res.argmax))
    return samples


def run_growth(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("run growth", sc)
    c = sc.cocycle()
    samples = _scans(sc, c, rep, advisory=True)
    ge = cc.growth_exponent(c, samples[0], 0.5, sc.run.scan_n)
    rep.tables["growth"] = ["n,exponent"] + [f"{n},{_g(v)}" for n, v in ge.items()]
    rep.extra["growth_exponent_at_horizon"] = ge[sc.run.scan_n]
    return rep


def _gate(sc: Scenario, c: cc.Cocycle, rep: Report) -> cc.PeriodicSummary:
    run = sc.run
    summ = cc.periodic_data(c, run.periodic_max, n_eval=run.n_eval, gate=run.tolerances.gate)
    rows = ["point,period,norm_q,norm_1"]
    for d in summ.data:
        rows.append(f"{d.point.serialize()},{d.period},{_g(d.norm_q.two_sided)},{_g(d.norm_1.two_sided)}")
    rep.tables["periodic"] = rows
    rep.check("periodic_data_bounded", "cocycle.periodic_data bounded", summ.growth_ratio, run.tolerances.gate,
              summ.bounded, sup_q=summ.sup_q, sup_q_half=summ.sup_q_half, points=len(summ.data))
    return summ


def run_boundedness(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("run boundedness", sc)
    _gate(sc, sc.cocycle(), rep)
    return rep


def run_invariant_metric(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("run invariant-metric", sc)
    c, run = sc.cocycle(), sc.run
    pts, prov = im.field_samples(c.base, run.samples, run.seed, run.periodic_max)
    fld = im.build_field(c, pts, prov, run.n_grid, run.k_horizon, jobs,
                         params={"seed": run.seed, "scenario": sc.name, "family": sc.generator.family})
    rep.artifacts["metric_field.json"] = fld.to_json()
    rows = ["point,provenance,min_log,max_log,invariance_defect"]
    worst = 0.0
    for x, p, lv in zip(pts, prov, fld.log_values):
        rows.append(f"{x.serialize()},{p},{_g(lv.min())},{_g(lv.max())},")
    probe = min(len(pts), 4)
    for i in range(probe):
        d = im.invariance_defect(c, pts[i], fld.fiber_grid, run.k_horizon)
        worst = max(worst, d.value)
        rows[1 + i] += _g(d.value)
        rep.check(f"invariance_{i}", "invmetric.invariance_defect within window gap", d.value, d.allowed, d.ok,
                  advisory=True)
    rep.tables["field"] = rows
    rep.check("field_bounded", "invmetric.MetricField log-values bounded", fld.log_bound, math.inf,
              math.isfinite(fld.log_bound))
    fh = im.fiber_holder_check(fld, sc.regularity.alpha)
    need = sc.regularity.alpha - run.tolerances.exponent_slack
    rep.check("fiber_holder", "invmetric.fiber_holder_check", fh.exponent, need, fh.exponent >= need,
              advisory=True, constant=fh.constant)
    rep.extra["max_invariance_defect"] = worst
    return rep


def verify_thm12(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("verify thm12", sc)
    c = sc.cocycle()
    summ = _gate(sc, c, rep)
    if not summ.bounded:
        rep.verdict = "NOT-APPLICABLE"
        return rep
    _scans(sc, c, rep, advisory=False)
    return rep


def verify_thm13(sc: Scenario, jobs: int = 1) -> Report:
    rep = Report("verify thm13", sc)
    c, run = sc.cocycle(), sc.run
    cfg = im.VerdictConfig(k=run.k_horizon, n_grid=run.n_grid, n_parry=run.samples, periodic_max=run.periodic_max,
                           seed=run.seed, alpha=sc.regularity.alpha, defect_tol=run.tolerances.defect,
                           exponent_slack=run.tolerances.exponent_slack, gate=run.tolerances.gate,
                           gate_period=run.periodic_max, base_pairs=run.base_pairs,
                           holonomy_pairs=run.holonomy_checks, holonomy_tol=run.tolerances.holonomy, jobs=jobs)
    out = im.theorem13_verdict(c, cfg)
    g = out["gate"]
    rep.check("periodic_data_bounded", g["invariant"], g["growth_ratio"], run.tolerances.gate, g["bounded"],
              sup_q=g["sup_q"], sup_q_half=g["sup_q_half"])
    for ch in out["checks"]:
        rep.check(ch["name"], ch["invariant"], ch["value"], ch["threshold"], ch["pass"], **ch["evidence"])
    rep.verdict = out["verdict"]
    rep.extra["n_samples"] = out.get("n_samples", 0)
    return rep


def spd_meb(path: str, strict: bool = False) -> Report:
    import json

    rep = Report("spd meb", None)
    try:
        raw = json.loads(Path(path).read_text())
        tol = real(raw.get("tol", "1e-10"), "tol")
        method = raw.get("method", "auto")
        pts = [sp.SpdPoint(np.array([[_num(v) for v in row] for row in m], dtype=float)) for m in raw["points"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ScenarioError(f"spd meb: {exc}") from exc
    ball = sp.min_enclosing_ball(pts, tol=tol, method=method)
    rep.header["input"] = Path(path).name
    rep.extra["ball"] = ball.to_dict()
    rep.check("certificate", "spdspace.min_enclosing_ball radius - lower bound", ball.gap, tol, ball.gap <= tol,
              points=len(pts))
    return rep


def _num(v) -> float:
    return real(v, "points") if isinstance(v, str) else float(v)


COMMANDS = {
    ("check", "cocycle-eq"): check_cocycle_eq,
    ("run", "holonomy"): run_holonomy,
    ("run", "growth"): run_growth,
    ("run", "boundedness"): run_boundedness,
    ("run", "invariant-metric"): run_invariant_metric,
    ("verify", "thm12"): verify_thm12,
    ("verify", "thm13"): verify_thm13,
}


def render(report: dict) -> str:
    lines = [f"{report.get('command', '?')}  verdict {report.get('verdict', '?')}"]
    if "scenario" in report:
        lines.append(f"scenario {report['scenario']}  seed {report.get('seed')}  hash {report.get('scenario_hash', '')[:12]}")
    for ch in report.get("checks", []):
        mark = "PASS" if ch["pass"] else ("warn" if ch.get("advisory") else "FAIL")
        lines.append(f"{mark:4}  {ch['name']:<26} value={_fmt(ch['value']):<12} threshold={_fmt(ch['threshold'])}")
    return "\n".join(lines)


def _fmt(v) -> str:
    return f"{v:.4g}" if isinstance(v, float) else str(v)


def scenario_summary(sc: Scenario) -> dict:
    return {"run": dataclasses.asdict(sc.run), "regularity": dataclasses.asdict(sc.regularity)}
