"""Reproducible end-to-end scenarios; each one states its instance and checks assertions on it."""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .gaussflow import ProcessSpec, rigidity_check, simulate
from .kronecker import build_kronecker_points, rigidity_witness, verify_kronecker_property
from .numkit import NumericReal, SymbolicReal, evaluate_expression
from .qindep import check_q_independence, expand_group, value_text
from .specmeasure import (COLLISIONS, MEMBER, GroupMeasure, abs_continuity_test, atomic,
                          mix, realize, scale_measure, singularity_test, structural_self_similarity,
                          support_overlap, translate_measure)
from .specmeasure.io import to_dict


@dataclass
class ScenarioConfig:
    name: str
    parameters: dict = field(default_factory=dict)
    output_dir: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.name!r}; known: {', '.join(sorted(SCENARIOS))}")

    def param(self, key, default):
        return self.parameters.get(key, default)

    def config_hash(self) -> str:
        blob = json.dumps({"name": self.name, "parameters": self.parameters},
                          sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Assertion:
    name: str
    operation: str
    tolerance: object
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "operation": self.operation, "tolerance": self.tolerance,
                "passed": bool(self.passed), "detail": self.detail}


@dataclass
class ScenarioReport:
    name: str
    config: ScenarioConfig
    instance: dict
    assertions: list
    artifacts: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        """Deterministic content only; wall-clock timings are kept out so reruns compare equal."""
        return {
            "name": self.name,
            "tool_version": __version__,
            "config": {"parameters": self.config.parameters},
            "config_hash": self.config.config_hash(),
            "instance": self.instance,
            "assertions": [a.to_dict() for a in self.assertions],
            "passed": self.passed,
            "artifacts": self.artifacts,
        }


def _pmap(cfg: ScenarioConfig, fn: Callable, items: list) -> list:
    """Order-preserving map, threaded when ``cfg.jobs > 1``."""
    if cfg.jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(fn, items))


def _num(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    return float(evaluate_expression(str(text), 64))


# -- scenarios ---------------------------------------------------------------------------


def km10_demo(cfg: ScenarioConfig) -> tuple[dict, list]:
    tier = cfg.param("tier", "symbolic")
    R = int(cfg.param("radius", 3))
    seed = int(cfg.param("seed", 0))
    targets = cfg.param("targets", ["0.3", "0.6"])
    delta = Fraction(str(cfg.param("delta", "0.01")))
    ys = [Fraction(str(y)) for y in targets]
    if tier == "symbolic":
        h = SymbolicReal.symbol("tau")
        assignment = {"tau": NumericReal.of("pi")}
    else:
        h = NumericReal.of("pi")
        assignment = {}
    spec = build_kronecker_points(ys, delta, expand_group([h], 1), tier, seed=seed)
    assignment.update(spec.assignment)
    weight = Fraction(1, len(spec.points))
    base = atomic([(x, weight) for x in spec.points], tier)
    gm = GroupMeasure((h,), base, Fraction(1, 2), Fraction(1), R)
    sigma = realize(gm)
    out = []
    for k in range(1, R + 1):
        for sign in (1, -1):
            s = sign * h ** k if tier == "symbolic" else NumericReal.of("pi") ** k * sign
            v = structural_self_similarity(gm, s)
            out.append(Assertion(f"scale {'-' if sign < 0 else ''}h^{k} is a group word",
                                 "structural_self_similarity", "exact word match" if tier ==
                                 "symbolic" else "relative 1e-12", v.kind == MEMBER, v.to_dict()))
    for label in ("2", "3/2", "e"):
        s = Fraction(label) if label != "e" else math.e
        v = structural_self_similarity(gm, s, assignment)
        out.append(Assertion(f"scale {label} has no collisions", "structural_self_similarity",
                             "collision-count == 0", v.kind == COLLISIONS and v.collision_count == 0,
                             v.to_dict()))
    frac = support_overlap(sigma, h if tier == "symbolic" else float(h), assignment)
    n = len(spec.points)
    expected = Fraction(2 * R * n, (2 * R + 1) * n)
    out.append(Assertion("numeric overlap of scale h", "support_overlap", "exact fraction",
                         frac == expected, {"fraction": str(frac), "expected": str(expected)}))
    instance = {"tier": tier, "generator": value_text(h), "radius": R,
                "points": [value_text(x) for x in spec.points],
                "certificate": spec.certificate, "atoms": len(sigma.atoms)}
    return instance, out


def _independent_points(tier: str, n: int, seed: int):
    ys = [Fraction(2 * i + 1, 2 * n + 2) for i in range(n)]
    one = SymbolicReal(1) if tier == "symbolic" else NumericReal.of(1)
    return build_kronecker_points(ys, Fraction(1, 100), expand_group([one], 0), tier, seed=seed)


def mkj_singularity(cfg: ScenarioConfig) -> tuple[dict, list]:
    tier = cfg.param("tier", "symbolic")
    seed = int(cfg.param("seed", 0))
    n_r = int(cfg.param("translations", 100))
    scales = [Fraction(str(s)) for s in cfg.param("scales", ["2", "1/2", "3/2"])]
    spec = _independent_points(tier, int(cfg.param("points", 4)), seed)
    sigma = atomic([(x, Fraction(1, len(spec.points))) for x in spec.points], tier) \
        if tier == "symbolic" else atomic([(float(x), 1.0 / len(spec.points)) for x in spec.points])
    rng = np.random.default_rng(seed)
    rs = [Fraction(int(v), 10**6) for v in rng.integers(-10**7, 10**7, n_r)]
    status = check_q_independence(list(spec.points)).status

    def one(args):
        s, r = args
        rr = r if tier == "symbolic" else float(r)
        return singularity_test(sigma, translate_measure(scale_measure(sigma, s), rr)).status

    cases = [(s, r) for s in scales for r in rs]
    results = _pmap(cfg, one, cases)
    singular = sum(1 for v in results if v == "singular")
    out = [
        Assertion("support is rationally independent", "check_q_independence",
                  "exact" if tier == "symbolic" else "max_coeff 1e4 at 128 bits",
                  status in ("independent-exact", "none-found-within-bounds"), {"status": status}),
        Assertion("scaled translates are singular", "singularity_test", "all cases",
                  singular == len(cases), {"singular": singular, "cases": len(cases)}),
    ]
    instance = {"tier": tier, "points": [value_text(x) for x in spec.points],
                "scales": [str(s) for s in scales], "translations": n_r}
    return instance, out


def mkj_factor(cfg: ScenarioConfig) -> tuple[dict, list]:
    s_text = str(cfg.param("s", "sqrt(2)"))
    s = _num(s_text)
    sigma = atomic([(1.0, 1.0)])
    sigma_s = scale_measure(sigma, s)
    eta = mix([sigma, sigma_s], [0.5, 0.5])
    out = [
        Assertion("sigma_s << eta", "abs_continuity_test", "exact positions",
                  abs_continuity_test(sigma_s, eta), {}),
        Assertion("sigma_s << eta_s", "abs_continuity_test", "exact positions",
                  abs_continuity_test(sigma_s, scale_measure(eta, s)), {}),
    ]
    instance = {"s": s_text, "sigma": to_dict(sigma), "eta": to_dict(eta)}
    return instance, out


def rigidity_e2e(cfg: ScenarioConfig) -> tuple[dict, list]:
    eps = float(cfg.param("eps", 0.1))
    paths = int(cfg.param("paths", 10000))
    seed = int(cfg.param("seed", 0))
    tol = float(cfg.param("tol", 0.01))
    sigma = atomic([(1.0, 0.5), (math.sqrt(2), 0.5)])
    w = rigidity_witness(sigma, eps)
    sample = simulate(ProcessSpec(sigma, 0.0, 0.25, int(cfg.param("count", 64)), paths, seed))
    rep = rigidity_check(sample, w.t, tol)
    out = [
        Assertion("Dirichlet witness found", "rigidity_witness", eps,
                  w.found and w.max_residual < eps, w.to_dict()),
        Assertion("theoretical E|dX|^2 below tol*Var", "rigidity_check", tol,
                  rep["theoretical_below"], {"theoretical": rep["theoretical"]}),
        Assertion("empirical agrees within 3 stderr", "rigidity_check", "3*stderr",
                  rep["agree_3se"], {"empirical": rep["empirical"], "stderr": rep["stderr"]}),
    ]
    instance = {"sigma": to_dict(sigma), "eps": eps, "paths": paths, "seed": seed}
    return instance, out


def kronecker_verify(cfg: ScenarioConfig) -> tuple[dict, list]:
    seed = int(cfg.param("seed", 0))
    trials = int(cfg.param("trials", 20))
    eps = float(cfg.param("eps", 0.05))
    spec = _independent_points("numeric", int(cfg.param("points", 3)), seed)
    sigma = atomic([(float(x), 1.0 / len(spec.points)) for x in spec.points])
    rep = verify_kronecker_property(sigma, trials, eps, seed=seed)
    out = [Assertion("every random target approximated", "verify_kronecker_property", eps,
                     rep.successes == trials, {k: v for k, v in rep.to_dict().items()
                                               if k != "failures"})]
    return {"points": [value_text(x) for x in spec.points], "trials": trials, "eps": eps}, out


SCENARIOS: dict[str, Callable] = {
    "km10-demo": km10_demo,
    "mkj-singularity": mkj_singularity,
    "mkj-factor": mkj_factor,
    "rigidity-e2e": rigidity_e2e,
    "kronecker-verify": kronecker_verify,
}


def run_scenario(cfg: ScenarioConfig) -> ScenarioReport:
    start = time.perf_counter()
    try:
        instance, assertions = SCENARIOS[cfg.name](cfg)
    except Exception as exc:  # surface with context, as a failed report
        instance = {"error": f"{type(exc).__name__}: {exc}"}
        assertions = [Assertion("scenario completed", cfg.name, None, False,
                                {"error": str(exc)})]
    report = ScenarioReport(cfg.name, cfg, instance, assertions)
    report.timings = {"total_seconds": time.perf_counter() - start}
    if cfg.output_dir:
        os.makedirs(cfg.output_dir, exist_ok=True)
        path = os.path.join(cfg.output_dir, "report.json")
        tpath = os.path.join(cfg.output_dir, "timings.json")
        report.artifacts = [path, tpath]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        with open(tpath, "w", encoding="utf-8") as fh:
            json.dump(report.timings, fh, indent=2)
            fh.write("\n")
    return report
