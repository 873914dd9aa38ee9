"""``kronlab`` command line.

Every verb prints (or writes to ``--out``) a JSON document.  The exit status is
0 when the command succeeded and all of its checks passed, 1 when a check
failed, and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction

from . import __version__
from .gaussflow import (ProcessSpec, empirical_autocovariance, gaussianity_test, rescale_paths,
                        rigidity_check, simulate, spectral_estimate, to_binary, to_csv)
from .kronecker import (GRID, LATTICE, UnimodularTarget, WeakTarget, build_kronecker_points,
                        rigidity_witness, solve_kronecker_approx, verify_kronecker_property,
                        weak_convergence_check)
from .numkit import DEFAULT_PRECISION, NumericReal, SymbolicReal, evaluate_expression
from .qindep import (Bounds, check_group_independence, check_q_independence, expand_group,
                     value_text)
from .scenarios import SCENARIOS, ScenarioConfig, run_scenario
from .specmeasure import (MetricConfig, abs_continuity_test, bochner, mix, restrict,
                          scale_measure, self_similarity_scales, singularity_test, symmetrize,
                          translate_measure, weak_distance)
from .specmeasure.io import (MeasureParseError, dumps_csv, dumps_json, dumps_text, guess_format,
                             load)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- value parsing -----------------------------------------------------------------------


def parse_values(texts, tier: str, bits: int) -> list:
    """Parse reals in the requested tier; ``auto`` picks symbolic only if every value parses so."""
    if tier in ("symbolic", "auto"):
        try:
            return [SymbolicReal.parse(str(t)) for t in texts]
        except ValueError:
            if tier == "symbolic":
                raise
    return [evaluate_expression(str(t), bits) for t in texts]


def parse_scalar(text: str, tier: str, bits: int):
    """Exact rational or symbolic when possible, float otherwise."""
    if tier != "numeric":
        try:
            v = SymbolicReal.parse(text)
            return v.as_fraction() if v.is_rational else v
        except ValueError:
            if tier == "symbolic":
                raise
    return float(evaluate_expression(text, bits))


def read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def read_list(path: str) -> list:
    data = read_json(path)
    if isinstance(data, dict):
        for key in ("points", "phases", "values", "targets"):
            if key in data:
                return data[key]
    if not isinstance(data, list):
        raise UsageError(f"{path}: expected a JSON list")
    return data


def parse_assign(items, bits: int) -> dict:
    out = {}
    for item in items or []:
        name, _, expr = item.partition("=")
        if not expr:
            raise UsageError(f"--assign expects name=value, got {item!r}")
        out[name.strip()] = evaluate_expression(expr, bits)
    return out


def emit(args, payload, text: str | None = None) -> None:
    body = text if text is not None else json.dumps(payload, indent=2, default=_default) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, (SymbolicReal, NumericReal)):
        return o.text()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "tolist"):
        return o.tolist()
    return str(o)


def _emit_measure(args, m) -> int:
    fmt = args.format or (guess_format(args.out) if args.out else "json")
    text = {"json": dumps_json, "text": dumps_text, "csv": dumps_csv}[fmt](m)
    emit(args, None, text)
    return EXIT_OK


# -- verbs -------------------------------------------------------------------------------


def cmd_qindep(args) -> int:
    texts = list(args.values) + (read_list(args.file) if args.file else [])
    if not texts:
        raise UsageError("no values given")
    xs = parse_values(texts, args.tier, args.precision_bits)
    verdict = check_q_independence(xs, Bounds(args.max_coeff, args.precision_bits))
    emit(args, verdict.to_dict())
    return EXIT_OK


def cmd_group(args) -> int:
    gens = parse_values(args.generators, args.tier, args.precision_bits)
    sl = expand_group(gens, args.radius, args.precision_bits)
    payload = {"elements": json.loads(sl.to_json()), "size": len(sl)}
    if args.check:
        payload["verdict"] = check_group_independence(
            sl, Bounds(args.max_coeff, args.precision_bits)).to_dict()
    emit(args, payload)
    return EXIT_OK


def cmd_measure(args) -> int:
    m = load(args.measure)
    tier, bits = args.tier, args.precision_bits
    assignment = parse_assign(args.assign, bits)
    op = args.op
    if op == "scale":
        return _emit_measure(args, scale_measure(m, parse_scalar(args.s, tier, bits)))
    if op == "translate":
        return _emit_measure(args, translate_measure(m, parse_scalar(args.r, tier, bits)))
    if op == "symmetrize":
        return _emit_measure(args, symmetrize(m))
    if op == "mix":
        others = [m] + [load(p) for p in args.others]
        weights = [parse_scalar(w, "auto", bits) for w in args.weights]
        return _emit_measure(args, mix(others, weights))
    if op == "restrict":
        a, b = parse_scalar(args.a, tier, bits), parse_scalar(args.b, tier, bits)
        return _emit_measure(args, restrict(m, a, b, assignment))
    if op == "bochner":
        vals = [bochner(m, float(evaluate_expression(t, 64)), assignment) for t in args.t]
        emit(args, {"t": args.t, "value": [[v.real, v.imag] for v in vals]})
        return EXIT_OK
    if op == "distance":
        cfg = MetricConfig(float(args.a), float(args.b), args.depth)
        emit(args, {"distance": weak_distance(m, load(args.other), cfg, assignment),
                    "depth": args.depth, "family": cfg.family})
        return EXIT_OK
    if op == "singular":
        v = singularity_test(m, load(args.other))
        emit(args, {"status": v.status,
                    "shared_atoms": [[value_text(p), str(a), str(b)] for p, a, b in v.shared_atoms],
                    "shared_intervals": [[str(l), str(u)] for l, u in v.shared_intervals],
                    "near_pairs": [[value_text(p), value_text(q)] for p, q in v.near_pairs]})
        return EXIT_OK
    if op == "acont":
        emit(args, {"absolutely_continuous": abs_continuity_test(m, load(args.other))})
        return EXIT_OK
    if op == "selfsim":
        emit(args, {"scales": [value_text(s) for s in self_similarity_scales(m)]})
        return EXIT_OK
    raise UsageError(f"unknown measure operation {op!r}")


def _target(args) -> UnimodularTarget:
    pts = parse_values(read_list(args.points), "numeric", args.precision_bits)
    phases = [Fraction(str(p)) if not isinstance(p, float) else Fraction(p)
              for p in read_list(args.phases)] if args.phases else None
    return UnimodularTarget.of(pts, phases)


def cmd_kron(args) -> int:
    bits = args.precision_bits
    op = args.op
    if op == "solve":
        w = solve_kronecker_approx(_target(args), args.eps, args.t_min, args.method, args.budget)
        emit(args, w.to_dict())
        return EXIT_OK if w.found else EXIT_FAILED
    if op == "rigidity":
        w = rigidity_witness(load(args.measure), args.eps, args.t_min, args.method, args.budget,
                             parse_assign(args.assign, bits))
        emit(args, w.to_dict())
        return EXIT_OK if w.found else EXIT_FAILED
    if op == "build-set":
        group = read_json(args.group)
        tier = args.tier if args.tier != "auto" else None
        gens = parse_values(group["generators"], args.tier, bits)
        sl = expand_group(gens, int(group.get("radius", 1)), bits)
        spec = build_kronecker_points(read_list(args.targets), Fraction(args.delta), sl, tier,
                                      seed=args.seed, bounds=Bounds(args.max_coeff, bits))
        emit(args, spec.to_dict())
        return EXIT_OK
    if op == "verify":
        rep = verify_kronecker_property(load(args.measure), args.trials, args.eps, args.budget,
                                        seed=args.seed, method=args.method)
        emit(args, rep.to_dict())
        return EXIT_OK if rep.successes == rep.trials else EXIT_FAILED
    if op == "weak":
        spec = read_json(args.targets)
        targets = [WeakTarget.affine(_cx(t.get("c1", 0)), _cx(t.get("c2", 0)), t.get("u", 0))
                   for t in spec]
        scales = [float(evaluate_expression(str(s), 64)) for s in args.scales]
        ts = [float(evaluate_expression(str(t), 64)) for t in args.ts]
        rep = weak_convergence_check(load(args.measure), scales, targets, ts,
                                     [float(u) for u in args.freqs], args.tol)
        emit(args, rep.to_dict())
        return EXIT_OK
    raise UsageError(f"unknown kron operation {op!r}")


def _cx(v) -> complex:
    if isinstance(v, list):
        return complex(v[0], v[1])
    return complex(v)


def _process(args) -> ProcessSpec:
    return ProcessSpec(load(args.measure), args.t0, args.step, args.count, args.paths, args.seed,
                       args.density_freqs, parse_assign(args.assign, args.precision_bits) or None)


def cmd_flow(args) -> int:
    op = args.op
    sample = simulate(_process(args))
    if op == "simulate":
        if args.format == "bin":
            if not args.out:
                raise UsageError("binary output needs --out")
            with open(args.out, "wb") as fh:
                fh.write(to_binary(sample))
        else:
            emit(args, None, to_csv(sample))
        return EXIT_OK
    if op == "autocov":
        rep = empirical_autocovariance(sample, [float(l) for l in args.lags])
        payload = rep.to_dict()
        payload["within_3se"] = rep.within()
        emit(args, payload)
        return EXIT_OK if all(payload["within_3se"]) else EXIT_FAILED
    if op == "rescale":
        emit(args, None, to_csv(rescale_paths(sample, args.s)))
        return EXIT_OK
    if op == "spectrum":
        if args.s != 1.0:
            sample = rescale_paths(sample, args.s)
        est = spectral_estimate(sample)
        emit(args, {"bin_width": est.bin_width,
                    "peaks": [{"frequency": f, "power": p, "stderr": e} for f, p, e in est.peaks()]})
        return EXIT_OK
    if op == "rigidity":
        rep = rigidity_check(sample, args.t_w, args.tol)
        emit(args, rep)
        return EXIT_OK if rep["passed"] else EXIT_FAILED
    if op == "gauss-test":
        rep = gaussianity_test(sample, args.alpha)
        emit(args, rep)
        return EXIT_OK if rep["passed"] else EXIT_FAILED
    raise UsageError(f"unknown flow operation {op!r}")


def cmd_scenario(args) -> int:
    params = {}
    for item in args.param or []:
        key, _, val = item.partition("=")
        try:
            params[key] = json.loads(val)
        except json.JSONDecodeError:
            params[key] = val
    params.setdefault("seed", args.seed)
    out_dir = args.out_dir or args.out
    report = run_scenario(ScenarioConfig(args.name, params, out_dir, args.jobs))
    body = json.dumps(report.to_dict(), indent=2, sort_keys=True, default=_default) + "\n"
    if not out_dir:
        sys.stdout.write(body)
    else:
        sys.stdout.write(f"{args.name}: {'pass' if report.passed else 'FAIL'} "
                         f"({sum(a.passed for a in report.assertions)}/{len(report.assertions)})\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_convert(args) -> int:
    src_fmt = args.from_format or guess_format(args.input)
    kw = {"strict": args.strict} if src_fmt == "csv" else {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = load(args.input, src_fmt, **kw)
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    assignment = parse_assign(args.assign, args.precision_bits)
    if assignment:
        m = m.evaluate(assignment)
    args.format = args.to_format or (guess_format(args.out) if args.out else "json")
    return _emit_measure(args, m)


# -- parser ------------------------------------------------------------------------------


def _default_seed() -> int:
    env = os.environ.get("KRONLAB_SEED")
    return int(env) if env else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help="random seed (default: $KRONLAB_SEED or 0)")
    common.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--tier", choices=["auto", "symbolic", "numeric"], default="auto")
    common.add_argument("--out", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="kronlab", parents=[common],
                                description="Kronecker sets, spectral measures and Gaussian flows")
    p.add_argument("--version", action="version", version=f"kronlab {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    q = sub.add_parser("qindep", parents=[common], help="rational independence of reals")
    q.add_argument("values", nargs="*")
    q.add_argument("--file")
    q.add_argument("--max-coeff", type=int, default=10**4)
    q.set_defaults(func=cmd_qindep)

    g = sub.add_parser("group", parents=[common], help="expand a word ball of a multiplicative group")
    g.add_argument("generators", nargs="+")
    g.add_argument("--radius", type=int, default=1)
    g.add_argument("--check", action="store_true", help="also test additive independence")
    g.add_argument("--max-coeff", type=int, default=10**4)
    g.set_defaults(func=cmd_group)

    m = sub.add_parser("measure", parents=[common], help="measure algebra and verdicts")
    m.add_argument("op", choices=["scale", "translate", "symmetrize", "mix", "restrict", "bochner",
                                  "distance", "singular", "acont", "selfsim"])
    m.add_argument("--measure", required=True)
    m.add_argument("--other")
    m.add_argument("--others", nargs="*", default=[])
    m.add_argument("--weights", nargs="*", default=[])
    m.add_argument("--s", default="1")
    m.add_argument("--r", default="0")
    m.add_argument("--a", default="0")
    m.add_argument("--b", default="1")
    m.add_argument("--t", nargs="*", default=["0"])
    m.add_argument("--depth", type=int, default=64)
    m.add_argument("--assign", nargs="*")
    m.add_argument("--format", choices=["json", "text", "csv"])
    m.set_defaults(func=cmd_measure)

    k = sub.add_parser("kron", parents=[common], help="Kronecker approximation and constructions")
    k.add_argument("op", choices=["solve", "rigidity", "build-set", "verify", "weak"])
    k.add_argument("--points")
    k.add_argument("--phases")
    k.add_argument("--measure")
    k.add_argument("--targets")
    k.add_argument("--group")
    k.add_argument("--delta", default="1/100")
    k.add_argument("--eps", type=float, default=0.05)
    k.add_argument("--t-min", type=float, default=1.0)
    k.add_argument("--method", choices=[GRID, LATTICE], default=LATTICE)
    k.add_argument("--budget", type=int)
    k.add_argument("--trials", type=int, default=20)
    k.add_argument("--scales", nargs="*", default=["1"])
    k.add_argument("--ts", nargs="*", default=[])
    k.add_argument("--freqs", nargs="*", default=["0"])
    k.add_argument("--tol", type=float, default=1e-2)
    k.add_argument("--max-coeff", type=int, default=10**4)
    k.add_argument("--assign", nargs="*")
    k.set_defaults(func=cmd_kron)

    f = sub.add_parser("flow", parents=[common], help="Gaussian process simulation and checks")
    f.add_argument("op", choices=["simulate", "autocov", "rescale", "spectrum", "rigidity",
                                  "gauss-test"])
    f.add_argument("--measure", required=True)
    f.add_argument("--t0", type=float, default=0.0)
    f.add_argument("--step", type=float, default=0.25)
    f.add_argument("--count", type=int, default=64)
    f.add_argument("--paths", type=int, default=1000)
    f.add_argument("--density-freqs", type=int, default=256)
    f.add_argument("--lags", nargs="*", default=["0"])
    f.add_argument("--s", type=float, default=1.0)
    f.add_argument("--t-w", type=float, default=0.0)
    f.add_argument("--tol", type=float, default=0.01)
    f.add_argument("--alpha", type=float, default=0.01)
    f.add_argument("--format", choices=["csv", "bin"], default="csv")
    f.add_argument("--assign", nargs="*")
    f.set_defaults(func=cmd_flow)

    s = sub.add_parser("scenario", parents=[common], help="run a registered scenario")
    s.add_argument("action", choices=["run"])
    s.add_argument("name", choices=sorted(SCENARIOS))
    s.add_argument("--param", action="append", help="key=value (value parsed as JSON if possible)")
    s.add_argument("--out-dir")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_scenario)

    c = sub.add_parser("convert", parents=[common], help="convert measure files")
    c.add_argument("input")
    c.add_argument("--from", dest="from_format", choices=["json", "text", "csv"])
    c.add_argument("--to", dest="to_format", choices=["json", "text", "csv"])
    c.add_argument("--strict", action="store_true", help="reject duplicate CSV positions")
    c.add_argument("--assign", nargs="*", help="name=value pairs to evaluate symbols")
    c.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, MeasureParseError, ValueError, TypeError, KeyError, OSError) as exc:
        sys.stderr.write(f"kronlab {args.verb}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
