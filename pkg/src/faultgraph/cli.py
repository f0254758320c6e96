"""Command-line front end.

Every output document embeds a manifest (command, parameters, seed, version,
row count) so that re-running the manifest reproduces the rows exactly. The
wall-clock duration and worker count go to stderr: they vary between runs and
would otherwise break byte-for-byte reproducibility.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

import numpy as np

from . import __version__
from .ensembles import Constant, ErSpec, General, RggSpec, RigSpec, spec_to_dict
from .exact import EXACT_MAX_NODES, exact_breakdown_small, exact_conditional_profile, verify_mixture_identity
from .graph import BRUTEFORCE_MAX_NODES, ConnectivityPolicy, Graph, is_k_connected, is_k_connected_bruteforce
from .meanfield import ConvergenceError, MeanFieldSpec, breakdown_from_fixed_point, solve_fixed_point
from .montecarlo import (
    AXES,
    SWEEP_COLUMNS,
    EstimateRequest,
    FixedSurvivors,
    estimate_breakdown,
    estimate_breakdown_conditional,
    pool_for_ratio,
    sweep,
)
from .rng import check_seed, fresh_seed, stream
from .theory import FAMILIES, TypicalSetSpec, lemma1_bounds, predict, typical_range, typicality_mass

log = logging.getLogger("faultgraph")

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3

ESTIMATE_COLUMNS = ("family", "n", "k", "epsilon", "trials", "successes", "p_hat",
                    "ci_low", "ci_high", "confidence", "seed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --- formatting ------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _render(manifest: dict, rows: list[dict], columns, fmt: str, extra: dict | None = None) -> str:
    manifest = dict(manifest, rows=len(rows))
    if fmt == "json":
        doc = {"manifest": manifest}
        if extra:
            doc.update(extra)
        doc["rows"] = rows
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
        log.warning("no --seed given; using seed=%d", args.seed)
    return check_seed(args.seed)


def _manifest(command: str, args, params: dict) -> dict:
    return {"command": command, "version": __version__, "master_seed": getattr(args, "seed", None),
            "params": params}


# --- argument groups ---------------------------------------------------------------

def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=None, help="master seed (logged if omitted)")
    g.add_argument("--trials", type=int, default=10_000, help="Monte Carlo trials per point")
    g.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: all cores); never changes results")
    g.add_argument("--format", choices=("json", "csv"), default=None)
    g.add_argument("--out", default=None, help="write to this file instead of stdout")
    return g


def _ensemble_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, help="ER edge probability")
    p.add_argument("--radius", "--r", dest="radius", type=float, help="RGG radius")
    p.add_argument("--pool-size", type=int, help="RIG key pool size")
    p.add_argument("--ratio", type=float, help="RIG E[X]^2/P_n; sets the pool size")
    p.add_argument("--key-size", type=int, help="RIG constant key-ring size")
    p.add_argument("--key-pmf", help="RIG key-ring pmf as 'size:prob,size:prob'")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=float, default=None, help="node failure probability")
    p.add_argument("--survivors", type=int, default=None, help="condition on exactly s survivors")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--quenched", action="store_true", help="one graph per point, faults per trial")
    p.add_argument("--policy", choices=[c.value for c in ConnectivityPolicy],
                   default=ConnectivityPolicy.EMPTY_DISCONNECTED.value)


def _key_dist(args):
    if (args.key_size is None) == (args.key_pmf is None):
        raise ValueError("RIG needs exactly one of --key-size or --key-pmf")
    if args.key_size is not None:
        return Constant(args.key_size)
    pmf = []
    for part in args.key_pmf.split(","):
        s, q = part.split(":")
        pmf.append((int(s), float(q)))
    return General(tuple(pmf))


def _ensemble(args, axis: str | None = None, first=None):
    fam = args.family
    if fam == "er":
        p = args.p if args.p is not None else (first if axis == "p" else None)
        if p is None:
            raise ValueError("ER needs --p")
        return ErSpec(args.n, p)
    if fam == "rgg":
        r = args.radius if args.radius is not None else (first if axis == "r" else None)
        if r is None:
            raise ValueError("RGG needs --radius")
        return RggSpec(args.n, r)
    dist = _key_dist(args)
    ratio = args.ratio if args.ratio is not None else (first if axis == "ratio" else None)
    if args.pool_size is not None:
        if args.ratio is not None:
            raise ValueError("give --pool-size or --ratio, not both")
        return RigSpec(args.n, args.pool_size, dist)
    if ratio is None:
        raise ValueError("RIG needs --pool-size or --ratio")
    probe = RigSpec(args.n, max(dist.support()), dist)
    return RigSpec(args.n, pool_for_ratio(probe, ratio), dist)


def _request(args, axis=None, first=None) -> EstimateRequest:
    eps = args.eps if args.eps is not None else (first if axis == "epsilon" else None)
    if eps is None:
        raise ValueError("--eps is required")
    return EstimateRequest(
        ensemble=_ensemble(args, axis, first), k=args.k, epsilon=eps, trials=args.trials,
        master_seed=args.seed,
        conditioning=FixedSurvivors(args.survivors) if args.survivors is not None else None,
        confidence=args.confidence, policy=ConnectivityPolicy(args.policy),
        quenched=args.quenched,
    )


def _request_params(req: EstimateRequest) -> dict:
    return {
        "ensemble": spec_to_dict(req.ensemble), "k": req.k, "epsilon": req.epsilon,
        "trials": req.trials, "survivors": req.conditioning.s if req.conditioning else None,
        "confidence": req.confidence, "policy": req.policy.value, "quenched": req.quenched,
    }


# --- commands ------------------------------------------------------------------------

def cmd_estimate(args) -> int:
    _seed(args)
    req = _request(args)
    run = estimate_breakdown_conditional if req.conditioning else estimate_breakdown
    est = run(req, threads=args.threads)
    row = {"family": args.family, "n": req.ensemble.n, "k": req.k, "epsilon": req.epsilon,
           "trials": est.trials, "successes": est.successes, "p_hat": est.p_hat,
           "ci_low": est.ci_low, "ci_high": est.ci_high, "confidence": est.confidence,
           "seed": est.master_seed}
    man = _manifest("estimate", args, _request_params(req))
    _emit(_render(man, [row], ESTIMATE_COLUMNS, args.format or "json"), args.out)
    return EXIT_OK


def _axis_values(args) -> list[float]:
    if args.values is not None:
        vals = [float(v) for v in args.values.split(",") if v.strip()]
    elif args.start is not None and args.stop is not None and args.points is not None:
        if args.points < 1:
            raise ValueError("--points must be positive")
        vals = np.linspace(args.start, args.stop, args.points).tolist()
    else:
        raise ValueError("axis needs --values or all of --from, --to, --points")
    if not vals:
        raise ValueError("sweep axis is empty")
    if args.axis == "n":
        vals = [int(round(v)) for v in vals]
    return vals


def cmd_sweep(args) -> int:
    _seed(args)
    values = _axis_values(args)
    base = _request(args, args.axis, values[0])
    rows = sweep(base, args.axis, values, couple=args.couple, threads=args.threads)
    params = _request_params(base)
    params.update(axis=args.axis, values=values, couple=args.couple)
    man = _manifest("sweep", args, params)
    _emit(_render(man, [r.as_dict() for r in rows], SWEEP_COLUMNS, args.format or "csv"), args.out)
    return EXIT_OK


THEORY_COLUMNS = ("family", "n", "k", "epsilon", "threshold", "regime", "offset",
                  "limit_paper", "limit_standard", "xi")


def cmd_theory(args) -> int:
    pred = predict(args.family, args.n, args.k, args.eps, args.value)
    row = pred.as_dict()
    params = {"family": args.family, "n": args.n, "k": args.k, "epsilon": args.eps,
              "value": args.value}
    man = _manifest("theory", args, params)
    fmt = args.format or "json"
    if fmt == "json":
        doc = dict(row, manifest=dict(man, rows=1))
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit(_render(man, [row], THEORY_COLUMNS, fmt), args.out)
    return EXIT_OK


MEANFIELD_COLUMNS = ("n", "p", "epsilon", "I_tilde", "residual", "iterations", "method", "P_mf")


def cmd_meanfield(args) -> int:
    spec = MeanFieldSpec(args.n, args.p, args.eps, args.tol, args.max_iter)
    try:
        sol = solve_fixed_point(spec)
    except ConvergenceError as exc:
        print(f"meanfield: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    row = {"n": spec.n, "p": spec.p, "epsilon": spec.epsilon, "I_tilde": sol.i_tilde,
           "residual": sol.residual, "iterations": sol.iterations, "method": sol.method,
           "P_mf": breakdown_from_fixed_point(spec, sol.i_tilde)}
    params = {"n": spec.n, "p": spec.p, "epsilon": spec.epsilon, "tolerance": spec.tolerance,
              "max_iterations": spec.max_iterations}
    man = _manifest("meanfield", args, params)
    fmt = args.format or "json"
    if fmt == "json":
        _emit(json.dumps(dict(row, manifest=dict(man, rows=1)), indent=2) + "\n", args.out)
    else:
        _emit(_render(man, [row], MEANFIELD_COLUMNS, fmt), args.out)
    return EXIT_OK


# --- verification suites -----------------------------------------------------------

def _verify_mixture(args) -> tuple[list[dict], dict]:
    spec = ErSpec(args.n, args.p)
    rep = verify_mixture_identity(spec, args.k, args.eps, ConnectivityPolicy(args.policy))
    case = {"n": args.n, "p": args.p, "epsilon": args.eps, "k": args.k, "lhs": rep.lhs,
            "rhs": rep.rhs, "abs_error": rep.abs_error, "pass": rep.abs_error <= args.tol}
    return [case], {"n": args.n, "p": args.p, "epsilon": args.eps, "k": args.k, "tol": args.tol,
                    "policy": args.policy}


def _verify_typicality(args) -> tuple[list[dict], dict]:
    spec = TypicalSetSpec(args.n, args.kappa, args.delta)
    lo, hi = typical_range(spec)
    rep = typicality_mass(spec)
    case = {"n": args.n, "kappa": args.kappa, "delta": spec.delta, "s_minus": lo, "s_plus": hi,
            "mass": rep.mass, "lower_bound": rep.lower_bound, "pass": rep.holds}
    return [case], {"n": args.n, "kappa": args.kappa, "delta": args.delta}


def _verify_oracle(args) -> tuple[list[dict], dict]:
    if not 1 <= args.max_n <= BRUTEFORCE_MAX_NODES:
        raise ValueError(f"--max-n must lie in [1, {BRUTEFORCE_MAX_NODES}]")
    seed = _seed(args)
    policy = ConnectivityPolicy(args.policy)
    cases = []
    for k in (1, 2, 3):
        agree = 0
        for i in range(args.samples):
            rng = stream(seed, k, i)
            n = int(rng.integers(1, args.max_n + 1))
            p = float(rng.random())
            m = n * (n - 1) // 2
            keep = rng.random(m) < p
            iu = np.triu_indices(n, 1)
            g = Graph.from_edges(n, iu[0][keep], iu[1][keep])
            agree += is_k_connected(g, k, policy) == is_k_connected_bruteforce(g, k, policy)
        cases.append({"k": k, "samples": args.samples, "agreements": agree,
                      "pass": agree == args.samples})
    return cases, {"max_n": args.max_n, "samples": args.samples, "policy": args.policy}


def _verify_lemma1(args) -> tuple[list[dict], dict]:
    if args.n > EXACT_MAX_NODES:
        raise ValueError(f"lemma1 uses exact enumeration, n <= {EXACT_MAX_NODES}")
    kappa = 1.0 - args.eps
    spec = TypicalSetSpec(args.n, kappa, args.delta)
    policy = ConnectivityPolicy(args.policy)
    er = ErSpec(args.n, args.p)
    profile = exact_conditional_profile(er, args.k, policy)
    lo, hi = typical_range(spec)
    lower, upper = lemma1_bounds(spec, {s: profile[s] for s in range(lo, hi + 1)})
    exact = exact_breakdown_small(er, args.k, args.eps, policy=policy)
    case = {"n": args.n, "p": args.p, "epsilon": args.eps, "k": args.k, "delta": spec.delta,
            "s_minus": lo, "s_plus": hi, "lower": lower, "exact": exact, "upper": upper,
            "pass": lower <= exact <= upper}
    return [case], {"n": args.n, "p": args.p, "epsilon": args.eps, "k": args.k,
                    "delta": args.delta, "policy": args.policy}


SUITES = {
    "mixture": _verify_mixture,
    "typicality": _verify_typicality,
    "oracle": _verify_oracle,
    "lemma1": _verify_lemma1,
}


def cmd_verify(args) -> int:
    cases, params = SUITES[args.suite](args)
    ok = all(c["pass"] for c in cases)
    man = _manifest("verify " + args.suite, args, params)
    columns = list(cases[0].keys())
    _emit(_render(man, cases, columns, args.format or "json", {"suite": args.suite, "passed": ok}),
          args.out)
    for c in cases:
        print(f"{args.suite}: {'PASS' if c['pass'] else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERIFY


# --- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    g = _global_flags()
    parser = _Parser(prog="faultgraph",
                     description="Breakdown probability of random graphs under node faults.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress the timing line")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    est = sub.add_parser("estimate", parents=[g], help="Monte Carlo estimate at one point")
    _ensemble_flags(est)
    est.set_defaults(func=cmd_estimate)

    sw = sub.add_parser("sweep", parents=[g], help="estimates along one parameter axis")
    _ensemble_flags(sw)
    sw.add_argument("--axis", choices=AXES, required=True)
    sw.add_argument("--from", dest="start", type=float)
    sw.add_argument("--to", dest="stop", type=float)
    sw.add_argument("--points", type=int)
    sw.add_argument("--values", help="explicit comma-separated axis values")
    sw.add_argument("--couple", action="store_true", help="share trial streams across points")
    sw.set_defaults(func=cmd_sweep)

    th = sub.add_parser("theory", parents=[g], help="closed-form threshold and limits")
    th.add_argument("--family", required=True)
    th.add_argument("--n", type=int, required=True)
    th.add_argument("--k", type=int, default=1)
    th.add_argument("--eps", type=float, required=True)
    th.add_argument("--value", type=float, default=None,
                    help="parameter value to classify (p, E[X]^2/P_n or r)")
    th.set_defaults(func=cmd_theory)

    mf = sub.add_parser("meanfield", parents=[g], help="mean-field approximation (ER, k=1)")
    mf.add_argument("--n", type=int, required=True)
    mf.add_argument("--p", type=float, required=True)
    mf.add_argument("--eps", type=float, required=True)
    mf.add_argument("--tol", type=float, default=1e-12)
    mf.add_argument("--max-iter", type=int, default=10**6)
    mf.set_defaults(func=cmd_meanfield)

    ver = sub.add_parser("verify", help="verification suites")
    vsub = ver.add_subparsers(dest="suite", required=True, parser_class=_Parser)
    policy = argparse.ArgumentParser(add_help=False)
    policy.add_argument("--policy", choices=[c.value for c in ConnectivityPolicy],
                        default=ConnectivityPolicy.EMPTY_DISCONNECTED.value)
    v = vsub.add_parser("mixture", parents=[g, policy])
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--p", type=float, required=True)
    v.add_argument("--eps", type=float, required=True)
    v.add_argument("--k", type=int, default=1)
    v.add_argument("--tol", type=float, default=1e-12)
    v = vsub.add_parser("typicality", parents=[g])
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--kappa", type=float, required=True)
    v.add_argument("--delta", type=float, default=None)
    v = vsub.add_parser("oracle", parents=[g, policy])
    v.add_argument("--max-n", type=int, default=8)
    v.add_argument("--samples", type=int, default=1000)
    v = vsub.add_parser("lemma1", parents=[g, policy])
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--p", type=float, required=True)
    v.add_argument("--eps", type=float, required=True)
    v.add_argument("--k", type=int, default=1)
    v.add_argument("--delta", type=float, default=None)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    if getattr(args, "trials", 1) < 1:
        print("faultgraph: error: --trials must be positive", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except ConvergenceError as exc:
        print(f"faultgraph: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"faultgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    threads = getattr(args, "threads", None)
    log.info("%s finished in %.3f s (threads=%s)", args.command, time.perf_counter() - t0,
             threads if threads is not None else "all")
    return code
