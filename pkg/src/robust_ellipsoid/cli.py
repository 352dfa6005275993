"""Command-line entry point: ``robust-ellipsoid {fit,subspace,generate,oracle,eval}``.

Exit codes: 0 success, 1 bad input or usage, 2 no feasible candidate.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .coverage import AlgoConfig, approximate_coverage_ellipsoid
from .errors import BudgetExceeded, EllipsoidError, NoFeasibleCandidate
from .geometry import coverage, log_volume_or_neg_inf
from .instances import (
    PlantedEllipsoidSpec,
    SseInstanceSpec,
    gen_planted_ellipsoid,
    gen_planted_subspace,
    gen_sse_instance,
    read_graph,
)
from .io import EllipsoidDocument, InputError, dumps_line, read_points, write_points
from .oracle import OracleBudget, brute_force_min_k_ellipsoid
from .solver import SolverConfig
from .subspace import SubspaceConfig, recover_subspace

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _print_candidates(cands, file):
    for c in cands:
        print(f"  coverage={c.coverage_count} log_volume={_fmt(c.log_volume)} "
              f"restart={c.restart} ball={c.ball_id} round={c.round}", file=file)


def _algo_config(args) -> AlgoConfig:
    solver = SolverConfig(eta=args.eta)
    return AlgoConfig(alpha=args.alpha, gamma=args.gamma, iter_const_c=args.c, coverage_const_c2=args.c2,
                      restarts=args.restarts, solver=solver, seed=args.seed,
                      max_balls=args.max_balls, threads=args.threads)


def cmd_fit(args) -> int:
    pts = read_points(args.input, args.header)
    cfg = _algo_config(args)
    try:
        res = approximate_coverage_ellipsoid(pts, cfg)
    except NoFeasibleCandidate as err:
        print(f"error: {err}", file=sys.stderr)
        print("best candidates:", file=sys.stderr)
        _print_candidates(err.candidates, sys.stderr)
        return EXIT_INFEASIBLE
    best = res.best
    doc = EllipsoidDocument.from_ellipsoid(
        best.ellipsoid, alpha=args.alpha, gamma=args.gamma, seed=args.seed,
        coverage_count=best.coverage_count, n=pts.n)
    doc.write(args.out)
    floor_frac = 1.0 - cfg.coverage_const_c2 * args.alpha / args.gamma
    print(f"points: {pts.n} in dimension {pts.dim}")
    print(f"coverage: {best.coverage_count}/{pts.n} = {best.coverage_count / pts.n:.6f} "
          f"(floor {max(floor_frac, 0.0):.6f})")
    print(f"log_volume: {_fmt(doc.log_volume)}")
    print(f"condition_number: {_fmt(doc.condition_number)}")
    print(f"candidates: {len(res.candidates)} from {len(res.branches)} branches, "
          f"{res.planned_rounds} rounds planned, removal cap {res.removal_cap}")
    print(f"document: {args.out}")
    return EXIT_OK


def cmd_subspace(args) -> int:
    pts = read_points(args.input, args.header)
    algo = AlgoConfig(alpha=args.alpha, gamma=args.gamma, iter_const_c=args.c, coverage_const_c2=args.c2,
                      restarts=args.restarts, solver=SolverConfig(eta=args.eta), seed=args.seed,
                      threads=args.threads)
    cfg = SubspaceConfig(gamma=args.gamma, eps=args.eps, eps_star_override=args.eps_star,
                         alpha_hint=args.alpha, ellipsoid_cfg=algo, seed=args.seed)
    try:
        res = recover_subspace(pts, cfg)
    except NoFeasibleCandidate as err:
        print(f"error: {err}", file=sys.stderr)
        _print_candidates(err.candidates, sys.stderr)
        return EXIT_INFEASIBLE
    prefix = str(args.out_prefix)
    write_points(prefix + ".basis.csv", res.basis.reshape(-1, pts.dim))
    write_points(prefix + ".distances.csv", res.distances.reshape(-1, 1))
    lines = [
        f"dim: {res.dim}",
        f"close_count: {res.close_count}/{pts.n}",
        f"eps: {_fmt(args.eps)}",
        f"eps_star: {_fmt(cfg.eps_star)}",
        f"log_volume: {_fmt(log_volume_or_neg_inf(res.ellipsoid))}",
    ]
    Path(prefix + ".report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def cmd_generate(args) -> int:
    prefix = str(args.out_prefix)
    if args.kind == "planted":
        spec = PlantedEllipsoidSpec(dim=args.dim, n=args.n, beta=args.beta, alpha=args.alpha,
                                    outlier_radius_factor=args.outlier_factor,
                                    rotation_seed=args.seed, sample_seed=args.seed)
        inst = gen_planted_ellipsoid(spec)
        write_points(prefix + ".csv", inst.points)
        EllipsoidDocument.from_ellipsoid(inst.truth, alpha=args.alpha, seed=args.seed, n=args.n,
                                         coverage_count=int(inst.inlier_ids.size)).write(prefix + ".truth.json")
        print(f"wrote {prefix}.csv ({args.n} points, {inst.outlier_ids.size} outliers) and {prefix}.truth.json")
    elif args.kind == "subspace":
        inst = gen_planted_subspace(args.dim, args.planted_dim, args.n, args.alpha, args.seed)
        write_points(prefix + ".csv", inst.points)
        write_points(prefix + ".basis.csv", inst.basis)
        print(f"wrote {prefix}.csv ({args.n} points) and {prefix}.basis.csv")
    else:
        g = read_graph(args.graph)
        cap = math.inf if args.cap_c is None else args.cap_c
        inst = gen_sse_instance(SseInstanceSpec(g, args.delta, args.eta_pad, cap, args.seed))
        write_points(prefix + ".csv", inst.points)
        print(f"wrote {prefix}.csv ({inst.points.n} points in dimension {inst.points.dim})")
    return EXIT_OK


def cmd_oracle(args) -> int:
    pts = read_points(args.input, args.header)
    res = brute_force_min_k_ellipsoid(pts, args.k, OracleBudget(args.max_subsets, args.tol))
    doc = EllipsoidDocument.from_ellipsoid(res.ellipsoid, k=args.k, n=pts.n,
                                           coverage_count=int(res.covered_ids.size))
    doc.write(args.out)
    print(f"subsets: {res.subsets_checked}")
    print(f"log_volume: {_fmt(res.log_volume)}")
    print(f"covered: {res.covered_ids.size}/{pts.n}")
    print(f"document: {args.out}")
    return EXIT_OK


def evaluate(doc: EllipsoidDocument, pts) -> dict:
    e = doc.ellipsoid()
    cov = coverage(e, pts)
    return {
        "coverage_count": cov.count,
        "fraction": cov.fraction,
        "log_volume": doc.log_volume,
        "condition_number": doc.condition_number,
    }


def cmd_eval(args) -> int:
    doc = EllipsoidDocument.read(args.doc)
    pts = read_points(args.input, args.header)
    if pts.dim != doc.dim:
        raise InputError(f"points have dimension {pts.dim}, document has {doc.dim}")
    out = evaluate(doc, pts)
    print(f"coverage: {out['coverage_count']}/{pts.n} = {out['fraction']:.6f}")
    print(f"log_volume: {_fmt(out['log_volume'])}")
    print(f"condition_number: {_fmt(out['condition_number'])}")
    print(dumps_line(out))
    return EXIT_OK


def _common(p, alpha_required=True):
    p.add_argument("--input", required=True, type=Path, help="CSV point file")
    p.add_argument("--header", action="store_true", help="skip the first line of the CSV")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--c", type=float, default=56.0, help="round-count constant")
    p.add_argument("--c2", type=float, default=4.0, help="coverage-floor constant")
    p.add_argument("--eta", type=float, default=1e-7, help="solver tolerance")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $ROBUST_ELLIPSOID_THREADS, 0 = all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robust-ellipsoid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="smallest ellipsoid covering most points")
    _common(p)
    p.add_argument("--alpha", type=float, required=True, help="target outlier fraction")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--max-balls", type=int, default=None, help="only the N smallest bounding balls")
    p.add_argument("--out", required=True, type=Path, help="output document")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("subspace", help="robust subspace recovery")
    _common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--eps", type=float, required=True, help="closeness threshold")
    p.add_argument("--eps-star", type=float, default=None, help="jitter scale (default eps**(4/gamma))")
    p.add_argument("--alpha", type=float, default=0.05, help="expected outlier fraction")
    p.add_argument("--out-prefix", required=True, type=Path)
    p.set_defaults(func=cmd_subspace)

    p = sub.add_parser("generate", help="write a seeded synthetic instance")
    p.add_argument("kind", choices=["planted", "subspace", "sse"])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--beta", type=float, default=10.0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--outlier-factor", type=float, default=2.0)
    p.add_argument("--planted-dim", type=int, default=1)
    p.add_argument("--graph", type=Path, help="graph file for sse instances")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--eta-pad", type=float, default=1.0)
    p.add_argument("--cap-c", type=float, default=None, help="perturbation exponent (omit for none)")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out-prefix", required=True, type=Path)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", help="brute-force smallest ellipsoid over k-subsets")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--header", action="store_true")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-subsets", type=int, default=200_000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("eval", help="coverage and volume of a document on a point file")
    p.add_argument("--doc", required=True, type=Path)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, BudgetExceeded, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except EllipsoidError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
