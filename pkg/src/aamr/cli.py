"""Command-line interface.

Subcommands: ``solve`` (project a point onto the intersection described by a
problem file), ``angle`` (principal/Friedrichs angles of a subspace pair),
and ``bench`` (parameter sweeps emitting CSV and SVG artifacts).

Exit codes: 0 converged, 1 usage or input error, 2 diverged, 3 iteration
budget exhausted, 4 numerical failure.
"""

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, svgplot
from .geometry import friedrichs_angle, principal_angles, subspace_intersection
from .operators import Status, StoppingPolicy
from .sets import (LinearSubspace, NoOracleError, ProblemFormatError,
                   load_problem, project_intersection_oracle)
from .solvers import MethodSpec, recommended_beta, solve_best_approximation

EXIT_CODES = {
    Status.CONVERGED: 0,
    Status.DIVERGED: 2,
    Status.BUDGET_EXHAUSTED: 3,
    Status.NUMERICAL_FAILURE: 4,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # route argparse failures through the exit-code contract (1, no traceback)
    def error(self, message):
        raise _UsageError(message)


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError:
        raise _UsageError(f"expected comma-separated reals, got {text!r}") from None


def _fmt_vec(v) -> str:
    return ", ".join(f"{c:.9g}" for c in v)


def _build_parser() -> _Parser:
    parser = _Parser(prog="aamr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="project a point onto an intersection")
    solve.add_argument("problem", help="problem description JSON file")
    solve.add_argument("--q", required=True, help="point to project (comma-separated)")
    solve.add_argument("--method", default="aamr", choices=MethodSpec.KINDS)
    solve.add_argument("--alpha", type=float, default=None)
    solve.add_argument("--beta", type=float, default=None)
    solve.add_argument("--mu", type=float, default=None)
    solve.add_argument("--gamma", type=float, default=None)
    solve.add_argument("--lam", type=float, default=None,
                       help="relaxation for the cm method, in (0, 2]")
    solve.add_argument("--x0", default=None,
                       help="free starting point (aamr and cm only)")
    solve.add_argument("--mode", default="residual",
                       choices=["residual", "true-error", "budget"],
                       help="stopping rule; true-error needs an oracle-supported family")
    solve.add_argument("--eps", type=float, default=1e-6)
    solve.add_argument("--max-iter", type=int, default=100_000)
    solve.add_argument("--divergence-threshold", type=float, default=1e6)
    solve.add_argument("--trace", default=None, metavar="CSV",
                       help="write per-iteration error/step CSV here")

    angle = sub.add_parser("angle", help="principal and Friedrichs angles")
    angle.add_argument("file", help="problem file containing exactly two subspaces")

    bench_p = sub.add_parser("bench", help="benchmark sweeps (CSV + SVG artifacts)")
    bench_p.add_argument("sweep", choices=["alpha", "beta", "angle-profile", "rates"])
    bench_p.add_argument("--out-dir", default="aamr-bench")
    bench_p.add_argument("--seed", type=int, default=None,
                         help="defaults to $AAMR_SEED, then 0")
    bench_p.add_argument("--n", type=int, default=50)
    bench_p.add_argument("--instances", type=int, default=20)
    bench_p.add_argument("--starts", type=int, default=10)
    bench_p.add_argument("--start-norm", type=float, default=10.0)
    bench_p.add_argument("--eps", type=float, default=1e-3)
    bench_p.add_argument("--max-iter", type=int, default=100_000)
    bench_p.add_argument("--bins", type=int, default=20)
    bench_p.add_argument("--methods", default=None,
                         help="comma-separated tokens, e.g. 'map,aamr:alpha=0.9:beta=0.9'")
    bench_p.add_argument("--alphas", default=None,
                         help="override the alpha grid (comma-separated)")
    bench_p.add_argument("--betas", default=None,
                         help="override the beta grid (comma-separated)")
    bench_p.add_argument("--thetas", default="0.2,0.5,1.0",
                         help="angles for the rates sweep (comma-separated radians)")
    bench_p.add_argument("--jobs", type=int, default=1,
                         help="parallel worker processes")
    bench_p.add_argument("--full-scale", action="store_true",
                         help="large benchmark preset (hours of runtime)")
    return parser


def _cmd_solve(args) -> int:
    dim, sets = load_problem(args.problem)
    q = _vector(args.q)
    if q.size != dim:
        raise _UsageError(f"--q has dimension {q.size}, problem has {dim}")
    x0 = None
    if args.x0 is not None:
        x0 = _vector(args.x0)
        if x0.size != dim:
            raise _UsageError(f"--x0 has dimension {x0.size}, problem has {dim}")
    try:
        spec = MethodSpec(args.method, alpha=args.alpha, beta=args.beta,
                          mu=args.mu, gamma=args.gamma, lam=args.lam)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    common = dict(max_iter=args.max_iter,
                  divergence_threshold=args.divergence_threshold,
                  record_trace=args.trace is not None)
    if args.mode == "residual":
        policy = StoppingPolicy.residual(eps=args.eps, **common)
    elif args.mode == "budget":
        policy = StoppingPolicy.budget_only(**common)
    else:
        target = project_intersection_oracle(sets, q)
        policy = StoppingPolicy.true_error(target, eps=args.eps, **common)
    try:
        result = solve_best_approximation(spec, sets, q, policy=policy, x0=x0)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    print(f"status: {result.status.value}")
    print(f"iterations: {result.iterations}")
    print(f"shadow: {_fmt_vec(result.shadow)}")
    print(f"final_error: {result.final_error:.9g}")
    if args.trace is not None:
        lines = ["k,error,step_norm"]
        lines += [f"{k},{err!r},{step!r}" for k, err, step in result.trace]
        Path(args.trace).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"trace: {args.trace}")
    return EXIT_CODES[result.status]


def _cmd_angle(args) -> int:
    dim, sets = load_problem(args.file)
    subspaces = [s for s in sets if isinstance(s, LinearSubspace)]
    if len(subspaces) != 2:
        raise _UsageError("angle needs a problem file with exactly two subspace sets")
    basis_u, basis_v = subspaces[0].basis, subspaces[1].basis
    angles = principal_angles(basis_u, basis_v)
    meet = subspace_intersection(basis_u, basis_v)
    theta = friedrichs_angle(basis_u, basis_v)  # may raise "coincident subspaces"
    print("principal angles (radians): " + ", ".join(f"{a:.6f}" for a in angles))
    print(f"intersection dimension: {meet.shape[1]}")
    print(f"Friedrichs angle (radians): {theta:.6f}")
    return 0


def _parse_grid(text):
    return tuple(float(part) for part in text.split(","))


def _bench_config(args) -> bench.SweepConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("AAMR_SEED", "0"))
    kwargs = dict(n=args.n, n_instances=args.instances, n_starts=args.starts,
                  start_norm=args.start_norm, eps=args.eps,
                  max_iter=args.max_iter, angle_bins=args.bins, seed=seed)
    if args.full_scale:
        scale = {"alpha": dict(n_instances=1000, n_starts=1),
                 "beta": dict(n_instances=100, n_starts=100, angle_bins=100,
                              beta_grid=tuple(round(0.4 + 0.005 * i, 3)
                                              for i in range(120))),
                 "angle-profile": dict(n_instances=100, n_starts=10),
                 "rates": {}}[args.sweep]
        kwargs.update(scale)
    if args.alphas is not None:
        kwargs["alpha_grid"] = _parse_grid(args.alphas)
    if args.betas is not None:
        kwargs["beta_grid"] = _parse_grid(args.betas)
    return bench.SweepConfig(**kwargs)


def _parse_methods(text):
    if text is None:
        return None
    return [bench.parse_method_token(tok) for tok in text.split(",") if tok.strip()]


def _cmd_bench(args) -> int:
    config = _bench_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    if args.sweep == "angle-profile":
        methods = _parse_methods(args.methods)
        runs, records = bench.angle_profile(config, methods=methods, jobs=args.jobs)
        runs_path = out / "runs_angle_profile.csv"
        bench.write_runs_csv(runs_path, runs)
        summary_path = out / "angle_profile.csv"
        bench.write_table_csv(summary_path, [
            "instance_id", "theta_F", "method", "n_starts", "median_iterations",
            "std_iterations", "n_converged", "n_diverged", "n_budget",
            "n_failed", "seed",
        ], [[r.instance_id, r.theta, r.method.display(), r.n_starts,
             r.median_iterations, r.std_iterations,
             r.status_counts["converged"], r.status_counts["diverged"],
             r.status_counts["budget_exhausted"],
             r.status_counts["numerical_failure"], r.seed] for r in records])
        for stat, fname in (("median_iterations", "median_vs_angle.svg"),
                            ("std_iterations", "std_vs_angle.svg")):
            series = []
            labels = sorted({r.method.display() for r in records})
            for label in labels:
                pts = sorted((r.theta, getattr(r, stat)) for r in records
                             if r.method.display() == label
                             and math.isfinite(getattr(r, stat)))
                series.append(svgplot.Series(label, [p[0] for p in pts],
                                             [max(p[1], 0.5) for p in pts]))
            svgplot.render_chart(out / fname, series,
                                 title=f"{stat.replace('_', ' ')} to reach "
                                       f"eps={config.eps:g}",
                                 xlabel="Friedrichs angle (radians)",
                                 ylabel="iterations", ylog=True)
            written.append(out / fname)
        written = [runs_path, summary_path] + written
        print(f"instances: {config.n_instances}  starts: {config.n_starts}  "
              f"eps: {config.eps:g}")
        for r in records:
            med = "-" if math.isnan(r.median_iterations) else f"{r.median_iterations:.0f}"
            print(f"  instance {r.instance_id:3d}  theta {r.theta:8.4f}  "
                  f"{r.method.display():24s} median {med}")

    elif args.sweep == "alpha":
        methods = _parse_methods(args.methods)
        kinds = [m.kind for m in methods] if methods else ["aamr"]
        runs, best = [], []
        for kind in kinds:
            k_runs, k_best = bench.sweep_alpha(config, kind=kind, jobs=args.jobs)
            runs.extend(k_runs)
            best.extend(k_best)
        runs_path = out / "runs_alpha.csv"
        bench.write_runs_csv(runs_path, runs)
        best_path = out / "best_alpha.csv"
        bench.write_table_csv(best_path,
                              ["instance_id", "theta_F", "method", "beta",
                               "best_alpha", "iterations"],
                              [[r.instance_id, r.theta, r.method, r.beta,
                                r.best_alpha, r.iterations] for r in best])
        series = []
        groups = sorted({(r.method, r.beta if r.beta is not None else -1.0)
                         for r in best})
        for method, beta in groups:
            sel = [r for r in best if r.method == method
                   and (r.beta if r.beta is not None else -1.0) == beta]
            label = method if beta < 0 else f"{method} beta={beta:g}"
            xs = [r.theta for r in sel]
            ys = [r.best_alpha for r in sel]
            series.append(svgplot.Series(label, xs, ys, style="scatter"))
            mean_alpha = float(np.mean(ys))
            series.append(svgplot.Series(f"{label} mean={mean_alpha:.2f}",
                                         [min(xs), max(xs)],
                                         [mean_alpha, mean_alpha], style="dashed"))
        svgplot.render_chart(out / "best_alpha.svg", series,
                             title="best averaging weight vs angle",
                             xlabel="Friedrichs angle (radians)",
                             ylabel="best alpha")
        written = [runs_path, best_path, out / "best_alpha.svg"]
        for method, beta in groups:
            sel = [r.best_alpha for r in best if r.method == method
                   and (r.beta if r.beta is not None else -1.0) == beta]
            tag = method if beta < 0 else f"{method} beta={beta:g}"
            print(f"  {tag:20s} mean best alpha {np.mean(sel):.3f} over {len(sel)} instances")

    elif args.sweep == "beta":
        runs, best, fit = bench.sweep_beta(config, jobs=args.jobs)
        runs_path = out / "runs_beta.csv"
        bench.write_runs_csv(runs_path, runs)
        best_path = out / "best_beta.csv"
        bench.write_table_csv(best_path,
                              ["instance_id", "theta_F", "best_beta",
                               "median_iterations"],
                              [[r.instance_id, r.theta, r.best_beta,
                                r.median_iterations] for r in best])
        xs = [r.theta for r in best]
        series = [svgplot.Series("best beta", xs, [r.best_beta for r in best],
                                 style="scatter")]
        grid = np.linspace(min(xs), max(xs), 60) if xs else []
        if fit is not None:
            series.append(svgplot.Series(
                f"fit {fit.a:.3f}*exp({fit.b:.3f}t)+{fit.c:.3f}",
                list(grid), list(fit(grid))))
        series.append(svgplot.Series("shipped rule", list(grid),
                                     [recommended_beta(t) for t in grid],
                                     style="dashed"))
        svgplot.render_chart(out / "best_beta.svg", series,
                             title="best reflection strength vs angle",
                             xlabel="Friedrichs angle (radians)", ylabel="beta")
        written = [runs_path, best_path, out / "best_beta.svg"]
        if fit is not None:
            print(f"  exponential fit: beta = {fit.a:.4f}*exp({fit.b:.4f}*theta) "
                  f"+ {fit.c:.4f}   (rms {fit.rms_residual:.4f}, "
                  f"shipped rule rms {fit.rule_rms_residual:.4f})")
        else:
            print("  fit degenerate: not enough converged instances")

    else:  # rates
        thetas = _parse_grid(args.thetas)
        methods = _parse_methods(args.methods)
        runs, records, traces = bench.rate_profile(
            thetas=thetas, methods=methods, seed=config.seed,
            max_iter=config.max_iter, start_norm=config.start_norm)
        runs_path = out / "runs_rates.csv"
        bench.write_runs_csv(runs_path, runs)
        rates_path = out / "rates.csv"
        bench.write_table_csv(rates_path,
                              ["theta", "method", "estimated_rate",
                               "expected_rate"],
                              [[r.theta, r.label, r.estimated_rate,
                                r.expected_rate] for r in records])
        series = []
        for (theta, label), trace in sorted(traces.items()):
            ks = [entry[0] for entry in trace]
            errs = [entry[1] for entry in trace]
            series.append(svgplot.Series(f"{label} theta={theta:g}", ks, errs))
        svgplot.render_chart(out / "error_vs_iteration.svg", series,
                             title="monitored error by iteration",
                             xlabel="iteration", ylabel="error", ylog=True)
        written = [runs_path, rates_path, out / "error_vs_iteration.svg"]
        for r in records:
            expected = "-" if r.expected_rate is None else f"{r.expected_rate:.4f}"
            print(f"  theta {r.theta:6.3f}  {r.label:20s} rate {r.estimated_rate:.4f}"
                  f"  expected {expected}")

    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "angle":
            return _cmd_angle(args)
        return _cmd_bench(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ProblemFormatError, NoOracleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
