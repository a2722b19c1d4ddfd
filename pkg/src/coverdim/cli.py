"""Command-line interface.

Subcommands
-----------
generate     sample a synthetic manifold to CSV (plus sidecar metadata)
estimate     batch dimension estimation on a CSV or generated data set
sweep        estimate across a range of neighborhood sizes, TSV output
incremental  maintain a state file and fold in new points one at a time

Exit codes: 0 success, 2 usage or parameter error, 3 I/O error,
4 data-format error (malformed CSV, corrupt state file, dimension mismatch).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .cover import NeighborhoodSpec
from .cpca import (
    CpcaState,
    GlobalEstimate,
    current_estimate,
    estimate_batch,
    init_incremental,
    insert_point,
    load_state,
    save_state,
)
from .dataio import DataFormatError, read_points_csv, write_points_csv, write_sidecar
from .datagen import KINDS, CorruptionSpec, ManifoldSpec, corrupt, generate
from .linalg import PointSet
from .mle import mle_global
from .spectra import IdCriteria

METHODS = ("cpca", "lpca", "mle")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4


class UsageError(Exception):
    """Bad flag combination or parameter value."""


# ---------------------------------------------------------------------------
# argument plumbing


def _add_generator_args(parser: argparse.ArgumentParser) -> None:
    gen = parser.add_argument_group("generator")
    gen.add_argument("--kind", choices=KINDS, help="synthetic manifold kind")
    gen.add_argument("--n", type=int, default=1200, help="number of points (default 1200)")
    gen.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    gen.add_argument("--d", type=int, help="intrinsic dimension (hypersphere/cube/subspace)")
    gen.add_argument("--ambient-dim", type=int, help="ambient dimension (subspace)")
    gen.add_argument("--half-twists", type=int, default=10, help="mobius half twists (default 10)")
    gen.add_argument("--radius", type=float, default=1.0, help="mobius ring radius (default 1)")
    gen.add_argument("--width", type=float, default=0.2, help="mobius half band width (default 0.2)")
    gen.add_argument("--noise-variance", type=float, default=0.0,
                     help="additive Gaussian noise variance per coordinate (default 0)")
    gen.add_argument("--target-dim", type=int,
                     help="isometrically embed into this ambient dimension before adding noise")


def _add_criteria_args(parser: argparse.ArgumentParser) -> None:
    crit = parser.add_argument_group("criteria")
    crit.add_argument("--alpha", type=float, default=10.0, help="spectral-gap threshold (default 10)")
    crit.add_argument("--beta", type=float, default=0.8, help="cumulative-variance threshold (default 0.8)")
    crit.add_argument("--noise-p", type=float, default=0.95,
                      help="cumulative ratio marking the noise part (default 0.95)")
    crit.add_argument("--noise-pc-cap", type=int, default=10,
                      help="max noise-part eigenvalues in the noise estimate (default 10)")


def _add_input_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="CSV point cloud ('-' for stdin); alternative to --kind")
    parser.add_argument("--header", action="store_true", help="skip one CSV header line")
    _add_generator_args(parser)


def _criteria_from_args(args, filter_noise: bool = True) -> IdCriteria:
    return IdCriteria(alpha=args.alpha, beta=args.beta, noise_p=args.noise_p,
                      noise_pc_cap=args.noise_pc_cap, filter_noise=filter_noise)


def _manifold_spec_from_args(args) -> ManifoldSpec:
    return ManifoldSpec(kind=args.kind, n=args.n, seed=args.seed, d=args.d,
                        ambient_dim=args.ambient_dim, half_twists=args.half_twists,
                        radius=args.radius, width=args.width)


def _load_input(args) -> tuple[PointSet, dict]:
    """Resolve the input data set from --input or the generator flags."""
    if args.input and args.kind:
        raise UsageError("give either --input or --kind, not both")
    if args.input:
        points = read_points_csv(args.input, skip_header=args.header)
        return points, {"source": args.input}
    if not args.kind:
        raise UsageError("an input is required: --input PATH or --kind KIND")
    spec = _manifold_spec_from_args(args)
    points = generate(spec)
    meta = {"source": "generated", "kind": spec.kind, "n": spec.n, "seed": spec.seed}
    if args.noise_variance > 0 or args.target_dim is not None:
        corruption = CorruptionSpec(noise_variance=args.noise_variance,
                                    target_dim=args.target_dim, seed=spec.seed + 1)
        points = corrupt(points, corruption)
        meta["noise_variance"] = args.noise_variance
        meta["target_dim"] = points.dim
    return points, meta


def _parse_methods(raw: str) -> list[str]:
    methods = [m.strip() for m in raw.split(",") if m.strip()]
    if not methods:
        raise UsageError("at least one method must be selected")
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}, expected one of {', '.join(METHODS)}")
    return methods


def _neighborhood_from_args(args, n: int) -> NeighborhoodSpec:
    if (args.k is None) == (args.eps is None):
        raise UsageError("exactly one of --k / --eps is required")
    if args.k is not None:
        if not 1 <= args.k <= n - 1:
            raise UsageError(f"--k must be in [1, n-1] = [1, {n - 1}], got {args.k}")
        return NeighborhoodSpec.knn(args.k)
    if args.eps <= 0:
        raise UsageError(f"--eps must be > 0, got {args.eps}")
    return NeighborhoodSpec.eps_ball(args.eps)


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _jsonable(obj):
    if isinstance(obj, dict):
        return {key: _jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


# ---------------------------------------------------------------------------
# reports


def _pca_method_report(estimate: GlobalEstimate, with_locals: bool) -> dict:
    report = {
        "global_id": estimate.global_id,
        "mean_local_id": estimate.mean_local_id,
        "subset_count": estimate.subset_count,
        "noise_var": estimate.noise_var,
        "mean_subset_noise_var": float(np.mean([le.noise_var for le in estimate.locals])),
        "ratio_id": estimate.ratio_id,
        "pct_id": estimate.pct_id,
        "aggregated_spectrum": estimate.aggregated,
    }
    if with_locals:
        report["locals"] = [
            {
                "subset_index": le.subset_index,
                "size": le.spectrum.subset_size,
                "local_id": le.local_id,
                "noise_var": le.noise_var,
                "ratio_id": le.ratio_id,
                "pct_id": le.pct_id,
                "noise_dominated": le.noise_dominated,
                "eigenvalues": le.spectrum.eigenvalues,
                "denoised_variances": le.denoised.variances,
            }
            for le in estimate.locals
        ]
    return report


def _run_methods(points: PointSet, methods: list[str], args) -> dict:
    results = {}
    neighborhood = _neighborhood_from_args(args, points.n)
    if "mle" in methods and neighborhood.mode != "knn":
        raise UsageError("the mle method needs k-NN mode (--k)")
    for method in methods:
        if method == "cpca":
            results[method] = estimate_batch(points, neighborhood, _criteria_from_args(args, True))
        elif method == "lpca":
            results[method] = estimate_batch(points, neighborhood, _criteria_from_args(args, False))
        else:
            results[method] = mle_global(points, neighborhood.k)
    return results


def _format_estimate_table(results: dict, meta: dict, out) -> None:
    src = meta.get("source", "?")
    out.write(f"# input: {src}\n")
    header = f"{'method':8s} {'estimate':>10s} {'global_id':>9s} {'subsets':>8s} " \
             f"{'noise_var':>12s} {'mean_subset_nv':>14s}\n"
    out.write(header)
    for method, result in results.items():
        if method == "mle":
            out.write(f"{method:8s} {result.global_value:10.4f} {'na':>9s} {'na':>8s} "
                      f"{'na':>12s} {'na':>14s}\n")
        else:
            mean_nv = float(np.mean([le.noise_var for le in result.locals]))
            out.write(f"{method:8s} {result.mean_local_id:10.4f} {result.global_id:9d} "
                      f"{result.subset_count:8d} {result.noise_var:12.6g} {mean_nv:14.6g}\n")


def _format_estimate_tsv(results: dict, out) -> None:
    out.write("method\testimate\tglobal_id\tsubsets\tnoise_var\n")
    for method, result in results.items():
        if method == "mle":
            out.write(f"{method}\t{result.global_value!r}\tna\tna\tna\n")
        else:
            out.write(f"{method}\t{result.mean_local_id!r}\t{result.global_id}\t"
                      f"{result.subset_count}\t{result.noise_var!r}\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    spec = _manifold_spec_from_args(args)
    if not args.output:
        raise UsageError("--output is required")
    points = generate(spec)
    meta = {
        "kind": spec.kind,
        "n": spec.n,
        "seed": spec.seed,
        "d": spec.d,
        "ambient_dim": spec.ambient_dim,
        "half_twists": spec.half_twists,
        "radius": spec.radius,
        "width": spec.width,
    }
    if args.noise_variance > 0 or args.target_dim is not None:
        corruption = CorruptionSpec(noise_variance=args.noise_variance,
                                    target_dim=args.target_dim, seed=spec.seed + 1)
        points = corrupt(points, corruption)
        meta["noise_variance"] = args.noise_variance
        meta["target_dim"] = points.dim
        meta["corruption_seed"] = corruption.seed
    meta["rows"] = points.n
    meta["columns"] = points.dim
    write_points_csv(args.output, points)
    write_sidecar(args.output, meta)
    if args.plot:
        from .plots import save_scatter_plot

        save_scatter_plot(points, args.plot, title=f"{spec.kind} (n={points.n})")
    print(f"wrote {points.n} points of dimension {points.dim} to {args.output}", file=sys.stderr)
    return EXIT_OK


def cmd_estimate(args) -> int:
    if args.kind is None and args.input is None:
        raise UsageError("an input is required: --input PATH or --kind KIND")
    points, meta = _load_input(args)
    methods = _parse_methods(args.methods)
    results = _run_methods(points, methods, args)

    out, should_close = _open_out(args.output)
    try:
        if args.format == "json":
            doc = {
                "input": meta,
                "n": points.n,
                "dim": points.dim,
                "neighborhood": {"mode": "knn", "k": args.k} if args.k is not None
                else {"mode": "eps", "eps": args.eps},
                "criteria": {
                    "alpha": args.alpha, "beta": args.beta, "noise_p": args.noise_p,
                    "noise_pc_cap": args.noise_pc_cap,
                },
                "methods": {},
            }
            for method, result in results.items():
                if method == "mle":
                    finite = result.local_values[np.isfinite(result.local_values)]
                    doc["methods"][method] = {
                        "k": result.k,
                        "global_value": result.global_value,
                        "degenerate_count": result.degenerate_count,
                        "local_min": float(finite.min()) if finite.size else None,
                        "local_max": float(finite.max()) if finite.size else None,
                    }
                else:
                    doc["methods"][method] = _pca_method_report(result, with_locals=True)
            json.dump(_jsonable(doc), out, indent=2)
            out.write("\n")
        elif args.format == "tsv":
            _format_estimate_tsv(results, out)
        else:
            _format_estimate_table(results, meta, out)
    finally:
        if should_close:
            out.close()

    if args.plot:
        from .plots import save_spectrum_plot

        pca_result = results.get("cpca") or results.get("lpca")
        if pca_result is None:
            raise UsageError("--plot needs a PCA method (cpca or lpca)")
        save_spectrum_plot(pca_result.aggregated, pca_result.noise_var, args.plot,
                           title="aggregated spectrum")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.kind is None and args.input is None:
        raise UsageError("an input is required: --input PATH or --kind KIND")
    if args.k_step < 1:
        raise UsageError(f"--k-step must be >= 1, got {args.k_step}")
    if args.k_min < 1 or args.k_max < args.k_min:
        raise UsageError(f"need 1 <= k-min <= k-max, got {args.k_min}..{args.k_max}")
    points, _meta = _load_input(args)
    if args.k_max > points.n - 1:
        raise UsageError(f"--k-max {args.k_max} exceeds n-1 = {points.n - 1}")
    methods = _parse_methods(args.methods)

    ks = list(range(args.k_min, args.k_max + 1, args.k_step))
    rows = []
    for k in ks:
        neighborhood = NeighborhoodSpec.knn(k)
        for method in methods:
            if method == "mle":
                value = mle_global(points, k).global_value
                rows.append((k, method, value, None))
            else:
                criteria = _criteria_from_args(args, filter_noise=(method == "cpca"))
                estimate = estimate_batch(points, neighborhood, criteria)
                rows.append((k, method, estimate.mean_local_id, estimate.global_id))

    out, should_close = _open_out(args.output)
    try:
        out.write("k\tmethod\testimate\tglobal_id\n")
        for k, method, value, global_id in rows:
            gid = "na" if global_id is None else str(global_id)
            out.write(f"{k}\t{method}\t{value!r}\t{gid}\n")
    finally:
        if should_close:
            out.close()

    if args.plot:
        from .plots import save_sweep_plot

        save_sweep_plot([(k, m, v) for k, m, v, _ in rows], args.plot,
                        title="dimension estimate vs neighborhood size")
    return EXIT_OK


def _state_report_line(state: CpcaState, estimate: GlobalEstimate) -> str:
    members = sum(len(coords) for coords in state.subsets)
    return (f"state subsets={state.subset_count} members={members} "
            f"inserted={state.inserted_count} outliers={state.outlier_count} "
            f"global_id={estimate.global_id} mean_local_id={estimate.mean_local_id:.6f} "
            f"noise_var={estimate.noise_var:.6g}")


def cmd_incremental(args) -> int:
    if args.emit_every < 0:
        raise UsageError("--emit-every must be >= 0")

    if args.init:
        if not args.input:
            raise UsageError("--init needs --input with the seed data set")
        seed_points = read_points_csv(args.input, skip_header=args.header)
        neighborhood = _neighborhood_from_args(args, seed_points.n)
        state = init_incremental(seed_points, neighborhood, _criteria_from_args(args, True))
        modified = True
    else:
        if args.k is not None or args.eps is not None:
            raise UsageError("--k/--eps only apply with --init; the state file fixes them")
        if args.input:
            raise UsageError("--input only applies with --init; use --points to insert data")
        state = load_state(args.state)
        modified = False

    emit_json = args.format == "json"

    def emit(record: dict, line: str) -> None:
        if emit_json:
            print(json.dumps(_jsonable(record)))
        else:
            print(line)

    estimate = current_estimate(state)
    emit({"event": "state", "subsets": state.subset_count,
          "inserted": state.inserted_count, "outliers": state.outlier_count,
          "global_id": estimate.global_id, "mean_local_id": estimate.mean_local_id,
          "noise_var": estimate.noise_var},
         _state_report_line(state, estimate))

    accepted = 0
    rejected = 0
    if args.points:
        new_points = read_points_csv(args.points, skip_header=False)
        if new_points.dim != state.dim:
            raise DataFormatError(
                f"{args.points}: points have dimension {new_points.dim}, state has {state.dim}"
            )
        for row in new_points.points:
            estimate, ok = insert_point(state, row)
            modified = True
            if ok:
                accepted += 1
                if args.emit_every and accepted % args.emit_every == 0:
                    emit({"event": "report", "accepted": accepted,
                          "global_id": estimate.global_id,
                          "mean_local_id": estimate.mean_local_id,
                          "noise_var": estimate.noise_var},
                         f"report accepted={accepted} global_id={estimate.global_id} "
                         f"mean_local_id={estimate.mean_local_id:.6f}")
            else:
                rejected += 1
        emit({"event": "summary", "accepted": accepted, "rejected_outliers": rejected,
              "global_id": estimate.global_id, "mean_local_id": estimate.mean_local_id,
              "noise_var": estimate.noise_var},
             f"summary accepted={accepted} rejected_outliers={rejected}")
        estimate = current_estimate(state)
        emit({"event": "state", "subsets": state.subset_count,
              "inserted": state.inserted_count, "outliers": state.outlier_count,
              "global_id": estimate.global_id, "mean_local_id": estimate.mean_local_id,
              "noise_var": estimate.noise_var},
             _state_report_line(state, estimate))

    if modified:
        save_state(state, args.state)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coverdim",
        description="Intrinsic dimension estimation via cover-based local PCA.",
        epilog="Exit codes: 0 success, 2 usage error, 3 I/O error, 4 data-format error.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="sample a synthetic manifold to CSV")
    _add_generator_args(p_gen)
    p_gen.add_argument("--output", "-o", required=True, help="output CSV path")
    p_gen.add_argument("--plot", help="also render a scatter figure to this file")
    p_gen.set_defaults(handler=cmd_generate)

    p_est = sub.add_parser("estimate", help="batch dimension estimation")
    _add_input_args(p_est)
    _add_criteria_args(p_est)
    p_est.add_argument("--k", type=int, help="k-NN neighborhood size")
    p_est.add_argument("--eps", type=float, help="epsilon-ball neighborhood radius")
    p_est.add_argument("--methods", default="cpca", help="comma list of cpca,lpca,mle (default cpca)")
    p_est.add_argument("--format", choices=("table", "json", "tsv"), default="table")
    p_est.add_argument("--output", "-o", help="write the report here instead of stdout")
    p_est.add_argument("--plot", help="render the aggregated spectrum to this file")
    p_est.set_defaults(handler=cmd_estimate)

    p_sweep = sub.add_parser("sweep", help="estimate across a range of k values (TSV)")
    _add_input_args(p_sweep)
    _add_criteria_args(p_sweep)
    p_sweep.add_argument("--k-min", type=int, required=True)
    p_sweep.add_argument("--k-max", type=int, required=True)
    p_sweep.add_argument("--k-step", type=int, default=1)
    p_sweep.add_argument("--methods", default="cpca", help="comma list of cpca,lpca,mle (default cpca)")
    p_sweep.add_argument("--output", "-o", help="write the TSV here instead of stdout")
    p_sweep.add_argument("--plot", help="render estimate-vs-k curves to this file")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_inc = sub.add_parser("incremental", help="streaming estimation with a state file")
    p_inc.add_argument("--state", required=True, help="state file path")
    p_inc.add_argument("--init", action="store_true", help="initialize the state from --input")
    p_inc.add_argument("--input", help="seed data CSV (with --init)")
    p_inc.add_argument("--header", action="store_true", help="skip one CSV header line")
    p_inc.add_argument("--points", help="CSV of new points to insert ('-' for stdin)")
    p_inc.add_argument("--emit-every", type=int, default=0,
                       help="print a report every N accepted points (default: only summary)")
    p_inc.add_argument("--format", choices=("table", "json"), default="table")
    p_inc.add_argument("--k", type=int, help="k-NN neighborhood size (init only)")
    p_inc.add_argument("--eps", type=float, help="epsilon-ball radius (init only)")
    _add_criteria_args(p_inc)
    p_inc.set_defaults(handler=cmd_incremental)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DataFormatError as exc:
        print(f"coverdim: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"coverdim: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"coverdim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
