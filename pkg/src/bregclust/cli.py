"""Command-line entry point.

Every subcommand writes a flat ``key=value`` manifest next to its outputs.
``bregclust --from-manifest PATH`` replays the recorded invocation; ``--out``
may be given alongside to redirect the outputs.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import data as dcore
from . import experiments as exp
from .baselines import PeakConfig, agglomerative, density_peak
from .clustering import METHODS, ClusterConfig, ClusteringError, fit
from .data import DataError, DataMatrix, GeneratorSpec
from .divergence import DivergenceFamily, DomainError
from .gravity import GravityConfig, GuardViolation, improve
from .metrics import ari, nmi
from .power_mean import PowerMeanConfig
from .search import SearchError, SearchGrid, search

logger = logging.getLogger("bregclust")

FAMILY_CHOICES = ("gaussian", "binomial", "poisson", "gamma")
DATA_ERRORS = (DataError, DomainError, ClusteringError, SearchError, GuardViolation,
               FloatingPointError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _centers(text: str) -> list[list[float]]:
    try:
        return [[float(v) for v in chunk.split(",")] for chunk in text.split(";") if chunk.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse centers {text!r}; use '10,10;20,20'")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="bregclust", description=__doc__.splitlines()[0])
    parser.add_argument("--from-manifest", metavar="PATH",
                        help="replay the invocation recorded in a run manifest")
    parser.add_argument("--out", dest="replay_out",
                        help="output override when replaying a manifest")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        subs[name] = p
        return p

    p = add("generate", "sample a synthetic exponential-family dataset")
    p.add_argument("--family", choices=FAMILY_CHOICES, required=True)
    p.add_argument("--centers", type=_centers, default=_centers("10,10;20,20;40,40"))
    p.add_argument("--samples-per-center", type=int, default=exp.SIM_SAMPLES)
    p.add_argument("--noise-scale", type=float, default=dcore.DEFAULT_NOISE_SCALE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = add("improve", "apply the KNN-gravity transform with fixed parameters")
    _input_args(p)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("cluster", "cluster a CSV dataset")
    _input_args(p)
    p.add_argument("--method", choices=METHODS + ("agglomerative", "peak"), default="bregman_power")
    p.add_argument("--family", choices=FAMILY_CHOICES, default="gaussian")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s0", type=float, default=PowerMeanConfig.s0)
    p.add_argument("--anneal-factor", type=float, default=PowerMeanConfig.anneal_factor)
    p.add_argument("--s-min", type=float, default=PowerMeanConfig.s_min)
    p.add_argument("--max-iters", type=int, default=ClusterConfig.max_iters)
    p.add_argument("--tol", type=float, default=ClusterConfig.tol)
    p.add_argument("--restarts", type=int, default=ClusterConfig.restarts)
    p.add_argument("--dc-percentile", type=float, default=PeakConfig.dc_percentile)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV of cluster assignments")

    p = add("dbgsa", "search gravity parameters and write the improved dataset")
    _input_args(p)
    _grid_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--family", choices=FAMILY_CHOICES, default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    p = add("metrics", "ARI and NMI between two label columns")
    p.add_argument("--input", required=True)
    p.add_argument("--truth-column", default="label")
    p.add_argument("--pred-column", default="cluster")

    p = add("simulation-study", "ARI of the four centroid methods on simulated data")
    p.add_argument("--replicates", type=int, default=exp.DEFAULT_REPLICATES)
    p.add_argument("--full", action="store_true",
                   help=f"use {exp.FULL_REPLICATES} replicates")
    p.add_argument("--noise-scale", type=float, default=dcore.DEFAULT_NOISE_SCALE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    p = add("improvement-study", "NMI of three clusterers before and after improvement")
    p.add_argument("--datasets", nargs="+", required=True)
    p.add_argument("--label-column", default="label")
    p.add_argument("--recipes", help="JSON preprocessing recipes (default: shipped file)")
    p.add_argument("--include-slow", action="store_true")
    _grid_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    p = add("plotdata", "2-D coordinates plus labels for external plotting")
    _input_args(p)
    p.add_argument("--assignments", help="CSV with a 'cluster' column to use as labels")
    p.add_argument("--out", required=True)
    return parser, subs


def _input_args(p):
    p.add_argument("--input", required=True)
    p.add_argument("--label-column")


def _grid_args(p):
    g = SearchGrid()
    p.add_argument("--eta0", type=float, default=g.eta0)
    p.add_argument("--delta-eta", type=float, default=g.delta_eta)
    p.add_argument("--K-max", type=int, default=g.K_range[1])
    p.add_argument("--d-max", type=int, default=g.d_range[1])
    p.add_argument("--decoupled-eta", action="store_true")
    p.add_argument("--eta-count", type=int, default=g.eta_count)
    p.add_argument("--centroid-source", choices=("per_candidate", "raw"), default="per_candidate")


def _grid(args) -> SearchGrid:
    return SearchGrid(eta0=args.eta0, delta_eta=args.delta_eta, K_range=(1, args.K_max),
                      d_range=(1, args.d_max), decoupled=args.decoupled_eta,
                      eta_count=args.eta_count)


# ------------------------------------------------------------------- manifests


def _normalized_argv(sub: argparse.ArgumentParser, args) -> list[str]:
    argv = []
    for action in sub._actions:
        if not action.option_strings or action.dest == "help":
            continue
        value = getattr(args, action.dest, None)
        flag = action.option_strings[0]
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                argv.append(flag)
        elif value is None:
            continue
        elif action.dest == "centers":
            argv += [flag, ";".join(",".join(repr(float(v)) for v in c) for c in value)]
        elif isinstance(value, list):
            argv += [flag] + [str(v) for v in value]
        else:
            argv += [flag, str(value)]
    return argv


def _manifest(args, sub, extra=None, inputs=()) -> dict:
    entries = {"tool": "bregclust", "version": __version__, "command": args.command,
               "argv": json.dumps([args.command] + _normalized_argv(sub, args))}
    for action in sub._actions:
        if action.option_strings and action.dest != "help":
            entries[f"arg.{action.dest}"] = getattr(args, action.dest, None)
    for i, path in enumerate(inputs):
        entries[f"input.{i}.path"] = path
        entries[f"input.{i}.sha256"] = dcore.file_sha256(path)
    entries.update({f"default.{k}": v for k, v in exp.decided_defaults().items()})
    entries.update(extra or {})
    return entries


def _replay_argv(manifest_path: str, out) -> list[str]:
    entries = exp.read_manifest(manifest_path)
    if "argv" not in entries:
        raise UsageError(f"{manifest_path}: manifest has no recorded argv")
    argv = json.loads(entries["argv"])
    if out is not None:
        i = argv.index("--out")
        argv[i + 1] = out
    return argv


# -------------------------------------------------------------------- commands


def _load(args) -> DataMatrix:
    return dcore.load_csv(args.input, args.label_column)


def _positive(data: DataMatrix, family: str, extra: dict) -> DataMatrix:
    if family == "gaussian":
        return data
    data, offsets = dcore.shift_positive(data)
    extra["positive_shift"] = " ".join(repr(float(o)) for o in offsets)
    return data


def cmd_generate(args, sub):
    spec = GeneratorSpec(args.family, args.centers, args.samples_per_center,
                         args.noise_scale, args.seed)
    data = dcore.generate(spec)
    out = dcore.write_csv(data, args.out)
    exp.write_manifest(f"{out}.manifest", _manifest(args, sub, {"output.sha256": dcore.file_sha256(out)}))
    print(f"wrote {data.n} x {data.m} {args.family} sample to {out}")


def cmd_improve(args, sub):
    data = _load(args)
    moved = improve(data, GravityConfig(args.eta, args.K, args.d))
    out = dcore.write_csv(moved, args.out)
    exp.write_manifest(f"{out}.manifest", _manifest(args, sub, inputs=[args.input]))
    print(f"improved {data.n} points with eta={args.eta:g} K={args.K} d={args.d} -> {out}")


def cmd_cluster(args, sub):
    data = _load(args)
    extra = {}
    if args.method == "agglomerative":
        result = agglomerative(data, args.k)
    elif args.method == "peak":
        result = density_peak(data, PeakConfig(args.k, args.dc_percentile))
    else:
        family = "gaussian" if args.method in ("kmeans", "kmeans_power") else args.family
        data = _positive(data, family, extra)
        config = ClusterConfig(
            args.method, DivergenceFamily.from_name(family), args.k,
            PowerMeanConfig(args.s0, args.anneal_factor, args.s_min),
            args.max_iters, args.tol, args.seed, args.restarts)
        result = fit(data, config)
    out = DataMatrix(result.assignments[:, None], data.labels, columns=["cluster"])
    path = dcore.write_csv(out, args.out)
    extra.update(objective=repr(result.objective), iterations=result.iterations,
                 converged=result.converged)
    print(f"{args.method}: objective={result.objective:.6g} iterations={result.iterations} "
          f"converged={result.converged}")
    if data.labels is not None:
        a, m = ari(data.labels, result.assignments), nmi(data.labels, result.assignments)
        extra.update(ari=repr(a), nmi=repr(m))
        print(f"ARI={a:.4f} NMI={m:.4f}")
    exp.write_manifest(f"{path}.manifest", _manifest(args, sub, extra, [args.input]))


def cmd_dbgsa(args, sub):
    data = _load(args)
    extra = {}
    data = _positive(data, args.family, extra)
    result = search(data, _grid(args), args.k, DivergenceFamily.from_name(args.family),
                    args.seed, args.centroid_source, args.workers)
    outdir = Path(args.out)
    dcore.write_csv(result.improved_data, outdir / "improved.csv")
    exp.write_candidates(result.all_candidates, outdir / "candidates.csv")
    b = result.best
    extra.update({"best.eta": b.eta, "best.K": b.K, "best.d": b.d,
                  "best.objective": repr(b.objective),
                  "feasible": sum(c.feasible for c in result.all_candidates),
                  "candidates": len(result.all_candidates)})
    extra.update({f"centroids.{k}": v for k, v in result.centroid_source.items()})
    exp.write_manifest(outdir / "manifest.txt", _manifest(args, sub, extra, [args.input]))
    print(f"best eta={b.eta:g} K={b.K} d={b.d} objective={b.objective:.6g} "
          f"({extra['feasible']}/{extra['candidates']} feasible)")


def cmd_metrics(args, sub):
    rows = exp.read_rows(args.input)
    if not rows:
        raise DataError(f"{args.input}: no rows")
    for col in (args.truth_column, args.pred_column):
        if col not in rows[0]:
            raise DataError(f"{args.input}: column {col!r} not found")
    try:
        truth = [int(float(r[args.truth_column])) for r in rows]
        pred = [int(float(r[args.pred_column])) for r in rows]
    except ValueError as exc:
        raise DataError(f"{args.input}: {exc}") from None
    print(f"n={len(truth)} ARI={ari(truth, pred):.6f} NMI={nmi(truth, pred):.6f}")


def cmd_simulation_study(args, sub):
    if args.full:
        args.replicates = exp.FULL_REPLICATES
    report = exp.simulation_study(args.replicates, args.seed, args.noise_scale, args.workers)
    paths = exp.write_simulation(report, args.out)
    extra = {f"output.{k}.sha256": dcore.file_sha256(p) for k, p in paths.items()}
    exp.write_manifest(Path(args.out) / "manifest.txt", _manifest(args, sub, extra))
    print(report.text)


def cmd_improvement_study(args, sub):
    recipes = exp.load_recipes(args.recipes)
    report, outcomes = exp.improvement_study(
        args.datasets, args.seed, _grid(args), recipes, args.include_slow,
        args.label_column, args.workers, args.centroid_source)
    exp.write_improvement(report, outcomes, args.out)
    extra = {f"recipe.{k}": json.dumps(v, sort_keys=True) for k, v in sorted(recipes.items())}
    exp.write_manifest(Path(args.out) / "manifest.txt",
                       _manifest(args, sub, extra, args.datasets))
    print(report.text)


def cmd_plotdata(args, sub):
    data = _load(args)
    labels = None
    if args.assignments:
        rows = exp.read_rows(args.assignments)
        if len(rows) != data.n or (rows and "cluster" not in rows[0]):
            raise DataError(f"{args.assignments}: need a 'cluster' column with {data.n} rows")
        labels = np.array([int(r["cluster"]) for r in rows])
    plot = exp.plotdata(data, labels, args.out)
    exp.write_manifest(f"{args.out}.manifest", _manifest(args, sub, inputs=[args.input]))
    print(f"wrote {plot.n} plot rows to {args.out}")


COMMANDS = {
    "generate": cmd_generate,
    "improve": cmd_improve,
    "cluster": cmd_cluster,
    "dbgsa": cmd_dbgsa,
    "metrics": cmd_metrics,
    "simulation-study": cmd_simulation_study,
    "improvement-study": cmd_improvement_study,
    "plotdata": cmd_plotdata,
}


def main(argv=None) -> int:
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.from_manifest:
        try:
            replay = _replay_argv(args.from_manifest, args.replay_out)
        except (UsageError, OSError, DataError, ValueError) as exc:
            print(f"bregclust: {exc}", file=sys.stderr)
            return 1
        return main(replay)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        COMMANDS[args.command](args, subs[args.command])
    except DATA_ERRORS as exc:
        print(f"bregclust {args.command}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"bregclust {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
