"""Experiment harness: simulation study, dataset-improvement study, plot data
and run manifests."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import data as dcore
from . import reference
from .baselines import PeakConfig, agglomerative, density_peak
from .clustering import METHODS, ClusterConfig, derived_seeds, fit
from .data import DataError, DataMatrix, GeneratorSpec, PreprocessSpec
from .divergence import DOMAIN_EPS, DivergenceFamily
from .gravity import GUARD_LIMIT
from .metrics import ari, increment, nmi
from .power_mean import PowerMeanConfig
from .search import SearchGrid, search

logger = logging.getLogger(__name__)

SIM_CENTERS = ((10.0, 10.0), (20.0, 20.0), (40.0, 40.0))
SIM_SAMPLES = 99
SIM_FAMILIES = dcore.FAMILIES
DEFAULT_REPLICATES = 50
FULL_REPLICATES = 250
STUDY_KMEANS_RESTARTS = 10


def decided_defaults() -> dict:
    """Every default the library fixes on its own, for run manifests."""
    pm = PowerMeanConfig()
    cc = ClusterConfig()
    grid = SearchGrid()
    return {
        "generator.binomial_trials": dcore.BINOMIAL_TRIALS,
        "generator.gamma_shape": dcore.GAMMA_SHAPE,
        "generator.gaussian_sd": dcore.DEFAULT_NOISE_SCALE,
        "generator.noise": "family sampling noise; gaussian sd=noise_scale",
        "preprocess.standardize_ddof": 1,
        "preprocess.pca": "covariance eigendecomposition, largest loading positive",
        "divergence.domain_eps": DOMAIN_EPS,
        "divergence.gamma_alpha": 1.0,
        "power.s0": pm.s0,
        "power.anneal_factor": pm.anneal_factor,
        "power.s_min": pm.s_min,
        "power.weights": "log-space, one global scale factor",
        "cluster.max_iters": cc.max_iters,
        "cluster.tol": cc.tol,
        "cluster.init": "uniform over data bounding box",
        "cluster.empty_cluster": "re-seed at point farthest from its nearest centroid",
        "cluster.restart_rank": "hard objective",
        "cluster.positive_shift": "add 1-min to columns with a value <= 0",
        "gravity.alpha": 1.0,
        "gravity.epsilon": 0.01,
        "gravity.G0": "per point mean distance to its K neighbours",
        "gravity.update": "simultaneous from iteration snapshot",
        "gravity.guard": f"eta*G*K < {GUARD_LIMIT:g}",
        "grid.eta0": grid.eta0,
        "grid.delta_eta": grid.delta_eta,
        "grid.K_range": f"{grid.K_range[0]}..{grid.K_range[1]}",
        "grid.d_range": f"{grid.d_range[0]}..{grid.d_range[1]}",
        "grid.eta_rule": "eta0 - K*d*delta_eta",
        "grid.objective": "sum of Euclidean distance to nearest BPK centroid",
        "grid.tie_break": "smaller K, smaller d, larger eta",
        "metrics.nmi_normalization": "arithmetic mean of entropies",
        "metrics.ari_degenerate": "1 if identical else 0",
        "baseline.agglomerative": "average linkage, Euclidean",
        "baseline.peak_dc_percentile": PeakConfig(k=1).dc_percentile,
        "study.kmeans_restarts": STUDY_KMEANS_RESTARTS,
    }


# ----------------------------------------------------------------------- reports


@dataclass
class TableReport:
    title: str
    rows: list[dict]
    raw: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    text: str = ""


def write_rows(rows: list[dict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        if not rows:
            return path
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
    return path


def read_rows(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def format_table(header: list[str], body: list[list[str]]) -> str:
    widths = [max(len(str(r[j])) for r in [header] + body) for j in range(len(header))]
    lines = ["  ".join(str(c).rjust(w) for c, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(str(c).rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines)


def summarize(values) -> tuple[float, float, float]:
    """mean, sample sd (ddof=1) and standard error."""
    v = np.asarray(values, dtype=float)
    sd = float(v.std(ddof=1)) if len(v) > 1 else 0.0
    return float(v.mean()), sd, sd / np.sqrt(len(v))


# ------------------------------------------------------------ simulation study


def _simulation_job(args) -> list[dict]:
    family, rep, rep_seed, noise_scale = args
    data_seed, init_seed = derived_seeds(rep_seed, 2)
    data = dcore.generate(GeneratorSpec(family, SIM_CENTERS, SIM_SAMPLES, noise_scale, data_seed))
    shifted = False
    if family != "gaussian":
        data, offsets = dcore.shift_positive(data)
        shifted = bool(np.any(offsets))
    div = DivergenceFamily.from_name(family)
    rows = []
    for method in METHODS:
        result = fit(data, ClusterConfig(method, div, len(SIM_CENTERS), seed=init_seed))
        rows.append({
            "family": family, "method": method, "replicate": rep, "seed": rep_seed,
            "ari": ari(data.labels, result.assignments),
            "iterations": result.iterations, "shifted": int(shifted),
        })
    return rows


def simulation_study(
    replicates: int = DEFAULT_REPLICATES,
    seed: int = 0,
    noise_scale: float = dcore.DEFAULT_NOISE_SCALE,
    workers: int = 1,
) -> TableReport:
    """Fit all four centroid methods to freshly generated data of each family.

    Every (family, replicate) cell gets its own derived seed, shared by the
    four methods so they see identical data and initial centroids.
    """
    if replicates < 2:
        raise ValueError("the simulation study needs at least two replicates")
    seeds = derived_seeds(seed, len(SIM_FAMILIES) * replicates)
    jobs = [
        (family, rep, seeds[f * replicates + rep], noise_scale)
        for f, family in enumerate(SIM_FAMILIES)
        for rep in range(replicates)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_simulation_job, jobs, chunksize=8))
    else:
        chunks = [_simulation_job(j) for j in jobs]
    raw = [row for chunk in chunks for row in chunk]
    return aggregate_simulation(raw)


def aggregate_simulation(raw: list[dict]) -> TableReport:
    rows = []
    for method in METHODS:
        for family in SIM_FAMILIES:
            vals = [float(r["ari"]) for r in raw if r["method"] == method and r["family"] == family]
            mean, sd, se = summarize(vals)
            pub = reference.SIMULATION_ARI[method][family]
            rows.append({
                "method": method, "family": family, "mean": mean, "sd": sd, "se": se,
                "replicates": len(vals), "published_mean": pub[0], "published_sd": pub[1],
            })
    header = ["method"] + list(SIM_FAMILIES)
    body = []
    for method in METHODS:
        cells = [r for r in rows if r["method"] == method]
        body.append([method] + [f"{r['mean']:.3f}±{r['sd']:.3f}" for r in cells])
        body.append(["  (published)"] + [f"{r['published_mean']:.3f}±{r['published_sd']:.3f}" for r in cells])
    n_rep = rows[0]["replicates"]
    text = f"ARI mean±sd over {n_rep} replicates\n" + format_table(header, body)
    return TableReport("simulation", rows, raw, text=text)


def write_simulation(report: TableReport, outdir) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "raw": write_rows(report.raw, outdir / "simulation_raw.csv"),
        "table": write_rows(report.rows, outdir / "simulation_table.csv"),
        "text": outdir / "simulation_table.txt",
    }
    paths["text"].write_text(report.text + "\n", encoding="utf-8")
    return paths


# ------------------------------------------------------- improvement study


def load_recipes(path=None) -> dict:
    if path is None:
        text = resources.files("bregclust").joinpath("recipes.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def apply_recipe(data: DataMatrix, recipe: Optional[dict]) -> DataMatrix:
    for step in (recipe or {}).get("steps", []):
        step = dict(step)
        if "range" in step:
            step["range"] = tuple(step["range"])
        data = dcore.preprocess(data, PreprocessSpec(**step))
    return data


def run_baseline(method: str, data: DataMatrix, k: int, seed: int):
    if method == "kmeans":
        return fit(data, ClusterConfig("kmeans", k=k, seed=seed, restarts=STUDY_KMEANS_RESTARTS))
    if method == "agglomerative":
        return agglomerative(data, k)
    if method == "peak":
        return density_peak(data, PeakConfig(k))
    raise ValueError(f"unknown study method {method!r}")


@dataclass
class DatasetOutcome:
    name: str
    prepared: DataMatrix
    improved: DataMatrix
    search: object
    assignments: dict = field(default_factory=dict)


def improvement_study(
    datasets: list,
    seed: int = 0,
    grid: SearchGrid = SearchGrid(),
    recipes: Optional[dict] = None,
    include_slow: bool = False,
    label_column: str = "label",
    workers: int = 1,
    centroid_source: str = "per_candidate",
) -> tuple[TableReport, list[DatasetOutcome]]:
    """Cluster each labelled dataset before and after DBGSA improvement.

    Parameters are tuned once per dataset and reused for all three clusterers.
    """
    recipes = load_recipes() if recipes is None else recipes
    rows, outcomes, notes = [], [], []
    seeds = derived_seeds(seed, len(datasets))
    for path, ds_seed in zip(datasets, seeds):
        data = dcore.load_csv(path, label_column) if not isinstance(path, DataMatrix) else path
        if data.labels is None:
            raise DataError(f"{path}: ground-truth labels are required")
        name = data.name.lower()
        recipe = recipes.get(name)
        if recipe and recipe.get("slow") and not include_slow:
            notes.append(f"skipped slow dataset {name}")
            continue
        prepared = apply_recipe(data, recipe)
        k = len(np.unique(prepared.labels))
        result = search(prepared, grid, k, seed=ds_seed, workers=workers,
                        centroid_source=centroid_source)
        outcome = DatasetOutcome(name, prepared, result.improved_data, result)
        for j, method in enumerate(reference.STUDY_METHODS):
            before = run_baseline(method, prepared, k, ds_seed).assignments
            after = run_baseline(method, result.improved_data, k, ds_seed).assignments
            outcome.assignments[method] = (before, after)
            old, new = nmi(prepared.labels, before), nmi(prepared.labels, after)
            pub = reference.NMI["real"].get(name), reference.NMI["DBGSA"].get(name)
            rows.append({
                "dataset": name, "method": method, "nmi_raw": old, "nmi_dbgsa": new,
                "increment_pct": increment(old, new) if old > 0 else float("nan"),
                "eta": result.best.eta, "K": result.best.K, "d": result.best.d,
                "published_nmi_raw": pub[0][j] if pub[0] else None,
                "published_nmi_dbgsa": pub[1][j] if pub[1] else None,
            })
        outcomes.append(outcome)
    return _improvement_report(rows, notes), outcomes


def _improvement_report(rows: list[dict], notes: list[str]) -> TableReport:
    averages = []
    for method in reference.STUDY_METHODS:
        incs = [r["increment_pct"] for r in rows if r["method"] == method]
        averages.append({"dataset": "average", "method": method,
                         "increment_pct": float(np.mean(incs)) if incs else float("nan")})
    overall = [r["increment_pct"] for r in rows]
    header = ["dataset", "method", "NMI raw", "NMI DBGSA", "incr %", "(eta,K,d)", "published raw->DBGSA"]
    body = []
    for r in rows:
        pub = ("" if r["published_nmi_raw"] is None
               else f"{r['published_nmi_raw']:.3f}->{r['published_nmi_dbgsa']:.3f}")
        body.append([r["dataset"], r["method"], f"{r['nmi_raw']:.3f}", f"{r['nmi_dbgsa']:.3f}",
                     f"{r['increment_pct']:+.1f}", f"({r['eta']:g},{r['K']},{r['d']})", pub])
    for j, a in enumerate(averages):
        pub = reference.AVERAGE_INCREMENT["DBGSA"][j]
        body.append(["average", a["method"], "", "", f"{a['increment_pct']:+.1f}", "", f"{pub:+.1f}"])
    lines = [format_table(header, body), ""]
    cited = _competitor_table(sorted({r["dataset"] for r in rows}))
    if cited:
        lines += ["cited, not reproduced (published competitor NMI / increment %):", cited, ""]
    if overall:
        lines.append(f"measured overall average increment: {np.mean(overall):+.1f}%")
    lines.append("cited, not reproduced (published overall average NMI increment):")
    for src, val in reference.OVERALL_INCREMENT.items():
        lines.append(f"  {src:6s} {val:5.1f}%")
    lines.append("cited per-clusterer averages (kmeans, agglomerative, peak):")
    for src, vals in reference.AVERAGE_INCREMENT.items():
        lines.append(f"  {src:6s} " + ", ".join(f"{v:.1f}%" for v in vals))
    lines += notes
    return TableReport("improvement", rows + averages, rows, notes, "\n".join(lines))


def _competitor_table(names: list[str]) -> str:
    body = []
    for name in names:
        for src in reference.COMPETITORS:
            nmis = reference.NMI[src].get(name)
            if nmis is None:
                continue
            incs = reference.INCREMENT[src][name]
            body.append([name, src] + [f"{v:.3f} ({i:+.1f}%)" for v, i in zip(nmis, incs)])
    if not body:
        return ""
    return format_table(["dataset", "source"] + list(reference.STUDY_METHODS), body)


def write_improvement(report: TableReport, outcomes: list[DatasetOutcome], outdir) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "table": write_rows(report.rows, outdir / "improvement_table.csv"),
        "raw": write_rows(report.raw, outdir / "improvement_raw.csv"),
        "text": outdir / "improvement_table.txt",
    }
    paths["text"].write_text(report.text + "\n", encoding="utf-8")
    for o in outcomes:
        dcore.write_csv(o.improved, outdir / f"{o.name}_improved.csv")
        write_candidates(o.search.all_candidates, outdir / f"{o.name}_candidates.csv")
        before, after = o.assignments["peak"]
        plotdata(o.prepared, before, outdir / f"{o.name}_plot_raw_peak.csv")
        plotdata(o.improved, after, outdir / f"{o.name}_plot_dbgsa_peak.csv")
    return paths


def write_candidates(cands, path) -> Path:
    rows = [{"eta": c.eta, "K": c.K, "d": c.d, "feasible": int(c.feasible),
             "objective": c.objective, "rejection_reason": c.rejection_reason or ""}
            for c in cands]
    return write_rows(rows, path)


# ---------------------------------------------------------------- plot data


def plotdata(data: DataMatrix, assignments=None, out=None) -> DataMatrix:
    """2-D coordinates for external plotting: the data itself when m <= 2,
    otherwise its first two principal components."""
    if data.m > 2:
        coords = dcore.pca(data, 2)[0].values
    elif data.m == 2:
        coords = data.values
    else:
        coords = np.column_stack([data.values[:, 0], np.zeros(data.n)])
    labels = assignments if assignments is not None else data.labels
    plot = DataMatrix(coords, labels, name=data.name, columns=["x", "y"])
    if out is not None:
        dcore.write_csv(plot, out)
    return plot


# ---------------------------------------------------------------- manifests


def write_manifest(path, entries: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for key, value in entries.items():
        text = str(value)
        if "\n" in text:
            raise ValueError(f"manifest value for {key!r} spans lines")
        lines.append(f"{key}={text}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_manifest(path) -> dict:
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DataError(f"{path}: malformed manifest line {line!r}")
        entries[key] = value
    return entries
