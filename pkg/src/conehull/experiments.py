"""Replicated estimation experiments: Table-1 style error grids, convergence
rates and boundary ratios, with CSV/JSON reports.

Every replication owns a seed derived from (master seed, cell index, run
index), so results do not depend on how runs are spread over threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from importlib import metadata
from pathlib import Path

import numpy as np

from . import eraser
from .geometry import Frame, derived_params
from .metrics import (
    GridSpec,
    boundary_hausdorff_masks,
    dists_to_point_set,
    hausdorff_masks,
    measure_diff_mc,
)
from .shapes import Shape, sample_uniform, shape_by_name

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "shape", "estimator", "n", "rho", "h", "r", "N", "runs",
    "mean_error", "sd_error", "mean_runtime_ms", "early_stops",
)
RAW_COLUMNS = ("cell", "run", "error", "runtime_ms", "early_stopped", "attempts", "erasures", "failed")
METRICS = ("measure", "hausdorff", "boundary")

RHO0 = 2.0 * math.atan(1.0 / 3.0)


def version_text() -> str:
    try:
        return f"conehull {metadata.version('artifact')}"
    except metadata.PackageNotFoundError:
        return "conehull 0+unknown"


@dataclass(frozen=True)
class CellSpec:
    """One parameter cell. ``rho``/``h`` apply to the cone eraser, ``r`` to the
    ball eraser; unused fields stay ``None``."""

    shape: str
    estimator: str
    n: int
    N: int
    runs: int
    rho: float | None = None
    h: float | None = None
    r: float | None = None
    mode: str = eraser.EraseMode.EXTENDED.value

    def __post_init__(self):
        if self.estimator not in ("cone", "ball"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        if self.estimator == "cone" and (self.rho is None or self.h is None):
            raise ValueError("cone cells need rho and h")
        if self.estimator == "ball" and self.r is None:
            raise ValueError("ball cells need r")
        if self.runs < 1 or self.n < 1 or self.N < 1:
            raise ValueError("n, N and runs must be positive")


@dataclass(frozen=True)
class RunRecord:
    cell: int
    run: int
    error: float
    runtime_ms: float
    early_stopped: bool
    attempts: int
    erasures: int
    failed: bool = False


@dataclass
class CellResult:
    spec: CellSpec
    records: list[RunRecord]

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.error for r in self.records if not r.failed], dtype=float)

    @property
    def mean_error(self) -> float:
        e = self.errors
        return float(e.mean()) if e.size else math.nan

    @property
    def sd_error(self) -> float:
        e = self.errors
        return float(e.std(ddof=1)) if e.size > 1 else 0.0

    @property
    def standard_error(self) -> float:
        e = self.errors
        return self.sd_error / math.sqrt(e.size) if e.size else math.nan

    @property
    def mean_runtime_ms(self) -> float:
        return float(np.mean([r.runtime_ms for r in self.records]))

    @property
    def early_stops(self) -> int:
        return sum(r.early_stopped for r in self.records)

    @property
    def failures(self) -> int:
        return sum(r.failed for r in self.records)


@dataclass
class ExperimentReport:
    metric: str
    seed: int
    mc_budget: int
    cells: list[CellResult]
    version: str = field(default_factory=version_text)
    grid_resolution: int | None = None


def run_seed(seed: int, cell: int, run: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((seed, cell, run))


def _estimate(spec: CellSpec, sample: np.ndarray, frame: Frame, rng: np.random.Generator):
    if spec.estimator == "ball":
        return eraser.run_ball_eraser(sample, frame, spec.r, spec.N, rng=rng)
    cfg = eraser.EraserConfig(rho=spec.rho, h=spec.h, target_erasures=spec.N, erase_mode=spec.mode)
    return eraser.run(sample, frame, cfg, rng=rng)


def sample_hausdorff_grid(sample: np.ndarray, shape_mask: np.ndarray, grid: GridSpec) -> float:
    """Grid estimate of d_H(sample, S) for a sample inside S: the largest
    distance from an S cell centre to the nearest sample point."""
    centres = grid.centres()[shape_mask.ravel()]
    return float(dists_to_point_set(centres, sample).max())


def evaluate(
    metric: str,
    region,
    shape: Shape,
    sample: np.ndarray,
    frame: Frame,
    rng: np.random.Generator,
    mc_budget: int,
    grid_resolution: int,
    shape_mask: np.ndarray | None = None,
) -> float:
    if metric == "measure":
        return measure_diff_mc(region, shape, frame, mc_budget, rng).value
    grid = GridSpec(frame, grid_resolution)
    if shape_mask is None:
        shape_mask = grid.classify(shape)
    est_mask = grid.classify(region)
    if metric == "hausdorff":
        return hausdorff_masks(est_mask, shape_mask, grid)
    if metric == "boundary":
        return boundary_hausdorff_masks(est_mask, shape_mask, grid) / sample_hausdorff_grid(
            sample, shape_mask, grid
        )
    raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")


def run_one(
    spec: CellSpec,
    cell: int,
    run: int,
    seed: int,
    metric: str = "measure",
    mc_budget: int = 4000,
    frame: Frame | None = None,
    grid_resolution: int = 512,
    shape: Shape | None = None,
    shape_mask: np.ndarray | None = None,
) -> RunRecord:
    s_sample, s_erase, s_metric = run_seed(seed, cell, run).spawn(3)
    if shape is None:
        shape = shape_by_name(spec.shape, rng=np.random.default_rng(seed))
    frame = frame if frame is not None else shape.bounding_box
    t0 = time.perf_counter()
    try:
        sample = sample_uniform(shape, spec.n, np.random.default_rng(s_sample))
        region = _estimate(spec, sample, frame, np.random.default_rng(s_erase))
        runtime = 1e3 * (time.perf_counter() - t0)
        err = evaluate(
            metric, region, shape, sample, frame, np.random.default_rng(s_metric),
            mc_budget, grid_resolution, shape_mask,
        )
    except (ValueError, RuntimeError):
        return RunRecord(cell, run, math.nan, 1e3 * (time.perf_counter() - t0), False, 0, 0, True)
    return RunRecord(cell, run, float(err), runtime, region.early_stopped, region.attempts, region.erasures)


def run_cells(
    specs: list[CellSpec],
    seed: int,
    metric: str = "measure",
    mc_budget: int = 4000,
    frame: Frame | None = None,
    grid_resolution: int = 512,
    threads: int = 1,
    progress=None,
) -> ExperimentReport:
    """Run every replication of every cell; ``progress`` gets each finished cell."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    shapes: dict[str, Shape] = {}
    masks: dict[str, np.ndarray] = {}
    results = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for ci, spec in enumerate(specs):
            if spec.shape not in shapes:
                shapes[spec.shape] = shape_by_name(spec.shape, rng=np.random.default_rng(seed))
            shape = shapes[spec.shape]
            fr = frame if frame is not None else shape.bounding_box
            mask = None
            if metric != "measure":
                if spec.shape not in masks:
                    masks[spec.shape] = GridSpec(fr, grid_resolution).classify(shape)
                mask = masks[spec.shape]
            kw = dict(metric=metric, mc_budget=mc_budget, frame=fr, grid_resolution=grid_resolution,
                      shape=shape, shape_mask=mask)
            if pool is None:
                records = [run_one(spec, ci, k, seed, **kw) for k in range(spec.runs)]
            else:
                records = list(pool.map(lambda k: run_one(spec, ci, k, seed, **kw), range(spec.runs)))
            res = CellResult(spec, records)
            results.append(res)
            if progress is not None:
                progress(res)
    finally:
        if pool is not None:
            pool.shutdown()
    return ExperimentReport(
        metric=metric, seed=seed, mc_budget=mc_budget, cells=results,
        grid_resolution=None if metric == "measure" else grid_resolution,
    )


def table_one_specs(
    n_list=(200, 400, 600, 800, 1000, 1200), runs: int = 100, N: int = 200,
    mode: str = eraser.EraseMode.EXTENDED.value,
) -> list[CellSpec]:
    """Four columns per sample size: cones (rho0, 1/3) and (pi/5, 1/2), balls
    of radius 1/4 and 1/6, all on the Table 1 set."""
    specs = []
    for n in n_list:
        specs += [
            CellSpec("S1", "cone", n, N, runs, rho=RHO0, h=1 / 3, mode=mode),
            CellSpec("S1", "cone", n, N, runs, rho=math.pi / 5, h=0.5, mode=mode),
            CellSpec("S1", "ball", n, N, runs, r=0.25),
            CellSpec("S1", "ball", n, N, runs, r=1 / 6),
        ]
    return specs


def rate_specs(
    shape: str, rho: float, h: float, n_list, runs: int,
    N: int | None = None, N_factor: float | None = None,
    mode: str = eraser.EraseMode.EXTENDED.value,
) -> list[CellSpec]:
    """Cone cells over ``n_list`` with either a fixed ``N`` or N = ceil(N_factor * n)."""
    if (N is None) == (N_factor is None):
        raise ValueError("give exactly one of N and N_factor")
    return [
        CellSpec(shape, "cone", n, N if N is not None else math.ceil(N_factor * n), runs,
                 rho=rho, h=h, mode=mode)
        for n in n_list
    ]


@dataclass(frozen=True)
class RateFit:
    sample_sizes: list[int]
    mean_errors: list[float]
    slope: float
    intercept: float
    r2: float
    regressor: str = "log n"


def fit_rate(sample_sizes, mean_errors, regressor: str = "log n") -> RateFit:
    """OLS of log(mean error) on log n, or on log(log n / n)."""
    n = np.asarray(sample_sizes, dtype=float)
    e = np.asarray(mean_errors, dtype=float)
    if n.size != e.size or n.size < 3:
        raise ValueError("need at least three (n, error) pairs of equal length")
    if np.any(e <= 0):
        raise ValueError("mean errors must be positive")
    if regressor == "log n":
        x = np.log(n)
    elif regressor == "log(log n / n)":
        x = np.log(np.log(n) / n)
    else:
        raise ValueError(f"unknown regressor {regressor!r}")
    y = np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit([int(v) for v in n], [float(v) for v in e], float(slope), float(intercept), r2, regressor)


def regressor_for(metric: str) -> str:
    return "log(log n / n)" if metric == "hausdorff" else "log n"


def pooled_gap(a: CellResult, b: CellResult) -> float:
    """(mean a - mean b) in units of the pooled standard error."""
    diff = a.mean_error - b.mean_error
    se = math.hypot(a.standard_error, b.standard_error)
    if se > 0:
        return diff / se
    return math.copysign(math.inf, diff) if diff != 0 else 0.0


# Reports


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _cell_row(res: CellResult, timing: bool) -> dict:
    s = res.spec
    return {
        "shape": s.shape, "estimator": s.estimator, "n": s.n, "rho": s.rho, "h": s.h, "r": s.r,
        "N": s.N, "runs": s.runs, "mean_error": res.mean_error, "sd_error": res.sd_error,
        "mean_runtime_ms": res.mean_runtime_ms if timing else 0.0, "early_stops": res.early_stops,
    }


def report_csv(report: ExperimentReport, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for res in report.cells:
        row = _cell_row(res, timing)
        w.writerow([row[c] if isinstance(row[c], str) else _num(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def raw_csv(report: ExperimentReport, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RAW_COLUMNS)
    for res in report.cells:
        for r in res.records:
            d = asdict(r)
            if not timing:
                d["runtime_ms"] = 0.0
            w.writerow([_num(d[c]) for c in RAW_COLUMNS])
    return buf.getvalue()


def report_dict(report: ExperimentReport, timing: bool = True, fit: RateFit | None = None) -> dict:
    cells = []
    for res in report.cells:
        row = _cell_row(res, timing)
        row["mode"] = res.spec.mode if res.spec.estimator == "cone" else None
        row["failures"] = res.failures
        cells.append(row)
    d = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "version": report.version,
        "metric": report.metric,
        "seed": report.seed,
        "mc_budget": report.mc_budget,
        "grid_resolution": report.grid_resolution,
        "cells": cells,
    }
    if fit is not None:
        d["fit"] = asdict(fit)
    return d


_REPORT_KEYS = {"schema_version", "version", "metric", "seed", "mc_budget", "grid_resolution", "cells", "fit"}
_CELL_KEYS = set(CSV_COLUMNS) | {"mode", "failures"}
_FIT_KEYS = {f.name for f in fields(RateFit)}


def read_report(text: str) -> dict:
    """Parse and validate a JSON report; unknown fields are rejected."""
    d = json.loads(text)
    if not isinstance(d, dict):
        raise ValueError("report must be a JSON object")
    unknown = set(d) - _REPORT_KEYS
    if unknown:
        raise ValueError(f"unknown report fields {sorted(unknown)}")
    if d.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {d.get('schema_version')!r}")
    for cell in d.get("cells", []):
        bad = set(cell) - _CELL_KEYS
        if bad:
            raise ValueError(f"unknown cell fields {sorted(bad)}")
        if cell["runs"] < 1 or cell["sd_error"] < 0:
            raise ValueError("cell must have runs >= 1 and sd_error >= 0")
    if "fit" in d and d["fit"] is not None:
        bad = set(d["fit"]) - _FIT_KEYS
        if bad:
            raise ValueError(f"unknown fit fields {sorted(bad)}")
    return d


def write_report(prefix, report: ExperimentReport, timing: bool = True, fit: RateFit | None = None) -> list[Path]:
    """Write ``<prefix>.csv``, ``<prefix>.runs.csv`` and ``<prefix>.json``."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = [Path(f"{prefix}.csv"), Path(f"{prefix}.runs.csv"), Path(f"{prefix}.json")]
    paths[0].write_text(report_csv(report, timing), encoding="utf-8")
    paths[1].write_text(raw_csv(report, timing), encoding="utf-8")
    paths[2].write_text(
        json.dumps(report_dict(report, timing, fit), indent=2, allow_nan=True) + "\n", encoding="utf-8"
    )
    return paths


def boundary_constant(rho: float, h: float) -> float:
    return derived_params(rho, h).k_const


__all__ = [
    "CellSpec", "CellResult", "ExperimentReport", "RateFit", "RunRecord",
    "fit_rate", "pooled_gap", "rate_specs", "read_report", "run_cells", "run_one",
    "table_one_specs", "write_report",
]
