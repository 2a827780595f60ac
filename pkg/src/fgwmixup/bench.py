"""Benchmark harness: solver-infeasibility and mixup-efficiency analyses.

The infeasibility run compares the strict and the relaxed solver on random
graph pairs (distance errors and transport-plan differences); the timing run
compares the two mixup modes on identical problems (wall time and outer
iteration counts). Both emit CSV and JSON reports with identical numbers.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .barycenter import MixupProblem, solve_mixup
from .data import Dataset
from .solver import FgwConfig, solve_fgw_relaxed, solve_fgw_strict

__all__ = [
    "PairRecord",
    "InfeasibilityReport",
    "TimingReport",
    "run_infeasibility",
    "run_timing",
    "write_csv",
    "write_json",
]

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "pair_id", "n1", "n2", "fgw_strict", "fgw_relaxed", "abs_err", "rel_err",
    "t_diff", "iters_strict", "iters_relaxed", "time_strict_s", "time_relaxed_s",
]


@dataclass(frozen=True)
class PairRecord:
    """One row of a benchmark report; None fields serialize as empty/null."""

    pair_id: int
    n1: int
    n2: int
    fgw_strict: float
    fgw_relaxed: float
    abs_err: float | None = None
    rel_err: float | None = None
    t_diff: float | None = None
    iters_strict: int | None = None
    iters_relaxed: int | None = None
    time_strict_s: float | None = None
    time_relaxed_s: float | None = None


@dataclass
class InfeasibilityReport:
    """Distance and plan agreement between the strict and relaxed solvers."""

    mae: float
    mape: float
    mean_fgw: float
    mean_fgw_star: float
    t_diff: float
    mae_std: float
    mape_std: float
    t_diff_std: float
    pairs_requested: int
    pairs_failed: int
    mape_excluded: int
    per_pair: list[PairRecord] = field(default_factory=list)

    def summary(self) -> dict:
        out = asdict(self)
        out.pop("per_pair")
        return out


@dataclass
class TimingReport:
    """Wall-time and iteration statistics of the two mixup modes."""

    mean_mixup_time_strict: float
    mean_mixup_time_accel: float
    mean_iter_time_strict: float
    mean_iter_time_accel: float
    mean_outer_iters_strict: float
    mean_outer_iters_accel: float
    speedup_time: float
    speedup_iters: float
    pairs_requested: int
    pairs_failed: int
    per_pair: list[PairRecord] = field(default_factory=list)

    def summary(self) -> dict:
        out = asdict(self)
        out.pop("per_pair")
        return out


def _sample_pairs(rng: np.random.Generator, count: int, size: int) -> list[tuple[int, int]]:
    pairs = []
    for _ in range(count):
        i = int(rng.integers(size))
        j = int(rng.integers(size - 1))
        j += j >= i
        pairs.append((i, j))
    return pairs


def run_infeasibility(
    ds: Dataset,
    pairs: int,
    cfg: FgwConfig,
    seed: int = 0,
    workers: int = 1,
) -> InfeasibilityReport:
    """Solve random pairs with both solvers from identical initialization.

    Pairs with a zero strict distance are excluded from the MAPE mean and
    counted separately. Per-pair wall times are deliberately left empty so
    reports are byte-identical across runs with the same seed.
    """
    rng = np.random.default_rng(seed)
    sampled = _sample_pairs(rng, pairs, len(ds.graphs))

    def solve_pair(task):
        pair_id, (i, j) = task
        g1, g2 = ds.graphs[i], ds.graphs[j]
        try:
            val_s, coup_s, trace_s = solve_fgw_strict(g1, g2, cfg)
            val_r, coup_r, trace_r = solve_fgw_relaxed(g1, g2, cfg)
        except (ValueError, FloatingPointError) as exc:
            logger.warning("pair %d (%d, %d) failed: %s", pair_id, i, j, exc)
            return None
        diff = float(np.linalg.norm(coup_s.plan - coup_r.plan))
        return PairRecord(
            pair_id=pair_id,
            n1=g1.num_nodes,
            n2=g2.num_nodes,
            fgw_strict=val_s,
            fgw_relaxed=val_r,
            abs_err=abs(val_s - val_r),
            rel_err=(abs(val_s - val_r) / val_s) if val_s > 1e-12 else None,
            t_diff=diff / (g1.num_nodes * g2.num_nodes),
            iters_strict=trace_s.iterations_used,
            iters_relaxed=trace_r.iterations_used,
        )

    tasks = list(enumerate(sampled))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_pair, tasks))
    else:
        results = [solve_pair(task) for task in tasks]

    records = [r for r in results if r is not None]
    failed = len(results) - len(records)
    abs_errs = np.array([r.abs_err for r in records]) if records else np.zeros(0)
    rels = np.array([r.rel_err for r in records if r.rel_err is not None])
    diffs = np.array([r.t_diff for r in records]) if records else np.zeros(0)

    def _mean(a):
        return float(a.mean()) if a.size else 0.0

    def _std(a):
        return float(a.std()) if a.size else 0.0

    return InfeasibilityReport(
        mae=_mean(abs_errs),
        mape=_mean(rels),
        mean_fgw=_mean(np.array([r.fgw_strict for r in records])) if records else 0.0,
        mean_fgw_star=_mean(np.array([r.fgw_relaxed for r in records])) if records else 0.0,
        t_diff=_mean(diffs),
        mae_std=_std(abs_errs),
        mape_std=_std(rels),
        t_diff_std=_std(diffs),
        pairs_requested=pairs,
        pairs_failed=failed,
        mape_excluded=len(records) - rels.size,
        per_pair=records,
    )


def run_timing(
    ds: Dataset,
    pairs: int,
    cfg: FgwConfig,
    seed: int = 0,
    beta_k: float = 0.2,
    outer_max_iters: int = 200,
    outer_tol: float = 5e-4,
    workers: int = 1,
) -> TimingReport:
    """Run both mixup modes on identical problems and compare their cost.

    Iteration counts are the primary cross-machine metric; wall times are
    measured with a monotonic clock on the same problems. ``workers``
    defaults to 1 to keep the wall-clock comparison clean.
    """
    rng = np.random.default_rng(seed)
    sampled = _sample_pairs(rng, pairs, len(ds.graphs))
    lams = [float(rng.beta(beta_k, beta_k)) for _ in sampled]

    def run_pair(task):
        pair_id, (i, j), lam = task
        g1, g2 = ds.graphs[i], ds.graphs[j]
        size = max(1, round(lam * g1.num_nodes + (1.0 - lam) * g2.num_nodes))
        problem = MixupProblem(g1, g2, lam, size, cfg=cfg,
                               outer_max_iters=outer_max_iters, outer_tol=outer_tol)
        try:
            start = time.monotonic()
            strict = solve_mixup(problem, accelerated=False)
            mid = time.monotonic()
            accel = solve_mixup(problem, accelerated=True)
            end = time.monotonic()
        except (ValueError, FloatingPointError) as exc:
            logger.warning("mixup pair %d (%d, %d) failed: %s", pair_id, i, j, exc)
            return None
        return (
            PairRecord(
                pair_id=pair_id,
                n1=g1.num_nodes,
                n2=g2.num_nodes,
                fgw_strict=strict.objective_trace[-1],
                fgw_relaxed=accel.objective_trace[-1],
                iters_strict=strict.outer_iterations,
                iters_relaxed=accel.outer_iterations,
                time_strict_s=mid - start,
                time_relaxed_s=end - mid,
            ),
            strict.inner_iterations,
            accel.inner_iterations,
        )

    tasks = [(idx, pair, lam) for idx, (pair, lam) in enumerate(zip(sampled, lams))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_pair, tasks))
    else:
        results = [run_pair(task) for task in tasks]

    kept = [r for r in results if r is not None]
    records = [r[0] for r in kept]
    failed = len(results) - len(kept)
    strict_times = np.array([r.time_strict_s for r in records])
    accel_times = np.array([r.time_relaxed_s for r in records])
    strict_inner = sum(k[1] for k in kept)
    accel_inner = sum(k[2] for k in kept)
    strict_iters = np.array([r.iters_strict for r in records], dtype=float)
    accel_iters = np.array([r.iters_relaxed for r in records], dtype=float)

    mean_time_s = float(strict_times.mean()) if records else 0.0
    mean_time_a = float(accel_times.mean()) if records else 0.0
    return TimingReport(
        mean_mixup_time_strict=mean_time_s,
        mean_mixup_time_accel=mean_time_a,
        mean_iter_time_strict=float(strict_times.sum() / strict_inner) if strict_inner else 0.0,
        mean_iter_time_accel=float(accel_times.sum() / accel_inner) if accel_inner else 0.0,
        mean_outer_iters_strict=float(strict_iters.mean()) if records else 0.0,
        mean_outer_iters_accel=float(accel_iters.mean()) if records else 0.0,
        speedup_time=mean_time_s / mean_time_a if mean_time_a > 0 else 0.0,
        speedup_iters=(
            float(strict_iters.mean() / accel_iters.mean())
            if records and accel_iters.mean() > 0 else 0.0
        ),
        pairs_requested=pairs,
        pairs_failed=failed,
        per_pair=records,
    )


def _cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_csv(records: list[PairRecord], path) -> None:
    """Write per-pair rows under the shared benchmark column schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            row = asdict(rec)
            writer.writerow([_cell(row[col]) for col in CSV_COLUMNS])


def write_json(report, path) -> None:
    """Write the summary and per-pair rows with the same numbers as the CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "summary": report.summary(),
        "per_pair": [asdict(rec) for rec in report.per_pair],
    }
    with path.open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
