"""Dataset augmentation: class-pair sampling, mixup, discretization, labels.

New samples are synthesized for every unordered pair of classes so that the
total count is approximately ``mixup_ratio`` times the training-set size.
Each job draws one graph per class, a Beta-distributed mixing weight and a
target size, solves the barycenter, thresholds its structure back to a
binary adjacency and soft-mixes the class labels.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .barycenter import MixupProblem, solve_mixup
from .graphs import Graph, uniform_measure
from .solver import FgwConfig
from .validation import check_symmetric

__all__ = [
    "AugmentConfig",
    "SoftLabeledGraph",
    "MixupJob",
    "sample_lambda",
    "choose_size",
    "discretize_adjacency",
    "mix_labels",
    "plan_jobs",
    "augment_dataset",
    "FGWMixupAugmenter",
]

logger = logging.getLogger(__name__)

SIZE_POLICIES = ("adaptive", "fixed_median", "half_median", "double_median")


@dataclass(frozen=True)
class AugmentConfig:
    """Pipeline settings; solver fields are embedded as an FgwConfig."""

    beta_k: float = 0.2
    mixup_ratio: float = 0.25
    alpha: float = 0.95
    size_policy: str = "adaptive"
    accelerated: bool = False
    seed: int = 0
    gamma: float = 1.0
    q: float = 2.0
    max_inner_iters: int = 300
    inner_tol: float = 5e-4
    outer_max_iters: int = 200
    outer_tol: float = 5e-4
    threshold_grid: int = 101
    density_weighting: str = "lambda"  # or "uniform"
    workers: int = 1

    def __post_init__(self):
        if self.beta_k <= 0:
            raise ValueError("beta_k must be positive")
        if self.mixup_ratio < 0:
            raise ValueError("mixup_ratio must be nonnegative")
        if self.size_policy not in SIZE_POLICIES:
            raise ValueError(f"size_policy must be one of {SIZE_POLICIES}")
        if self.density_weighting not in ("lambda", "uniform"):
            raise ValueError("density_weighting must be 'lambda' or 'uniform'")

    def solver_config(self) -> FgwConfig:
        return FgwConfig(
            alpha=self.alpha,
            q=self.q,
            gamma=self.gamma,
            max_inner_iters=self.max_inner_iters,
            inner_tol=self.inner_tol,
        )


@dataclass(frozen=True)
class SoftLabeledGraph:
    """A graph with a probability distribution over class labels."""

    graph: Graph
    label_distribution: np.ndarray

    def __post_init__(self):
        dist = np.asarray(self.label_distribution, dtype=float)
        if dist.ndim != 1 or dist.size == 0:
            raise ValueError("label_distribution must be a nonempty vector")
        if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-9:
            raise ValueError("label_distribution must be a probability vector")
        object.__setattr__(self, "label_distribution", dist)

    @property
    def hard_label(self) -> int:
        """Argmax of the distribution, ties resolved to the lower index."""
        return int(np.argmax(self.label_distribution))


@dataclass(frozen=True)
class MixupJob:
    """Pre-drawn parameters of one mixup, fixed before dispatch."""

    index: int
    class_a: int
    class_b: int
    graph_a: int  # indices into the training list
    graph_b: int
    lam: float
    target_size: int


def sample_lambda(beta_k: float, rng: np.random.Generator) -> float:
    """Draw a mixing weight from Beta(k, k)."""
    if beta_k <= 0:
        raise ValueError("beta_k must be positive")
    return float(rng.beta(beta_k, beta_k))


def choose_size(lam: float, n1: int, n2: int, policy: str = "adaptive",
                median: int | None = None) -> int:
    """Target node count for a mixup graph (rounded, floored at 1)."""
    if n1 < 1 or n2 < 1:
        raise ValueError("source sizes must be at least 1")
    if policy == "adaptive":
        raw = lam * n1 + (1.0 - lam) * n2
    else:
        if median is None:
            raise ValueError(f"policy {policy!r} requires the training median size")
        if policy == "fixed_median":
            raw = float(median)
        elif policy == "half_median":
            raw = 0.5 * median
        elif policy == "double_median":
            raw = 2.0 * median
        else:
            raise ValueError(f"unknown size policy {policy!r}")
    return max(1, int(math.floor(raw + 0.5)))


def discretize_adjacency(
    A_cont,
    dens1: float,
    dens2: float,
    lam: float,
    grid: int = 101,
) -> tuple[np.ndarray, float]:
    """Threshold a continuous structure matrix to a binary adjacency.

    Scans ``grid`` equally spaced thresholds between the smallest and largest
    entry; an entry becomes 1 when it is >= the threshold (diagonal forced to
    zero). Returns the binary matrix and the threshold minimizing the
    weighted off-diagonal density gap
    lam * |density - dens1| + (1 - lam) * |density - dens2|,
    ties broken toward the smallest threshold.
    """
    A = check_symmetric(A_cont, "A_cont")
    n = A.shape[0]
    lo, hi = float(A.min()), float(A.max())
    if lo == hi:
        # Constant matrix: only the all-ones and all-zeros candidates exist.
        thresholds = np.array([lo, np.nextafter(lo, np.inf)])
    else:
        thresholds = np.linspace(lo, hi, grid)

    off_mask = ~np.eye(n, dtype=bool)
    denom = max(n * (n - 1), 1)
    best_theta, best_gap, best_matrix = None, np.inf, None
    for theta in thresholds:
        binary = (A >= theta).astype(float)
        np.fill_diagonal(binary, 0.0)
        density = float(binary[off_mask].sum()) / denom if n > 1 else 0.0
        gap = lam * abs(density - dens1) + (1.0 - lam) * abs(density - dens2)
        if gap < best_gap:
            best_theta, best_gap, best_matrix = float(theta), gap, binary
    return best_matrix, best_theta


def mix_labels(y1: int, y2: int, lam: float, num_classes: int) -> np.ndarray:
    """Convex combination of two one-hot class labels."""
    if not (0 <= y1 < num_classes and 0 <= y2 < num_classes):
        raise ValueError("class index out of range")
    out = np.zeros(num_classes)
    out[y1] += lam
    out[y2] += 1.0 - lam
    return out


def _class_indices(train: list[Graph]) -> dict[int, list[int]]:
    by_class: dict[int, list[int]] = {}
    for idx, g in enumerate(train):
        if g.label is None:
            raise ValueError(f"graph {idx} has no class label")
        by_class.setdefault(int(g.label), []).append(idx)
    return by_class


def plan_jobs(train: list[Graph], cfg: AugmentConfig) -> list[MixupJob]:
    """Draw every job's sources, weight and size from the master seed.

    All randomness is consumed here, in a fixed order, so the subsequent
    solves can run on any worker pool without affecting the output.
    """
    by_class = _class_indices(train)
    classes = sorted(by_class)
    if len(classes) < 2:
        raise ValueError("augmentation needs at least two classes")
    n_total = len(train)
    n_classes = len(classes)
    per_pair = math.ceil(2.0 * cfg.mixup_ratio * n_total / (n_classes * (n_classes - 1)))
    if cfg.mixup_ratio == 0:
        per_pair = 0
    median = int(np.median([g.num_nodes for g in train]))

    rng = np.random.default_rng(cfg.seed)
    jobs: list[MixupJob] = []
    for class_a, class_b in combinations(classes, 2):
        pool_a, pool_b = by_class[class_a], by_class[class_b]
        for _ in range(per_pair):
            idx_a = pool_a[int(rng.integers(len(pool_a)))]
            idx_b = pool_b[int(rng.integers(len(pool_b)))]
            lam = sample_lambda(cfg.beta_k, rng)
            size = choose_size(
                lam, train[idx_a].num_nodes, train[idx_b].num_nodes,
                cfg.size_policy, median,
            )
            jobs.append(MixupJob(len(jobs), class_a, class_b, idx_a, idx_b, lam, size))
    return jobs


def _run_job(job: MixupJob, train: list[Graph], cfg: AugmentConfig,
             num_classes: int) -> SoftLabeledGraph | None:
    ga, gb = train[job.graph_a], train[job.graph_b]
    problem = MixupProblem(
        ga, gb, job.lam, job.target_size,
        cfg=cfg.solver_config(),
        outer_max_iters=cfg.outer_max_iters,
        outer_tol=cfg.outer_tol,
    )
    try:
        result = solve_mixup(problem, accelerated=cfg.accelerated)
        dens_lam = job.lam if cfg.density_weighting == "lambda" else 0.5
        binary, _ = discretize_adjacency(
            result.graph.structure, ga.edge_density(), gb.edge_density(),
            dens_lam, cfg.threshold_grid,
        )
        labels = mix_labels(int(ga.label), int(gb.label), job.lam, num_classes)
        graph = Graph(
            uniform_measure(job.target_size),
            result.graph.features,
            binary,
            label=int(np.argmax(labels)),
        )
        return SoftLabeledGraph(graph, labels)
    except (ValueError, FloatingPointError) as exc:
        logger.warning("mixup job %d (%d x %d) failed: %s",
                       job.index, job.graph_a, job.graph_b, exc)
        return None


def augment_dataset(
    train: list[Graph],
    cfg: AugmentConfig,
    num_classes: int | None = None,
) -> list[SoftLabeledGraph]:
    """Return the training graphs plus the synthesized mixups.

    Original graphs come first (with one-hot label distributions), followed
    by the mixups in job order. Failed jobs are logged and skipped. The
    output is a deterministic function of the inputs and the seed.
    """
    by_class = _class_indices(train)
    if num_classes is None:
        num_classes = max(by_class) + 1
    jobs = plan_jobs(train, cfg) if cfg.mixup_ratio > 0 else []

    originals = [
        SoftLabeledGraph(g, mix_labels(int(g.label), int(g.label), 1.0, num_classes))
        for g in train
    ]
    if not jobs:
        return originals

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            produced = list(pool.map(
                lambda job: _run_job(job, train, cfg, num_classes), jobs
            ))
    else:
        produced = [_run_job(job, train, cfg, num_classes) for job in jobs]
    return originals + [item for item in produced if item is not None]


class FGWMixupAugmenter(BaseEstimator, TransformerMixin):
    """Scikit-learn style facade over the augmentation pipeline.

    ``fit`` records the classes present; ``transform`` returns the input
    graphs followed by the synthesized mixups as
    :class:`SoftLabeledGraph` instances.
    """

    def __init__(self, beta_k: float = 0.2, mixup_ratio: float = 0.25,
                 alpha: float = 0.95, size_policy: str = "adaptive",
                 accelerated: bool = False, seed: int = 0, gamma: float = 1.0,
                 workers: int = 1):
        self.beta_k = beta_k
        self.mixup_ratio = mixup_ratio
        self.alpha = alpha
        self.size_policy = size_policy
        self.accelerated = accelerated
        self.seed = seed
        self.gamma = gamma
        self.workers = workers

    def _config(self) -> AugmentConfig:
        return AugmentConfig(
            beta_k=self.beta_k,
            mixup_ratio=self.mixup_ratio,
            alpha=self.alpha,
            size_policy=self.size_policy,
            accelerated=self.accelerated,
            seed=self.seed,
            gamma=self.gamma,
            workers=self.workers,
        )

    def fit(self, X: list[Graph], y=None):
        graphs = self._with_labels(X, y)
        self.classes_ = sorted(_class_indices(graphs))
        self.n_features_in_ = graphs[0].feature_dim if graphs else 0
        return self

    def transform(self, X: list[Graph], y=None) -> list[SoftLabeledGraph]:
        graphs = self._with_labels(X, y)
        return augment_dataset(graphs, self._config())

    @staticmethod
    def _with_labels(X: list[Graph], y) -> list[Graph]:
        if y is None:
            return list(X)
        if len(y) != len(X):
            raise ValueError("y must have one label per graph")
        return [g.with_label(int(label)) for g, label in zip(X, y)]
