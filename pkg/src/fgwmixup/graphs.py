"""Attributed-graph data model: node measures, features and structure matrices.

A graph is a triple of a node probability measure, a node feature matrix and
a symmetric structure matrix (binary adjacency by default, but any symmetric
real matrix such as a shortest-path matrix is accepted).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_readonly, check_matrix, check_probability_vector, check_symmetric

__all__ = [
    "Graph",
    "build_graph",
    "uniform_measure",
    "degree_measure",
    "feature_distance_matrix",
    "remove_isolated_nodes",
    "degree_feature_augmentation",
]


@dataclass(frozen=True)
class Graph:
    """An attributed graph: (measure, features, structure, optional label).

    Invariants enforced at construction: the measure is a probability vector
    (sum within 1e-12 of 1 after ingestion renormalization), the structure is
    exactly symmetric, and all dimensions agree. Arrays are stored read-only
    so instances can be shared across workers.
    """

    mu: np.ndarray
    features: np.ndarray
    structure: np.ndarray
    label: int | None = None
    _size: int = field(init=False, repr=False, default=0)

    def __post_init__(self):
        mu = check_probability_vector(self.mu)
        features = check_matrix(self.features, "features")
        structure = check_symmetric(self.structure, "structure")
        n = mu.shape[0]
        if features.shape[0] != n:
            raise ValueError(
                f"features have {features.shape[0]} rows for {n} nodes"
            )
        if structure.shape[0] != n:
            raise ValueError(
                f"structure is {structure.shape[0]}x{structure.shape[1]} for {n} nodes"
            )
        object.__setattr__(self, "mu", as_readonly(mu))
        object.__setattr__(self, "features", as_readonly(features))
        object.__setattr__(self, "structure", as_readonly(structure))
        object.__setattr__(self, "_size", n)

    @property
    def num_nodes(self) -> int:
        return self._size

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def degrees(self) -> np.ndarray:
        """Row sums of the structure matrix (node degrees for binary adjacency)."""
        return self.structure.sum(axis=1)

    def edge_density(self) -> float:
        """Fraction of nonzero off-diagonal structure entries."""
        n = self.num_nodes
        if n < 2:
            return 0.0
        off = self.structure != 0
        np.fill_diagonal(off, False)
        return float(off.sum()) / (n * (n - 1))

    def with_label(self, label: int | None) -> "Graph":
        return Graph(self.mu, self.features, self.structure, label)


def build_graph(mu, features, structure, label: int | None = None) -> Graph:
    """Validate and assemble a :class:`Graph` from raw arrays."""
    return Graph(mu, features, structure, label)


def uniform_measure(n: int) -> np.ndarray:
    """Uniform node measure: n entries each equal to 1/n."""
    if n < 1:
        raise ValueError("graph must have at least one node")
    mu = np.full(n, 1.0 / n)
    total = mu.sum()
    if total != 1.0:
        mu = mu / total
    return mu


def degree_measure(structure) -> np.ndarray:
    """Degree-proportional node measure: deg(i) / sum of degrees."""
    arr = check_symmetric(structure)
    degrees = arr.sum(axis=1)
    total = degrees.sum()
    if total <= 0:
        raise ValueError("degree measure undefined: structure has no edges")
    return degrees / total


def feature_distance_matrix(g1: Graph, g2: Graph, q: float = 2.0) -> np.ndarray:
    """Pairwise feature cost matrix with entries ||x1_i - x2_j||_2 ** q."""
    if g1.feature_dim != g2.feature_dim:
        raise ValueError(
            f"feature dimensions differ: {g1.feature_dim} vs {g2.feature_dim}"
        )
    X1, X2 = g1.features, g2.features
    # ||x - y||^2 = ||x||^2 + ||y||^2 - 2<x, y>, clipped against roundoff
    sq = (
        np.sum(X1 * X1, axis=1)[:, None]
        + np.sum(X2 * X2, axis=1)[None, :]
        - 2.0 * (X1 @ X2.T)
    )
    np.maximum(sq, 0.0, out=sq)
    if q == 2.0:
        return sq
    return sq ** (q / 2.0)


def remove_isolated_nodes(g: Graph) -> Graph:
    """Drop nodes with no incident structure and renormalize the measure.

    The measure is renormalized over the surviving nodes, which preserves
    both uniform and degree-proportional constructions.
    """
    incident = np.abs(g.structure).sum(axis=1) > 0
    if np.all(incident):
        return g
    if not np.any(incident):
        raise ValueError("all nodes are isolated; removal would empty the graph")
    mu = g.mu[incident]
    total = mu.sum()
    if total <= 0:
        raise ValueError("surviving nodes carry no measure")
    return Graph(
        mu / total,
        g.features[incident],
        g.structure[np.ix_(incident, incident)],
        g.label,
    )


def degree_feature_augmentation(g: Graph, max_degree: int = 64, force: bool = False) -> Graph:
    """Replace features with one-hot degree encodings of width max_degree + 1.

    Degrees above the cap clamp to the last bucket. Refuses to overwrite
    existing features unless ``force`` is set.
    """
    if g.feature_dim > 0 and not force:
        raise ValueError("graph already has features; pass force=True to overwrite")
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    degrees = np.rint(g.degrees()).astype(int)
    buckets = np.clip(degrees, 0, max_degree)
    features = np.zeros((g.num_nodes, max_degree + 1))
    features[np.arange(g.num_nodes), buckets] = 1.0
    return Graph(g.mu, features, g.structure, g.label)
