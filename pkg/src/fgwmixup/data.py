"""Loading and saving graph corpora in the TUDataset text layout and JSONL.

The TUDataset layout stores one corpus as plain text files sharing a name
prefix: ``DS_A.txt`` (comma-separated edge pairs with 1-indexed global node
ids), ``DS_graph_indicator.txt`` (the graph id of every node, one per line),
``DS_graph_labels.txt`` (one class per graph) and optionally
``DS_node_labels.txt`` / ``DS_node_attributes.txt``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .augment import SoftLabeledGraph, mix_labels
from .graphs import Graph, degree_feature_augmentation, remove_isolated_nodes, uniform_measure

__all__ = ["Dataset", "load_tudataset", "save_dataset"]

FEATURE_KINDS = ("node_attributes", "node_labels_onehot", "degree_onehot")


@dataclass(frozen=True)
class Dataset:
    """A named list of labeled graphs with a shared feature convention."""

    graphs: list[Graph]
    name: str
    class_count: int
    feature_kind: str

    def __post_init__(self):
        if self.feature_kind not in FEATURE_KINDS:
            raise ValueError(f"feature_kind must be one of {FEATURE_KINDS}")
        dims = {g.feature_dim for g in self.graphs}
        if len(dims) > 1:
            raise ValueError(f"graphs disagree on feature dimension: {sorted(dims)}")
        for g in self.graphs:
            if g.label is None or not 0 <= g.label < self.class_count:
                raise ValueError("every graph needs a label in [0, class_count)")

    def __len__(self) -> int:
        return len(self.graphs)


def _read_int_lines(path: Path) -> list[int]:
    with path.open() as fh:
        return [int(line.strip()) for line in fh if line.strip()]


def _read_csv_lines(path: Path) -> list[list[float]]:
    rows = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    return rows


def load_tudataset(directory, name: str, degree_cap: int = 64) -> Dataset:
    """Parse one TUDataset-format corpus from ``directory``.

    Graph labels are remapped to contiguous 0-based indices. Node labels are
    one-hot encoded when real-valued attributes are absent; when neither file
    exists, one-hot degree features (capped at ``degree_cap``) are attached.
    Isolated nodes are removed and each adjacency is symmetrized regardless
    of whether the edge file lists undirected edges once or twice.
    """
    base = Path(directory) / name
    edges_path = base / f"{name}_A.txt"
    indicator_path = base / f"{name}_graph_indicator.txt"
    labels_path = base / f"{name}_graph_labels.txt"
    for required in (edges_path, indicator_path, labels_path):
        if not required.exists():
            raise FileNotFoundError(f"missing dataset file: {required}")

    indicator = _read_int_lines(indicator_path)
    raw_labels = _read_int_lines(labels_path)
    num_nodes = len(indicator)
    num_graphs = len(raw_labels)
    if num_graphs == 0:
        raise ValueError(f"dataset {name} declares no graphs")

    # Global node id -> (graph index, local node index), both 0-based.
    graph_of = np.asarray(indicator, dtype=int) - 1
    if graph_of.min() < 0 or graph_of.max() >= num_graphs:
        raise ValueError("graph indicator references an unknown graph")
    local_index = np.zeros(num_nodes, dtype=int)
    sizes = np.zeros(num_graphs, dtype=int)
    for node in range(num_nodes):
        g = graph_of[node]
        local_index[node] = sizes[g]
        sizes[g] += 1
    if np.any(sizes == 0):
        raise ValueError("dataset contains empty graphs")

    adjacency = [np.zeros((s, s)) for s in sizes]
    with edges_path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a_str, b_str = line.split(",")
            a, b = int(a_str) - 1, int(b_str) - 1
            if not (0 <= a < num_nodes and 0 <= b < num_nodes):
                raise ValueError(f"edge references node id out of range: {line}")
            if graph_of[a] != graph_of[b]:
                raise ValueError(f"edge crosses graph boundaries: {line}")
            g = graph_of[a]
            adjacency[g][local_index[a], local_index[b]] = 1.0
            adjacency[g][local_index[b], local_index[a]] = 1.0

    attributes_path = base / f"{name}_node_attributes.txt"
    node_labels_path = base / f"{name}_node_labels.txt"
    features: list[np.ndarray] | None = None
    if attributes_path.exists():
        feature_kind = "node_attributes"
        rows = _read_csv_lines(attributes_path)
        if len(rows) != num_nodes:
            raise ValueError("node attribute count does not match node count")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError(f"ragged node attribute rows: widths {sorted(widths)}")
        matrix = np.asarray(rows)
        features = [matrix[graph_of == g] for g in range(num_graphs)]
    elif node_labels_path.exists():
        feature_kind = "node_labels_onehot"
        values = _read_int_lines(node_labels_path)
        if len(values) != num_nodes:
            raise ValueError("node label count does not match node count")
        distinct = sorted(set(values))
        column = {v: i for i, v in enumerate(distinct)}
        onehot = np.zeros((num_nodes, len(distinct)))
        onehot[np.arange(num_nodes), [column[v] for v in values]] = 1.0
        features = [onehot[graph_of == g] for g in range(num_graphs)]
    else:
        feature_kind = "degree_onehot"

    distinct_labels = sorted(set(raw_labels))
    label_map = {v: i for i, v in enumerate(distinct_labels)}

    graphs = []
    for g in range(num_graphs):
        n = sizes[g]
        if features is None:
            graph = Graph(uniform_measure(n), np.zeros((n, 0)), adjacency[g],
                          label_map[raw_labels[g]])
            graph = degree_feature_augmentation(graph, degree_cap)
        else:
            graph = Graph(uniform_measure(n), features[g], adjacency[g],
                          label_map[raw_labels[g]])
        graphs.append(remove_isolated_nodes(graph))

    return Dataset(graphs, name, len(distinct_labels), feature_kind)


def _as_soft_labeled(item, class_count: int) -> SoftLabeledGraph:
    if isinstance(item, SoftLabeledGraph):
        return item
    return SoftLabeledGraph(item, mix_labels(int(item.label), int(item.label), 1.0, class_count))


def _class_count(items: list) -> int:
    count = 0
    for item in items:
        if isinstance(item, SoftLabeledGraph):
            count = max(count, item.label_distribution.shape[0])
        else:
            count = max(count, int(item.label) + 1)
    return count


def save_dataset(ds, directory, fmt: str = "tud", name: str | None = None) -> None:
    """Serialize a :class:`Dataset` or a list of (soft-)labeled graphs.

    ``tud`` writes the standard file layout (soft labels are flattened to
    their argmax, with the full distributions in a ``DS_soft_labels.txt``
    sidecar); ``jsonl`` writes one JSON object per graph with fields
    mu, edges, features and label_distribution.
    """
    if isinstance(ds, Dataset):
        items = ds.graphs
        class_count = ds.class_count
        name = name or ds.name
        feature_kind = ds.feature_kind
    else:
        items = list(ds)
        class_count = _class_count(items)
        name = name or "DS"
        feature_kind = "node_attributes"
    soft = [_as_soft_labeled(item, class_count) for item in items]

    if fmt == "jsonl":
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        with (out / f"{name}.jsonl").open("w") as fh:
            for entry in soft:
                g = entry.graph
                i_idx, j_idx = np.nonzero(np.triu(g.structure))
                record = {
                    "mu": g.mu.tolist(),
                    "edges": [[int(i), int(j)] for i, j in zip(i_idx, j_idx)],
                    "features": g.features.tolist(),
                    "label_distribution": entry.label_distribution.tolist(),
                }
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        return
    if fmt != "tud":
        raise ValueError(f"unknown format {fmt!r}")

    base = Path(directory) / name
    base.mkdir(parents=True, exist_ok=True)
    edge_lines = []
    indicator_lines = []
    label_lines = []
    soft_lines = []
    attr_lines = []
    node_label_lines = []
    offset = 0
    for graph_id, entry in enumerate(soft, start=1):
        g = entry.graph
        n = g.num_nodes
        i_idx, j_idx = np.nonzero(g.structure)
        for i, j in zip(i_idx, j_idx):
            edge_lines.append(f"{offset + i + 1}, {offset + j + 1}")
        indicator_lines.extend([str(graph_id)] * n)
        label_lines.append(str(entry.hard_label))
        soft_lines.append(", ".join(repr(float(v)) for v in entry.label_distribution))
        if feature_kind == "node_labels_onehot":
            node_label_lines.extend(
                str(int(np.argmax(row))) for row in g.features
            )
        else:
            attr_lines.extend(
                ", ".join(repr(float(v)) for v in row) for row in g.features
            )
        offset += n

    (base / f"{name}_A.txt").write_text("\n".join(edge_lines) + "\n")
    (base / f"{name}_graph_indicator.txt").write_text("\n".join(indicator_lines) + "\n")
    (base / f"{name}_graph_labels.txt").write_text("\n".join(label_lines) + "\n")
    (base / f"{name}_soft_labels.txt").write_text("\n".join(soft_lines) + "\n")
    if feature_kind == "node_labels_onehot":
        (base / f"{name}_node_labels.txt").write_text("\n".join(node_label_lines) + "\n")
    elif feature_kind != "degree_onehot" and soft and soft[0].graph.feature_dim > 0:
        (base / f"{name}_node_attributes.txt").write_text("\n".join(attr_lines) + "\n")
