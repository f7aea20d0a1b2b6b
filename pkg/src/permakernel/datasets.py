"""Graph file formats, the molecule corpus loader, and synthetic data generators."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .graphs import PAD_LABEL, LabeledGraph, pad_graph

HEAVY_ATOMS = ("C", "O", "S")
CORPUS_PAD = 11
CORPUS_SIZE = 183
LABELS_FILE = "labels.csv"


def graph_to_dict(graph: LabeledGraph) -> dict:
    """JSON form: {"nodes": [{"label": ...}, ...], "edges": [[i, j], ...]}, 0-based."""
    edges = []
    n = graph.size
    for i in range(n):
        for j in range(i + 1, n):
            if graph.adjacency[i, j] != 0.0:
                edges.append([i, j])
    return {"nodes": [{"label": l} for l in graph.labels], "edges": edges}


def graph_from_dict(obj: dict) -> LabeledGraph:
    try:
        labels = tuple(node["label"] for node in obj["nodes"])
        edges = [(int(i), int(j)) for i, j in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed graph object: {exc}") from exc
    return LabeledGraph.from_edges(labels, edges)


def save_graph_json(graph: LabeledGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), ensure_ascii=False, indent=1))


def load_graph_json(path) -> LabeledGraph:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    try:
        return graph_from_dict(obj)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def load_graph_edgelist(path) -> LabeledGraph:
    """Text format: a header line of whitespace-separated node labels, then one
    "i j" edge per line with 0-based indices."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].split():
        raise ValueError(f"{path}:1: missing label header line")
    labels = tuple(lines[0].split())
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-integer edge endpoint") from exc
    try:
        return LabeledGraph.from_edges(labels, edges)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def load_molecule_corpus(path, pad_to: int = CORPUS_PAD) -> list[tuple[LabeledGraph, float]]:
    """Load the heavy-atom molecule corpus from a directory.

    Layout: one graph JSON file per molecule plus a ``labels.csv`` with header
    ``file,boiling_point_c``. Node labels must come from {C, O, S}; every
    graph is padded to ``pad_to`` nodes. See scripts/convert_acyclic.py for a
    converter from the upstream distribution.
    """
    root = Path(path)
    index = root / LABELS_FILE
    if not index.is_file():
        raise ValueError(f"{index}: labels file not found")
    allowed = set(HEAVY_ATOMS) | {PAD_LABEL}
    out: list[tuple[LabeledGraph, float]] = []
    with index.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or {"file", "boiling_point_c"} - set(reader.fieldnames):
            raise ValueError(f"{index}:1: header must contain file,boiling_point_c")
        for lineno, row in enumerate(reader, start=2):
            name = (row["file"] or "").strip()
            if not name:
                raise ValueError(f"{index}:{lineno}: empty file name")
            try:
                boiling_point = float(row["boiling_point_c"])
            except (TypeError, ValueError) as exc:
                raise ValueError(
                    f"{index}:{lineno}: bad boiling point {row['boiling_point_c']!r}"
                ) from exc
            graph = load_graph_json(root / name)
            bad = sorted(set(graph.labels) - allowed)
            if bad:
                raise ValueError(
                    f"{root / name}: labels {bad} outside the supported set "
                    f"{sorted(allowed)}"
                )
            if graph.size > pad_to:
                raise ValueError(
                    f"{root / name}: {graph.size} nodes exceed the pad size {pad_to}"
                )
            out.append((pad_graph(graph, pad_to), boiling_point))
    return out


def load_xy_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Regression dataset CSV: one row per sample, feature columns then the label."""
    path = Path(path)
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    start = 0
    try:
        float(rows[0][0])
    except ValueError:
        start = 1
    data = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row:
            continue
        try:
            data.append([float(cell) for cell in row])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-numeric cell") from exc
    table = np.asarray(data)
    if table.shape[1] < 2:
        raise ValueError(f"{path}: need at least one feature column and a label column")
    return table[:, :-1], table[:, -1]


def save_xy_csv(path, xs, ys, feature_names=None) -> None:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.asarray(ys, dtype=float).ravel()
    names = feature_names or [f"x{i + 1}" for i in range(xs.shape[1])]
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([*names, "label"])
        for row, label in zip(xs, ys):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(label))])


def random_tree(n: int, rng: np.random.Generator, label_pool=HEAVY_ATOMS) -> LabeledGraph:
    """Uniformly attached random tree with labels drawn from the pool."""
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    labels = tuple(str(rng.choice(label_pool)) for _ in range(n))
    return LabeledGraph.from_edges(labels, edges)


def random_connected_graph(
    n: int, rng: np.random.Generator, extra_edge_prob: float = 0.3, label_pool=("C",)
) -> LabeledGraph:
    """Random connected graph: a random spanning tree plus independent extra edges."""
    tree = random_tree(n, rng, label_pool=label_pool)
    adjacency = tree.adjacency.copy()
    for i in range(n):
        for j in range(i + 1, n):
            if adjacency[i, j] == 0.0 and rng.random() < extra_edge_prob:
                adjacency[i, j] = adjacency[j, i] = 1.0
    return LabeledGraph(adjacency, tree.labels)


def isomorphic_copy(graph: LabeledGraph, rng: np.random.Generator) -> LabeledGraph:
    """Relabel the nodes of a graph by a random permutation."""
    perm = rng.permutation(graph.size)
    adjacency = graph.adjacency[np.ix_(perm, perm)]
    labels = tuple(graph.labels[i] for i in perm)
    return LabeledGraph(adjacency, labels, original_size=graph.original_size)


def planted_label(graph: LabeledGraph) -> float:
    """Linear target: counts of edges and heteroatoms with fixed weights."""
    n_edges = float(graph.adjacency[: graph.original_size, : graph.original_size].sum()) / 2.0
    labels = graph.labels[: graph.original_size]
    return 30.0 + 10.0 * n_edges + 25.0 * labels.count("S") + 12.0 * labels.count("O")


def synthetic_molecule_corpus(
    seed: int = 0, n_pairs: int = 10, pad_to: int = 6
) -> list[tuple[LabeledGraph, float]]:
    """Small stand-in corpus: random labeled trees, each with an isomorphic twin.

    Labels follow a planted linear function of graph statistics, so twins
    share their target value exactly.
    """
    rng = np.random.default_rng(seed)
    out: list[tuple[LabeledGraph, float]] = []
    for _ in range(n_pairs):
        n = int(rng.integers(3, pad_to))
        base = random_tree(n, rng)
        twin = isomorphic_copy(base, rng)
        value = planted_label(base)
        out.append((pad_graph(base, pad_to), value))
        out.append((pad_graph(twin, pad_to), value))
    return out
