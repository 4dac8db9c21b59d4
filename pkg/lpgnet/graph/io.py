import json
from pathlib import Path

import numpy as np

from lpgnet.types import Dataset, DatasetError, Graph, GraphError, Split
from lpgnet.utils.logger_config import make_logger

__all__ = ["DatasetFormatError", "DatasetFiles", "load_dataset", "load_dataset_dir", "write_dataset",
           "read_edge_list", "write_edge_list"]

logger = make_logger("graph.io")


class DatasetFormatError(DatasetError):
    def __init__(self, path, line_no: int | None, message: str):
        self.path = str(path)
        self.line_no = line_no
        self.message = message
        super().__init__(message)

    def __str__(self):
        where = f"{self.path}:{self.line_no}" if self.line_no is not None else self.path
        return f"{where}: {self.message}"


class DatasetFiles:
    """Standard file names inside a dataset directory."""

    GRAPH = "graph.txt"
    FEATURES = "features.txt"
    LABELS = "labels.txt"
    SPLIT = "split.txt"

    def __init__(self, root):
        self.root = Path(root)

    @property
    def graph(self) -> Path:
        return self.root / self.GRAPH

    @property
    def features(self) -> Path:
        return self.root / self.FEATURES

    @property
    def labels(self) -> Path:
        return self.root / self.LABELS

    @property
    def split(self) -> Path:
        return self.root / self.SPLIT

    def all(self) -> list[Path]:
        return [self.graph, self.features, self.labels, self.split]


def _content_lines(path: Path):
    """Yields (line number, stripped content) with comments and blank lines removed."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line_no, raw in enumerate(f, start=1):
                content = raw.split("#", 1)[0].strip()
                if content:
                    yield line_no, content
    except FileNotFoundError as e:
        raise DatasetFormatError(path, None, "file not found") from e
    except UnicodeDecodeError as e:
        raise DatasetFormatError(path, None, f"not valid UTF-8: {e}") from e


def read_edge_list(path, num_nodes: int) -> Graph:
    path = Path(path)
    edges = []
    for line_no, content in _content_lines(path):
        parts = content.split()
        if len(parts) != 2:
            raise DatasetFormatError(path, line_no, f"expected 'u v', got {content!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DatasetFormatError(path, line_no, f"non-integer node id in {content!r}") from None
        if u < 0 or v < 0 or u >= num_nodes or v >= num_nodes:
            raise DatasetFormatError(path, line_no, f"node id out of range [0, {num_nodes}) in {content!r}")
        if u == v:
            raise DatasetFormatError(path, line_no, f"self-loop on node {u}")
        edges.append((u, v))
    try:
        return Graph.from_edges(num_nodes, np.array(edges, dtype=np.int64).reshape(-1, 2))
    except GraphError as e:
        raise DatasetFormatError(path, None, str(e)) from e


def _read_features(path: Path) -> np.ndarray:
    rows = []
    width = None
    for line_no, content in _content_lines(path):
        try:
            row = [float(x) for x in content.split()]
        except ValueError:
            raise DatasetFormatError(path, line_no, "non-numeric feature value") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DatasetFormatError(path, line_no, f"expected {width} features, got {len(row)}")
        rows.append(row)
    if not rows:
        raise DatasetFormatError(path, None, "no feature rows")
    features = np.array(rows, dtype=np.float64)
    if not np.isfinite(features).all():
        raise DatasetFormatError(path, None, "non-finite feature value")
    return features


def _read_labels(path: Path) -> np.ndarray:
    labels = []
    for line_no, content in _content_lines(path):
        try:
            labels.append(int(content))
        except ValueError:
            raise DatasetFormatError(path, line_no, f"expected one integer label, got {content!r}") from None
    return np.array(labels, dtype=np.int64)


def _read_split(path: Path) -> Split:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise DatasetFormatError(path, None, "file not found") from e
    if text.lstrip().startswith("{"):
        try:
            record = json.loads(text)
            return Split(record["train"], record["val"], record["test"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise DatasetFormatError(path, None, f"malformed JSON split: {e}") from e

    sets = {}
    for line_no, content in _content_lines(path):
        name, sep, ids = content.partition(":")
        name = name.strip().lower()
        if not sep or name not in ("train", "val", "test"):
            raise DatasetFormatError(path, line_no, f"expected 'train:', 'val:' or 'test:', got {content!r}")
        if name in sets:
            raise DatasetFormatError(path, line_no, f"duplicate '{name}:' line")
        try:
            sets[name] = [int(x) for x in ids.split()]
        except ValueError:
            raise DatasetFormatError(path, line_no, "non-integer node id") from None
    missing = [n for n in ("train", "val", "test") if n not in sets]
    if missing:
        raise DatasetFormatError(path, None, f"missing split line(s): {', '.join(missing)}")
    return Split(sets["train"], sets["val"], sets["test"])


def load_dataset(graph_path, features_path, labels_path, split_path, num_classes: int | None = None) -> Dataset:
    """
    Loads and validates a dataset from its four text files.

    The node count N comes from the features file; the labels file must
    hold N lines. When `num_classes` is omitted, C = max(label) + 1.
    """
    features_path, labels_path = Path(features_path), Path(labels_path)
    features = _read_features(features_path)
    num_nodes = features.shape[0]
    labels = _read_labels(labels_path)
    if labels.shape[0] != num_nodes:
        raise DatasetFormatError(labels_path, None, f"expected {num_nodes} labels, got {labels.shape[0]}")
    if labels.size and labels.min() < 0:
        raise DatasetFormatError(labels_path, None, f"negative label {int(labels.min())}")
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size else 1
    elif labels.size and labels.max() >= num_classes:
        raise DatasetFormatError(labels_path, None, f"label {int(labels.max())} outside [0, {num_classes})")
    graph = read_edge_list(graph_path, num_nodes)
    split = _read_split(Path(split_path))
    try:
        dataset = Dataset(graph=graph, features=features, labels=labels, split=split, num_classes=num_classes)
    except DatasetError as e:
        raise DatasetFormatError(split_path, None, str(e)) from e
    logger.info(f"loaded {dataset!r}")
    return dataset


def load_dataset_dir(root, num_classes: int | None = None) -> Dataset:
    files = DatasetFiles(root)
    return load_dataset(files.graph, files.features, files.labels, files.split, num_classes=num_classes)


def write_edge_list(graph: Graph, path) -> None:
    path = Path(path)
    header = f"undirected edge list: {graph.num_nodes} nodes, {graph.num_edges} edges"
    np.savetxt(path, graph.edge_array(), fmt="%d", header=header, comments="# ", encoding="utf-8")


def write_dataset(dataset: Dataset, root) -> DatasetFiles:
    """Writes the four dataset files; load_dataset_dir reads them back unchanged."""
    files = DatasetFiles(root)
    files.root.mkdir(parents=True, exist_ok=True)
    write_edge_list(dataset.graph, files.graph)
    np.savetxt(files.features, dataset.features, fmt="%.17g", encoding="utf-8")
    np.savetxt(files.labels, dataset.labels, fmt="%d", encoding="utf-8")
    with open(files.split, "w", encoding="utf-8") as f:
        for name, ids in (("train", dataset.split.train), ("val", dataset.split.val), ("test", dataset.split.test)):
            f.write(f"{name}: {' '.join(str(int(i)) for i in ids)}\n")
    logger.info(f"wrote dataset files to {files.root}")
    return files
