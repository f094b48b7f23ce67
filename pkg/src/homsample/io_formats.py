"""Plain-text ingestion and canonical serialization.

Formats: whitespace edge lists (optional ``n=<int>`` header, ``#`` comments),
CSV feature/label tables, sample directories (kept ids, relabeled subgraph
edges, id map), and JSON metrics reports. Serialization is canonical: the
same in-memory object always produces byte-identical files, with floats at
17 significant digits. Readers reject malformed input with file/line
positions; nothing is silently coerced.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import DataError
from .graph import Graph, build_graph
from .sampling import SampleResult


def _fmt_float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v!r}")
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# edge lists


def read_edge_list(path) -> Graph:
    """Parse a whitespace ``u v`` edge list into a Graph."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    declared_n: int | None = None
    pairs: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("n="):
                try:
                    declared_n = int(line[2:])
                except ValueError:
                    raise DataError(f"{path}:{lineno}: bad node-count header {line!r}") from None
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
            if u < 0 or v < 0:
                raise DataError(f"{path}:{lineno}: negative node id in {line!r}")
            pairs.append((u, v))
    try:
        return build_graph(np.array(pairs, dtype=np.int64).reshape(-1, 2), n=declared_n)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_edge_list(g: Graph, path) -> None:
    """Canonical form: ``n=`` header, one ``u v`` line per undirected edge, u < v."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"n={g.n}\n")
        for u, v in g.edge_array():
            fh.write(f"{u} {v}\n")


# ---------------------------------------------------------------------------
# feature / label tables


def read_features_csv(path) -> np.ndarray:
    """CSV of real-valued features, row i = node i."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for rowno, record in enumerate(csv.reader(fh), 1):
            if not record:
                continue
            vals = []
            for colno, cell in enumerate(record, 1):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}:{rowno}:{colno}: non-numeric cell {cell!r}"
                    ) from None
            if rows and len(vals) != len(rows[0]):
                raise DataError(
                    f"{path}:{rowno}: expected {len(rows[0])} columns, got {len(vals)}"
                )
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: empty feature file")
    return np.asarray(rows, dtype=np.float64)


def write_features_csv(x, path) -> None:
    x = np.asarray(x, dtype=np.float64)
    with open(Path(path), "w") as fh:
        for row in x:
            fh.write(",".join(_fmt_float(v) for v in row) + "\n")


def read_labels_csv(path) -> np.ndarray:
    """CSV with a single integer label column."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    labels: list[int] = []
    with open(path, newline="") as fh:
        for rowno, record in enumerate(csv.reader(fh), 1):
            if not record:
                continue
            if len(record) != 1:
                raise DataError(f"{path}:{rowno}: expected a single label column")
            try:
                labels.append(int(record[0]))
            except ValueError:
                raise DataError(
                    f"{path}:{rowno}: non-integer label {record[0]!r}"
                ) from None
    if not labels:
        raise DataError(f"{path}: empty label file")
    return np.asarray(labels, dtype=np.int64)


def write_labels_csv(labels, path) -> None:
    labels = np.asarray(labels, dtype=np.int64)
    with open(Path(path), "w") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


def check_sizes(g: Graph, x=None, labels=None) -> None:
    """Cross-check row counts against the graph at assembly time."""
    if x is not None and np.asarray(x).shape[0] != g.n:
        raise DataError(
            f"feature rows ({np.asarray(x).shape[0]}) do not match graph nodes ({g.n})"
        )
    if labels is not None and np.asarray(labels).shape[0] != g.n:
        raise DataError(
            f"label rows ({np.asarray(labels).shape[0]}) do not match graph nodes ({g.n})"
        )


# ---------------------------------------------------------------------------
# sample directories


def write_sample(result: SampleResult, outdir) -> None:
    """Write kept ids (original), relabeled subgraph edges, id map, and data."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "kept.txt", "w") as fh:
        for old in result.kept.indices:
            fh.write(f"{int(old)}\n")
    write_edge_list(result.subgraph, outdir / "edges.txt")
    with open(outdir / "id_map.txt", "w") as fh:
        for new, old in enumerate(result.kept.indices):
            fh.write(f"{new} {int(old)}\n")
    if result.features is not None:
        write_features_csv(result.features, outdir / "features.csv")
    if result.labels is not None:
        write_labels_csv(result.labels, outdir / "labels.csv")


def read_kept(path) -> np.ndarray:
    """One original node id per line."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    ids = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            try:
                ids.append(int(line))
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer node id {line!r}") from None
    return np.asarray(ids, dtype=np.int64)


# ---------------------------------------------------------------------------
# metrics reports


@dataclass
class MetricsReport:
    """One measured cell: sampler metrics and optional transfer accuracy."""

    dataset: str
    method: str
    gamma: float
    seed: int
    h_g: float
    laplacian_trace: float
    adjusted_trace: float
    components: int
    laplacian_rank: int
    trace_bound: float
    bound_satisfied: bool
    accuracy: float | None = None

    def __post_init__(self):
        if not self.bound_satisfied and self.laplacian_trace >= self.trace_bound - 1e-9:
            raise ValueError("bound_satisfied must be true when the bound holds")


_REPORT_FLOATS = ("gamma", "h_g", "laplacian_trace", "adjusted_trace", "trace_bound")
_REPORT_INTS = ("seed", "components", "laplacian_rank")


def _report_value_str(name: str, value) -> str:
    if name == "accuracy":
        return "null" if value is None else _fmt_float(value)
    if name in _REPORT_FLOATS:
        return _fmt_float(value)
    if name in _REPORT_INTS:
        return str(int(value))
    if name == "bound_satisfied":
        return "true" if value else "false"
    return json.dumps(str(value))


def report_to_text(report: MetricsReport) -> str:
    lines = ["{"]
    names = [f.name for f in fields(MetricsReport)]
    for i, name in enumerate(names):
        comma = "," if i < len(names) - 1 else ""
        lines.append(f'  "{name}": {_report_value_str(name, getattr(report, name))}{comma}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_report(report: MetricsReport, path) -> None:
    Path(path).write_text(report_to_text(report))


def read_report(path) -> MetricsReport:
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid report: {exc}") from None
    kw = {}
    for f in fields(MetricsReport):
        if f.name not in raw:
            raise DataError(f"{path}: missing report field {f.name!r}")
        v = raw[f.name]
        if f.name in _REPORT_FLOATS:
            v = float(v)
        elif f.name in _REPORT_INTS:
            v = int(v)
        elif f.name == "accuracy":
            v = None if v is None else float(v)
        kw[f.name] = v
    return MetricsReport(**kw)


def write_timings(timings: dict[str, float], path) -> None:
    """Wall-clock sidecar; not canonical and excluded from determinism checks."""
    Path(path).write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
