"""CSV ingestion and serialisation.

Formats (UTF-8, LF line endings, ``.`` decimal separator, reals printed with
shortest round-trip representation):

* edge list: header ``src,dst,weight``; labels are arbitrary strings mapped to
  dense indices in first-appearance order (src before dst); duplicate
  ``(src, dst)`` rows are summed. A zero-weight self row ``a,a,0`` declares a
  node without adding any link.
* fitness: header ``node,fitness``, strictly positive values.
* degrees: header ``node,degree``, the observed subset.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from fitrecon.bootstrap import PartialObservation
from fitrecon.errors import IngestError
from fitrecon.graph import FitnessVector, Graph, WeightedDigraph


def fmt(x) -> str:
    return repr(float(x))


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _rows(path, header: Sequence[str]):
    """Yield (line number, fields) for the data rows of a small CSV file."""
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError(f"{path}: not valid UTF-8 ({exc})")
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise IngestError(f"{path}: empty file", line=1)
    got = [h.strip() for h in next(csv.reader([lines[0]]))]
    if got != list(header):
        raise IngestError(f"{path}: expected header {','.join(header)!r}, got {lines[0]!r}", line=1)
    n_rows = 0
    for lineno, fields in enumerate(csv.reader(lines[1:]), start=2):
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != len(header):
            raise IngestError(f"{path}: expected {len(header)} fields, got {len(fields)}", line=lineno)
        n_rows += 1
        yield lineno, [f.strip() for f in fields]
    if n_rows == 0:
        raise IngestError(f"{path}: no data rows", line=2)


def _number(text: str, lineno: int, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise IngestError(f"malformed {what} {text!r}", line=lineno)
    if not math.isfinite(v):
        raise IngestError(f"{what} must be finite, got {text!r}", line=lineno)
    return v


def ingest_edge_list(path) -> WeightedDigraph:
    index: Dict[str, int] = {}
    entries = []
    for lineno, (src, dst, w) in _rows(path, ("src", "dst", "weight")):
        if not src or not dst:
            raise IngestError("empty node label", line=lineno)
        weight = _number(w, lineno, "weight")
        if weight < 0:
            raise IngestError(f"negative weight {w}", line=lineno)
        for label in (src, dst):
            index.setdefault(label, len(index))
        entries.append((index[src], index[dst], weight))
    weights = np.zeros((len(index), len(index)))
    for i, j, w in entries:
        weights[i, j] += w
    return WeightedDigraph(weights, tuple(index))


def write_edge_list(g: Graph, labels: Optional[Sequence[str]] = None) -> str:
    """Edge list that ingests back to exactly ``g`` (node order included)."""
    labels = list(labels if labels is not None else (g.labels or [str(i) for i in range(g.n)]))
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["src", "dst", "weight"])
    for label in labels:
        w.writerow([label, label, "0"])
    for i, j in g.edges():
        w.writerow([labels[i], labels[j], "1"])
    return buf.getvalue()


def ingest_fitness(path, nodes: Optional[Sequence[str]] = None) -> FitnessVector:
    """Read ``node,fitness``; when ``nodes`` is given the file must cover
    exactly that node set and the result follows its order."""
    values: Dict[str, float] = {}
    for lineno, (node, y) in _rows(path, ("node", "fitness")):
        if node in values:
            raise IngestError(f"duplicate node {node!r}", line=lineno)
        v = _number(y, lineno, "fitness")
        if v <= 0:
            raise IngestError(f"nonpositive fitness {y} for node {node!r}", line=lineno)
        values[node] = v
    if nodes is None:
        return FitnessVector(np.array(list(values.values())), tuple(values))
    nodes = list(nodes)
    missing = sorted(set(nodes) - set(values))
    extra = sorted(set(values) - set(nodes))
    if missing or extra:
        raise IngestError(
            f"{path}: fitness node set does not match the graph; "
            f"missing from fitness file: {missing}; not in graph: {extra}"
        )
    return FitnessVector(np.array([values[v] for v in nodes]), tuple(nodes))


def write_fitness(y: FitnessVector) -> str:
    labels = y.labels or tuple(str(i) for i in range(y.n))
    lines = ["node,fitness"] + [f"{label},{fmt(v)}" for label, v in zip(labels, y.values)]
    return "\n".join(lines) + "\n"


def ingest_degrees(path, labels: Sequence[str]) -> PartialObservation:
    """Read ``node,degree`` rows for the observed subset, indexed by ``labels``."""
    index = {label: i for i, label in enumerate(labels)}
    subset: List[int] = []
    k: List[float] = []
    seen = set()
    unknown = []
    for lineno, (node, d) in _rows(path, ("node", "degree")):
        if node in seen:
            raise IngestError(f"duplicate node {node!r}", line=lineno)
        seen.add(node)
        v = _number(d, lineno, "degree")
        if v < 0:
            raise IngestError(f"negative degree {d}", line=lineno)
        if node not in index:
            unknown.append(node)
            continue
        subset.append(index[node])
        k.append(v)
    if unknown:
        raise IngestError(f"{path}: nodes without fitness: {sorted(unknown)}")
    return PartialObservation(np.array(subset, dtype=np.int64), np.array(k))
