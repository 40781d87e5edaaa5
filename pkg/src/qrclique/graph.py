"""Simple undirected graphs, partition witnesses, and their file formats.

Edge lists are text: a header line ``n m`` followed by ``u v`` per edge with
``u < v``, sorted.  Witnesses are JSON ``{"parts": [[...]], "weights": [...]}``.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GraphFormatError, InvalidParameterError
from .numeric import decimal_string


class Graph:
    """Finite simple graph on vertices ``0..n-1`` backed by a boolean matrix."""

    def __init__(self, adjacency, label: str = ""):
        adj = np.array(adjacency, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidParameterError("adjacency must be a square matrix")
        if adj.diagonal().any():
            raise InvalidParameterError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise InvalidParameterError("adjacency must be symmetric")
        adj.setflags(write=False)
        self._adj = adj
        self.label = label

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], label: str = "") -> "Graph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise InvalidParameterError(f"self-loop at {u}")
            adj[u, v] = adj[v, u] = True
        return cls(adj, label)

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        """Read-only boolean adjacency matrix."""
        return self._adj

    @cached_property
    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1, dtype=np.int64)

    @cached_property
    def num_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u, v])

    def neighbors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self._adj[u])

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges ``u < v`` in lexicographic order."""
        us, vs = np.nonzero(np.triu(self._adj, 1))
        return np.column_stack([us, vs])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph whose vertex ``perm[i]`` plays the role of vertex ``i``."""
        perm = np.asarray(perm, dtype=np.int64)
        if not np.array_equal(np.sort(perm), np.arange(self.n)):
            raise InvalidParameterError("perm must be a permutation of 0..n-1")
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return Graph(self._adj[np.ix_(inv, inv)], self.label)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self.n, self.num_edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges}, label={self.label!r})"


def complete_graph(n: int) -> Graph:
    return Graph(~np.eye(n, dtype=bool), f"K{n}")


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"C{n}")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"P{n}")


def star_graph(k: int) -> Graph:
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)], f"K1,{k}")


@dataclass(frozen=True)
class PartitionWitness:
    """Vertex partition attached to a constructed graph.

    ``weights[i]`` is the weight the part was built from; the dust part, if
    any, carries the leftover tail mass.
    """

    parts: tuple
    weights: tuple = ()
    dust_index: Optional[int] = None

    def __post_init__(self):
        parts = tuple(np.asarray(sorted(int(v) for v in part), dtype=np.int64)
                      for part in self.parts)
        object.__setattr__(self, "parts", parts)

    @property
    def sizes(self) -> list[int]:
        return [len(part) for part in self.parts]

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def part_of(self) -> np.ndarray:
        """Part index of every vertex; raises unless the parts tile ``0..n-1``."""
        n = self.n
        labels = np.full(n, -1, dtype=np.int64)
        for i, part in enumerate(self.parts):
            if len(part) and (part.min() < 0 or part.max() >= n):
                raise InvalidParameterError(f"part {i} has vertices outside 0..{n - 1}")
            if (labels[part] != -1).any():
                raise InvalidParameterError(f"part {i} overlaps an earlier part")
            labels[part] = i
        return labels

    def largest_part(self) -> int:
        """Index of the largest non-dust part (lowest index on ties)."""
        best = None
        for i, size in enumerate(self.sizes):
            if i == self.dust_index:
                continue
            if best is None or size > self.sizes[best]:
                best = i
        return best

    def matches(self, g: Graph) -> bool:
        """True when ``g`` is exactly the complete multipartite graph on these parts."""
        if self.n != g.n:
            return False
        labels = self.part_of()
        return bool(np.array_equal(g.adjacency, labels[:, None] != labels[None, :]))

    def to_json(self) -> dict:
        out = {
            "parts": [part.tolist() for part in self.parts],
            "weights": [w if isinstance(w, str) else decimal_string(w) for w in self.weights],
        }
        if self.dust_index is not None:
            out["dust_index"] = self.dust_index
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PartitionWitness":
        try:
            return cls(tuple(data["parts"]), tuple(data.get("weights", ())),
                       data.get("dust_index"))
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"malformed witness: {exc}") from exc


# --------------------------------------------------------------------------
# file formats
# --------------------------------------------------------------------------

def format_edge_list(g: Graph) -> str:
    buf = io.StringIO()
    edges = g.edges()
    buf.write(f"{g.n} {len(edges)}\n")
    for u, v in edges:
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def parse_edge_list(text: str, label: str = "") -> Graph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty edge list", line=1)
    try:
        n, m = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise GraphFormatError("header must be 'n m'", line=1) from None
    if n < 0 or m < 0:
        raise GraphFormatError("negative header value", line=1)
    body = [(i, line) for i, line in enumerate(lines[1:], start=2) if line.strip()]
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}",
                               line=len(lines) if len(body) < m else body[m][0])
    adj = np.zeros((n, n), dtype=bool)
    for lineno, line in body:
        try:
            u, v = (int(tok) for tok in line.split())
        except ValueError:
            raise GraphFormatError(f"expected 'u v', got {line!r}", line=lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range 0..{n - 1}", line=lineno)
        if u == v:
            raise GraphFormatError("self-loop", line=lineno)
        if adj[u, v]:
            raise GraphFormatError("duplicate edge", line=lineno)
        adj[u, v] = adj[v, u] = True
    return Graph(adj, label)


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))


def read_edge_list(path) -> Graph:
    path = Path(path)
    return parse_edge_list(path.read_text(), label=path.stem)


def write_witness(witness: PartitionWitness, path) -> None:
    Path(path).write_text(json.dumps(witness.to_json()) + "\n")


def read_witness(path) -> PartitionWitness:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"witness is not valid JSON: {exc.msg}", line=exc.lineno) from exc
    return PartitionWitness.from_json(data)
