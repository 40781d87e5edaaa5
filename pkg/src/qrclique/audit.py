"""Labeled subgraph counts and the quasirandomness audit.

A labeled copy of H in G is an injective map V(H) -> V(G) sending edges to
edges (non-edges unconstrained, automorphisms not quotiented).  Expected
counts use the baseline ``p^|E(H)| n^|V(H)|``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.linalg.blas import ssyrk

from .errors import InvalidParameterError
from .ensemble import SeededRng
from .graph import Graph, PartitionWitness
from .numeric import DensityParam, decimal_string

ORACLE_MAX_PATTERN = 8
ORACLE_MAX_HOST = 64

VERDICTS = ("consistent_with_quasirandom", "clique_consistent_but_p3_fail", "inconsistent")


# --------------------------------------------------------------------------
# exact counters
# --------------------------------------------------------------------------

def _matrix(g: Graph, dtype=np.float32) -> np.ndarray:
    return g.adjacency.astype(dtype)


def _square(g: Graph) -> np.ndarray:
    """``A^2`` as int64 (float32 products are exact while entries stay below 2^24)."""
    a = _matrix(g, np.float32 if g.n < 2**24 else np.float64)
    return (a @ a).astype(np.int64)


def degeneracy_order(g: Graph) -> np.ndarray:
    """Vertices in the order they are peeled off by repeated min-degree removal."""
    adj = g.adjacency
    deg = g.degrees.astype(np.int64).copy()
    alive = np.ones(g.n, dtype=bool)
    order = np.empty(g.n, dtype=np.int64)
    big = np.iinfo(np.int64).max
    for i in range(g.n):
        v = int(np.argmin(np.where(alive, deg, big)))
        order[i] = v
        alive[v] = False
        deg -= adj[v]
    return order


def _triangles_upper(upper: np.ndarray) -> int:
    """Triangles of the DAG given by a strictly upper-triangular 0/1 matrix."""
    if upper.shape[0] < 3:
        return 0
    # (U U^T)_ab counts common out-neighbours; summing it over arcs a->b
    # sees each transitive triple exactly once.  Row sums stay below 2^24,
    # so float32 accumulation is exact for up to 4096 vertices.
    common = ssyrk(1.0, upper.T, trans=1)
    if upper.shape[0] <= 4096:
        return int(np.einsum("ij,ij->i", common, upper).sum(dtype=np.float64))
    return int(np.sum(common, where=upper.astype(bool), dtype=np.float64))


def _cliques_in_dag(upper: np.ndarray, r: int) -> int:
    size = upper.shape[0]
    if r == 1:
        return size
    if r == 2:
        return int(upper.sum(dtype=np.float64))
    if r == 3:
        return _triangles_upper(upper)
    total = 0
    for a in range(size - r + 1):
        fwd = np.flatnonzero(upper[a])
        if len(fwd) >= r - 1:
            total += _cliques_in_dag(upper[np.ix_(fwd, fwd)], r - 1)
    return total


def count_cliques(g: Graph, j: int) -> int:
    """Number of ``j``-vertex cliques (unlabeled)."""
    if j < 1:
        raise InvalidParameterError(f"clique order must be >= 1, got {j}")
    if j > g.n:
        return 0
    if j == 1:
        return g.n
    if j == 2:
        return g.num_edges
    if j == 3:
        return int((_square(g) * g.adjacency).sum()) // 6
    order = degeneracy_order(g)
    upper = np.triu(g.adjacency[np.ix_(order, order)], 1).astype(np.float32)
    return _cliques_in_dag(upper, j)


def count_labeled_cliques(g: Graph, j: int) -> int:
    """``j!`` times the number of ``j``-cliques of ``g``."""
    return math.factorial(j) * count_cliques(g, j)


def elementary_symmetric_int(values: Sequence[int], j: int) -> int:
    """``e_j`` of integers by the coefficient recurrence of ``prod (1 + v t)``."""
    e = [1] + [0] * j
    for v in values:
        for i in range(j, 0, -1):
            e[i] += e[i - 1] * int(v)
    return e[j]


def count_labeled_cliques_multipartite(witness: PartitionWitness, j: int) -> int:
    """Labeled ``K_j`` count of the complete multipartite graph on the witness parts."""
    if j < 1:
        raise InvalidParameterError(f"clique order must be >= 1, got {j}")
    return math.factorial(j) * elementary_symmetric_int(witness.sizes, j)


def count_labeled_c4(g: Graph) -> int:
    """Labeled 4-cycles: ``tr(A^4) - 2 sum deg^2 + 2|E|``.

    ``tr(A^4)`` is the sum of squared common-neighbour counts over ordered
    vertex pairs.
    """
    sq = _square(g)
    deg = g.degrees
    return int((sq * sq).sum()) - 2 * int((deg * deg).sum()) + 2 * g.num_edges


def count_labeled_cycles(g: Graph, length: int) -> int:
    """Labeled ``C_length`` copies for ``length`` in 3..5, from closed-walk traces."""
    if length == 4:
        return count_labeled_c4(g)
    if length not in (3, 5):
        raise InvalidParameterError(f"cycle length must be 3, 4 or 5, got {length}")
    adj = g.adjacency
    sq = _square(g)
    cube_diag = (sq * adj).sum(axis=1)          # (A^3)_ii
    if length == 3:
        return int(cube_diag.sum())
    cube = sq @ adj.astype(np.int64)
    tr5 = int((sq * cube.T).sum())
    deg = g.degrees
    return tr5 - 5 * int(cube_diag.sum()) - 5 * int(((deg - 2) * cube_diag).sum())


def count_labeled_stars(g: Graph, k: int) -> int:
    """Labeled copies of ``K_{1,k}``: ``sum_v deg(v) (deg(v)-1) ... (deg(v)-k+1)``."""
    if k < 1:
        raise InvalidParameterError(f"star size must be >= 1, got {k}")
    return sum(math.perm(int(d), k) for d in g.degrees)


def count_labeled_copies_bruteforce(g: Graph, h: Graph) -> int:
    """Injective edge-preserving maps ``h -> g`` by plain backtracking.

    Oracle only: ``|V(h)| <= 8`` and ``n <= 64``.
    """
    if h.n > ORACLE_MAX_PATTERN or g.n > ORACLE_MAX_HOST:
        raise InvalidParameterError(
            f"oracle limited to |V(h)| <= {ORACLE_MAX_PATTERN}, n <= {ORACLE_MAX_HOST}")
    if h.n == 0:
        return 1
    masks = [sum(1 << int(u) for u in g.neighbors(v)) for v in range(g.n)]
    everyone = (1 << g.n) - 1
    back = [[int(u) for u in h.neighbors(i) if u < i] for i in range(h.n)]
    image = [0] * h.n

    def extend(i: int, used: int) -> int:
        if i == h.n:
            return 1
        cand = everyone & ~used
        for u in back[i]:
            cand &= masks[image[u]]
        total = 0
        while cand:
            low = cand & -cand
            image[i] = low.bit_length() - 1
            total += extend(i + 1, used | low)
            cand ^= low
        return total

    return extend(0, 0)


# --------------------------------------------------------------------------
# P3 samples
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class P3Sample:
    subset_size: int
    labeled_edges_within: int
    expected: Fraction
    kind: str = "random"
    part: Optional[int] = None

    @property
    def rel_dev(self) -> float:
        return float(self.labeled_edges_within / self.expected - 1)


def _edges_within(g: Graph, subset: np.ndarray) -> int:
    sub = g.adjacency[np.ix_(subset, subset)]
    return int(sub.sum(dtype=np.int64))


def p3_check(g: Graph, c, p, trials: int, rng: SeededRng,
             explicit_subsets: Optional[Iterable] = None) -> list[P3Sample]:
    """Labeled edges inside vertex subsets against ``p |S|^2``.

    Random subsets have size ``ceil(c n)``.  When ``explicit_subsets`` is
    given those subsets are measured instead (``kind="witness"``).
    """
    p = DensityParam.parse(p)
    c = Fraction(str(c)) if isinstance(c, float) else Fraction(c)
    if not 0 < c <= 1:
        raise InvalidParameterError(f"c must lie in (0, 1], got {c}")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    out = []
    if explicit_subsets is not None:
        for idx, subset in enumerate(explicit_subsets):
            subset = np.asarray(subset, dtype=np.int64)
            out.append(P3Sample(len(subset), _edges_within(g, subset),
                                p.value * len(subset) ** 2, "witness", idx))
        return out
    size = math.ceil(c * g.n)
    gen = rng.generator()
    for _ in range(trials):
        subset = np.sort(gen.choice(g.n, size=size, replace=False))
        out.append(P3Sample(size, _edges_within(g, subset), p.value * size**2))
    return out


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditConfig:
    """Tolerances of the audit.  Clique rows pass when
    ``|rel_dev| <= max(clique_tol_floor, clique_tol_scale j^2 / n)``."""

    clique_tol_floor: float = 0.02
    clique_tol_scale: float = 3.0
    p3_c: str = "0.5"
    p3_trials: int = 20
    p3_tolerance: float = 0.05
    p3_fail_threshold: float = -0.5
    seed: int = 0

    def clique_tolerance(self, j: int, n: int) -> float:
        return max(self.clique_tol_floor, self.clique_tol_scale * j * j / max(n, 1))


@dataclass(frozen=True)
class CountRow:
    subgraph: str
    vertices: int
    edges: int
    labeled_count: int
    expected: Fraction
    tolerance: float

    @property
    def rel_dev(self) -> float:
        return float(self.labeled_count / self.expected - 1)

    @property
    def within(self) -> bool:
        return abs(self.rel_dev) <= self.tolerance


@dataclass(frozen=True)
class IndependentSetRow:
    part: int
    size: int
    labeled_edges_within: int

    @property
    def independent(self) -> bool:
        return self.labeled_edges_within == 0


def _dec(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else decimal_string(x, 128)


@dataclass
class AuditReport:
    label: str
    n: int
    p: DensityParam
    k_max: int
    config: AuditConfig
    cliques: list
    c4: CountRow
    p3: list
    independent_set: Optional[IndependentSetRow] = None
    structured: bool = False
    verdict: str = field(default="")

    def __post_init__(self):
        if not self.verdict:
            self.verdict = _verdict(self)

    @property
    def cliques_ok(self) -> bool:
        return all(row.within for row in self.cliques)

    def clique_row(self, j: int) -> CountRow:
        return next(row for row in self.cliques if row.vertices == j)

    def witness_samples(self) -> list:
        return [s for s in self.p3 if s.kind == "witness"]

    def to_json(self) -> dict:
        def count_row(row: CountRow) -> dict:
            return {"subgraph": row.subgraph, "labeled_count": str(row.labeled_count),
                    "expected": _dec(row.expected), "rel_dev": repr(row.rel_dev),
                    "tolerance": repr(row.tolerance), "within": row.within}

        out = {
            "graph": self.label,
            "n": self.n,
            "p": str(self.p),
            "k_max": self.k_max,
            "config": asdict(self.config),
            "structured_counts": self.structured,
            "cliques": [count_row(r) for r in self.cliques],
            "c4": count_row(self.c4),
            "p3": [{"kind": s.kind, "part": s.part, "subset_size": s.subset_size,
                    "labeled_edges_within": str(s.labeled_edges_within),
                    "expected": _dec(s.expected), "rel_dev": repr(s.rel_dev)}
                   for s in self.p3],
            "verdict": self.verdict,
        }
        if self.independent_set is not None:
            row = self.independent_set
            out["independent_set"] = {"part": row.part, "size": row.size,
                                      "labeled_edges_within": str(row.labeled_edges_within),
                                      "independent": row.independent}
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "subgraph", "size", "labeled_count", "expected",
                    "rel_dev", "tolerance", "within"])
        for row in [*self.cliques, self.c4]:
            w.writerow(["count", row.subgraph, row.vertices, row.labeled_count,
                        _dec(row.expected), repr(row.rel_dev), repr(row.tolerance),
                        row.within])
        for s in self.p3:
            name = f"part{s.part}" if s.kind == "witness" else "random"
            within = abs(s.rel_dev) <= self.config.p3_tolerance
            w.writerow([f"p3_{s.kind}", name, s.subset_size, s.labeled_edges_within,
                        _dec(s.expected), repr(s.rel_dev), repr(self.config.p3_tolerance),
                        within])
        if self.independent_set is not None:
            row = self.independent_set
            w.writerow(["independent_set", f"part{row.part}", row.size,
                        row.labeled_edges_within, 0, "", "", row.independent])
        w.writerow(["verdict", self.verdict, "", "", "", "", "", ""])
        return buf.getvalue()


def _verdict(report: AuditReport) -> str:
    cfg = report.config
    p3_ok = all(abs(s.rel_dev) <= cfg.p3_tolerance for s in report.p3)
    if report.cliques_ok and report.c4.within and p3_ok:
        return VERDICTS[0]
    if report.cliques_ok and any(s.rel_dev < cfg.p3_fail_threshold for s in report.p3):
        return VERDICTS[1]
    return VERDICTS[2]


def _witness_subsets(witness: PartitionWitness, n: int, c: Fraction) -> list:
    """Indices of the witness parts to test: the largest non-dust part always,
    plus every other non-dust part of size at least ``c n``."""
    largest = witness.largest_part()
    chosen = []
    for i, size in enumerate(witness.sizes):
        if i == witness.dust_index:
            continue
        if i == largest or size >= c * n:
            chosen.append(i)
    return chosen


def quasirandomness_report(g: Graph, p, k_max: int, config: AuditConfig = AuditConfig(),
                           witness: Optional[PartitionWitness] = None) -> AuditReport:
    """Clique rows ``K_2..K_kmax``, a ``C_4`` row, random and witness P3 samples, verdict.

    If ``witness`` describes ``g`` exactly, clique counts come from the part
    sizes instead of backtracking.
    """
    p = DensityParam.parse(p)
    if k_max < 2:
        raise InvalidParameterError(f"k_max must be >= 2, got {k_max}")
    n = g.n
    structured = witness is not None and witness.matches(g)
    rows = []
    for j in range(2, k_max + 1):
        count = (count_labeled_cliques_multipartite(witness, j) if structured
                 else count_labeled_cliques(g, j))
        rows.append(CountRow(f"K{j}", j, math.comb(j, 2), count,
                             p.value ** math.comb(j, 2) * n**j, config.clique_tolerance(j, n)))
    c4 = CountRow("C4", 4, 4, count_labeled_c4(g), p.value**4 * n**4,
                  config.clique_tolerance(4, n))

    c = Fraction(config.p3_c)
    samples = p3_check(g, c, p, config.p3_trials, SeededRng(config.seed, 1))
    indep = None
    if witness is not None:
        if witness.n != n:
            raise InvalidParameterError(f"witness covers {witness.n} vertices, graph has {n}")
        chosen = _witness_subsets(witness, n, c)
        found = p3_check(g, c, p, 1, SeededRng(config.seed, 1),
                         explicit_subsets=[witness.parts[i] for i in chosen])
        samples += [P3Sample(s.subset_size, s.labeled_edges_within, s.expected,
                             "witness", i) for s, i in zip(found, chosen)]
        largest = witness.largest_part()
        if largest is not None:
            part = witness.parts[largest]
            indep = IndependentSetRow(largest, len(part), _edges_within(g, part))
    return AuditReport(g.label, n, p, k_max, config, rows, c4, samples, indep, structured)
