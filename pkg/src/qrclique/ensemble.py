"""Graph generators: the multipartite counterexamples, graphon samples, and
the controls (G(n,p), Paley graphs, clique plus isolated vertices, balanced
complete bipartite graphs)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, PartitionSizeError, TailMassError
from .graph import Graph, PartitionWitness
from .numeric import DensityParam, context, ext, to_exact
from .spectrum import DEFAULT_TAIL_TOLERANCE, WeightSequence


@dataclass(frozen=True)
class SeededRng:
    """Reproducible random stream: PCG64 keyed by ``(seed, stream)``."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(seq))

    def spawn(self, stream: int) -> "SeededRng":
        return SeededRng(self.seed, stream)


def largest_remainder(weights: Sequence, n: int) -> list[int]:
    """Hamilton apportionment of ``n`` units to ``weights`` (summing to 1).

    Floors ``w_i n`` and hands the leftover units to the largest fractional
    parts, lower index first on ties.
    """
    shares = [to_exact(w) * n for w in weights]
    sizes = [math.floor(s) for s in shares]
    left = n - sum(sizes)
    if left < 0 or left > len(sizes):
        raise InvalidParameterError(f"weights sum to {float(sum(shares) / n):.6g}, not 1")
    order = sorted(range(len(sizes)), key=lambda i: (-(shares[i] - sizes[i]), i))
    for i in order[:left]:
        sizes[i] += 1
    return sizes


def _part_weights(weights: WeightSequence) -> tuple[list, Optional[int]]:
    ws = list(weights.weights)
    if weights.source == "entire" and weights.tail_mass > 0:
        ws.append(weights.tail_mass)
        return ws, len(ws) - 1
    return ws, None


def _multipartite_adjacency(labels: np.ndarray) -> np.ndarray:
    return labels[:, None] != labels[None, :]


def build_multipartite(weights: WeightSequence, n: int, *, allow_empty: bool = False,
                       label: Optional[str] = None) -> tuple[Graph, PartitionWitness]:
    """Complete multipartite graph with part sizes ``~ c_i n``.

    Entire-route weights get one extra dust part carrying the tail mass.
    """
    ws, dust = _part_weights(weights)
    if n < len(ws) and not allow_empty:
        raise PartitionSizeError(f"n={n} is smaller than the {len(ws)} parts")
    sizes = largest_remainder(ws, n)
    if not allow_empty and 0 in sizes:
        raise PartitionSizeError(f"part {sizes.index(0) + 1} would be empty at n={n}")
    bounds = np.cumsum([0] + sizes)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    parts = tuple(range(int(a), int(b)) for a, b in zip(bounds, bounds[1:]))
    g = Graph(_multipartite_adjacency(labels),
              label or f"multipartite(p={weights.p},parts={len(ws)},n={n})")
    return g, PartitionWitness(parts, tuple(ws), dust)


def sample_graphon_graph(p, weights: WeightSequence, n: int, rng: SeededRng, *,
                         tail_tolerance=DEFAULT_TAIL_TOLERANCE,
                         label: Optional[str] = None) -> tuple[Graph, PartitionWitness]:
    """Sample ``n`` uniform points of [0,1] from the step graphon of ``weights``.

    Intervals of length ``c_i`` are laid out in weight order, followed by the
    dust interval; two vertices are adjacent iff they land in different
    intervals.
    """
    p = DensityParam.parse(p)
    if p.value != weights.p.value:
        raise InvalidParameterError(f"weights were built for p={weights.p}, not p={p}")
    if weights.tail_mass >= ext(to_exact(tail_tolerance), weights.precision_bits):
        raise TailMassError(
            f"tail mass {float(weights.tail_mass):.3g} exceeds {float(tail_tolerance):.3g}; "
            "use more roots")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    ctx = context(weights.precision_bits)
    cumulative, acc = [], ctx.zero
    for c in weights.weights:
        acc += c
        cumulative.append(float(acc))
    points = rng.generator().random(n)
    labels = np.searchsorted(np.asarray(cumulative), points, side="right")
    ws = list(weights.weights) + [weights.tail_mass]
    parts = tuple(np.flatnonzero(labels == i) for i in range(len(ws)))
    g = Graph(_multipartite_adjacency(labels),
              label or f"graphon(p={p},m={len(weights)},n={n},seed={rng.seed})")
    return g, PartitionWitness(parts, tuple(ws), len(ws) - 1)


def gnp(n: int, p, rng: SeededRng) -> Graph:
    """Binomial random graph; ``p`` may be 0 or 1 here."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    q = to_exact(str(p) if isinstance(p, float) else p)
    if not 0 <= q <= 1:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, 1)
    draws = rng.generator().random(len(iu))
    keep = draws < float(q) if q < 1 else np.ones(len(iu), dtype=bool)
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[keep], ju[keep]] = True
    adj |= adj.T
    return Graph(adj, f"gnp(n={n},p={p},seed={rng.seed})")


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    return all(q % d for d in range(3, math.isqrt(q) + 1, 2))


def quadratic_residues(q: int) -> np.ndarray:
    """Boolean mask over ``Z_q`` of the nonzero squares."""
    mask = np.zeros(q, dtype=bool)
    x = np.arange(1, q, dtype=np.int64)
    mask[(x * x) % q] = True
    return mask


def paley(q: int) -> Graph:
    """Paley graph on ``Z_q``; requires a prime ``q = 1 (mod 4)``."""
    if not _is_prime(q) or q % 4 != 1:
        raise InvalidParameterError(f"q={q} must be a prime congruent to 1 mod 4")
    res = quadratic_residues(q)
    idx = np.arange(q)
    return Graph(res[(idx[:, None] - idx[None, :]) % q], f"paley({q})")


def clique_plus_isolated(n: int, p) -> Graph:
    """Clique on ``floor(p n)`` vertices, the rest isolated."""
    p = DensityParam.parse(p, allow_one=True)
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    size = math.floor(p.value * n)
    adj = np.zeros((n, n), dtype=bool)
    adj[:size, :size] = True
    np.fill_diagonal(adj, False)
    return Graph(adj, f"clique_plus_isolated(n={n},p={p})")


def complete_bipartite(n: int) -> Graph:
    """Complete bipartite graph with two parts of size ``n/2``."""
    if n < 2 or n % 2:
        raise InvalidParameterError(f"n must be even and positive, got {n}")
    labels = np.repeat([0, 1], n // 2)
    return Graph(_multipartite_adjacency(labels), f"complete_bipartite({n})")


def next_paley_prime(near: int) -> int:
    """Smallest prime ``q >= near`` with ``q = 1 (mod 4)``."""
    q = max(near, 5)
    while not (q % 4 == 1 and _is_prime(q)):
        q += 1
    return q
