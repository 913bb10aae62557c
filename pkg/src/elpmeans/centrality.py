"""Laplacian centrality over the complete coupling network of embedded nodes.

Every pair of embedded nodes is joined by an edge whose weight decays with
their Euclidean distance. Each node is scored by the relative drop in
Laplacian energy when it is removed, then by its distance to the nearest
node of higher score. Nodes high on both axes of this decision graph seed
the clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import Embedding
from .errors import ConfigError, DegenerateInputError

EPS = np.finfo(np.float64).eps


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Symmetric weights with zero diagonal plus per-node strength (row sums)."""

    w: np.ndarray
    strength: np.ndarray

    @classmethod
    def from_weights(cls, w) -> "SimilarityMatrix":
        w = np.array(w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ConfigError("weight matrix must be square")
        if not np.array_equal(w, w.T):
            raise ConfigError("weight matrix must be symmetric")
        if np.any(np.diag(w) != 0) or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ConfigError("weights must be finite, nonnegative, with zero diagonal")
        return cls(w, w.sum(axis=1))

    @property
    def node_count(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True, eq=False)
class CentralityResult:
    total_energy: float
    delta_energy: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class DecisionPoint:
    node: int
    c: float
    delta: float
    gamma: float
    nearest_higher: int | None


@dataclass(frozen=True, eq=False)
class CenterSet:
    centers: tuple[int, ...]
    centroids: np.ndarray

    @property
    def k(self) -> int:
        return len(self.centers)


def pairwise_distances(embedding: Embedding | np.ndarray) -> np.ndarray:
    """Euclidean distance matrix; exactly symmetric with a zero diagonal."""
    x = np.asarray(getattr(embedding, "vectors", embedding), dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ConfigError("embedding must be a non-empty 2-D array")
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def similarity_weights(distances: np.ndarray, sigma_multiplier: float = 1.0) -> SimilarityMatrix:
    """Gaussian kernel ``exp(-d^2 / (2 sigma^2))`` off the diagonal.

    ``sigma`` is the mean off-diagonal distance times ``sigma_multiplier``,
    which makes the weights invariant to a uniform rescaling of the
    embedding.
    """
    d = np.asarray(distances, dtype=np.float64)
    n = d.shape[0]
    if n < 2:
        raise ConfigError("need at least two nodes")
    if not sigma_multiplier > 0:
        raise ConfigError("sigma_multiplier must be positive")
    off = ~np.eye(n, dtype=bool)
    sigma = d[off].mean() * sigma_multiplier
    if not sigma > 0:
        raise DegenerateInputError("all embedded points coincide; kernel width is zero")
    w = np.exp(-(d * d) / (2.0 * sigma * sigma))
    np.fill_diagonal(w, 0.0)
    return SimilarityMatrix(w, w.sum(axis=1))


def laplacian_matrix(weights: SimilarityMatrix) -> np.ndarray:
    return np.diag(weights.strength) - weights.w


def laplacian_energy(weights: SimilarityMatrix) -> float:
    """Sum of squared strengths plus twice the sum of squared edge weights."""
    w = weights.w
    return float(np.sum(weights.strength**2) + np.sum(np.triu(w, k=1) ** 2) * 2.0)


def laplacian_centralities(weights: SimilarityMatrix) -> CentralityResult:
    """Relative energy drop from deleting each node, in closed form.

    Deleting node ``i`` removes ``x_i^2``, its incident ``2 w_ij^2`` terms,
    and lowers every other strength ``x_j`` by ``w_ij``; collecting terms
    gives ``x_i^2 + sum_j (2 x_j w_ij + w_ij^2)``, using the strengths of
    the full network.
    """
    if weights.node_count < 2:
        raise ConfigError("need at least two nodes")
    total = laplacian_energy(weights)
    if not total > 0:
        raise DegenerateInputError("Laplacian energy is zero")
    w, x = weights.w, weights.strength
    drop = x**2 + (2.0 * w * x[None, :] + w * w).sum(axis=1)
    return CentralityResult(total, drop, drop / total)


def _normalize(v: np.ndarray) -> np.ndarray:
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.ones_like(v)
    return (v - lo) / (hi - lo)


def minimum_distances(c, distances) -> list[DecisionPoint]:
    """Build the decision graph: distance to the nearest higher-centrality node.

    Equal centralities are ordered by node id, so node ``j`` ranks above
    ``i`` when ``c_j > c_i`` or ``c_j == c_i and j < i``. The single top
    node takes its largest distance to any node instead.
    """
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(distances, dtype=np.float64)
    n = c.size
    if d.shape != (n, n):
        raise ConfigError("centrality and distance sizes disagree")
    if n < 2:
        raise ConfigError("need at least two nodes")
    order = np.lexsort((np.arange(n), -c))
    delta = np.empty(n)
    nearest = [None] * n
    top = int(order[0])
    delta[top] = d[top].max()
    for rank in range(1, n):
        i = int(order[rank])
        higher = order[:rank]
        dist = d[i, higher]
        best = dist.min()
        nearest[i] = int(higher[dist == best].min())
        delta[i] = best
    gamma = _normalize(c) * _normalize(delta)
    return [DecisionPoint(i, float(c[i]), float(delta[i]), float(gamma[i]), nearest[i]) for i in range(n)]


def rank_by_gamma(points: list[DecisionPoint]) -> list[DecisionPoint]:
    return sorted(points, key=lambda p: (-p.gamma, p.node))


def auto_k(gammas, max_k: int | None = None) -> int:
    """Position of the largest ratio between consecutive sorted scores.

    ``gammas`` must be sorted descending. The search covers
    ``1 <= m <= min(N-1, ceil(sqrt(N)))`` unless ``max_k`` overrides the cap;
    scores are floored at machine epsilon and ties go to the smaller ``m``.
    """
    g = np.maximum(np.asarray(gammas, dtype=np.float64), EPS)
    n = g.size
    if n < 2:
        return 1
    cap = math.ceil(math.sqrt(n)) if max_k is None else max_k
    upper = max(1, min(n - 1, cap))
    ratios = g[:upper] / g[1 : upper + 1]
    return int(np.argmax(ratios)) + 1


def select_centers(points: list[DecisionPoint], embedding, k: int | None = None, max_k: int | None = None) -> CenterSet:
    """Pick the top-``k`` nodes by gamma, or choose ``k`` by the gap heuristic."""
    n = len(points)
    vectors = np.asarray(getattr(embedding, "vectors", embedding), dtype=np.float64)
    ranked = rank_by_gamma(points)
    if k is None:
        k = auto_k([p.gamma for p in ranked], max_k=max_k)
    elif not 1 <= k <= n:
        raise ConfigError(f"k must lie in 1..{n}, got {k}")
    centers = tuple(p.node for p in ranked[:k])
    return CenterSet(centers, vectors[list(centers)].copy())
