"""Lloyd's k-means from given seeds, and a random-initialization baseline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .embedding import substream
from .errors import ConfigError

STREAM_KMEANS_INIT = 4


@dataclass(frozen=True, eq=False)
class Partition:
    assignment: np.ndarray
    k: int

    def clusters(self) -> list[list[int]]:
        return [np.flatnonzero(self.assignment == c).tolist() for c in range(self.k)]


@dataclass(frozen=True, eq=False)
class KMeansResult:
    partition: Partition
    centroids: np.ndarray
    inertia: float
    iterations: int
    converged: bool


def _points(embedding) -> np.ndarray:
    x = np.asarray(getattr(embedding, "vectors", embedding), dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return x


def squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def inertia(embedding, partition, centroids) -> float:
    """Sum of squared Euclidean distances from each node to its centroid."""
    x = _points(embedding)
    assignment = np.asarray(getattr(partition, "assignment", partition))
    centroids = np.asarray(centroids, dtype=np.float64).reshape(-1, x.shape[1])
    if assignment.shape != (x.shape[0],):
        raise ConfigError("partition does not match the number of points")
    if assignment.size and (assignment.min() < 0 or assignment.max() >= centroids.shape[0]):
        raise ConfigError("assignment refers to a missing centroid")
    diff = x - centroids[assignment]
    return float(np.einsum("ij,ij->", diff, diff))


def _repair_empty(x, assignment, centroids, k):
    """Give each empty cluster the point farthest from its current centroid."""
    counts = np.bincount(assignment, minlength=k)
    for c in np.flatnonzero(counts == 0):
        resid = np.einsum("ij,ij->i", x - centroids[assignment], x - centroids[assignment])
        donor = int(np.argmax(resid))
        if resid[donor] == 0.0:
            break  # every point sits on its centroid; nothing to move
        assignment[donor] = c
        centroids[c] = x[donor]
    return assignment


def kmeans_seeded(
    embedding,
    initial_centroids,
    max_iter: int = 300,
    tol: float = 1e-6,
    callback: Callable[[str, np.ndarray, np.ndarray], None] | None = None,
) -> KMeansResult:
    """Lloyd iterations starting from ``initial_centroids``.

    Each iteration assigns every point to its nearest centroid (ties to the
    lowest centroid id), refills empty clusters, then moves centroids to
    their cluster means. Stops once no centroid moves farther than ``tol``
    or after ``max_iter`` iterations.

    ``callback(step, assignment, centroids)`` is invoked after every
    ``"assign"`` and ``"update"`` step, mostly for tests that check the
    objective never increases.
    """
    x = _points(embedding)
    centroids = np.array(initial_centroids, dtype=np.float64).reshape(-1, x.shape[1])
    n, k = x.shape[0], centroids.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"need 1 <= K <= N, got K={k}, N={n}")
    if max_iter < 1 or tol < 0:
        raise ConfigError("max_iter must be >= 1 and tol >= 0")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(centroids))):
        raise ConfigError("points and centroids must be finite")

    converged = False
    it = 0
    assignment = np.zeros(n, dtype=np.int64)
    while it < max_iter:
        it += 1
        assignment = np.argmin(squared_distances(x, centroids), axis=1)
        assignment = _repair_empty(x, assignment, centroids, k)
        if callback is not None:
            callback("assign", assignment.copy(), centroids.copy())
        new = centroids.copy()
        for c in range(k):
            members = x[assignment == c]
            if len(members):
                new[c] = members.mean(axis=0)
        shift = np.sqrt(np.max(np.sum((new - centroids) ** 2, axis=1)))
        centroids = new
        if callback is not None:
            callback("update", assignment.copy(), centroids.copy())
        if shift <= tol:
            converged = True
            break
    return KMeansResult(Partition(assignment, k), centroids, inertia(x, assignment, centroids), it, converged)


def kmeans_random_init(embedding, k: int, seed: int, max_iter: int = 300, tol: float = 1e-6) -> KMeansResult:
    """Baseline: seed from ``k`` distinct nodes drawn uniformly at random."""
    x = _points(embedding)
    if not 1 <= k <= x.shape[0]:
        raise ConfigError(f"need 1 <= k <= N, got k={k}, N={x.shape[0]}")
    picks = substream(seed, STREAM_KMEANS_INIT).choice(x.shape[0], size=k, replace=False)
    return kmeans_seeded(x, x[picks], max_iter=max_iter, tol=tol)
