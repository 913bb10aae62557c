"""DeepWalk: truncated random walks fed to skip-gram with negative sampling.

All randomness derives from a single integer seed through named
``numpy.random.SeedSequence`` substreams, so walks, initialization and
negative sampling are each reproducible on their own.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numba
import numpy as np

from .errors import ConfigError, ParseError
from .graph import Graph

# substream ids under the user seed
STREAM_WALKS = 0
STREAM_INIT = 1
STREAM_NEGATIVES = 2
STREAM_LOSS = 3


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """Walks stored as a ``-1``-padded ``(M, walk_length)`` int array.

    Row ``r * N + v`` is the ``r``-th walk started at node ``v``.
    """

    walks: np.ndarray
    lengths: np.ndarray
    walks_per_node: int
    walk_length: int
    node_count: int

    def __len__(self) -> int:
        return self.walks.shape[0]

    def __iter__(self) -> Iterator[list[int]]:
        for row, n in zip(self.walks, self.lengths):
            yield row[:n].tolist()

    @property
    def token_count(self) -> int:
        return int(self.lengths.sum())

    def to_text(self, node_names: Sequence[str]) -> str:
        """One walk per line, node names separated by single spaces."""
        return "".join(" ".join(node_names[v] for v in walk) + "\n" for walk in self)


@dataclass(frozen=True)
class SkipGramParams:
    window: int = 5
    epochs: int = 5
    negative_samples: int = 5
    learning_rate: float = 0.025
    min_learning_rate: float = 0.0001
    seed: int = 0

    def __post_init__(self):
        if self.window < 1 or self.epochs < 1 or self.negative_samples < 1:
            raise ConfigError("window, epochs and negative_samples must all be >= 1")
        if not (self.learning_rate > 0 and self.min_learning_rate >= 0):
            raise ConfigError("learning_rate must be positive and min_learning_rate nonnegative")


@dataclass(frozen=True, eq=False)
class Embedding:
    """Node vectors; row ``i`` embeds node ``i``.

    ``context_vectors`` carries the output-side matrix when the embedding
    came from training, which is only needed to evaluate the loss.
    """

    vectors: np.ndarray
    context_vectors: np.ndarray | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def node_count(self) -> int:
        return self.vectors.shape[0]


def generate_walks(graph: Graph, walks_per_node: int, walk_length: int, seed: int) -> WalkCorpus:
    """Uniform-neighbor random walks, ``walks_per_node`` from every node.

    Edge weights are ignored. Each start node draws from its own generator
    derived from ``(seed, node)`` so the result does not depend on the order
    nodes are processed in.
    """
    n = graph.node_count
    if n < 1:
        raise ConfigError("graph must have at least one node")
    if walks_per_node < 1 or walk_length < 1:
        raise ConfigError("walks_per_node and walk_length must be >= 1")
    indptr, indices, _ = graph.csr
    degree = np.diff(indptr)
    walks = np.full((walks_per_node, n, walk_length), -1, dtype=np.int64)
    lengths = np.ones((walks_per_node, n), dtype=np.int64)
    for start in range(n):
        rng = substream(seed, STREAM_WALKS, start)
        draws = rng.random((walks_per_node, walk_length - 1))
        cur = np.full(walks_per_node, start, dtype=np.int64)
        walks[:, start, 0] = start
        if degree[start] == 0:
            continue
        # undirected: every node reached from a neighbor has degree >= 1
        for step in range(1, walk_length):
            deg = degree[cur]
            pick = np.minimum((draws[:, step - 1] * deg).astype(np.int64), deg - 1)
            cur = indices[indptr[cur] + pick]
            walks[:, start, step] = cur
        lengths[:, start] = walk_length
    return WalkCorpus(
        walks=walks.reshape(walks_per_node * n, walk_length),
        lengths=lengths.reshape(-1),
        walks_per_node=walks_per_node,
        walk_length=walk_length,
        node_count=n,
    )


def noise_distribution(corpus: WalkCorpus, power: float = 0.75) -> np.ndarray:
    """Unigram token frequencies raised to ``power`` and renormalized."""
    tokens = corpus.walks[corpus.walks >= 0]
    counts = np.bincount(tokens, minlength=corpus.node_count).astype(np.float64)
    weights = counts**power
    return weights / weights.sum()


def _lcg_seed(seed: int) -> np.uint64:
    state = np.random.SeedSequence(int(seed), spawn_key=(STREAM_NEGATIVES,)).generate_state(1, np.uint64)[0]
    return np.uint64(state)


@numba.njit(cache=True)
def _sigmoid(x):
    if x > 30.0:
        return 1.0
    if x < -30.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


@numba.njit(cache=True)
def _count_pairs(walks, lengths, window):
    total = 0
    for r in range(walks.shape[0]):
        n = lengths[r]
        for p in range(n):
            lo = max(0, p - window)
            hi = min(n, p + window + 1)
            total += hi - lo - 1
    return total


@numba.njit(cache=True)
def _train(walks, lengths, w_in, w_out, cum_noise, window, epochs, negative, lr0, lr_min, state):
    dim = w_in.shape[1]
    n_nodes = cum_noise.shape[0]
    per_epoch = _count_pairs(walks, lengths, window)
    total = per_epoch * epochs
    if total == 0:
        return
    grad = np.zeros(dim)
    done = 0
    for _ in range(epochs):
        for r in range(walks.shape[0]):
            n = lengths[r]
            for p in range(n):
                center = walks[r, p]
                lo = max(0, p - window)
                hi = min(n, p + window + 1)
                for q in range(lo, hi):
                    if q == p:
                        continue
                    lr = lr0 - (lr0 - lr_min) * done / total
                    if lr < lr_min:
                        lr = lr_min
                    done += 1
                    for k in range(dim):
                        grad[k] = 0.0
                    for s in range(negative + 1):
                        if s == 0:
                            target = walks[r, q]
                            label = 1.0
                        else:
                            # 64-bit LCG (MMIX constants); top 53 bits -> uniform [0, 1)
                            state = state * np.uint64(6364136223846793005) + np.uint64(1442695040888963407)
                            u = (state >> np.uint64(11)) * (1.0 / 9007199254740992.0)
                            target = np.searchsorted(cum_noise, u, side="right")
                            if target >= n_nodes:
                                target = n_nodes - 1
                            if target == walks[r, q]:
                                continue
                            label = 0.0
                        dot = 0.0
                        for k in range(dim):
                            dot += w_in[center, k] * w_out[target, k]
                        g = (label - _sigmoid(dot)) * lr
                        for k in range(dim):
                            grad[k] += g * w_out[target, k]
                            w_out[target, k] += g * w_in[center, k]
                    for k in range(dim):
                        w_in[center, k] += grad[k]


def initial_vectors(node_count: int, dim: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Input vectors uniform in ``[-0.5/dim, 0.5/dim]``; output vectors zero."""
    rng = substream(seed, STREAM_INIT)
    w_in = (rng.random((node_count, dim)) - 0.5) / dim
    return w_in, np.zeros((node_count, dim))


def train_skipgram(corpus: WalkCorpus, dim: int, params: SkipGramParams | None = None) -> Embedding:
    """Fit skip-gram with negative sampling by plain sequential SGD.

    Every ordered (center, context) pair within ``params.window`` positions
    is one SGD step; the learning rate decays linearly over all steps of all
    epochs down to ``min_learning_rate``. Negatives follow the unigram^0.75
    distribution of corpus tokens; a draw equal to the true context is
    skipped.
    """
    params = params or SkipGramParams()
    if len(corpus) == 0:
        raise ConfigError("corpus is empty")
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    w_in, w_out = initial_vectors(corpus.node_count, dim, params.seed)
    cum = np.cumsum(noise_distribution(corpus))
    _train(
        corpus.walks,
        corpus.lengths,
        w_in,
        w_out,
        cum,
        params.window,
        params.epochs,
        params.negative_samples,
        float(params.learning_rate),
        float(params.min_learning_rate),
        _lcg_seed(params.seed),
    )
    return Embedding(w_in, w_out)


def training_pairs(corpus: WalkCorpus, window: int) -> tuple[np.ndarray, np.ndarray]:
    """All ordered (center, context) pairs within ``window`` positions."""
    walks, lengths = corpus.walks, corpus.lengths
    centers, contexts = [], []
    for off in range(1, window + 1):
        if off >= corpus.walk_length:
            break
        valid = np.arange(corpus.walk_length - off)[None, :] + off < lengths[:, None]
        a = walks[:, :-off][valid]
        b = walks[:, off:][valid]
        centers += [a, b]
        contexts += [b, a]
    if not centers:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def skipgram_loss(
    w_in: np.ndarray, w_out: np.ndarray, corpus: WalkCorpus, params: SkipGramParams, seed: int = 0
) -> float:
    """Mean negative-sampling loss per training pair.

    Negatives are drawn once from a dedicated substream of ``seed`` so two
    parameter sets can be compared on identical samples.
    """
    centers, contexts = training_pairs(corpus, params.window)
    if centers.size == 0:
        return float("nan")
    rng = substream(seed, STREAM_LOSS)
    neg = rng.choice(corpus.node_count, size=(centers.size, params.negative_samples), p=noise_distribution(corpus))
    pos = np.einsum("ij,ij->i", w_in[centers], w_out[contexts])
    negs = np.einsum("ij,ikj->ik", w_in[centers], w_out[neg])
    loss = -_log_sigmoid(pos) - _log_sigmoid(-negs).sum(axis=1)
    return float(loss.mean())


def embed_graph(
    graph: Graph,
    dim: int,
    walks_per_node: int,
    walk_length: int,
    params: SkipGramParams | None = None,
) -> Embedding:
    """Walks then skip-gram, both driven by ``params.seed``."""
    params = params or SkipGramParams()
    corpus = generate_walks(graph, walks_per_node, walk_length, params.seed)
    return train_skipgram(corpus, dim, params)


def format_embedding(embedding: Embedding, node_names: Sequence[str]) -> str:
    rows = []
    for name, vec in zip(node_names, embedding.vectors):
        rows.append("\t".join([name, *(repr(float(x)) for x in vec)]) + "\n")
    return "".join(rows)


def parse_embedding(text, node_names: Sequence[str] | None = None) -> tuple[list[str], Embedding]:
    """Read ``name<TAB>x1<TAB>...`` rows; reorders to ``node_names`` if given."""
    if isinstance(text, str):
        text = io.StringIO(text)
    names, rows = [], []
    for lineno, raw in enumerate(text, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        try:
            vec = [float(x) for x in parts[1:]]
        except ValueError:
            raise ParseError("non-numeric coordinate", lineno) from None
        if not vec or (rows and len(vec) != len(rows[0])):
            raise ParseError("inconsistent vector dimension", lineno)
        names.append(parts[0])
        rows.append(vec)
    vectors = np.asarray(rows, dtype=np.float64)
    if node_names is not None:
        pos = {n: i for i, n in enumerate(names)}
        missing = [n for n in node_names if n not in pos]
        if missing:
            raise ParseError(f"embedding lacks node(s) {missing[:5]}")
        vectors = vectors[[pos[n] for n in node_names]]
        names = list(node_names)
    return names, Embedding(vectors)
