"""Agreement between a predicted partition and ground truth: pairwise ACC and NMI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConfigError


def _labels(x) -> np.ndarray:
    for attr in ("assignment", "labels"):
        if hasattr(x, attr):
            x = getattr(x, attr)
            break
    return np.asarray(x)


def contingency(pred, truth) -> np.ndarray:
    """Count table with predicted clusters as rows and true communities as columns."""
    a, b = _labels(pred), _labels(truth)
    if a.shape != b.shape or a.ndim != 1:
        raise ConfigError(f"partitions cover different node sets ({a.shape} vs {b.shape})")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max(initial=-1) + 1, bi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


@dataclass(frozen=True)
class PairCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def _pairs(n) -> int:
    n = np.asarray(n, dtype=object)
    return int(np.sum(n * (n - 1) // 2)) if n.size else 0


def pair_counts(pred, truth) -> PairCounts:
    """Classify every unordered node pair by co-membership in pred vs. truth."""
    table = contingency(pred, truth)
    total = _pairs(table.sum())
    same_both = _pairs(table.ravel())
    same_pred = _pairs(table.sum(axis=1))
    same_true = _pairs(table.sum(axis=0))
    fp = same_pred - same_both
    fn = same_true - same_both
    return PairCounts(tp=same_both, tn=total - same_both - fp - fn, fp=fp, fn=fn)


def accuracy(pred, truth) -> float:
    """``(TP + TN) / all pairs``, i.e. the Rand index."""
    counts = pair_counts(pred, truth)
    if counts.total == 0:
        raise ConfigError("accuracy needs at least two nodes")
    return (counts.tp + counts.tn) / counts.total


def best_map_accuracy(pred, truth) -> float:
    """Fraction of nodes correct under the best one-to-one cluster/label matching."""
    table = contingency(pred, truth)
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum() / table.sum())


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    # fsum is order independent, so relabeling cannot change the result
    return -math.fsum(p * np.log(p))


def _same_partition(table: np.ndarray) -> bool:
    # identical set partitions <=> the table is a permutation of a diagonal
    return bool(np.all((table > 0).sum(axis=0) == 1) and np.all((table > 0).sum(axis=1) == 1))


def information(pred, truth) -> tuple[float, float, float, np.ndarray]:
    """``(mi, h_pred, h_true, table)`` in nats."""
    table = contingency(pred, truth)
    n = int(table.sum())
    if n == 0:
        raise ConfigError("empty partitions")
    row, col = table.sum(axis=1), table.sum(axis=0)
    nz = np.nonzero(table)
    nij = table[nz].astype(np.float64)
    mi = math.fsum(nij / n * np.log(nij * n / (row[nz[0]] * col[nz[1]])))
    return max(mi, 0.0), _entropy(row, n), _entropy(col, n), table


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of both entropies.

    When either partition has zero entropy the score is 1 if the two
    partitions are identical as set partitions, otherwise 0.
    """
    mi, h_pred, h_true, table = information(pred, truth)
    if h_pred == 0.0 or h_true == 0.0:
        return 1.0 if _same_partition(table) else 0.0
    return float(min(1.0, mi / np.sqrt(h_pred * h_true)))


@dataclass(frozen=True, eq=False)
class MetricsReport:
    acc: float
    nmi: float
    best_map_acc: float
    mi: float
    h_pred: float
    h_true: float
    pairs: PairCounts
    contingency: np.ndarray

    def to_dict(self) -> dict:
        return {
            "acc_pairwise": self.acc,
            "nmi": self.nmi,
            "acc_best_map": self.best_map_acc,
            "mi": self.mi,
            "h_pred": self.h_pred,
            "h_true": self.h_true,
            "pairs": {"tp": self.pairs.tp, "tn": self.pairs.tn, "fp": self.pairs.fp, "fn": self.pairs.fn},
            "contingency": self.contingency.tolist(),
        }


def evaluate(pred, truth) -> MetricsReport:
    mi, h_pred, h_true, table = information(pred, truth)
    return MetricsReport(
        acc=accuracy(pred, truth),
        nmi=nmi(pred, truth),
        best_map_acc=best_map_accuracy(pred, truth),
        mi=mi,
        h_pred=h_pred,
        h_true=h_true,
        pairs=pair_counts(pred, truth),
        contingency=table,
    )
