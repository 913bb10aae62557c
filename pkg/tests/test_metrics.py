import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elpmeans.errors import ConfigError
from elpmeans.metrics import (
    PairCounts,
    accuracy,
    best_map_accuracy,
    contingency,
    evaluate,
    information,
    nmi,
    pair_counts,
)


def brute_pairs(a, b):
    tp = tn = fp = fn = 0
    for i, j in itertools.combinations(range(len(a)), 2):
        sp, st_ = a[i] == a[j], b[i] == b[j]
        tp += sp and st_
        tn += (not sp) and (not st_)
        fp += sp and not st_
        fn += (not sp) and st_
    return PairCounts(tp, tn, fp, fn)


def test_pair_counts_hand_example():
    assert pair_counts([0, 0, 0, 1], [0, 0, 1, 1]) == PairCounts(tp=1, tn=2, fp=2, fn=1)


def test_identical_has_no_errors():
    c = pair_counts([2, 2, 0, 1, 1], [2, 2, 0, 1, 1])
    assert c.fp == c.fn == 0


def test_renamed_labels_same_counts():
    truth = [0, 0, 1, 1, 2]
    assert pair_counts(["x", "x", "y", "y", "z"], truth) == pair_counts(truth, truth)


def test_accuracy_values():
    assert accuracy([1, 1, 0, 0], [0, 0, 1, 1]) == 1.0
    assert accuracy([0, 0, 0, 1], [0, 0, 1, 1]) == 0.5
    with pytest.raises(ConfigError):
        accuracy([0], [0])


def test_nmi_identical_and_independent():
    assert nmi([0, 0, 1, 1], [0, 0, 1, 1]) == pytest.approx(1.0, abs=1e-12)
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == pytest.approx(0.0, abs=1e-12)


def test_nmi_zero_entropy_conventions():
    assert nmi([0, 0, 0, 0], [0, 0, 1, 1]) == 0.0
    assert nmi([5, 5, 5], [1, 1, 1]) == 1.0


def test_contingency_and_information_hand_values():
    table = contingency([0, 0, 1, 1], [0, 1, 0, 1])
    assert table.tolist() == [[1, 1], [1, 1]]
    mi, hp, ht, _ = information([0, 0, 1, 1], [0, 0, 1, 1])
    assert mi == pytest.approx(np.log(2)) and hp == pytest.approx(np.log(2)) and ht == pytest.approx(np.log(2))


def test_best_map_accuracy():
    assert best_map_accuracy([1, 1, 0, 0], [0, 0, 1, 1]) == 1.0
    assert best_map_accuracy([0, 0, 0, 1], [0, 0, 1, 1]) == 0.75


def test_mismatched_lengths():
    with pytest.raises(ConfigError):
        pair_counts([0, 1], [0, 1, 1])


def test_report_keys():
    rep = evaluate([0, 0, 1], [0, 0, 1]).to_dict()
    assert {"acc_pairwise", "acc_best_map", "nmi", "mi", "h_pred", "h_true", "pairs", "contingency"} <= set(rep)


@pytest.mark.parametrize("seed", range(200))
def test_pair_counts_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 201))
    a = rng.integers(0, rng.integers(1, 8), size=n)
    b = rng.integers(0, rng.integers(1, 8), size=n)
    got = pair_counts(a, b)
    assert got == brute_pairs(a.tolist(), b.tolist())
    assert got.total == n * (n - 1) // 2


partitions = st.integers(2, 60).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n), st.lists(st.integers(0, 5), min_size=n, max_size=n))
)


@settings(max_examples=200, deadline=None)
@given(partitions)
def test_nmi_symmetric_and_bounded(pair):
    a, b = pair
    assert abs(nmi(a, b) - nmi(b, a)) <= 1e-12
    assert 0.0 <= nmi(a, b) <= 1.0
    mi, hp, ht, _ = information(a, b)
    assert 0.0 <= mi <= min(hp, ht) + 1e-12
    assert 0.0 <= accuracy(a, b) <= 1.0


@settings(max_examples=100, deadline=None)
@given(partitions, st.permutations(range(6)))
def test_label_permutation_invariance(pair, perm):
    a, b = pair
    renamed = [perm[x] for x in a]
    assert nmi(renamed, b) == nmi(a, b)
    assert accuracy(renamed, b) == accuracy(a, b)
