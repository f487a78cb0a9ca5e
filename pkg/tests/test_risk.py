"""Ranking risk and AUC against brute-force pair enumeration."""

import numpy as np
import pytest

from gibbsrank.risk import (
    DegenerateDataError,
    auc,
    empirical_rank_risk,
    excess_risk_proxy,
    risk_report,
)


def brute_risk(scores, labels, tie_value=0.0):
    """O(n^2) oracle: average discordance over all ordered pairs."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    n = len(scores)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            prod = (labels[i] - labels[j]) * (scores[i] - scores[j])
            if prod < 0:
                total += 1.0
            elif prod == 0 and labels[i] != labels[j]:
                total += tie_value
    return total / (n * (n - 1))


def brute_auc(scores, labels, tie_policy="half"):
    """O(n^2) oracle over all (positive, negative) pairs."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels > 0)
    neg = np.flatnonzero(labels <= 0)
    credit = 0.0
    for i in pos:
        for j in neg:
            if scores[i] > scores[j]:
                credit += 1.0
            elif scores[i] == scores[j] and tie_policy == "half":
                credit += 0.5
    return credit / (len(pos) * len(neg))


def random_instance(rng):
    n = int(rng.integers(2, 51))
    # coarse integer scores inject plenty of exact ties
    scores = rng.integers(0, 6, size=n).astype(float)
    labels = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    if np.all(labels > 0) or np.all(labels <= 0):
        labels[0] = -labels[0]
    return scores, labels


def test_risk_concordant_pair():
    assert empirical_rank_risk([1.0, 2.0], [-1.0, 1.0]) == 0.0


def test_risk_discordant_pair():
    assert empirical_rank_risk([2.0, 1.0], [-1.0, 1.0]) == 1.0


def test_risk_matches_brute_force():
    rng = np.random.default_rng(42)
    for _ in range(200):
        scores, labels = random_instance(rng)
        for tie_value in (0.0, 0.5):
            assert empirical_rank_risk(scores, labels, tie_value) == pytest.approx(
                brute_risk(scores, labels, tie_value), abs=1e-15
            )


def test_risk_needs_two_instances():
    with pytest.raises(DegenerateDataError):
        empirical_rank_risk([1.0], [1.0])


def test_risk_single_class_is_zero():
    assert empirical_rank_risk([3.0, 1.0, 2.0], [1.0, 1.0, 1.0]) == 0.0


def test_auc_perfect_separation():
    scores = np.array([-1.0, 1.0, -1.0, 1.0])
    labels = scores.copy()
    assert auc(scores, labels, "strict") == 1.0
    assert auc(scores, labels, "half") == 1.0


def test_auc_constant_scores():
    labels = np.array([1.0, -1.0, 1.0, -1.0])
    scores = np.zeros(4)
    assert auc(scores, labels, "strict") == 0.0
    assert auc(scores, labels, "half") == 0.5


def test_auc_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(200):
        scores, labels = random_instance(rng)
        for policy in ("strict", "half"):
            assert auc(scores, labels, policy) == pytest.approx(
                brute_auc(scores, labels, policy), abs=1e-15
            )


def test_auc_rejects_unknown_policy():
    with pytest.raises(ValueError):
        auc([1.0, 2.0], [-1.0, 1.0], "lenient")


def test_auc_single_class_raises():
    with pytest.raises(DegenerateDataError):
        auc([1.0, 2.0], [1.0, 1.0])


def test_excess_risk_zero_for_identical_scorer():
    rng = np.random.default_rng(0)
    eta = rng.random(30)
    labels = np.where(rng.random(30) < eta, 1.0, -1.0)
    assert excess_risk_proxy(eta, eta, labels) == 0.0


def test_excess_risk_invariant_to_increasing_transform():
    rng = np.random.default_rng(1)
    eta = rng.random(30)
    labels = np.where(rng.random(30) < eta, 1.0, -1.0)
    assert excess_risk_proxy(2.0 * eta + 3.0, eta, labels) == 0.0


def test_excess_risk_matches_brute_force():
    rng = np.random.default_rng(2)
    eta = rng.random(30)
    labels = np.where(rng.random(30) < eta, 1.0, -1.0)
    scores = rng.random(30)
    expected = brute_risk(scores, labels) - brute_risk(eta, labels)
    assert excess_risk_proxy(scores, eta, labels) == pytest.approx(expected, abs=1e-15)


def test_excess_risk_requires_eta():
    with pytest.raises(ValueError):
        excess_risk_proxy([1.0, 2.0], None, [-1.0, 1.0])


def test_risk_report_consistent_with_components():
    rng = np.random.default_rng(3)
    scores, labels = random_instance(rng)
    report = risk_report(scores, labels)
    assert report.L_n == empirical_rank_risk(scores, labels)
    assert report.auc_strict == auc(scores, labels, "strict")
    assert report.auc_tie_half == auc(scores, labels, "half")
    assert report.n_pos == int(np.sum(labels > 0))
    assert report.n_neg == int(np.sum(labels <= 0))


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        empirical_rank_risk([1.0, 2.0, 3.0], [1.0, -1.0])
