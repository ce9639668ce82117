import itertools
import numpy as np
import pytest
from pytpc.metrics import LengthMismatch, acc, evaluate, nmi, optimal_assignment, purity


def brute_force_acc(pred, truth):
    K = max(pred.max(), truth.max()) + 1
    return max(np.mean(np.array(perm)[pred] == truth) for perm in itertools.permutations(range(K)))


def direct_nmi(pred, truth):
    n = pred.size
    C = np.zeros((pred.max() + 1, truth.max() + 1))
    np.add.at(C, (pred, truth), 1)
    P = C / n
    pa, pb = P.sum(axis=1), P.sum(axis=0)
    nz = P > 0
    mi = np.sum(P[nz] * np.log(P[nz] / np.outer(pa, pb)[nz]))
    ha = -np.sum(pa[pa > 0] * np.log(pa[pa > 0]))
    hb = -np.sum(pb[pb > 0] * np.log(pb[pb > 0]))
    return mi / np.sqrt(ha * hb)


def test_assignment_identity():
    cost = np.ones((4, 4)) - np.eye(4)
    assert list(optimal_assignment(cost)) == [0, 1, 2, 3]


def test_assignment_brute_force(rng):
    for _ in range(20):
        cost = rng.integers(0, 10, size=(3, 3))
        perm = optimal_assignment(cost)
        best = min(sum(cost[i, p[i]] for i in range(3)) for p in itertools.permutations(range(3)))
        assert sorted(perm) == [0, 1, 2]
        assert sum(cost[i, perm[i]] for i in range(3)) == best


def test_assignment_ties():
    cost = np.array([[0., 0.], [0., 0.]])
    perm = optimal_assignment(cost)
    assert sorted(perm) == [0, 1]
    assert cost[[0, 1], perm].sum() == 0


def test_acc():
    truth = np.array([1, 1, 0, 0, 2, 2])
    assert acc(truth, truth) == 1.0
    assert acc(np.array([2, 2, 0, 0, 1, 1]), truth) == 1.0
    assert acc(np.array([0, 0, 1, 1, 2, 2]), truth) == 1.0
    assert acc(np.array([0, 0, 0, 1, 2, 2]), truth) == pytest.approx(5 / 6)


def test_acc_brute_force(rng):
    for _ in range(10):
        pred, truth = rng.integers(0, 4, size=30), rng.integers(0, 4, size=30)
        assert acc(pred, truth) == pytest.approx(brute_force_acc(pred, truth))


def test_acc_unequal_cluster_counts():
    assert acc(np.array([0, 0, 0, 0]), np.array([0, 0, 1, 1])) == 0.5
    assert acc(np.array([0, 1, 2, 3]), np.array([0, 0, 1, 1])) == 0.5


def test_nmi():
    truth = np.array([0, 0, 1, 1, 2, 2])
    assert nmi(truth, truth) == pytest.approx(1.0)
    assert nmi(np.zeros(4, dtype=int), np.array([0, 0, 1, 1])) == pytest.approx(0.0)
    assert nmi(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1])) == pytest.approx(0.0, abs=1e-12)
    pred, truth = np.array([0, 0, 1, 1]), np.array([0, 0, 1, 2])
    assert nmi(pred, truth) == pytest.approx(direct_nmi(pred, truth))
    assert nmi(pred, truth) == pytest.approx(1 / np.sqrt(1.5))


def test_purity():
    truth = np.array([0, 1, 1, 1, 0])
    assert purity(truth, truth) == 1.0
    assert purity(np.array([0, 0, 1, 1, 1]), truth) == pytest.approx(0.6)
    assert purity(np.zeros(6, dtype=int), np.array([0, 0, 1, 1, 2, 2])) == pytest.approx(1 / 3)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        acc([0, 1], [0, 1, 1])
    with pytest.raises(LengthMismatch):
        evaluate([0], [0, 1])


def test_evaluate_keys():
    scores = evaluate([0, 1, 1], [1, 0, 0])
    assert scores == {"acc": 1.0, "nmi": pytest.approx(1.0), "purity": 1.0}


def test_metrics_invariant_to_renaming_both_vectors(rng):
    truth = rng.integers(0, 4, 200)
    pred = np.where(rng.random(200) < 0.7, truth, rng.integers(0, 4, 200))
    scores = evaluate(pred, truth)
    for _ in range(20):
        rename_pred, rename_truth = rng.permutation(4), rng.permutation(4)
        renamed = evaluate(rename_pred[pred], rename_truth[truth])
        for key, value in scores.items():
            assert renamed[key] == pytest.approx(value, abs=1e-12)
