""" Clustering evaluation: ACC, NMI and Purity.

All metrics compare a predicted label vector with a ground-truth label vector of
the same length and are invariant to renaming the labels of either vector.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix


class LengthMismatch(ValueError):
    """ Predicted and true label vectors have different lengths. """
    pass


def _check_labels(pred, truth):
    pred = np.asarray(pred, dtype=int).ravel()
    truth = np.asarray(truth, dtype=int).ravel()
    if pred.shape != truth.shape:
        raise LengthMismatch("{} predicted labels vs {} true labels".format(
            pred.size, truth.size))
    if pred.size == 0:
        raise ValueError("empty label vectors")
    return pred, truth


def square_contingency(pred, truth):
    """ Contingency table (rows = true classes, columns = predicted clusters), zero padded to square. """
    C = contingency_matrix(truth, pred)
    k = max(C.shape)
    Cs = np.zeros((k, k), dtype=np.int64)
    Cs[:C.shape[0], :C.shape[1]] = C
    return Cs


def optimal_assignment(cost):
    """ Permutation perm minimizing sum_i cost[i, perm[i]] (Hungarian algorithm).

    Args:
        cost (array_like): square matrix with finite entries.

    Returns:
        np.ndarray of int, perm[i] is the column assigned to row i.
    """
    cost = np.asarray(cost, dtype=np.float64)
    assert cost.ndim == 2 and cost.shape[0] == cost.shape[1], "cost matrix must be square"
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix contains NaN or Inf")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=int)
    perm[rows] = cols
    return perm


def acc(pred, truth):
    """ Clustering accuracy under the best one-to-one cluster-to-class mapping. """
    pred, truth = _check_labels(pred, truth)
    C = square_contingency(pred, truth)
    perm = optimal_assignment(-C)
    return float(C[np.arange(C.shape[0]), perm].sum()) / pred.size


def nmi(pred, truth):
    """ Normalized mutual information with the geometric-mean normalization sqrt(H(pred) H(truth)). """
    pred, truth = _check_labels(pred, truth)
    return float(normalized_mutual_info_score(truth, pred, average_method="geometric"))


def purity(pred, truth):
    """ Fraction of samples belonging to the majority class of their cluster. """
    pred, truth = _check_labels(pred, truth)
    C = contingency_matrix(truth, pred)
    return float(C.max(axis=0).sum()) / pred.size


def evaluate(pred, truth):
    """ Dict with acc, nmi and purity. """
    return {"acc": acc(pred, truth), "nmi": nmi(pred, truth), "purity": purity(pred, truth)}
