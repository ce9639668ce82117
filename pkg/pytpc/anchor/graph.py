import warnings
from dataclasses import dataclass
from typing import Optional
import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from pytpc.common.dataset import MultiViewDataset, ViewMatrix
from pytpc.common.parallel import parallel_map
from pytpc.common.tensor import DimensionMismatch
from pytpc.anchor.selection import anchor_count, select_anchors


class TiedDistanceDegenerate(UserWarning):
    """ The k+1 nearest anchors of a sample are equidistant; uniform weights were used. """
    pass


# smallest admissible denominator of the adaptive-neighbor weights
tie_eps = 1.0E-12


@dataclass
class AnchorConfig:
    """ Anchor graph parameters.

    Attributes:
        anchor_rate (float): m = ceil(anchor_rate * n) anchors per view.
        n_anchors (int): explicit anchor count m, overrides anchor_rate when set.
        k (int): non-zeros per anchor graph row.
        seed (int): k-means seed, shared by all views.
        align (bool): reorder the anchors of every view to match those of view 0.
    """
    anchor_rate: float = 0.5
    k: int = 5
    seed: int = 0
    n_anchors: Optional[int] = None
    align: bool = True

    def __post_init__(self):
        if not 0 < self.anchor_rate <= 1:
            raise ValueError("anchor_rate must lie in (0, 1], got {}".format(self.anchor_rate))
        if self.k < 1:
            raise ValueError("k must be positive, got {}".format(self.k))
        if self.n_anchors is not None and self.n_anchors < 2:
            raise ValueError("n_anchors must be at least 2, got {}".format(self.n_anchors))


class AnchorGraph(object):
    """ Sparse row-stochastic sample-to-anchor similarity matrix of one view.

    Attributes:
        weights (scipy.sparse.csr_matrix, shape = [n, m]): non-negative, every row sums to 1
            and has at most k non-zeros.
        k (int): maximal number of non-zeros per row.
    """

    def __init__(self, weights, k: int):
        self.weights = sp.csr_matrix(weights)
        self.k = k

    @property
    def n(self):
        return self.weights.shape[0]

    @property
    def m(self):
        return self.weights.shape[1]

    def toarray(self):
        return self.weights.toarray()

    def row(self, i):
        """ (anchor index, weight) pairs of row i. """
        r = self.weights[i]
        return list(zip(r.indices.tolist(), r.data.tolist()))

    def __repr__(self):
        return "AnchorGraph n={} m={} k={} nnz={}".format(self.n, self.m, self.k, self.weights.nnz)


def build_anchor_graph(view, anchors, k: int):
    r""" Closed-form adaptive-neighbor anchor graph.

    For sample i with squared distances :math:`d_{i,(1)} \leq \dots \leq d_{i,(m)}` to the
    anchors, the k nearest anchors get

    .. math::
        s_{i,(j)} = \frac{d_{i,(k+1)} - d_{i,(j)}}{k d_{i,(k+1)} - \sum_{j'=1}^k d_{i,(j')}}

    and all other anchors get zero. If the denominator is below tie_eps the k nearest
    anchors get 1/k each.

    Args:
        view (ViewMatrix or np.ndarray): n x d features.
        anchors (np.ndarray): m x d anchors.
        k (int): 1 <= k < m.

    Returns:
        AnchorGraph
    """
    X = view.values if isinstance(view, ViewMatrix) else np.asarray(view, dtype=np.float64)
    anchors = np.asarray(anchors, dtype=np.float64)
    n, m = X.shape[0], anchors.shape[0]
    if not 1 <= k < m:
        raise ValueError("k must satisfy 1 <= k < m = {}, got {}".format(m, k))

    D = cdist(X, anchors, metric="sqeuclidean")
    order = np.argsort(D, axis=1, kind="stable")[:, :k + 1]
    Dk = np.take_along_axis(D, order, axis=1)
    dnext = Dk[:, k]
    denom = k * dnext - np.sum(Dk[:, :k], axis=1)

    W = np.empty((n, k))
    tied = denom < tie_eps
    ok = ~tied
    W[ok] = (dnext[ok, None] - Dk[ok, :k]) / denom[ok, None]
    if np.any(tied):
        warnings.warn("{} samples have equidistant nearest anchors; using uniform weights".format(
            int(np.sum(tied))), TiedDistanceDegenerate)
        W[tied] = 1. / k

    rows = np.repeat(np.arange(n), k)
    S = sp.csr_matrix((W.ravel(), (rows, order[:, :k].ravel())), shape=(n, m))
    S.eliminate_zeros()
    return AnchorGraph(S, k)


def stack_anchor_tensor(graphs: list):
    """ Stack V anchor graphs into an n x m x V tensor, frontal slice v = graph v. """
    if len(graphs) < 1:
        raise ValueError("no anchor graphs to stack")
    shapes = set((g.n, g.m) for g in graphs)
    if len(shapes) != 1:
        raise DimensionMismatch("anchor graphs have different shapes: {}".format(
            [(g.n, g.m) for g in graphs]))
    return np.stack([g.toarray() for g in graphs], axis=2)


def align_anchor_graphs(graphs: list, anchors: list = None):
    """ Reorder the anchors of views 1..V-1 to match those of view 0.

    Anchor l of view v is matched to anchor j of view 0 by maximizing the total
    co-membership sum_i S^(0)[i, j] S^(v)[i, l] over one-to-one assignments (Hungarian
    algorithm), then the columns of S^(v) and the rows of its anchor matrix are permuted.
    After alignment anchor j of every view is close to the same group of samples.

    Args:
        graphs (list of AnchorGraph): one graph per view, all n x m.
        anchors (list of np.ndarray): optional m x d_v anchor matrices, permuted alike.

    Returns:
        (list of AnchorGraph, list of anchor matrices or None, list of permutations)
    """
    if len(set((g.n, g.m) for g in graphs)) != 1:
        raise DimensionMismatch("anchor graphs have different shapes: {}".format(
            [(g.n, g.m) for g in graphs]))
    reference = graphs[0].weights.T.tocsr()
    perms = [np.arange(graphs[0].m)]
    for g in graphs[1:]:
        C = (reference @ g.weights).toarray()
        rows, cols = linear_sum_assignment(C, maximize=True)
        perm = np.empty(g.m, dtype=int)
        perm[rows] = cols
        perms.append(perm)
    aligned = [AnchorGraph(g.weights[:, perm], g.k) for g, perm in zip(graphs, perms)]
    if anchors is not None:
        anchors = [np.asarray(a)[perm] for a, perm in zip(anchors, perms)]
    return aligned, anchors, perms


def resolve_sizes(n, cfg: AnchorConfig):
    """ Number of anchors m and neighbors k for n samples, with k clipped to m - 1. """
    m = cfg.n_anchors if cfg.n_anchors is not None else anchor_count(n, cfg.anchor_rate)
    k = cfg.k
    if k >= m:
        k = m - 1
        warnings.warn("k = {} is not below m = {}; using k = {}".format(cfg.k, m, k))
    return m, k


def select_view_anchors(dataset: MultiViewDataset, m, seed=0):
    """ m anchors per view, views processed in parallel when THREADS > 1. """
    return parallel_map(lambda view: select_anchors(view, m, seed=seed), dataset.views)


def build_view_graphs(dataset: MultiViewDataset, anchors: list, k):
    return parallel_map(lambda args: build_anchor_graph(args[0], args[1], k),
                        list(zip(dataset.views, anchors)))


def build_anchor_tensor(dataset: MultiViewDataset, cfg: AnchorConfig, standardize=True):
    """ Standardize every view, select anchors, build the graphs and stack them.

    Returns:
        (np.ndarray of shape [n, m, V], list of AnchorGraph)
    """
    if standardize:
        dataset = dataset.standardized()
    m, k = resolve_sizes(dataset.n, cfg)
    graphs = build_view_graphs(dataset, select_view_anchors(dataset, m, cfg.seed), k)
    if cfg.align:
        graphs = align_anchor_graphs(graphs)[0]
    return stack_anchor_tensor(graphs), graphs
