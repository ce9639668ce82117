import math
import numpy as np
from sklearn.cluster import KMeans
from pytpc.common.dataset import ViewMatrix


class DegenerateData(ValueError):
    """ A view has fewer distinct rows than the requested number of anchors. """
    pass


def anchor_count(n, anchor_rate):
    """ m = ceil(anchor_rate * n), clipped to [1, n]. """
    if not 0 < anchor_rate <= 1:
        raise ValueError("anchor_rate must lie in (0, 1], got {}".format(anchor_rate))
    return min(n, max(1, int(math.ceil(anchor_rate * n - 1.0E-9))))


def select_anchors(view, m: int, seed: int = 0, maxiter: int = 100, tol: float = 1.0E-6):
    """ Select m anchors of a view as k-means centroids.

    k-means++ seeding with a fixed seed followed by at most maxiter Lloyd iterations.

    Args:
        view (ViewMatrix or np.ndarray): n x d feature matrix.
        m (int): number of anchors, 1 <= m <= n.
        seed (int): random state of k-means.

    Returns:
        np.ndarray of shape [m, d].
    """
    X = view.values if isinstance(view, ViewMatrix) else np.asarray(view, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= m <= n:
        raise ValueError("number of anchors must lie in [1, {}], got {}".format(n, m))
    ndistinct = np.unique(X, axis=0).shape[0]
    if ndistinct < m:
        raise DegenerateData("{} anchors requested but view has only {} distinct rows".format(
            m, ndistinct))
    km = KMeans(n_clusters=m, init="k-means++", n_init=1, max_iter=maxiter, tol=tol,
                random_state=seed)
    km.fit(X)
    return km.cluster_centers_
