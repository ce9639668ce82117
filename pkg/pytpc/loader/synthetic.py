import io
import os
import numpy as np
from pytpc.common.dataset import ViewMatrix
from pytpc.loader.base import DatasetLoader, assemble
from pytpc.loader.text_loader import DatasetManifest


class InvalidParams(ValueError):
    """ Synthetic data parameters are inconsistent. """
    pass


def cluster_means(K, d, spacing, rng):
    """ K cluster means in R^d with pairwise distances >= spacing.

    d >= K: scaled orthonormal directions (pairwise distance spacing * sqrt(2));
    d < K: equally spaced points on a random line.
    """
    if d >= K:
        basis, _ = np.linalg.qr(rng.standard_normal((d, K)))
        return spacing * basis.T
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    return spacing * np.arange(K)[:, None] * direction[None, :]


def generate_synthetic(n: int, K: int, V: int, dims: list, separation: float = 10.0,
                       noise: float = 1.0, seed: int = 0):
    """ K isotropic Gaussian clusters per view with labels shared across views.

    Cluster sizes differ by at most one; cluster means of every view are at pairwise
    distance >= separation * noise and the per-feature noise standard deviation is noise.

    Returns:
        (MultiViewDataset with labels, np.ndarray of labels)
    """
    if K < 1 or V < 1:
        raise InvalidParams("K and V must be positive")
    if n < 2 * K:
        raise InvalidParams("n = {} is below 2 K = {}".format(n, 2 * K))
    if len(dims) != V:
        raise InvalidParams("{} feature dimensions given for {} views".format(len(dims), V))
    if any(d < 1 for d in dims):
        raise InvalidParams("feature dimensions must be positive")
    if separation <= 0 or noise <= 0:
        raise InvalidParams("separation and noise must be positive")

    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % K)
    views = []
    for v, d in enumerate(dims):
        means = cluster_means(K, d, separation * noise, rng)
        X = means[labels] + noise * rng.standard_normal((n, d))
        views.append(ViewMatrix(X, name="view{}".format(v)))
    return assemble(views, labels, "synthetic"), labels


def write_dataset(dataset, path, delimiter=","):
    """ Write views, labels and a manifest.json into folder path; returns the manifest path. """
    os.makedirs(path, exist_ok=True)
    views = []
    for v, view in enumerate(dataset.views):
        fname = os.path.join(path, "view{}.csv".format(v))
        np.savetxt(fname, view.values, delimiter=delimiter, fmt="%.17g")
        views.append(fname)
    labels = None
    if dataset.labels is not None:
        labels = os.path.join(path, "labels.txt")
        with io.open(labels, "w", encoding="utf8") as f:
            f.write("".join("{}\n".format(int(l)) for l in dataset.labels))
    manifest_path = os.path.join(path, "manifest.json")
    DatasetManifest(name=dataset.name, views=views, labels=labels,
                    delimiter=delimiter).to_json(manifest_path)
    return manifest_path


class SyntheticLoader(DatasetLoader):
    """ Loader generating Gaussian blobs, see generate_synthetic. """

    def __init__(self, n=300, K=4, V=3, dims=None, separation=10.0, noise=1.0, seed=0):
        super(SyntheticLoader, self).__init__("synthetic")
        self.n = n
        self.K = K
        self.V = V
        self.dims = list(dims) if dims is not None else [10] * V
        self.separation = separation
        self.noise = noise
        self.seed = seed

    def load(self):
        dataset, _ = generate_synthetic(self.n, self.K, self.V, self.dims, self.separation,
                                        self.noise, self.seed)
        return dataset

    def describe(self):
        return "SyntheticLoader n={} K={} V={} dims={} separation={} noise={} seed={}".format(
            self.n, self.K, self.V, self.dims, self.separation, self.noise, self.seed)
