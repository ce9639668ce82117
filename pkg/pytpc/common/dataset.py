import numpy as np
from sklearn.preprocessing import StandardScaler


class ViewMatrix(object):
    """ Feature matrix of one view.

    Attributes:
        values (np.ndarray, shape = [n, d]): one row per sample.
        name (str): optional view name (e.g. the file it was read from).
    """

    def __init__(self, values, name: str = ""):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError("view {} must be a matrix, got shape {}".format(name, values.shape))
        if not np.all(np.isfinite(values)):
            raise ValueError("view {} contains NaN or Inf".format(name))
        self.values = values
        self.name = name

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    def standardized(self):
        """ Copy with every feature scaled to zero mean and unit variance.

        Constant features become zero.
        """
        return ViewMatrix(StandardScaler().fit_transform(self.values), name=self.name)

    def __repr__(self):
        return "View \"{}\" n={} d={}".format(self.name, self.n, self.d)


class MultiViewDataset(object):
    """ V views of the same n samples.

    Attributes:
        views (list of ViewMatrix): views in input order.
        labels (np.ndarray of int, shape = [n]): optional ground truth, values in 0..K-1.
        name (str): dataset name.
    """

    def __init__(self, views: list, labels=None, name: str = ""):
        if len(views) < 1:
            raise ValueError("a dataset needs at least one view")
        self.views = [v if isinstance(v, ViewMatrix) else ViewMatrix(v) for v in views]
        ns = set(v.n for v in self.views)
        if len(ns) != 1:
            raise ValueError("views disagree on the number of samples: {}".format(
                [v.n for v in self.views]))
        self.labels = None
        if labels is not None:
            labels = np.asarray(labels, dtype=int)
            assert labels.shape == (self.n,), "labels must have one entry per sample"
            if np.any(labels < 0):
                raise ValueError("labels must be non-negative")
            self.labels = labels
        self.name = name

    @property
    def n(self):
        return self.views[0].n

    @property
    def V(self):
        return len(self.views)

    @property
    def n_clusters(self):
        """ K inferred from the ground truth as max label + 1. """
        if self.labels is None:
            return None
        return int(self.labels.max()) + 1

    def standardized(self):
        return MultiViewDataset([v.standardized() for v in self.views], labels=self.labels,
                                name=self.name)

    def __repr__(self):
        return "Dataset \"{}\" n={} V={} dims=({})".format(
            self.name, self.n, self.V, ", ".join(str(v.d) for v in self.views)
        )

    def __str__(self):
        return self.__repr__()
