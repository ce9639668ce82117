from abc import ABCMeta, abstractmethod
from pytpc.common.dataset import MultiViewDataset


class ShapeMismatch(ValueError):
    """ Views of one dataset disagree on the number of samples. """
    pass


class DatasetLoader(object, metaclass=ABCMeta):
    """ Source of a multi-view dataset.

    Attributes:
        name (str): dataset name, also used to name output folders.
    """

    def __init__(self, name: str = ""):
        self.name = name

    @abstractmethod
    def load(self) -> MultiViewDataset:
        """ Read or generate the dataset. """
        pass

    def describe(self):
        """ Short human-readable description of the source. """
        return "{} \"{}\"".format(type(self).__name__, self.name)


def assemble(views, labels, name):
    """ Build a MultiViewDataset, raising ShapeMismatch for inconsistent sample counts. """
    ns = [v.n for v in views]
    if len(set(ns)) != 1:
        raise ShapeMismatch("views have different numbers of samples: {}".format(ns))
    if labels is not None and len(labels) != ns[0]:
        raise ShapeMismatch("{} labels for {} samples".format(len(labels), ns[0]))
    return MultiViewDataset(views, labels=labels, name=name)
