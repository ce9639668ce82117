import numpy as np
import pytest
from pytpc.anchor import AnchorConfig
from pytpc.loader import generate_synthetic
from pytpc.pipeline import run_once
from pytpc.solver import SolverConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def blobs():
    """ 3 views of 4 well-separated Gaussian clusters, n = 300. """
    dataset, labels = generate_synthetic(300, 4, 3, [10, 10, 10], separation=10., noise=1.,
                                         seed=0)
    return dataset


@pytest.fixture(scope="session")
def blobs_result(blobs):
    return run_once(blobs, 4, SolverConfig(lam=50., p=0.9, max_iter=100, seed=0),
                    AnchorConfig(k=5, n_anchors=30, seed=0), verbose=False)


def random_orthonormal(rng, n, k, complex_=False):
    x = rng.standard_normal((n, k))
    if complex_:
        x = x + 1j * rng.standard_normal((n, k))
    q, _ = np.linalg.qr(x)
    return q
