import numpy as np
import pytest
from numpy.testing import assert_allclose
from conftest import random_orthonormal
from pytpc.anchor import AnchorConfig, build_anchor_tensor
from pytpc.common import dft_slices
from pytpc.metrics import acc
from pytpc.solver import DimensionError, SolverConfig, SolverState, TPSolver, fuse_labels, \
    gpi_objective, run_tensor_projection, solve_gpi, solve_procrustes, top_eigenvalue


def block_indicator(sizes, m_per_block):
    """ One-hot anchor graph where the samples of block c all connect to anchor block c. """
    n, K = sum(sizes), len(sizes)
    S = np.zeros((n, K * m_per_block, 1))
    labels = np.repeat(np.arange(K), sizes)
    for i, c in enumerate(labels):
        S[i, c * m_per_block:(c + 1) * m_per_block, 0] = 1. / m_per_block
    return S, labels


def small_solver(rng, cfg=None, n=12, m=6, K=3, V=3):
    S = rng.random((n, m, V))
    S /= S.sum(axis=1, keepdims=True)
    solver = TPSolver(S, K, cfg or SolverConfig(), verbose=False)
    solver.initialize()
    return solver


def test_top_eigenvalue(rng):
    x = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
    M = x.conj().T @ x
    assert_allclose(top_eigenvalue(M, maxiter=1000, tol=1e-14), np.linalg.eigvalsh(M)[-1],
                    rtol=1e-8)


def test_gpi_identity_graph(rng):
    H = random_orthonormal(rng, 5, 3, complex_=True)
    W1 = (1.01 - 1) * np.eye(5)
    G0 = solve_procrustes(H)[0]
    G, history = solve_gpi(W1, H, G0, maxiter=50)
    assert np.max(np.abs(G - H)) <= 1e-6


def test_gpi_objective_non_decreasing(rng):
    S = rng.standard_normal((6, 4))
    H = random_orthonormal(rng, 6, 4)
    StS = S.T @ S
    W1 = 1.01 * np.linalg.eigvalsh(StS)[-1] * np.eye(4) - StS
    W2 = S.T @ H
    G, history = solve_gpi(W1, W2, solve_procrustes(W2)[0], maxiter=100, tol=0)
    for a, b in zip(history, history[1:]):
        assert b >= a - 1e-10 * max(1, abs(a))
    assert_allclose(G.T @ G, np.eye(4), atol=1e-8)
    fit = np.sum((S @ G - H) ** 2)
    for _ in range(1000):
        R = random_orthonormal(rng, 4, 4)
        assert fit <= np.sum((S @ R - H) ** 2) + 1e-8
    assert history[-1] == pytest.approx(gpi_objective(W1, W2, G))


def test_procrustes_orthonormal_input(rng):
    A = random_orthonormal(rng, 6, 3)
    assert_allclose(solve_procrustes(A)[0], A, atol=1e-10)


def test_procrustes_diagonal():
    A = np.zeros((4, 2))
    A[0, 0], A[1, 1] = 3., 2.
    H, value = solve_procrustes(A)
    assert_allclose(H, np.eye(4, 2), atol=1e-12)
    assert value == pytest.approx(5.0)


def test_procrustes_sampling(rng):
    A = rng.standard_normal((8, 3))
    H, value = solve_procrustes(A)
    best = np.trace(H.T @ A)
    assert best == pytest.approx(np.sum(np.linalg.svd(A, compute_uv=False)), abs=1e-8)
    for _ in range(1000):
        R = random_orthonormal(rng, 8, 3)
        assert best >= np.trace(R.T @ A) - 1e-10


def test_procrustes_random_instances(rng):
    for trial in range(100):
        n, K = rng.integers(3, 9), rng.integers(1, 4)
        A = rng.standard_normal((n, K))
        if trial % 2:
            A = A + 1j * rng.standard_normal((n, K))
        H, value = solve_procrustes(A)
        assert_allclose(H.conj().T @ H, np.eye(K), atol=1e-10)
        assert np.real(np.vdot(H, A)) == pytest.approx(value, abs=1e-8)
        assert value == pytest.approx(np.sum(np.linalg.svd(A, compute_uv=False)), abs=1e-8)
        for _ in range(100):
            R = random_orthonormal(rng, n, K, complex_=bool(trial % 2))
            assert value >= np.real(np.vdot(R, A)) - 1e-10


def test_gpi_random_instances(rng):
    for _ in range(100):
        S = rng.standard_normal((8, 6))
        H = random_orthonormal(rng, 8, 3)
        StS = S.T @ S
        W1 = 1.01 * np.linalg.eigvalsh(StS)[-1] * np.eye(6) - StS
        W2 = S.T @ H
        G, history = solve_gpi(W1, W2, solve_procrustes(W2)[0], maxiter=500, tol=1e-12)
        for a, b in zip(history, history[1:]):
            assert b >= a - 1e-10 * max(1, abs(a))
        assert_allclose(G.T @ G, np.eye(3), atol=1e-8)
        fit = np.sum((S @ G - H) ** 2)
        for _ in range(100):
            R = random_orthonormal(rng, 6, 3)
            assert fit <= np.sum((S @ R - H) ** 2) + 1e-8


def test_initial_state_is_feasible(rng):
    solver = small_solver(rng)
    st = solver.state
    f = dft_slices(st.H)
    for i in range(f.shape[2]):
        assert_allclose(f[:, :, i].conj().T @ f[:, :, i], np.eye(3), atol=1e-12)
        assert_allclose(f[:, :, i], st.H[:, :, 0], atol=1e-12)
    assert np.all(st.H >= 0)
    assert np.all(st.H[:, :, 1:] == 0)
    assert np.count_nonzero(st.H[:, :, 0], axis=1).tolist() == [1] * 12
    assert_allclose(st.Q, st.H)
    assert_allclose(st.J, st.H)
    assert not st.Y1.any() and not st.Y2.any()


def test_initial_state_blobs(blobs):
    S, _ = build_anchor_tensor(blobs, AnchorConfig(k=5, n_anchors=30))
    solver = TPSolver(S, 4, SolverConfig(), labels_true=blobs.labels, verbose=False)
    st = solver.initialize()
    f = dft_slices(st.H)
    for i in range(3):
        assert_allclose(f[:, :, i].conj().T @ f[:, :, i], np.eye(4), atol=1e-12)
    assert acc(fuse_labels(st.H), blobs.labels) >= 0.95


@pytest.mark.parametrize("h_damping", [0.0, 1.0, 3.0])
def test_update_H_solves_damped_procrustes(rng, h_damping):
    solver = small_solver(rng, SolverConfig(h_damping=h_damping))
    st = solver.state
    st.mu, st.rho = 0.7, 1.3
    st.Q = np.abs(rng.standard_normal(st.H.shape))
    st.J = rng.standard_normal(st.H.shape)
    st.Y1 = rng.standard_normal(st.H.shape)
    st.Y2 = rng.standard_normal(st.H.shape)
    H_prev = st.H.copy()
    W = st.mu * st.Q - st.Y1 + st.rho * st.J - st.Y2 + h_damping * (st.mu + st.rho) * H_prev
    Sf, Gf, Wf = dft_slices(solver.S), dft_slices(st.G), dft_slices(W)
    Hf = dft_slices(solver.update_H())
    for i in range(Hf.shape[2]):
        A = 2 * Sf[:, :, i] @ Gf[:, :, i] + Wf[:, :, i]
        assert_allclose(Hf[:, :, i], solve_procrustes(A)[0], atol=1e-8)


def test_damping_keeps_sign_while_J_is_thresholded():
    S, labels = block_indicator([5, 7, 6], 2)
    for h_damping, sign in ((0.0, -1.0), (1.0, 1.0)):
        solver = TPSolver(S, 3, SolverConfig(h_damping=h_damping), verbose=False)
        st = solver.initialize()
        H0 = st.H.copy()
        st.mu = st.rho = 100.
        st.J = np.zeros_like(H0)
        st.Y2 = 2 * st.rho * H0
        assert_allclose(solver.update_H(), sign * H0, atol=1e-10)


def test_update_G_and_H_orthonormal_slices(rng):
    solver = small_solver(rng)
    solver.update_G()
    solver.update_H()
    for t in (solver.state.G, solver.state.H):
        f = dft_slices(t)
        for i in range(f.shape[2]):
            assert_allclose(f[:, :, i].conj().T @ f[:, :, i], np.eye(3), atol=1e-8)
    for history in solver.gpi_history:
        for a, b in zip(history, history[1:]):
            assert b >= a - 1e-10 * max(1, abs(a))


def test_update_Q():
    solver = TPSolver(np.ones((2, 2, 1)) / 2, 2, verbose=False)
    st = solver.state = SolverState(None, np.array([[-1., 2.], [0.5, -3.]])[:, :, None], 1.0, 1.0)
    assert_allclose(solver.update_Q()[:, :, 0], [[0, 2], [0.5, 0]])
    st.H = np.abs(st.H)
    assert_allclose(solver.update_Q(), st.H)
    st.H = -np.abs(st.H) - 1
    assert_allclose(solver.update_Q(), 0)


def test_update_J_without_penalty(rng):
    solver = small_solver(rng, SolverConfig(lam=0.0))
    st = solver.state
    st.Y2 = rng.standard_normal(st.H.shape)
    assert_allclose(solver.update_J(), st.H + st.Y2 / st.rho, atol=1e-8)


def test_update_J_depth_one_svt(rng):
    solver = small_solver(rng, SolverConfig(lam=0.5, p=1.0, rho0=1.0), V=1)
    st = solver.state
    z = st.H[:, :, 0] + st.Y2[:, :, 0] / st.rho
    u, s, vh = np.linalg.svd(z, full_matrices=False)
    assert_allclose(solver.update_J()[:, :, 0], (u * np.maximum(s - 0.5, 0)) @ vh, atol=1e-12)


def test_update_multipliers(rng):
    solver = small_solver(rng)
    st = solver.state
    st.Q = st.H.copy()
    Y1 = st.Y1.copy()
    solver.update_multipliers()
    assert st.mu == pytest.approx(1.5e-5)
    assert st.rho == pytest.approx(1.5e-5)
    assert_allclose(st.Y1, Y1)
    st.mu = st.rho = 1e13
    solver.update_multipliers()
    assert st.mu == 1e13 and st.rho == 1e13


def test_fuse_labels():
    H = np.array([[[1., 0.], [0., 3.]]]).transpose(0, 2, 1)
    assert H.shape == (1, 2, 2)
    assert list(fuse_labels(H)) == [1]
    one = np.array([[0.2, 0.7], [0.9, 0.1], [0.5, 0.5]])[:, :, None]
    assert list(fuse_labels(one)) == [1, 0, 0]
    assert list(fuse_labels(np.concatenate([one, one], axis=2))) == [1, 0, 0]


def test_dimension_errors(rng):
    S = rng.random((10, 3, 2))
    with pytest.raises(DimensionError):
        TPSolver(S, 4)
    with pytest.raises(DimensionError):
        TPSolver(S, 1)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(p=0.0)
    with pytest.raises(ValueError):
        SolverConfig(lam=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(eta=0.5)
    with pytest.raises(ValueError):
        SolverConfig(h_damping=-0.1)


def test_perfect_blocks():
    S, labels = block_indicator([5, 7, 6], 2)
    result = run_tensor_projection(S, 3, SolverConfig(lam=1.0), labels_true=labels, verbose=False)
    assert result.metrics["acc"] == 1.0


def test_blobs_accuracy_and_convergence(blobs_result):
    assert blobs_result.metrics["acc"] >= 0.95
    assert blobs_result.converged
    assert blobs_result.n_iter <= 100
    it, res_q, res_j, obj, acc = blobs_result.trace[-1]
    assert max(res_q, res_j) < 1e-3


def test_blobs_trace(blobs_result):
    trace = blobs_result.trace
    assert [row[0] for row in trace] == list(range(len(trace)))
    assert all(row[4] is not None for row in trace)
    assert blobs_result.view_labels.shape == (3, 300)
    assert blobs_result.fused_H.shape == (300, 4)


def test_penalties_monotone_and_capped(rng):
    solver = small_solver(rng, SolverConfig(mu0=1e12, rho0=1e12))
    st = solver.state
    mus = [st.mu]
    for _ in range(10):
        solver.update_G()
        solver.update_H()
        assert np.all(solver.update_Q() >= 0)
        solver.update_J()
        solver.update_multipliers()
        mus.append(st.mu)
        assert st.rho == st.mu
    assert np.all(np.diff(mus) >= 0)
    assert max(mus) == 1e13


def test_objective_tracking_can_be_skipped(rng):
    S = rng.random((30, 8, 2))
    S /= S.sum(axis=1, keepdims=True)
    labels = rng.integers(0, 3, 30)
    tracked = run_tensor_projection(S, 3, SolverConfig(max_iter=20), labels_true=labels,
                                    verbose=False)
    skipped = run_tensor_projection(S, 3, SolverConfig(max_iter=20, track_objective=False),
                                    labels_true=labels, verbose=False)
    assert np.array_equal(tracked.labels, skipped.labels)
    assert [row[1:3] for row in tracked.trace] == [row[1:3] for row in skipped.trace]
    assert all(np.isnan(row[3]) and row[4] is None for row in skipped.trace)
    assert all(np.isfinite(row[3]) and row[4] is not None for row in tracked.trace)
    assert skipped.metrics.keys() == tracked.metrics.keys()
