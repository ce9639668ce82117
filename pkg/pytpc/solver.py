import time
import warnings
from dataclasses import dataclass, asdict
import numpy as np
from sklearn.cluster import KMeans
from pytpc.common import timer
from pytpc.common.ft import dft_half, idft_half
from pytpc.common.parallel import parallel_map
from pytpc.common.tensor import check_p, check_tensor, half_slices, schatten_p_power, \
    stack_slices, svd, t_product
from pytpc.metrics import acc as acc_score, evaluate
from pytpc.prox import schatten_prox


class DimensionError(ValueError):
    """ Problem sizes do not admit an orthonormal projection (m < K or n < K).

    Raised on the number of clusters. Tensors whose shapes disagree with each other
    raise pytpc.common.tensor.DimensionMismatch instead.
    """
    pass


@dataclass
class SolverConfig:
    """ Parameters of the ALM solver.

    Attributes:
        lam (float): weight of the tensor Schatten p-norm term, default = 50.
        p (float): Schatten exponent in (0, 1], default = 0.9.
        mu0, rho0 (float): initial penalties, default = 1e-5.
        eta (float): penalty growth factor, default = 1.5.
        penalty_cap (float): upper bound of mu and rho, default = 1e13.
        beta_margin (float): beta = beta_margin * largest eigenvalue of S^H S per slice.
        inner_g_iters (int): maximum GPI iterations per G update, default = 5.
        inner_g_tol (float): GPI stops when ||dG||_F < inner_g_tol.
        tol (float): stop when max(||H - Q||_inf, ||H - J||_inf) < tol, default = 1e-3.
        max_iter (int): maximum number of outer iterations, default = 200.
        seed (int): seed of the k-means initialization.
        h_damping (float): the H update also keeps H close to its previous value with weight
            h_damping * (mu + rho); 0 gives the plain update, default = 1.
        track_objective (bool): evaluate the objective and the ACC of every iteration for
            the trace; switch off for large n, default = True.
    """
    lam: float = 50.0
    p: float = 0.9
    mu0: float = 1.0E-5
    rho0: float = 1.0E-5
    eta: float = 1.5
    penalty_cap: float = 1.0E13
    beta_margin: float = 1.01
    inner_g_iters: int = 5
    inner_g_tol: float = 1.0E-8
    tol: float = 1.0E-3
    max_iter: int = 200
    seed: int = 0
    h_damping: float = 1.0
    track_objective: bool = True

    def __post_init__(self):
        check_p(self.p)
        if self.lam < 0:
            raise ValueError("lam must be non-negative, got {}".format(self.lam))
        if self.h_damping < 0:
            raise ValueError("h_damping must be non-negative, got {}".format(self.h_damping))
        for name in ["mu0", "rho0", "penalty_cap", "beta_margin", "inner_g_tol", "tol"]:
            if not getattr(self, name) > 0:
                raise ValueError("{} must be positive, got {}".format(name, getattr(self, name)))
        if self.eta < 1:
            raise ValueError("eta must be at least 1, got {}".format(self.eta))
        if self.inner_g_iters < 1 or self.max_iter < 1:
            raise ValueError("iteration counts must be positive")

    def as_dict(self):
        return asdict(self)


class SolverState(object):
    """ ALM variables, all real signal-domain tensors.

    Attributes:
        G (np.ndarray, shape = [m, K, V]): projection tensor.
        H (np.ndarray, shape = [n, K, V]): label tensor.
        Q (np.ndarray, shape = [n, K, V]): non-negative copy of H.
        J (np.ndarray, shape = [n, K, V]): low-rank copy of H.
        Y1, Y2 (np.ndarray, shape = [n, K, V]): Lagrange multipliers of H = Q and H = J.
        mu, rho (float): penalties of H = Q and H = J.
        iter (int): number of completed outer iterations.
        residuals (list of (float, float)): (||H - Q||_inf, ||H - J||_inf) per iteration.
        objectives (list of float): ||S * G - H||_F^2 + lam ||H||_Sp^p per iteration.
    """

    def __init__(self, G, H, mu, rho):
        self.G = G
        self.H = H
        self.Q = H.copy()
        self.J = H.copy()
        self.Y1 = np.zeros_like(H)
        self.Y2 = np.zeros_like(H)
        self.mu = mu
        self.rho = rho
        self.iter = 0
        self.residuals = []
        self.objectives = []


class ClusteringResult(object):
    """ Output of a solve.

    Attributes:
        labels (np.ndarray of int, shape = [n]): row-argmax of fused_H.
        fused_H (np.ndarray, shape = [n, K]): mean of the frontal slices of H.
        view_labels (np.ndarray of int, shape = [V, n]): row-argmax of every frontal slice of H.
        trace (list of tuple): (iter, ||H - Q||_inf, ||H - J||_inf, objective, acc or None).
        n_iter (int): outer iterations performed.
        converged (bool): whether the residuals fell below tol.
        metrics (dict): acc, nmi and purity when ground truth was given, else empty.
        seconds (float): wall-clock time of the solve.
    """

    def __init__(self, fused_H, view_labels, trace, n_iter, converged, metrics=None,
                 seconds=None):
        self.fused_H = fused_H
        self.labels = np.argmax(fused_H, axis=1)
        self.view_labels = view_labels
        self.trace = trace
        self.n_iter = n_iter
        self.converged = converged
        self.metrics = metrics or {}
        self.seconds = seconds

    def __repr__(self):
        return "ClusteringResult n={} K={} iterations={} converged={} {}".format(
            self.fused_H.shape[0], self.fused_H.shape[1], self.n_iter, self.converged,
            " ".join("{}={:.4f}".format(k, v) for k, v in sorted(self.metrics.items()))
        )


def fuse(H):
    """ Mean of the frontal slices of H. """
    return check_tensor(H, "H").mean(axis=2)


def fuse_labels(H):
    """ Row-argmax of the mean frontal slice of H; ties go to the lowest cluster index. """
    return np.argmax(fuse(H), axis=1)


def top_eigenvalue(M, maxiter=100, tol=1.0E-10):
    """ Largest eigenvalue of a Hermitian positive semi-definite matrix by power iteration. """
    rng = np.random.default_rng(0)
    v = rng.standard_normal(M.shape[0])
    if np.iscomplexobj(M):
        v = v + 1j * rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = M @ v
        lam_new = np.linalg.norm(w)
        if lam_new == 0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= tol * lam_new:
            return float(lam_new)
        lam = lam_new
    return float(lam)


def gpi_objective(W1, W2, G):
    """ tr(G^H W1 G) + 2 Re tr(G^H W2). """
    return float(np.real(np.vdot(G, W1 @ G)) + 2 * np.real(np.vdot(G, W2)))


def solve_gpi(W1, W2, G0, maxiter=5, tol=1.0E-8):
    """ Generalized power iteration for max tr(G^H W1 G) + 2 Re tr(G^H W2) s.t. G^H G = I.

    Every step takes the SVD U X V^H = W1 G + W2 and sets G = U V^H. For positive
    semi-definite W1 the objective does not decrease.

    Returns:
        (G, list of objective values, starting with the value at G0)
    """
    G = G0
    history = [gpi_objective(W1, W2, G)]
    for _ in range(maxiter):
        u, s, vh = svd(W1 @ G + W2)
        Gnew = u @ vh
        delta = np.linalg.norm(Gnew - G)
        G = Gnew
        history.append(gpi_objective(W1, W2, G))
        if delta < tol:
            break
    return G, history


def solve_procrustes(A):
    """ Maximizer of Re tr(H^H A) over H with orthonormal columns.

    Returns:
        (H = Lambda V^H from the thin SVD A = Lambda X V^H, optimal value = sum of singular values)
    """
    u, s, vh = svd(A)
    return u @ vh, float(np.sum(s))


class FrequencyWorkspace(object):
    """ Frequency-domain data that stays fixed during a solve.

    Only the V // 2 + 1 independent slices are kept; DC and Nyquist slices are real.

    Attributes:
        S_bar (list of np.ndarray, shape = [n, m]): frequency slices of the anchor tensor.
        beta (np.ndarray): beta of every slice.
        W1 (list of np.ndarray, shape = [m, m]): beta I - S_bar^H S_bar, positive definite.
    """

    def __init__(self, S, beta_margin):
        self.n, self.m, self.V = S.shape
        self.S_bar = half_slices(dft_half(S), self.V)
        StS = [s.conj().T @ s for s in self.S_bar]
        self.beta = np.array([beta_margin * top_eigenvalue(x) + 1.0E-12 for x in StS])
        self.W1 = [b * np.eye(self.m) - x for b, x in zip(self.beta, StS)]

    @property
    def nslices(self):
        return len(self.S_bar)

    def half(self, t):
        """ Independent frequency slices of a real n x K x V or m x K x V tensor. """
        return half_slices(dft_half(t), self.V)

    def W2(self, i, H_bar):
        return self.S_bar[i].conj().T @ H_bar

    def A(self, i, G_bar, W34_bar):
        """ 2 S_bar G_bar + W34_bar, W34_bar = mu W3 + rho W4 plus the damping term. """
        return 2 * self.S_bar[i] @ G_bar + W34_bar


class TPSolver(object):
    """ Multi-view clustering by projecting the anchor graph tensor onto a label tensor.

    Solves

        min ||S * G - H||_F^2 + lam ||H||_Sp^p
        s.t. H >= 0, H^T * H = I, G^T * G = I

    by ALM with H = Q (non-negativity) and H = J (Schatten term), updating G, H, Q, J
    and the multipliers in turn until both residuals are below cfg.tol.

    Attributes:
        S (np.ndarray, shape = [n, m, V]): anchor graph tensor.
        n_clusters (int): K.
        cfg (SolverConfig): solver parameters.
        labels_true (np.ndarray): optional ground truth, used for reporting only.
        ws (FrequencyWorkspace): fixed frequency-domain data of S.
        state (SolverState): current ALM variables.
        gpi_history (list of list of float): GPI objective values of the last G update, per slice.
        verbose (bool): print progress.
    """

    def __init__(self, S, n_clusters: int, cfg: SolverConfig = None, labels_true=None,
                 verbose: bool = True):
        self.S = check_tensor(S, "S")
        n, m, V = self.S.shape
        if n_clusters < 2:
            raise DimensionError("at least 2 clusters are needed, got {}".format(n_clusters))
        if m < n_clusters:
            raise DimensionError("{} anchors cannot carry {} orthonormal columns".format(
                m, n_clusters))
        if n < n_clusters:
            raise DimensionError("{} samples cannot form {} clusters".format(n, n_clusters))
        self.n_clusters = n_clusters
        self.cfg = cfg or SolverConfig()
        self.labels_true = labels_true
        self.verbose = verbose
        self.ws = FrequencyWorkspace(self.S, self.cfg.beta_margin)
        self.state = None
        self.gpi_history = None

    def initial_labels(self):
        """ k-means labels of the rows of the n x mV unfolding [S^(0), ..., S^(V-1)]. """
        n, m, V = self.S.shape
        km = KMeans(n_clusters=self.n_clusters, n_init=10, random_state=self.cfg.seed)
        return km.fit_predict(self.S.transpose(0, 2, 1).reshape(n, V * m))

    def initialize(self):
        """ Feasible starting point, Q = J = H, Y1 = Y2 = 0, one G update.

        H^(0) is the column-normalized indicator of the k-means labels and H^(v) = 0 for
        v > 0, so every frequency slice of H equals that indicator: H is non-negative
        and t-orthonormal.
        """
        n, m, V = self.S.shape
        K = self.n_clusters
        H = np.zeros((n, K, V))
        H[np.arange(n), self.initial_labels(), 0] = 1
        counts = H[:, :, 0].sum(axis=0)
        if np.any(counts == 0):
            warnings.warn("k-means initialization left {} empty clusters".format(
                int(np.sum(counts == 0))))
        H[:, :, 0] /= np.sqrt(np.maximum(counts, 1))
        self.state = SolverState(None, H, self.cfg.mu0, self.cfg.rho0)
        self.update_G()
        return self.state

    def update_G(self):
        """ Per frequency slice, GPI on max tr(G^H W1 G) + 2 Re tr(G^H W2), W2 = S_bar^H H_bar. """
        st, ws, cfg = self.state, self.ws, self.cfg
        H_bar = ws.half(st.H)
        G_bar = ws.half(st.G) if st.G is not None else [None] * ws.nslices

        def one_slice(i):
            W2 = ws.W2(i, H_bar[i])
            G0 = G_bar[i] if G_bar[i] is not None else solve_procrustes(W2)[0]
            return solve_gpi(ws.W1[i], W2, G0, cfg.inner_g_iters, cfg.inner_g_tol)

        out = parallel_map(one_slice, range(ws.nslices))
        self.gpi_history = [h for g, h in out]
        st.G = idft_half(stack_slices([g for g, h in out]), ws.V)
        return st.G

    def update_H(self):
        """ Per frequency slice, H_bar = Lambda V^H from the SVD of A = 2 S_bar G_bar + mu W3 + rho W4.

        With h_damping > 0, A also holds gamma H_bar, gamma = h_damping * (mu + rho), from
        the term (gamma / 2) ||H - H_prev||_F^2.
        """
        st, ws = self.state, self.ws
        G_bar = ws.half(st.G)
        gamma = self.cfg.h_damping * (st.mu + st.rho)
        W34_bar = ws.half(st.mu * st.Q - st.Y1 + st.rho * st.J - st.Y2 + gamma * st.H)

        def one_slice(i):
            return solve_procrustes(ws.A(i, G_bar[i], W34_bar[i]))[0]

        st.H = idft_half(stack_slices(parallel_map(one_slice, range(ws.nslices))), ws.V)
        return st.H

    def update_Q(self):
        """ Q = (H + Y1 / mu)_+ """
        st = self.state
        st.Q = np.maximum(st.H + st.Y1 / st.mu, 0)
        return st.Q

    def update_J(self):
        """ J = prox of (lam / rho) ||.||_Sp^p at H + Y2 / rho. """
        st = self.state
        st.J = schatten_prox(st.H + st.Y2 / st.rho, self.cfg.lam / st.rho, self.cfg.p)
        return st.J

    def update_multipliers(self):
        """ Dual ascent on Y1, Y2 and geometric penalty growth capped at penalty_cap. """
        st, cfg = self.state, self.cfg
        st.Y1 = st.Y1 + st.mu * (st.H - st.Q)
        st.Y2 = st.Y2 + st.rho * (st.H - st.J)
        st.mu = min(cfg.eta * st.mu, cfg.penalty_cap)
        st.rho = min(cfg.eta * st.rho, cfg.penalty_cap)
        return st.Y1, st.Y2, st.mu, st.rho

    def residuals(self):
        st = self.state
        return float(np.max(np.abs(st.H - st.Q))), float(np.max(np.abs(st.H - st.J)))

    def objective(self):
        """ ||S * G - H||_F^2 + lam ||H||_Sp^p at the current state. """
        st = self.state
        fit = float(np.sum((t_product(self.S, st.G) - st.H) ** 2))
        return fit + self.cfg.lam * schatten_p_power(st.H, self.cfg.p)

    def _record(self):
        """ Trace row; objective is NaN and acc None when cfg.track_objective is off. """
        st = self.state
        res_q, res_j = self.residuals()
        st.residuals.append((res_q, res_j))
        obj, acc = float("nan"), None
        if self.cfg.track_objective:
            obj = self.objective()
            st.objectives.append(obj)
            if self.labels_true is not None:
                acc = acc_score(fuse_labels(st.H), self.labels_true)
        return st.iter, res_q, res_j, obj, acc

    def solve(self):
        """ Run the ALM iterations and fuse the label tensor.

        Returns:
            ClusteringResult
        """
        start_time = time.time()
        n, m, V = self.S.shape
        if self.verbose:
            print("===================== Initializing Run =====================")
            print("n = {}, m = {}, V = {}, K = {}, lam = {}, p = {}".format(
                n, m, V, self.n_clusters, self.cfg.lam, self.cfg.p))

        self.initialize()
        trace = [self._record()]
        converged = False
        st = self.state

        for it in range(1, self.cfg.max_iter + 1):
            self.update_G()
            self.update_H()
            self.update_Q()
            self.update_J()
            mu, rho = st.mu, st.rho
            self.update_multipliers()
            st.iter = it
            row = self._record()
            trace.append(row)

            if self.verbose:
                print("~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~")
                print("Iteration {}".format(it))
                print("  mu = {:.3e}, rho = {:.3e}".format(mu, rho))
                print("  ||H - Q||_inf = {:.6e}".format(row[1]))
                print("  ||H - J||_inf = {:.6e}".format(row[2]))
                if self.cfg.track_objective:
                    print("  objective = {:.6f}".format(row[3]))
                if row[4] is not None:
                    print("  ACC = {:.4f}".format(row[4]))

            if max(row[1], row[2]) < self.cfg.tol:
                converged = True
                break

        if self.verbose:
            if converged:
                print("*Tensor projection converged after {} iterations!*\n".format(st.iter))
            else:
                print("*Tensor projection NOT converged after {} iterations!*\n".format(
                    self.cfg.max_iter))
            print("Elapsed time: ")
            timer(start_time, time.time())

        fused_H = fuse(st.H)
        view_labels = np.argmax(st.H, axis=1).T
        metrics = None
        if self.labels_true is not None:
            metrics = evaluate(np.argmax(fused_H, axis=1), self.labels_true)
        return ClusteringResult(fused_H, view_labels, trace, st.iter, converged, metrics,
                                seconds=time.time() - start_time)


def run_tensor_projection(S, n_clusters: int, cfg: SolverConfig = None, labels_true=None,
                          verbose: bool = True):
    """ Cluster the samples of an anchor graph tensor S (n x m x V) into n_clusters clusters. """
    return TPSolver(S, n_clusters, cfg, labels_true=labels_true, verbose=verbose).solve()
