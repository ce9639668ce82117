r""" Third-order tensor algebra under the t-product.

A tensor is a real np.ndarray of shape (n1, n2, n3); frontal slice k is t[:, :, k].
Frequency-domain quantities (overlined tensors) are complex arrays of the same
layout obtained by :func:`pytpc.common.ft.dft_slices`. In the frequency domain
the t-product becomes a slice-wise matrix product and the t-transpose becomes a
slice-wise conjugate transpose.
"""

import numpy as np
from pytpc.common.ft import dft_half, dft_slices, fill_conjugate, idft_half, idft_slices, \
    is_self_conjugate
from pytpc.common.parallel import parallel_map


class DimensionMismatch(ValueError):
    """ Operand shapes are not conformable. """
    pass


class SvdFailure(RuntimeError):
    """ The SVD of a frequency slice did not converge. """
    pass


class InvalidP(ValueError):
    """ Schatten exponent outside (0, 1]. """
    pass


# singular values below rank_rtol * sigma_max count as zero
rank_rtol = 1.0E-12


def check_tensor(t, name="tensor"):
    """ Return t as a float64 array after checking it is a finite 3rd-order tensor. """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise DimensionMismatch("{} must be 3rd-order, got shape {}".format(name, t.shape))
    if not np.all(np.isfinite(t)):
        raise ValueError("{} contains NaN or Inf".format(name))
    return t


def check_p(p):
    if not 0 < p <= 1:
        raise InvalidP("p must lie in (0, 1], got {}".format(p))


def svd(x, full_matrices=False, compute_uv=True):
    """ np.linalg.svd of one slice, raising SvdFailure on non-convergence. """
    try:
        return np.linalg.svd(x, full_matrices=full_matrices, compute_uv=compute_uv)
    except np.linalg.LinAlgError as e:
        raise SvdFailure(str(e)) from e


def half_slices(fh, n3):
    """ Independent frequency slices of a real tensor as a list of matrices.

    DC and Nyquist slices are returned as real matrices so that everything computed
    from them stays real.
    """
    return [fh[:, :, i].real.copy() if is_self_conjugate(i, n3) else fh[:, :, i]
            for i in range(fh.shape[2])]


def stack_slices(slices, dtype=np.complex128):
    """ Stack a list of matrices along a new third axis. """
    return np.stack([np.asarray(s, dtype=dtype) for s in slices], axis=2)


def identity_tensor(n, n3):
    """ Identity tensor: frontal slice 0 is I_n, other slices are zero. """
    if n < 1 or n3 < 1:
        raise ValueError("identity tensor needs n, n3 >= 1")
    t = np.zeros((n, n, n3))
    t[:, :, 0] = np.eye(n)
    return t


def t_product(a, b):
    """ t-product a * b.

    Args:
        a (np.ndarray): shape == (n1, m, n3)
        b (np.ndarray): shape == (m, n2, n3)

    Returns:
        real tensor, shape == (n1, n2, n3).
    """
    a = check_tensor(a, "a")
    b = check_tensor(b, "b")
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise DimensionMismatch("cannot t-multiply shapes {} and {}".format(a.shape, b.shape))
    n3 = a.shape[2]
    ah, bh = dft_half(a), dft_half(b)
    ch = np.einsum("ijk,jlk->ilk", ah, bh)
    return idft_half(ch, n3)


def t_transpose(a):
    """ t-transpose: slice 0 transposed, slices 1..n3-1 transposed and reversed in depth. """
    a = check_tensor(a, "a")
    out = np.empty((a.shape[1], a.shape[0], a.shape[2]))
    out[:, :, 0] = a[:, :, 0].T
    out[:, :, 1:] = a[:, :, :0:-1].transpose(1, 0, 2)
    return out


class TSvdFactors(object):
    """ Frequency-domain factors of a t-SVD, a = U * S * V^T.

    Attributes:
        U (np.ndarray, shape = [n1, h, n3]): left singular vectors of every frequency slice.
        S (np.ndarray, shape = [h, h, n3]): f-diagonal singular values, real and non-increasing.
        V (np.ndarray, shape = [n2, h, n3]): right singular vectors of every frequency slice.

    h = min(n1, n2).
    """

    def __init__(self, U, S, V):
        self.U = U
        self.S = S
        self.V = V

    @property
    def singular_values(self):
        """ Array of shape [h, n3] with the diagonal of every slice of S. """
        return np.real(np.einsum("iik->ik", self.S))

    def to_signal(self):
        """ Real signal-domain factors (U, S, V) such that a = U * S * t_transpose(V). """
        return idft_slices(self.U), idft_slices(self.S), idft_slices(self.V)

    def __repr__(self):
        return "TSvdFactors U{} S{} V{}".format(self.U.shape, self.S.shape, self.V.shape)


def t_svd(a):
    """ t-SVD by complex SVD of the independent frequency slices of a.

    Returns:
        TSvdFactors
    """
    a = check_tensor(a, "a")
    n1, n2, n3 = a.shape
    h = min(n1, n2)
    svds = parallel_map(svd, half_slices(dft_half(a), n3))
    U = fill_conjugate(stack_slices([u for u, s, vh in svds]), n3)
    S = fill_conjugate(stack_slices([np.diag(s) for u, s, vh in svds]), n3)
    V = fill_conjugate(stack_slices([vh.conj().T for u, s, vh in svds]), n3)
    assert U.shape == (n1, h, n3) and S.shape == (h, h, n3) and V.shape == (n2, h, n3)
    return TSvdFactors(U, S, V)


def singular_values(t):
    """ Singular values of every frequency slice of t, shape [min(n1, n2), n3]. """
    t = check_tensor(t)
    f = dft_slices(t)
    return np.stack([svd(f[:, :, i], compute_uv=False) for i in range(f.shape[2])], axis=1)


def schatten_p_power(t, p):
    r""" :math:`\|t\|_{Sp}^p = \sum_i \sum_j \sigma_j(\bar t^{(i)})^p`. """
    check_p(p)
    return float(np.sum(singular_values(t) ** p))


def schatten_p_norm(t, p):
    r""" Tensor Schatten p-norm :math:`(\sum_i \sum_j \sigma_j(\bar t^{(i)})^p)^{1/p}`. """
    return schatten_p_power(t, p) ** (1. / p)


def tubal_rank(t):
    """ Largest numerical rank over frequency slices. """
    sv = singular_values(t)
    if sv.size == 0 or sv.max() == 0:
        return 0
    return int(np.max(np.sum(sv > rank_rtol * sv.max(), axis=0)))

