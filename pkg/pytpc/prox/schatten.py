import numpy as np
from pytpc.common.ft import dft_half, idft_half
from pytpc.common.parallel import parallel_map
from pytpc.common.tensor import check_p, check_tensor, half_slices, schatten_p_power, \
    stack_slices, svd
from pytpc.prox.gst import gst


def schatten_prox(z, tau, p):
    r""" Proximal operator of the tensor Schatten p-norm.

    Returns the minimizer of

    .. math::
        \frac{1}{2}\|X - Z\|_F^2 + \tau \|X\|_{Sp}^p.

    With the unnormalized forward DFT, :math:`\|X - Z\|_F^2 = \frac{1}{n_3}\sum_i
    \|\bar X^{(i)} - \bar Z^{(i)}\|_F^2`, so every frequency slice is shrunk by GST
    with the effective threshold :math:`\tau n_3`.

    Args:
        z (np.ndarray): real tensor, shape == (n1, n2, n3).
        tau (float): weight of the Schatten term, >= 0.
        p (float): exponent in (0, 1].

    Returns:
        real tensor of the same shape as z.
    """
    z = check_tensor(z, "z")
    check_p(p)
    if tau < 0:
        raise ValueError("tau must be non-negative, got {}".format(tau))
    if tau == 0:
        return z.copy()
    n3 = z.shape[2]
    tau_eff = tau * n3

    def shrink(zbar):
        u, s, vh = svd(zbar)
        return (u * gst(s, tau_eff, p)) @ vh

    xh = stack_slices(parallel_map(shrink, half_slices(dft_half(z), n3)))
    return idft_half(xh, n3)


def prox_objective(x, z, tau, p):
    """ Value of 1/2 ||x - z||_F^2 + tau ||x||_Sp^p. """
    return 0.5 * float(np.sum((x - z) ** 2)) + tau * schatten_p_power(x, p)
