r""" Generalized soft-thresholding (GST).

Solves the scalar problem

.. math::
    \min_{x \geq 0} \frac{1}{2}(x - \sigma)^2 + \tau x^p, \qquad 0 < p \leq 1

for non-negative :math:`\sigma` (singular values), element-wise on arrays.
"""

import warnings
import numpy as np
from pytpc.common.tensor import check_p


class NonConvergence(UserWarning):
    """ GST fixed-point iteration hit the iteration cap; the last iterate is returned. """
    pass


def gst_threshold(tau, p):
    r""" Value of :math:`\sigma` below which the GST solution is zero.

    :math:`\tau^* = (2\tau(1-p))^{1/(2-p)} + \tau p (2\tau(1-p))^{(p-1)/(2-p)}`, and
    :math:`\tau^* = \tau` for p = 1.
    """
    check_p(p)
    if tau == 0:
        return 0.0
    if p == 1:
        return float(tau)
    base = 2 * tau * (1 - p)
    return base ** (1. / (2 - p)) + tau * p * base ** ((p - 1) / (2 - p))


def gst(sigma, tau, p, maxiter=200, tol=1.0E-12):
    """ GST applied element-wise to an array of non-negative values.

    p = 1 uses the closed-form soft threshold max(sigma - tau, 0); for p < 1 entries
    above gst_threshold are refined by the fixed point x <- sigma - tau p x^(p-1)
    started from x = sigma.

    Args:
        sigma (array_like): non-negative values.
        tau (float): threshold weight, >= 0.
        p (float): exponent in (0, 1].
        maxiter (int): fixed-point iteration cap.
        tol (float): stop when every |dx| < tol.

    Returns:
        np.ndarray of the same shape as sigma.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    check_p(p)
    if tau < 0:
        raise ValueError("tau must be non-negative, got {}".format(tau))
    if np.any(sigma < 0):
        raise ValueError("GST is defined for non-negative sigma only")
    if tau == 0:
        return sigma.copy()
    if p == 1:
        return np.maximum(sigma - tau, 0.0)

    x = np.zeros_like(sigma)
    active = sigma > gst_threshold(tau, p)
    if not np.any(active):
        return x
    s = sigma[active]
    xa = s.copy()
    for _ in range(maxiter):
        xnew = s - tau * p * xa ** (p - 1)
        converged = np.max(np.abs(xnew - xa)) < tol
        xa = xnew
        if converged:
            break
    else:
        warnings.warn("GST fixed point not converged after {} iterations".format(maxiter),
                      NonConvergence)
    x[active] = xa
    return x


def gst_scalar(sigma, tau, p):
    """ GST of a single non-negative value. """
    return float(gst(np.array([sigma]), tau, p)[0])
