"""Following codes define forward/backward DFT along the third dimension of a 3rd-order tensor.

    Forward/backward DFT are defined with following conventions:
        fbar[:, :, i] = sum_k{ f[:, :, k] exp(-2 pi i ik / n3) }
        f[:, :, k] = 1/n3 * sum_i{ fbar[:, :, i] exp(2 pi i ik / n3) }

    For real tensors only the slices i = 0, ..., n3 // 2 are independent; the
    remaining slices are complex conjugates (fbar[:, :, n3 - i] = conj(fbar[:, :, i])).
    Functions ending with _half work on these n3 // 2 + 1 slices only.
"""

import warnings
import numpy as np

try:
    from pyfftw.interfaces.numpy_fft import ifft, rfft
except ImportError:
    from numpy.fft import ifft, rfft


class ImaginaryResidueTooLarge(ValueError):
    """ Inverse DFT produced a tensor that is not real (broken conjugate symmetry upstream). """
    pass


# imaginary residue above residue_warn is reported, above residue_tol is fatal
residue_warn = 1.0E-9
residue_tol = 1.0E-6


def nhalf(n3):
    """ Number of independent frequency slices of a real tensor of depth n3. """
    return n3 // 2 + 1


def is_self_conjugate(i, n3):
    """ True if frequency slice i of a real tensor is itself real (DC and Nyquist slices). """
    return i == 0 or 2 * i == n3


def dft_half(t):
    """ Forward DFT of a real tensor along the third dimension, independent slices only.

    Args:
        t (np.ndarray): real tensor. shape == (n1, n2, n3)

    Returns:
        complex array, shape == (n1, n2, n3 // 2 + 1).
    """
    assert t.ndim == 3
    return rfft(np.asarray(t, dtype=np.float64), axis=2)


def fill_conjugate(fh, n3):
    """ Fill the full spectrum of a real tensor from its independent slices.

    Args:
        fh (np.ndarray): independent slices. shape == (n1, n2, n3 // 2 + 1)
        n3 (int): depth of the full tensor.

    Returns:
        complex array, shape == (n1, n2, n3).
    """
    nh = nhalf(n3)
    assert fh.ndim == 3 and fh.shape[2] == nh
    f = np.empty(fh.shape[:2] + (n3,), dtype=np.complex128)
    f[:, :, :nh] = fh
    if n3 > nh:
        f[:, :, nh:] = fh[:, :, 1:n3 - nh + 1][:, :, ::-1].conj()
    return f


def dft_slices(t):
    """ Unnormalized forward DFT of a real tensor along the third dimension.

    Only n3 // 2 + 1 slices are transformed, the rest are filled by conjugation.

    Args:
        t (np.ndarray): real tensor. shape == (n1, n2, n3)

    Returns:
        complex array of frequency slices, shape == (n1, n2, n3).
    """
    return fill_conjugate(dft_half(t), t.shape[2])


def idft_slices(f):
    """ Inverse DFT (1/n3 scaled) along the third dimension.

    The result must be real: an imaginary residue above residue_tol raises
    ImaginaryResidueTooLarge, above residue_warn a warning is issued; the
    residue is discarded afterwards.

    Args:
        f (np.ndarray): complex frequency slices. shape == (n1, n2, n3)

    Returns:
        real array, shape == (n1, n2, n3).
    """
    assert f.ndim == 3
    t = ifft(np.asarray(f, dtype=np.complex128), axis=2)
    residue = np.max(np.abs(t.imag)) if t.size else 0.0
    if residue > residue_tol:
        raise ImaginaryResidueTooLarge(
            "imaginary residue {:.3e} after inverse DFT exceeds {:.1e}".format(residue, residue_tol)
        )
    if residue > residue_warn:
        warnings.warn("imaginary residue {:.3e} discarded after inverse DFT".format(residue))
    return np.ascontiguousarray(t.real)


def idft_half(fh, n3):
    """ Inverse DFT of a real tensor given by its independent slices. """
    return idft_slices(fill_conjugate(fh, n3))
