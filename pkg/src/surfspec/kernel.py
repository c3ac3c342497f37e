"""Fundamental solution of -Delta - lambda in 3-D and its conormal derivatives.

The kernel is G(lambda; x, y) = exp(i*k*|x-y|) / (4*pi*|x-y|) with
k = sqrt(lambda) on the branch Im k >= 0, so that the kernel decays at
infinity for lambda off the positive real axis.  For real lambda < 0 this
is the real Yukawa kernel exp(-kappa*r)/(4*pi*r), kappa = sqrt(-lambda).
"""
import numpy as np

from .errors import SingularEvaluationError

FOUR_PI = 4.0 * np.pi


def sqrt_branch(lam):
    """Square root of a complex number with Im(result) >= 0.

    For real lam >= 0 the result is the non-negative real root; for real
    lam < 0 it is exactly 1j*sqrt(-lam).
    """
    lam = complex(lam)
    if lam.imag == 0.0:
        if lam.real >= 0.0:
            return complex(np.sqrt(lam.real))
        return 1j * np.sqrt(-lam.real)
    w = np.sqrt(lam)
    if w.imag < 0.0:
        w = -w
    return complex(w)


class SpectralPoint:
    """A spectral parameter lambda together with its branch-fixed wavenumber.

    Attributes
    ----------
    lam : complex
        The spectral point (energy).
    k : complex
        sqrt(lam) with Im k >= 0, so k*k == lam.
    """

    __slots__ = ("lam", "k")

    def __init__(self, lam):
        self.lam = complex(lam)
        self.k = sqrt_branch(lam)

    def __repr__(self):
        return f"SpectralPoint(lam={self.lam})"

    @property
    def is_real_negative(self):
        return self.lam.imag == 0.0 and self.lam.real < 0.0


def green(sp, x, y):
    """Fundamental solution G(lambda; x, y) = e^{ikr}/(4 pi r).

    x and y may be single points or broadcastable arrays of points with
    trailing dimension 3.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    r = np.sqrt(np.sum(d * d, axis=-1))
    if np.any(r == 0.0):
        raise SingularEvaluationError("green evaluated at coincident points (r = 0)")
    return np.exp(1j * sp.k * r) / (FOUR_PI * r)


def green_grad_y(sp, x, y):
    """Gradient of G with respect to the source point y (closed form).

    grad_y G = e^{ikr}/(4 pi r^2) * (1/r - ik) * (x - y).  Contracting with
    the unit normal at y gives the double layer kernel.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    r = np.sqrt(np.sum(d * d, axis=-1))
    if np.any(r == 0.0):
        raise SingularEvaluationError("green_grad_y evaluated at coincident points (r = 0)")
    scal = np.exp(1j * sp.k * r) / (FOUR_PI * r * r) * (1.0 / r - 1j * sp.k)
    return scal[..., None] * d


def green_grad_x(sp, x, y):
    """Gradient of G with respect to the observation point x."""
    return -green_grad_y(sp, x, y)


def green_is_real_for_negative_lambda(sp):
    """True iff lambda is real and negative (kernel is then real Yukawa)."""
    return sp.lam.imag == 0.0 and sp.lam.real < 0.0
