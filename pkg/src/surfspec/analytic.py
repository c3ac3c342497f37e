"""Closed-form reference eigenvalues on the unit ball.

Half-integer modified Bessel functions have elementary closed forms; from
them we build the spherical-harmonic symbols of the single layer and
hypersingular boundary operators on the unit sphere and solve the scalar
eigenvalue conditions by bisection.  These values are the ground truth for
the benchmark and acceptance tests.

The delta condition  1 + alpha * I_{l+1/2}(kappa) * K_{l+1/2}(kappa) = 0
(lambda = -kappa^2) admits a root exactly when 2l + 1 < -alpha.

The delta-prime condition is derived from radial matching: with
f = c*i_l(kappa r) inside and f = A*k_l(kappa r) outside, continuity of the
normal derivative and the trace jump gamma f_e - gamma f_i = beta * d_nu f
reduce, via the Wronskian i_l k_l' - i_l' k_l = -pi/(2 z^2), to

    pi / (2 kappa^2) = beta * kappa * i_l'(kappa) * k_l'(kappa).

This condition is a derived result (no printed source formula); it is
guarded by a determinant self-check below and cross-validated against the
boundary element solver in the test suite.  Roots exist exactly when
l(l+1)/(2l+1) < -beta^{-1}.
"""
import math

import numpy as np

from .errors import RootNotFoundError

_L_MAX = 10


def _check_arg(l, x):
    if x <= 0.0:
        raise ValueError(f"Bessel argument must be positive, got x={x}")
    if not 0 <= l <= _L_MAX:
        raise ValueError(f"order l={l} outside supported range [0, {_L_MAX}]")


def _bessel_i_half_series(l, x):
    """Ascending series for I_{l+1/2}(x); used at small x where the upward
    recurrence cancels catastrophically."""
    nu = l + 0.5
    term = (0.5 * x) ** nu / math.gamma(nu + 1.0)
    total = term
    q = 0.25 * x * x
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + nu))
        new = total + term
        if new == total or m > 200:
            return new
        total = new


def _bessel_i_half_scaled(l, x):
    """e^{-x} I_{l+1/2}(x): overflow-safe for large x."""
    if l >= 1 and x < 1.0 + l:
        return _bessel_i_half_series(l, x) * math.exp(-x)
    c = math.sqrt(2.0 / (math.pi * x))
    em = math.exp(-2.0 * x)
    i_prev = 0.5 * c * (1.0 + em)      # e^{-x} I_{-1/2}
    i_cur = 0.5 * c * (1.0 - em)       # e^{-x} I_{+1/2}
    nu = 0.5
    for _ in range(l):
        i_prev, i_cur = i_cur, i_prev - (2.0 * nu / x) * i_cur
        nu += 1.0
    return i_cur


def _bessel_k_half_scaled(l, x):
    """e^{+x} K_{l+1/2}(x): all-positive-term recurrence, stable for any x."""
    k_cur = math.sqrt(math.pi / (2.0 * x))   # e^{x} K_{1/2} = e^{x} K_{-1/2}
    k_prev = k_cur
    nu = 0.5
    for _ in range(l):
        k_prev, k_cur = k_cur, k_prev + (2.0 * nu / x) * k_cur
        nu += 1.0
    return k_cur


def _bessel_i_half(l, x):
    return _bessel_i_half_scaled(l, x) * math.exp(x)


def _bessel_k_half(l, x):
    return _bessel_k_half_scaled(l, x) * math.exp(-x)


def bessel_half(l, x):
    """(I_{l+1/2}(x), K_{l+1/2}(x)) from closed forms and upward recurrence
    (series-backed for I at small argument)."""
    _check_arg(l, x)
    return _bessel_i_half(l, x), _bessel_k_half(l, x)


def spherical_ik(l, x):
    """Modified spherical Bessel values (i_l, k_l, i_l', k_l').

    Normalization: i_l(x) = sqrt(pi/(2x)) I_{l+1/2}(x) and
    k_l(x) = sqrt(pi/(2x)) K_{l+1/2}(x), so k_0(x) = (pi/(2x)) e^{-x}
    and the Wronskian is i_l k_l' - i_l' k_l = -pi/(2 x^2).
    """
    _check_arg(l, x)
    il, kl, ilp, klp = _spherical_ik_scaled(l, x)
    ep = math.exp(x)
    em = math.exp(-x)
    return il * ep, kl * em, ilp * ep, klp * em


def single_layer_sphere_symbol(l, kappa):
    """Eigenvalue of the single layer operator at lambda = -kappa^2 on the
    spherical harmonics of degree l: sigma_l = I_{l+1/2} K_{l+1/2}.

    Evaluated from exponentially scaled factors, so any kappa > 0 is safe.
    """
    _check_arg(l, kappa)
    return _bessel_i_half_scaled(l, kappa) * _bessel_k_half_scaled(l, kappa)


def _spherical_ik_scaled(l, x):
    """(e^{-x} i_l, e^{x} k_l, e^{-x} i_l', e^{x} k_l')."""
    c = math.sqrt(math.pi / (2.0 * x))
    il = c * _bessel_i_half_scaled(l, x)
    kl = c * _bessel_k_half_scaled(l, x)
    if l == 0:
        ilp = c * _bessel_i_half_scaled(1, x)
        klp = -c * _bessel_k_half_scaled(1, x)
    else:
        ilp = c * _bessel_i_half_scaled(l - 1, x) - (l + 1) / x * il
        klp = -c * _bessel_k_half_scaled(l - 1, x) - (l + 1) / x * kl
    return il, kl, ilp, klp


def hypersingular_sphere_symbol(l, kappa):
    """Eigenvalue of the hypersingular operator at lambda = -kappa^2 on
    degree-l harmonics: mu_l = -(2/pi) kappa^3 i_l'(kappa) k_l'(kappa).

    Evaluated from exponentially scaled factors, so any kappa > 0 is safe.
    """
    _check_arg(l, kappa)
    _, _, ilp, klp = _spherical_ik_scaled(l, kappa)
    return -2.0 / math.pi * kappa**3 * ilp * klp


class SphereEigenvalue:
    """Reference eigenvalue of degree l with multiplicity 2l+1."""

    __slots__ = ("l", "lam", "multiplicity", "residual")

    def __init__(self, l, lam, residual):
        self.l = l
        self.lam = lam
        self.multiplicity = 2 * l + 1
        self.residual = residual

    def __repr__(self):
        return f"SphereEigenvalue(l={self.l}, lam={self.lam:.6f}, mult={self.multiplicity})"


def _bisect(f, lo, hi, tol=1e-13, maxit=200):
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise RootNotFoundError(
            f"no sign change in bracket [{lo}, {hi}] (f(lo)={flo:.3e}, f(hi)={fhi:.3e})")
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) < tol:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def delta_sphere_eigs(alpha, l_max=_L_MAX):
    """All unit-ball eigenvalues for a constant delta coupling alpha < 0.

    For each l with 2l+1 < -alpha the unique kappa > 0 with
    1 + alpha*sigma_l(kappa) = 0 is bisected to 1e-13; lambda = -kappa^2.
    """
    if alpha >= 0.0:
        raise ValueError("delta sphere eigenvalues require alpha < 0")
    out = []
    for l in range(0, l_max + 1):
        if 2 * l + 1 >= -alpha:
            break
        f = lambda kappa: 1.0 + alpha * single_layer_sphere_symbol(l, kappa)
        kappa = _bisect(f, 1e-8, -alpha)
        out.append(SphereEigenvalue(l, -kappa * kappa, abs(f(kappa))))
    return out


def deltaprime_sphere_eigs(beta_inv, l_max=_L_MAX):
    """All unit-ball eigenvalues for a constant delta-prime coupling.

    Roots of mu_l(kappa) = -beta_inv (derived radial-matching condition,
    see module docstring).  Existence requires l(l+1)/(2l+1) < -beta_inv.
    """
    if beta_inv >= 0.0:
        raise ValueError("delta-prime sphere eigenvalues require beta_inv < 0")
    beta = 1.0 / beta_inv
    out = []
    kappa_hi = 2.0 * abs(beta_inv) + 8.0
    for l in range(0, l_max + 1):
        if l * (l + 1) / (2 * l + 1) >= -beta_inv:
            break
        f = lambda kappa: hypersingular_sphere_symbol(l, kappa) + beta_inv
        kappa = _bisect(f, 1e-6, kappa_hi)
        # determinant self-check of the 2x2 radial matching system
        res = abs(radial_matching_determinant(l, kappa, beta))
        out.append(SphereEigenvalue(l, -kappa * kappa, res))
    return out


def radial_matching_determinant(l, kappa, beta):
    """Normalized determinant of the 2x2 interior/exterior matching system
    (unknowns: interior/exterior radial amplitudes).

    Rows: continuity of the conormal derivative; trace jump = beta * d_nu f.
    Vanishes exactly at delta-prime eigenvalues; normalized by pi/(2 kappa).
    Evaluated from exponentially scaled Bessel products (the e^{+-kappa}
    factors cancel row-wise), so large kappa is safe.
    """
    il, kl, ilp, klp = _spherical_ik_scaled(l, kappa)
    m = np.array([
        [kappa * ilp, -kappa * klp],
        [-il - beta * kappa * ilp, kl],
    ])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return det / (math.pi / (2.0 * kappa))
