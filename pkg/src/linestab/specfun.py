"""Special-function kernels: complex log-Gamma, |Gamma(x+iy)|^2, and sech powers.

The Gamma pieces feed the closed-form Fourier integrals of the short-wave
growth-rate formulas; sech powers evaluate the bound-state profiles without
underflow on large domains.
"""

from __future__ import annotations

import cmath
import math

__all__ = ["GammaPoleError", "log_gamma", "abs_gamma_sq", "sech_pow"]

# Lanczos rational approximation, g = 7, 9 terms (Godfrey coefficients).
# Gives ~1e-14 relative accuracy for Re z >= 0.5 in double precision.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.9189385332046727417803297
_LOG_PI = 1.1447298858494001741434273

_POLE_TOL = 1e-12
_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitting constant


class GammaPoleError(ValueError):
    """Argument is (numerically) a nonpositive integer, where Gamma has a pole."""


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a: float, b: float):
    p = a * b
    aa = a * _SPLIT
    ah = aa - (aa - a)
    al = a - ah
    bb = b * _SPLIT
    bh = bb - (bb - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _log_refined(t: complex):
    # complex log with one Newton correction; the pair (hi, lo) carries the
    # result to roughly double-double accuracy
    hi = cmath.log(t)
    lo = t * cmath.exp(-hi) - 1.0
    lo = lo - lo * lo / 2.0
    return hi, lo


def _log_gamma_right(z: complex) -> complex:
    # Lanczos formula; valid (and principal-branch) for Re z >= 0.5.  The
    # dominant term (w + 1/2) log(t) - t is evaluated with compensated
    # products so the result stays within a few ulp of |log Gamma| even for
    # large |Im z| (exp(log_gamma) then keeps ~1e-13 relative accuracy).
    w = z - 1.0
    s = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        s += c / (w + i)
    t = w + _LANCZOS_G + 0.5
    lt, lt_lo = _log_refined(t)
    ls = cmath.log(s)
    a, b = w.real + 0.5, w.imag
    c_, d = lt.real, lt.imag

    re, re_err = _two_prod(a, c_)
    p, pe = _two_prod(-b, d)
    re, se = _two_sum(re, p)
    re_err += se + pe
    re, se = _two_sum(re, -t.real)
    re = re + (re_err + se + a * lt_lo.real - b * lt_lo.imag
               + _LOG_SQRT_2PI + ls.real)

    im, im_err = _two_prod(a, d)
    p, pe = _two_prod(b, c_)
    im, se = _two_sum(im, p)
    im_err += se + pe
    im, se = _two_sum(im, -t.imag)
    im = im + (im_err + se + a * lt_lo.imag + b * lt_lo.real + ls.imag)
    return complex(re, im)


def _log_sin_pi(z: complex) -> complex:
    # log(sin(pi z)) for Im z >= 0, written to avoid overflow of sin for
    # large |Im z|:  sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z});
    # the large term -i pi z uses compensated products
    pr, pr_lo = _two_prod(math.pi, z.real)
    pi_, pi_lo = _two_prod(math.pi, z.imag)
    rest = cmath.log(1.0 - cmath.exp(complex(-2.0 * pi_, 2.0 * pr)))
    re = pi_ + (pi_lo + rest.real - math.log(2.0))
    im = -pr + (-pr_lo + rest.imag + 0.5 * math.pi)
    return complex(re, im)


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma(z).

    Lanczos approximation for Re z >= 0.5, reflection formula otherwise.
    exp(log_gamma(z)) carries a relative error of order 1e-13 over |z| <= 100
    away from the poles (degrading to a few 1e-13 in the far left half-plane,
    where any double-precision routine is limited by |log Gamma| * eps).

    Raises GammaPoleError when z is within 1e-12 of a nonpositive integer.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        if abs(z.real - round(z.real)) <= _POLE_TOL:
            raise GammaPoleError(f"log_gamma pole at z = {z.real}")
    if z.real >= 0.5:
        return _log_gamma_right(z)
    if z.imag >= 0.0:
        s = _log_sin_pi(z)
        r = _log_gamma_right(1.0 - z)
        return complex(_LOG_PI - s.real - r.real, -s.imag - r.imag)
    return log_gamma(z.conjugate()).conjugate()


def abs_gamma_sq(x: float, y: float) -> float:
    """|Gamma(x+iy)|^2 for x > 0.

    Even in y; equals exp(2 Re log_gamma(x+iy)).
    """
    if x <= 0.0:
        raise ValueError(f"abs_gamma_sq requires x > 0, got x = {x}")
    return math.exp(2.0 * log_gamma(complex(x, y)).real)


def sech_pow(x: float, s: float) -> float:
    """sech(x)**s for s > 0, evaluated in the log domain.

    log sech(x) = -|x| + log 2 - log1p(e^{-2|x|}) avoids underflow of
    sech(x) itself before the power is applied (safe for |x| <= 1000).
    """
    if s <= 0.0:
        raise ValueError(f"sech_pow requires s > 0, got s = {s}")
    ax = abs(x)
    log_sech = -ax + math.log(2.0) - math.log1p(math.exp(-2.0 * ax))
    v = s * log_sech
    if v < -745.0:  # exp underflows to 0 anyway
        return 0.0
    return math.exp(v)
