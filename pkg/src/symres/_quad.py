"""Adaptive quadrature helpers shared across the package.

Improper integrals over the negative spectral half-line and the radial
half-line use the algebraic substitution t = -u/(1-u) (resp. r = u/(1-u))
onto the unit interval, then adaptive quadrature on [0, 1].  Complex
integrands are split into real and imaginary parts.  Every routine returns
(value, achieved_error_estimate).
"""

from __future__ import annotations

import math
from typing import Callable

from scipy.integrate import quad

TARGET_ABS = 1e-12
TARGET_REL = 1e-11
_LIMIT = 200


def _complex_quad(f: Callable[[float], complex], a: float, b: float, **kw) -> tuple:
    opts = {"epsabs": TARGET_ABS, "epsrel": TARGET_REL, "limit": _LIMIT}
    opts.update(kw)
    re, ere = quad(lambda u: f(u).real, a, b, **opts)
    im, eim = quad(lambda u: f(u).imag, a, b, **opts)
    return complex(re, im), ere + eim


def negaxis_quad(f: Callable[[float], complex], **kw) -> tuple:
    """Integral of f over (-inf, 0] via t = -u/(1-u)."""

    def g(u: float) -> complex:
        om = 1.0 - u
        return f(-u / om) / (om * om)

    return _complex_quad(g, 0.0, 1.0, **kw)


def posaxis_quad(f: Callable[[float], complex], **kw) -> tuple:
    """Integral of f over [0, inf) via r = u/(1-u)."""

    def g(u: float) -> complex:
        om = 1.0 - u
        return f(u / om) / (om * om)

    return _complex_quad(g, 0.0, 1.0, **kw)


def segment_quad(f: Callable[[float], complex], a: float, b: float, **kw) -> tuple:
    return _complex_quad(f, a, b, **kw)


def circle_quad(f: Callable[[complex], complex], center: complex, radius: float, n: int = 512) -> tuple:
    """Contour integral over a circle by the trapezoidal rule.

    Spectrally accurate for integrands holomorphic in an annulus around the
    circle; the error estimate is the difference against the n/2-point rule.
    """

    def rule(m: int) -> complex:
        total = 0j
        for j in range(m):
            th = 2.0 * math.pi * (j + 0.5) / m
            z = center + radius * complex(math.cos(th), math.sin(th))
            dz = 1j * radius * complex(math.cos(th), math.sin(th))
            total += f(z) * dz
        return total * (2.0 * math.pi / m)

    full = rule(n)
    half = rule(n // 2)
    return full, abs(full - half)
