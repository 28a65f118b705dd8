"""Gamma and Beta functions.

A Lanczos approximation (g = 7, nine coefficients) evaluated in log form so
that large arguments do not overflow before the final exponential.  Relative
accuracy is about 1e-15 over (0, 171).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["gamma_fn", "log_gamma_fn", "beta_fn", "rgamma"]

_G = 7.0
_COEFFS = (
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
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z):
    # z is the shifted argument x - 1
    acc = _COEFFS[0]
    for k, c in enumerate(_COEFFS[1:], start=1):
        acc = acc + c / (z + k)
    return acc


def _check_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} must be finite and > 0, got {x!r}")
    return arr


def log_gamma_fn(x):
    """log Gamma(x) for x > 0."""
    arr = _check_positive(x)
    out = np.empty_like(arr)
    small = arr < 0.5
    if np.any(small):
        xs = arr[small]
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        out[small] = math.log(math.pi) - np.log(np.sin(np.pi * xs)) - log_gamma_fn(1.0 - xs)
    big = ~small
    if np.any(big):
        z = arr[big] - 1.0
        t = z + _G + 0.5
        out[big] = _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(_lanczos_sum(z))
    return out.item() if np.ndim(x) == 0 else out


def gamma_fn(x):
    """Euler's Gamma function for x > 0 (scalar or array)."""
    arr = _check_positive(x)
    out = np.empty_like(arr)
    small = arr < 0.5
    if np.any(small):
        xs = arr[small]
        out[small] = np.pi / (np.sin(np.pi * xs) * gamma_fn(1.0 - xs))
    big = ~small
    if np.any(big):
        z = arr[big] - 1.0
        t = z + _G + 0.5
        # split the power so t**(z + 0.5) never overflows on its own
        half = t ** (0.5 * (z + 0.5))
        out[big] = math.sqrt(2.0 * math.pi) * (half * np.exp(-t)) * half * _lanczos_sum(z)
    return out.item() if np.ndim(x) == 0 else out


def rgamma(x):
    """1 / Gamma(x); returns 0 at the poles x = 0, -1, -2, ... ."""
    xv = float(x)
    if xv > 0:
        return 1.0 / gamma_fn(xv)
    if xv == math.floor(xv):
        return 0.0
    # Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1)) with x + k > 0
    k = int(math.floor(-xv)) + 1
    prod = 1.0
    for i in range(k):
        prod *= xv + i
    return prod / gamma_fn(xv + k)


def beta_fn(p, q):
    """Euler's Beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q)."""
    _check_positive(p, "p")
    _check_positive(q, "q")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    s = p + q
    if np.all(s < 150.0):
        out = gamma_fn(p) * gamma_fn(q) / gamma_fn(s)
    else:
        out = np.exp(log_gamma_fn(p) + log_gamma_fn(q) - log_gamma_fn(s))
    return float(out) if np.ndim(out) == 0 else out
