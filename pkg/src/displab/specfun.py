"""Bessel and Hankel functions of integer and half-integer order.

Integer orders use the ascending power series for |z| <= SERIES_CUTOFF and the
Hankel asymptotic expansion (optimally truncated) beyond.  Half-integer orders
use the terminating trigonometric closed forms everywhere.

The public functions validate a real positive argument.  The underscore
helpers accept complex arrays; the oscillatory quadrature evaluates kernels on
a contour slightly above the real axis and relies on them.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial, lgamma, pi

import numpy as np

SERIES_CUTOFF = 14.0
_NSERIES = 48
_NASYM = 40
_EULER = 0.57721566490153286061


class DomainError(ValueError):
    """Argument outside the domain of a special-function routine."""


def as_order(nu) -> Fraction:
    """Normalise an order to a Fraction, requiring an integer or half-integer."""
    q = Fraction(nu).limit_denominator(2) if not isinstance(nu, Fraction) else nu
    if (2 * q).denominator != 1 or abs(float(q) - float(nu)) > 1e-12:
        raise DomainError(f"order must be an integer or half-integer, got {nu!r}")
    return q


def _is_half(nu: Fraction) -> bool:
    return nu.denominator == 2


def _positive(z, name="z"):
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z <= 0):
        raise DomainError(f"{name} must be real and > 0")
    return z


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


# --- coefficient tables -----------------------------------------------------

def _asym_coeffs(nu: Fraction, nterms: int) -> np.ndarray:
    """a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k)."""
    mu = 4 * float(nu) ** 2
    a = np.empty(nterms)
    a[0] = 1.0
    for k in range(1, nterms):
        a[k] = a[k - 1] * (mu - (2 * k - 1) ** 2) / (k * 8.0)
    return a


def _digamma_int(m: int) -> float:
    return -_EULER + sum(1.0 / j for j in range(1, m))


# --- integer order: series --------------------------------------------------

def _series_j(n: int, z):
    h = z / 2
    q = -h * h
    term = h**n / factorial(n)
    total = term
    for k in range(1, _NSERIES):
        term = term * q / (k * (k + n))
        total = total + term
    return total


def _series_y(n: int, z):
    """DLMF 10.8.1 with digamma coefficients."""
    h = z / 2
    q = h * h
    out = (2 / pi) * np.log(h) * _series_j(n, z)
    if n > 0:
        fin = np.zeros_like(z, dtype=complex)
        for k in range(n):
            fin = fin + factorial(n - k - 1) / factorial(k) * q**k
        out = out - fin * h ** (-n) / pi
    acc = np.zeros_like(z, dtype=complex)
    term = h**n / factorial(n)
    for k in range(_NSERIES):
        if k:
            term = term * (-q) / (k * (k + n))
        acc = acc + (_digamma_int(k + 1) + _digamma_int(n + k + 1)) * term
    return out - acc / pi


# --- asymptotic / closed forms ----------------------------------------------

def _asymptotic(nu: Fraction, z, kind: int):
    """Hankel expansion; exact (terminating) for half-integer nu."""
    z = np.asarray(z, dtype=complex)
    if _is_half(nu):
        nterms = int(abs(nu) - Fraction(1, 2)) + 1
    else:
        nterms = _NASYM
    a = _asym_coeffs(nu, nterms)
    unit = 1j if kind == 1 else -1j
    w = unit / z
    total = np.ones_like(z)
    best = np.ones(z.shape, dtype=bool)
    prev = np.ones(z.shape)
    p = np.ones_like(z)
    for k in range(1, nterms):
        p = p * w
        term = a[k] * p
        mag = np.abs(term)
        if not _is_half(nu):
            # optimal truncation: stop once terms start growing
            best = best & (mag < prev)
            term = np.where(best, term, 0)
            prev = np.where(best, mag, prev)
        total = total + term
        if not _is_half(nu) and np.all(mag < 1e-17):
            break
    phase = z - float(nu) * pi / 2 - pi / 4
    pref = np.sqrt(2 / (pi * z))
    if kind == 1:
        return pref * np.exp(1j * phase) * total
    return pref * np.exp(-1j * phase) * total


def _hankel(nu, z, kind: int = 1):
    """H^(kind)_nu(z) for complex z off the negative real axis."""
    nu = as_order(nu)
    if nu < 0:
        rot = np.exp((1j if kind == 1 else -1j) * pi * float(-nu))
        return rot * _hankel(-nu, z, kind)
    z = np.asarray(z, dtype=complex)
    if _is_half(nu):
        return _asymptotic(nu, z, kind)
    n = int(nu)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= SERIES_CUTOFF
    if np.any(small):
        zs = z[small]
        j = _series_j(n, zs)
        y = _series_y(n, zs)
        out[small] = j + 1j * y if kind == 1 else j - 1j * y
    if np.any(~small):
        out[~small] = _asymptotic(nu, z[~small], kind)
    return out


def _besselj_complex(nu, z):
    """J_nu(z) for complex z near the positive real axis."""
    nu = as_order(nu)
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) <= 2.0
    if np.any(small):
        h = z[small] / 2
        v = float(nu)
        term = h**v / np.exp(lgamma(v + 1))
        tot = term
        for k in range(1, _NSERIES):
            term = term * (-h * h) / (k * (k + v))
            tot = tot + term
        out[small] = tot
    if np.any(~small):
        zl = z[~small]
        out[~small] = 0.5 * (_hankel(nu, zl, 1) + _hankel(nu, zl, 2))
    return out


# --- public API -------------------------------------------------------------

def hankel1(nu, z):
    """First Hankel function H^(1)_nu(z) for real z > 0."""
    z = _positive(z)
    return _out(_hankel(nu, z, 1))


def hankel2(nu, z):
    """Second Hankel function H^(2)_nu(z) = conj(H^(1)_nu(z)) for real z > 0."""
    z = _positive(z)
    return _out(_hankel(nu, z, 2))


def hankel1_negreal(nu, x):
    """H^(1)_nu at the negative real point -x, continued from the upper half-plane.

    Uses H^(1)_nu(x e^{i pi}) = -e^{-i nu pi} H^(2)_nu(x).
    """
    x = _positive(x, "x")
    nu = as_order(nu)
    return _out(-np.exp(-1j * pi * float(nu)) * _hankel(nu, x, 2))


def besselj(nu, z):
    """Bessel function of the first kind for real z >= 0.

    Computed independently of the Hankel routines: Bessel's integral with the
    periodic trapezoidal rule for integer order, and the sine/cosine upward
    recurrence (series near the origin) for half-integer order.
    """
    nu = as_order(nu)
    if nu < 0:
        raise DomainError("besselj requires nu >= 0")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(~np.isfinite(z)):
        raise DomainError("z must be real and >= 0")
    out = np.empty(z.shape)
    small = z <= 1.0
    if np.any(small):
        out[small] = _besselj_complex(nu, z[small]).real
    zl = z[~small]
    if zl.size:
        if _is_half(nu):
            s = np.sqrt(2 / (pi * zl))
            jm = s * np.cos(zl)  # J_{-1/2}
            jc = s * np.sin(zl)  # J_{1/2}
            v = Fraction(1, 2)
            while v < nu:
                jm, jc = jc, (2 * float(v) / zl) * jc - jm
                v += 1
            out[~small] = jc
        else:
            n = int(nu)
            # aliasing error is about J_m(z), negligible once m exceeds z by a few z^(1/3)
            zmax = float(np.max(zl))
            m = int(zmax + 20 * zmax ** (1 / 3)) + n + 40
            theta = 2 * pi * np.arange(m) / m
            vals = np.cos(n * theta[None, :] - zl[:, None] * np.sin(theta[None, :]))
            out[~small] = vals.mean(axis=1)
    return _out(out)


def bessely(nu, z):
    """Bessel function of the second kind Y_nu(z) = Im H^(1)_nu(z), z > 0."""
    return _out(np.imag(hankel1(nu, z)))


def _h0_derivative(j: int, z):
    """d^j/dz^j H^(1)_0 via H_v' = (H_{v-1} - H_{v+1}) / 2 (complex z)."""
    total = np.zeros_like(np.asarray(z, dtype=complex))
    for m in range(j + 1):
        total = total + (-1) ** m * _binom(j, m) * _hankel(2 * m - j, z, 1)
    return total / 2**j


def _h0_derivative_negreal(j: int, x):
    total = np.zeros(np.shape(x), dtype=complex)
    for m in range(j + 1):
        q = 2 * m - j
        h = -np.exp(-1j * pi * q) * _hankel(q, x, 2)
        total = total + (-1) ** m * _binom(j, m) * h
    return total / 2**j


def _binom(a: int, b: int) -> int:
    return factorial(a) // (factorial(b) * factorial(a - b))


def omega(z, deriv: int = 0):
    """Remainder factor of H^(1)_0 around its leading asymptotic.

    omega(z) = H^(1)_0(z) (pi i z / 2)^{1/2} e^{-iz}, so omega -> 1 along every
    ray in the closed upper half-plane.  Negative real z is reached by
    continuation from above (z^{1/2} = i |z|^{1/2}).  ``deriv`` selects the
    derivative order, assembled from Hankel recurrences.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z == 0) or np.any(~np.isfinite(z)):
        raise DomainError("omega requires real z != 0")
    out = np.zeros(z.shape, dtype=complex)
    pos = z > 0
    x = np.abs(z)
    # sqrt(z) on the continuation branch, and its derivatives
    sq = np.where(pos, np.sqrt(x), 1j * np.sqrt(x)).astype(complex)
    c = np.sqrt(pi / 2) * np.exp(1j * pi / 4)
    for j in range(deriv + 1):
        hj = np.zeros(z.shape, dtype=complex)
        if np.any(pos):
            hj[pos] = _h0_derivative(j, x[pos])
        if np.any(~pos):
            hj[~pos] = _h0_derivative_negreal(j, x[~pos])
        # d^{deriv-j}/dz^{deriv-j} [z^{1/2} e^{-iz}]
        q = deriv - j
        g = np.zeros(z.shape, dtype=complex)
        for p in range(q + 1):
            falling = 1.0
            for i in range(p):
                falling *= 0.5 - i
            g = g + _binom(q, p) * falling * sq * z ** (-p) * (-1j) ** (q - p)
        out = out + _binom(deriv, j) * hj * g
    return _out(c * out * np.exp(-1j * z))
