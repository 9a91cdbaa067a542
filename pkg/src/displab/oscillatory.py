"""Regularised oscillatory spectral integrals.

Computes

    I = int_0^inf e^{i t mu} psi(mu / L) g(mu) d mu

for integrands g built from resolvent kernels.  After mu = k^2 the kernel
phases are linear in k, so [0, K] is covered by Gauss-Legendre panels sized to
the local wavelength.  Beyond K the cutoff is written exactly as a finite sum
of exponentials, psi(mu/L) = (L/mu)^2 sum_j c_j e^{i w_j mu}, and each piece is
integrated along the ray k = K + i sign(t + w_j) y, where it decays
exponentially.  No truncation error is incurred from the slow mu^{-2} decay of
the cutoff.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .resolvent import kernel_k, kernel_negative_energy

GX15, GW15 = np.polynomial.legendre.leggauss(15)
GX10, GW10 = np.polynomial.legendre.leggauss(10)


class ConvergenceError(RuntimeError):
    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


class PreconditionError(ValueError):
    pass


def _fejer(lam):
    return np.sinc(np.asarray(lam) / (2 * np.pi)) ** 2


@dataclass(frozen=True)
class PsiCutoff:
    """psi_L(mu) = psi(mu / L) with a band-limited profile psi.

    "fejer": (sin(x/2) / (x/2))^2, Fourier transform the triangle on [-1, 1].
    "flat":  (4/3) fejer(x/2) - (1/3) fejer(x); same support and psi(0) = 1, but
             psi(x) = 1 + O(x^4), which removes the O(1/L) bias of the Fejer
             profile at the stationary energy.
    """

    L: float
    shape: str = "flat"

    def __post_init__(self):
        if self.shape not in ("flat", "fejer"):
            raise ValueError(f"unknown profile {self.shape!r}")
        if not self.L > 0:
            raise ValueError("L must be > 0")

    def profile(self, x):
        if self.shape == "fejer":
            return _fejer(x)
        return (4 / 3) * _fejer(np.asarray(x) / 2) - (1 / 3) * _fejer(x)

    def __call__(self, mu):
        out = self.profile(np.asarray(mu, dtype=float) / self.L)
        return out[()] if np.ndim(out) == 0 else out

    def exponentials(self):
        """(c_j, w_j) with psi(mu / L) = (L / mu)^2 sum_j c_j exp(i w_j mu)."""
        L = self.L
        if self.shape == "fejer":
            return [(2.0, 0.0), (-1.0, 1 / L), (-1.0, -1 / L)]
        return [
            (10.0, 0.0),
            (-16 / 3, 0.5 / L), (-16 / 3, -0.5 / L),
            (1 / 3, 1 / L), (1 / 3, -1 / L),
        ]

    def bandwidth(self):
        return 1 / self.L


def psi(c: PsiCutoff, mu):
    return c(mu)


@dataclass
class OscIntegralSpec:
    n: int
    t: float
    r: float
    s: Optional[float] = None
    L: float = 1e4
    tol: float = 1e-6
    shape: str = "flat"
    max_panels: int = 200_000

    @property
    def cutoff(self):
        return PsiCutoff(self.L, self.shape)

    @property
    def reach(self):
        return self.r + (self.s or 0.0)


def _panel_edges(a, b, width_fn, refine):
    edges = [a]
    x = a
    while x < b:
        x = min(x + width_fn(x) / refine, b)
        edges.append(x)
    return np.asarray(edges)


def _graded_start(first):
    """Geometric panels towards 0 to resolve algebraic/log behaviour at k = 0."""
    return first * np.array([0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1])


def _nodes(edges, gx, gw):
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    x = (half[:, None] * gx[None, :] + 0.5 * (a + b)[:, None]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return x, w


def _weighted_sum(f, x, w, chunk=20000):
    total = None
    for i in range(0, len(x), chunk):
        vals = np.asarray(f(x[i : i + chunk]))
        ww = w[i : i + chunk]
        part = np.tensordot(ww, vals, axes=(0, 0))
        total = part if total is None else total + part
    return total


def integrate_spectral(
    spec: OscIntegralSpec,
    integrand: Callable,
    reach: Optional[float] = None,
    negative: Optional[tuple] = None,
    chunk: int = 20000,
):
    """int_0^inf e^{i t mu} psi_L(mu) integrand(mu) d mu.

    integrand accepts complex mu (it is evaluated on a deformed contour) and
    must grow at most like exp(reach |Im sqrt(mu)|).  It may return shape
    (N,) or (N, m) for N energies; vector outputs are integrated jointly.
    ``negative = (h, decay)`` adds int_{-inf}^0 e^{i t mu} psi_L(mu) h(mu) d mu
    for a real-axis h decaying like exp(-decay sqrt(-mu)).
    """
    t = spec.t
    cut = spec.cutoff
    reach = spec.reach if reach is None else reach
    terms = cut.exponentials()
    taus = [t + w for _, w in terms]
    live = [abs(x) for x in taus if abs(x) > 1e-12]
    if not live:
        raise PreconditionError("need t != 0")
    if any(np.sign(x) != np.sign(t) for x in taus if abs(x) > 1e-12):
        raise PreconditionError("need |t| >= bandwidth of the cutoff (L > 1/|t|)")
    tau_min = min(live)
    K = max(2 * (reach + 1) / tau_min, np.sqrt(cut.L), 10.0)
    at = abs(t)

    def f_real(k):
        mu = k * k
        return (np.exp(1j * t * mu) * cut(mu) * 2 * k)[..., None] * _as2d(integrand(mu + 0j))

    def width(k):
        return min(np.pi / (2 * at * k + reach + 1e-300), 1.0)

    refine = 1
    partial = 0j
    while True:
        first = width(0.0) / refine
        edges = np.concatenate([_graded_start(first), _panel_edges(first, K, width, refine)[1:]])
        if len(edges) > spec.max_panels:
            raise ConvergenceError("panel budget exhausted", _squeeze(partial))
        x15, w15 = _nodes(edges, GX15, GW15)
        x10, w10 = _nodes(edges, GX10, GW10)
        v15 = _weighted_sum(f_real, x15, w15, chunk)
        v10 = _weighted_sum(f_real, x10, w10, chunk)
        partial = v15
        scale = max(np.max(np.abs(v15)), 1e-300)
        if np.max(np.abs(v15 - v10)) <= spec.tol * scale:
            break
        refine *= 2
        if refine > 16:
            raise ConvergenceError("real-axis panels did not converge", _squeeze(partial))

    total = v15 + _tail(integrand, terms, t, K, reach, cut.L)
    if negative is not None:
        h, decay = negative
        total = total + _negative_part(h, decay, t, cut)
    return _squeeze(total)


def _as2d(v):
    v = np.asarray(v)
    return v[:, None] if v.ndim == 1 else v


def _squeeze(v):
    v = np.asarray(v)
    return complex(v[0]) if v.shape == (1,) else v


def _tail(integrand, terms, t, K, reach, L):
    total = 0
    for c, w in terms:
        tau = t + w
        if abs(tau) <= 1e-12:
            total = total + c * _static_tail(integrand, K, L)
            continue
        sg = np.sign(tau)
        rate = 2 * abs(tau) * K - reach
        ymax = 60.0 / rate
        edges = np.linspace(0.0, ymax, 41)
        y, wy = _nodes(edges, GX15, GW15)
        kc = K + 1j * sg * y
        mu = kc * kc
        f = (c * np.exp(1j * tau * mu) * L**2 / mu**2 * 2 * kc)[:, None] * _as2d(integrand(mu))
        total = total + 1j * sg * np.tensordot(wy, f, axes=(0, 0))
    return total


def _static_tail(integrand, K, L):
    """int_K^inf (L/k^2)^2 g(k^2) 2k dk via k = K / v (non-oscillatory piece)."""
    edges = np.linspace(0.0, 1.0, 401)
    v, wv = _nodes(edges, GX15, GW15)
    k = K / v
    mu = k * k
    f = (L**2 / mu**2 * 2 * k * K / v**2)[:, None] * _as2d(integrand(mu + 0j))
    return np.tensordot(wv, f, axes=(0, 0))


def _negative_part(h, decay, t, cut):
    """int_0^inf e^{-i t kappa^2} psi_L(kappa^2) h(-kappa^2) 2 kappa d kappa."""
    kmax = 50.0 / decay
    at = abs(t)
    first = min(np.pi / (2 * at * kmax + 1), kmax / 50)
    edges = np.concatenate([_graded_start(first), _panel_edges(first, kmax, lambda x: min(np.pi / (2 * at * x + 1), kmax / 50), 1)[1:]])
    x, w = _nodes(edges, GX15, GW15)
    mu = x * x
    f = (np.exp(-1j * t * mu) * cut(mu) * 2 * x)[:, None] * _as2d(h(-mu))
    return np.tensordot(w, f, axes=(0, 0))


# --- resolvent integrands -----------------------------------------------------


def _k_of(mu):
    return np.sqrt(np.asarray(mu, dtype=complex))


def transform_single(n, t, r, L, sign=-1, tol=1e-6, shape="flat"):
    """int e^{i t lam} psi_L(lam) R_n^{sign}(lam, r) d lam over the whole real line.

    The negative energies contribute through the real, exponentially decaying
    kernel (2 pi)^{-n/2} (kappa/r)^nu K_nu(kappa r) at lam = -kappa^2.
    """
    if r <= 0:
        raise PreconditionError("r must be > 0")
    spec = OscIntegralSpec(n=n, t=t, r=r, L=L, tol=tol, shape=shape)

    def g(mu):
        return kernel_k(sign, n, _k_of(mu), r)

    def h(mu):
        return kernel_negative_energy(n, np.sqrt(-mu), r)

    return integrate_spectral(spec, g, negative=(h, r))


def transform_single_exact(n, t, r):
    """-2 pi i (-4 pi i t)^{-n/2} e^{-i r^2 / 4t} for t > 0, and 0 for t < 0."""
    from .expr import branch_pow

    if t < 0:
        return 0j
    return -2j * np.pi * np.exp(-1j * r * r / (4 * t)) / branch_pow(t, n / 2)


def product_transform(n, t, r, s, L, sign=-1, tol=1e-6, shape="flat"):
    """int e^{i t lam} psi_L(lam) R^{sign}(lam, r) R^{sign}(lam, s) d lam over the real line."""
    spec = OscIntegralSpec(n=n, t=t, r=r, s=s, L=L, tol=tol, shape=shape)

    def g(mu):
        k = _k_of(mu)
        return kernel_k(sign, n, k, r) * kernel_k(sign, n, k, s)

    def h(mu):
        kappa = np.sqrt(-mu)
        return kernel_negative_energy(n, kappa, r) * kernel_negative_energy(n, kappa, s)

    return integrate_spectral(spec, g, negative=(h, r + s))


def i_L(n, t, r, s, L, tol=1e-6, shape="flat", multiplier=None, extra_reach=0.0):
    """int_0^inf e^{i t lam} psi_L(lam) [R^+ R^+ - R^- R^-](lam; r, s) d lam.

    On the real axis the bracket is 2i Im(R^+(r) R^+(s)); the analytic form is
    used so the integrand continues off the axis.  ``multiplier(k)`` multiplies
    the spectral integrand (entire in k, growth exp(extra_reach |Im k|)).
    """
    if t <= 0 or r <= 0 or s <= 0:
        raise PreconditionError("need t, r, s > 0")
    spec = OscIntegralSpec(n=n, t=t, r=r, s=s, L=L, tol=tol, shape=shape)

    def g(mu):
        k = _k_of(mu)
        out = kernel_k(1, n, k, r) * kernel_k(1, n, k, s) - kernel_k(-1, n, k, r) * kernel_k(-1, n, k, s)
        return out * multiplier(k) if multiplier is not None else out

    return integrate_spectral(spec, g, reach=r + s + extra_reach)


def i_L_batch(n, t, r, s, L, tol=1e-6, shape="flat", multiplier=None, extra_reach=0.0):
    """i_L for arrays of (r, s) pairs on one shared quadrature grid."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if t <= 0 or np.any(r <= 0) or np.any(s <= 0):
        raise PreconditionError("need t, r, s > 0")
    spec = OscIntegralSpec(n=n, t=t, r=float(np.max(r)), s=float(np.max(s)), L=L, tol=tol, shape=shape)

    def g(mu):
        k = _k_of(mu)[:, None]
        out = kernel_k(1, n, k, r[None, :]) * kernel_k(1, n, k, s[None, :])
        out = out - kernel_k(-1, n, k, r[None, :]) * kernel_k(-1, n, k, s[None, :])
        return out * multiplier(k) if multiplier is not None else out

    reach = float(np.max(r + s)) + extra_reach
    chunk = max(64, 400_000 // len(r))
    return np.atleast_1d(integrate_spectral(spec, g, reach=reach, chunk=chunk))
