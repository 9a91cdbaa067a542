"""Oscillating potentials synchronised with the free Schrodinger phase.

The potential lives on the prolate ellipsoidal shell

    6 <= |x0 - x1| + |x1 - y0| <= 8,   x0 = e1, y0 = -e1,

and oscillates like F(cos(sigma^2 / 4t)) in the length sum sigma, i.e. in step
with the phase e^{-i sigma^2 / 4t} of the time-t product transform.  The first
Born term tested against x0 and y0 then grows like t^{-(n-3-2 alpha)/2}.

x1-integrals of functions of the two focal distances are reduced by axial
symmetry to prolate coordinates (sigma, delta) with delta = r - s; delta is
written as 2 sin(theta) so the weight is smooth.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import gamma, pi
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import specfun
from .kernel_calculus import leading_term
from .oscillatory import i_L_batch
from .resolvent import sphere_area

SIG_LO, SIG_HI = 6.0, 8.0


class PreconditionError(ValueError):
    pass


# --- geometry and profiles ---------------------------------------------------


@dataclass(frozen=True)
class Geometry:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise PreconditionError("n must be >= 2")

    @property
    def x0(self):
        e = np.zeros(self.n)
        e[0] = 1.0
        return e

    @property
    def y0(self):
        return -self.x0


def ellipse_sum(g: Geometry, x1):
    x1 = np.asarray(x1, dtype=float)
    return np.linalg.norm(x1 - g.x0, axis=-1) + np.linalg.norm(x1 - g.y0, axis=-1)


def _theta(u):
    u = np.clip(u, 1e-300, 1 - 1e-16)
    a = np.exp(-1 / u)
    b = np.exp(-1 / (1 - u))
    return a / (a + b)


def F_profile(s):
    """Smooth, 0 on (-inf, 0], s on [1/2, inf), s * theta(2s) in between."""
    s = np.asarray(s, dtype=float)
    mid = (s > 0) & (s < 0.5)
    out = np.where(s >= 0.5, s, 0.0)
    out = np.where(mid, s * _theta(2 * np.where(mid, s, 0.25)), out)
    return out[()] if out.ndim == 0 else out


_PHI_PEAK = np.exp(-1.0)


def phi_profile(u):
    """exp(-1/((u-6)(8-u))) on (6, 8), normalised to peak value 1 at u = 7."""
    u = np.asarray(u, dtype=float)
    inside = (u > SIG_LO) & (u < SIG_HI)
    q = np.where(inside, (u - SIG_LO) * (SIG_HI - u), 1.0)
    out = np.where(inside, np.exp(-1 / q) / _PHI_PEAK, 0.0)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class PotentialSpec:
    """C_n t^alpha phi(sigma) F(cos(sigma^2 / 4 t_phase)), t_phase = t unless set."""

    g: Geometry
    alpha: float
    t: float
    Cn: float = 1.0
    phase_t: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.t <= 1:
            raise PreconditionError("t must lie in (0, 1]")
        if self.alpha <= 0:
            raise PreconditionError("alpha must be > 0")

    @property
    def amplitude(self):
        return self.Cn * self.t**self.alpha

    def profile(self, sigma):
        """The potential as a function of the length sum, without C_n t^alpha."""
        tp = self.t if self.phase_t is None else self.phase_t
        sigma = np.asarray(sigma, dtype=float)
        return phi_profile(sigma) * F_profile(np.cos(sigma**2 / (4 * tp)))

    def with_scale(self, Cn):
        return PotentialSpec(self.g, self.alpha, self.t, Cn, self.phase_t)


def V_t(spec: PotentialSpec, x1):
    return spec.amplitude * spec.profile(ellipse_sum(spec.g, x1))


# --- bumps -------------------------------------------------------------------


def _mollifier(q):
    q = np.asarray(q, dtype=float)
    inside = q < 1
    return np.where(inside, np.exp(-1 / np.where(inside, 1 - q * q, 1.0)), 0.0)


_GX40, _GW40 = np.polynomial.legendre.leggauss(40)


@dataclass(frozen=True)
class BumpPair:
    """Radial unit-mass bumps supported in B(x0, eps) and B(y0, eps)."""

    n: int
    eps: float

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise PreconditionError("eps must lie in (0, 1/2)")

    def _radial_nodes(self):
        rho = 0.5 * self.eps * (_GX40 + 1)
        w = 0.5 * self.eps * _GW40
        return rho, w

    @property
    def norm(self):
        rho, w = self._radial_nodes()
        return sphere_area(self.n) * np.sum(w * rho ** (self.n - 1) * _mollifier(rho / self.eps))

    def density(self, dist):
        """Bump value at distance dist from its centre."""
        return _mollifier(np.asarray(dist) / self.eps) / self.norm

    def mass(self):
        """Independent check of the normalisation by adaptive quadrature."""
        f = lambda p: sphere_area(self.n) * p ** (self.n - 1) * self.density(p)
        return integrate.quad(f, 0, self.eps, epsabs=1e-13, epsrel=1e-12)[0]

    def multiplier(self, k):
        """m(k) = int f(y) Gamma(nu+1) (2/(k|y|))^nu J_nu(k|y|) dy, nu = n/2 - 1.

        By the mean-value property of Helmholtz solutions, a resolvent kernel
        smeared over the bump equals the point kernel times m(k) outside its
        support.  m is entire and even in k, with exponential type eps.
        """
        nu = self.n / 2 - 1
        rho, w = self._radial_nodes()
        k = np.asarray(k, dtype=complex)
        z = k[..., None] * rho
        zs = np.where(np.abs(z) < 1e-8, 1e-8, z)
        from fractions import Fraction

        jv = specfun._besselj_complex(Fraction(self.n - 2, 2), zs)
        kern = gamma(nu + 1) * (2 / zs) ** nu * jv
        kern = np.where(np.abs(z) < 1e-8, 1.0, kern)
        dens = sphere_area(self.n) * w * rho ** (self.n - 1) * self.density(rho)
        return kern @ dens


# --- reduced x1 quadrature ---------------------------------------------------

_GX15, _GW15 = np.polynomial.legendre.leggauss(15)


def sigma_nodes(t, lo=SIG_LO, hi=SIG_HI, per_period=8):
    """GL-15 panels of 1/per_period of the local period 4 pi t / sigma."""
    edges = [lo]
    x = lo
    while x < hi:
        x = min(x + 4 * pi * t / x / per_period, hi)
        edges.append(x)
    e = np.asarray(edges)
    a, b = e[:-1], e[1:]
    nodes = (0.5 * (b - a)[:, None] * _GX15 + 0.5 * (a + b)[:, None]).ravel()
    weights = (0.5 * (b - a)[:, None] * _GW15).ravel()
    return nodes, weights


def angle_nodes(m=16):
    """Nodes in theta in (-pi/2, pi/2), delta = 2 sin(theta)."""
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * pi * x, 0.5 * pi * w


def prolate_weight(n, sigma, theta):
    """Volume density in (sigma, theta) for axially symmetric x1-integrands.

    dx1 = |S^{n-2}| rho^{n-3} (r s / 4) d sigma d delta, with
    rho = sqrt((sigma^2-4)(4-delta^2))/4 and delta = 2 sin(theta).
    """
    sigma = np.asarray(sigma, dtype=float)
    delta = 2 * np.sin(theta)
    c = 2 * np.cos(theta)
    rs = (sigma**2 - delta**2) / 4
    rho_part = ((sigma**2 - 4) / 16) ** ((n - 3) / 2)
    return sphere_area(n - 1) * rho_part * c ** (n - 2) * rs / 4


def focal_distances(sigma, theta):
    delta = 2 * np.sin(theta)
    return (sigma + delta) / 2, (sigma - delta) / 2


def prolate_point(sigma, theta):
    """Axial coordinate u and distance rho to the axis."""
    delta = 2 * np.sin(theta)
    u = -sigma * delta / 4
    rho = np.sqrt(np.maximum(sigma**2 - 4, 0) * (2 * np.cos(theta)) ** 2) / 4
    return u, rho


def shell_integral(n, func: Callable, lo=SIG_LO, hi=SIG_HI, t=None, m_angle=16):
    """int over {lo <= sigma <= hi} of func(sigma, theta) dx1."""
    if t is None:
        x, w = np.polynomial.legendre.leggauss(40)
        sig = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        ws = 0.5 * (hi - lo) * w
    else:
        sig, ws = sigma_nodes(t, lo, hi)
    th, wt = angle_nodes(m_angle)
    S, T = np.meshgrid(sig, th, indexing="ij")
    vals = func(S, T) * prolate_weight(n, S, T)
    return ws @ vals @ wt


def ellipsoid_volume(n, sigma):
    """Volume of {|x - e1| + |x + e1| <= sigma}: V_n a b^{n-1}."""
    a = sigma / 2
    b = np.sqrt(a * a - 1)
    return pi ** (n / 2) / gamma(n / 2 + 1) * a * b ** (n - 1)


# --- first Born term -----------------------------------------------------------


def main_amplitude(n, r, s):
    return (r + s) ** (n - 2) / (r * s) ** ((n - 1) / 2)


def a1_main_term(spec: PotentialSpec, bumps: Optional[BumpPair] = None, potential=None):
    """t^{n/2} int (-leading term)(|x0-x1|, |x1-y0|, t) V(x1) dx1 (point sources).

    ``potential(sigma, theta)`` overrides the synchronised profile (the
    amplitude C_n t^alpha is applied either way).  With bumps, the integrand
    is multiplied by m(k*)^2 at the stationary wavenumber k* = sigma / 2t,
    which is the leading stationary-phase effect of smearing both sources.
    """
    n, t = spec.g.n, spec.t

    def f(S, T):
        r, s = focal_distances(S, T)
        v = spec.profile(S) if potential is None else potential(S, T)
        val = -leading_term(n, r, s, t) * v
        if bumps is not None:
            # m depends on sigma only, which runs along axis 0 of the mesh
            val = val * bumps.multiplier(S[:, 0] / (2 * t))[:, None] ** 2
        return val

    return t ** (n / 2) * spec.amplitude * shell_integral(n, f, t=t)


def synchronised_integral(n, t, x_shift=0.0, alpha=None):
    """int amp(r, s) e^{-i (r+s)^2/4t} phi(sigma) F(cos(sigma^2/4t)) dx1.

    r = |x - x1| with x = (1 + x_shift) e1 and s = |x1 - y0|; the potential
    stays tied to the foci x0, y0.  Moving x along the axis keeps the axial
    symmetry, and transverse derivatives vanish at x_shift = 0 by reflection.
    """
    spec = PotentialSpec(Geometry(n), alpha or 0.5, t)

    def f(S, T):
        u, rho = prolate_point(S, T)
        r = np.sqrt((u - 1 - x_shift) ** 2 + rho**2)
        _, s = focal_distances(S, T)
        return main_amplitude(n, r, s) * np.exp(-1j * (r + s) ** 2 / (4 * t)) * spec.profile(S)

    return shell_integral(n, f, t=t)


@dataclass
class FullTermGrid:
    """Interpolation data for Q = e^{i sigma^2 / 4t} I_L on a Chebyshev sigma grid."""

    t: float
    sigma: np.ndarray
    theta: np.ndarray
    Q: np.ndarray  # shape (len(sigma), len(theta))
    evaluations: int = 0

    def I(self, sigma):
        """I_L at (sigma, theta_j) for every stored angle node j."""
        x = (2 * np.asarray(sigma) - (SIG_LO + SIG_HI)) / (SIG_HI - SIG_LO)
        xn = (2 * self.sigma - (SIG_LO + SIG_HI)) / (SIG_HI - SIG_LO)
        out = np.empty((len(x), len(self.theta)), dtype=complex)
        deg = len(self.sigma) - 1
        for j in range(len(self.theta)):
            cr = np.polynomial.chebyshev.chebfit(xn, self.Q[:, j].real, deg)
            ci = np.polynomial.chebyshev.chebfit(xn, self.Q[:, j].imag, deg)
            out[:, j] = np.polynomial.chebyshev.chebval(x, cr) + 1j * np.polynomial.chebyshev.chebval(x, ci)
        return out * np.exp(-1j * np.asarray(sigma)[:, None] ** 2 / (4 * self.t))


def build_full_grid(n, t, L, bumps=None, n_sigma=16, m_angle=16, shape="flat", tol=1e-6):
    """Compute I_L on Chebyshev sigma nodes x angle nodes (half the angles, by r<->s symmetry)."""
    j = np.arange(n_sigma)
    xn = np.cos(pi * (j + 0.5) / n_sigma)
    sig = 0.5 * (SIG_HI - SIG_LO) * xn + 0.5 * (SIG_HI + SIG_LO)
    th, _ = angle_nodes(m_angle)
    half = th[th >= 0]
    S, T = np.meshgrid(sig, half, indexing="ij")
    r, s = focal_distances(S.ravel(), T.ravel())
    mult, extra = None, 0.0
    if bumps is not None:
        mult = lambda k: bumps.multiplier(k) ** 2
        extra = 2 * bumps.eps
    K_est = 2 * (SIG_HI + 1 + extra) / (t - 1 / L)
    evals = int(len(r) * (t * K_est**2 + (SIG_HI + extra) * K_est) / pi * 25)
    if evals > 1e7:
        warnings.warn(f"full Born term needs about {evals:.2e} kernel evaluations", RuntimeWarning)
    vals = i_L_batch(n, t, r, s, L, tol=tol, shape=shape, multiplier=mult, extra_reach=extra)
    vals = vals.reshape(S.shape)
    full = np.empty((n_sigma, len(th)), dtype=complex)
    pos = th >= 0
    full[:, pos] = vals
    # theta -> -theta swaps r and s
    neg_idx = np.where(~pos)[0]
    pos_th = th[pos]
    for i in neg_idx:
        full[:, i] = vals[:, int(np.argmin(np.abs(pos_th + th[i])))]
    Q = full * np.exp(1j * sig[:, None] ** 2 / (4 * t))
    return FullTermGrid(t, sig, th, Q, evaluations=evals)


def a1_full(spec: PotentialSpec, L, bumps=None, grid: Optional[FullTermGrid] = None, **kw):
    """t^{n/2} int I_L(t, |x0-x1|, |x1-y0|) V(x1) dx1 with I_L from spectral quadrature."""
    n, t = spec.g.n, spec.t
    if t <= 1 / L:
        raise PreconditionError("need L > 1/t")
    if grid is None:
        grid = build_full_grid(n, t, L, bumps=bumps, **kw)
    sig, ws = sigma_nodes(t)
    th, wt = angle_nodes(len(grid.theta))
    S, T = np.meshgrid(sig, th, indexing="ij")
    vals = grid.I(sig) * spec.profile(S) * prolate_weight(n, S, T)
    return t ** (n / 2) * spec.amplitude * (ws @ vals @ wt)


# --- norms and calibration -----------------------------------------------------


def _line_quotients(vals, h, alpha, sep_lo, sep_hi, n_sep=60):
    lo = max(1, int(np.ceil(sep_lo / h)))
    hi = max(lo, int(np.floor(sep_hi / h)))
    steps = np.unique(np.geomspace(lo, hi, n_sep).astype(int))
    best = 0.0
    for m in steps:
        if m >= len(vals):
            break
        d = np.max(np.abs(vals[m:] - vals[:-m]))
        best = max(best, d / (m * h) ** alpha)
    return best


def holder_norm_estimate(f, alpha, domain, grid_h, n_random=4000, seed=0):
    """sup|f| + sampled C^alpha seminorm with separations in [grid_h, 1].

    f maps an (N, d) array of points to N values; domain = (lo, hi) corners of
    a box.  Pairs come from coordinate-axis lines through the box centre
    (spacing grid_h / 2) and from random pairs with log-uniform separation.
    """
    lo, hi = (np.asarray(v, dtype=float) for v in domain)
    d = len(lo)
    centre = 0.5 * (lo + hi)
    h = grid_h / 2
    sup = 0.0
    semi = 0.0
    for axis in range(d):
        half = int(np.floor((hi[axis] - centre[axis]) / h))
        coord = centre[axis] + h * np.arange(-half, half + 1)
        npts = len(coord)
        pts = np.tile(centre, (npts, 1))
        pts[:, axis] = coord
        vals = np.asarray(f(pts), dtype=float)
        sup = max(sup, float(np.max(np.abs(vals))))
        semi = max(semi, _line_quotients(vals, h, alpha, grid_h, 1.0))
    rng = np.random.default_rng(seed)
    a = lo + (hi - lo) * rng.random((n_random, d))
    sep = np.exp(rng.uniform(np.log(grid_h), 0.0, n_random))
    u = rng.normal(size=(n_random, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    b = a + sep[:, None] * u
    fa = np.asarray(f(a), dtype=float)
    fb = np.asarray(f(b), dtype=float)
    sup = max(sup, float(np.max(np.abs(fa))))
    semi = max(semi, float(np.max(np.abs(fa - fb) / sep**alpha)))
    return sup + semi


def potential_box(n):
    """A box containing the support of the shell potential (|x1| <= 4)."""
    return -4.1 * np.ones(n), 4.1 * np.ones(n)


def potential_norm(spec: PotentialSpec, grid_h=None, **kw):
    grid_h = min(0.05, spec.t / 8) if grid_h is None else grid_h
    return holder_norm_estimate(lambda x: V_t(spec, x), spec.alpha, potential_box(spec.g.n), grid_h, **kw)


def calibrate_Cn(g: Geometry, alpha, t_grid, **kw):
    """C_n = 1 / max_t norm(V_t with C_n = 1)."""
    t_grid = list(t_grid)
    if not t_grid or any(not 0 < t <= 1 for t in t_grid):
        raise PreconditionError("t_grid must be a nonempty subset of (0, 1]")
    norms = [potential_norm(PotentialSpec(g, alpha, t), **kw) for t in t_grid]
    m = max(norms)
    if not m > 0:
        raise PreconditionError("degenerate norm estimates")
    return 1.0 / m


# --- exponent fits -------------------------------------------------------------


@dataclass
class ExponentFit:
    samples: list = field(default_factory=list)
    slope: float = float("nan")
    intercept: float = float("nan")
    residual: float = float("nan")


def fit_exponent(samples) -> ExponentFit:
    samples = [(float(t), float(v)) for t, v in samples]
    if len(samples) < 4:
        raise PreconditionError("need at least 4 samples")
    ts = np.array([t for t, _ in samples])
    vs = np.array([v for _, v in samples])
    if np.any(vs <= 0) or np.any(ts <= 0):
        raise PreconditionError("values and times must be positive")
    if len(np.unique(ts)) != len(ts):
        raise PreconditionError("t values must be distinct")
    x, y = np.log(ts), np.log(vs)
    slope, intercept = np.polyfit(x, y, 1)
    res = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return ExponentFit(samples, float(slope), float(intercept), res)
