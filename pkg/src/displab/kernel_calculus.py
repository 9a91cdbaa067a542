"""Closed forms for the time transforms of products of free resolvent kernels.

For t > 0 the transform

    T_n(r, s, t) = int e^{i t lam} R_n^-(lam, r) R_n^-(lam, s) d lam

is known in closed form for n = 2, 3.  Higher dimensions follow from
R_{n+2}(r) = -(2 pi r)^{-1} d_r R_n(r), which raises a product transform by
applying (4 pi^2 r s)^{-1} d_r d_s.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import pi

import numpy as np

from .expr import (
    BranchPow,
    Canonical,
    Const,
    ExpPhase,
    Node,
    Pow,
    Prod,
    Special,
    Sum,
    Terms,
    Var,
    branch_pow,
    simplify,
)

F = Fraction
r, s, t, k = Var("r"), Var("s"), Var("t"), Var("k")

# exp(-i (r + s)^2 / 4t) as a phase polynomial in (r, s, k, t)
_SQUARE_PHASE = (
    ((2, 0, 0, -1), F(-1, 4)),
    ((1, 1, 0, -1), F(-1, 2)),
    ((0, 2, 0, -1), F(-1, 4)),
)


class KernelExpr:
    """A transform expression together with the dimension it represents."""

    def __init__(self, node: Node, n: int):
        self.node = node
        self.n = n
        self._terms = None

    @property
    def terms(self) -> Terms:
        if self._terms is None:
            self._terms = self.node.to_terms().prune()
        return self._terms

    def __call__(self, r, s=1.0, t=1.0, k=1.0):
        return self.terms.evaluate(r=r, s=s, t=t, k=k)

    def diff(self, var: str) -> "KernelExpr":
        return KernelExpr(Canonical(self.terms.diff(var)), self.n)

    def swap_rs(self) -> "KernelExpr":
        swapped = Terms()
        for key, c in self.terms.d.items():
            swapped._add_term(_swap_key(key), c)
        return KernelExpr(Canonical(swapped), self.n)

    def to_text(self) -> str:
        return self.terms.to_text()

    def __len__(self):
        return len(self.terms)


def _swap4(m):
    return (m[1], m[0]) + tuple(m[2:])


def _swap_key(key):
    from .expr import Key, _phase_norm

    return Key(
        _swap4(key.mono),
        key.p,
        _phase_norm([(_swap4(m), c) for m, c in key.phase]),
        tuple(sorted((kind, idx, (ac, _swap4(am))) for kind, idx, (ac, am) in key.specials)),
    )


def base_case(n: int) -> KernelExpr:
    """Exact transform for n = 3, and for n = 2 in the omega factorisation.

    n = 3:  (2i)^{-1} (-4 pi i t)^{-3/2} (r + s)/(r s) e^{-i (r+s)^2 / 4t}
    n = 2:  (2i)^{-1} (-4 pi i t)^{-1/2} (r s)^{-1/2} e^{-i (r+s)^2 / 4t} omega(-r s / 2t)

    The n = 2 form equals (i / 8t) e^{-i (r^2+s^2)/4t} H^(1)_0(-r s / 2t).
    """
    if n == 3:
        node = Prod((
            Const(1 / 2j), BranchPow(F(-3, 2)),
            Sum((r, s)), Pow(r, F(-1)), Pow(s, F(-1)),
            ExpPhase(_SQUARE_PHASE),
        ))
    elif n == 2:
        node = Prod((
            Const(1 / 2j), BranchPow(F(-1, 2)),
            Pow(r, F(-1, 2)), Pow(s, F(-1, 2)),
            ExpPhase(_SQUARE_PHASE),
            Special("omega", F(0), F(-1, 2), (1, 1, 0, -1)),
        ))
    else:
        raise ValueError("base cases exist for n = 2 and n = 3; use raise_dimension")
    return KernelExpr(simplify(node), n)


def raise_dimension(e: KernelExpr, steps: int = 1) -> KernelExpr:
    """Apply (4 pi^2 r s)^{-1} d_r d_s `steps` times."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    terms = e.terms
    scale = Terms.monomial(1 / (4 * pi**2), r=-1, s=-1)
    for _ in range(steps):
        terms = terms.diff("r").prune()
        terms = terms.diff("s").prune()
        terms = (terms * scale).prune()
    return KernelExpr(Canonical(terms), e.n + 2 * steps)


@lru_cache(maxsize=None)
def transform_expr(n: int) -> KernelExpr:
    """Closed-form transform in dimension n (from the base case of equal parity)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    base = 3 if n % 2 else 2
    return raise_dimension(base_case(base), (n - base) // 2)


def transform(n: int, r, s, t):
    return transform_expr(n)(r, s, t)


# --- single kernels ----------------------------------------------------------


def single_kernel_base(n: int, sign: int = -1) -> KernelExpr:
    """R^{+/-}_n(k, r) for n = 2, 3 as an expression in (r, k)."""
    sgn = F(sign)
    if n == 3:
        node = Prod((Const(1 / (4 * pi)), Pow(r, F(-1)), ExpPhase((((1, 0, 1, 0), sgn),))))
    elif n == 2:
        kind = "hankel1" if sign > 0 else "hankel2"
        node = Prod((Const(sign * 0.25j), Special(kind, F(0), F(1), (1, 0, 1, 0))))
    else:
        raise ValueError("single-kernel base cases exist for n = 2 and n = 3")
    return KernelExpr(simplify(node), n)


def raise_single(e: KernelExpr) -> KernelExpr:
    """R_{n+2}(r) = -(2 pi r)^{-1} d_r R_n(r)."""
    d = e.terms.diff("r") * Terms.monomial(-1 / (2 * pi), r=-1)
    return KernelExpr(Canonical(d.prune()), e.n + 2)


@lru_cache(maxsize=None)
def single_kernel_expr(n: int, sign: int = -1) -> KernelExpr:
    base = 3 if n % 2 else 2
    e = single_kernel_base(base, sign)
    for _ in range((n - base) // 2):
        e = raise_single(e)
    return e


def single_kernel_raise(n: int, sign: int = -1):
    """Procedure (k, r) -> R_{n+2}(k, r), derived symbolically from R_n."""
    raised = raise_single(single_kernel_expr(n, sign))

    def kernel(kk, rr):
        return raised(rr, t=1.0, k=kk)

    return kernel


# --- leading term and remainder ---------------------------------------------


def leading_term(n: int, r, s, t):
    """(2i)^{-1} (-4 pi i t)^{-(n-3/2)} (r+s)^{n-2} (r s)^{-(n-1)/2} e^{-i (r+s)^2 / 4t}."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    amp = (r + s) ** (n - 2) / (r * s) ** ((n - 1) / 2)
    return amp * np.exp(-1j * (r + s) ** 2 / (4 * t)) / (2j * branch_pow(t, n - 1.5))


def leading_expr(n: int) -> KernelExpr:
    node = Prod((
        Const(1 / 2j), BranchPow(F(3, 2) - n),
        Pow(Sum((r, s)), F(n - 2)),
        Pow(Prod((r, s)), F(1 - n, 2)),
        ExpPhase(_SQUARE_PHASE),
    ))
    return KernelExpr(simplify(node), n)


def remainder_G(n: int, r, s, t):
    """Full closed-form transform minus its leading term, as a symbolic difference."""
    return remainder_expr(n)(r, s, t)


@lru_cache(maxsize=None)
def remainder_expr(n: int) -> KernelExpr:
    d = transform_expr(n).terms - leading_expr(n).terms
    return KernelExpr(Canonical(d.prune()), n)


# --- independent generation in odd dimensions -------------------------------


def _rho_transform() -> Terms:
    """T(r + s) with T(rho) = int e^{i t lam} e^{-i k rho} d lam (lam = k^2, t > 0)."""
    node = Prod((Const(16 * pi**2 / 2j), BranchPow(F(-3, 2)), Sum((r, s)), ExpPhase(_SQUARE_PHASE)))
    return node.to_terms()


def odd_transform_by_monomials(n: int) -> KernelExpr:
    """Transform built by expanding R_n^- = sum c_j k^j r^a e^{-i k r}.

    Each k^m e^{-i k (r+s)} integrates to (i d_rho)^m T(rho) at rho = r + s,
    and d_rho acts as d_r on functions of r + s.
    """
    if n % 2 == 0 or n < 3:
        raise ValueError("monomial generation needs odd n >= 3")
    single = single_kernel_expr(n, -1).terms
    by_power: dict = {}
    for key, c in single.d.items():
        m = key.mono[2]
        by_power.setdefault(m, []).append((key.mono[0], c))
    base = _rho_transform()
    derivs = {0: base}
    top = max(by_power) * 2
    for m in range(1, int(top) + 1):
        derivs[m] = (derivs[m - 1].diff("r") * 1j).prune()
    total = Terms()
    for m1, lst1 in by_power.items():
        for m2, lst2 in by_power.items():
            for a1, c1 in lst1:
                for a2, c2 in lst2:
                    mono = Terms.monomial(c1 * c2, r=a1, s=a2)
                    total = total + mono * derivs[int(m1 + m2)]
    return KernelExpr(Canonical(total.prune()), n)
