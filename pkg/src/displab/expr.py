"""A small closed expression algebra for resolvent-product transforms.

Expressions are trees over the variables r, s, t, k built from constants,
sums, products, rational powers, oscillatory exponentials exp(i P) with P a
polynomial with rational coefficients, special-function factors
(omega^{(j)}, H^(1)_nu, H^(2)_nu of a monomial argument) and branch powers
(-4 pi i t)^p.

``simplify`` maps a tree to a canonical sum of terms

    c * r^a s^b k^e * (-4 pi i t)^p * exp(i P) * prod special(arg)

and back.  Powers of t are folded into the branch power through
t^c = (-4 pi i t)^c (4 pi)^{-c} e^{i pi c / 2}, which is exact under the
convention (-4 pi i t)^p = (4 pi t)^p e^{-i pi p / 2} for t > 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np

from . import specfun

VARS = ("r", "s", "k", "t")
_MONO_VARS = ("r", "s", "k")
ZERO_TOL = 1e-11


def branch_pow(t, p):
    """(-4 pi i t)^p = (4 pi t)^p e^{-i pi p / 2} for t > 0."""
    p = float(p)
    return (4 * pi * np.asarray(t, dtype=float)) ** p * np.exp(-0.5j * pi * p)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------
# A monomial in (r, s, k, t) is a 4-tuple of Fractions.
# Phase: tuple of (monomial, Fraction coefficient) sorted, meaning i * sum c m.
# Special: (kind, index, (Fraction coef, monomial)) with kind in
#   'omega' (index = derivative order), 'hankel1'/'hankel2' (index = order).


def _mono(r=0, s=0, k=0, t=0):
    return (Fraction(r), Fraction(s), Fraction(k), Fraction(t))


def _mono_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _mono_eval(m, env):
    out = 1.0
    for e, v in zip(m, VARS):
        if e:
            out = out * np.asarray(env[v], dtype=float) ** float(e)
    return out


def _phase_norm(items):
    acc = {}
    for m, c in items:
        acc[m] = acc.get(m, Fraction(0)) + c
    return tuple(sorted((m, c) for m, c in acc.items() if c != 0))


@dataclass(frozen=True, order=True)
class Key:
    mono: tuple  # exponents of r, s, k
    p: Fraction  # branch power of (-4 pi i t)
    phase: tuple
    specials: tuple


def _t_factor(c: Fraction):
    """t^c = coef * (-4 pi i t)^c."""
    return (4 * pi) ** (-float(c)) * np.exp(0.5j * pi * float(c))


class Terms:
    """Canonical sum of terms: dict Key -> complex coefficient."""

    def __init__(self, d=None):
        self.d = {} if d is None else d

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, c):
        if c == 0:
            return cls()
        return cls({Key(_mono()[:3], Fraction(0), (), ()): complex(c)})

    @classmethod
    def monomial(cls, coef=1.0, r=0, s=0, k=0, t=0, p=0):
        t = Fraction(t)
        coef = complex(coef) * _t_factor(t) if t else complex(coef)
        key = Key((Fraction(r), Fraction(s), Fraction(k)), Fraction(p) + t, (), ())
        return cls({key: coef})

    @classmethod
    def exp_phase(cls, items):
        """exp(i * sum c * r^a s^b k^e t^f), items = [((a, b, e, f), c)]."""
        ph = _phase_norm([(tuple(Fraction(x) for x in m), _frac(c)) for m, c in items])
        return cls({Key(_mono()[:3], Fraction(0), ph, ()): 1.0 + 0j})

    @classmethod
    def special(cls, kind, index, coef, mono):
        arg = (_frac(coef), tuple(Fraction(x) for x in mono))
        return cls({Key(_mono()[:3], Fraction(0), (), ((kind, Fraction(index), arg),)): 1.0 + 0j})

    @classmethod
    def branch(cls, p):
        return cls({Key(_mono()[:3], Fraction(p), (), ()): 1.0 + 0j})

    # algebra ------------------------------------------------------------
    def copy(self):
        return Terms(dict(self.d))

    def _add_term(self, key, c):
        v = self.d.get(key, 0) + c
        if v == 0:
            self.d.pop(key, None)
        else:
            self.d[key] = v

    def __add__(self, other):
        out = self.copy()
        for k, c in other.d.items():
            out._add_term(k, c)
        return out

    def __neg__(self):
        return Terms({k: -c for k, c in self.d.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Terms({k: c * v for k, v in self.d.items()}) if c != 0 else Terms()

    def __mul__(self, other):
        if not isinstance(other, Terms):
            return self.scale(complex(other))
        out = Terms()
        for k1, c1 in self.d.items():
            for k2, c2 in other.d.items():
                out._add_term(_key_mul(k1, k2), c1 * c2)
        return out

    __rmul__ = __mul__

    def power(self, q: Fraction):
        q = _frac(q)
        if len(self.d) == 1:
            (key, c), = self.d.items()
            if key.specials and (q.denominator != 1 or q < 0):
                raise ValueError("cannot take fractional powers of special factors")
            if key.specials:
                out = Terms.const(1)
                for _ in range(int(q)):
                    out = out * self
                return out
            nk = Key(
                tuple(e * q for e in key.mono),
                key.p * q,
                _phase_norm([(m, cc * q) for m, cc in key.phase]),
                (),
            )
            return Terms({nk: complex(c) ** float(q)})
        if q.denominator != 1 or q < 0:
            raise ValueError("only nonnegative integer powers of sums are expanded")
        out = Terms.const(1)
        for _ in range(int(q)):
            out = out * self
        return out

    def prune(self, tol=ZERO_TOL):
        if not self.d:
            return self
        scale = max(abs(c) for c in self.d.values())
        return Terms({k: c for k, c in self.d.items() if abs(c) > tol * scale})

    def is_zero(self, tol=ZERO_TOL, scale=None):
        if not self.d:
            return True
        ref = scale if scale is not None else max(abs(c) for c in self.d.values())
        return all(abs(c) <= tol * ref for c in self.d.values())

    def max_coef(self):
        return max((abs(c) for c in self.d.values()), default=0.0)

    def __len__(self):
        return len(self.d)

    # calculus -----------------------------------------------------------
    def diff(self, var: str):
        out = Terms()
        for key, c in self.d.items():
            for k2, c2 in _diff_term(key, c, var):
                out._add_term(k2, c2)
        return out

    # evaluation ---------------------------------------------------------
    def evaluate(self, **env):
        env = {v: env.get(v, 1.0) for v in VARS}
        total = 0j
        for key, c in self.d.items():
            total = total + c * _eval_key(key, env)
        return total

    def to_text(self) -> str:
        if not self.d:
            return "0"
        return " + ".join(_key_text(k, c) for k, c in sorted(self.d.items()))


def _key_mul(a: Key, b: Key) -> Key:
    return Key(
        tuple(x + y for x, y in zip(a.mono, b.mono)),
        a.p + b.p,
        _phase_norm(list(a.phase) + list(b.phase)),
        tuple(sorted(a.specials + b.specials)),
    )


def _times_mono(key: Key, c: complex, m4, coef: complex):
    """Multiply a term by coef * r^a s^b k^e t^f (t folded into the branch)."""
    tpow = m4[3]
    factor = coef * (_t_factor(tpow) if tpow else 1.0)
    nk = Key(tuple(x + y for x, y in zip(key.mono, m4[:3])), key.p + tpow, key.phase, key.specials)
    return nk, c * factor


def _unit(var):
    return _mono(**{var: 1})


def _diff_term(key: Key, c: complex, var: str):
    idx = VARS.index(var)
    down = tuple(-1 if i == idx else 0 for i in range(4))
    out = []
    # power of the variable
    if var == "t":
        if key.p:
            nk = Key(key.mono, key.p - 1, key.phase, key.specials)
            out.append((nk, c * float(key.p) * (-4j * pi)))
    else:
        e = key.mono[idx]
        if e:
            out.append(_times_mono(key, c, down, float(e)))
    # exponential
    for m, cc in key.phase:
        e = m[idx]
        if e:
            out.append(_times_mono(key, c, _mono_add(m, down), 1j * float(cc * e)))
    # special factors
    for j, (kind, index, (acoef, am)) in enumerate(key.specials):
        e = am[idx]
        if not e:
            continue
        rest = key.specials[:j] + key.specials[j + 1 :]
        chain = float(acoef * e)
        if kind == "omega":
            repl = [((kind, index + 1, (acoef, am)), 1.0)]
        else:
            repl = [((kind, index - 1, (acoef, am)), 0.5), ((kind, index + 1, (acoef, am)), -0.5)]
        for sp, w in repl:
            nk = Key(key.mono, key.p, key.phase, tuple(sorted(rest + (sp,))))
            out.append(_times_mono(nk, c, _mono_add(am, down), chain * w))
    return out


def _special_eval(kind, index, arg):
    if kind == "omega":
        return specfun.omega(arg, int(index))
    k = 1 if kind == "hankel1" else 2
    return specfun._hankel(index, arg, k)


def _eval_key(key: Key, env):
    val = 1.0
    for e, v in zip(key.mono, _MONO_VARS):
        if e:
            val = val * np.asarray(env[v], dtype=float) ** float(e)
    if key.p:
        val = val * branch_pow(env["t"], key.p)
    if key.phase:
        ph = 0.0
        for m, cc in key.phase:
            ph = ph + float(cc) * _mono_eval(m, env)
        val = val * np.exp(1j * ph)
    for kind, index, (acoef, am) in key.specials:
        val = val * _special_eval(kind, index, float(acoef) * _mono_eval(am, env))
    return val


def _fmt_frac(q: Fraction) -> str:
    return str(q) if q.denominator == 1 else f"({q})"


def _mono_text(m, names=VARS):
    parts = []
    for e, v in zip(m, names):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{_fmt_frac(e)}")
    return "*".join(parts) if parts else "1"


def _coef_text(c: complex) -> str:
    # rounding noise from the branch folding is snapped away so the text is stable
    m = abs(c)
    re = c.real if abs(c.real) > 1e-13 * m else 0.0
    im = c.imag if abs(c.imag) > 1e-13 * m else 0.0
    return f"({re:.10g}{im:+.10g}i)"


def _key_text(key: Key, c: complex) -> str:
    parts = [_coef_text(complex(c))]
    m = _mono_text(key.mono, _MONO_VARS)
    if m != "1":
        parts.append(m)
    if key.p:
        parts.append(f"(-4*pi*i*t)^{_fmt_frac(key.p)}")
    if key.phase:
        poly = " + ".join(f"{_fmt_frac(cc)}*{_mono_text(mm)}" for mm, cc in key.phase)
        parts.append(f"exp(i*({poly}))")
    for kind, index, (acoef, am) in key.specials:
        arg = f"{_fmt_frac(acoef)}*{_mono_text(am)}"
        if kind == "omega":
            parts.append(f"omega^({index})({arg})")
        else:
            parts.append(f"{kind}_{_fmt_frac(index)}({arg})")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# tree layer
# ---------------------------------------------------------------------------


class Node:
    def to_terms(self) -> Terms:
        raise NotImplementedError

    def diff(self, var: str) -> "Node":
        raise NotImplementedError

    def evaluate(self, **env):
        return self.to_terms().evaluate(**env)

    def __add__(self, other):
        return Sum((self, _lift(other)))

    __radd__ = __add__

    def __mul__(self, other):
        return Prod((self, _lift(other)))

    __rmul__ = __mul__

    def __sub__(self, other):
        return Sum((self, Prod((Const(-1), _lift(other)))))

    def __neg__(self):
        return Prod((Const(-1), self))

    def __pow__(self, q):
        return Pow(self, _frac(q))


def _lift(x):
    return x if isinstance(x, Node) else Const(complex(x))


@dataclass(frozen=True)
class Const(Node):
    value: complex

    def to_terms(self):
        return Terms.const(self.value)

    def diff(self, var):
        return Const(0)


@dataclass(frozen=True)
class Var(Node):
    name: str

    def to_terms(self):
        return Terms.monomial(1.0, **{self.name: 1})

    def diff(self, var):
        return Const(1 if var == self.name else 0)


@dataclass(frozen=True)
class Sum(Node):
    args: tuple

    def to_terms(self):
        out = Terms()
        for a in self.args:
            out = out + a.to_terms()
        return out

    def diff(self, var):
        return Sum(tuple(a.diff(var) for a in self.args))


@dataclass(frozen=True)
class Prod(Node):
    args: tuple

    def to_terms(self):
        out = Terms.const(1)
        for a in self.args:
            out = out * a.to_terms()
        return out

    def diff(self, var):
        parts = []
        for i, a in enumerate(self.args):
            parts.append(Prod(self.args[:i] + (a.diff(var),) + self.args[i + 1 :]))
        return Sum(tuple(parts))


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    q: Fraction

    def to_terms(self):
        return self.base.to_terms().power(self.q)

    def diff(self, var):
        return Prod((Const(float(self.q)), Pow(self.base, self.q - 1), self.base.diff(var)))


@dataclass(frozen=True)
class ExpPhase(Node):
    """exp(i * sum c * r^a s^b k^e t^f)."""

    items: tuple  # ((a, b, e, f), Fraction c)

    def to_terms(self):
        return Terms.exp_phase(self.items)

    def diff(self, var):
        idx = VARS.index(var)
        dphase = []
        for m, c in self.items:
            e = Fraction(m[idx])
            if e:
                dm = tuple(Fraction(x) - (1 if i == idx else 0) for i, x in enumerate(m))
                dphase.append(Prod((Const(1j * float(c * e)), _mono_node(dm))))
        if not dphase:
            return Const(0)
        return Prod((self, Sum(tuple(dphase))))


@dataclass(frozen=True)
class Special(Node):
    """omega^{(index)}, hankel1_index or hankel2_index at coef * monomial."""

    kind: str
    index: Fraction
    coef: Fraction
    mono: tuple

    def to_terms(self):
        return Terms.special(self.kind, self.index, self.coef, self.mono)

    def diff(self, var):
        idx = VARS.index(var)
        e = Fraction(self.mono[idx])
        if not e:
            return Const(0)
        dm = tuple(Fraction(x) - (1 if i == idx else 0) for i, x in enumerate(self.mono))
        chain = Prod((Const(float(self.coef * e)), _mono_node(dm)))
        if self.kind == "omega":
            d = Special(self.kind, self.index + 1, self.coef, self.mono)
        else:
            d = Prod((Const(0.5), Sum((
                Special(self.kind, self.index - 1, self.coef, self.mono),
                Prod((Const(-1), Special(self.kind, self.index + 1, self.coef, self.mono))),
            ))))
        return Prod((d, chain))


@dataclass(frozen=True)
class BranchPow(Node):
    """(-4 pi i t)^p under the principal-branch convention."""

    p: Fraction

    def to_terms(self):
        return Terms.branch(self.p)

    def diff(self, var):
        if var != "t" or not self.p:
            return Const(0)
        return Prod((Const(float(self.p) * -4j * pi), BranchPow(self.p - 1)))


@dataclass(frozen=True)
class Canonical(Node):
    """Leaf wrapping an already-canonical sum of terms."""

    terms: Terms

    def to_terms(self):
        return self.terms

    def diff(self, var):
        return Canonical(self.terms.diff(var))


def _mono_node(m):
    factors = []
    for e, v in zip(m, VARS):
        e = Fraction(e)
        if e == 1:
            factors.append(Var(v))
        elif e:
            factors.append(Pow(Var(v), e))
    if not factors:
        return Const(1)
    return factors[0] if len(factors) == 1 else Prod(tuple(factors))


def from_terms(terms: Terms) -> Node:
    """Rebuild an explicit tree (sum of products) from canonical terms."""
    parts = []
    for key, c in sorted(terms.d.items()):
        f = [Const(c)]
        m = _mono_node(key.mono + (Fraction(0),))
        if not isinstance(m, Const):
            f.append(m)
        if key.p:
            f.append(BranchPow(key.p))
        if key.phase:
            f.append(ExpPhase(key.phase))
        for kind, index, (acoef, am) in key.specials:
            f.append(Special(kind, index, acoef, am))
        parts.append(Prod(tuple(f)))
    if not parts:
        return Const(0)
    return Sum(tuple(parts))


def simplify(node: Node) -> Node:
    return from_terms(node.to_terms().prune())


def expr_allclose(a: Node, b: Node, rtol=1e-10) -> bool:
    """Structural equality up to relative coefficient tolerance."""
    ta, tb = a.to_terms(), b.to_terms()
    scale = max(ta.max_coef(), tb.max_coef(), 1e-300)
    return (ta - tb).is_zero(tol=rtol, scale=scale)


def to_text(node: Node) -> str:
    return node.to_terms().prune().to_text()
