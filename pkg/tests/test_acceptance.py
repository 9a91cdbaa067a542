"""Acceptance criteria A1-A8, one PASS/FAIL line each in the terminal summary.

Run alone with `pytest tests/test_acceptance.py -v` or `python3 tests/test_acceptance.py`.
"""
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from displab import counterexample as cx
from displab import kernel_calculus as kc
from displab import oscillatory as osc
from displab.experiments import closed_form_n2
from displab.expr import branch_pow
from displab.resolvent import kernel_k
from displab.specfun import hankel1_negreal

GRID = [(t, r, s) for t in (0.05, 0.1, 0.2) for r in (1.0, 2.5, 6.0) for s in (1.0, 2.5, 6.0)]
L_FIXED = 1e4


def worst(pairs):
    return max(abs(v - ref) / abs(ref) for v, ref in pairs)


@pytest.fixture(scope="module")
def i3():
    return {p: osc.i_L(3, *p, L_FIXED) for p in GRID}


@pytest.fixture(scope="module")
def i2():
    return {p: osc.i_L(2, *p, L_FIXED) for p in GRID}


@pytest.mark.xfail(strict=True, reason="the transform of 2i Im(R+R+) is not 2i Im of the transform; "
                   "the outgoing pair vanishes for t > 0 and the quadrature equals minus the closed form")
def test_a1_literal_reference(i3, verdict):
    err = worst((v, 2j * kc.transform(3, r, s, t).imag) for (t, r, s), v in i3.items())
    verdict("A1", err <= 1e-2, f"max rel err against 2i Im(closed form) = {err:.3g}")
    assert err <= 1e-2


def test_a1_three_dimensional_closed_form(i3, verdict):
    err = worst((v, -kc.transform(3, r, s, t)) for (t, r, s), v in i3.items())
    verdict("A1 corrected reference", err <= 1e-2, f"max rel err against -(closed form) = {err:.3g}")
    assert err <= 1e-2


def test_a2_two_dimensional_hankel_form(i2, verdict):
    err = worst((v, -closed_form_n2(r, s, t)) for (t, r, s), v in i2.items())
    verdict("A2", err <= 1e-2, f"max rel err against the Hankel form = {err:.3g}")
    assert err <= 1e-2


@pytest.mark.xfail(strict=True, reason="the Hankel form with prefactor 1/(4 pi t) is off by the factor pi i / 2")
def test_a2_prefactor_without_half_pi_i(i2, verdict):
    def form(r, s, t):
        return np.exp(-1j * (r * r + s * s) / (4 * t)) * hankel1_negreal(0, r * s / (2 * t)) / (4 * np.pi * t)

    err = worst((v, -form(r, s, t)) for (t, r, s), v in i2.items())
    verdict("A2 prefactor 1/(4 pi t)", err <= 1e-2, f"max rel err = {err:.3g}")
    assert err <= 1e-2


def test_a3_branch_convention(verdict):
    t = 0.1
    v = osc.transform_single(3, t, 1.0, L_FIXED)
    ref = -2j * np.pi * branch_pow(t, -1.5) * np.exp(-1j / (4 * t))
    rel = abs(v - ref) / abs(ref)
    mod = abs(abs(v) - 2 * np.pi * (4 * np.pi * t) ** -1.5) / (2 * np.pi * (4 * np.pi * t) ** -1.5)
    ok = rel <= 1e-2 and mod <= 1e-3
    verdict("A3", ok, f"rel err {rel:.3g}, modulus err {mod:.3g}")
    assert ok


def test_a4_remainder_rates(verdict):
    ts = 0.02 * 2.0 ** np.arange(5)
    slopes = {}
    for n in (4, 5):
        g = [abs(kc.remainder_G(n, 1.0, 2.0, t)) for t in ts]
        slopes[n] = cx.fit_exponent(list(zip(ts, g))).slope
    zero = max(abs(kc.remainder_G(3, 1.0, 2.0, t)) for t in ts)
    ok = all(slopes[n] >= -(n - 2.5) - 0.2 for n in slopes) and zero <= 1e-12
    verdict("A4", ok, f"slopes n=4 {slopes[4]:.4f} (>= -1.7), n=5 {slopes[5]:.4f} (>= -2.7), n=3 max |G| {zero:.1e}")
    assert ok


def test_a5_growth_rates(verdict):
    ts = [2.0**-k for k in range(4, 11)]
    out = {}
    for n, alpha in ((5, 0.5), (4, 0.25)):
        vals = [abs(cx.a1_main_term(cx.PotentialSpec(cx.Geometry(n), alpha, t))) for t in ts]
        out[n] = (cx.fit_exponent(list(zip(ts, vals))).slope, -(n - 3 - 2 * alpha) / 2)
    ok = all(abs(s - p) <= 0.15 for s, p in out.values())
    verdict("A5", ok, f"n=5 slope {out[5][0]:.4f} (want -0.5), n=4 slope {out[4][0]:.4f} (want -0.25)")
    assert ok


def test_a6_full_against_main_term(verdict):
    n = 4
    dev = {}
    for t in (0.2, 0.1):
        spec = cx.PotentialSpec(cx.Geometry(n), 0.25, t)
        dev[t] = abs(cx.a1_full(spec, 10 * t**-3) - cx.a1_main_term(spec))
    C = dev[0.2] / 0.2 ** ((5 - n) / 2)
    ratio = dev[0.1] / (C * 0.1 ** ((5 - n) / 2))
    ok = 0.5 <= ratio <= 2
    verdict("A6", ok, f"C = {C:.3g} from t=0.2; t=0.1 deviation / (C t^(1/2)) = {ratio:.3f}")
    assert ok


def test_a7_free_dispersive_constant(verdict):
    t, r = 0.5, 1.0
    spec = osc.OscIntegralSpec(n=3, t=t, r=r, L=L_FIXED)

    def im_r(mu):
        # analytic continuation of Im R^+ = (R^+ - R^-) / 2i off the real axis
        k = np.sqrt(mu)
        return (kernel_k(1, 3, k, r) - kernel_k(-1, 3, k, r)) / 2j

    v = abs(osc.integrate_spectral(spec, im_r)) / np.pi
    ref = (4 * np.pi * t) ** -1.5
    rel = abs(v - ref) / ref
    verdict("A7", rel <= 1e-2, f"rel err {rel:.3g}")
    assert rel <= 1e-2


PROPERTY_SUITES = ["test_specfun.py", "test_resolvent.py", "test_expr.py", "test_kernel_calculus.py",
                   "test_oscillatory.py", "test_counterexample.py"]


def test_a8_property_suites(verdict):
    here = Path(__file__).parent
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *[str(here / f) for f in PROPERTY_SUITES]],
        capture_output=True, text=True, cwd=here.parent,
    )
    last = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    verdict("A8", proc.returncode == 0, last)
    assert proc.returncode == 0, proc.stdout[-4000:]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
