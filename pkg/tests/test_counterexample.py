import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from displab import counterexample as cx
from displab import oscillatory as osc

G4 = cx.Geometry(4)


def test_geometry():
    g = cx.Geometry(5)
    assert np.linalg.norm(g.x0) == 1.0
    assert np.array_equal(g.y0, -g.x0)
    with pytest.raises(cx.PreconditionError):
        cx.Geometry(1)


def test_ellipse_sum_examples():
    assert cx.ellipse_sum(G4, np.zeros(4)) == 2.0
    assert cx.ellipse_sum(G4, [0, 3.9, 0, 0]) == pytest.approx(2 * np.sqrt(1 + 3.9**2))
    assert cx.ellipse_sum(G4, [0, 3.9, 0, 0]) > 8
    assert cx.ellipse_sum(G4, [4, 0, 0, 0]) == 8.0


def test_profile_examples():
    assert cx.F_profile(-1.0) == 0.0
    assert cx.F_profile(1.0) == 1.0
    assert 0 < cx.F_profile(0.25) < 0.25
    assert cx.phi_profile(7.0) == pytest.approx(1.0)
    assert cx.phi_profile(6.0) == 0.0 and cx.phi_profile(8.0) == 0.0


def test_profiles_are_smooth_and_nonnegative():
    s = np.linspace(-1, 2, 30001)
    f = cx.F_profile(s)
    assert np.all(f >= 0)
    assert np.max(np.abs(np.diff(f))) < 1e-3  # no jumps
    u = np.linspace(5, 9, 40001)
    assert np.all(cx.phi_profile(u) >= 0) and np.max(cx.phi_profile(u)) <= 1.0


def test_potential_at_synchronised_point():
    t = 49 / (16 * np.pi)  # 49 / 4t = 4 pi
    spec = cx.PotentialSpec(G4, 0.25, t, Cn=0.7)
    x1 = np.array([3.5, 0, 0, 0])  # length sum 2.5 + 4.5 = 7
    assert cx.V_t(spec, x1) == pytest.approx(0.7 * t**0.25, rel=1e-12)


def test_potential_zero_off_the_shell_and_in_negative_phase():
    spec = cx.PotentialSpec(G4, 0.25, 0.3)
    assert cx.V_t(spec, [2.5, 0, 0, 0]) == 0.0  # length sum 5
    t = 49 / (4 * (np.arccos(-0.3) + 4 * np.pi))
    assert np.cos(49 / (4 * t)) == pytest.approx(-0.3)
    spec = cx.PotentialSpec(G4, 0.25, t)
    assert cx.V_t(spec, [3.5, 0, 0, 0]) == 0.0


def test_potential_preconditions():
    with pytest.raises(cx.PreconditionError):
        cx.PotentialSpec(G4, 0.25, 1.5)
    with pytest.raises(cx.PreconditionError):
        cx.PotentialSpec(G4, 0.0, 0.5)


@pytest.mark.parametrize("n", [4, 5])
def test_support_and_sign_on_random_points(n):
    rng = np.random.default_rng(n)
    x = rng.uniform(-5.5, 5.5, (10_000, n))
    g = cx.Geometry(n)
    for t in (0.5, 0.01):
        v = cx.V_t(cx.PotentialSpec(g, 0.25, t), x)
        sig = cx.ellipse_sum(g, x)
        assert np.all(v >= 0)
        assert np.all(v[(sig <= 6) | (sig >= 8)] == 0)
        assert np.any(v > 0)
        rad = np.linalg.norm(x[v > 0], axis=1)
        assert rad.min() > 2.5 and rad.max() < 5


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
@pytest.mark.parametrize("n", [3, 4, 5])
def test_bumps_have_unit_mass(n, eps):
    b = cx.BumpPair(n, eps)
    assert b.mass() == pytest.approx(1.0, abs=1e-6)
    assert b.density(eps) == 0.0 and b.density(0.0) > 0


def test_bump_preconditions():
    with pytest.raises(cx.PreconditionError):
        cx.BumpPair(4, 0.5)


@given(st.floats(0.01, 0.49), st.integers(0, 10_000))
def test_distance_window(eps, seed):
    # bump points against shell points: both focal distances stay in [1, 10]
    rng = np.random.default_rng(seed)
    n = 4
    g = cx.Geometry(n)
    u = rng.normal(size=(200, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    x = g.x0 + eps * rng.random((200, 1)) * u
    y = g.y0 + eps * rng.random((200, 1)) * u[::-1]
    x1 = rng.uniform(-5, 5, (5000, n))
    sig = cx.ellipse_sum(g, x1)
    x1 = x1[(sig > 6) & (sig < 8)][:200]
    dx = np.linalg.norm(x[:, None, :] - x1[None, :, :], axis=-1)
    dy = np.linalg.norm(y[:, None, :] - x1[None, :, :], axis=-1)
    assert dx.min() >= 1 and dx.max() <= 10
    assert dy.min() >= 1 and dy.max() <= 10


def test_bump_multiplier_mean_value_property():
    # smearing the 3-d outgoing kernel over a bump multiplies it by m(k)
    b = cx.BumpPair(3, 0.3)
    k, d = 5.0, 2.0

    def part(fn):
        def f(th, rho):
            D = np.sqrt(d * d + rho * rho - 2 * d * rho * np.cos(th))
            return fn(np.exp(1j * k * D) / (4 * np.pi * D)) * 2 * np.pi * rho**2 * np.sin(th) * b.density(rho)
        return integrate.dblquad(f, 0, b.eps, 0, np.pi, epsabs=1e-13, epsrel=1e-11)[0]

    smeared = part(np.real) + 1j * part(np.imag)
    point = np.exp(1j * k * d) / (4 * np.pi * d)
    assert smeared / point == pytest.approx(b.multiplier(k), rel=1e-8)
    assert b.multiplier(0.0) == pytest.approx(1.0, rel=1e-12)


def test_prolate_weight_reproduces_ellipsoid_volumes():
    for n in (3, 4, 5):
        v = cx.shell_integral(n, lambda S, T: np.ones_like(S))
        assert v == pytest.approx(cx.ellipsoid_volume(n, 8) - cx.ellipsoid_volume(n, 6), rel=1e-10)


def test_holder_constant():
    dom = (-np.ones(3), np.ones(3))
    assert cx.holder_norm_estimate(lambda x: np.full(len(x), 2.5), 0.5, dom, 0.05) == pytest.approx(2.5)


def test_holder_root_function():
    dom = (-np.ones(3), np.ones(3))
    v = cx.holder_norm_estimate(lambda x: np.abs(x[:, 0]) ** 0.5, 0.5, dom, 0.01)
    assert v == pytest.approx(2.0, abs=0.05)


def test_calibration_and_generalisation():
    grid = [2.0**-k for k in range(4, 9)]
    C = cx.calibrate_Cn(G4, 0.25, grid)
    assert C > 0
    norms = [cx.potential_norm(cx.PotentialSpec(G4, 0.25, t, Cn=C)) for t in grid]
    assert max(norms) == pytest.approx(1.0, rel=1e-12)
    fresh = [3 * 2.0**-k for k in range(6, 10)]
    assert max(cx.potential_norm(cx.PotentialSpec(G4, 0.25, t, Cn=C)) for t in fresh) <= 1.1
    with pytest.raises(cx.PreconditionError):
        cx.calibrate_Cn(G4, 0.25, [])


@pytest.mark.parametrize("n", [4, 5])
def test_synchronised_lower_bound(n):
    vals = [cx.synchronised_integral(n, 2.0**-k).real for k in range(4, 11)]
    assert min(vals) > 0
    assert min(vals) > 0.5 * max(vals)


def test_derivative_grows_like_inverse_time():
    ts = 2.0 ** -np.arange(4, 9)
    grads = []
    for t in ts:
        h = t / 50
        d = (cx.synchronised_integral(4, t, h) - cx.synchronised_integral(4, t, -h)) / (2 * h)
        grads.append(abs(d))
    slope = np.polyfit(np.log(ts), np.log(grads), 1)[0]
    assert -1.3 <= slope <= -0.7


def test_zero_potential_gives_zero():
    spec = cx.PotentialSpec(G4, 0.25, 0.05)
    assert cx.a1_main_term(spec, potential=lambda S, T: np.zeros_like(S)) == 0


def test_decoherence():
    t = 2.0**-8
    spec = cx.PotentialSpec(G4, 0.25, t)
    sync = abs(cx.a1_main_term(spec))
    off = abs(cx.a1_main_term(cx.PotentialSpec(G4, 0.25, t, phase_t=1.37 * t)))
    assert off < 0.1 * sync


def test_main_term_growth_rate():
    ts = [2.0**-k for k in range(4, 11)]
    vals = [abs(cx.a1_main_term(cx.PotentialSpec(cx.Geometry(5), 0.5, t))) for t in ts]
    fit = cx.fit_exponent(list(zip(ts, vals)))
    assert fit.slope == pytest.approx(-0.5, abs=0.15)


def test_full_term_matches_exact_three_dimensional_main_term():
    t = 0.2
    spec = cx.PotentialSpec(cx.Geometry(3), 0.5, t)
    full = cx.a1_full(spec, 10 * t**-3)
    main = cx.a1_main_term(spec)
    assert abs(full - main) <= 1e-3 * abs(main)


def test_full_term_grid_interpolation_and_linearity():
    t, L = 0.2, 10 * 0.2**-3
    grid = cx.build_full_grid(4, t, L)
    sig = np.array([6.37, 7.81])
    direct = np.array([[osc.i_L(4, t, *cx.focal_distances(s, th), L) for th in grid.theta] for s in sig])
    assert np.allclose(grid.I(sig), direct, rtol=1e-5, atol=1e-5 * np.abs(direct).max())
    spec = cx.PotentialSpec(G4, 0.25, t)
    a = cx.a1_full(spec, L, grid=grid)
    b = cx.a1_full(spec.with_scale(2.0), L, grid=grid)
    assert abs(b - 2 * a) <= 1e-10 * abs(a)


def test_full_term_preconditions():
    with pytest.raises(cx.PreconditionError):
        cx.a1_full(cx.PotentialSpec(G4, 0.25, 0.2), 4.0)


def test_fit_exponent_examples():
    ts = np.geomspace(0.01, 1, 8)
    f = cx.fit_exponent(list(zip(ts, 1 / ts)))
    assert f.slope == pytest.approx(-1.0, abs=1e-12) and f.residual < 1e-12
    rng = np.random.default_rng(3)
    noisy = 3 * ts**-0.5 * (1 + 0.01 * rng.standard_normal(len(ts)))
    assert cx.fit_exponent(list(zip(ts, noisy))).slope == pytest.approx(-0.5, abs=0.02)
    with pytest.raises(cx.PreconditionError):
        cx.fit_exponent([(0.1, 1), (0.2, -1), (0.3, 1), (0.4, 1)])
    with pytest.raises(cx.PreconditionError):
        cx.fit_exponent([(0.1, 1), (0.2, 1)])
    with pytest.raises(cx.PreconditionError):
        cx.fit_exponent([(0.1, 1), (0.1, 1), (0.3, 1), (0.4, 1)])
