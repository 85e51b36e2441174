import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timoshenko_lab.errors import ResolutionError, TailDivergence
from timoshenko_lab.initial_data import Generator, InitialData
from timoshenko_lab.norms_rates import fit_power_law, frequency_grid, l2_norm_spectral, log_times
from timoshenko_lab.profiles import (
    g_kernel,
    ghat,
    moments,
    profile_hats,
    profile_moments,
    profile_psi,
    profile_w,
)

from oracles import ghat_mp

TRAP = np.trapezoid if hasattr(np, "trapezoid") else np.trapz


def test_ghat_reference_value():
    assert float(ghat(1.0, 1.0, 1.0)) == pytest.approx(0.533507195, abs=1e-9)


@given(a=st.floats(0.6, 4.0), t=st.floats(0.0, 1e3), xi=st.floats(-5.0, 5.0))
@settings(max_examples=150, deadline=None)
def test_ghat_against_high_precision(a, t, xi):
    assert float(ghat(a, t, xi)) == pytest.approx(ghat_mp(a, t, xi), rel=1e-9, abs=1e-300)


def test_ghat_small_argument_series_continuous():
    # both sides of the switch z = c_a xi^2 t = 1e-4 agree with the exact value
    ca, t = math.sqrt(3) / 2, 10.0
    for z in (1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)):
        xi = math.sqrt(z / (ca * t))
        assert float(ghat(1.0, t, xi)) == pytest.approx(ghat_mp(1.0, t, xi), rel=1e-14)
    assert float(ghat(1.0, 3.0, 0.0)) == 3.0
    with pytest.raises(ValueError):
        ghat(1.0, -1.0, 1.0)


@pytest.mark.parametrize("a,t", [(1.0, 10.0), (1.0, 400.0), (2.0, 50.0)])
def test_kernel_mass_and_plancherel(a, t):
    k = g_kernel(a, t)
    assert TRAP(k.G, k.x) == pytest.approx(t, rel=1e-9)
    phys = math.sqrt(TRAP(k.G**2, k.x))
    grid = frequency_grid(t, 10.0, speed=0)
    spectral = l2_norm_spectral(ghat(a, t, grid.xi), grid)
    assert phys == pytest.approx(spectral, rel=1e-9)
    np.testing.assert_allclose(k.G, k.G[::-1], atol=1e-12 * t)
    np.testing.assert_allclose(k.dG, -k.dG[::-1], atol=1e-12 * t)


def test_kernel_derivative_matches_finite_difference():
    k = g_kernel(1.0, 20.0, x=np.linspace(-40.0, 40.0, 16001))
    fd = np.gradient(k.G, k.x, edge_order=2)
    assert np.max(np.abs(fd - k.dG)) < 1e-3 * np.max(np.abs(k.dG))


def test_kernel_norm_exponent():
    ts = log_times((1e2, 1e4), 10)
    grid_norm = [l2_norm_spectral(ghat(1.0, t, g.xi), g) for t in ts for g in [frequency_grid(t, 10.0, speed=0)]]
    assert fit_power_law(ts, grid_norm).exponent == pytest.approx(0.75, abs=0.005)


def test_kernel_resolution_and_grid_errors():
    with pytest.raises(ResolutionError):
        g_kernel(1.0, 1.0, xi_max=0.5)
    with pytest.raises(ValueError):
        g_kernel(1.0, 1.0, x=np.array([0.0, 1.0, 3.0]))
    with pytest.raises(ValueError):
        g_kernel(1.0, 0.0)


def test_moments_closed_form_and_sampled():
    g = Generator("dgaussian", sigma=1.5)
    m = moments(g)
    assert m.P == pytest.approx(0.0, abs=1e-12)
    assert m.Q == pytest.approx(g.Q, rel=1e-12)
    x = np.linspace(-30, 30, 6001)
    ms = moments((x, g(x)))
    assert ms.Q == pytest.approx(g.Q, rel=1e-8)
    # |x| has a kink, so the trapezoid rule is only second order here
    assert ms.L11 == pytest.approx(m.L11, rel=1e-4)
    with pytest.raises(TailDivergence):
        moments((x, np.ones_like(x)))
    with pytest.raises(TailDivergence):
        moments(lambda x: 1.0 / (1.0 + np.asarray(x) ** 2))


def test_profile_moments_exact_vs_quadrature():
    d = InitialData(w1=Generator("box", 1.2), psi0=Generator("gaussian", 0.7), psi1=Generator("dgaussian"))
    exact = profile_moments(d)
    quad_ = profile_moments(d, exact=False)
    np.testing.assert_allclose(exact, quad_, rtol=1e-10, atol=1e-12)


def test_profiles_match_their_transforms():
    d = InitialData(w1=Generator("gaussian"), psi0=Generator("gaussian", 2.0), psi1=Generator("dgaussian"))
    a, t = 1.0, 30.0
    pw = profile_w(a, t, data=d)
    pp = profile_psi(a, t, data=d, kernel=pw)
    grid = frequency_grid(t, 10.0, speed=0)
    wh, ph = profile_hats(a, t, grid.xi, d)
    assert math.sqrt(TRAP(pw.w_pf**2, pw.x)) == pytest.approx(l2_norm_spectral(wh, grid), rel=1e-8)
    assert math.sqrt(TRAP(pp.psi_pf**2, pp.x)) == pytest.approx(l2_norm_spectral(ph, grid), rel=1e-8)
    P, Q, Ppsi = profile_moments(d)
    np.testing.assert_allclose(pw.w_pf, pw.G * P - pw.dG * (Q + Ppsi))
