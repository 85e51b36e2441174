import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timoshenko_lab.errors import DegenerateRoots, InvalidWaveSpeed, StepSizeUnderflow, ZoneViolation
from timoshenko_lab.spectral_core import (
    InducedData,
    WaveSpeed,
    eval_fourier_solution,
    expand_roots_large,
    expand_roots_small,
    fundamental_solutions,
    initial_data_transform,
    ode_oracle,
    quartic_discriminant,
    quartic_residual,
    solve_linear,
    solve_quartic,
    track_roots,
    vieta_errors,
    zone_of,
)

from oracles import quartic_roots

SPEEDS = (0.6, 1.0, 2.0)
XI_SWEEP = np.geomspace(1e-3, 1e3, 60)


def _unit(k, n=1):
    d = [np.zeros(n, complex) for _ in range(4)]
    d[k] = np.ones(n, complex)
    return InducedData(*d)


# ---------------------------------------------------------------- wave speed

def test_wave_speed_derives_c_a():
    assert WaveSpeed(1.0).c_a == pytest.approx(math.sqrt(3) / 2, rel=1e-15)
    assert WaveSpeed(2.0).c_a == pytest.approx(math.sqrt(15) / 2, rel=1e-15)


@pytest.mark.parametrize("a", [0.5, 0.3, -1.0, float("nan")])
def test_wave_speed_rejects_small(a):
    with pytest.raises(InvalidWaveSpeed):
        WaveSpeed(a)


def test_zones():
    z = zone_of(np.array([0.01, 1.0, 20.0]))
    assert list(z) == ["interior", "bounded", "exterior"]


# ---------------------------------------------------------------- roots

def test_roots_at_zero_frequency_exact():
    q = solve_quartic(1.0, 0.0)
    r = np.sort_complex(q.roots().ravel())
    expected = np.sort_complex(np.array([0, 0, complex(-0.5, math.sqrt(3) / 2), complex(-0.5, -math.sqrt(3) / 2)]))
    np.testing.assert_allclose(r, expected, atol=1e-15)


@pytest.mark.parametrize("a", SPEEDS)
def test_vieta_and_stability(a):
    q = solve_quartic(a, XI_SWEEP)
    assert vieta_errors(q).max() < 1e-9
    assert np.all(q.max_real_part() < 0)
    lam = q.roots()
    np.testing.assert_allclose(lam.sum(axis=0), -1.0, atol=1e-9)
    res = np.abs(quartic_residual(a, XI_SWEEP, lam))
    assert np.all(res < 1e-9 * np.maximum(1.0, XI_SWEEP**4))


@pytest.mark.parametrize("a", SPEEDS)
def test_roots_match_numpy_roots(a):
    for xi in (1e-3, 0.05, 0.7, 3.0, 40.0, 500.0):
        ours = np.sort_complex(solve_quartic(a, xi).roots().ravel())
        ref = np.sort_complex(quartic_roots(a, xi))
        np.testing.assert_allclose(ours, ref, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("a", SPEEDS)
def test_discriminant_positive(a):
    assert np.all(quartic_discriminant(a, XI_SWEEP) > 0)


@given(a=st.floats(0.55, 5.0), logxi=st.floats(-3, 3))
@settings(max_examples=200, deadline=None)
def test_vieta_property(a, logxi):
    q = solve_quartic(a, 10.0**logxi)
    assert vieta_errors(q).max() < 1e-9
    assert q.max_real_part() < 0
    assert q.lam_I1 > 0 and q.lam_I2 > 0


@pytest.mark.parametrize("a", (0.6, 0.9, 1.0, 1.1, 2.0))
def test_labelling_agrees_with_continuation(a):
    xs = np.geomspace(1e-2, 200.0, 400)
    tr = track_roots(a, xs)
    q = solve_quartic(a, xs)
    np.testing.assert_allclose(q.lam_R1 + 1j * q.lam_I1, tr.lam_R1 + 1j * tr.lam_I1, atol=1e-8)
    np.testing.assert_allclose(q.lam_R2 + 1j * q.lam_I2, tr.lam_R2 + 1j * tr.lam_I2, atol=1e-8)


def test_degenerate_roots_raise_for_near_coincident_pairs():
    # the diffusion pair nearly collides with its conjugate at tiny xi
    with pytest.raises(DegenerateRoots):
        solve_quartic(1.0, 1e-6)
    q = solve_quartic(1.0, 1e-6, check_gap=False)
    assert q.lam_I2 >= 0


def test_small_expansion_example_a1():
    q = solve_quartic(1.0, 0.1)
    assert q.lam_R2 == pytest.approx(-0.005, rel=0.05)
    assert q.lam_I2 == pytest.approx(math.sqrt(3) / 2 * 0.01, rel=0.05)
    e = expand_roots_small(1.0, 0.1)
    # a = 1 kills the xi^4 imaginary correction
    assert e.lam_I2 == pytest.approx(math.sqrt(3) / 2 * 0.01, rel=1e-14)
    e0 = expand_roots_small(1.0, 1e-8)
    assert complex(e0.lam_R1, e0.lam_I1) == pytest.approx(complex(-0.5, math.sqrt(3) / 2), abs=1e-12)


@pytest.mark.parametrize("a", (0.6, 1.0, 2.0))
def test_small_expansion_remainder_orders(a):
    xs = np.geomspace(0.01, 0.1, 12)
    q, e = solve_quartic(a, xs), expand_roots_small(a, xs)
    err1 = np.abs((q.lam_R1 + 1j * q.lam_I1) - (e.lam_R1 + 1j * e.lam_I1))
    err2 = np.abs((q.lam_R2 + 1j * q.lam_I2) - (e.lam_R2 + 1j * e.lam_I2))
    s1 = np.polyfit(np.log(xs), np.log(err1), 1)[0]
    s2 = np.polyfit(np.log(xs), np.log(err2), 1)[0]
    assert s1 == pytest.approx(4.0, abs=0.15)
    assert s2 == pytest.approx(6.0, abs=0.15)


def test_small_expansion_zone_violation():
    with pytest.raises(ZoneViolation):
        expand_roots_small(1.0, 0.2)
    with pytest.raises(ZoneViolation):
        expand_roots_large(1.0, 5.0)


def test_large_expansion_real_parts():
    # a = 1: both pairs tend to -1/4, offset shrinking like 1/xi
    offs = []
    for xi in (50.0, 500.0, 5000.0):
        q = solve_quartic(1.0, xi)
        assert q.lam_R1 + q.lam_R2 == pytest.approx(-0.5, abs=1e-9)
        offs.append(abs(q.lam_R1 + 0.25) * xi)
    assert offs[0] == pytest.approx(offs[2], rel=0.01)
    q2 = solve_quartic(2.0, 50.0)
    assert q2.lam_R1 == pytest.approx(-0.5, abs=2e-3)  # a > 1: the fast pair is pair 1


@pytest.mark.parametrize("a", (0.6, 1.0, 2.0))
def test_large_expansion_error_decreases(a):
    xs = np.array([10.0, 20.0, 40.0, 80.0, 160.0])
    q, e = solve_quartic(a, xs), expand_roots_large(a, xs)
    err = np.abs(q.roots() - e.roots()).max(axis=0)
    assert np.all(np.diff(err) < 0)


def test_large_slow_branch_matches_corrected_coefficient():
    # slow branch real part ~ -1/(2 (1-a^2)^2 xi^2): xi^2 * Re -> -1/18 at a = 2
    for xi in (100.0, 300.0):
        q = solve_quartic(2.0, xi)
        assert q.lam_R2 * xi * xi == pytest.approx(-1.0 / 18.0, rel=0.01)


# ---------------------------------------------------------------- induced data

def test_induced_data_examples():
    one, z = 1.0 + 0j, 0j
    u = initial_data_transform("w", (one, z, z, z), 1.0, 2.0)
    np.testing.assert_allclose(u.as_tuple(), (1, 0, -4, 0))
    u = initial_data_transform("w", (z, z, z, one), 1.0, 0.5)
    np.testing.assert_allclose(u.as_tuple(), (0, 0, 0, -0.5j))
    u = initial_data_transform("psi", (z, z, z, one), 1.0, 0.5)
    np.testing.assert_allclose(u.as_tuple(), (0, 1, -1, -0.25))


@pytest.mark.parametrize("branch,idx", [("w", 0), ("psi", 2)])
def test_induced_data_matches_system_derivatives(branch, idx):
    """u2, u3 equal the second and third time derivatives of the first-order system at t = 0."""
    from oracles import system_matrix

    rng = np.random.default_rng(3)
    a, xi = 1.3, 0.7
    data = rng.normal(size=4) + 1j * rng.normal(size=4)
    A = system_matrix(a, xi)
    v = np.array([data[0], data[1], data[2], data[3]])
    d2 = (A @ A @ v)[idx]
    d3 = (A @ A @ A @ v)[idx]
    u = initial_data_transform(branch, tuple(data), a, xi)
    assert complex(u.u2) == pytest.approx(d2, abs=1e-13)
    assert complex(u.u3) == pytest.approx(d3, abs=1e-13)


def test_induced_data_rejects_unknown_branch():
    with pytest.raises(ValueError):
        initial_data_transform("theta", (0, 0, 0, 0), 1.0, 1.0)


# ---------------------------------------------------------------- representation

def test_initial_condition_reproduced():
    rng = np.random.default_rng(0)
    xi = np.array([0.0, 0.02, 0.5, 3.0, 50.0])
    for order in range(4):
        q = solve_quartic(1.7, xi)
        data = [rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(4)]
        ind = InducedData(*data)
        val = eval_fourier_solution(q, ind, 0.0, order)
        np.testing.assert_allclose(val, data[order], rtol=1e-8, atol=1e-8)


def test_zero_mode_is_secular():
    q = solve_quartic(1.0, np.array([0.0]))
    ind = initial_data_transform("w", (np.array([2.0 + 0j]), np.array([3.0 + 0j]), np.zeros(1), np.zeros(1)), 1.0, np.array([0.0]))
    for t in (0.5, 7.0, 100.0):
        assert complex(eval_fourier_solution(q, ind, t)[0]) == pytest.approx(2.0 + 3.0 * t, rel=1e-13)


@pytest.mark.parametrize("a,xi,t", [(1.0, 0.5, 10.0), (1.0, 1.0, 5.0), (2.0, 0.05, 30.0), (0.7, 15.0, 3.0)])
def test_matches_ode_oracle(a, xi, t):
    ind = InducedData(1.0 + 0j, 0j, 0j, 0j)
    q = solve_quartic(a, xi)
    val = complex(eval_fourier_solution(q, ind, t))
    ref = ode_oracle(ind, a, xi, t, rtol=1e-11)
    assert abs(val - ref) <= 1e-6 * (1 + abs(ref))


def test_derivatives_match_oracle():
    a, xi, t = 1.4, 0.8, 4.0
    ind = InducedData(0.3 + 0j, -1.0 + 0.2j, 0.5j, 1.0 + 0j)
    q = solve_quartic(a, xi)
    for k in range(4):
        val = complex(eval_fourier_solution(q, ind, t, k))
        ref = ode_oracle(ind, a, xi, t, rtol=1e-11, order=k)
        assert abs(val - ref) <= 1e-7 * (1 + abs(ref))


def test_oracle_trivial_cases():
    assert ode_oracle(InducedData(0j, 0j, 0j, 0j), 1.0, 0.3, 5.0) == 0
    assert ode_oracle(InducedData(0j, 1 + 0j, 0j, 0j), 1.0, 0.0, 4.0) == pytest.approx(4.0, rel=1e-9)
    with pytest.raises(ValueError):
        ode_oracle(InducedData(1 + 0j, 0j, 0j, 0j), 1.0, 0.3, 1.0, rtol=1e-2)


def test_oracle_step_underflow(monkeypatch):
    import timoshenko_lab.spectral_core as sc

    class Failed:
        status = -1
        message = "step size too small"

    monkeypatch.setattr(sc, "solve_ivp", lambda *a, **k: Failed())
    with pytest.raises(StepSizeUnderflow):
        ode_oracle(InducedData(1 + 0j, 0j, 0j, 0j), 1.0, 0.3, 1.0)


def test_conjugacy_for_real_data():
    """Real physical data: u_hat(t, -xi) = conj(u_hat(t, xi))."""
    from timoshenko_lab.initial_data import Generator, InitialData

    data = InitialData(Generator("gaussian", 0.7), Generator("dgaussian", 1.2), Generator("ricker"), Generator("gaussian", 2.0))
    xi = np.array([0.03, 0.4, 2.5, 30.0])
    for t in (0.0, 1.5, 40.0):
        plus = solve_linear(1.3, xi, data.hats(xi), t)
        minus = solve_linear(1.3, -xi, data.hats(-xi), t)
        np.testing.assert_allclose(minus.w_hat, np.conj(plus.w_hat), atol=1e-12)
        np.testing.assert_allclose(minus.psi_hat, np.conj(plus.psi_hat), atol=1e-12)


def test_fundamental_solutions_unit_data():
    q = solve_quartic(1.0, np.array([0.0, 0.3, 4.0]))
    for order in range(4):
        phi = fundamental_solutions(q, 0.0, order)
        np.testing.assert_allclose(phi[order], 1.0, atol=1e-9)
        for k in set(range(4)) - {order}:
            np.testing.assert_allclose(phi[k], 0.0, atol=1e-9)


def test_solve_linear_state_at_t0():
    xi = np.array([0.0, 0.1, 1.0])
    hats = tuple(np.full(3, v) for v in (1.0 + 0j, 2.0 + 0j, 3.0 + 0j, 4.0 + 0j))
    s = solve_linear(1.0, xi, hats, 0.0)
    np.testing.assert_allclose(s.w_hat, 1.0, atol=1e-9)
    np.testing.assert_allclose(s.dt_w_hat, 2.0, atol=1e-9)
    np.testing.assert_allclose(s.psi_hat, 3.0, atol=1e-9)
    np.testing.assert_allclose(s.dt_psi_hat, 4.0, atol=1e-9)


def test_no_conditioning_warning_on_regular_grid():
    q = solve_quartic(1.0, XI_SWEEP)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eval_fourier_solution(q, _unit(1, XI_SWEEP.size), 3.0)
