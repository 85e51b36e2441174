"""End-to-end linear experiments: growth, profiles, cancellation, regularity loss, bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MeanConditionViolated
from .initial_data import Generator, InitialData
from .norms_rates import (
    CutoffFamily,
    FrequencyGrid,
    RateReport,
    fit_power_law,
    frequency_grid,
    l2_norm_spectral,
    log_times,
)
from .profiles import ghat, profile_hats, profile_moments
from .spectral_core import (
    SpectralState,
    WaveSpeed,
    as_wave_speed,
    eval_fourier_solution,
    initial_data_transform,
    solve_linear,
    solve_quartic,
)

MEAN_TOL = 1e-10


@dataclass
class ExperimentConfig:
    """Inputs shared by the linear experiments."""

    a: WaveSpeed | float = 1.0
    data: InitialData = field(default_factory=lambda: InitialData(w1=Generator("gaussian")))
    window: tuple = (1e2, 1e4)
    n_times: int = 25
    density: float = 1.0
    xi_max: float | None = None
    check: str = "growth"

    def __post_init__(self):
        self.a = as_wave_speed(self.a)
        if not (0 < self.window[0] < self.window[1]):
            raise ValueError("window must satisfy 0 < t0 < t1")
        if self.n_times < 2 or self.density <= 0:
            raise ValueError("need n_times >= 2 and density > 0")

    @property
    def times(self):
        return log_times(self.window, self.n_times)

    def grid(self, t: float) -> FrequencyGrid:
        xi_max = self.xi_max if self.xi_max is not None else self.data.bandwidth
        return frequency_grid(t, xi_max, density=self.density, speed=0.0)


@dataclass
class ExperimentResult:
    """Sampled norm series, fitted rates and acceptance bands of one experiment."""

    name: str
    times: np.ndarray
    series: dict
    rates: dict
    bands: dict
    extras: dict = field(default_factory=dict)

    def checks(self) -> dict:
        out = {}
        for key, (lo, hi) in self.bands.items():
            val = self.rates[key].exponent if isinstance(self.rates.get(key), RateReport) else self.extras.get(key)
            out[key] = val is not None and bool(lo <= val <= hi)
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks().values())


def spectral_state(a, t: float, data: InitialData, grid: FrequencyGrid) -> SpectralState:
    return solve_linear(a, grid.xi, data.hats(grid.xi), t)


def _norms(a, t, cfg: ExperimentConfig, fields):
    """Evaluate ``fields(state, grid) -> dict`` of transforms and return their L2 norms."""
    g = cfg.grid(t)
    st = spectral_state(a, t, cfg.data, g)
    return {k: l2_norm_spectral(v, g, tail_tol=1.0) for k, v in fields(st, g).items()}


def _sweep(cfg: ExperimentConfig, fields):
    ts = cfg.times
    rows = [_norms(cfg.a, t, cfg, fields) for t in ts]
    return ts, {k: np.array([r[k] for r in rows]) for k in rows[0]}


def _require_mean(data: InitialData):
    P = profile_moments(data)[0]
    if abs(P) < MEAN_TOL:
        raise MeanConditionViolated(f"|P_w1| = {abs(P):.3e} is below {MEAN_TOL}")
    return P


def run_growth(cfg: ExperimentConfig, band_w=(0.70, 0.80), band_psi=(0.20, 0.30)) -> ExperimentResult:
    """Fit the growth exponents of ``||w||`` and ``||psi||`` (expected 3/4 and 1/4)."""
    P = _require_mean(cfg.data)
    ts, s = _sweep(cfg, lambda st, g: {"norm_w_l2": st.w_hat, "norm_psi_l2": st.psi_hat})
    rates = {"w_exponent": fit_power_law(ts, s["norm_w_l2"]), "psi_exponent": fit_power_law(ts, s["norm_psi_l2"])}
    lower = s["norm_w_l2"] / (ts**0.75 * abs(P))
    extras = {"lower_ratio_min": float(lower.min()), "lower_ratio_max": float(lower.max())}
    return ExperimentResult("growth", ts, s, rates, {"w_exponent": band_w, "psi_exponent": band_psi}, extras)


def run_profile_error(cfg: ExperimentConfig, bound=-0.20, ratio_bound=-0.9) -> ExperimentResult:
    """Distance to the diffusion-plate profiles and its ratio to the profile size."""
    a = cfg.a

    def fields(st, g):
        wpf, ppf = profile_hats(a, st.t, g.xi, cfg.data)
        return {"w_err": st.w_hat - wpf, "psi_err": st.psi_hat - ppf, "w_pf": wpf}

    ts, s = _sweep(cfg, fields)
    s["w_ratio"] = s["w_err"] / s["w_pf"]
    rates = {
        "w_error_exponent": fit_power_law(ts, s["w_err"]),
        "psi_error_exponent": fit_power_law(ts, s["psi_err"]),
        "ratio_exponent": fit_power_law(ts, s["w_ratio"]),
    }
    bands = {
        "w_error_exponent": (-math.inf, bound),
        "psi_error_exponent": (-math.inf, bound),
        "ratio_exponent": (-math.inf, ratio_bound),
    }
    return ExperimentResult("profile-error", ts, s, rates, bands)


def energy_components(a, state: SpectralState) -> dict:
    """Transforms of ``(d_x w - psi, d_t w, a d_x psi, d_t psi)``."""
    ca = as_wave_speed(a).a
    ix = 1j * np.asarray(state.xi)
    return {
        "shear": ix * state.w_hat - state.psi_hat,
        "w_t": state.dt_w_hat,
        "a_psi_x": ca * ix * state.psi_hat,
        "psi_t": state.dt_psi_hat,
    }


def reference_rate(a, xi):
    """Pointwise dissipation rate ``rho(|xi|)`` of the energy term."""
    x2 = np.asarray(xi, dtype=float) ** 2
    if as_wave_speed(a).a == 1.0:
        return x2 / (1.0 + x2)
    return x2 / (1.0 + x2) ** 2


def run_cancellation_energy(
    cfg: ExperimentConfig,
    band_shear=(-0.30, -0.20),
    band_psi=(0.20, 0.30),
    energy_bound=-0.20,
) -> ExperimentResult:
    """Shear stress decays while ``psi`` grows; all energy components decay."""
    _require_mean(cfg.data)
    a = cfg.a

    def fields(st, g):
        comp = energy_components(a, st)
        comp["psi"] = st.psi_hat
        comp["w_x"] = 1j * g.xi * st.w_hat
        return comp

    ts, s = _sweep(cfg, fields)
    s["energy_l2"] = np.sqrt(sum(s[k] ** 2 for k in ("shear", "w_t", "a_psi_x", "psi_t")))
    rates = {k + "_exponent": fit_power_law(ts, s[k]) for k in ("shear", "w_t", "a_psi_x", "psi_t", "psi", "w_x", "energy_l2")}
    bands = {"shear_exponent": band_shear, "psi_exponent": band_psi}
    for k in ("w_t", "a_psi_x", "psi_t"):
        bands[k + "_exponent"] = (-math.inf, energy_bound)
    return ExperimentResult("cancellation", ts, s, rates, bands)


# --------------------------------------------------------------------------
# regularity loss

def envelope_rate(times, values, window: float, blocks=None) -> RateReport:
    """Decay rate of the envelope: block maxima over ``window`` then a log-linear fit.

    Blocks are consecutive ``window``-long intervals unless explicit integer
    ``blocks`` labels are given.  Returned ``exponent`` is the positive rate
    ``r`` in ``exp(-r t)``.
    """
    t = np.asarray(times)
    v = np.abs(np.asarray(values))
    block = np.floor((t - t[0]) / window).astype(np.int64) if blocks is None else np.asarray(blocks)
    tc, vm = [], []
    for b in np.unique(block):
        sel = np.flatnonzero(block == b)
        if sel.size < 2:
            continue
        j = sel[int(np.argmax(v[sel]))]
        tc.append(t[j])
        vm.append(v[j])
    tc, vm = np.array(tc), np.array(vm)
    if tc.size < 8:
        raise ValueError("too few envelope samples; widen the time window")
    slope, icpt = np.polyfit(tc, np.log(vm), 1)
    resid = np.log(vm) - (slope * tc + icpt)
    return RateReport(float(-slope), float("nan"), (float(t[0]), float(t[-1])), int(tc.size),
                      float(np.max(np.abs(resid))), float(math.exp(icpt)))


def frequency_envelope_rate(
    a, xi: float, t_window=None, samples_per_period: int = 16, n_blocks: int = 60
) -> RateReport:
    """Envelope decay rate of ``|w_hat(t, xi)|`` for unit ``w1`` data at a single frequency.

    The window is covered by ``n_blocks`` evenly spaced blocks, each one
    envelope period long and sampled densely.
    """
    ws = as_wave_speed(a)
    q = solve_quartic(ws, np.array([xi]))
    im = np.abs(q.roots()[:, 0].imag)
    diff = abs(q.lam_I1[0] - q.lam_I2[0])
    freqs = [f for f in (im.max(), im.min(), diff) if f > 1e-12]
    window = 2.0 * math.pi / min(freqs)
    if t_window is None:
        # the slow branch decays like t / xi^2 when a != 1
        t_window = (40.0, 200.0) if ws.a == 1.0 else (40.0, 40.0 + 40.0 * xi * xi)
    starts = np.linspace(t_window[0], t_window[1] - window, n_blocks)
    m = int(math.ceil(samples_per_period * im.max() * window / (2.0 * math.pi)))
    local = np.arange(m) * (window / m)
    t = (starts[:, None] + local[None, :]).ravel()
    hats = (np.zeros(1, complex), np.ones(1, complex), np.zeros(1, complex), np.zeros(1, complex))
    ind = initial_data_transform("w", hats, ws, q.xi)
    vals = eval_fourier_solution(q, ind, t[:, None], 0, check_gap=False)[:, 0]
    return envelope_rate(t, vals, window, blocks=np.repeat(np.arange(n_blocks), m))


def run_regularity_loss(a, xis=(10.0, 20.0, 40.0, 80.0), ratio_band=(3.0, 5.0), factor: float = 2.0) -> ExperimentResult:
    """Envelope rates at large frequencies.

    For ``a != 1`` consecutive doublings of ``xi`` should divide the rate by
    about 4; for ``a = 1`` the rate is independent of ``xi``.
    """
    ws = as_wave_speed(a)
    xis = tuple(float(x) for x in xis)
    rates = {f"rate_{x:g}": frequency_envelope_rate(ws, x) for x in xis}
    r = np.array([rates[f"rate_{x:g}"].exponent for x in xis])
    extras = {"xi": list(xis), "rates": r.tolist()}
    bands = {}
    if ws.a != 1.0:
        for x, y in zip(xis[:-1], xis[1:]):
            if abs(y - 2 * x) < 1e-12:
                key = f"ratio_{x:g}_{y:g}"
                extras[key] = float(rates[f"rate_{x:g}"].exponent / rates[f"rate_{y:g}"].exponent)
                bands[key] = ratio_band
    else:
        extras["spread"] = float(r.max() / r.min())
        bands["spread"] = (1.0, factor)
    return ExperimentResult("regularity-loss", np.array(xis), {"rate": r}, rates, bands, extras)


# --------------------------------------------------------------------------
# constant-free pointwise bounds

BOUND_C = 0.25


def _bound_ratios(a, xi, t, data: InitialData, c: float = BOUND_C):
    """Ratios LHS / RHS for the four pointwise estimates on a ``(t, xi)`` mesh."""
    ws = as_wave_speed(a)
    X, T = np.meshgrid(xi, t)
    hats = data.hats(xi)
    S = sum(np.abs(h) for h in hats)[None, :]
    st = solve_linear(ws, xi, hats, T)
    G = ghat(ws, T, X)
    w0, w1, p0, p1 = hats
    ix = 1j * X
    decay = np.exp(-c * X * X * T)
    rhs1 = (1.0 + np.abs(np.sin(ws.c_a * X * X * T)) / (ws.c_a * X * X)) * decay * S
    lhs = {
        "i": np.abs(st.w_hat),
        "ii": np.abs(st.w_hat - G * (w1 - ix * (p0 + p1))),
        "iii": np.abs(st.psi_hat - ix * G * w1),
        "iv": np.abs(ix * st.w_hat - st.psi_hat),
    }
    rhs = {"i": rhs1, "ii": decay * S, "iii": decay * S, "iv": (1.0 + np.abs(X)) * decay * S}
    with np.errstate(divide="ignore", invalid="ignore"):
        return {k: np.where(rhs[k] > 0, lhs[k] / rhs[k], np.where(lhs[k] == 0, 0.0, np.inf)) for k in lhs}


def verify_pointwise_bounds(
    a=1.0,
    data: InitialData | None = None,
    xi_range=(1e-3, 0.1),
    t_range=(1.0, 1e3),
    n: int = 81,
    tolerance: float = 0.05,
    cutoff: CutoffFamily | None = None,
) -> ExperimentResult:
    """Max ratios on an ``n x n`` log mesh and on its nested 2x refinement."""
    if data is None:
        data = InitialData(Generator("gaussian"), Generator("gaussian", 1.5), Generator("gaussian", 0.8),
                           Generator("dgaussian"))
    cutoff = cutoff or CutoffFamily()
    if xi_range[1] > cutoff.eps0:
        raise ValueError("bounds are only checked inside the interior zone")
    out = {}
    for level, m in (("coarse", n), ("fine", 2 * n - 1)):
        xi = np.geomspace(*xi_range, m)
        t = np.geomspace(*t_range, m)
        rat = _bound_ratios(a, xi, t, data)
        out[level] = {k: float(np.max(v)) for k, v in rat.items()}
    extras = {"max_" + k: out["fine"][k] for k in out["fine"]}
    bands = {}
    for k in out["fine"]:
        c, f = out["coarse"][k], out["fine"][k]
        grow = f / c - 1.0 if c > 0 else (0.0 if f == 0 else math.inf)
        extras["growth_" + k] = grow
        bands["growth_" + k] = (-math.inf, tolerance)
    extras["coarse"] = out["coarse"]
    return ExperimentResult("verify-bounds", np.array([]), {}, {}, bands, extras)


def cancellation_witness(a=1.0, data: InitialData | None = None, xis=None) -> dict:
    """Along ``t = xi^-2`` the separate ratios blow up while the shear ratio stays bounded."""
    if data is None:
        data = InitialData(w1=Generator("gaussian"))
    xis = np.geomspace(1e-1, 1e-3, 9) if xis is None else np.asarray(xis, dtype=float)
    rows = {"xi": xis.tolist(), "shear": [], "i_xi_w": [], "psi": []}
    ws = as_wave_speed(a)
    for x in xis:
        xa = np.array([x])
        t = 1.0 / (x * x)
        hats = data.hats(xa)
        st = solve_linear(ws, xa, hats, t)
        rhs = (1.0 + x) * math.exp(-BOUND_C) * float(sum(np.abs(h) for h in hats)[0])
        rows["shear"].append(float(abs(1j * x * st.w_hat[0] - st.psi_hat[0]) / rhs))
        rows["i_xi_w"].append(float(abs(x * st.w_hat[0]) / rhs))
        rows["psi"].append(float(abs(st.psi_hat[0]) / rhs))
    return rows
