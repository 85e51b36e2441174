"""Pseudo-spectral integrator for the semilinear system with ``|psi|^p`` forcing.

Each Fourier mode is propagated exactly by the linear solution map; the
nonlinearity enters through an exponential midpoint Duhamel rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MeanConditionViolated, NumericalBlowUp
from .experiments import ExperimentConfig, ExperimentResult, _sweep
from .initial_data import Generator, InitialData
from .norms_rates import RateReport, fit_power_law
from .spectral_core import as_wave_speed, fundamental_solutions, solve_quartic

BLOWUP = 1e12


def system_matrix(a, xi) -> np.ndarray:
    """First-order matrix ``A(xi)`` for ``V = (w, w_t, psi, psi_t)``; shape ``(n, 4, 4)``."""
    ws = as_wave_speed(a)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    A = np.zeros(xi.shape + (4, 4), dtype=complex)
    A[:, 0, 1] = 1.0
    A[:, 1, 0] = -xi * xi
    A[:, 1, 2] = -1j * xi
    A[:, 2, 3] = 1.0
    A[:, 3, 0] = 1j * xi
    A[:, 3, 2] = -(ws.a**2) * xi * xi - 1.0
    A[:, 3, 3] = -1.0
    return A


def linear_propagator(a, xi, dt: float) -> np.ndarray:
    """Exact solution map ``exp(A(xi) dt)``, shape ``(n, 4, 4)``.

    Every component of ``V`` solves the scalar quartic ODE, so by
    Cayley-Hamilton ``exp(A dt) = sum_k phi_k(dt) A^k`` where ``phi_k`` are
    the fundamental solutions built from the characteristic roots.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    q = solve_quartic(a, xi)
    phi = fundamental_solutions(q, dt)
    A = system_matrix(a, xi)
    P = np.zeros_like(A)
    Ak = np.broadcast_to(np.eye(4, dtype=complex), A.shape).copy()
    for k in range(4):
        P += phi[k][:, None, None] * Ak
        Ak = Ak @ A
    return P


@dataclass
class XNormMonitor:
    """Running supremum of the time-weighted norm."""

    times: list = field(default_factory=list)
    values: list = field(default_factory=list)
    sup: list = field(default_factory=list)

    @staticmethod
    def weighted(t, w_l2, w_h2, psi_l2, psi_h1) -> float:
        s = 1.0 + t
        return s**-0.25 * w_l2 + s**0.75 * w_h2 + s**0.25 * psi_l2 + s**0.75 * psi_h1

    def record(self, t: float, norms: dict):
        v = self.weighted(t, norms["norm_w_l2"], norms["norm_w_h2"], norms["norm_psi_l2"], norms["norm_psi_h1"])
        self.times.append(float(t))
        self.values.append(v)
        self.sup.append(max(v, self.sup[-1]) if self.sup else v)

    def at(self, t: float) -> float:
        i = int(np.searchsorted(self.times, t - 1e-9))
        return self.sup[min(i, len(self.sup) - 1)]

    @property
    def final(self) -> float:
        return self.sup[-1]

    def bounded(self, factor: float = 2.0, ref_time: float = 1.0) -> bool:
        return self.final <= factor * self.at(ref_time)


@dataclass
class SemilinearState:
    """Periodic box ``[-L, L)`` with ``N`` points; ``V`` holds rFFT coefficients, shape ``(4, N//2+1)``."""

    L: float
    N: int
    V: np.ndarray
    t: float = 0.0
    p: float = 4.0

    def __post_init__(self):
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if self.L <= 0 or self.p <= 1:
            raise ValueError("need L > 0 and p > 1")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    @property
    def xi(self) -> np.ndarray:
        return np.pi * np.arange(self.N // 2 + 1) / self.L

    def physical(self):
        """``(w, w_t, psi, psi_t)`` sampled on the grid."""
        return np.fft.irfft(self.V, n=self.N, axis=-1)

    def norms(self) -> dict:
        # Parseval for rFFT coefficients: interior modes count twice
        mult = np.full(self.N // 2 + 1, 2.0)
        mult[0] = 1.0
        mult[-1] = 1.0
        c = self.dx / self.N

        def hdot(row, k):
            return math.sqrt(c * np.sum(mult * self.xi ** (2 * k) * np.abs(self.V[row]) ** 2))

        return {
            "norm_w_l2": hdot(0, 0),
            "norm_w_h2": hdot(0, 2),
            "norm_psi_l2": hdot(2, 0),
            "norm_psi_h1": hdot(2, 1),
        }


def initial_state(data: InitialData, L: float = 200.0, N: int = 4096, p: float = 4.0) -> SemilinearState:
    x = -L + 2.0 * L / N * np.arange(N)
    V = np.stack([np.fft.rfft(f) for f in data.sample(x)]).astype(complex)
    return SemilinearState(L, N, V, 0.0, p)


def nonlinearity(psi_hat: np.ndarray, N: int, p: float) -> np.ndarray:
    """rFFT of ``|psi|^p`` with 3/2 zero padding."""
    M = 3 * N // 2
    pad = np.zeros(M // 2 + 1, dtype=complex)
    pad[: N // 2] = psi_hat[: N // 2]  # Nyquist mode dropped
    psi = np.fft.irfft(pad, n=M) * (M / N)
    f = np.abs(psi) ** p
    if not np.all(np.isfinite(f)) or np.max(f, initial=0.0) > BLOWUP:
        raise NumericalBlowUp("|psi|^p exceeded the blow-up threshold")
    out = np.fft.rfft(f)[: N // 2 + 1] * (N / M)
    out[-1] = 0.0
    return out


class Stepper:
    """Exponential midpoint integrator with cached propagators for a fixed ``dt``."""

    def __init__(self, a, xi, dt: float, forcing=True):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.dt = dt
        self.P = linear_propagator(a, xi, dt)
        self.P2 = linear_propagator(a, xi, dt / 2)
        self.P4 = linear_propagator(a, xi, dt / 4)
        self.forcing = forcing

    @staticmethod
    def _apply(P, V):
        return np.einsum("mij,jm->im", P, V)

    def step(self, st: SemilinearState) -> SemilinearState:
        dt = self.dt
        V = st.V
        lin = self._apply(self.P, V)
        if self.forcing:
            n0 = nonlinearity(V[2], st.N, st.p)
            half = self._apply(self.P2, V) + 0.5 * dt * self.P4[:, :, 3].T * n0
            n1 = nonlinearity(half[2], st.N, st.p)
            lin = lin + dt * self.P2[:, :, 3].T * n1
        if not np.all(np.isfinite(lin)):
            raise NumericalBlowUp("non-finite state")
        return SemilinearState(st.L, st.N, lin, st.t + dt, st.p)


def duhamel_step(state: SemilinearState, dt: float, a=1.0, forcing=True) -> SemilinearState:
    """One exponential midpoint step; build a :class:`Stepper` for repeated use."""
    return Stepper(a, state.xi, dt, forcing).step(state)


@dataclass
class SemilinearRun:
    times: np.ndarray
    series: dict
    monitor: XNormMonitor
    rates: dict
    final: SemilinearState
    max_imag: float = 0.0


def solve_semilinear(
    data: InitialData | None = None,
    *,
    p: float = 4.0,
    eps: float = 1e-2,
    T: float = 200.0,
    dt: float = 0.01,
    L: float = 200.0,
    N: int = 4096,
    a=1.0,
    fit_window=(10.0, None),
    sample_every: float = 0.5,
    forcing: bool = True,
    enforce_mean: bool = True,
) -> SemilinearRun:
    """Integrate to ``T`` with data ``eps * data``; record norms and fit decay exponents."""
    if as_wave_speed(a).a != 1.0:
        raise ValueError("the semilinear integrator is set up for equal wave speeds a = 1")
    if data is None:
        data = InitialData(w1=Generator("dgaussian"))
    if enforce_mean and abs(data.w1.P) > 1e-10:
        raise MeanConditionViolated("the semilinear run needs P_w1 = 0")
    st = initial_state(data.scaled(eps), L, N, p)
    stepper = Stepper(a, st.xi, dt, forcing)
    n_steps = int(round(T / dt))
    every = max(1, int(round(sample_every / dt)))
    mon = XNormMonitor()
    times, rows = [0.0], [st.norms()]
    mon.record(0.0, rows[0])
    for k in range(1, n_steps + 1):
        st = stepper.step(st)
        if k % every == 0 or k == n_steps:
            nm = st.norms()
            times.append(st.t)
            rows.append(nm)
            mon.record(st.t, nm)
    ts = np.array(times)
    series = {key: np.array([r[key] for r in rows]) for key in rows[0]}
    lo, hi = fit_window[0], fit_window[1] if fit_window[1] is not None else T
    rates = {}
    if hi > lo:
        rates = {
            "w_exponent": fit_power_law(ts, series["norm_w_l2"], (lo, hi)),
            "psi_exponent": fit_power_law(ts, series["norm_psi_l2"], (lo, hi)),
            "w_h2_exponent": fit_power_law(ts, series["norm_w_h2"], (lo, hi)),
            "psi_h1_exponent": fit_power_law(ts, series["norm_psi_h1"], (lo, hi)),
        }
    return SemilinearRun(ts, series, mon, rates, st)


def semilinear_result(run: SemilinearRun, band_psi=(-0.35, -0.15), band_w=(0.15, 0.35), factor=2.0) -> ExperimentResult:
    extras = {"x_norm_final": run.monitor.final, "x_norm_at_1": run.monitor.at(1.0)}
    extras["x_norm_ratio"] = extras["x_norm_final"] / extras["x_norm_at_1"]
    bands = {"psi_exponent": band_psi, "w_exponent": band_w, "x_norm_ratio": (0.0, factor)}
    return ExperimentResult("semilinear", run.times, run.series, run.rates, bands, extras)


def linearized_rate_check(cfg: ExperimentConfig | None = None, tol: float = 0.05) -> ExperimentResult:
    """Linear rates with zero-mean ``w1``: ``t^(1/4)``, ``t^(-3/4)``, ``t^(-1/4)``, ``t^(-3/4)``."""
    if cfg is None:
        cfg = ExperimentConfig(a=1.0, data=InitialData(w1=Generator("dgaussian")))
    if cfg.a.a != 1.0:
        raise ValueError("the zero-mean rates are stated for a = 1")
    if abs(cfg.data.w1.P) > 1e-10:
        raise MeanConditionViolated("zero-mean rates need P_w1 = 0")

    def fields(st, g):
        return {
            "norm_w_l2": st.w_hat,
            "norm_w_h2": g.xi**2 * st.w_hat,
            "norm_psi_l2": st.psi_hat,
            "norm_psi_h1": g.xi * st.psi_hat,
        }

    ts, s = _sweep(cfg, fields)
    expect = {"norm_w_l2": 0.25, "norm_w_h2": -0.75, "norm_psi_l2": -0.25, "norm_psi_h1": -0.75}
    rates: dict[str, RateReport] = {}
    bands = {}
    for key, e in expect.items():
        name = key.replace("norm_", "") + "_exponent"
        rates[name] = fit_power_law(ts, s[key])
        bands[name] = (e - tol, e + tol)
    return ExperimentResult("linearized-rates", ts, s, rates, bands)
