"""Frequency quadrature, L2 / Sobolev / weighted-L1 norms and power-law fits."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.integrate import quad

from .errors import InsufficientSamples, NonPositiveSample, TailWarning
from .spectral_core import as_wave_speed

XI_FLOOR = 3e-4


# --------------------------------------------------------------------------
# smooth cut-offs

def smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)

    def f(u):
        pos = u > 0
        return np.where(pos, np.exp(-1.0 / np.where(pos, u, 1.0)), 0.0)

    fs, f1 = f(s), f(1.0 - s)
    return fs / (fs + f1)


@dataclass(frozen=True)
class CutoffFamily:
    """Smooth partition of unity ``chi_int + chi_bdd + chi_ext = 1``."""

    eps0: float = 0.1
    N0: float = 10.0

    def __post_init__(self):
        if not 0 < self.eps0 < self.N0:
            raise ValueError("need 0 < eps0 < N0")

    def chi_int(self, xi):
        return 1.0 - smooth_step((np.abs(xi) - self.eps0 / 2) / (self.eps0 / 2))

    def chi_ext(self, xi):
        return smooth_step((np.abs(xi) - self.N0) / self.N0)

    def chi_bdd(self, xi):
        return 1.0 - self.chi_int(xi) - self.chi_ext(xi)


# --------------------------------------------------------------------------
# quadrature

def gauss_legendre_panels(breakpoints, nodes: int = 8):
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    b = np.asarray(breakpoints, dtype=float)
    g, gw = np.polynomial.legendre.leggauss(nodes)
    lo, hi = b[:-1, None], b[1:, None]
    x = 0.5 * (hi - lo) * g + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * gw
    return x.ravel(), w.ravel()


@dataclass(frozen=True)
class FrequencyGrid:
    """Quadrature rule on the whole frequency line (nodes sorted, 0 included)."""

    xi: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def size(self):
        return self.xi.size

    def integrate(self, values):
        return np.sum(self.weights * values, axis=-1)


def frequency_grid(
    t: float = 1.0,
    xi_max: float = 40.0,
    *,
    density: float = 1.0,
    nodes: int = 8,
    xi_floor: float = XI_FLOOR,
    n_log: int = 40,
    speed: float = 1.0,
    max_panels: int = 6000,
) -> FrequencyGrid:
    """Build a quadrature grid adapted to the diffusive scale ``t**-0.5``.

    Panels: geometric from ``xi_floor`` to ``s = t**-0.5``; uniform of width
    ``0.1 s`` on ``[s, 12 s]`` (resolves ``sin(c_a xi^2 t) exp(-xi^2 t/2)``);
    uniform beyond that up to ``xi_max`` with width bounded by a quarter period
    of ``exp(i speed xi t)``.  ``[0, xi_floor]`` is a Simpson panel using
    the exact ``xi = 0`` value.  ``density`` scales every panel count.
    """
    s = 1.0 / math.sqrt(max(t, 1e-12))
    knee = min(s, xi_max)
    mid = min(12.0 * s, xi_max)
    parts = []
    if knee > xi_floor:
        parts.append(np.geomspace(xi_floor, knee, int(round(n_log * density)) + 1))
    else:
        parts.append(np.array([xi_floor]))
    if mid > parts[-1][-1]:
        n_mid = max(1, int(math.ceil((mid - parts[-1][-1]) / (0.1 * s) * density)))
        parts.append(np.linspace(parts[-1][-1], mid, n_mid + 1)[1:])
    if xi_max > parts[-1][-1]:
        width = 0.05 if speed <= 0 else min(0.05, math.pi / (2.0 * speed * max(t, 1.0)))
        n_out = int(math.ceil((xi_max - parts[-1][-1]) / width * density))
        n_out = max(1, min(n_out, int(max_panels * density)))
        parts.append(np.linspace(parts[-1][-1], xi_max, n_out + 1)[1:])
    b = np.concatenate(parts)
    x, w = gauss_legendre_panels(b, nodes)
    # Simpson on [0, xi_floor]; keeps nodes away from the near-double root at 0
    x = np.concatenate([[0.5 * xi_floor, xi_floor], x])
    w = np.concatenate([[2.0 * xi_floor / 3.0, xi_floor / 6.0], w])
    xi = np.concatenate([-x[::-1], [0.0], x])
    wt = np.concatenate([w[::-1], [xi_floor / 3.0], w])
    return FrequencyGrid(xi, wt, {"t": t, "xi_max": xi_max, "density": density})


def l2_norm_spectral(field, grid: FrequencyGrid, weight=None, tail_tol: float = 1e-10) -> float:
    """``||F^{-1}(m * field)||_{L^2}`` by Plancherel, ``(1/2pi) int |m f|^2``.

    ``weight`` is ``None``, an array on ``grid.xi`` or a callable ``m(xi)``.
    """
    f = np.asarray(field)
    if weight is not None:
        m = weight(grid.xi) if callable(weight) else np.asarray(weight)
        f = m * f
    a = np.abs(f)
    peak = np.max(a) if a.size else 0.0
    if peak > 0 and max(a[..., 0].max(), a[..., -1].max()) > tail_tol * peak:
        warnings.warn("field does not decay at the grid boundary", TailWarning, stacklevel=2)
    return float(math.sqrt(max(grid.integrate(a * a) / (2.0 * math.pi), 0.0)))


def homogeneous_weight(k: float):
    return lambda xi: np.abs(xi) ** k


def sobolev_weight(s: float):
    return lambda xi: (1.0 + np.asarray(xi) ** 2) ** (s / 2.0)


# --------------------------------------------------------------------------
# the oscillatory integral I(t; k)

I_CUTOFF = CutoffFamily(eps0=0.5, N0=10.0)


def I_func(a, t: float, k: int, c: float = 0.5, cutoff: CutoffFamily = I_CUTOFF, density: float = 1.0) -> float:
    """``|| chi_int |sin(c_a xi^2 t)| / (c_a |xi|^k) exp(-c xi^2 t) ||_{L^2(R)}``.

    Plain L2 norm in the frequency variable (no 2pi factor).
    """
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    if t <= 0:
        raise ValueError("t must be positive")
    ca = as_wave_speed(a).c_a
    top = cutoff.eps0
    s = 1.0 / math.sqrt(t)
    # the Gaussian factor is below 1e-300 beyond eta = sqrt(700/c)
    top_eff = min(top, math.sqrt(700.0 / c) * s)
    n = max(64, int(math.ceil(top_eff / min(0.05 * s, top_eff / 64) * density)))
    x, w = gauss_legendre_panels(np.linspace(0.0, top_eff, n + 1), 10)
    z = ca * x * x * t
    # |sin z| / (c_a x^k) written via sinc to stay finite at x -> 0
    sinc = np.sinc(z / np.pi)
    body = sinc * t * x ** (2 - k)
    f = cutoff.chi_int(x) * np.abs(body) * np.exp(-c * x * x * t)
    return float(math.sqrt(2.0 * np.sum(w * f * f)))


def sine_band_minimum(a, t: float, alpha0: float, samples: int = 2001) -> float:
    """Minimum of ``|sin(c_a xi^2 t)|`` on ``[alpha0, 2 alpha0] / sqrt(t)``."""
    ca = as_wave_speed(a).c_a
    if alpha0**2 >= math.pi / (4.0 * ca):
        raise ValueError("alpha0^2 must be below pi / (4 c_a)")
    xi = np.linspace(alpha0, 2 * alpha0, samples) / math.sqrt(t)
    return float(np.min(np.abs(np.sin(ca * xi * xi * t))))


# --------------------------------------------------------------------------
# power-law fits

@dataclass(frozen=True)
class RateReport:
    exponent: float
    stderr: float
    window: tuple
    n_samples: int
    residual_max: float
    prefactor: float = float("nan")

    def within(self, lo: float, hi: float) -> bool:
        return lo <= self.exponent <= hi

    def as_dict(self):
        return {
            "exponent": self.exponent,
            "stderr": self.stderr,
            "window": list(self.window),
            "n_samples": self.n_samples,
            "residual_max": self.residual_max,
            "prefactor": self.prefactor,
        }


def fit_power_law(t, y, window=None, min_samples: int = 8) -> RateReport:
    """Ordinary least squares of ``log y`` on ``log t`` inside ``window``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape:
        raise ValueError("t and y must have the same shape")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t must be strictly increasing")
    if window is None:
        window = (float(t[0]), float(t[-1]))
    sel = (t >= window[0]) & (t <= window[1])
    if sel.sum() < min_samples:
        raise InsufficientSamples(f"need at least {min_samples} samples in window, got {int(sel.sum())}")
    if np.any(y[sel] <= 0) or not np.all(np.isfinite(y[sel])):
        raise NonPositiveSample("all samples must be positive and finite")
    lx = np.log(t[sel])
    ly = np.log(y[sel])
    ly_c = ly - ly.mean()
    res = stats.linregress(lx, ly_c)
    intercept = res.intercept + ly.mean()
    resid = ly - (res.slope * lx + intercept)
    return RateReport(
        exponent=float(res.slope),
        stderr=float(res.stderr),
        window=(float(window[0]), float(window[1])),
        n_samples=int(sel.sum()),
        residual_max=float(np.max(np.abs(resid))),
        prefactor=float(math.exp(intercept)),
    )


def log_times(window=(1e2, 1e4), n: int = 25):
    return np.geomspace(window[0], window[1], n)


# --------------------------------------------------------------------------
# data norms

@dataclass(frozen=True)
class DataNormBundle:
    l2: float
    hdot: dict
    hs: dict
    l1w: dict


def _physical_integral(fn, scale: float):
    r = 40.0 * scale
    pts = list(np.linspace(-r, r, 17))
    val = quad(fn, -r, r, points=pts[1:-1], limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    val += quad(fn, r, np.inf, epsabs=1e-14)[0] + quad(fn, -np.inf, -r, epsabs=1e-14)[0]
    return val


def data_norms(f, hdot_orders=(1, 2), sobolev_orders=(-2, -1, 0, 1, 2), gammas=(0, 1, 2)) -> DataNormBundle:
    """All data norms of a :class:`Generator` by quadrature."""
    f.check_tail(power=max(gammas) + 1)
    if f.is_zero:
        z = 0.0
        return DataNormBundle(z, {k: z for k in hdot_orders}, {s: z for s in sobolev_orders}, {g: z for g in gammas})
    scale = f.support_scale
    l2 = math.sqrt(_physical_integral(lambda x: float(f(x)) ** 2, scale))
    grid = frequency_grid(1.0, xi_max=2.0 * math.sqrt(40.0) / min(f.sigma, getattr(f, "mollifier", f.sigma)) + 10.0,
                          density=2.0)
    fh = f.hat(grid.xi)
    hdot = {k: l2_norm_spectral(fh, grid, homogeneous_weight(k)) for k in hdot_orders}
    hs = {s: l2_norm_spectral(fh, grid, sobolev_weight(s)) for s in sobolev_orders}
    l1w = {g: _physical_integral(lambda x, g=g: (1.0 + abs(x)) ** g * abs(float(f(x))), scale) for g in gammas}
    return DataNormBundle(l2, hdot, hs, l1w)
