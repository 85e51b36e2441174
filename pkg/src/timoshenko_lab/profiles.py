"""Diffusion-plate kernel ``G(t, x)``, data moments and large-time profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ResolutionError, TailDivergence
from .initial_data import Generator, InitialData
from .norms_rates import gauss_legendre_panels
from .spectral_core import as_wave_speed

SERIES_SWITCH = 1e-4
TAIL_DELTA = 1e-10


def ghat(a, t, xi):
    """Diffusion-plate factor ``sin(c_a xi^2 t) / (c_a xi^2) * exp(-xi^2 t / 2)``."""
    ca = as_wave_speed(a).c_a
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    x2 = np.asarray(xi, dtype=float) ** 2
    z = ca * x2 * t
    small = np.abs(z) < SERIES_SWITCH
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.sin(z) / (ca * x2)
    series = t * (1.0 - z * z / 6.0)
    return np.where(small, series, direct) * np.exp(-0.5 * x2 * t)


def default_xi_max(t: float, delta: float = TAIL_DELTA) -> float:
    return max(10.0, 8.0 / math.sqrt(t) * math.sqrt(math.log(1.0 / delta)))


def default_x_grid(a, t: float, xi_eff: float | None = None) -> np.ndarray:
    """Symmetric uniform grid of half-extent ``12 max(1, c_a) sqrt(t)``."""
    ca = as_wave_speed(a).c_a
    half = 12.0 * max(1.0, ca) * math.sqrt(max(t, 1.0))
    if xi_eff is None:
        xi_eff = _effective_cutoff(t, default_xi_max(t))
    dx = math.pi / (2.0 * xi_eff)
    n = int(math.ceil(half / dx))
    return np.linspace(-n * dx, n * dx, 2 * n + 1)


def _effective_cutoff(t: float, xi_max: float) -> float:
    # beyond this exp(-xi^2 t / 2) < 1e-40, so nothing is gained by integrating further
    return min(xi_max, math.sqrt(2.0 * 92.0 / t))


@dataclass(frozen=True)
class ProfileEval:
    """Sampled kernel and profiles on a spatial grid at time ``t``."""

    x: np.ndarray
    t: float
    G: np.ndarray
    dG: np.ndarray
    w_pf: np.ndarray | None = None
    psi_pf: np.ndarray | None = None


def g_tail_fraction(a, t: float, xi_max: float) -> float:
    """Relative L2 mass of ``ghat(t, .)`` beyond ``xi_max``."""
    f = lambda x: float(ghat(a, t, x)) ** 2
    s = 1.0 / math.sqrt(t)
    total = quad(f, 0, 60 * s, limit=400, points=[s, 5 * s])[0]
    if xi_max >= 60 * s:
        return 0.0
    tail = quad(f, xi_max, 60 * s, limit=400)[0]
    return tail / total


def g_kernel(a, t: float, x=None, xi_max: float | None = None, nodes: int = 10) -> ProfileEval:
    """``G(t, x)`` and ``d_x G(t, x)`` by Gauss-Legendre inverse Fourier quadrature.

    ``G = (1/pi) int_0^Xi ghat cos(x xi) dxi`` and
    ``d_x G = -(1/pi) int_0^Xi xi ghat sin(x xi) dxi``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if xi_max is None:
        xi_max = default_xi_max(t)
    if g_tail_fraction(a, t, xi_max) > 1e-8:
        raise ResolutionError(f"xi_max={xi_max} leaves more than 1e-8 of the kernel's L2 mass")
    xi_eff = _effective_cutoff(t, xi_max)
    if x is None:
        x = default_x_grid(a, t, xi_eff)
    x = np.asarray(x, dtype=float)
    if not np.allclose(x, -x[::-1], atol=1e-12 * max(1.0, np.max(np.abs(x)))):
        raise ValueError("spatial grid must be symmetric about 0")
    xmax = float(np.max(np.abs(x)))
    # panel width resolves both cos(x xi) and sin(c_a xi^2 t)
    ca = as_wave_speed(a).c_a
    width = min(0.25 / math.sqrt(t), 2.0 * math.pi / (xmax + 2.0 * ca * t * xi_eff + 1.0))
    n = max(32, int(math.ceil(xi_eff / width)))
    xi, w = gauss_legendre_panels(np.linspace(0.0, xi_eff, n + 1), nodes)
    gh = ghat(a, t, xi)
    G = np.empty_like(x)
    dG = np.empty_like(x)
    for lo in range(0, x.size, 512):
        blk = np.outer(x[lo:lo + 512], xi)
        G[lo:lo + 512] = np.cos(blk) @ (w * gh) / math.pi
        dG[lo:lo + 512] = -np.sin(blk) @ (w * xi * gh) / math.pi
    return ProfileEval(x, float(t), G, dG)


@dataclass(frozen=True)
class Moments:
    P: float
    Q: float
    M2: float
    L11: float


def moments(f, scale: float = 1.0) -> Moments:
    """``P = int f``, ``Q = int x f``, ``M2 = int x^2 |f|``, ``L11 = int (1+|x|) |f|``.

    ``f`` is a :class:`Generator`, a callable, or a sampled pair ``(x, values)``
    on a uniform grid.
    """
    if isinstance(f, tuple):
        x, v = (np.asarray(u, dtype=float) for u in f)
        if np.max(np.abs(v[[0, -1]])) * np.max(np.abs(x)) ** 3 > 1e-10 * max(1.0, np.max(np.abs(v))):
            raise TailDivergence("sampled data does not decay at the grid ends")
        trap = np.trapezoid if hasattr(np, "trapezoid") else np.trapz
        return Moments(
            float(trap(v, x)),
            float(trap(x * v, x)),
            float(trap(x * x * np.abs(v), x)),
            float(trap((1 + np.abs(x)) * np.abs(v), x)),
        )
    if isinstance(f, Generator):
        f.check_tail(power=3)
        if f.is_zero:
            return Moments(0.0, 0.0, 0.0, 0.0)
        scale = f.support_scale
        fn = f
    else:
        fn = f
        far = 40.0 * scale * 2.0 ** np.arange(5)
        tail = far**3 * (np.abs(fn(far)) + np.abs(fn(-far)))
        if np.any(np.diff(tail) > 0) or tail[-1] > 1e-12:
            raise TailDivergence("x^3 f(x) does not decay")

    def integrate(g):
        r = 40.0 * scale
        pts = np.linspace(-r, r, 17)[1:-1]
        v = quad(g, -r, r, points=pts, limit=400, epsabs=1e-13, epsrel=1e-13)[0]
        return v + quad(g, r, np.inf, epsabs=1e-15)[0] + quad(g, -np.inf, -r, epsabs=1e-15)[0]

    val = lambda x: float(fn(x))
    return Moments(
        integrate(val),
        integrate(lambda x: x * val(x)),
        integrate(lambda x: x * x * abs(val(x))),
        integrate(lambda x: (1 + abs(x)) * abs(val(x))),
    )


def profile_moments(data: InitialData, exact: bool = True):
    """``(P_{w1}, Q_{w1}, P_{psi0 + psi1})`` from closed forms or quadrature."""
    if exact:
        return data.w1.P, data.w1.Q, data.psi0.P + data.psi1.P
    mw = moments(data.w1)
    return mw.P, mw.Q, moments(data.psi0).P + moments(data.psi1).P


def profile_hats(a, t, xi, data: InitialData):
    """Fourier transforms of ``w_pf`` and ``psi_pf`` at ``(t, xi)``."""
    P, Q, Ppsi = profile_moments(data)
    g = ghat(a, t, xi)
    ix = 1j * np.asarray(xi, dtype=float)
    return g * (P - ix * Q - ix * Ppsi), ix * g * P


def profile_w(a, t: float, x=None, data: InitialData | None = None, kernel: ProfileEval | None = None) -> ProfileEval:
    """``w_pf = G P_{w1} - d_x G Q_{w1} - d_x G P_{psi0+psi1}`` on a grid."""
    k = kernel if kernel is not None else g_kernel(a, t, x)
    P, Q, Ppsi = profile_moments(data)
    return ProfileEval(k.x, k.t, k.G, k.dG, w_pf=k.G * P - k.dG * Q - k.dG * Ppsi, psi_pf=k.dG * P)


def profile_psi(a, t: float, x=None, data: InitialData | None = None, kernel: ProfileEval | None = None) -> ProfileEval:
    """``psi_pf = d_x G P_{w1}`` on a grid."""
    return profile_w(a, t, x, data, kernel)
