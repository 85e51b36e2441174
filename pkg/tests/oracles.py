"""Independent reference computations used only by the tests."""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm


def quartic_roots(a: float, xi: float) -> np.ndarray:
    """Roots by numpy's general polynomial root finder."""
    x2 = xi * xi
    return np.roots([1.0, 1.0, 1.0 + (1.0 + a * a) * x2, x2, a * a * x2 * x2])


def system_matrix(a: float, xi: float) -> np.ndarray:
    """First-order form of the Fourier-space system, written out independently."""
    return np.array(
        [
            [0, 1, 0, 0],
            [-xi * xi, 0, -1j * xi, 0],
            [0, 0, 0, 1],
            [1j * xi, 0, -(a * a) * xi * xi - 1, -1],
        ],
        dtype=complex,
    )


def propagate(a: float, xi: float, t: float, v0) -> np.ndarray:
    return expm(system_matrix(a, xi) * t) @ np.asarray(v0, dtype=complex)


def ghat_mp(a: float, t: float, xi: float, dps: int = 40) -> float:
    """High-precision evaluation of the diffusion-plate factor."""
    with mp.workdps(dps):
        ca = mp.sqrt(4 * mp.mpf(a) ** 2 - 1) / 2
        x2 = mp.mpf(xi) ** 2
        if x2 == 0:
            return float(t)
        return float(mp.sin(ca * x2 * t) / (ca * x2) * mp.exp(-x2 * t / 2))


def physical_l2(f, lo: float, hi: float) -> float:
    return math.sqrt(quad(lambda x: f(x) ** 2, lo, hi, limit=400, epsabs=1e-14)[0])


def gaussian_l2(sigma: float = 1.0) -> float:
    """||exp(-(x/sigma)^2)||_{L^2} = (pi/2)^{1/4} sqrt(sigma)."""
    return (math.pi / 2.0) ** 0.25 * math.sqrt(sigma)
