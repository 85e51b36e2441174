"""Analytic initial-data generators with closed-form transforms and moments."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .errors import TailDivergence, UnknownGenerator

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Generator:
    """One data function ``f(x)`` from the registry.

    ``gaussian``   A exp(-(x/s)^2)
    ``dgaussian``  A d/dx exp(-(x/s)^2)          (zero mean)
    ``ricker``     A d^2/dx^2 exp(-(x/s)^2)      (zero mean, zero first moment)
    ``box``        A * indicator[-s, s] convolved with a unit-mass Gaussian of width ``mollifier``
    ``zero``       0
    """

    name: str = "zero"
    sigma: float = 1.0
    amplitude: float = 1.0
    mollifier: float = 0.5

    def __post_init__(self):
        if self.name not in GENERATORS:
            raise UnknownGenerator(f"unknown generator {self.name!r}; known: {sorted(GENERATORS)}")
        if not (self.sigma > 0 and self.mollifier > 0):
            raise ValueError("sigma and mollifier must be positive")

    @property
    def is_zero(self) -> bool:
        return self.name == "zero" or self.amplitude == 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        s, A = self.sigma, self.amplitude
        u = x / s
        g = np.exp(-u * u)
        if self.name == "gaussian":
            return A * g
        if self.name == "dgaussian":
            return A * (-2.0 * x / s**2) * g
        if self.name == "ricker":
            return A * (4.0 * x * x / s**4 - 2.0 / s**2) * g
        if self.name == "box":
            m = self.mollifier
            return 0.5 * A * (erf((x + s) / m) - erf((x - s) / m))
        return np.zeros_like(x)

    def hat(self, xi):
        """Fourier transform ``int f(x) exp(-i x xi) dx``."""
        xi = np.asarray(xi, dtype=float)
        s, A = self.sigma, self.amplitude
        g = s * SQRT_PI * np.exp(-(s * xi) ** 2 / 4.0)
        if self.name == "gaussian":
            return (A * g).astype(complex)
        if self.name == "dgaussian":
            return A * 1j * xi * g
        if self.name == "ricker":
            return (-A * xi * xi * g).astype(complex)
        if self.name == "box":
            m = self.mollifier
            return (A * 2.0 * s * np.sinc(s * xi / np.pi) * np.exp(-(m * xi) ** 2 / 4.0)).astype(complex)
        return np.zeros_like(xi, dtype=complex)

    @property
    def P(self) -> float:
        """Zeroth moment ``int f dx``."""
        if self.name == "gaussian":
            return self.amplitude * self.sigma * SQRT_PI
        if self.name == "box":
            return 2.0 * self.amplitude * self.sigma
        return 0.0

    @property
    def Q(self) -> float:
        """First moment ``int x f dx``."""
        if self.name == "dgaussian":
            return -self.amplitude * self.sigma * SQRT_PI
        return 0.0

    @property
    def support_scale(self) -> float:
        return self.sigma + (self.mollifier if self.name == "box" else 0.0)

    def check_tail(self, power: int = 3, tol: float = 1e-12):
        """Certify that ``|x|^power |f(x)|`` is negligible and decreasing far out."""
        if self.is_zero:
            return
        r = 20.0 * self.support_scale
        xs = r * 2.0 ** np.arange(5)
        v = np.abs(xs) ** power * (np.abs(self(xs)) + np.abs(self(-xs)))
        if np.any(np.diff(v) > 0) or v[-1] > tol * max(1.0, abs(self.amplitude)):
            raise TailDivergence(f"{self.name}: x^{power} f(x) does not decay")


GENERATORS = ("gaussian", "dgaussian", "ricker", "box", "zero")

ZERO = Generator("zero")


@dataclass(frozen=True)
class InitialData:
    """The four data functions ``(w0, w1, psi0, psi1)``."""

    w0: Generator = ZERO
    w1: Generator = ZERO
    psi0: Generator = ZERO
    psi1: Generator = ZERO
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def components(self):
        return (self.w0, self.w1, self.psi0, self.psi1)

    def hats(self, xi):
        """Tuple of the four transforms evaluated at ``xi`` (cached per grid)."""
        xi = np.asarray(xi, dtype=float)
        key = (xi.shape, xi.tobytes()) if xi.size < 200_000 else None
        if key is not None and key in self._cache:
            return self._cache[key]
        out = tuple(g.hat(xi) for g in self.components)
        if key is not None:
            if len(self._cache) > 32:
                self._cache.clear()
            self._cache[key] = out
        return out

    def sample(self, x):
        return tuple(g(x) for g in self.components)

    def scaled(self, eps: float) -> "InitialData":
        return InitialData(*(Generator(g.name, g.sigma, g.amplitude * eps, g.mollifier) for g in self.components))

    @property
    def bandwidth(self) -> float:
        """Frequency beyond which every transform is below ~1e-17 relative."""
        widths = [g.sigma for g in self.components if not g.is_zero]
        if any(g.name == "box" for g in self.components if not g.is_zero):
            widths += [g.mollifier for g in self.components if g.name == "box"]
        if not widths:
            return 1.0
        return 2.0 * math.sqrt(40.0) / min(widths)


def generate_data(components: dict) -> InitialData:
    """Build :class:`InitialData` from ``{"w0": {"name": ..., ...}, ...}``."""
    parts = {}
    for key in ("w0", "w1", "psi0", "psi1"):
        g = components.get(key)
        if g is None:
            parts[key] = ZERO
        elif isinstance(g, Generator):
            parts[key] = g
        else:
            parts[key] = Generator(**g)
    unknown = set(components) - set(parts)
    if unknown:
        raise KeyError(f"unknown data components: {sorted(unknown)}")
    return InitialData(**parts)
