"""Exact per-frequency solution of the linear dissipative Timoshenko system.

Both unknowns ``w`` and ``psi`` solve, after a partial Fourier transform in
``x``, the same scalar fourth-order ODE in time

    u'''' + u''' + [1 + (1 + a^2) xi^2] u'' + xi^2 u' + a^2 xi^4 u = 0

and differ only through their induced initial data.  The solution is written
with the four characteristic roots (two conjugate pairs) and the Cramer rule
on the Vandermonde system, using expanded determinant formulas that keep the
small-frequency cancellations explicit.

Fourier convention used throughout the package::

    f_hat(xi) = int f(x) exp(-i x xi) dx,   f(x) = (1/2pi) int f_hat exp(i x xi) dxi
"""
from __future__ import annotations

import math
import warnings
from itertools import combinations
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ConditioningWarning,
    DegenerateRoots,
    InvalidWaveSpeed,
    StepSizeUnderflow,
    ZoneViolation,
)

EPS0 = 0.1
N0 = 10.0
GAP_REL = 1e-8
COND_TOL = 1e-14

# e^{2 pi i / 3}: the nonzero roots of lambda^2 + lambda + 1 at xi = 0
_MU = complex(-0.5, math.sqrt(3.0) / 2.0)


@dataclass(frozen=True)
class WaveSpeed:
    a: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0.5):
            raise InvalidWaveSpeed(f"a must exceed 1/2 (got {self.a!r})")

    @property
    def c_a(self) -> float:
        return math.sqrt(4.0 * self.a * self.a - 1.0) / 2.0


def as_wave_speed(a) -> WaveSpeed:
    return a if isinstance(a, WaveSpeed) else WaveSpeed(float(a))


def zone_of(xi, eps0: float = EPS0, n0: float = N0):
    """Label frequencies as ``interior``, ``bounded`` or ``exterior``."""
    ax = np.abs(np.asarray(xi, dtype=float))
    z = np.where(ax <= eps0, "interior", np.where(ax >= n0, "exterior", "bounded"))
    return str(z) if z.ndim == 0 else z


@dataclass(frozen=True)
class RootQuartet:
    """Characteristic roots at one or many frequencies.

    The roots are ``lam_R1 +- i lam_I1`` (pair 1, the oscillator pair that
    tends to ``(-1 +- sqrt(3) i)/2`` as ``xi -> 0``) and ``lam_R2 +- i lam_I2``
    (pair 2, the diffusion-plate pair of size ``O(xi^2)``).  Imaginary parts
    are stored non-negative.  All fields broadcast against ``xi``.
    """

    lam_R1: np.ndarray
    lam_I1: np.ndarray
    lam_R2: np.ndarray
    lam_I2: np.ndarray
    xi: np.ndarray
    a: float
    zone: object = None

    def roots(self) -> np.ndarray:
        """Array of shape ``(4, *xi.shape)`` holding lambda_1..lambda_4."""
        l1 = self.lam_R1 + 1j * self.lam_I1
        l3 = self.lam_R2 + 1j * self.lam_I2
        return np.stack([l1, np.conj(l1), l3, np.conj(l3)])

    def min_gap(self) -> np.ndarray:
        r = self.roots()
        gaps = [np.abs(r[i] - r[j]) for i in range(4) for j in range(i + 1, 4)]
        return np.min(np.stack(gaps), axis=0)

    def max_real_part(self) -> np.ndarray:
        return np.maximum(self.lam_R1, self.lam_R2)


def quartic_coefficients(a, xi):
    """Coefficients ``(1, 1, c2, c1, c0)`` of the characteristic quartic."""
    a = as_wave_speed(a).a
    x2 = np.asarray(xi, dtype=float) ** 2
    one = np.ones_like(x2)
    return one, one, 1.0 + (1.0 + a * a) * x2, x2, a * a * x2 * x2


def quartic_residual(a, xi, lam):
    _, _, c2, c1, c0 = quartic_coefficients(a, xi)
    return (((lam + 1.0) * lam + c2) * lam + c1) * lam + c0


def vieta_errors(q: "RootQuartet") -> np.ndarray:
    """Relative errors of the four Vieta identities, shape ``(4, ...)``.

    Each elementary symmetric function is compared with its coefficient and
    normalised by the same function of ``|lambda_j|``.
    """
    lam = q.roots()
    mag = np.abs(lam)
    _, c3, c2, c1, c0 = quartic_coefficients(q.a, q.xi)
    targets = (-c3, c2, -c1, c0)
    out = []
    for k, target in enumerate(targets, start=1):
        e = _elementary(lam, k)
        out.append(np.abs(e - target) / np.maximum(_elementary(mag, k), np.finfo(float).tiny))
    return np.stack(out)


def _elementary(v, k):
    return sum(np.prod([v[i] for i in idx], axis=0) for idx in combinations(range(4), k))


def quartic_discriminant(a, xi):
    """Discriminant of the characteristic quartic from its coefficients."""
    A, B, C, D, E = quartic_coefficients(a, xi)
    return (
        256 * A**3 * E**3 - 192 * A**2 * B * D * E**2 - 128 * A**2 * C**2 * E**2
        + 144 * A**2 * C * D**2 * E - 27 * A**2 * D**4 + 144 * A * B**2 * C * E**2
        - 6 * A * B**2 * D**2 * E - 80 * A * B * C**2 * D * E + 18 * A * B * C * D**3
        + 16 * A * C**4 * E - 4 * A * C**3 * D**2 - 27 * B**4 * E**2
        + 18 * B**3 * C * D * E - 4 * B**3 * D**3 - 4 * B**2 * C**3 * E
        + B**2 * C**2 * D**2
    )


def gap_tolerance(xi):
    return GAP_REL * (1.0 + np.abs(np.asarray(xi, dtype=float)))


def _check_gap(q: RootQuartet):
    xi = np.asarray(q.xi, dtype=float)
    bad = (np.asarray(q.min_gap()) < gap_tolerance(xi)) & (xi != 0.0)
    if np.any(bad):
        where = np.asarray(xi)[bad].ravel()[:3]
        raise DegenerateRoots(
            f"characteristic roots closer than gap_tol at xi={where.tolist()}; "
            "perturb the frequency"
        )


def solve_quartic(a, xi, *, check_gap: bool = True) -> RootQuartet:
    """Roots of the characteristic quartic via companion-matrix eigenvalues.

    Each root gets one Newton polish step, conjugate partners are averaged so
    the pairs are exactly conjugate, and pair 1 is the upper root with the
    larger imaginary part (this coincides with continuation from ``xi = 0``,
    see :func:`track_roots`).  ``xi = 0`` is returned exactly as
    ``{0, 0, (-1 +- sqrt(3) i)/2}`` and is exempt from the gap check, since
    the solution formulas treat it with a dedicated closed form.
    """
    ws = as_wave_speed(a)
    xi_arr = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi_arr)):
        raise ValueError("xi must be finite")
    flat = np.abs(xi_arr.ravel())
    _, _, c2, c1, c0 = quartic_coefficients(ws, flat)

    comp = np.zeros((flat.size, 4, 4))
    comp[:, 0, 0] = -1.0
    comp[:, 0, 1] = -c2
    comp[:, 0, 2] = -c1
    comp[:, 0, 3] = -c0
    comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
    lam = np.linalg.eigvals(comp)

    # one Newton polish step
    p = (((lam + 1.0) * lam + c2[:, None]) * lam + c1[:, None]) * lam + c0[:, None]
    dp = ((4.0 * lam + 3.0) * lam + 2.0 * c2[:, None]) * lam + c1[:, None]
    safe = np.abs(dp) > 0
    lam = np.where(safe, lam - p / np.where(safe, dp, 1.0), lam)

    order = np.argsort(lam.imag, axis=1)
    lam = np.take_along_axis(lam, order, axis=1)
    upper1, upper2 = lam[:, 3], lam[:, 2]
    lower1, lower2 = lam[:, 0], lam[:, 1]
    l1 = 0.5 * (upper1 + np.conj(lower1))
    l3 = 0.5 * (upper2 + np.conj(lower2))

    zero = flat == 0.0
    l1 = np.where(zero, _MU, l1)
    l3 = np.where(zero, 0.0, l3)

    shape = xi_arr.shape
    q = RootQuartet(
        lam_R1=l1.real.reshape(shape),
        lam_I1=np.abs(l1.imag).reshape(shape),
        lam_R2=l3.real.reshape(shape),
        lam_I2=np.abs(l3.imag).reshape(shape),
        xi=xi_arr,
        a=ws.a,
        zone=zone_of(xi_arr),
    )
    if check_gap:
        _check_gap(q)
    return q


def track_roots(a, xi_sweep) -> RootQuartet:
    """Label root pairs by continuation along an increasing ``|xi|`` sweep.

    The sweep is seeded with the small-frequency expansion and each step
    matches the two upper-half roots to their predecessors by minimal total
    displacement.  Used to validate the imaginary-part labeling of
    :func:`solve_quartic`.
    """
    ws = as_wave_speed(a)
    xs = np.abs(np.asarray(xi_sweep, dtype=float))
    if np.any(np.diff(xs) <= 0) or xs[0] <= 0 or xs[0] > EPS0:
        raise ValueError("sweep must be strictly increasing and start in (0, eps0]")
    seed = expand_roots_small(ws, xs[0]).roots()
    prev = (complex(seed[0]), complex(seed[2]))
    out1 = np.empty(xs.size, complex)
    out2 = np.empty(xs.size, complex)
    for n, x in enumerate(xs):
        r = np.roots([1.0, 1.0, 1.0 + (1.0 + ws.a**2) * x * x, x * x, ws.a**2 * x**4])
        up = sorted(r, key=lambda z: -z.imag)[:2]
        direct = abs(up[0] - prev[0]) + abs(up[1] - prev[1])
        swapped = abs(up[1] - prev[0]) + abs(up[0] - prev[1])
        if swapped < direct:
            up = up[::-1]
        prev = (up[0], up[1])
        out1[n], out2[n] = up
    return RootQuartet(out1.real, out1.imag, out2.real, out2.imag, xs, ws.a, zone_of(xs))


def expand_roots_small(a, xi, eps0: float = EPS0) -> RootQuartet:
    """Truncated small-frequency series of the characteristic roots."""
    ws = as_wave_speed(a)
    x = np.asarray(xi, dtype=float)
    if np.any(np.abs(x) > eps0):
        raise ZoneViolation(f"|xi| must not exceed eps0={eps0}")
    a2 = ws.a**2
    x2 = x * x
    s3 = math.sqrt(3.0)
    r1 = -0.5 + 0.5 * x2
    i1 = s3 / 2.0 + (1.0 + 2.0 * a2) / (2.0 * s3) * x2
    r2 = -0.5 * x2 + a2 * x2 * x2
    i2 = ws.c_a * x2 - a2 * (a2 - 1.0) / math.sqrt(4.0 * a2 - 1.0) * x2 * x2
    return RootQuartet(r1, i1, r2, np.abs(i2), x, ws.a, zone_of(x, eps0))


def expand_roots_large(a, xi, n0: float = N0) -> RootQuartet:
    """Leading large-frequency expansions of the characteristic roots.

    Pairs are labeled like :func:`solve_quartic` (pair 1 has the larger
    imaginary part), which for ``a > 1`` puts the ``+- i a|xi| - 1/2`` branch
    first and for ``a < 1`` the ``+- i|xi|`` branch first.
    """
    ws = as_wave_speed(a)
    x = np.abs(np.asarray(xi, dtype=float))
    if np.any(x < n0):
        raise ZoneViolation(f"|xi| must be at least N0={n0}")
    s3 = math.sqrt(3.0)
    if ws.a == 1.0:
        return RootQuartet(
            -0.25 + 0 * x, x + s3 / 4.0, -0.25 + 0 * x, x - s3 / 4.0, x, ws.a, zone_of(x, n0=n0)
        )
    d = 1.0 - ws.a**2
    slow_r = -1.0 / (2.0 * d * d) / (x * x)
    slow_i = x + 1.0 / (2.0 * d) / x
    fast_r = -0.5 + 0 * x
    fast_i = ws.a * x
    if ws.a > 1.0:
        return RootQuartet(fast_r, fast_i, slow_r, slow_i, x, ws.a, zone_of(x, n0=n0))
    return RootQuartet(slow_r, slow_i, fast_r, fast_i, x, ws.a, zone_of(x, n0=n0))


@dataclass(frozen=True)
class InducedData:
    """Fourier data ``(u0, u1, u2, u3)`` of the scalar fourth-order problem."""

    u0: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    u3: np.ndarray
    branch: str = "w"

    def as_tuple(self):
        return (self.u0, self.u1, self.u2, self.u3)


def initial_data_transform(
    branch: Literal["w", "psi"], data_hat, a, xi
) -> InducedData:
    """Induced data for ``w`` or ``psi`` from ``(w0, w1, psi0, psi1)`` hats."""
    ws = as_wave_speed(a)
    w0, w1, p0, p1 = (np.asarray(d, dtype=complex) for d in data_hat)
    x = np.asarray(xi, dtype=float)
    ix = 1j * x
    x2 = x * x
    if branch == "w":
        return InducedData(w0 + 0 * x, w1 + 0 * x, -x2 * w0 - ix * p0, -x2 * w1 - ix * p1, "w")
    if branch == "psi":
        k = 1.0 + ws.a**2 * x2
        return InducedData(
            p0 + 0 * x,
            p1 + 0 * x,
            -k * p0 - p1 + ix * w0,
            k * p0 - ws.a**2 * x2 * p1 - ix * w0 + ix * w1,
            "psi",
        )
    raise ValueError(f"branch must be 'w' or 'psi', not {branch!r}")


def vandermonde_determinants(roots: RootQuartet, induced: InducedData):
    """``det(V)`` and ``det(V_1..V_4)`` from the expanded closed forms."""
    R1, I1, R2, I2 = roots.lam_R1, roots.lam_I1, roots.lam_R2, roots.lam_I2
    l1 = R1 + 1j * I1
    l2 = R1 - 1j * I1
    l3 = R2 + 1j * I2
    l4 = R2 - 1j * I2
    u0, u1, u2, u3 = induced.as_tuple()
    m1 = R1 * R1 + I1 * I1
    m2 = R2 * R2 + I2 * I2

    det_v = -4.0 * I1 * I2 * ((R2 - R1) ** 2 + (I2 + I1) ** 2) * ((R2 - R1) ** 2 + (I2 - I1) ** 2)

    def col_pair1(lj, sign):
        # det(V_1) with lj = lambda_2 (sign +1) and det(V_2) with lj = lambda_1 (sign -1)
        return sign * (
            -2j * lj * I2 * m2 * ((R2 - lj) ** 2 + I2 * I2) * u0
            + (2j * I2 * m2 * m2 + lj**2 * l4**2 * (l4 - lj) - lj**2 * l3**2 * (l3 - lj)) * u1
            + (-4j * R2 * I2 * m2 - lj * l4 * (l4**2 - lj**2) + lj * l3 * (l3**2 - lj**2)) * u2
            + 2j * I2 * ((R2 - lj) ** 2 + I2 * I2) * u3
        )

    def col_pair2(lj, sign):
        # det(V_3) with lj = lambda_4 (sign +1) and det(V_4) with lj = lambda_3 (sign -1)
        return sign * (
            -2j * lj * I1 * m1 * ((R1 - lj) ** 2 + I1 * I1) * u0
            + (2j * I1 * m1 * m1 + l1**2 * lj**2 * (lj - l1) - l2**2 * lj**2 * (lj - l2)) * u1
            + (-4j * R1 * I1 * m1 - l1 * lj * (lj**2 - l1**2) + l2 * lj * (lj**2 - l2**2)) * u2
            + 2j * I1 * ((R1 - lj) ** 2 + I1 * I1) * u3
        )

    return det_v, (col_pair1(l2, 1.0), col_pair1(l1, -1.0), col_pair2(l4, 1.0), col_pair2(l3, -1.0))


def _zero_mode(induced: InducedData, t, order: int):
    """Closed form at ``xi = 0`` where the quartic is ``lam^2 (lam^2 + lam + 1)``."""
    u0, u1, u2, u3 = induced.as_tuple()
    mu, mub = _MU, _MU.conjugate()
    c2 = (u2 - mu * u3) / (mub - mu)
    c3 = u3 - c2
    c1 = u1 - mu * c2 - mub * c3
    c0 = u0 - c2 - c3
    osc = c2 * mu**order * np.exp(mu * t) + c3 * mub**order * np.exp(mub * t)
    if order == 0:
        return c0 + c1 * t + osc
    if order == 1:
        return c1 + osc
    return osc


def eval_fourier_solution(
    roots: RootQuartet,
    induced: InducedData,
    t,
    order: int = 0,
    *,
    check_gap: bool = True,
):
    """Evaluate ``d_t^order u_hat(t, xi)`` from the root representation.

    ``t`` broadcasts against the frequency arrays.  Frequencies equal to zero
    use the closed form of the degenerate double root.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0..3")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    if check_gap:
        _check_gap(roots)
    xi = np.asarray(roots.xi, dtype=float)
    zero = xi == 0.0

    with np.errstate(invalid="ignore", divide="ignore"):
        det_v, (d11, d12, d21, d22) = vandermonde_determinants(roots, induced)
        scale = np.maximum.reduce([np.abs(d11), np.abs(d12), np.abs(d21), np.abs(d22)])
        ill = (np.abs(det_v) < COND_TOL * scale) & ~zero
        if np.any(ill):
            warnings.warn(
                "Vandermonde determinant is small relative to its numerators",
                ConditioningWarning,
                stacklevel=2,
            )
        inv = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, det_v))

        if order == 0:
            out = 0.0
            for R, I, da, db in ((roots.lam_R1, roots.lam_I1, d11, d12), (roots.lam_R2, roots.lam_I2, d21, d22)):
                out = out + np.exp(R * t) * (
                    np.cos(I * t) * (da + db) * inv + 1j * np.sin(I * t) * (da - db) * inv
                )
        else:
            lam = roots.roots()
            out = 0.0
            for j, dj in enumerate((d11, d12, d21, d22)):
                out = out + dj * inv * lam[j] ** order * np.exp(lam[j] * t)

    if np.any(zero):
        z = _zero_mode(induced, t, order)
        out = np.where(zero, z, out)
    return out


def fundamental_solutions(roots: RootQuartet, t, order: int = 0):
    """Solutions for unit data ``e_k``; returns shape ``(4, *broadcast)``."""
    xi = np.asarray(roots.xi, dtype=float)
    one = np.ones_like(xi, dtype=complex)
    nil = np.zeros_like(xi, dtype=complex)
    out = []
    for k in range(4):
        data = [nil] * 4
        data[k] = one
        out.append(eval_fourier_solution(roots, InducedData(*data), t, order))
    return np.stack(out)


def ode_oracle(induced: InducedData, a, xi: float, t: float, rtol: float = 1e-10, order: int = 0):
    """Integrate the fourth-order ODE numerically as a first-order system.

    Independent ground truth for :func:`eval_fourier_solution` (DOP853 with
    complex state).  Returns ``d_t^order u_hat(t)``.
    """
    if not 1e-12 <= rtol <= 1e-4:
        raise ValueError("rtol must lie in [1e-12, 1e-4]")
    ws = as_wave_speed(a)
    xi = float(xi)
    y0 = np.array([complex(np.asarray(v)) for v in induced.as_tuple()])
    if t == 0 or not np.any(y0):
        return complex(y0[order]) if t == 0 else 0j
    x2 = xi * xi
    c2 = 1.0 + (1.0 + ws.a**2) * x2
    c0 = ws.a**2 * x2 * x2

    def rhs(_, y):
        return [y[1], y[2], y[3], -y[3] - c2 * y[2] - x2 * y[1] - c0 * y[0]]

    atol = rtol * 1e-3 * max(1.0, float(np.max(np.abs(y0))))
    sol = solve_ivp(rhs, (0.0, float(t)), y0, method="DOP853", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StepSizeUnderflow(sol.message)
    return complex(sol.y[order, -1])


@dataclass(frozen=True)
class SpectralState:
    """``(w_hat, dt_w_hat, psi_hat, dt_psi_hat)`` at time ``t``."""

    w_hat: np.ndarray
    dt_w_hat: np.ndarray
    psi_hat: np.ndarray
    dt_psi_hat: np.ndarray
    t: float
    xi: np.ndarray


def solve_linear(a, xi, data_hat, t, roots: RootQuartet | None = None) -> SpectralState:
    """Full linear state at ``(t, xi)`` for data hats ``(w0, w1, psi0, psi1)``."""
    ws = as_wave_speed(a)
    q = roots if roots is not None else solve_quartic(ws, xi)
    iw = initial_data_transform("w", data_hat, ws, q.xi)
    ip = initial_data_transform("psi", data_hat, ws, q.xi)
    return SpectralState(
        eval_fourier_solution(q, iw, t, 0, check_gap=False),
        eval_fourier_solution(q, iw, t, 1, check_gap=False),
        eval_fourier_solution(q, ip, t, 0, check_gap=False),
        eval_fourier_solution(q, ip, t, 1, check_gap=False),
        float(np.max(t)) if np.ndim(t) else float(t),
        np.asarray(q.xi),
    )
