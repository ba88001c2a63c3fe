"""Oscillatory integrals and the surface-measure Fourier transform.

Two integral families live here:

    I_N(delta, eta) = integral over [0, N] of e(delta x^k + eta x) dx,

and the Fourier transform of the density cut out on {x in [0,1]^n :
x_1^k + ... + x_n^k = lam0} by the coordinate cube,

    ds(eta) = integral over R of { prod_j I_1(theta, eta_j) } e(-lam0 theta) dtheta.

Quadrature is panel Gauss-Legendre with panel widths chosen so each panel
sees O(1) oscillations; degree-2 inner integrals use an exact Fresnel form
and zero-linear-frequency inner integrals use an asymptotic series, which
keeps the theta-truncation radius affordable.
"""

from dataclasses import dataclass
from math import ceil, gamma, pi
from typing import NamedTuple

import numpy as np
from scipy.special import fresnel

from .errors import InputError, NumericError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)

_FRESNEL_MIN_THETA = 0.75  # below this the quadratic closed form loses digits
_SERIES_MIN_THETA = 8.0  # asymptotic series cutoff for the eta = 0 inner integral
_SERIES_TERMS = 12


@dataclass(frozen=True)
class OscQuery:
    """Arguments of I_N(delta, eta) at degree k."""

    delta: float
    eta: float
    k: int
    N: float

    def __post_init__(self):
        if self.N <= 0:
            raise InputError("integration length N must be positive")
        if self.k < 2:
            raise InputError("degree k must be >= 2")


@dataclass(frozen=True)
class SurfaceQuery:
    """Arguments of the surface transform: dimension, degree, level, frequencies.

    Requires n >= k; the theta-tail is absolutely integrable only for
    n > k, and on the boundary n = k the value is recovered through the
    oscillatory cancellation of the e(-lam0 theta) factor.
    """

    n: int
    k: int
    lam0: float
    eta: tuple

    def __post_init__(self):
        if self.k < 2 or self.n < 2:
            raise InputError("need n >= 2 and k >= 2")
        if self.n < self.k:
            raise InputError("need n >= k for a convergent frequency integral")
        if not 0 < self.lam0 < self.n:
            raise InputError("level lam0 must lie in (0, n)")
        if len(self.eta) != self.n:
            raise InputError("frequency vector must have length n")


class OscResult(NamedTuple):
    value: complex
    error: float


class SurfaceResult(NamedTuple):
    value: complex
    quad_error: float
    tail_estimate: float
    tail_warning: bool
    theta_max: float


def _osc_phase_exp(phase: np.ndarray) -> np.ndarray:
    """e(phase) with the phase reduced mod 1 before exponentiation."""
    return np.exp(2j * np.pi * (phase - np.rint(phase)))


def _gl_value(delta: float, eta: float, k: int, N: float, panels: int) -> complex:
    edges = np.linspace(0.0, N, panels + 1)
    h = 0.5 * (edges[1] - edges[0])
    centers = 0.5 * (edges[:-1] + edges[1:])
    x = centers[:, None] + h * _GL_X[None, :]
    vals = _osc_phase_exp(delta * x**k + eta * x)
    return complex((vals * _GL_W[None, :]).sum() * h)


def osc_integral(query: OscQuery, tol: float = None) -> OscResult:
    """I_N(delta, eta) by adaptive panel Gauss-Legendre.

    The default absolute tolerance is 1e-8 * N.  The reported error is the
    difference between the two finest refinement levels.
    """
    delta, eta, k, N = query.delta, query.eta, query.k, query.N
    if tol is None:
        tol = 1e-8 * N
    cycles = abs(delta) * N**k + abs(eta) * N
    panels = max(8, int(ceil(cycles)) + 8)
    budget = 2_000_000  # total integrand evaluations
    prev = _gl_value(delta, eta, k, N, panels)
    used = 16 * panels
    while True:
        panels *= 2
        cur = _gl_value(delta, eta, k, N, panels)
        used += 16 * panels
        err = abs(cur - prev)
        if err <= tol:
            return OscResult(cur, err)
        if used > budget:
            raise NumericError(
                f"oscillatory integral did not reach tolerance {tol:.3e}; achieved {err:.3e}"
            )
        prev = cur


def _i1_fresnel(thetas: np.ndarray, eta: float) -> np.ndarray:
    """Exact I_1(theta, eta) for k = 2 via Fresnel integrals (theta != 0)."""
    th = np.asarray(thetas, dtype=float)
    sign = np.sign(th)
    mag = np.abs(th)
    scale = 2.0 * np.sqrt(mag)
    c = eta / (2.0 * th)
    s1, c1 = fresnel(scale * (1.0 + c))
    s0, c0 = fresnel(scale * c)
    f_upper = c1 + 1j * sign * s1
    f_lower = c0 + 1j * sign * s0
    prefactor = _osc_phase_exp(-(eta * eta) / (4.0 * th))
    return prefactor * (f_upper - f_lower) / scale


def _i1_series_eta0(thetas: np.ndarray, k: int) -> np.ndarray:
    """I_1(theta, 0) for |theta| >= _SERIES_MIN_THETA, any degree.

    Substituting u = x^k gives (1/k) * integral of u^(1/k - 1) e(theta u)
    over [0, 1]; the half-line piece is an exact gamma value and the
    remainder integral over [1, infinity) expands into an integration-by-
    parts series whose terms fall off like (2 pi |theta|)^-j.
    """
    th = np.asarray(thetas, dtype=float)
    lead = (
        gamma(1.0 / k)
        * (2.0 * pi * np.abs(th)) ** (-1.0 / k)
        * np.exp(1j * np.sign(th) * pi / (2.0 * k))
    )
    s = 1.0 - 1.0 / k
    denom = 2j * pi * th
    tail = np.zeros_like(th, dtype=complex)
    coeff = 1.0
    power = denom.copy()
    for j in range(_SERIES_TERMS):
        tail += -coeff / power
        coeff *= s + j
        power *= denom
    tail *= _osc_phase_exp(th)
    return (lead - tail) / k


def _i1_adaptive(thetas: np.ndarray, eta: float, k: int, oversample: int) -> np.ndarray:
    """Panel Gauss-Legendre for I_1(theta, eta), vectorized over theta."""
    th = np.asarray(thetas, dtype=float)
    if len(th) == 0:
        return np.zeros(0, dtype=complex)
    panels = (max(6, int(ceil(np.abs(th).max() + abs(eta))) + 6)) * oversample
    edges = np.linspace(0.0, 1.0, panels + 1)
    h = 0.5 * (edges[1] - edges[0])
    x = (0.5 * (edges[:-1] + edges[1:]))[:, None] + h * _GL_X[None, :]
    x = x.ravel()
    w = np.tile(_GL_W, panels) * h
    out = np.empty(len(th), dtype=complex)
    # chunked so the (theta, node) phase matrix stays small
    chunk = max(1, int(4_000_000 // max(len(x), 1)))
    xk = x**k
    for lo in range(0, len(th), chunk):
        tt = th[lo : lo + chunk]
        phase = tt[:, None] * xk[None, :] + eta * x[None, :]
        out[lo : lo + chunk] = _osc_phase_exp(phase) @ w
    return out


def _i1_batch(thetas: np.ndarray, eta: float, k: int, oversample: int = 1) -> np.ndarray:
    """I_1(theta, eta) for an array of thetas, picking the cheapest route."""
    th = np.asarray(thetas, dtype=float)
    out = np.empty(len(th), dtype=complex)
    if k == 2:
        closed = np.abs(th) >= _FRESNEL_MIN_THETA
        out[closed] = _i1_fresnel(th[closed], eta)
        out[~closed] = _i1_adaptive(th[~closed], eta, k, oversample)
    elif eta == 0.0:
        closed = np.abs(th) >= _SERIES_MIN_THETA
        out[closed] = _i1_series_eta0(th[closed], k)
        out[~closed] = _i1_adaptive(th[~closed], eta, k, oversample)
    else:
        out[:] = _i1_adaptive(th, eta, k, oversample)
    return out


def _inner_cost(query: SurfaceQuery, hi: float) -> float:
    """Rough inner-node count per outer node for a shell reaching |theta| = hi."""
    if query.k == 2:
        return 16.0 * query.n
    per_coord = []
    for eta_j in query.eta:
        if eta_j == 0.0:
            per_coord.append(16.0)
        else:
            per_coord.append(16.0 * (hi + abs(eta_j) + 12.0))
    return float(sum(per_coord))


def _shell_value(
    lo: float,
    hi: float,
    sign: int,
    query: SurfaceQuery,
    width: float,
    oversample: int,
    c_track: list,
) -> complex:
    """Shell integral over sign * [lo, hi], evaluated as integral of F(sign*u) du."""
    panels = max(2, int(ceil((hi - lo) / (width / oversample))))
    edges = np.linspace(lo, hi, panels + 1)
    h = 0.5 * (edges[1] - edges[0])
    th = sign * ((0.5 * (edges[:-1] + edges[1:]))[:, None] + h * _GL_X[None, :]).ravel()
    prod = np.ones(len(th), dtype=complex)
    for eta_j in query.eta:
        vals = _i1_batch(th, float(eta_j), query.k, oversample)
        prod *= vals
        c_track.append(float((np.abs(vals) * (1.0 + np.abs(th)) ** (1.0 / query.k)).max()))
    prod *= _osc_phase_exp(-query.lam0 * th)
    w = np.tile(_GL_W, panels) * h
    return complex(prod @ w)


def surface_transform(
    query: SurfaceQuery,
    rel_tol: float = 1e-6,
    abs_tol: float = 0.0,
    max_shells: int = 16,
    work_budget: float = 40_000_000,
) -> SurfaceResult:
    """Truncated frequency integral for the surface transform, with tail report.

    Integration proceeds over geometric shells in |theta| until consecutive
    shells fall below the tolerance, the shell cap is reached, or the work
    budget runs out.  When the trailing shells form a stable geometric
    sequence (the slowly decaying case, caused by inner endpoint phases
    resonating with e(-lam0 theta)), the geometric continuation is summed
    in closed form and added.  The tail estimate combines that model with
    the absolute bound from |I_1| <= C (1 + |theta|)^(-1/k) decay (finite
    only for n > k); a warning flag marks tails above 1e-4 of the value.
    """
    density = query.lam0 + query.n + 0.5  # max cycles of the integrand per unit theta
    width = 0.5 / density
    total = 0j
    quad_err = 0.0
    shells: list[complex] = []
    c_track: list[float] = []
    work = 0.0
    theta_hi = 0.0

    edges = [0.0, 1.0]
    while len(edges) <= max_shells:
        edges.append(edges[-1] * 1.6)

    for i in range(len(edges) - 1):
        lo, hi = edges[i], edges[i + 1]
        outer_nodes = 16.0 * ceil((hi - lo) / width) * 6  # both signs, both resolutions
        estimated = outer_nodes * _inner_cost(query, hi) / 16.0
        if i >= 1 and work + estimated > work_budget:
            break
        shell = 0j
        shell_err = 0.0
        for sign in (1, -1):
            coarse = _shell_value(lo, hi, sign, query, width, 1, c_track)
            fine = _shell_value(lo, hi, sign, query, width, 2, c_track)
            shell += fine
            shell_err += abs(fine - coarse)
        work += estimated
        total += shell
        quad_err += shell_err
        shells.append(shell)
        theta_hi = hi
        tol = max(rel_tol * abs(total), abs_tol)
        if i >= 3 and abs(shells[-1]) + abs(shells[-2]) <= 0.5 * tol:
            break

    correction = _geometric_correction(shells)
    mags = [abs(s) for s in shells]
    ratios = [
        mags[i] / mags[i - 1] for i in range(max(1, len(mags) - 3), len(mags)) if mags[i - 1] > 0
    ]
    rho = min(0.95, max(ratios)) if ratios else 0.5
    tail_raw = mags[-1] * rho / (1.0 - rho) if mags else 0.0
    if correction != 0:
        total += correction
        tail = 0.5 * abs(correction) + 2.0 * quad_err
    else:
        tail = tail_raw
    if query.n > query.k:
        c_emp = max(c_track) if c_track else 1.0
        nk = query.n / query.k
        tail_abs = 2.0 * c_emp**query.n * (1.0 + theta_hi) ** (1.0 - nk) / (nk - 1.0)
        tail = min(tail, tail_abs)
    warning = tail > 1e-4 * max(abs(total), 1e-300)
    return SurfaceResult(
        value=total,
        quad_error=quad_err,
        tail_estimate=tail,
        tail_warning=bool(warning),
        theta_max=theta_hi,
    )


def _geometric_correction(shells: list) -> complex:
    """Closed-form sum of the geometric continuation of the shell sequence.

    Uses the mean of the last three complex shell ratios; returns 0 when
    the ratios are too large or too scattered for the model to apply.
    """
    if len(shells) < 5:
        return 0j
    tail = shells[-4:]
    if any(abs(v) == 0 for v in tail[:-1]):
        return 0j
    ratios = [tail[i + 1] / tail[i] for i in range(3)]
    mean = sum(ratios) / 3
    if abs(mean) > 0.9:
        return 0j
    spread = max(abs(r - mean) for r in ratios)
    if spread > 0.5 * abs(mean):
        return 0j
    return tail[-1] * mean / (1.0 - mean)


def singular_integral(n: int, k: int, lam0: float) -> float:
    """Total mass of the level-lam0 surface density: the transform at zero frequency.

    The imaginary part must vanish; it is checked against 1e-6 before
    being discarded.
    """
    res = surface_transform(SurfaceQuery(n=n, k=k, lam0=lam0, eta=(0.0,) * n))
    if abs(res.value.imag) >= 1e-6:
        raise NumericError(
            f"zero-frequency transform has imaginary part {res.value.imag:.3e}"
        )
    return float(res.value.real)
