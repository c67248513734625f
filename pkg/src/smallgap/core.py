"""Shared numerical kernels for the small-gap Couette-Taylor lab.

Everything here is deliberately boring: an embedded Runge-Kutta 4(5)
initial-value integrator that works on complex arrays of any shape, a
bracketed root finder, a bounded scalar minimizer, Gauss-Legendre
quadrature, tiny 3x3 complex linear algebra, a scaled least-squares
fitter and a real-cubic root solver.  All functions are pure and
deterministic, so callers may parallelize freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import optimize


class NumericsError(RuntimeError):
    """Base class for failures raised by the numerical kernels."""


class IntegrationError(NumericsError):
    """Adaptive step size underflowed (problem too stiff for the pair)."""


class BracketError(ValueError):
    """A root bracket without a sign change was supplied."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeParams:
    """Physical regime of the narrow-gap annulus.

    eta is the radii ratio, mu the rotation-rate ratio, omega_hat the
    rescaled inner rotation rate.  The derived Reynolds and Taylor
    numbers must satisfy taylor = 2 * omega_hat * reynolds exactly.
    """

    eta: float
    mu: float
    omega_hat: float
    reynolds: float
    taylor: float

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0):
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.reynolds <= 0.0 or self.taylor <= 0.0:
            raise ValueError("reynolds and taylor must be positive")
        if not math.isclose(self.taylor, 2.0 * self.omega_hat * self.reynolds,
                            rel_tol=1e-12):
            raise ValueError("taylor must equal 2 * omega_hat * reynolds")

    @classmethod
    def from_ratios(cls, eta: float, mu: float, omega_hat: float) -> "RegimeParams":
        reynolds = omega_hat * (1.0 - mu) / (1.0 - eta)
        return cls(eta=eta, mu=mu, omega_hat=omega_hat, reynolds=reynolds,
                   taylor=2.0 * omega_hat * reynolds)


#: component order of the 6-dimensional shooting state
VEC6_LABELS = ("u_x", "Du_x", "D2u_x", "D3u_x", "u_y", "Du_y")


@dataclass(frozen=True)
class ComplexVec6:
    """Labelled 6-component complex state (u_x, Du_x, D2u_x, D3u_x, u_y, Du_y)."""

    u_x: complex
    du_x: complex
    d2u_x: complex
    d3u_x: complex
    u_y: complex
    du_y: complex

    def to_array(self) -> np.ndarray:
        return np.array([self.u_x, self.du_x, self.d2u_x,
                         self.d3u_x, self.u_y, self.du_y], dtype=complex)

    @classmethod
    def from_array(cls, a) -> "ComplexVec6":
        a = np.asarray(a, dtype=complex)
        if a.shape != (6,):
            raise ValueError(f"expected shape (6,), got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NumericsError("non-finite component in 6-vector")
        return cls(*a)


@dataclass(frozen=True)
class Bracket:
    """Sign-change interval for root finding: f_lo * f_hi < 0 is enforced."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise BracketError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not (self.f_lo * self.f_hi < 0.0):
            raise BracketError(
                f"no sign change: f({self.lo})={self.f_lo}, f({self.hi})={self.f_hi}")

    @classmethod
    def from_function(cls, g: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, g(lo), g(hi))


# ---------------------------------------------------------------------------
# adaptive Runge-Kutta 4(5), Dormand-Prince coefficients
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
# 5th order solution weights (same as last A row) and 4th order weights
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class IvpResult:
    """Endpoint state plus (optionally) the accepted-step trajectory."""

    x: float
    y: np.ndarray
    xs: np.ndarray | None = None
    ys: np.ndarray | None = None
    n_steps: int = 0


def integrate_ivp(rhs: Callable[[float, np.ndarray], np.ndarray],
                  y0,
                  span: tuple[float, float],
                  rtol: float = 1e-10,
                  atol: float = 1e-10,
                  max_step: float = math.inf,
                  first_step: float | None = None,
                  dense: bool = False) -> IvpResult:
    """Integrate y' = rhs(x, y) across ``span`` with an embedded RK 4(5) pair.

    The state may be a real or complex ndarray of any shape; the error
    norm is the max over components of |err| / (atol + rtol |y|).  With
    ``dense=True`` every accepted step is recorded.  Raises
    IntegrationError on step underflow instead of returning NaNs.
    """
    if rtol <= 0.0 or atol <= 0.0:
        raise ValueError("rtol and atol must be positive")
    x0, x1 = map(float, span)
    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    direction = 1.0 if x1 >= x0 else -1.0
    length = abs(x1 - x0)
    if length == 0.0:
        return IvpResult(x=x1, y=y, xs=np.array([x0]), ys=np.array([y]), n_steps=0)

    h = first_step if first_step is not None else min(length / 16.0, max_step)
    h = min(h, length)
    x = x0
    k = [np.empty_like(y) for _ in range(7)]
    xs = [x0] if dense else None
    ys = [y.copy()] if dense else None
    n_steps = 0
    h_floor = 1e-14 * max(1.0, length)

    while (x1 - x) * direction > 0.0:
        h = min(h, abs(x1 - x), max_step)
        if h < h_floor:
            raise IntegrationError(f"step underflow at x={x:.6g} (h={h:.3g})")
        hs = h * direction
        k[0] = rhs(x, y)
        for i in range(1, 7):
            yi = y + hs * sum(aij * k[j] for j, aij in enumerate(_DP_A[i]))
            k[i] = rhs(x + _DP_C[i] * hs, yi)
        y5 = y + hs * sum(b * k[i] for i, b in enumerate(_DP_B5) if b != 0.0)
        y4 = y + hs * sum(b * k[i] for i, b in enumerate(_DP_B4) if b != 0.0)
        err = y5 - y4
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        enorm = float(np.max(np.abs(err) / scale))
        if not math.isfinite(enorm):
            raise IntegrationError(f"non-finite state at x={x:.6g}")
        if enorm <= 1.0:
            x += hs
            y = y5
            n_steps += 1
            if dense:
                xs.append(x)
                ys.append(y.copy())
        # standard PI-free step controller with safety factor
        factor = 0.9 * (1.0 / enorm) ** 0.2 if enorm > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))

    res = IvpResult(x=x1, y=y, n_steps=n_steps)
    if dense:
        res.xs = np.array(xs)
        res.ys = np.array(ys)
    return res


class HermiteDense:
    """Piecewise cubic Hermite interpolant through accepted integrator steps.

    Built from step abscissae, states and state derivatives (the rhs at
    the nodes), so the interpolation error tracks the integrator's local
    error rather than the step size alone.
    """

    def __init__(self, xs: np.ndarray, ys: np.ndarray, fs: np.ndarray):
        order = np.argsort(xs)
        self.xs = np.asarray(xs, dtype=float)[order]
        self.ys = np.asarray(ys)[order]
        self.fs = np.asarray(fs)[order]
        if len(self.xs) < 2:
            raise ValueError("need at least two nodes")

    @classmethod
    def from_integration(cls, rhs, result: "IvpResult") -> "HermiteDense":
        if result.xs is None:
            raise ValueError("integrate with dense=True first")
        fs = np.array([rhs(x, y) for x, y in zip(result.xs, result.ys)])
        return cls(result.xs, result.ys, fs)

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.clip(np.searchsorted(self.xs, x) - 1, 0, len(self.xs) - 2)
        x0, x1 = self.xs[idx], self.xs[idx + 1]
        h = x1 - x0
        t = ((x - x0) / h).reshape((-1,) + (1,) * (self.ys.ndim - 1))
        hh = h.reshape(t.shape)
        y0, y1 = self.ys[idx], self.ys[idx + 1]
        f0, f1 = self.fs[idx], self.fs[idx + 1]
        h00 = (1 + 2 * t) * (1 - t) ** 2
        h10 = t * (1 - t) ** 2
        h01 = t * t * (3 - 2 * t)
        h11 = t * t * (t - 1)
        out = h00 * y0 + h10 * hh * f0 + h01 * y1 + h11 * hh * f1
        return out[0] if scalar else out


# ---------------------------------------------------------------------------
# root finding and scalar minimization (Brent-style, via scipy)
# ---------------------------------------------------------------------------

def find_root(g: Callable[[float], float], bracket: Bracket, tol: float = 1e-12) -> float:
    """Root of g inside a validated sign-change bracket (safeguarded Brent)."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    x = optimize.brentq(g, bracket.lo, bracket.hi, xtol=tol, rtol=1e-15,
                        maxiter=200)
    return float(min(max(x, bracket.lo), bracket.hi))


@dataclass(frozen=True)
class ScalarMin:
    x: float
    fun: float
    at_boundary: bool


def minimize_scalar(g: Callable[[float], float], interval: tuple[float, float],
                    tol: float = 1e-7) -> ScalarMin:
    """Bounded golden-section/parabolic minimum of g on [a, b].

    A minimum landing within ``tol`` of either endpoint is reported with
    ``at_boundary=True`` so callers never mistake it for an interior
    optimum.
    """
    a, b = map(float, interval)
    if not a < b:
        raise ValueError("need a < b")
    res = optimize.minimize_scalar(g, bounds=(a, b), method="bounded",
                                   options={"xatol": tol})
    x = float(res.x)
    return ScalarMin(x=x, fun=float(res.fun),
                     at_boundary=(x - a) <= 2 * tol or (b - x) <= 2 * tol)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def quadrature(g: Callable[[np.ndarray], np.ndarray], a: float, b: float,
               n: int = 64) -> float:
    """Gauss-Legendre integral of g over [a, b] with n nodes (vectorized g)."""
    x, w = gauss_nodes(a, b, n)
    vals = np.asarray(g(x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericsError("non-finite integrand sample in quadrature")
    return float(w @ vals)


def quadrature_panels(g, a: float, b: float, n_panels: int, nodes_per_panel: int = 5) -> float:
    """Composite Gauss quadrature: ``n_panels`` equal panels of fixed order."""
    edges = np.linspace(a, b, n_panels + 1)
    return sum(quadrature(g, lo, hi, nodes_per_panel)
               for lo, hi in zip(edges[:-1], edges[1:]))


# ---------------------------------------------------------------------------
# small complex linear algebra
# ---------------------------------------------------------------------------

def det3(m) -> complex:
    """Cofactor-expansion determinant of a 3x3 complex matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"expected trailing shape (3, 3), got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericsError("non-finite entry in 3x3 determinant")
    d = (m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
         - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
         + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0]))
    return complex(d) if d.ndim == 0 else d


def null_direction(m) -> tuple[np.ndarray, float]:
    """Best unit null vector of a (near) rank-2 3x3 complex matrix.

    Takes the normalized cross product of the pair of rows with the
    largest Gram determinant, which avoids an SVD at this size.  Returns
    (v, residual) with residual = |m v| / |m|; for a numerically rank-2
    matrix the residual is tiny, for a full-rank one it is O(1).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        raise ValueError("null_direction expects a single 3x3 matrix")
    pairs = [(0, 1), (0, 2), (1, 2)]
    best = None
    for i, j in pairs:
        ri, rj = m[i], m[j]
        # Gram determinant of the row pair measures their independence
        gram = ((ri @ ri.conj()) * (rj @ rj.conj()) - abs(ri @ rj.conj()) ** 2).real
        if best is None or gram > best[0]:
            best = (gram, i, j)
    _, i, j = best
    v = np.cross(m[i].conj(), m[j].conj()).conj()
    nv = np.linalg.norm(v)
    scale = np.linalg.norm(m)
    if nv == 0.0 or scale == 0.0:
        return np.array([1.0, 0.0, 0.0], dtype=complex), 1.0
    v = v / nv
    residual = float(np.linalg.norm(m @ v) / scale)
    return v, residual


# ---------------------------------------------------------------------------
# least squares fitting
# ---------------------------------------------------------------------------

@dataclass
class PolyFit:
    coeffs: np.ndarray
    residual_rms: float
    cond: float
    ill_conditioned: bool


def polyfit(samples: Sequence[tuple], values: Sequence[float],
            basis: Sequence[Callable], cond_threshold: float = 1e10) -> PolyFit:
    """Least squares fit value ~ sum_j c_j basis_j(*inputs).

    Columns are scaled to unit norm before solving, which keeps the
    conditioning honest for mixed-magnitude monomials.  A condition
    number above ``cond_threshold`` only sets the ``ill_conditioned``
    flag; it is the caller's decision whether to fail.
    """
    if len(samples) < len(basis):
        raise ValueError("need at least as many samples as basis functions")
    a = np.array([[float(b(*s)) for b in basis] for s in samples], dtype=float)
    rhs = np.asarray(values, dtype=float)
    col_scale = np.linalg.norm(a, axis=0)
    col_scale[col_scale == 0.0] = 1.0
    a_scaled = a / col_scale
    coeffs_scaled, _, _, sing = np.linalg.lstsq(a_scaled, rhs, rcond=None)
    coeffs = coeffs_scaled / col_scale
    resid = a @ coeffs - rhs
    cond = float(sing[0] / sing[-1]) if sing[-1] > 0.0 else math.inf
    return PolyFit(coeffs=coeffs,
                   residual_rms=float(np.sqrt(np.mean(resid ** 2))),
                   cond=cond,
                   ill_conditioned=cond > cond_threshold)


# ---------------------------------------------------------------------------
# real roots of a cubic
# ---------------------------------------------------------------------------

def cubic_roots(c3: float, c2: float, c1: float, c0: float) -> np.ndarray:
    """All real roots of c3 x^3 + c2 x^2 + c1 x + c0, sorted ascending.

    Companion-matrix roots, real ones kept with a relative imaginary
    tolerance, then one Newton polish each.  Near-multiple roots are
    returned with their multiplicity (e.g. a double root appears twice).
    """
    if c3 == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    coeffs = np.array([c3, c2, c1, c0], dtype=float)
    roots = np.roots(coeffs)
    scale = max(abs(r) for r in roots) + 1.0
    real = [r.real for r in roots if abs(r.imag) <= 1e-8 * scale]

    def p(x):
        return ((c3 * x + c2) * x + c1) * x + c0

    def dp(x):
        return (3.0 * c3 * x + 2.0 * c2) * x + c1

    polished = []
    for r in real:
        d = dp(r)
        if d != 0.0:
            step = p(r) / d
            if abs(step) < 1e-8 * scale:  # only polish, never jump basins
                r = r - step
        polished.append(r)
    return np.array(sorted(polished))
