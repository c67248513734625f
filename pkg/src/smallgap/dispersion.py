"""Non-axisymmetric shooting eigenproblem and dispersion-coefficient fits.

The linearized equations at azimuthal parameter B = beta * R reduce to a
6-dimensional complex first-order system in x.  Three canonical initial
states are propagated across the gap; the 3x3 determinant of their
(u_x, Du_x, u_y) traces at the far wall vanishes exactly on eigenvalues.
Scanning that determinant in T yields the critical surface T_c(alpha, B),
Newton in the spectral parameter extracts the leading eigenvalue, and a
least-squares fit of eigenvalue samples around the critical point
delivers the expansion coefficients (a3, a4, a6, a7, a9, a10).

The determinant is complex for B != 0 while the unknown T is real, so
critical Taylor numbers are located as sub-tolerance minima of the
squared modulus; the reality of the spectrum guarantees a genuine zero
on the real T axis.  Columns of the trace matrix are normalized before
taking the determinant, which removes the exp(a2)-scale growth without
moving the zero set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import core

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


class ShootingError(RuntimeError):
    """Shooting-based search failed (no sub-tolerance minimum, etc.)."""


class RealityError(RuntimeError):
    """A converged eigenvalue acquired an imaginary part; numerics bug."""


@dataclass(frozen=True)
class ShootingParams:
    """Parameter tuple of the shooting system."""

    alpha: float
    bbeta: float
    taylor: float
    lam: complex = 0.0

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        vals = [self.alpha, self.bbeta, self.taylor,
                self.lam.real, self.lam.imag]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("non-finite shooting parameter")


def rhs_matrix(x: float, p: ShootingParams) -> np.ndarray:
    """Companion 6x6 matrix A(x) with DU = A U.

    State order (u_x, Du_x, D2u_x, D3u_x, u_y, Du_y).  The fourth row
    assembles D4 u_x from the x-momentum equation, the sixth row D2 u_y
    from the transport equation.  Purely real when B = 0 and lambda real.
    """
    a2 = p.alpha ** 2
    s = p.lam + a2 - 1j * p.bbeta * x
    m = np.zeros((6, 6), dtype=complex)
    m[0, 1] = m[1, 2] = m[2, 3] = m[4, 5] = 1.0
    m[3, 0] = -s * a2
    m[3, 2] = s + a2
    m[3, 4] = p.taylor * a2
    m[5, 4] = s
    m[5, 0] = -1.0
    return m


def _shoot_traces(alpha2, bbeta, taylor, lam, rtol=DEFAULT_RTOL):
    """Boundary traces of the three canonical solutions, batched.

    Parameters broadcast over a trailing batch axis; the return value
    has shape (3, 3[, n]): rows are (u_x, Du_x, u_y) at x = +1/2 and
    columns index the canonical initial states (e3, e4, e6 at x = -1/2).
    """
    alpha2, bbeta, taylor, lam = np.broadcast_arrays(
        np.asarray(alpha2, dtype=float), np.asarray(bbeta, dtype=float),
        np.asarray(taylor, dtype=float), np.asarray(lam, dtype=complex))
    batch = alpha2.shape
    u0 = np.zeros((6, 3) + batch, dtype=complex)
    u0[2, 0] = 1.0
    u0[3, 1] = 1.0
    u0[5, 2] = 1.0

    ta2 = taylor * alpha2

    def rhs(x, u):
        s = lam + alpha2 - 1j * bbeta * x
        du = np.empty_like(u)
        du[0] = u[1]
        du[1] = u[2]
        du[2] = u[3]
        du[3] = (-s * alpha2) * u[0] + (s + alpha2) * u[2] + ta2 * u[4]
        du[4] = u[5]
        du[5] = s * u[4] - u[0]
        return du

    res = core.integrate_ivp(rhs, u0, (-0.5, 0.5), rtol=rtol, atol=DEFAULT_ATOL)
    return res.y[[0, 1, 4]]


def _delta_from_traces(traces, rescale: bool = True):
    """Determinant of the trace matrix, optionally column-normalized."""
    m = np.moveaxis(traces, [0, 1], [-2, -1]) if traces.ndim > 2 else traces
    if rescale:
        norms = np.sqrt(np.sum(np.abs(m) ** 2, axis=-2, keepdims=True))
        m = m / np.maximum(norms, 1e-300)
    return core.det3(m)


def shoot_delta(p: ShootingParams, rtol: float = DEFAULT_RTOL) -> complex:
    """Rescaled boundary-trace determinant delta(lambda, alpha, B, T)."""
    return complex(_delta_from_traces(_shoot_traces(p.alpha ** 2, p.bbeta,
                                                    p.taylor, p.lam, rtol)))


def _delta_batch(alpha, bbeta, taylors, lam=0.0, rtol=DEFAULT_RTOL):
    """|rescaled delta| over a batch of Taylor numbers in one integration."""
    t = np.asarray(taylors, dtype=float)
    traces = _shoot_traces(np.full(t.shape, alpha ** 2), np.full(t.shape, bbeta),
                           t, np.full(t.shape, complex(lam)), rtol)
    return np.abs(_delta_from_traces(traces))


# ---------------------------------------------------------------------------
# critical Taylor numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalSurfacePoint:
    alpha: float
    bbeta: float
    taylor_crit: float
    residual: float


def critical_taylor(alpha: float, bbeta: float, *,
                    tol: float = 1e-7,
                    t_ceiling: float = 1e7,
                    scan_factor: float = 1.025,
                    rtol: float = DEFAULT_RTOL) -> CriticalSurfacePoint:
    """Smallest T > alpha^4 where the trace determinant vanishes.

    Scans |delta|^2 on a geometric T grid (batched through a single
    integration per chunk), refines every local minimum by bounded
    parabolic search and accepts the first one whose rescaled residual
    drops below ``tol``.
    """
    t_lo = max(1.001 * alpha ** 4, 1e-6)
    chunk = 48
    grid_full = []
    t = t_lo
    while t < t_ceiling:
        grid_full.append(t)
        t *= scan_factor

    def refine(t_left, t_mid, t_right):
        g = lambda tt: float(_delta_batch(alpha, bbeta, [tt], rtol=rtol)[0]) ** 2
        res = core.minimize_scalar(g, (t_left, t_right), tol=1e-10 * t_mid)
        return res.x, math.sqrt(max(res.fun, 0.0))

    prev_tail: list[tuple[float, float]] = []
    for start in range(0, len(grid_full), chunk):
        ts = grid_full[start:start + chunk]
        gs = _delta_batch(alpha, bbeta, ts, rtol=rtol) ** 2
        pts = prev_tail + list(zip(ts, gs))
        for i in range(1, len(pts) - 1):
            if pts[i][1] < pts[i - 1][1] and pts[i][1] < pts[i + 1][1]:
                t_star, resid = refine(pts[i - 1][0], pts[i][0], pts[i + 1][0])
                if resid < tol:
                    return CriticalSurfacePoint(alpha=alpha, bbeta=bbeta,
                                                taylor_crit=t_star, residual=resid)
        prev_tail = pts[-2:]
    raise ShootingError(
        f"no neutral Taylor number below {t_ceiling:.3g} for "
        f"(alpha={alpha}, B={bbeta})")


@dataclass
class SurfaceResult:
    """Critical surface table plus the per-B minimum over alpha."""

    points: list[CriticalSurfacePoint | None]
    alpha_grid: np.ndarray
    bbeta_grid: np.ndarray
    minima: list[tuple[float, float, float]]   # (B, alpha_c(B), T_c(B))

    def taylor_table(self) -> np.ndarray:
        """(n_alpha, n_B) array of critical Taylor numbers (NaN for gaps)."""
        out = np.full((len(self.alpha_grid), len(self.bbeta_grid)), np.nan)
        for k, p in enumerate(self.points):
            if p is not None:
                i, j = divmod(k, len(self.bbeta_grid))
                out[i, j] = p.taylor_crit
        return out


def critical_surface(alpha_grid, bbeta_grid, *,
                     tol: float = 1e-7,
                     rtol: float = DEFAULT_RTOL,
                     minimize: bool = True) -> SurfaceResult:
    """Tabulate T_c(alpha, B) on a grid; per-point failures become gaps."""
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    bbeta_grid = np.asarray(bbeta_grid, dtype=float)
    if alpha_grid.size == 0 or bbeta_grid.size == 0:
        raise ValueError("grids must be nonempty")
    points: list[CriticalSurfacePoint | None] = []
    for a in alpha_grid:
        for b in bbeta_grid:
            try:
                points.append(critical_taylor(a, b, tol=tol, rtol=rtol))
            except (ShootingError, core.NumericsError):
                points.append(None)
    minima = []
    if minimize and len(alpha_grid) >= 3:
        table = np.array([[p.taylor_crit if p else np.nan for p in
                           points[i * len(bbeta_grid):(i + 1) * len(bbeta_grid)]]
                          for i in range(len(alpha_grid))])
        for j, b in enumerate(bbeta_grid):
            col = table[:, j]
            if np.any(np.isnan(col)):
                continue
            i0 = int(np.argmin(col))
            lo = alpha_grid[max(i0 - 1, 0)]
            hi = alpha_grid[min(i0 + 1, len(alpha_grid) - 1)]
            if lo == hi:
                continue
            res = core.minimize_scalar(
                lambda a: critical_taylor(a, b, tol=tol, rtol=rtol).taylor_crit,
                (lo, hi), tol=1e-4)
            minima.append((float(b), res.x, res.fun))
    return SurfaceResult(points=points, alpha_grid=alpha_grid,
                         bbeta_grid=bbeta_grid, minima=minima)


# ---------------------------------------------------------------------------
# leading eigenvalue and its expansion
# ---------------------------------------------------------------------------

def _newton_eigenvalues(alpha, bbeta, taylor, guesses, *,
                        rtol=DEFAULT_RTOL, max_iter=30):
    """Vectorized complex Newton on delta(lambda) = 0, one root per sample.

    All samples share each Newton sweep, so the three determinant
    evaluations per sweep (value plus central difference) cost a single
    batched integration each.  Returns (lambda_array, converged_mask).
    """
    alpha2 = np.asarray(alpha, dtype=float) ** 2
    bbeta = np.asarray(bbeta, dtype=float)
    taylor = np.asarray(taylor, dtype=float)
    lam = np.array(guesses, dtype=complex)

    def raw(lams):
        traces = _shoot_traces(alpha2, bbeta, taylor, lams, rtol)
        return _delta_from_traces(traces, rescale=False)

    done = np.zeros(lam.shape, dtype=bool)
    for _ in range(max_iter):
        h = 1e-7 * (1.0 + np.abs(lam))
        deriv = (raw(lam + h) - raw(lam - h)) / (2.0 * h)
        bad = deriv == 0.0
        step = np.where(bad, 0.0, raw(lam) / np.where(bad, 1.0, deriv))
        lam = np.where(done, lam, lam - step)
        done = done | (np.abs(step) <= 1e-12 * (1.0 + np.abs(lam))) | bad
        if np.all(done):
            break
    return lam, done & ~np.isnan(lam)


def leading_eigenvalue(alpha: float, bbeta: float, taylor: float,
                       guess: complex = 0.0, *,
                       rtol: float = DEFAULT_RTOL,
                       max_iter: int = 30) -> float:
    """Newton root of delta(lambda) near ``guess``; returns the real part.

    The eigenvalues of this system are provably real, so a converged
    root with |Im lambda| > 1e-6 (1 + |Re lambda|) signals a numerics
    bug and raises RealityError rather than being silently truncated.
    """
    lam, ok = _newton_eigenvalues(np.array([alpha]), np.array([bbeta]),
                                  np.array([taylor]), np.array([complex(guess)]),
                                  rtol=rtol, max_iter=max_iter)
    if not ok[0]:
        raise ShootingError(f"Newton failed to converge from guess {guess}")
    lam = complex(lam[0])
    if abs(lam.imag) > 1e-6 * (1.0 + abs(lam.real)):
        raise RealityError(
            f"eigenvalue {lam} violates reality of the spectrum")
    return float(lam.real)


@dataclass
class DispersionFit:
    """Coefficients of the leading-eigenvalue expansion near criticality.

    lambda0 = a3 tau + a4 B^2 + a6 ahat^2 + a7 B^2 ahat + a9 tau ahat
    + a10 tau^2 with tau = T - T_c and ahat = alpha^2 - alpha_c^2.
    There is no constant and no linear ahat term; the fit records how
    little the residual improves when they are offered (a2_gain ~ 1).
    """

    a3: float
    a4: float
    a6: float
    a7: float
    a9: float
    a10: float
    fit_residual: float
    sample_box: tuple[float, float, float]
    alpha_c: float
    taylor_c: float
    a2_gain: float = 1.0
    b4: float = field(init=False)
    b6: float = field(init=False)

    def __post_init__(self):
        self.b4 = -self.a4
        self.b6 = -self.a6


class FitSignError(RuntimeError):
    """Fitted coefficients contradict the proven/observed sign pattern."""


_FIT_BASIS = (
    lambda tau, ahat, b: tau,
    lambda tau, ahat, b: b * b,
    lambda tau, ahat, b: ahat * ahat,
    lambda tau, ahat, b: b * b * ahat,
    lambda tau, ahat, b: tau * ahat,
    lambda tau, ahat, b: tau * tau,
)


def fit_dispersion(center: tuple[float, float],
                   box: tuple[float, float, float] = (0.02, 0.4, 1.0),
                   *,
                   n_tau: int = 5, n_ahat: int = 5,
                   bbetas=(0.0, 0.5, 1.0),
                   rtol: float = DEFAULT_RTOL,
                   residual_frac: float = 0.01,
                   max_shrink: int = 3) -> DispersionFit:
    """Least-squares fit of leading-eigenvalue samples to the quartic model.

    ``box`` = (relative tau half-width, ahat half-width, max B).  If the
    model residual exceeds ``residual_frac`` of the largest sampled
    eigenvalue the box is shrunk by 0.6 and the fit retried; persistent
    failure raises ShootingError (box too large for the quartic model).
    """
    alpha_c, taylor_c = center
    box = tuple(float(v) for v in box)
    for attempt in range(max_shrink + 1):
        tau_w = box[0] * taylor_c
        taus = np.linspace(-tau_w, tau_w, n_tau)
        ahats = np.linspace(-box[1], box[1], n_ahat)
        samples = [(tau, ahat, b)
                   for b in bbetas for ahat in ahats for tau in taus]
        alphas = np.array([math.sqrt(alpha_c ** 2 + s[1]) for s in samples])
        bs = np.array([s[2] for s in samples])
        ts = np.array([taylor_c + s[0] for s in samples])
        # the leading branch stays within O(a3 tau) of zero on this box,
        # so a zero seed lands every Newton run on it
        lams, ok = _newton_eigenvalues(alphas, bs, ts,
                                       np.zeros(len(samples), complex), rtol=rtol)
        for i in np.nonzero(~ok)[0]:
            lams[i] = leading_eigenvalue(alphas[i], bs[i], ts[i], 0.0, rtol=rtol)
        if np.any(np.abs(lams.imag) > 1e-6 * (1.0 + np.abs(lams.real))):
            raise RealityError("a fitted-sample eigenvalue violates reality")
        values = list(lams.real)
        fit = core.polyfit(samples, values, _FIT_BASIS)
        lam_scale = max(abs(v) for v in values)
        if fit.residual_rms <= residual_frac * lam_scale:
            break
        box = (box[0] * 0.6, box[1] * 0.6, box[2] * 0.6)
    else:
        raise ShootingError(
            f"quartic model residual {fit.residual_rms:.3g} exceeds "
            f"{residual_frac:.0%} of max |lambda| even after shrinking the box")

    extended = _FIT_BASIS + (lambda tau, ahat, b: 1.0,
                             lambda tau, ahat, b: ahat)
    fit_ext = core.polyfit(samples, values, extended)
    a2_gain = fit.residual_rms / max(fit_ext.residual_rms, 1e-300)

    a3, a4, a6, a7, a9, a10 = (float(c) for c in fit.coeffs)
    if not (a3 > 0.0 and a4 < 0.0 and a6 < 0.0):
        raise FitSignError(
            f"sign pattern violated: a3={a3:.3g}, a4={a4:.3g}, a6={a6:.3g}")
    return DispersionFit(a3=a3, a4=a4, a6=a6, a7=a7, a9=a9, a10=a10,
                         fit_residual=fit.residual_rms, sample_box=box,
                         alpha_c=alpha_c, taylor_c=taylor_c, a2_gain=a2_gain)


def predicted_critical_shift(fit: DispersionFit, bbeta: float) -> tuple[float, float]:
    """Closed-form critical shift from the fitted expansion.

    Returns (alpha^2 - alpha_c^2, T) at the predicted minimum of the
    critical surface for the given B, including the quartic T-correction.
    """
    b2 = bbeta * bbeta
    ahat = (fit.a7 / (2.0 * fit.b6)
            + fit.a9 * fit.b4 / (2.0 * fit.b6 * fit.a3)) * b2
    t_quad = fit.taylor_c + (fit.b4 / fit.a3) * b2
    quartic = ((fit.a3 * fit.a7 + fit.a9 * fit.b4) ** 2
               + 4.0 * fit.a10 * fit.b6 * fit.a4 ** 2) / (4.0 * fit.b6 * fit.a3 ** 3)
    return ahat, t_quad - quartic * b2 * b2
