"""Closed-form axisymmetric neutral-curve machinery.

At zero growth rate the sixth-order stability equation for the radial
velocity has three explicit modal exponents (one oscillatory, one
conjugate exponential pair).  Matching the six boundary conditions
factorizes into two real hyperbolic-trigonometric functions, one per
parity class of the eigenfunction: even (u_x, u_y even in x) and odd.
Their smallest positive zeros in the Taylor number define the neutral
curve T_c(alpha); minimizing over alpha gives the critical point near
(alpha_c, T_c) = (3.117, 1708).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import core

#: primitive cube root of unity, j = exp(2 pi i / 3)
J_CUBE = complex(-0.5, 0.5 * math.sqrt(3.0))

Parity = Literal["even", "odd"]


class DomainError(ValueError):
    """Parameters outside the validity region (e.g. T <= alpha^4)."""


class TanPoleError(ArithmeticError):
    """Evaluation requested within 1e-6 of a pole of tan(b1/2)."""


class NotFoundError(RuntimeError):
    """Scan exhausted its ceiling without finding the requested zero."""


# ---------------------------------------------------------------------------
# modal roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModalRoots:
    """Modal exponents of the zero-growth-rate sixth-order equation.

    sigma = (T alpha^2)^(1/3); b1^2 = sigma - alpha^2 > 0; the
    exponential pair is lambda_2/3 = a2 +/- i b2 with a2 > 0, b2 < 0.
    lambda_1 = i b1 is purely oscillatory.
    """

    alpha: float
    taylor: float
    sigma: float
    b1: float
    a2: float
    b2: float
    lambda1: complex = field(init=False)
    lambda2: complex = field(init=False)
    lambda3: complex = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lambda1", 1j * self.b1)
        object.__setattr__(self, "lambda2", complex(self.a2, self.b2))
        object.__setattr__(self, "lambda3", complex(self.a2, -self.b2))


def modal_roots(alpha: float, taylor: float) -> ModalRoots:
    """Explicit modal exponents at (alpha, T); requires T > alpha^4."""
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    sigma = (taylor * alpha ** 2) ** (1.0 / 3.0)
    b1_sq = sigma - alpha ** 2
    if b1_sq <= 0.0:
        raise DomainError(
            f"T={taylor:.6g} <= alpha^4={alpha ** 4:.6g}: no neutral mode exists")
    root = math.sqrt(alpha ** 4 + alpha ** 2 * sigma + sigma ** 2)
    a2 = math.sqrt(0.5) * math.sqrt(alpha ** 2 + 0.5 * sigma + root)
    b2 = -math.sqrt(0.5) * math.sqrt(root - alpha ** 2 - 0.5 * sigma)
    return ModalRoots(alpha=alpha, taylor=taylor, sigma=sigma,
                      b1=math.sqrt(b1_sq), a2=a2, b2=b2)


# ---------------------------------------------------------------------------
# the two parity determinants (rescaled by cosh a2 against overflow)
# ---------------------------------------------------------------------------

TAN_POLE_TOL = 1e-6


def _tan_pole_gap(b1: float) -> float:
    """Distance from b1/2 to the nearest pole of tan (odd multiple of pi/2)."""
    u = 0.5 * b1
    k = round((u - 0.5 * math.pi) / math.pi)
    return abs(u - (0.5 * math.pi + k * math.pi))


def _parity_parts(alpha: float, taylor: float):
    r = modal_roots(alpha, taylor)
    sech = 1.0 / math.cosh(r.a2) if r.a2 < 700.0 else 0.0
    tanh = math.tanh(r.a2)
    sqrt3 = math.sqrt(3.0)
    p = (sqrt3 * r.b2 - r.a2)   # multiplies sinh a2
    q = (sqrt3 * r.a2 + r.b2)   # multiplies sin b2
    return r, sech, tanh, p, q


def f1(alpha: float, taylor: float) -> float:
    """Even-parity neutral function, rescaled by cosh(a2); same zero set.

    Raises TanPoleError within 1e-6 of a pole of tan(b1/2) so scanners
    can skip the point instead of chasing a fake sign change.
    """
    r, sech, tanh, p, q = _parity_parts(alpha, taylor)
    if _tan_pole_gap(r.b1) < TAN_POLE_TOL:
        raise TanPoleError(f"tan pole at b1/2={0.5 * r.b1:.9g} (alpha={alpha}, T={taylor})")
    return (-r.b1 * math.tan(0.5 * r.b1) * (1.0 + math.cos(r.b2) * sech)
            + p * tanh + q * math.sin(r.b2) * sech)


def f2(alpha: float, taylor: float) -> float:
    """Odd-parity neutral function, rescaled by cosh(a2); same zero set."""
    r, sech, tanh, p, q = _parity_parts(alpha, taylor)
    if _tan_pole_gap(r.b1) < TAN_POLE_TOL:
        raise TanPoleError(f"tan pole at b1/2={0.5 * r.b1:.9g} (alpha={alpha}, T={taylor})")
    return (r.b1 * (1.0 - math.cos(r.b2) * sech)
            + math.tan(0.5 * r.b1) * (p * tanh - q * math.sin(r.b2) * sech))


_PARITY_FN = {"even": f1, "odd": f2}


def tan_pole_taylors(alpha: float, t_max: float) -> list[float]:
    """Taylor numbers where tan(b1/2) has a pole, i.e. b1 = (2k+1) pi.

    Closed form: sigma = alpha^2 + (2k+1)^2 pi^2 and T = sigma^3 / alpha^2,
    so the scan can excise exact neighborhoods instead of guessing.
    """
    poles = []
    k = 0
    while True:
        sigma = alpha ** 2 + ((2 * k + 1) * math.pi) ** 2
        t = sigma ** 3 / alpha ** 2
        if t > t_max:
            return poles
        poles.append(t)
        k += 1


# ---------------------------------------------------------------------------
# neutral curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NeutralPoint:
    """A point (alpha, T) on an axisymmetric neutral curve."""

    alpha: float
    taylor: float
    parity: Parity

    def __post_init__(self):
        if self.taylor <= self.alpha ** 4:
            raise DomainError("neutral Taylor number must exceed alpha^4")


def neutral_taylor(alpha: float, parity: Parity = "even", *,
                   scan_factor: float = 1.02,
                   t_ceiling: float = 1e7,
                   f_tol: float = 1e-9) -> NeutralPoint:
    """Smallest T > alpha^4 with the parity determinant equal to zero.

    Scans T on a multiplicative grid starting just above alpha^4 (the
    thresholds span decades in alpha, so a geometric grid is the only
    sensible one), excises exact tan-pole neighborhoods, and polishes
    each candidate sign change with Brent.
    """
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    if parity not in _PARITY_FN:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    fn = _PARITY_FN[parity]

    t_lo = 1.001 * alpha ** 4
    # build the scan grid and splice in pole-neighborhood cuts
    grid = [t_lo]
    while grid[-1] < t_ceiling:
        grid.append(grid[-1] * scan_factor)
    poles = tan_pole_taylors(alpha, t_ceiling)

    def segment_edges():
        """Yield scan points, split into pole-free runs."""
        run = []
        pole_pad = 5e-6  # relative T-pad around each pole
        for t in grid:
            near = any(abs(t - p) <= pole_pad * p for p in poles)
            crossed = [p for p in poles if run and run[-1] < p < t]
            if crossed:
                p = crossed[0]
                run.append(p * (1.0 - pole_pad))
                yield run
                run = [p * (1.0 + pole_pad)]
            if not near:
                run.append(t)
        if run:
            yield run

    for run in segment_edges():
        vals = []
        for t in run:
            try:
                vals.append(fn(alpha, t))
            except TanPoleError:
                vals.append(math.nan)
        for (ta, fa), (tb, fb) in zip(zip(run, vals), zip(run[1:], vals[1:])):
            if math.isnan(fa) or math.isnan(fb) or fa * fb >= 0.0:
                continue
            root = core.find_root(lambda t: fn(alpha, t),
                                  core.Bracket(ta, tb, fa, fb), tol=1e-10 * tb)
            if abs(fn(alpha, root)) < f_tol * max(1.0, abs(fa), abs(fb)):
                return NeutralPoint(alpha=alpha, taylor=root, parity=parity)
    raise NotFoundError(
        f"no {parity} neutral point below T={t_ceiling:.3g} for alpha={alpha}")


@dataclass(frozen=True)
class CriticalPoint:
    alpha: float
    taylor: float
    parity: Parity


def critical_point(parity: Parity = "even",
                   alpha_range: tuple[float, float] = (2.0, 4.5),
                   xtol: float = 1e-4) -> CriticalPoint:
    """Global minimum of the neutral curve over the given alpha range."""
    res = core.minimize_scalar(lambda a: neutral_taylor(a, parity).taylor,
                               alpha_range, tol=xtol)
    if res.at_boundary:
        raise NotFoundError(
            f"neutral-curve minimum sits at the alpha-range boundary {res.x:.4g}")
    return CriticalPoint(alpha=res.x, taylor=res.fun, parity=parity)


# ---------------------------------------------------------------------------
# critical eigenfunction (even parity)
# ---------------------------------------------------------------------------

def parity_matrix(alpha: float, taylor: float) -> np.ndarray:
    """3x3 boundary-condition matrix of the even modal combination.

    Columns multiply the even basis functions cos(b1 x), cosh(lambda2 x),
    cosh(lambda3 x); rows impose u_x, Du_x and u_y at x = 1/2 (parity
    supplies the other wall).  Its null vector yields the eigenfunction.
    """
    r = modal_roots(alpha, taylor)
    l1, l2, l3 = r.lambda1, r.lambda2, r.lambda3
    j = J_CUBE
    return np.array([
        [math.cos(0.5 * r.b1), np.cosh(0.5 * l2), np.cosh(0.5 * l3)],
        [-r.b1 * math.sin(0.5 * r.b1), l2 * np.sinh(0.5 * l2), l3 * np.sinh(0.5 * l3)],
        [0.0, -j * np.cosh(0.5 * l2), j ** 2 * np.cosh(0.5 * l3)],
    ], dtype=complex)


@dataclass
class Eigenfunction:
    """Even neutral eigenfunction at (alpha, T) with modal closed form.

    u_x(x) = sum_j A_j cosh(lambda_j x) and u_y carries the extra
    modal divisors (sigma, sigma j, sigma j^2); u_z = (i/alpha) Du_x is
    pure imaginary, stored through its imaginary part.  Normalized so
    u_y(0) = 1 (any coefficient rescaling is quotiented away by the
    normalization, which downstream Landau constants rely on).
    """

    alpha: float
    taylor: float
    roots: ModalRoots
    modal_coeffs: np.ndarray          # (A1, A2, A3) complex
    grid: np.ndarray
    ux_samples: np.ndarray
    uy_samples: np.ndarray
    uz_imag_samples: np.ndarray

    _IMAG_TOL = 1e-9

    def _modal_sum(self, x, k: int, divisors=None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lams = np.array([self.roots.lambda1, self.roots.lambda2, self.roots.lambda3])
        coef = self.modal_coeffs if divisors is None else self.modal_coeffs / divisors
        acc = np.zeros(x.shape, dtype=complex)
        mag = 0.0
        for a_j, l_j in zip(coef, lams):
            hyper = np.cosh(l_j * x) if k % 2 == 0 else np.sinh(l_j * x)
            term = a_j * l_j ** k * hyper
            acc += term
            mag = max(mag, float(np.max(np.abs(term))))
        # boundary values vanish by cancellation, so compare the imaginary
        # residue against the size of the summed terms, not the sum
        if float(np.max(np.abs(acc.imag))) > self._IMAG_TOL * max(mag, 1e-300):
            raise core.NumericsError("modal sum lost reality; conjugate pairing broken")
        return acc.real if acc.ndim else float(acc.real)

    def ux(self, x, k: int = 0):
        """k-th derivative of u_x at x (closed form, no interpolation)."""
        return self._modal_sum(x, k)

    def uy(self, x, k: int = 0):
        sig = self.roots.sigma
        div = np.array([sig, sig * J_CUBE, sig * J_CUBE ** 2])
        return self._modal_sum(x, k, divisors=div)

    def uz_imag(self, x):
        """Imaginary part of u_z = (i / alpha) Du_x."""
        return self.ux(x, 1) / self.alpha

    def pressure(self, x):
        """Eigenfunction pressure profile p0 = D(D^2 - alpha^2) u_x / alpha^2."""
        return (self.ux(x, 3) - self.alpha ** 2 * self.ux(x, 1)) / self.alpha ** 2


def eigenfunction_at(alpha: float, taylor: float, n_grid: int = 2001,
                     residual_tol: float = 1e-6) -> Eigenfunction:
    """Critical eigenfunction from the null direction of the parity matrix.

    (alpha, T) must sit on the even neutral curve; a residual above
    ``residual_tol`` means the matrix is numerically rank 3 and the
    request is rejected.
    """
    m = parity_matrix(alpha, taylor)
    v, residual = core.null_direction(m)
    if residual > residual_tol:
        raise DomainError(
            f"(alpha={alpha}, T={taylor}) is not on the even neutral curve "
            f"(null residual {residual:.2e})")
    # rotate the global phase so A1 is real positive; the conjugate-pair
    # structure then forces A3 = conj(A2) and real u_x, u_y
    a1 = v[0]
    if abs(a1) < 1e-12 * np.linalg.norm(v):
        raise core.NumericsError("degenerate modal mix: oscillatory weight vanished")
    v = v * (a1.conjugate() / abs(a1))
    if abs(v[2] - v[1].conjugate()) > 1e-8 * np.linalg.norm(v):
        raise core.NumericsError("null vector is not conjugate-paired")

    roots = modal_roots(alpha, taylor)
    ef = Eigenfunction(alpha=alpha, taylor=taylor, roots=roots,
                       modal_coeffs=v.astype(complex),
                       grid=np.linspace(-0.5, 0.5, n_grid),
                       ux_samples=np.empty(0), uy_samples=np.empty(0),
                       uz_imag_samples=np.empty(0))
    uy0 = float(ef.uy(0.0))
    if uy0 == 0.0:
        raise core.NumericsError("u_y(0) = 0; cannot apply normalization")
    ef.modal_coeffs = ef.modal_coeffs / uy0
    ef.ux_samples = ef.ux(ef.grid)
    ef.uy_samples = ef.uy(ef.grid)
    ef.uz_imag_samples = ef.uz_imag(ef.grid)
    return ef
