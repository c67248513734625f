"""Steady states of the amplitude equation via its two first integrals.

In scaled variables the steady equation A'' = -tau A + 2 A |A|^2 is
integrable: writing A = rho e^{i theta}, the angular momentum K =
rho^2 theta' and the energy H are conserved, leaving the radial
quadrature  rho'^2 = u(rho) = -K^2/rho^2 + rho^4 - tau rho^2 + H.
Substituting X = rho^2, the admissible radii are governed by the cubic
X^3 - tau X^2 + H X - K^2, and the (H, K) plane splits along the
parametric boundary H = 2 tau X - 3 X^2, K^2 = tau X^2 - 2 X^3 for
X in [0, tau/2]: inside lie periodic modulations, on the low-H branch
constant-modulus states (wavy vortices), on the high-H branch
homoclinic orbits, and on the K = 0 axis the real phase portrait with
its heteroclinic pair at H = tau^2/4.

Everything here works in the fully scaled form (quartic coefficient 1);
rescale()/unrescale() translate to and from physical GL coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import core
from .landau import GLCoefficients


class OrbitClassError(ValueError):
    """Operation requested for a spec whose classification does not allow it."""


class BranchError(ValueError):
    """Requested solution branch does not exist at these parameters."""


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledGLParams:
    """Scaled amplitude-equation parameters.

    a0 = a3/b4 and c0 = c/(2 b4) put the steady equation into
    A'' = -a0 tau A + 2 c0 A |A|^2 on y-units of the Reynolds number;
    the amplitude scale k with c0 k^4 = 1 then removes c0, leaving
    tau_tilde = a0 tau k^2 as the only parameter.  b4 is kept so the
    transformation can be inverted.
    """

    a0: float
    c0: float
    tau: float
    k: float
    tau_tilde: float
    b4: float
    reynolds: float

    def __post_init__(self):
        if not (self.a0 > 0.0 and self.c0 > 0.0):
            raise ValueError("a0 and c0 must be positive")


def rescale(gl: GLCoefficients) -> ScaledGLParams:
    """Scaled parameters from physical GL coefficients."""
    if not (gl.b4 > 0.0 and gl.c > 0.0):
        raise ValueError("b4 and c must be positive")
    a0 = gl.a3 / gl.b4
    c0 = gl.c / (2.0 * gl.b4)
    k = c0 ** -0.25
    return ScaledGLParams(a0=a0, c0=c0, tau=gl.tau, k=k,
                          tau_tilde=a0 * gl.tau * k * k,
                          b4=gl.b4, reynolds=gl.reynolds)


def unrescale(sp: ScaledGLParams, beta: float = 0.0) -> GLCoefficients:
    """Inverse of rescale (b4 carries the overall scale)."""
    return GLCoefficients(a3=sp.a0 * sp.b4, c=2.0 * sp.c0 * sp.b4, b4=sp.b4,
                          reynolds=sp.reynolds, tau=sp.tau, beta=beta)


# ---------------------------------------------------------------------------
# orbit specification and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSpec:
    """Scaled parameters (tau) and first integrals (H, K) of one orbit."""

    tau: float
    h: float
    k: float

    def u(self, rho):
        """Radial energy function u(rho) = rho'^2 along the orbit."""
        rho = np.asarray(rho, dtype=float)
        return (-self.k ** 2 / rho ** 2 + rho ** 4 - self.tau * rho ** 2
                + self.h)

    def cubic(self):
        """Coefficients of X^3 - tau X^2 + H X - K^2 (roots are radii^2)."""
        return 1.0, -self.tau, self.h, -self.k ** 2


KINDS = ("tvf", "constant_modulus", "periodic", "homoclinic",
         "heteroclinic_K0", "empty")


@dataclass
class OrbitResult:
    """Classification and quantitative summary of one orbit."""

    kind: str
    spec: OrbitSpec
    rho_min: float = math.nan
    rho_max: float = math.nan
    period: float = math.nan
    beta_prime: float = math.nan
    rho_infty: float = math.nan
    winding_integral: float = math.nan
    x_roots: tuple = ()

    @property
    def winding_over_2pi(self) -> float:
        return self.winding_integral / (2.0 * math.pi)

    @property
    def nearest_winding_integer(self) -> int:
        return int(round(self.winding_over_2pi))


def boundary_curve(tau: float, x):
    """Parametric (H, K^2) boundary: H = 2 tau X - 3 X^2, K^2 = tau X^2 - 2 X^3.

    Valid for X in [0, tau/2]; the cusp at X = tau/3 carries the maximal
    (H, K) = (tau^2/3, (tau/3)^{3/2}).
    """
    x = np.asarray(x, dtype=float)
    return 2.0 * tau * x - 3.0 * x * x, tau * x * x - 2.0 * x ** 3


def _boundary_x(tau: float, ksq: float, branch: str) -> float:
    """Solve tau X^2 - 2 X^3 = K^2 on the requested branch.

    'low' is X in (0, tau/3] (constant-modulus boundary), 'high' is
    X in [tau/3, tau/2] (homoclinic boundary).
    """
    lo, hi = (0.0, tau / 3.0) if branch == "low" else (tau / 3.0, tau / 2.0)
    g = lambda x: tau * x * x - 2.0 * x ** 3 - ksq
    if g(lo) * g(hi) >= 0.0:
        # K^2 at the extreme of the branch; clamp to the cusp
        return tau / 3.0
    return core.find_root(g, core.Bracket(lo, hi, g(lo), g(hi)),
                          tol=1e-14 * max(tau, 1.0))


def classify(spec: OrbitSpec, boundary_rtol: float = 1e-7) -> OrbitResult:
    """Classify the orbit at (tau, H, K) from the cubic root structure.

    Boundary cases are detected by comparing H against the closed-form
    branch values at the given K (relative tolerance in units of tau^2),
    which is far more robust than hunting for double roots in floating
    point.  'empty' is a valid answer for anything outside the bounded
    region.
    """
    tau, h, k = spec.tau, spec.h, spec.k
    if not all(math.isfinite(v) for v in (tau, h, k)):
        raise ValueError("orbit spec must be finite")
    scale = max(tau * tau, 1e-300)
    tol = boundary_rtol * scale

    if tau <= 0.0:
        return OrbitResult(kind="empty", spec=spec)

    if k == 0.0:
        h_het = tau * tau / 4.0
        if abs(h - h_het) <= tol:
            r = math.sqrt(tau / 2.0)
            return OrbitResult(kind="heteroclinic_K0", spec=spec, rho_min=0.0,
                               rho_max=r, rho_infty=r, period=math.inf,
                               beta_prime=0.0, x_roots=(0.0, tau / 2.0, tau / 2.0))
        if 0.0 < h < h_het:
            disc = math.sqrt(tau * tau - 4.0 * h)
            x_lo, x_hi = 0.5 * (tau - disc), 0.5 * (tau + disc)
            return OrbitResult(kind="periodic", spec=spec, rho_min=0.0,
                               rho_max=math.sqrt(x_lo), beta_prime=0.0,
                               x_roots=(0.0, x_lo, x_hi))
        return OrbitResult(kind="empty", spec=spec)

    ksq = k * k
    ksq_max = (tau / 3.0) ** 3
    if ksq > ksq_max + tol * tau:
        return OrbitResult(kind="empty", spec=spec)
    if abs(ksq - ksq_max) <= tol * max(tau, 1.0):
        # cusp: triple contact, only the constant solution survives
        r = math.sqrt(tau / 3.0)
        if abs(h - tau * tau / 3.0) <= tol:
            return OrbitResult(kind="constant_modulus", spec=spec, rho_min=r,
                               rho_max=r, beta_prime=k / (tau / 3.0),
                               x_roots=(tau / 3.0,) * 3)
        return OrbitResult(kind="empty", spec=spec)

    x_lo = _boundary_x(tau, ksq, "low")
    x_hi = _boundary_x(tau, ksq, "high")
    h_min = 2.0 * tau * x_lo - 3.0 * x_lo * x_lo
    h_max = 2.0 * tau * x_hi - 3.0 * x_hi * x_hi

    if abs(h - h_min) <= tol:
        r = math.sqrt(x_lo)
        return OrbitResult(kind="constant_modulus", spec=spec, rho_min=r,
                           rho_max=r, beta_prime=k / x_lo,
                           x_roots=(x_lo, x_lo, tau - 2.0 * x_lo))
    if abs(h - h_max) <= tol:
        x1 = tau - 2.0 * x_hi
        return OrbitResult(kind="homoclinic", spec=spec,
                           rho_min=math.sqrt(x1), rho_max=math.sqrt(x_hi),
                           rho_infty=math.sqrt(x_hi), period=math.inf,
                           beta_prime=k / x_hi, x_roots=(x1, x_hi, x_hi))
    if h_min < h < h_max:
        roots = core.cubic_roots(*spec.cubic())
        pos = sorted(r for r in roots if r > 0.0)
        if len(pos) != 3:
            raise core.NumericsError(
                f"expected three positive radii^2 inside the region, got {pos}")
        return OrbitResult(kind="periodic", spec=spec,
                           rho_min=math.sqrt(pos[0]), rho_max=math.sqrt(pos[1]),
                           x_roots=tuple(pos))
    return OrbitResult(kind="empty", spec=spec)


# ---------------------------------------------------------------------------
# periods and winding rates (turning-point quadrature)
# ---------------------------------------------------------------------------

def _adaptive_gauss(f, a: float, b: float, rtol: float = 1e-12,
                    n0: int = 64, n_max: int = 4096) -> float:
    prev = core.quadrature(f, a, b, n0)
    n = 2 * n0
    while n <= n_max:
        cur = core.quadrature(f, a, b, n)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
        n *= 2
    return prev


def _radial_quadratures(x1: float, x2: float, x3: float) -> tuple[float, float]:
    """(half period, half of the 1/rho^2 action) over one radial swing.

    Uses X = x1 + (x2 - x1) sin^2 s, which removes both square-root
    turning-point singularities; the integrands are then analytic in s.
    """
    dx = x2 - x1

    def t_integrand(s):
        return 1.0 / np.sqrt(x3 - (x1 + dx * np.sin(s) ** 2))

    def j_integrand(s):
        x = x1 + dx * np.sin(s) ** 2
        return 1.0 / (x * np.sqrt(x3 - x))

    half_period = _adaptive_gauss(t_integrand, 0.0, 0.5 * math.pi)
    half_action = _adaptive_gauss(j_integrand, 0.0, 0.5 * math.pi) \
        if x1 > 0.0 else math.nan
    return half_period, half_action


def orbit_period(spec: OrbitSpec) -> float:
    """Period of the orbit at (tau, H, K).

    For K != 0 this is the period of the radius rho(y); for K = 0 it is
    the period of the real amplitude A(y) itself (twice the |A| period,
    matching the closed-orbit period in the (A, A') plane, which tends
    to 2 pi / sqrt(tau) at small amplitude).
    """
    res = classify(spec)
    if res.kind != "periodic":
        raise OrbitClassError(f"period undefined for kind '{res.kind}'")
    x1, x2, x3 = res.x_roots
    half_period, _ = _radial_quadratures(x1, x2, x3)
    period = 2.0 * half_period
    return 2.0 * period if spec.k == 0.0 else period


def beta_prime(spec: OrbitSpec) -> float:
    """Mean winding rate K <rho^-2> along a periodic or constant orbit."""
    res = classify(spec)
    if res.kind in ("constant_modulus", "tvf"):
        return res.beta_prime
    if res.kind != "periodic":
        raise OrbitClassError(f"winding rate undefined for kind '{res.kind}'")
    if spec.k == 0.0:
        return 0.0
    x1, x2, x3 = res.x_roots
    half_period, half_action = _radial_quadratures(x1, x2, x3)
    return spec.k * half_action / half_period


# ---------------------------------------------------------------------------
# homoclinic orbits
# ---------------------------------------------------------------------------

@dataclass
class Profile:
    """Sampled amplitude profile A(y) = rho e^{i theta}.

    rho_prime and theta_prime are carried from the integrated state (not
    differenced from samples), so the conserved quantities rho'^2 -
    u(rho) and rho^2 theta' can be checked at integrator accuracy.
    """

    y: np.ndarray
    rho: np.ndarray
    theta: np.ndarray
    a: np.ndarray
    rho_prime: np.ndarray
    theta_prime: np.ndarray
    spec: OrbitSpec
    kind: str
    beta_prime: float
    theta0: float

    def phi(self) -> np.ndarray:
        """Oscillating phase part: theta - beta_prime y - theta0."""
        return self.theta - self.beta_prime * self.y - self.theta0

    def conservation_drift(self) -> tuple[float, float]:
        """Relative drift of (energy, angular momentum) over the window.

        Points with rho near zero are excluded from the energy check
        (u(rho) has the K^2/rho^2 pole) and from the momentum check
        (theta' is undefined where A crosses zero).
        """
        mask = self.rho > 1e-6 * float(np.max(self.rho))
        e = self.rho_prime[mask] ** 2 - self.spec.u(self.rho[mask])
        e_scale = max(abs(self.spec.h), float(np.max(self.rho)) ** 4, 1e-300)
        mom = self.rho[mask] ** 2 * self.theta_prime[mask]
        m_scale = max(abs(self.spec.k), float(np.max(mom)) if mom.size else 0.0,
                      1e-300)
        e_drift = float(np.max(np.abs(e - e[0]))) / e_scale if e.size else 0.0
        m_drift = float(np.max(np.abs(mom - self.spec.k))) / m_scale \
            if mom.size else 0.0
        return e_drift, m_drift


def homoclinic_orbit(tau: float, k: float, *,
                     gap_cut: float = 1e-6,
                     rtol: float = 1e-11) -> tuple[OrbitResult, Profile]:
    """Homoclinic orbit at angular momentum K: profile and winding integral.

    H is pinned to the boundary branch H_max(K); the profile starts at
    the inner turning point and approaches rho_infty exponentially with
    rate 2 sqrt(3 X* - tau).  The winding integral K int(rho^-2 -
    rho_infty^-2) dy is accumulated along the integration and closed
    with the analytic exponential tail beyond the cutoff gap, where
    direct quadrature would lose precision.
    """
    if tau <= 0.0:
        raise BranchError("homoclinic orbits need tau > 0")
    kmax = (tau / 3.0) ** 1.5
    if not 0.0 < abs(k) < kmax:
        raise BranchError(f"need 0 < |K| < (tau/3)^1.5 = {kmax:.6g}, got {k}")
    ksq = k * k
    x_star = _boundary_x(tau, ksq, "high")
    h = 2.0 * tau * x_star - 3.0 * x_star * x_star
    spec = OrbitSpec(tau=tau, h=h, k=k)
    x1 = tau - 2.0 * x_star
    rho_inf = math.sqrt(x_star)
    kappa = 2.0 * math.sqrt(3.0 * x_star - tau)

    gap0 = rho_inf - math.sqrt(x1)
    y_end = (math.log(gap0 / (gap_cut * rho_inf)) + 3.0) / kappa

    def rhs(y, s):
        rho = s[0]
        ds = np.empty_like(s)
        ds[0] = s[1]
        ds[1] = ksq / rho ** 3 + 2.0 * rho ** 3 - tau * rho
        ds[2] = k / rho ** 2                       # theta
        ds[3] = k * (1.0 / rho ** 2 - 1.0 / x_star)  # winding accumulator
        return ds

    s0 = np.array([math.sqrt(x1), 0.0, 0.0, 0.0])
    res = core.integrate_ivp(rhs, s0, (0.0, y_end), rtol=rtol, atol=1e-13,
                             dense=True)
    dense = core.HermiteDense.from_integration(rhs, res)
    gap_end = rho_inf - res.y[0]
    if not 0.0 < gap_end < 1e-4 * rho_inf:
        raise core.NumericsError(
            f"homoclinic tail not reached: gap {gap_end:.3g} at y={y_end:.3g}")
    tail = 2.0 * k * gap_end / (kappa * x_star ** 1.5)
    winding = 2.0 * (res.y[3] + tail)

    ys = np.linspace(0.0, y_end, 1001)
    st = dense(ys).T
    y_full = np.concatenate([-ys[:0:-1], ys])
    rho_full = np.concatenate([st[0][:0:-1], st[0]])
    theta_full = np.concatenate([-st[2][:0:-1], st[2]])
    rhop_full = np.concatenate([-st[1][:0:-1], st[1]])
    beta = k / x_star
    result = OrbitResult(kind="homoclinic", spec=spec, rho_min=math.sqrt(x1),
                         rho_max=rho_inf, rho_infty=rho_inf, period=math.inf,
                         beta_prime=beta, winding_integral=winding,
                         x_roots=(x1, x_star, x_star))
    profile = Profile(y=y_full, rho=rho_full, theta=theta_full,
                      a=rho_full * np.exp(1j * theta_full),
                      rho_prime=rhop_full, theta_prime=k / rho_full ** 2,
                      spec=spec, kind="homoclinic",
                      beta_prime=beta, theta0=0.0)
    return result, profile


# ---------------------------------------------------------------------------
# profiles for every class
# ---------------------------------------------------------------------------

def reconstruct_profile(spec: OrbitSpec, theta0: float = 0.0,
                        window: float = 20.0, samples: int = 2001,
                        rtol: float = 1e-11) -> Profile:
    """Sampled profile on y in [-window/2, window/2].

    Periodic and homoclinic profiles start at a turning point (rho' = 0)
    at y = 0; the phase is decomposed as theta = beta' y + theta0 + phi
    with phi periodic and zero mean over one radial period.
    """
    res = classify(spec)
    kind = res.kind
    y = np.linspace(-0.5 * window, 0.5 * window, samples)
    tau, k = spec.tau, spec.k

    if kind in ("constant_modulus", "tvf"):
        rho0 = res.rho_min
        beta = res.beta_prime
        theta = theta0 + beta * y
        rho = np.full_like(y, rho0)
        return Profile(y=y, rho=rho, theta=theta,
                       a=rho * np.exp(1j * theta), rho_prime=np.zeros_like(y),
                       theta_prime=np.full_like(y, beta),
                       spec=spec, kind=kind, beta_prime=beta, theta0=theta0)

    if kind == "heteroclinic_K0":
        r = math.sqrt(tau / 2.0)
        amp = r * np.tanh(r * y)
        rho = np.abs(amp)
        theta = theta0 + np.where(amp < 0.0, math.pi, 0.0)
        rhop = np.sign(amp) * r * r / np.cosh(r * y) ** 2
        return Profile(y=y, rho=rho, theta=theta,
                       a=amp * np.exp(1j * theta0),
                       rho_prime=rhop, theta_prime=np.zeros_like(y),
                       spec=spec, kind=kind, beta_prime=0.0, theta0=theta0)

    if kind not in ("periodic", "homoclinic"):
        raise OrbitClassError(f"no profile for kind '{kind}'")

    # integrate the full complex amplitude equation A'' = -tau A + 2A|A|^2
    # so the conserved quantities are measured, not imposed
    def rhs(yy, s):
        a = s[0] + 1j * s[1]
        app = -tau * a + 2.0 * a * (a.real ** 2 + a.imag ** 2)
        return np.array([s[2], s[3], app.real, app.imag])

    if kind == "homoclinic":
        # cap the integration where the orbit has merged with rho_infty
        # (beyond that the unstable manifold amplifies roundoff) and fill
        # the tails with the exact asymptotic state
        x1, x_star, _ = res.x_roots
        kappa = 2.0 * math.sqrt(3.0 * x_star - tau)
        gap0 = res.rho_infty - res.rho_min
        y_reach = (math.log(gap0 / (1e-6 * res.rho_infty)) + 3.0) / kappa
    else:
        y_reach = math.inf

    if k == 0.0:
        a0 = complex(res.rho_max, 0.0)
        ap0 = 0.0j
    else:
        a0 = complex(res.rho_min, 0.0)
        ap0 = 1j * (k / res.rho_min)   # rho^2 theta' = K at the turning point
    s0 = np.array([a0.real, a0.imag, ap0.real, ap0.imag])

    inside = np.abs(y) <= y_reach
    st_in = _two_sided(rhs, s0, y[inside], rtol)
    amp_in = st_in[0] + 1j * st_in[1]
    ampp_in = st_in[2] + 1j * st_in[3]

    rho = np.empty_like(y)
    rhop = np.empty_like(y)
    thp = np.empty_like(y)
    theta = np.empty_like(y)

    rho_in = np.abs(amp_in)
    safe = np.maximum(rho_in, 1e-300)
    rho[inside] = rho_in
    rhop[inside] = (amp_in.real * ampp_in.real + amp_in.imag * ampp_in.imag) / safe
    thp[inside] = (amp_in.real * ampp_in.imag - amp_in.imag * ampp_in.real) / safe ** 2

    if k == 0.0:
        theta = theta0 + np.where(amp_in.real < 0.0, math.pi, 0.0)
        return Profile(y=y, rho=rho, theta=theta, a=amp_in * np.exp(1j * theta0),
                       rho_prime=rhop, theta_prime=np.zeros_like(y),
                       spec=spec, kind=kind, beta_prime=0.0, theta0=theta0)

    th_in = np.unwrap(np.angle(amp_in))
    # re-anchor the unwrapped phase: theta(0) = 0 at the turning point
    i0 = int(np.argmin(np.abs(y[inside])))
    th_in -= 2.0 * math.pi * round(th_in[i0] / (2.0 * math.pi))
    theta[inside] = th_in

    if kind == "homoclinic":
        beta = k / (res.rho_infty ** 2)
        left = y < -y_reach
        right = y > y_reach
        y_lo, y_hi = y[inside][0], y[inside][-1]
        rho[left] = res.rho_infty
        rho[right] = res.rho_infty
        rhop[left] = rhop[right] = 0.0
        thp[left] = thp[right] = beta
        theta[left] = th_in[0] + beta * (y[left] - y_lo)
        theta[right] = th_in[-1] + beta * (y[right] - y_hi)
        theta = theta + theta0
        return Profile(y=y, rho=rho, theta=theta, a=rho * np.exp(1j * theta),
                       rho_prime=rhop, theta_prime=thp, spec=spec, kind=kind,
                       beta_prime=beta, theta0=theta0)

    theta = theta + theta0
    bp = beta_prime(spec)
    period = orbit_period(spec)
    # zero-mean phi over one period fixes the theta0 of the decomposition
    dense_fwd = _dense_forward(rhs, s0, max(float(y[-1]), period), rtol)
    tgrid = np.linspace(0.0, period, 512, endpoint=False)
    stp = dense_fwd(tgrid).T
    th_p = np.unwrap(np.angle(stp[0] + 1j * stp[1]))
    th_p -= 2.0 * math.pi * round(th_p[0] / (2.0 * math.pi))
    mean_phi = float(np.mean(th_p - bp * tgrid))
    return Profile(y=y, rho=rho, theta=theta, a=rho * np.exp(1j * theta),
                   rho_prime=rhop, theta_prime=thp,
                   spec=spec, kind=kind, beta_prime=bp,
                   theta0=theta0 + mean_phi)


def _dense_forward(rhs, s0, y_end: float, rtol: float) -> core.HermiteDense:
    res = core.integrate_ivp(rhs, s0, (0.0, y_end), rtol=rtol, atol=1e-13,
                             dense=True)
    return core.HermiteDense.from_integration(rhs, res)


def _two_sided(rhs, s0, y: np.ndarray, rtol: float) -> np.ndarray:
    """Integrate from y = 0 both ways and sample the state on y (rows)."""
    out = np.empty((len(s0), len(y)))
    pos = y >= 0.0
    if np.any(pos):
        dense = _dense_forward(rhs, s0, max(float(y[-1]), 1e-12), rtol)
        out[:, pos] = dense(y[pos]).T
    if np.any(~pos):
        res = core.integrate_ivp(rhs, s0, (0.0, float(y[0])), rtol=rtol,
                                 atol=1e-13, dense=True)
        dense = core.HermiteDense.from_integration(rhs, res)
        out[:, ~pos] = dense(y[~pos]).T
    return out


# ---------------------------------------------------------------------------
# wavy-vortex branch and stability
# ---------------------------------------------------------------------------

def wavy_amplitude(gl: GLCoefficients, beta: float) -> float:
    """Modulus of the wavy-vortex state rho e^{i beta y} (unscaled).

    rho^2 = (a3 tau - b4 beta^2 R^2)/c; beta = 0 is the Taylor-vortex
    amplitude sqrt(a3 tau / c).  Raises BranchError beyond the secondary
    bifurcation locus where the radicand turns negative.
    """
    radicand = (gl.a3 * gl.tau - gl.b4 * beta ** 2 * gl.reynolds ** 2) / gl.c
    if radicand < 0.0:
        raise BranchError(
            f"wavy branch absent: a3 tau < b4 (beta R)^2 at beta={beta}")
    return math.sqrt(radicand)


def wavy_orbit_spec(gl: GLCoefficients, beta: float) -> OrbitSpec:
    """Phase-plane constants (tau~, H, K) of the wavy state at beta."""
    sp = rescale(gl)
    rho_phys = wavy_amplitude(gl, beta)
    rho = rho_phys / sp.k
    k_const = rho ** 2 * beta * gl.reynolds * sp.k
    x = rho * rho
    h = k_const ** 2 / x - x * x + sp.tau_tilde * x
    return OrbitSpec(tau=sp.tau_tilde, h=h, k=k_const)


def stability_rates(gl: GLCoefficients, beta0: float,
                    beta_pert: float) -> tuple[float, float]:
    """Closed-form growth rates of a wavy state against mode beta_pert.

    Returns (phase-mode rate, amplitude-mode rate):
    mu1 = b4 R^2 (beta0^2 - beta'^2) and mu2 = mu1 - 2 c |A0|^2.  The
    state is stable for |beta'| > |beta0|; TVF (beta0 = 0) is stable
    against all beta' != 0 of this family.
    """
    amp = wavy_amplitude(gl, beta0)
    br2 = gl.b4 * gl.reynolds ** 2
    mu1 = br2 * (beta0 ** 2 - beta_pert ** 2)
    return mu1, mu1 - 2.0 * gl.c * amp ** 2
