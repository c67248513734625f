"""Time-dependent amplitude-equation simulator on a periodic domain.

Integrates dA/dt = a3 tau A + b4 R^2 d^2A/dy^2 - c A|A|^2 in the fully
scaled form a_t = tau~ a + a_yy - 2 a |a|^2 (amplitude scale k, y in
units of R k, time in units of k^2 / b4).  The linear part is exact in
Fourier space; the cubic term is stepped explicitly with a first-order
exponential integrator and 2/3-rule dealiasing.  The phi1 weight makes
every state with N_hat_k = -lambda_k A_hat_k an exact fixed point, so
Taylor-vortex and wavy-vortex equilibria are stationary to round-off
rather than to O(dt).

Growth-rate measurements are reported back in physical time units; the
factor b4 / k^2 is the only place the scaling re-enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .glsteady import rescale
from .landau import GLCoefficients


class SimulationError(RuntimeError):
    """Simulation diverged or produced non-finite fields."""


@dataclass(frozen=True)
class SimConfig:
    """Periodic-domain simulation setup (lengths and dt in scaled units)."""

    domain_length: float
    modes: int
    dt: float
    gl: GLCoefficients

    def __post_init__(self):
        if self.modes < 32 or self.modes & (self.modes - 1) != 0:
            raise ValueError("modes must be a power of two, at least 32")
        if self.dt <= 0.0 or self.domain_length <= 0.0:
            raise ValueError("dt and domain_length must be positive")

    @property
    def scaled(self):
        return rescale(self.gl)

    @property
    def tau_tilde(self) -> float:
        return self.scaled.tau_tilde

    @property
    def time_scale(self) -> float:
        """Scaled time per physical time: t_scaled = (b4 / k^2) t_phys."""
        sp = self.scaled
        return sp.b4 / sp.k ** 2

    def wavenumbers(self) -> np.ndarray:
        """Scaled Fourier frequencies of the grid (fft ordering)."""
        return 2.0 * math.pi * np.fft.fftfreq(self.modes, d=1.0 / self.modes) \
            / self.domain_length

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.domain_length, self.modes, endpoint=False)

    def mode_index(self, beta_scaled: float) -> int:
        """Grid index of the admissible scaled wavenumber closest to beta."""
        j = round(beta_scaled * self.domain_length / (2.0 * math.pi))
        return int(j % self.modes)

    def physical_beta(self, beta_scaled: float) -> float:
        sp = self.scaled
        return beta_scaled / (sp.reynolds * sp.k)

    def scaled_beta(self, beta_phys: float) -> float:
        sp = self.scaled
        return beta_phys * sp.reynolds * sp.k


def _operators(cfg: SimConfig):
    ks = cfg.wavenumbers()
    lam = cfg.tau_tilde - ks * ks
    z = cfg.dt * lam
    growth = np.exp(z)
    phi1 = np.where(np.abs(z) > 1e-8, np.expm1(z) / np.where(z == 0.0, 1.0, z),
                    1.0 + 0.5 * z)
    cut = cfg.modes // 3
    idx = np.fft.fftfreq(cfg.modes, d=1.0 / cfg.modes).astype(int)
    dealias = np.abs(idx) <= cut
    return growth, phi1, dealias


def step(a: np.ndarray, cfg: SimConfig, ops=None) -> np.ndarray:
    """One exponential-Euler step of the scaled amplitude equation."""
    if a.shape != (cfg.modes,):
        raise ValueError(f"field must have shape ({cfg.modes},)")
    growth, phi1, dealias = ops if ops is not None else _operators(cfg)
    a_hat = np.fft.fft(a)
    nl_hat = np.fft.fft(-2.0 * a * (a.real ** 2 + a.imag ** 2)) * dealias
    out_hat = growth * a_hat + cfg.dt * phi1 * nl_hat
    out = np.fft.ifft(out_hat)
    if not np.all(np.isfinite(out_hat)):
        raise SimulationError("non-finite field after step (blow-up?)")
    return out


@dataclass
class Trajectory:
    """Per-mode amplitude history |A_hat_k(t)| at the recording stride."""

    t_scaled: np.ndarray
    mode_amps: np.ndarray          # (n_records, modes), fft ordering
    final_field: np.ndarray
    cfg: SimConfig

    def amp(self, mode_index: int) -> np.ndarray:
        return self.mode_amps[:, mode_index % self.cfg.modes]

    @property
    def t_phys(self) -> np.ndarray:
        return self.t_scaled / self.cfg.time_scale


def simulate(cfg: SimConfig, field0: np.ndarray, t_end: float,
             stride: int = 10) -> Trajectory:
    """March the field to scaled time t_end, recording mode amplitudes."""
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")
    ops = _operators(cfg)
    a = np.asarray(field0, dtype=complex).copy()
    if a.shape != (cfg.modes,):
        raise ValueError(f"initial field must have shape ({cfg.modes},)")
    n_steps = int(round(t_end / cfg.dt))
    times = [0.0]
    amps = [np.abs(np.fft.fft(a)) / cfg.modes]
    for n in range(1, n_steps + 1):
        a = step(a, cfg, ops)
        if n % stride == 0 or n == n_steps:
            times.append(n * cfg.dt)
            amps.append(np.abs(np.fft.fft(a)) / cfg.modes)
    return Trajectory(t_scaled=np.array(times), mode_amps=np.array(amps),
                      final_field=a, cfg=cfg)


def measure_growth_rate(traj: Trajectory, mode_index: int,
                        window: tuple[float, float],
                        monotone_tol: float = 1e-9) -> float:
    """Log-linear growth rate of one mode inside a scaled-time window.

    Returns the rate in physical time units.  The windowed amplitude
    series must be one-signed in slope (up to ``monotone_tol`` relative
    wiggles); a non-monotone window means the measurement straddles a
    regime change and is rejected.
    """
    t = traj.t_scaled
    sel = (t >= window[0]) & (t <= window[1])
    if np.sum(sel) < 3:
        raise ValueError("window contains fewer than 3 records")
    ts = t[sel]
    amps = traj.amp(mode_index)[sel]
    if np.any(amps <= 0.0):
        raise SimulationError("mode amplitude hit zero inside the window")
    la = np.log(amps)
    diffs = np.diff(la)
    span = float(np.max(la) - np.min(la))
    if span > 0 and np.any(diffs > monotone_tol * max(span, 1.0)) \
            and np.any(diffs < -monotone_tol * max(span, 1.0)):
        raise SimulationError("non-monotone amplitude inside the fit window")
    slope = np.polyfit(ts, la, 1)[0]
    return float(slope * traj.cfg.time_scale)


def wavy_field(cfg: SimConfig, beta_scaled: float) -> np.ndarray:
    """Exact wavy-vortex equilibrium rho e^{i beta y} on the grid (scaled)."""
    rho_sq = 0.5 * (cfg.tau_tilde - beta_scaled ** 2)
    if rho_sq < 0.0:
        raise ValueError("wavy state does not exist at this wavenumber")
    y = cfg.grid()
    return math.sqrt(rho_sq) * np.exp(1j * beta_scaled * y)
