"""Closed-form SNR model of an active IRS link with continuous phase shifters.

Large-N expressions obtained by replacing channel-magnitude averages with
their Rayleigh moments: average SNR at the IRS, the user SNR as a function of
reflect power, its limiting regimes, the optimal reflect power for a fixed
BS power, and a BS/IRS power-split sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from irsperf.scenario import ScenarioConfig, dbm_to_watts, link_budget

PI = math.pi

# default reflect power scan, dBm
PI_SCAN_DBM = (-60.0, 50.0)
PI_SCAN_POINTS = 400


def gamma0_asymptotic(p_s, l_g, alpha_g_sq, sigma_i_sq):
    """Average SNR at the IRS for large N, ``2 P_s L_g alpha_g^2 / sigma_i^2``."""
    if np.any(np.asarray(sigma_i_sq) <= 0):
        raise ValueError("sigma_i_sq must be positive")
    return 2.0 * p_s * l_g * alpha_g_sq / sigma_i_sq


def gamma0_empirical(g, p_s, l_g, sigma_i_sq):
    """Average SNR at the IRS for one set of BS-IRS channel draws ``g``."""
    g = np.asarray(g)
    if g.size == 0:
        raise ValueError("need at least one channel coefficient")
    if sigma_i_sq <= 0:
        raise ValueError("sigma_i_sq must be positive")
    return p_s * l_g * float(np.sum(np.abs(g) ** 2)) / (g.size * sigma_i_sq)


def amplification_factor_asymptotic(p_i, p_s, l_g, alpha_g_sq, sigma_i_sq, n):
    """Common per-element gain that spends ``p_i`` on average (large N)."""
    return np.sqrt(p_i / (n * (2.0 * p_s * l_g * alpha_g_sq + sigma_i_sq)))


@dataclass(frozen=True)
class SnrCoefficients:
    """Constants of the rational form ``(C1 + C2 Pi + C3 sqrt(Pi)) / (C4 Pi + C5)``.

    ``stationarity_a/b/c`` are the coefficients of the derivative numerator
    ``a sqrt(Pi) + b / sqrt(Pi) + c``, obtained by differentiating the rational
    form directly: ``a = -C3 C4``, ``b = C3 C5``, ``c = 2 (C2 C5 - C1 C4)``.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float
    b1: float
    b2: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    d_a: float
    stationarity_a: float
    stationarity_b: float
    stationarity_c: float


def snr_coefficients(cfg: ScenarioConfig, p_s: float | None = None) -> SnrCoefficients:
    lb = link_budget(cfg)
    p_s = cfg.p_s if p_s is None else p_s
    n = cfg.n_elements
    si, su = cfg.sigma_i_sq, cfg.sigma_u_sq
    ah2, af2, ag2 = cfg.alpha_h_sq, cfg.alpha_f_sq, cfg.alpha_g_sq

    a1 = PI * lb.l_h * lb.l_g * ah2 * ag2
    a2 = PI / 2 * lb.l_h * ah2
    a3 = PI**2 / 4 * lb.l_f * lb.l_g * af2 * ag2
    a4 = PI * math.sqrt(PI / 2) * math.sqrt(ah2 * af2 * ag2)
    a5 = 2 * lb.l_h * lb.l_g**2 * lb.l_f * ag2
    a6 = lb.l_f * lb.l_g * lb.l_h
    b1 = 2 * lb.l_f * af2
    b2 = 2 * lb.l_g * ag2

    c1 = a1 * p_s**2 + a2 * p_s * si
    c2 = a3 * n * p_s
    c3 = a4 * p_s * math.sqrt(n * (a5 * p_s + a6 * si))
    c4 = b1 * si
    c5 = b2 * p_s * su + su * si
    d_a = math.sqrt(PI / 2) * math.sqrt(ah2) * math.sqrt(n * lb.l_h * (2 * p_s * lb.l_g * ag2 + si))
    return SnrCoefficients(
        a1, a2, a3, a4, a5, a6, b1, b2, c1, c2, c3, c4, c5, d_a,
        stationarity_a=-c3 * c4,
        stationarity_b=c3 * c5,
        stationarity_c=2 * (c2 * c5 - c1 * c4),
    )


def snr_user_noqe(cfg: ScenarioConfig, p_i=None, p_s: float | None = None):
    """Asymptotic user SNR without phase quantization.

    ``p_i`` may be an array (watts) to evaluate a whole reflect-power sweep;
    both powers default to the config values.
    """
    c = snr_coefficients(cfg, p_s)
    p_i = cfg.p_i if p_i is None else np.asarray(p_i, dtype=float)
    return (c.c1 + c.c2 * p_i + c.c3 * np.sqrt(p_i)) / (c.c4 * p_i + c.c5)


def snr_user_with_gain(cfg: ScenarioConfig, amplification, p_s: float | None = None):
    """User SNR written in terms of the amplification factor (unsubstituted form)."""
    lb = link_budget(cfg)
    p_s = cfg.p_s if p_s is None else p_s
    n = cfg.n_elements
    lam = np.asarray(amplification, dtype=float)
    direct = math.sqrt(PI / 2) * math.sqrt(lb.l_h * cfg.alpha_h_sq)
    reflected = PI / 2 * lam * n * math.sqrt(lb.l_f * lb.l_g * cfg.alpha_f_sq * cfg.alpha_g_sq)
    noise = 2 * lam**2 * n * lb.l_f * cfg.alpha_f_sq * cfg.sigma_i_sq + cfg.sigma_u_sq
    return p_s * (direct + reflected) ** 2 / noise


def snr_limit_large_pi(cfg: ScenarioConfig) -> float:
    """``Pi -> inf`` limit: ``(pi^2 / 16) N gamma0``."""
    lb = link_budget(cfg)
    g0 = gamma0_asymptotic(cfg.p_s, lb.l_g, cfg.alpha_g_sq, cfg.sigma_i_sq)
    return PI**2 / 16 * cfg.n_elements * g0


def snr_limit_noise_dominated(cfg: ScenarioConfig, p_i=None):
    """``sigma_i^2 -> inf`` regime, decreasing in ``Pi``."""
    c = snr_coefficients(cfg)
    p_i = cfg.p_i if p_i is None else np.asarray(p_i, dtype=float)
    return c.a2 * cfg.p_s / (c.b1 * p_i + cfg.sigma_u_sq)


def snr_limit_noiseless_irs(cfg: ScenarioConfig, p_i=None):
    """``sigma_i^2 -> 0`` regime, increasing in ``Pi``."""
    c = snr_coefficients(cfg)
    p_s, n = cfg.p_s, cfg.n_elements
    p_i = cfg.p_i if p_i is None else np.asarray(p_i, dtype=float)
    num = c.a1 * p_s**2 + c.a3 * n * p_s * p_i + c.a4 * p_s * np.sqrt(c.a5 * n * p_s * p_i)
    return num / (c.b2 * p_s * cfg.sigma_u_sq)


# --- optimal reflect power -------------------------------------------------

_INVPHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``. Returns ``(x, f(x))``."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    x = 0.5 * (a + b)
    return x, f(x)


def stationary_candidates(coef: SnrCoefficients) -> tuple[float, float]:
    """Both reflect-power roots of ``a sqrt(Pi) + b / sqrt(Pi) + c = 0``.

    Uses the closed template ``(-2ab + c^2 +- sqrt(c^4 - 4abc^2)) / (2a^2)``.
    Squaring admits one spurious root; :func:`optimal_reflect_power` keeps the
    one that actually zeroes the derivative. NaN when undefined.
    """
    a, b, c = coef.stationarity_a, coef.stationarity_b, coef.stationarity_c
    if a == 0:
        return (math.nan, math.nan)
    disc = c**4 - 4 * a * b * c**2
    if disc < 0:
        return (math.nan, math.nan)
    r = math.sqrt(disc)
    return ((-2 * a * b + c**2 + r) / (2 * a**2), (-2 * a * b + c**2 - r) / (2 * a**2))


@dataclass(frozen=True)
class ReflectPowerOptimum:
    p_i_opt: float
    snr_at_opt: float
    method: str  # "numeric" or "analytic-root"
    at_boundary: bool
    analytic_root: float  # NaN if no real interior root
    candidates: tuple[float, float]
    grid_p_i: np.ndarray = field(repr=False)
    grid_snr: np.ndarray = field(repr=False)

    @property
    def grid_index(self) -> int:
        return int(np.argmax(self.grid_snr))


def optimal_reflect_power(
    cfg: ScenarioConfig,
    p_min_dbm: float = PI_SCAN_DBM[0],
    p_max_dbm: float = PI_SCAN_DBM[1],
    n_grid: int = PI_SCAN_POINTS,
) -> ReflectPowerOptimum:
    """Reflect power maximizing :func:`snr_user_noqe` at fixed BS power.

    A log-spaced grid scan brackets the peak and golden-section search on
    ``log10(Pi)`` refines it; the result is always the numeric one. The
    analytic stationary point is reported alongside for cross-checking. When
    the grid maximum sits on an end point there is no interior peak and that
    end point is returned with ``at_boundary`` set.
    """
    grid = dbm_to_watts(np.linspace(p_min_dbm, p_max_dbm, n_grid))
    snr = snr_user_noqe(cfg, grid)
    i = int(np.argmax(snr))

    coef = snr_coefficients(cfg)
    cands = stationary_candidates(coef)
    root = math.nan
    for p in cands:
        if not (p > 0 and math.isfinite(p)):
            continue
        x = math.sqrt(p)
        resid = coef.stationarity_a * x + coef.stationarity_b / x + coef.stationarity_c
        scale = abs(coef.stationarity_a * x) + abs(coef.stationarity_b / x) + abs(coef.stationarity_c)
        if abs(resid) <= 1e-8 * scale and grid[0] < p < grid[-1]:
            root = p

    if i == 0 or i == n_grid - 1:
        return ReflectPowerOptimum(
            float(grid[i]), float(snr[i]), "numeric", True, root, cands, grid, snr
        )

    f = lambda t: float(snr_user_noqe(cfg, 10.0**t))
    t_opt, s_opt = golden_section_max(f, math.log10(grid[i - 1]), math.log10(grid[i + 1]))
    return ReflectPowerOptimum(
        10.0**t_opt, s_opt, "numeric", False, root, cands, grid, snr
    )


# --- power allocation ------------------------------------------------------


@dataclass(frozen=True)
class PowerSplit:
    beta: float
    p_total: float
    p_s: float
    p_i: float

    @classmethod
    def from_beta(cls, beta: float, p_total: float) -> "PowerSplit":
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta}")
        p_i = beta * p_total
        return cls(beta, p_total, p_total - p_i, p_i)


@dataclass(frozen=True)
class PaSweep:
    betas: np.ndarray
    snr: np.ndarray
    rate: np.ndarray
    beta_opt: float
    rate_opt: float
    rate_baseline: float
    baseline_beta: float = 0.5

    @property
    def gain(self) -> float:
        """Rate gain of the best split over the baseline (equal) split, bits/s/Hz."""
        return self.rate_opt - self.rate_baseline


DEFAULT_BETA_GRID = np.round(np.linspace(0.0, 1.0, 11), 10)


def _split_rate(cfg: ScenarioConfig, split: PowerSplit) -> tuple[float, float]:
    snr = float(snr_user_noqe(cfg, split.p_i, p_s=split.p_s))
    return snr, math.log2(1.0 + snr)


def pa_sweep(cfg: ScenarioConfig, p_total: float, beta_grid=None, baseline: float = 0.5) -> PaSweep:
    """Achievable rate over a grid of IRS power fractions ``beta``.

    ``Pi = beta P_T`` and ``Ps = (1 - beta) P_T``. The optimum is the grid
    argmax; the gain is reported against ``beta = baseline``.
    """
    betas = DEFAULT_BETA_GRID if beta_grid is None else np.asarray(beta_grid, dtype=float)
    if betas.size == 0:
        raise ValueError("beta grid is empty")
    if np.any((betas < 0) | (betas > 1)):
        raise ValueError("beta grid values must lie in [0, 1]")
    snr = np.empty(betas.size)
    rate = np.empty(betas.size)
    for j, b in enumerate(betas):
        snr[j], rate[j] = _split_rate(cfg, PowerSplit.from_beta(float(b), p_total))
    k = int(np.argmax(rate))
    _, base_rate = _split_rate(cfg, PowerSplit.from_beta(baseline, p_total))
    return PaSweep(betas, snr, rate, float(betas[k]), float(rate[k]), base_rate, baseline)
