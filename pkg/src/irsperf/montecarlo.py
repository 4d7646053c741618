"""Monte Carlo oracle for the received SNR.

Each trial samples Rayleigh channels, sets the IRS phases from the actual
channel phases (including the direct-link phase), optionally quantizes them,
picks the per-realization amplification factor that spends exactly ``P_i`` and
evaluates the SNR from the full complex sum. Nothing here uses the large-N
moment substitutions of :mod:`irsperf.analytic`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from irsperf.quantization import Kind, QuantizerConfig, quantize_phase
from irsperf.scenario import LinkBudget, ScenarioConfig, link_budget

DEFAULT_TRIALS = 10_000
_BATCH = 256


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the BS-user (``h``), BS-IRS (``g``) and IRS-user (``f``) channels.

    Real and imaginary parts are independent with variance ``alpha^2`` each,
    so ``E|g|^2 = 2 alpha_g^2`` and ``|g|`` is Rayleigh with parameter ``alpha_g``.
    """

    h: complex
    g: np.ndarray
    f: np.ndarray

    @property
    def n(self) -> int:
        return self.g.size


def _complex_normal(rng: np.random.Generator, alpha_sq: float, size):
    s = math.sqrt(alpha_sq)
    return rng.normal(0.0, s, size) + 1j * rng.normal(0.0, s, size)


def sample_channels(cfg: ScenarioConfig, seed) -> ChannelRealization:
    """Deterministic draw for ``seed`` (an int or a sequence of ints)."""
    rng = np.random.default_rng(seed)
    n = cfg.n_elements
    h = complex(_complex_normal(rng, cfg.alpha_h_sq, None))
    g = _complex_normal(rng, cfg.alpha_g_sq, n)
    f = _complex_normal(rng, cfg.alpha_f_sq, n)
    return ChannelRealization(h, g, f)


def amplification_factor_exact(real: ChannelRealization, p_i, p_s, l_g, sigma_i_sq):
    """Per-realization gain for which the reflected power equals ``p_i``."""
    return math.sqrt(p_i / (p_s * l_g * float(np.sum(np.abs(real.g) ** 2)) + real.n * sigma_i_sq))


def reflected_power(real: ChannelRealization, p, p_s, l_g, sigma_i_sq) -> float:
    """Total power leaving the IRS for element gains ``p`` (scalar or vector)."""
    p2 = np.abs(np.broadcast_to(p, real.g.shape)) ** 2
    return float(p_s * l_g * np.sum(p2 * np.abs(real.g) ** 2) + sigma_i_sq * np.sum(p2))


@dataclass(frozen=True)
class TrialResult:
    snr: float
    signal_power: float
    amplified_noise_power: float
    receiver_noise_power: float
    lambda_a_exact: float


def _phases(h, g, f, q: QuantizerConfig | None):
    """IRS phase that co-phases every reflected path with the direct path."""
    theta_ic = np.angle(f) - np.angle(g) - np.angle(h)[..., None]
    if q is None:
        return theta_ic
    theta_q, _ = quantize_phase(theta_ic, q)
    return theta_q


def _evaluate(h, g, f, q, kind, p_s, p_i, lb: LinkBudget, sigma_i_sq, sigma_u_sq):
    """Vectorized over a leading trial axis. Returns a dict of per-trial arrays."""
    n = g.shape[-1]
    if kind == "active":
        lam = np.sqrt(p_i / (p_s * lb.l_g * np.sum(np.abs(g) ** 2, axis=-1) + n * sigma_i_sq))
    elif kind == "passive":
        lam = np.ones(h.shape)
    else:
        raise ValueError(f"unknown IRS kind {kind!r}")
    theta = _phases(h, g, f, q)
    p = lam[..., None] * np.exp(1j * theta)
    composite = math.sqrt(lb.l_h) * np.conj(h) + math.sqrt(lb.l_f * lb.l_g) * np.sum(
        np.conj(f) * p * g, axis=-1
    )
    signal = p_s * np.abs(composite) ** 2
    if kind == "active":
        amp_noise = lb.l_f * sigma_i_sq * np.sum(np.abs(f * p) ** 2, axis=-1)
    else:
        amp_noise = np.zeros(h.shape)
    return {
        "snr": signal / (amp_noise + sigma_u_sq),
        "signal": signal,
        "amp_noise": amp_noise,
        "lam": lam,
        "composite": composite,
        "g_energy": np.sum(np.abs(g) ** 2, axis=-1),
    }


def simulate_trial(cfg: ScenarioConfig, real: ChannelRealization, q: QuantizerConfig | None = None,
                   kind: Kind = "active", p_i: float | None = None,
                   p_s: float | None = None) -> TrialResult:
    lb = link_budget(cfg)
    p_s = cfg.p_s if p_s is None else p_s
    p_i = cfg.p_i if p_i is None else p_i
    out = _evaluate(np.asarray([real.h]), real.g[None, :], real.f[None, :], q, kind,
                    p_s, p_i, lb, cfg.sigma_i_sq, cfg.sigma_u_sq)
    return TrialResult(
        snr=float(out["snr"][0]),
        signal_power=float(out["signal"][0]),
        amplified_noise_power=float(out["amp_noise"][0]),
        receiver_noise_power=cfg.sigma_u_sq,
        lambda_a_exact=float(out["lam"][0]),
    )


def trial_seed(seed: int, trial: int) -> list[int]:
    """Entropy for the RNG stream of one trial; independent of trial order."""
    return [int(seed), int(trial)]


def _draw_batch(cfg: ScenarioConfig, seed: int, start: int, stop: int):
    n = cfg.n_elements
    h = np.empty(stop - start, complex)
    g = np.empty((stop - start, n), complex)
    f = np.empty((stop - start, n), complex)
    for j, t in enumerate(range(start, stop)):
        r = sample_channels(cfg, trial_seed(seed, t))
        h[j], g[j], f[j] = r.h, r.g, r.f
    return h, g, f


@dataclass(frozen=True)
class SimulationResult:
    """Trial statistics of the oracle. ``snr`` holds the per-trial values in trial order."""

    mean_snr: float
    std_err: float
    trials: int
    snr: np.ndarray = field(repr=False)
    mean_lambda: float = math.nan
    gamma0_mean: float = math.nan
    gamma0_std_err: float = math.nan
    snr_of_means: float = math.nan

    @property
    def mean_snr_db(self) -> float:
        return 10.0 * math.log10(self.mean_snr)

    @property
    def amplitude_bias_db(self) -> float:
        """Gap between the mean SNR and the SNR of the mean signal amplitude.

        Diagnostic for the step that replaces the signal sum by its
        expectation before squaring.
        """
        return 10.0 * math.log10(self.mean_snr / self.snr_of_means)


def _run_chunk(args):
    cfg, q, kind, seed, start, stop, p_s, p_i = args
    lb = link_budget(cfg)
    parts = []
    for a in range(start, stop, _BATCH):
        b = min(a + _BATCH, stop)
        h, g, f = _draw_batch(cfg, seed, a, b)
        out = _evaluate(h, g, f, q, kind, p_s, p_i, lb, cfg.sigma_i_sq, cfg.sigma_u_sq)
        parts.append(np.stack([
            out["snr"], out["lam"], out["g_energy"], np.abs(out["composite"]),
            out["amp_noise"],
        ]))
    return np.concatenate(parts, axis=1)


def simulate_received_snr(cfg: ScenarioConfig, q: QuantizerConfig | None = None,
                          kind: Kind = "active", trials: int = DEFAULT_TRIALS, seed: int = 0,
                          p_i: float | None = None, p_s: float | None = None,
                          workers: int = 1) -> SimulationResult:
    """Mean received SNR over ``trials`` independent channel realizations.

    Trial ``t`` always uses the RNG stream of ``(seed, t)``, so results do not
    depend on batching or on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if kind not in ("active", "passive"):
        raise ValueError(f"unknown IRS kind {kind!r}")
    p_s = cfg.p_s if p_s is None else p_s
    p_i = cfg.p_i if p_i is None else p_i

    bounds = np.linspace(0, trials, max(1, min(workers, trials)) + 1).astype(int)
    jobs = [(cfg, q, kind, seed, int(a), int(b), p_s, p_i) for a, b in zip(bounds[:-1], bounds[1:])]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            chunks = list(ex.map(_run_chunk, jobs))
    else:
        chunks = [_run_chunk(j) for j in jobs]
    snr, lam, g_energy, amp, amp_noise = np.concatenate(chunks, axis=1)

    lb = link_budget(cfg)
    gamma0 = p_s * lb.l_g * g_energy / (cfg.n_elements * cfg.sigma_i_sq)
    std_err = float(np.std(snr, ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    g0_err = float(np.std(gamma0, ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    snr_of_means = p_s * float(np.mean(amp)) ** 2 / (float(np.mean(amp_noise)) + cfg.sigma_u_sq)
    return SimulationResult(
        mean_snr=float(np.mean(snr)),
        std_err=std_err,
        trials=trials,
        snr=snr,
        mean_lambda=float(np.mean(lam)),
        gamma0_mean=float(np.mean(gamma0)),
        gamma0_std_err=g0_err,
        snr_of_means=snr_of_means,
    )
