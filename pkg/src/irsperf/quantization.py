"""Finite-resolution phase shifters: the k-bit phase set, quantization error
statistics and the resulting SNR / rate / BER loss for active and passive IRS.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import erfc

from irsperf.analytic import PI, snr_coefficients
from irsperf.scenario import ScenarioConfig, link_budget

Kind = Literal["active", "passive"]
Variant = Literal["exact", "exact-no-qe", "quantized", "taylor"]
TWO_PI = 2.0 * PI


@dataclass(frozen=True)
class QuantizerConfig:
    """k-bit phase shifter with phases ``(2m + 1) pi / 2^k``, m = 0 .. 2^k - 1."""

    k: int

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")

    @property
    def levels(self) -> int:
        return 2**self.k

    @property
    def delta_x(self) -> float:
        """Half-width of the quantization error interval."""
        return PI / 2**self.k

    @property
    def omega(self) -> np.ndarray:
        return (2 * np.arange(self.levels) + 1) * self.delta_x


def quantize_phase(theta, q: QuantizerConfig):
    """Nearest feasible phase and the error ``theta_q - theta`` wrapped to [-pi, pi).

    Ties between two neighbours go to the smaller phase value.
    """
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    step = 2.0 * q.delta_x
    m = np.clip(np.ceil(t / step) - 1, 0, q.levels - 1)
    theta_q = (2.0 * m + 1.0) * q.delta_x
    delta = np.mod(theta_q - t + PI, TWO_PI) - PI
    if np.ndim(theta_q) == 0:
        return float(theta_q), float(delta)
    return theta_q, delta


def qe_mean_factor(k: int) -> float:
    """``E[exp(j dtheta)] = sinc(pi / 2^k)`` for uniform quantization error."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x = PI / 2**k
    return math.sin(x) / x


def qe_mean_factor_taylor(k: int) -> float:
    """Second-order Taylor value ``1 - (pi / 2^k)^2 / 6``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 - (PI / 2**k) ** 2 / 6.0


def _factor(q: QuantizerConfig | None, variant: Variant) -> float:
    if variant in ("exact", "exact-no-qe"):
        return 1.0
    if q is None:
        raise ValueError(f"variant {variant!r} needs a quantizer")
    if variant == "quantized":
        return qe_mean_factor(q.k)
    if variant == "taylor":
        return qe_mean_factor_taylor(q.k)
    raise ValueError(f"unknown variant {variant!r}")


def _active_terms(cfg: ScenarioConfig, p_s, p_i):
    """(direct term D_a, per-element reflected amplitude, denominator)."""
    lb = link_budget(cfg)
    n = cfg.n_elements
    d_a = snr_coefficients(cfg, p_s).d_a
    refl = PI / 2 * np.sqrt(p_i * lb.l_f * lb.l_g) * math.sqrt(cfg.alpha_f_sq * cfg.alpha_g_sq)
    den = (
        2 * n * p_i * lb.l_f * cfg.alpha_f_sq * cfg.sigma_i_sq
        + n * cfg.sigma_u_sq * (2 * p_s * lb.l_g * cfg.alpha_g_sq + cfg.sigma_i_sq)
    )
    return d_a, refl, den


def _passive_terms(cfg: ScenarioConfig):
    lb = link_budget(cfg)
    d_p = math.sqrt(PI / 2) * math.sqrt(lb.l_h * cfg.alpha_h_sq)
    refl = PI / 2 * math.sqrt(lb.l_f * lb.l_g * cfg.alpha_f_sq * cfg.alpha_g_sq)
    return d_p, refl


def snr_active(cfg: ScenarioConfig, q: QuantizerConfig | None, variant: Variant = "quantized",
               p_i=None, p_s: float | None = None):
    """Asymptotic user SNR behind an active IRS.

    ``variant`` selects the phase-error factor: ``"exact"`` (no quantization),
    ``"quantized"`` (sinc) or ``"taylor"``.
    """
    p_s = cfg.p_s if p_s is None else p_s
    p_i = cfg.p_i if p_i is None else np.asarray(p_i, dtype=float)
    d_a, refl, den = _active_terms(cfg, p_s, p_i)
    amp = d_a + cfg.n_elements * refl * _factor(q, variant)
    return p_s * amp**2 / den


def snr_passive(cfg: ScenarioConfig, q: QuantizerConfig | None, variant: Variant = "quantized",
                p_s: float | None = None):
    """Asymptotic user SNR behind a passive IRS (unit gain, no added noise)."""
    p_s = cfg.p_s if p_s is None else p_s
    d_p, refl = _passive_terms(cfg)
    amp = d_p + cfg.n_elements * refl * _factor(q, variant)
    return p_s * amp**2 / cfg.sigma_u_sq


def snr(cfg: ScenarioConfig, q: QuantizerConfig | None, kind: Kind, variant: Variant = "quantized"):
    if kind == "active":
        return snr_active(cfg, q, variant)
    if kind == "passive":
        return snr_passive(cfg, q, variant)
    raise ValueError(f"unknown IRS kind {kind!r}")


def loss_snr(cfg: ScenarioConfig, q: QuantizerConfig, kind: Kind = "active",
             form: Literal["exact", "taylor"] = "exact") -> float:
    """SNR performance loss ``snr_no_qe / snr_with_qe`` (>= 1) in closed ratio form."""
    if kind == "active":
        d, refl, _ = _active_terms(cfg, cfg.p_s, cfg.p_i)
    elif kind == "passive":
        d, refl = _passive_terms(cfg)
    else:
        raise ValueError(f"unknown IRS kind {kind!r}")
    base = d / cfg.n_elements
    x = q.delta_x
    if form == "exact":
        s = qe_mean_factor(q.k)
        ratio = refl * (1.0 - s) / (base + refl * s)
    elif form == "taylor":
        t = 1.0 - x**2 / 6.0
        ratio = (refl * x**2 / 6.0) / (base + refl * t)
    else:
        raise ValueError(f"unknown form {form!r}")
    return float((1.0 + ratio) ** 2)


def achievable_rate(snr):
    """``log2(1 + snr)`` in bits/s/Hz."""
    s = np.asarray(snr, dtype=float)
    if np.any(s < 0):
        raise ValueError("snr must be non-negative")
    out = np.log2(1.0 + s)
    return float(out) if out.ndim == 0 else out


def q_function(z):
    """Gaussian tail probability ``P(X > z)`` for standard normal X."""
    out = 0.5 * erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def ber_qpsk(snr):
    """QPSK bit error rate ``Q(sqrt(snr))``."""
    s = np.asarray(snr, dtype=float)
    if np.any(s < 0):
        raise ValueError("snr must be non-negative")
    return q_function(np.sqrt(s))


@dataclass(frozen=True)
class LossReport:
    kind: str
    k: int
    snr_exact: float
    snr_quantized: float
    snr_taylor: float
    loss: float
    loss_approx: float
    ar_exact: float
    ar_quantized: float
    ar_taylor: float
    ber_exact: float
    ber_quantized: float
    ber_taylor: float

    @property
    def loss_db(self) -> float:
        return 10.0 * math.log10(self.loss)

    @property
    def loss_approx_db(self) -> float:
        return 10.0 * math.log10(self.loss_approx)

    @property
    def ar_loss(self) -> float:
        return self.ar_exact - self.ar_quantized


def loss_report(cfg: ScenarioConfig, q: QuantizerConfig, kind: Kind) -> LossReport:
    s = {v: float(snr(cfg, q, kind, v)) for v in ("exact", "quantized", "taylor")}
    return LossReport(
        kind=kind,
        k=q.k,
        snr_exact=s["exact"],
        snr_quantized=s["quantized"],
        snr_taylor=s["taylor"],
        loss=loss_snr(cfg, q, kind, "exact"),
        loss_approx=loss_snr(cfg, q, kind, "taylor"),
        ar_exact=achievable_rate(s["exact"]),
        ar_quantized=achievable_rate(s["quantized"]),
        ar_taylor=achievable_rate(s["taylor"]),
        ber_exact=ber_qpsk(s["exact"]),
        ber_quantized=ber_qpsk(s["quantized"]),
        ber_taylor=ber_qpsk(s["taylor"]),
    )
