"""Asymptotic performance model of active/passive IRS-aided links, with a
Monte Carlo oracle to check it."""

from irsperf.scenario import (
    LinkBudget,
    ScenarioConfig,
    db_to_linear,
    dbm_to_watts,
    link_budget,
    linear_to_db,
    watts_to_dbm,
)
from irsperf.analytic import (
    PaSweep,
    PowerSplit,
    ReflectPowerOptimum,
    SnrCoefficients,
    amplification_factor_asymptotic,
    gamma0_asymptotic,
    gamma0_empirical,
    optimal_reflect_power,
    pa_sweep,
    snr_coefficients,
    snr_limit_large_pi,
    snr_limit_noise_dominated,
    snr_limit_noiseless_irs,
    snr_user_noqe,
)
from irsperf.quantization import (
    LossReport,
    QuantizerConfig,
    achievable_rate,
    ber_qpsk,
    loss_report,
    loss_snr,
    q_function,
    qe_mean_factor,
    qe_mean_factor_taylor,
    quantize_phase,
    snr_active,
    snr_passive,
)
from irsperf.montecarlo import (
    ChannelRealization,
    SimulationResult,
    TrialResult,
    amplification_factor_exact,
    sample_channels,
    simulate_received_snr,
    simulate_trial,
)

__version__ = "0.1.0"
