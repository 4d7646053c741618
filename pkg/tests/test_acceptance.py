"""Acceptance checks, one test per criterion.

Each test evaluates every clause of its criterion at the stated tolerance,
records a PASS/FAIL line (shown in the terminal summary) and then asserts.
"""
import math
import time

import numpy as np
import pytest
from scipy import integrate

from irsperf.analytic import (
    amplification_factor_asymptotic,
    optimal_reflect_power,
    snr_limit_large_pi,
    snr_user_noqe,
    snr_user_with_gain,
)
from irsperf.experiments import ExperimentSpec, Sweep, run_experiment
from irsperf.montecarlo import amplification_factor_exact, reflected_power, sample_channels
from irsperf.quantization import (
    QuantizerConfig,
    ber_qpsk,
    loss_snr,
    q_function,
    qe_mean_factor,
    qe_mean_factor_taylor,
)
from irsperf.scenario import ScenarioConfig, db_to_linear, link_budget, linear_to_db

DEFAULT = ScenarioConfig()


def _db(x):
    return float(linear_to_db(x))


def _rows(table, **where):
    return table.select(**where)


def test_criterion_1_monte_carlo_converges_to_closed_form(criterion):
    t0 = time.perf_counter()
    (t,) = run_experiment(ExperimentSpec("fig2b", sweep=Sweep("n_elements", (64, 256, 1024)),
                                         trials=10_000))
    elapsed = time.perf_counter() - t0
    checks, gaps = [], []
    for n in (64, 256, 1024):
        ana = _rows(t, series="snr-asymptotic", n_elements=n)[0]["snr_db"]
        mc = _rows(t, series="snr-simulated", n_elements=n)[0]["snr_db"]
        gaps.append(abs(mc - ana))
        checks.append((f"N={n} gap {gaps[-1]:.4f} dB <= 0.5", gaps[-1] <= 0.5))
    checks.append((f"gaps {[round(g, 4) for g in gaps]} non-increasing",
                   gaps[0] >= gaps[1] >= gaps[2]))
    checks.append((f"runtime {elapsed:.1f} s <= 60", elapsed <= 60))
    assert criterion(1, "MC mean SNR within 0.5 dB of closed form, gap shrinking in N", checks), checks


def test_criterion_2_large_reflect_power_limit(criterion):
    s = float(snr_user_noqe(DEFAULT, DEFAULT.p_i * 1e8))
    limit = snr_limit_large_pi(DEFAULT)
    rel = abs(s / limit - 1)
    assert criterion(2, "SNR at 1e8 x nominal P_i within 1% of (pi^2/16) N gamma0",
                     [(f"relative gap {rel:.2e} <= 0.01", rel <= 0.01)])


def test_criterion_3_optimal_reflect_power(criterion):
    (t,) = run_experiment(ExperimentSpec("fig3"))
    base = ScenarioConfig().with_overrides(t.meta["config"])
    checks = []
    for key, meta in t.meta.items():
        if not key.startswith("optimum["):
            continue
        label = key[len("optimum["):-1]
        si = float(label.split(",")[0].split("=")[1].removesuffix("dBm"))
        su = float(label.split(",")[1].split("=")[1].removesuffix("dBm"))
        cfg = base.replace(sigma_i_sq_dbm=si, sigma_u_sq_dbm=su)
        opt = optimal_reflect_power(cfg)
        curve = np.array([r["snr_db"] for r in _rows(t, scenario=label)])
        slope = np.sign(np.diff(curve))
        slope = slope[slope != 0]
        turns = int(np.count_nonzero(np.diff(slope)))
        peak = int(np.argmax(curve))
        checks.append((f"{label}: single interior peak (turns={turns}, peak index {peak})",
                       turns == 1 and 0 < peak < curve.size - 1 and not opt.at_boundary))
        floor_gap = abs(curve[-1] - _db(snr_limit_large_pi(cfg)))
        checks.append((f"{label}: end of range {floor_gap:.4f} dB from floor <= 0.1", floor_gap <= 0.1))
        cell = opt.grid_p_i[max(peak - 1, 0)] <= opt.p_i_opt <= opt.grid_p_i[min(peak + 1, curve.size - 1)]
        checks.append((f"{label}: maximizer within one grid cell of grid peak", bool(cell)))
        h = 1e-4 * opt.p_i_opt
        deriv = (snr_user_noqe(cfg, opt.p_i_opt + h) - snr_user_noqe(cfg, opt.p_i_opt - h)) / (2 * h)
        stat = abs(deriv) * opt.p_i_opt / opt.snr_at_opt
        checks.append((f"{label}: stationarity {stat:.1e} <= 1e-3", stat <= 1e-3))
    assert len(checks) == 12
    assert criterion(3, "rise-peak-fall-floor curves with a verified interior maximizer", checks), checks


TABLE1 = {-70.0: (0.9, 0.83), -80.0: (0.9, 0.82), -90.0: (0.9, 0.79), -100.0: (0.8, 0.51)}
TABLE2 = {-70.0: (0.1, 0.62), -80.0: (0.3, 0.16), -90.0: (0.6, 0.06)}


def test_criterion_4_power_allocation_tables(criterion):
    t0 = time.perf_counter()
    (t1,) = run_experiment(ExperimentSpec("table1"))
    (t2,) = run_experiment(ExperimentSpec("table2"))
    elapsed = time.perf_counter() - t0
    checks = []
    for table, key, expected in ((t1, "sigma_u_dbm", TABLE1), (t2, "sigma_i_dbm", TABLE2)):
        for r in table.select():
            beta, gain = expected[r[key]]
            tag = f"sigma_i={r['sigma_i_dbm']:g},sigma_u={r['sigma_u_dbm']:g}"
            checks.append((f"{tag}: beta_opt {r['beta_opt']:g} == {beta:g}",
                           math.isclose(r["beta_opt"], beta, abs_tol=1e-9)))
            checks.append((f"{tag}: gain {r['rate_gain']:.3f} within 0.05 of {gain:g}",
                           abs(r["rate_gain"] - gain) <= 0.05))
    checks.append((f"runtime {elapsed:.2f} s <= 10", elapsed <= 10))
    assert len(checks) == 15
    assert criterion(4, "optimal power split and rate gains match both tables", checks), checks


def test_criterion_5_quantization_snr_loss(criterion):
    t0 = time.perf_counter()
    (t,) = run_experiment(ExperimentSpec("fig4"))
    elapsed = time.perf_counter() - t0
    checks = []

    def loss(kind, n, series, k):
        return _rows(t, kind=kind, n_elements=n, series=series, k=k)[0]

    for k in range(3, 7):
        v = loss("active", 1024, "loss-exact", k)["loss_db"]
        checks.append((f"active k={k} loss {v:.4f} dB < 0.22", v < 0.22))
    for k in range(2, 7):
        v = loss("passive", 1024, "loss-exact", k)["loss_db"]
        checks.append((f"passive k={k} loss {v:.4f} dB < 0.21", v < 0.21))
    for kind in ("active", "passive"):
        for k in range(3, 7):
            d = abs(loss(kind, 1024, "loss-exact", k)["loss_db"] - loss(kind, 1024, "loss-taylor", k)["loss_db"])
            checks.append((f"{kind} k={k} exact-vs-taylor {d:.4f} dB <= 0.02", d <= 0.02))
    for kind in ("active", "passive"):
        for k in range(1, 7):
            emp = loss(kind, 1024, "loss-empirical", k)
            d = abs(emp["loss_db"] - loss(kind, 1024, "loss-exact", k)["loss_db"])
            checks.append((f"{kind} k={k} MC-vs-closed {d:.4f} dB <= 0.05 "
                           f"(se {emp['std_err_db']:.4f})", d <= 0.05))
    checks.append((f"runtime {elapsed:.1f} s <= 120", elapsed <= 120))
    assert criterion(5, "SNR loss bounds, Taylor agreement and Monte Carlo agreement at N=1024", checks), checks


def test_criterion_6_rate_loss(criterion):
    tables = {t.panel: t for t in run_experiment(ExperimentSpec("fig5"))}
    checks = []
    for kind, k, bound in (("active", 3, 0.08), ("passive", 2, 0.07)):
        t = tables[kind]
        ex = _rows(t, n_elements=1024, series="rate-no-qe", k=k)[0]["rate"]
        qu = _rows(t, n_elements=1024, series="rate-quantized", k=k)[0]["rate"]
        checks.append((f"{kind} k={k} AR loss {ex - qu:.4f} < {bound}", ex - qu < bound))
    assert criterion(6, "achievable-rate loss at N=1024", checks), checks


def test_criterion_7_ber(criterion):
    tables = {t.panel: t for t in run_experiment(ExperimentSpec("fig6"))}
    checks = []
    for kind, k in (("active", 3), ("passive", 2)):
        t = tables[kind]
        for n in sorted(set(t.column("n_elements"))):
            b0 = _rows(t, n_elements=n, series="ber-no-qe", k=k)[0]["ber"]
            bq = _rows(t, n_elements=n, series="ber-quantized", k=k)[0]["ber"]
            rel = abs(bq - b0) / b0
            checks.append((f"{kind} N={n} k={k} relative BER change {rel:.4f} <= 0.05", rel <= 0.05))
            bers = [_rows(t, n_elements=n, series="ber-quantized", k=j)[0]["ber"] for j in range(1, 7)]
            checks.append((f"{kind} N={n}: BER falls as quantized SNR rises with k",
                           all(b < a for a, b in zip(bers, bers[1:]))))
    snr = db_to_linear(np.linspace(-20, 15, 500))
    checks.append(("BER strictly decreasing on an SNR grid", bool(np.all(np.diff(ber_qpsk(snr)) < 0))))
    assert criterion(7, "BER with quantization within 5% of unquantized, decreasing in SNR", checks), checks


def _random_config(rng):
    return ScenarioConfig(
        irs_pos=(float(rng.uniform(5, 150)), float(rng.uniform(1, 60))),
        alpha_h_sq=float(rng.uniform(0.1, 2)),
        alpha_f_sq=float(rng.uniform(0.1, 2)),
        alpha_g_sq=float(rng.uniform(0.1, 2)),
        sigma_i_sq_dbm=float(rng.uniform(-120, -40)),
        sigma_u_sq_dbm=float(rng.uniform(-120, -40)),
        n_elements=int(rng.integers(1, 4097)),
        ps_dbm=float(rng.uniform(-10, 50)),
        pi_dbm=float(rng.uniform(-40, 40)),
    )


def test_criterion_8_property_suites(criterion):
    rng = np.random.default_rng(2024)
    checks = []

    x = rng.uniform(-300, 300, 10_000)
    rt = np.max(np.abs(linear_to_db(db_to_linear(x)) - x) / np.maximum(1, np.abs(x)))
    checks.append((f"dB round trip {rt:.1e} <= 1e-12", rt <= 1e-12))

    worst = 0.0
    for _ in range(1000):
        cfg = _random_config(rng)
        lb = link_budget(cfg)
        lam = amplification_factor_asymptotic(cfg.p_i, cfg.p_s, lb.l_g, cfg.alpha_g_sq,
                                              cfg.sigma_i_sq, cfg.n_elements)
        worst = max(worst, abs(snr_user_noqe(cfg) / snr_user_with_gain(cfg, lam) - 1))
    checks.append((f"gain form vs rational form {worst:.1e} <= 1e-10", worst <= 1e-10))

    mono_k = all(
        all(b <= a for a, b in zip(ls, ls[1:]))
        for kind in ("active", "passive")
        for ls in [[loss_snr(DEFAULT, QuantizerConfig(k), kind) for k in range(1, 9)]]
    )
    mono_n = all(
        all(b >= a for a, b in zip(ls, ls[1:]))
        for kind in ("active", "passive") for k in range(1, 7)
        for ls in [[loss_snr(DEFAULT.replace(n_elements=n), QuantizerConfig(k), kind)
                    for n in (16, 64, 256, 1024)]]
    )
    checks.append(("loss non-increasing in k", mono_k))
    checks.append(("loss non-decreasing in N", mono_n))

    bound = all(abs(qe_mean_factor(k) - qe_mean_factor_taylor(k)) <= (math.pi / 2**k) ** 4 / 120 + 1e-15
                for k in range(1, 11))
    checks.append(("sinc-vs-Taylor within x^4/120", bound))

    ref, _ = integrate.quad(lambda z: math.exp(-z * z / 2) / math.sqrt(2 * math.pi), 1.0, np.inf,
                            epsabs=1e-13)
    checks.append(("Q(0) == 0.5", q_function(0.0) == 0.5))
    checks.append((f"Q(1) vs quadrature {abs(q_function(1.0) - ref):.1e} <= 1e-8",
                   abs(q_function(1.0) - ref) <= 1e-8))

    cons = 0.0
    for seed in range(50):
        cfg = DEFAULT.replace(n_elements=int(rng.integers(1, 2048)))
        lb = link_budget(cfg)
        real = sample_channels(cfg, seed)
        lam = amplification_factor_exact(real, cfg.p_i, cfg.p_s, lb.l_g, cfg.sigma_i_sq)
        cons = max(cons, abs(reflected_power(real, lam, cfg.p_s, lb.l_g, cfg.sigma_i_sq) / cfg.p_i - 1))
    checks.append((f"reflected power conservation {cons:.1e} <= 1e-10", cons <= 1e-10))

    spec = ExperimentSpec("custom", sweep=Sweep("n_elements", (32, 128)), trials=200, seed=9)
    a, b = run_experiment(spec)[0].to_csv(), run_experiment(spec)[0].to_csv()
    checks.append(("deterministic replay byte-identical", a.encode() == b.encode()))
    assert criterion(8, "always-on property suites", checks), checks


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
