import numpy as np
import pytest

from tempres import CalibrationError, ExperimentConfig, aggregate, calibrate, estimate_gls
from tempres.channels import mode_weight
from tempres.estimator import (
    calibration_config,
    expected_detections,
    record_components,
)
from tempres.montecarlo import DetectionRecord, detection_rates, run_experiment
from tempres import pipeline

TAUS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def noiseless_records(config, gamma, runs=1):
    """Records whose counts equal the model means exactly (rounded)."""
    records = []
    for tau in config.tau_grid:
        rate_s, rate_a = detection_rates(config, tau, gamma)
        n = config.mean_total_detections
        for run in range(runs):
            records.append(DetectionRecord(
                tau, gamma, run,
                tuple(int(round(n * r)) for r in rate_s[:4]),
                tuple(int(round(n * r)) for r in rate_a[:4])))
    return records


@pytest.fixture(scope="module")
def config():
    return ExperimentConfig(tau_grid=TAUS, gammas=(0.0,), repetitions=40,
                            mean_total_detections=1e6, master_seed=77)


@pytest.fixture(scope="module")
def noiseless_cal(config):
    return calibrate(noiseless_records(config, 0.0), 0.0, config)


def test_calibrate_requires_five_taus(config):
    records = [r for r in noiseless_records(config, 0.0) if r.tau_true < 0.7]
    with pytest.raises(CalibrationError, match="distinct tau"):
        calibrate(records, 0.0, config)


def test_calibrate_matches_closed_form_response(config, noiseless_cal):
    # quartic fit of p_1(tau) over [0, 1]: truncation error is the tau^6 term
    taus = np.linspace(0.0, 1.0, 50)
    fitted = np.array([noiseless_cal.mean_response(t)[5] for t in taus])
    exact = mode_weight(config.spec, taus, 1)
    assert np.abs(fitted - exact).max() < 5e-4


def test_calibrate_constant_response(config):
    records = [DetectionRecord(tau, 0.0, 0, (1000, 0, 0, 0), (0, 0, 0, 0))
               for tau in TAUS]
    cal = calibrate(records, 0.0, config)
    coeffs = cal.coeffs[0]   # channel s, n = 0
    assert coeffs[0] == pytest.approx(1000 / config.mean_total_detections, rel=1e-9)
    assert np.abs(coeffs[1:]).max() < 1e-12


def test_calibration_noise_shrinks_with_repetitions():
    # dense tau grid so the fit has enough residual degrees of freedom
    taus = tuple(np.linspace(0.0, 1.0, 13))
    rms = {}
    for reps in (50, 2000):
        cfg = ExperimentConfig(tau_grid=taus, gammas=(0.0,), repetitions=reps,
                               mean_total_detections=1e4, master_seed=3)
        cal = calibrate(run_experiment(cfg), 0.0, cfg)
        rms[reps] = cal.residual_rms.sum()
    assert rms[2000] < rms[50]


def test_estimate_noiseless_recovers_tau(config, noiseless_cal):
    rate_s, rate_a = detection_rates(config, 0.4, 0.0)
    n = config.mean_total_detections
    record = DetectionRecord(0.4, 0.0, 0,
                             tuple(int(round(n * r)) for r in rate_s[:4]),
                             tuple(int(round(n * r)) for r in rate_a[:4]))
    est = estimate_gls(record, noiseless_cal, config)
    assert not est.low_information
    assert est.tau_hat == pytest.approx(0.4, abs=1e-4)


def test_estimate_all_zero_counts(config, noiseless_cal):
    record = DetectionRecord(0.4, 0.0, 0, (0, 0, 0, 0), (0, 0, 0, 0))
    est = estimate_gls(record, noiseless_cal, config)
    assert est.tau_hat == 0.0 and est.low_information


def test_estimates_nonnegative_and_unbiased():
    cfg = ExperimentConfig(tau_grid=TAUS, gammas=(0.0,), repetitions=100,
                           mean_total_detections=1e4, master_seed=21)
    result = pipeline.run_pipeline(cfg, calibration_repetitions=400)
    hats = [gls.tau_hat for _, gls in result.estimates]
    assert all(h >= 0.0 for h in hats)

    by_tau = {s.tau_true: s for s in result.stats}
    stats = by_tau[0.6]
    se = np.sqrt(stats.variance / stats.n_runs)
    assert abs(stats.bias) < 3 * se

    # one-sided constraint folds the tau_true = 0 estimates upward
    assert by_tau[0.0].mean > 0.0


def test_aggregate_edge_cases():
    single = aggregate([0.3], 0.3, 0.0, 1e4)
    assert single.variance is None and single.variance_per_detection is None
    assert single.n_runs == 1

    same = aggregate([0.3, 0.3, 0.3], 0.25, 0.0, 1e4)
    assert same.variance == 0.0
    assert same.bias == pytest.approx(0.05)

    with pytest.raises(ValueError):
        aggregate([], 0.3, 0.0, 1e4)


def test_record_components_order(config):
    record = DetectionRecord(0.1, 0.0, 0, (1, 2, 3, 4), (5, 6, 7, 8))
    np.testing.assert_allclose(record_components(record, 10.0),
                               np.arange(1, 9) / 10.0)


def test_expected_detections(config):
    n_total, n_a = expected_detections(config, 1.0, 0.0)
    # anti-phase intensity at tau = sigma_t: (1/2)(1 - e^{-1/8}), tiny tail beyond n = 3
    assert n_a / config.mean_total_detections == pytest.approx(
        0.5 * (1 - np.exp(-0.125)), abs=1e-6)
    assert n_total <= config.mean_total_detections * (1 + 1e-9)


def test_calibration_config_disjoint_seed(config):
    cal_cfg = calibration_config(config, repetitions=10)
    assert cal_cfg.master_seed != config.master_seed
    assert cal_cfg.repetitions == 10
    assert cal_cfg.tau_grid == config.tau_grid
