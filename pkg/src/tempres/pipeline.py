"""Experiment orchestration: simulate, calibrate, estimate, aggregate."""

from collections import defaultdict
from dataclasses import dataclass

from . import estimator as est
from . import montecarlo as mc


@dataclass(frozen=True)
class PipelineResult:
    records: list              # DetectionRecord
    calibrations: dict         # gamma -> CalibrationModel
    estimates: list            # (DetectionRecord, GlsEstimate)
    stats: list                # EstimateStats, ordered by (tau, gamma)


def build_calibrations(config: mc.ExperimentConfig, records=None,
                       repetitions: int | None = None):
    """One CalibrationModel per coherence setting.

    With records=None, fresh calibration runs are simulated from a seed
    stream disjoint from the estimation data (the default: calibration and
    estimation never share counts).
    """
    if records is None:
        records = mc.run_experiment(est.calibration_config(config, repetitions))
    return {g: est.calibrate(records, g, config) for g in config.gammas}


def estimate_records(records, calibrations, config: mc.ExperimentConfig):
    return [(r, est.estimate_gls(r, calibrations[r.gamma], config)) for r in records]


def aggregate_estimates(estimates, config: mc.ExperimentConfig):
    groups = defaultdict(list)
    for record, gls in estimates:
        groups[(record.tau_true, record.gamma)].append(gls.tau_hat)
    stats = []
    for (tau, gamma), hats in sorted(groups.items()):
        n_total, _ = est.expected_detections(config, tau, gamma)
        stats.append(est.aggregate(hats, tau, gamma, n_total))
    return stats


def run_pipeline(config: mc.ExperimentConfig, records=None,
                 calibration_records=None,
                 calibration_repetitions: int | None = None) -> PipelineResult:
    """Full chain from counts to estimator statistics."""
    if records is None:
        records = mc.run_experiment(config)
    calibrations = build_calibrations(config, calibration_records,
                                      calibration_repetitions)
    estimates = estimate_records(records, calibrations, config)
    return PipelineResult(records=records, calibrations=calibrations,
                          estimates=estimates,
                          stats=aggregate_estimates(estimates, config))
