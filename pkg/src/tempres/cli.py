"""Command-line front end: fisher / simulate / estimate / reproduce.

Every command reads an optional JSON config, writes CSV into --out, and drops
a manifest.json with the echoed config, seed and SHA-256 digests of every
output, which is enough to reproduce each file bit for bit.

Exit codes: 0 success, 2 config error, 3 I/O error, 4 data mismatch.
"""

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import config as config_mod
from . import estimator as est
from . import montecarlo as mc
from . import pipeline, svgplot
from .config import ConfigError
from .information import fisher_report
from .montecarlo import N_RECORDED, DetectionRecord

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_MISMATCH = 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def fmt(value) -> str:
    """12 significant digits; empty cell for missing values."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _load_config(path, seed=None) -> config_mod.RunConfig:
    try:
        run = config_mod.load(path)
    except ConfigError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc
    if seed is not None:
        run = replace(run, experiment=replace(run.experiment, master_seed=seed),
                      raw={**run.raw, "master_seed": seed})
    return run


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _write_manifest(out_dir: Path, run: config_mod.RunConfig, outputs):
    digests = []
    for name in outputs:
        digest = hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
        digests.append({"path": name, "sha256": digest})
    manifest = {
        "tool_version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "master_seed": run.experiment.master_seed,
        "config": run.raw,
        "outputs": digests,
    }
    try:
        with open(out_dir / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write manifest: {exc}") from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create output directory {out}: {exc}") from exc
    return out


# ---------------------------------------------------------------- commands

def cmd_fisher(args):
    run = _load_config(args.config, args.seed)
    cfg = run.experiment
    out = _out_dir(args)
    rows = []
    for tau in cfg.tau_grid:
        for gamma in cfg.gammas:
            r = fisher_report(cfg.spec, tau, gamma)
            rows.append([r.tau, r.gamma, r.fi_s, r.fi_a, r.fi_total, r.qfi,
                         r.fi_intensity_s, r.fi_intensity_a,
                         r.fi_intensity_incoherent, r.crb_per_event])
    _write_csv(out / "fisher_report.csv",
               ["tau", "gamma", "fi_s", "fi_a", "fi_total", "qfi",
                "fi_int_s", "fi_int_a", "fi_int_incoh", "crb_per_event"],
               rows)
    _write_manifest(out, run, ["fisher_report.csv"])
    return 0


def _records_rows(records):
    for r in records:
        for channel, counts in (("s", r.counts_s), ("a", r.counts_a)):
            for n, c in enumerate(counts):
                yield [r.tau_true, r.gamma, r.run_index, channel, n, c]


def cmd_simulate(args):
    run = _load_config(args.config, args.seed)
    out = _out_dir(args)
    records = mc.run_experiment(run.experiment)
    _write_csv(out / "records.csv",
               ["tau_true", "gamma", "run", "channel", "n", "counts"],
               _records_rows(records))
    _write_manifest(out, run, ["records.csv"])
    return 0


def read_records(path):
    """Parse a records.csv back into DetectionRecord objects."""
    cells = {}
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["tau_true", "gamma", "run", "channel", "n", "counts"]
            if reader.fieldnames != expected:
                raise CliError(EXIT_MISMATCH,
                               f"{path}: unexpected header {reader.fieldnames}")
            for row in reader:
                key = (float(row["tau_true"]), float(row["gamma"]), int(row["run"]))
                cell = cells.setdefault(key, {"s": [None] * N_RECORDED,
                                              "a": [None] * N_RECORDED})
                cell[row["channel"]][int(row["n"])] = int(row["counts"])
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except (KeyError, ValueError, IndexError) as exc:
        raise CliError(EXIT_MISMATCH, f"{path}: malformed records file: {exc}") from exc

    records = []
    for (tau, gamma, run_idx), counts in sorted(cells.items()):
        if any(c is None for c in counts["s"] + counts["a"]):
            raise CliError(EXIT_MISMATCH,
                           f"{path}: incomplete counts for tau={tau}, gamma={gamma}, "
                           f"run={run_idx}")
        records.append(DetectionRecord(tau, gamma, run_idx,
                                       tuple(counts["s"]), tuple(counts["a"])))
    return records


def _check_grid(records, cfg: mc.ExperimentConfig, path):
    have = {(r.tau_true, r.gamma) for r in records}
    want = {(t, g) for t in cfg.tau_grid for g in cfg.gammas}
    if have != want:
        raise CliError(EXIT_MISMATCH,
                       f"{path}: records grid does not match config "
                       f"(records: {len(have)} cells, config: {len(want)})")
    runs_per_cell = len(records) / max(len(want), 1)
    if runs_per_cell != cfg.repetitions:
        raise CliError(EXIT_MISMATCH,
                       f"{path}: {runs_per_cell} runs per cell, config expects "
                       f"{cfg.repetitions}")


def _stats_rows(stats):
    for s in stats:
        yield [s.tau_true, s.gamma, s.n_runs, s.mean, s.variance, s.bias,
               s.variance_per_detection]


STATS_HEADER = ["tau_true", "gamma", "n_runs", "mean", "variance", "bias",
                "variance_per_detection"]


def cmd_estimate(args):
    run = _load_config(args.config, args.seed)
    cfg = run.experiment
    out = _out_dir(args)
    records = read_records(args.records)
    _check_grid(records, cfg, args.records)

    result = pipeline.run_pipeline(
        cfg, records=records,
        calibration_records=records if run.reuse_records_for_calibration else None,
        calibration_repetitions=run.calibration_repetitions)
    _write_csv(out / "estimates.csv",
               ["tau_true", "gamma", "run", "tau_hat"],
               ([r.tau_true, r.gamma, r.run_index, gls.tau_hat]
                for r, gls in result.estimates))
    _write_csv(out / "stats.csv", STATS_HEADER, _stats_rows(result.stats))
    _write_manifest(out, run, ["estimates.csv", "stats.csv"])
    return 0


# ------------------------------------------------------------- reproduce

def _bound_series(cfg: mc.ExperimentConfig):
    """Quantum CRB and incoherent intensity-only CRB per detection vs tau."""
    from .channels import incoherent_intensity_profile
    from .information import intensity_fi, qfi_constant

    q = qfi_constant(cfg.spec)
    qcrb = [(tau, 1.0 / q) for tau in cfg.tau_grid]
    int_crb = []
    for tau in cfg.tau_grid:
        if tau <= 0:
            continue   # Rayleigh's curse: bound diverges at tau = 0
        fi = intensity_fi(lambda t: incoherent_intensity_profile(cfg.spec, t), tau)
        if fi > 0:
            int_crb.append((tau, 1.0 / fi))
    return qcrb, int_crb


def _figure_pipeline(run: config_mod.RunConfig, gammas):
    cfg = replace(run.experiment, gammas=tuple(gammas))
    return cfg, pipeline.run_pipeline(
        cfg, calibration_repetitions=run.calibration_repetitions)


def cmd_reproduce(args):
    run = _load_config(args.config, args.seed)
    out = _out_dir(args)
    figure = args.figure

    if figure == "fig2":
        cfg, result = _figure_pipeline(run, (0.0, 0.25, 0.5))
        rows = [[s.tau_true, s.gamma, s.mean,
                 None if s.variance is None else s.variance**0.5]
                for s in result.stats]
        _write_csv(out / "fig2.csv", ["tau_true", "gamma", "mean", "std"], rows)
        series = {}
        for gamma in cfg.gammas:
            pts = [(s.tau_true, s.mean) for s in result.stats if s.gamma == gamma]
            series[f"gamma={gamma:g}"] = tuple(zip(*pts))
        series["truth"] = (cfg.tau_grid, cfg.tau_grid)
        svg_args = dict(series=series, title="Estimated vs true separation",
                        xlabel="true tau / sigma_t", ylabel="mean estimate")
    elif figure == "fig3":
        cfg, result = _figure_pipeline(run, (0.5, 0.375, 0.25, 0.125, 0.0))
        qcrb, int_crb = _bound_series(cfg)
        rows = []
        series = {}
        for gamma in cfg.gammas:
            pts = [(s.tau_true, s.variance_per_detection) for s in result.stats
                   if s.gamma == gamma and s.variance_per_detection is not None]
            name = f"gamma={gamma:g}"
            rows += [[name, tau, v] for tau, v in pts]
            series[name] = tuple(zip(*pts))
        rows += [["qcrb", tau, v] for tau, v in qcrb]
        rows += [["intensity_crb", tau, v] for tau, v in int_crb]
        series["qcrb"] = tuple(zip(*qcrb))
        series["intensity_crb"] = tuple(zip(*int_crb))
        _write_csv(out / "fig3.csv", ["series", "tau", "value"], rows)
        svg_args = dict(series=series, title="Estimator variance per detection",
                        xlabel="tau / sigma_t", ylabel="variance per detection",
                        ylog=True)
    elif figure == "fig4":
        cfg, result = _figure_pipeline(run, (0.0,))
        qcrb, int_crb = _bound_series(cfg)
        per_total, per_a = [], []
        for s in result.stats:
            if s.variance is None:
                continue
            n_total, n_a = est.expected_detections(cfg, s.tau_true, s.gamma)
            per_total.append((s.tau_true, s.variance * n_total))
            if n_a > 0:
                per_a.append((s.tau_true, s.variance * n_a))
        rows = ([["per_total_detection", tau, v] for tau, v in per_total]
                + [["per_a_detection", tau, v] for tau, v in per_a]
                + [["qcrb", tau, v] for tau, v in qcrb]
                + [["intensity_crb", tau, v] for tau, v in int_crb])
        _write_csv(out / "fig4.csv", ["series", "tau", "value"], rows)
        series = {"per_total_detection": tuple(zip(*per_total)),
                  "per_a_detection": tuple(zip(*per_a)),
                  "qcrb": tuple(zip(*qcrb)),
                  "intensity_crb": tuple(zip(*int_crb))}
        svg_args = dict(series=series,
                        title="Coherent estimation error per detection",
                        xlabel="tau / sigma_t", ylabel="variance per detection",
                        ylog=True)
    else:
        raise CliError(EXIT_CONFIG, f"unknown figure id {figure!r}")

    outputs = [f"{figure}.csv"]
    if args.svg:
        try:
            svgplot.write_svg(out / f"{figure}.svg", **svg_args)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write SVG: {exc}") from exc
        outputs.append(f"{figure}.svg")
    _write_manifest(out, run, outputs)
    return 0


# ------------------------------------------------------------------ main

def build_parser():
    parser = argparse.ArgumentParser(
        prog="tempres",
        description="Temporal two-pulse separation estimation: Fisher bounds, "
                    "Monte Carlo photon counting and constrained GLS estimation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (defaults when omitted)")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("fisher", help="Fisher information and CRB table")
    common(p)
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("simulate", help="Monte Carlo detection records")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="calibrate and estimate from records")
    p.add_argument("records", help="records.csv produced by 'simulate'")
    common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("reproduce", help="figure-ready CSV (and optional SVG)")
    p.add_argument("figure", choices=["fig2", "fig3", "fig4"])
    common(p)
    p.add_argument("--svg", action="store_true", help="also render an SVG plot")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"tempres: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
