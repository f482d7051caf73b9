"""Scenario configuration, Monte Carlo sweeps, and CSV/plot-script emission.

Sweeps are embarrassingly parallel across trials; results are merged in
(sweep index, trial index) order so the output files are byte-identical
for any worker count. Floats are serialized with ``repr`` (shortest
round-trip form) for the same reason.
"""

import concurrent.futures
import csv
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis, beamforming
from .covariance import (pearson_correlation, sample_covariance,
                         save_matrix_csv, theoretical_ipnc)
from .errors import BeamlabError
from .pipeline import PipelineSettings, ppbss_beamformer
from .signal_model import (ArrayGeometry, MismatchSpec, ScenarioTruth,
                           generate_snapshots, realize_scenario, steering_vector)

SWEEP_KINDS = ("snr", "snapshots", "beampattern_rho", "beampattern_eta",
               "correlation", "crb")

RAW_COLUMNS = ("seed", "trial", "method", "sweep_value", "status", "sinr_db",
               "mu_hat", "zeta_hat", "eta_tilde", "rho_tilde", "c_rank",
               "pm_iterations", "pm_final_err", "doa_estimates")


@dataclass(frozen=True)
class ScenarioConfig:
    """Template for one scenario family; powers given in dB here."""

    element_count: int = 12
    spacing: float = 0.5
    soi_doa: float = 0.0
    snr_db: float = 10.0
    interferer_doas: tuple = (30.0, 50.0)
    inr_db: tuple = (30.0, 30.0)
    noise_power: float = 1.0
    snapshots: int = 100
    mismatch: str = "none"
    look_bound: float = 4.0
    epsilon_bound: float = float(np.sqrt(0.3))
    gain_std: float = 0.05
    phase_std: float = 0.025 * np.pi
    position_bound: float = 0.05

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry.ula(self.element_count, self.spacing)

    def mismatch_spec(self) -> MismatchSpec:
        return MismatchSpec(self.mismatch, self.look_bound, self.epsilon_bound,
                            self.gain_std, self.phase_std, self.position_bound)

    def realize(self, rng) -> ScenarioTruth:
        soi_power = self.noise_power * 10.0 ** (self.snr_db / 10.0)
        int_powers = self.noise_power * 10.0 ** (np.asarray(self.inr_db) / 10.0)
        return realize_scenario(self.geometry(), self.soi_doa, soi_power,
                                np.asarray(self.interferer_doas, float), int_powers,
                                self.noise_power, self.snapshots,
                                self.mismatch_spec(), rng)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    sweep: str = "snr"
    sweep_values: tuple = (-10.0, 0.0, 10.0, 20.0, 30.0)
    trials: int = 100
    seed: int = 20240901
    methods: tuple = ("ppbss", "optimal", "smi", "diagonal_loading")
    output_dir: str = "out"
    grid_size: int = 360
    soi_samples: int = 12
    fine_half_width_deg: float = 5.0
    fine_step_deg: float = 0.1
    sector_pad_deg: float = 4.0
    soi_half_width_deg: float = 4.0
    nfft: int = 4096
    power_delta: float = 1e-3
    power_iter_max: int = 50

    def __post_init__(self):
        if self.sweep not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.sweep!r}")
        if self.trials < 1 or not self.sweep_values or not self.methods:
            raise ValueError("need trials >= 1, sweep_values and methods nonempty")

    def pipeline_settings(self) -> PipelineSettings:
        return PipelineSettings(
            expected_interferers=len(self.scenario.interferer_doas),
            grid_size=self.grid_size,
            soi_sample_count=self.soi_samples,
            fine_half_width_deg=self.fine_half_width_deg,
            fine_step_deg=self.fine_step_deg,
            sector_pad_deg=self.sector_pad_deg,
            soi_half_width_deg=self.soi_half_width_deg,
            power_delta=self.power_delta,
            power_iter_max=self.power_iter_max,
            nfft=self.nfft,
        )


def trial_rng(seed: int, value_index: int, trial_index: int) -> np.random.Generator:
    """Counter-based substream for one (sweep point, trial) cell."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=seed, spawn_key=(value_index, trial_index))))


def scenario_at(config: ExperimentConfig, sweep_value) -> ScenarioConfig:
    if config.sweep == "snr":
        return replace(config.scenario, snr_db=float(sweep_value))
    if config.sweep == "snapshots":
        return replace(config.scenario, snapshots=int(sweep_value))
    return config.scenario


def run_trial(config: ExperimentConfig, trial_index: int, value_index: int = 0):
    """One Monte Carlo trial; returns a list of raw result rows (dicts).

    Deterministic given (seed, value_index, trial_index). Pipeline errors
    are recorded as a failure status instead of aborting the sweep.
    """
    sweep_value = config.sweep_values[value_index]
    scen = scenario_at(config, sweep_value)
    rng = trial_rng(config.seed, value_index, trial_index)
    truth = scen.realize(rng)
    data = generate_snapshots(truth, rng)
    scm = sample_covariance(data)
    nominal = steering_vector(scen.soi_doa, truth.geometry)

    rows = []
    for method in config.methods:
        row = {c: "" for c in RAW_COLUMNS}
        row.update(seed=config.seed, trial=trial_index, method=method,
                   sweep_value=sweep_value, status="ok")
        try:
            if method == "ppbss":
                result = ppbss_beamformer(data, truth.geometry, scen.soi_doa,
                                          config.pipeline_settings(), truth)
                stats = result.diagnostics["shrinkage"]
                pm = result.diagnostics["power_method"]
                row.update(
                    sinr_db=result.output_sinr_db,
                    mu_hat=stats.mu_hat, zeta_hat=stats.zeta_hat,
                    eta_tilde=stats.eta_tilde, rho_tilde=stats.rho_tilde,
                    c_rank=result.diagnostics["preprocessing_rank"],
                    pm_iterations=pm.iterations_used, pm_final_err=pm.final_err,
                    doa_estimates=";".join(
                        repr(float(v)) for v in result.diagnostics["estimated_doas"]),
                )
            elif method == "optimal":
                w = beamforming.optimal_weight(truth)
                row.update(sinr_db=beamforming.output_sinr_db(w, truth))
            elif method == "smi":
                w = beamforming.smi_weight(scm, nominal)
                row.update(sinr_db=beamforming.output_sinr_db(w, truth))
            elif method == "diagonal_loading":
                w = beamforming.diagonal_loading_weight(scm, nominal, scen.noise_power)
                row.update(sinr_db=beamforming.output_sinr_db(w, truth))
            else:
                raise ValueError(f"unknown method {method!r}")
        except BeamlabError as exc:
            row.update(status=type(exc).__name__, sinr_db="")
        rows.append(row)
    return rows


def _worker_count() -> int:
    env = os.environ.get("BEAMLAB_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def run_sweep(config: ExperimentConfig):
    """Execute the configured sweep and write CSV outputs plus a plot script.

    Returns the list of raw rows (SINR sweeps) or the sweep-specific
    result structure. Raises on an unwritable output directory before any
    computation is started.
    """
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    probe = os.path.join(out, ".write_probe")
    try:
        with open(probe, "w") as fh:
            fh.write("ok")
        os.remove(probe)
    except OSError as exc:
        raise OSError(f"output directory {out!r} is not writable") from exc

    if config.sweep in ("snr", "snapshots"):
        return _run_sinr_sweep(config)
    if config.sweep == "correlation":
        return _run_correlation(config)
    if config.sweep in ("beampattern_rho", "beampattern_eta"):
        return _run_beampattern(config)
    return _run_crb(config)


def _run_sinr_sweep(config: ExperimentConfig):
    cells = [(vi, ti) for vi in range(len(config.sweep_values))
             for ti in range(config.trials)]
    workers = _worker_count()
    results = {}
    if workers == 1:
        for vi, ti in cells:
            results[(vi, ti)] = run_trial(config, ti, vi)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {pool.submit(run_trial, config, ti, vi): (vi, ti) for vi, ti in cells}
            for fut in concurrent.futures.as_completed(futs):
                results[futs[fut]] = fut.result()
    rows = []
    for vi, ti in cells:
        rows.extend(results[(vi, ti)])

    _write_raw(os.path.join(config.output_dir, "raw.csv"), rows)
    agg = aggregate_rows(rows)
    _write_aggregate(config, agg)
    _emit_sinr_gnuplot(config)
    return rows


def aggregate_rows(rows):
    """Per-(sweep_value, method) means of successful trials.

    Output order follows first appearance in the raw rows, i.e. the
    configured sweep-value and method order.
    """
    agg = {}
    for row in rows:
        key = (row["sweep_value"], row["method"])
        entry = agg.setdefault(key, {"sum": 0.0, "ok": 0, "failed": 0})
        if row["status"] == "ok":
            entry["sum"] += float(row["sinr_db"])
            entry["ok"] += 1
        else:
            entry["failed"] += 1
    out = []
    for (value, method), entry in agg.items():
        mean = entry["sum"] / entry["ok"] if entry["ok"] else float("nan")
        out.append({"sweep_value": value, "method": method,
                    "mean_sinr_db": mean, "trials_ok": entry["ok"],
                    "trials_failed": entry["failed"]})
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _write_raw(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAW_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in RAW_COLUMNS])


def _write_aggregate(config, agg):
    path = os.path.join(config.output_dir, "aggregate.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep_value", "method", "mean_sinr_db",
                         "trials_ok", "trials_failed"])
        for entry in agg:
            writer.writerow([_fmt(entry["sweep_value"]), entry["method"],
                             _fmt(entry["mean_sinr_db"]), entry["trials_ok"],
                             entry["trials_failed"]])
    for method in config.methods:
        mpath = os.path.join(config.output_dir, f"agg_{method}.csv")
        with open(mpath, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["sweep_value", "mean_sinr_db"])
            for entry in agg:
                if entry["method"] == method:
                    writer.writerow([_fmt(entry["sweep_value"]),
                                     _fmt(entry["mean_sinr_db"])])


def load_and_verify(output_dir: str, tol: float = 1e-9):
    """Reload raw rows, recompute aggregates, and check the aggregate file.

    The mean rows are redundant by construction; this guards against
    stale or hand-edited outputs.
    """
    rows = []
    with open(os.path.join(output_dir, "raw.csv"), newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(rec)
    recomputed = aggregate_rows(rows)
    with open(os.path.join(output_dir, "aggregate.csv"), newline="") as fh:
        stored = list(csv.DictReader(fh))
    if len(stored) != len(recomputed):
        raise ValueError("aggregate.csv row count does not match raw.csv")
    for srow, rrow in zip(stored, recomputed):
        if srow["method"] != rrow["method"] or srow["sweep_value"] != _fmt(rrow["sweep_value"]):
            raise ValueError("aggregate.csv ordering does not match raw.csv")
        stored_mean = float(srow["mean_sinr_db"])
        if not (np.isnan(stored_mean) and np.isnan(rrow["mean_sinr_db"])):
            if abs(stored_mean - rrow["mean_sinr_db"]) > tol:
                raise ValueError("aggregate.csv means do not match raw rows")
    return rows, recomputed


def _emit_sinr_gnuplot(config):
    xlabel = "input SNR (dB)" if config.sweep == "snr" else "snapshots K"
    lines = [
        "# gnuplot script; data files live next to this script",
        "set datafile separator ','",
        "set key bottom right",
        f"set xlabel '{xlabel}'",
        "set ylabel 'output SINR (dB)'",
        "set grid",
    ]
    plots = [f"'agg_{m}.csv' using 1:2 skip 1 with linespoints title '{m}'"
             for m in config.methods]
    lines.append("plot " + ", \\\n     ".join(plots))
    _write_script(config, lines)


def _write_script(config, lines):
    with open(os.path.join(config.output_dir, "plot.gnuplot"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _run_correlation(config: ExperimentConfig):
    """Reconstruction-vs-truth column correlation study at the scenario SNR."""
    means = []
    heat = None
    for ti in range(config.trials):
        rng = trial_rng(config.seed, 0, ti)
        truth = config.scenario.realize(rng)
        data = generate_snapshots(truth, rng)
        result = ppbss_beamformer(data, truth.geometry, config.scenario.soi_doa,
                                  config.pipeline_settings(), truth)
        recon = result.diagnostics["reconstructed_ipnc"]
        ipnc = theoretical_ipnc(truth)
        cross = pearson_correlation(ipnc, recon)
        means.append(float(np.mean(np.diag(cross))))
        if ti == 0:
            both = np.hstack([ipnc, recon])
            heat = pearson_correlation(both, both)
            save_matrix_csv(os.path.join(config.output_dir, "truth_ipnc.csv"), ipnc)
            save_matrix_csv(os.path.join(config.output_dir, "reconstructed_ipnc.csv"), recon)
            np.savetxt(os.path.join(config.output_dir, "correlation_heatmap.csv"),
                       heat, delimiter=",")
    path = os.path.join(config.output_dir, "correlation_summary.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "mean_column_correlation"])
        for ti, val in enumerate(means):
            writer.writerow([ti, _fmt(val)])
    _write_script(config, [
        "set datafile separator ','",
        "set view map",
        "set xlabel 'column'",
        "set ylabel 'column'",
        "set cblabel 'Pearson correlation'",
        "splot 'correlation_heatmap.csv' matrix with image notitle",
    ])
    return {"heatmap": heat, "mean_column_correlation": means}


def _run_beampattern(config: ExperimentConfig):
    """Beampatterns of eta*I + rho*C for swept shrinkage parameters.

    The sectors come from one tracked realization with no padding, per
    the sector-width rule; the parameter under sweep takes the configured
    ``sweep_values`` while the other is held at its middle default.
    """
    rng = trial_rng(config.seed, 0, 0)
    truth = config.scenario.realize(rng)
    data = generate_snapshots(truth, rng)
    settings = replace(config.pipeline_settings(), sector_pad_deg=0.0)
    result = ppbss_beamformer(data, truth.geometry, config.scenario.soi_doa,
                              settings, truth)
    pre = result.diagnostics["preprocessing"] * truth.geometry.element_count
    a_s = result.soi_sv_used
    grid = np.arange(-90.0, 90.0 + 1e-9, 0.25)
    sweep_rho = config.sweep == "beampattern_rho"

    report = []
    for value in config.sweep_values:
        eta, rho = (1.0, float(value)) if sweep_rho else (float(value), 0.5)
        w = beamforming.mvdr_weight(
            eta * np.eye(pre.shape[0]) + rho * pre, a_s)
        pattern = beamforming.beampattern(w, grid, truth.geometry)
        name = f"beampattern_{'rho' if sweep_rho else 'eta'}_{value}.csv"
        with open(os.path.join(config.output_dir, name), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta_deg", "gain_db"])
            for theta, mag in zip(grid, pattern):
                writer.writerow([_fmt(float(theta)),
                                 _fmt(float(20 * np.log10(max(mag, 1e-300))))])
        approx, _ = beamforming.approx_beampattern(
            pre, eta, rho, a_s, truth.interferer_doas, truth.geometry)
        for theta, mag in zip(truth.interferer_doas, approx):
            report.append({"value": float(value), "theta_deg": float(theta),
                           "approx_gain_db": float(20 * np.log10(max(mag, 1e-300)))})

    with open(os.path.join(config.output_dir, "null_depth_report.csv"), "w",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "theta_deg", "approx_gain_db"])
        for rec in report:
            writer.writerow([_fmt(rec["value"]), _fmt(rec["theta_deg"]),
                             _fmt(rec["approx_gain_db"])])
    files = [f"beampattern_{'rho' if sweep_rho else 'eta'}_{v}.csv"
             for v in config.sweep_values]
    _write_script(config, [
        "set datafile separator ','",
        "set xlabel 'angle (deg)'",
        "set ylabel 'beampattern (dB)'",
        "set key bottom right",
        "set grid",
        "plot " + ", \\\n     ".join(
            f"'{name}' using 1:2 skip 1 with lines title '{name[:-4]}'"
            for name in files),
    ])
    return report


def _run_crb(config: ExperimentConfig):
    rows = analysis.doa_mse_experiment(
        config.scenario.geometry(), config.scenario.interferer_doas,
        config.sweep_values, config.trials, config.seed,
        soi_doa=config.scenario.soi_doa,
        snapshots=config.scenario.snapshots,
        half_width_deg=config.fine_half_width_deg,
        step_deg=config.fine_step_deg)
    path = os.path.join(config.output_dir, "crb.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snr_db", "mse_deg2", "crb_deg2"])
        for rec in rows:
            writer.writerow([_fmt(rec["snr_db"]), _fmt(rec["mse_deg2"]),
                             _fmt(rec["crb_deg2"])])
    _write_script(config, [
        "set datafile separator ','",
        "set xlabel 'SNR (dB)'",
        "set ylabel 'DoA MSE (deg^2)'",
        "set logscale y",
        "set grid",
        "plot 'crb.csv' using 1:2 skip 1 with linespoints title 'tracker MSE', \\",
        "     'crb.csv' using 1:3 skip 1 with linespoints title 'CRB'",
    ])
    return rows


def report_failures(rows) -> dict:
    """Count excluded (failed) trials per method for sweep reporting."""
    out = {}
    for row in rows:
        if row["status"] != "ok":
            out[row["method"]] = out.get(row["method"], 0) + 1
    return out
