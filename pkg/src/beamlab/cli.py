"""Command-line front end for scenario runs and figure-reproduction sweeps."""

import argparse
import dataclasses
import sys

from .experiments import (ExperimentConfig, aggregate_rows, report_failures,
                          run_sweep)
from .presets import describe_presets, load_config


def _add_common(parser):
    parser.add_argument("--config", metavar="PATH", help="TOML config file")
    parser.add_argument("--preset", metavar="NAME", help="named preset to start from")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--trials", type=int, metavar="N")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--methods", metavar="LIST",
                        help="comma-separated method tags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamlab",
        description="Robust adaptive beamforming simulator: Monte Carlo SINR "
                    "sweeps, beampattern and correlation studies, CRB tracking.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("run", "run the configured scenario at a single sweep point"),
        ("sweep", "run the configured sweep (snr or snapshots)"),
        ("beampattern", "beampattern study over shrinkage parameters"),
        ("correlation", "reconstruction-vs-truth correlation heatmap"),
        ("crb", "tracker MSE against the DoA Cramer-Rao bound"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "beampattern":
            p.add_argument("--parameter", choices=("rho", "eta"), default="rho")
    lp = sub.add_parser("presets", help="list available presets")
    return parser


_FORCED_SWEEP = {
    "beampattern": None,  # chosen by --parameter
    "correlation": "correlation",
    "crb": "crb",
}

_DEFAULT_PRESET = {
    "beampattern_rho": "fig3",
    "beampattern_eta": "fig4",
    "correlation": "fig1",
    "crb": "crb",
}


def _build_config(args) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.methods is not None:
        overrides["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())

    forced = _FORCED_SWEEP.get(args.command)
    if args.command == "beampattern":
        forced = f"beampattern_{args.parameter}"
    preset_name = args.preset
    if preset_name is None and args.config is None and forced is not None:
        preset_name = _DEFAULT_PRESET[forced]
    config = load_config(args.config, preset_name, **overrides)
    if forced is not None and config.sweep != forced:
        base = _DEFAULT_PRESET[forced]
        merged = load_config(args.config, preset_name or base, **overrides)
        config = dataclasses.replace(merged, sweep=forced)
    if args.command == "run":
        # single scenario: evaluate the configured point only
        value = (config.scenario.snr_db if config.sweep == "snr"
                 else config.scenario.snapshots)
        if config.sweep not in ("snr", "snapshots"):
            config = dataclasses.replace(config, sweep="snr",
                                         sweep_values=(config.scenario.snr_db,))
        else:
            config = dataclasses.replace(config, sweep_values=(value,))
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "presets":
        print(describe_presets())
        return 0
    try:
        config = _build_config(args)
        result = run_sweep(config)
    except Exception as exc:
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if config.sweep in ("snr", "snapshots"):
        failures = report_failures(result)
        for entry in aggregate_rows(result):
            print(f"{config.sweep}={entry['sweep_value']} method={entry['method']} "
                  f"mean_sinr_db={entry['mean_sinr_db']:.3f} "
                  f"ok={entry['trials_ok']} failed={entry['trials_failed']}")
        if failures:
            print(f"excluded failed trials per method: {failures}")
    elif config.sweep == "correlation":
        vals = result["mean_column_correlation"]
        print(f"mean corresponding-column correlation over {len(vals)} trials: "
              f"{sum(vals) / len(vals):.4f}")
    elif config.sweep == "crb":
        for rec in result:
            print(f"snr_db={rec['snr_db']} mse_deg2={rec['mse_deg2']:.6g} "
                  f"crb_deg2={rec['crb_deg2']:.6g}")
    else:
        for rec in result:
            print(f"value={rec['value']} theta={rec['theta_deg']} "
                  f"approx_gain_db={rec['approx_gain_db']:.2f}")
    print(f"outputs written to {config.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
