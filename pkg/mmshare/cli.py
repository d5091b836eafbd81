"""
Command-line front end.

``mmshare run`` runs a campaign and writes ``results.json`` plus one CDF CSV per
configuration, ``mmshare sweep`` runs one campaign per gNB density and writes ``sweep.csv``,
and ``mmshare pattern`` writes the radiation pattern of an array as ``pattern.csv``.

Exit status is 0 on success, 1 for configuration errors (unreadable or invalid config,
bad overrides, bad densities or grid steps) and 2 for output errors (existing result files
without ``--force``, unwritable directories).
"""

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import pandas as pd

from mmshare.allocation import allocation_dataframe
from mmshare.antenna import ArrayGeometry, pattern_grid
from mmshare.deployment import deployment_dataframe
from mmshare.exceptions import BadDensityList
from mmshare.harness import (
    CONFIGURATIONS,
    check_densities,
    density_sweep,
    link_dataframe,
    run_campaign,
    simulate_trial,
)
from mmshare.scenario import load_config, validate_config
from mmshare.utils.results_io import (
    check_outputs_free,
    write_cdf_csv,
    write_csv,
    write_results_json,
)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 2


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Everything a subcommand needs, as parsed from the command line."""

    command: str
    config_path: str = None
    output_dir: str = "."
    overrides: tuple = ()
    master_seed: int = None
    num_trials: int = None
    num_workers: int = 1
    force: bool = False
    densities: str = None
    log_dir: str = None
    wandb_logging: bool = False
    project_name: str = None
    dump_trials: int = 0
    array: str = "gnb"
    phi_step_deg: float = 1.0
    theta_step_deg: float = 1.0

    @classmethod
    def from_args(cls, args):
        return cls(
            command=args.command,
            config_path=args.config,
            output_dir=args.out,
            overrides=tuple(args.set or ()),
            master_seed=args.seed,
            num_trials=args.trials,
            num_workers=args.workers,
            force=args.force,
            densities=getattr(args, "densities", None),
            log_dir=getattr(args, "log_dir", None),
            wandb_logging=getattr(args, "wandb", False),
            project_name=getattr(args, "project_name", None),
            dump_trials=getattr(args, "dump_trials", 0),
            array=getattr(args, "array", "gnb"),
            phi_step_deg=getattr(args, "phi_step", 1.0),
            theta_step_deg=getattr(args, "theta_step", 1.0),
        )

    @property
    def output_paths(self):
        return {"logs": self.log_dir} if self.log_dir else None


def _error(message):
    print(f"mmshare: error: {message}", file=sys.stderr)


def load_scenario(manifest):
    """Read the config file (if any), apply overrides and validate."""
    try:
        cfg = load_config(manifest.config_path, manifest.overrides)
    except json.JSONDecodeError as e:
        raise ValueError(f"config file {manifest.config_path} is not valid JSON: {e}") from e
    except OSError as e:
        raise ValueError(
            f"cannot read config file {manifest.config_path}: {e.strerror or e}"
        ) from e
    replacements = {}
    if manifest.master_seed is not None:
        replacements["master_seed"] = manifest.master_seed
    if manifest.num_trials is not None:
        replacements["num_trials"] = manifest.num_trials
    return validate_config(dataclasses.replace(cfg, **replacements))


def _prepare_outputs(manifest, names):
    out = Path(manifest.output_dir)
    targets = [out / name for name in names]
    check_outputs_free(targets, manifest.force)
    out.mkdir(parents=True, exist_ok=True)
    return targets


def _print_table(df):
    print(df.to_string(index=False, float_format=lambda v: f"{v:.9g}"))


def _write_dumps(scenario, manifest, out):
    frames = {"deployment": [], "link": [], "allocation": []}
    for k in range(min(manifest.dump_trials, scenario.num_trials)):
        outcome = simulate_trial(scenario, k)
        frames["deployment"].append(deployment_dataframe(outcome.deployment, k))
        frames["link"].append(link_dataframe(outcome, scenario))
        frames["allocation"].append(allocation_dataframe(k, outcome.allocations.values()))
    for kind, parts in frames.items():
        write_csv(pd.concat(parts, ignore_index=True), out / f"{kind}_dump.csv")


def cmd_run(manifest):
    """
    Run a campaign, write results.json and the four CDF CSVs, print the summary table.

    Returns
    -------
    int
        Exit status.
    """
    try:
        scenario = load_scenario(manifest)
    except (ValueError, TypeError) as e:
        _error(e)
        return EXIT_CONFIG_ERROR

    names = ["results.json"] + [f"{name}.csv" for name in CONFIGURATIONS]
    if manifest.dump_trials > 0:
        names += ["deployment_dump.csv", "link_dump.csv", "allocation_dump.csv"]
    try:
        _prepare_outputs(manifest, names)
    except OSError as e:
        _error(e)
        return EXIT_IO_ERROR

    try:
        result = run_campaign(
            scenario,
            num_workers=manifest.num_workers,
            output_paths=manifest.output_paths,
            wandb_logging=manifest.wandb_logging,
            project_name=manifest.project_name,
        )
    except ValueError as e:
        _error(e)
        return EXIT_CONFIG_ERROR

    out = Path(manifest.output_dir)
    try:
        summary = result.summary()
        write_results_json(summary, out / "results.json")
        for name in CONFIGURATIONS:
            write_cdf_csv(result.cdf(name), out / f"{name}.csv")
        if manifest.dump_trials > 0:
            _write_dumps(scenario, manifest, out)
    except OSError as e:
        _error(e)
        return EXIT_IO_ERROR

    table = pd.DataFrame([
        {
            "configuration": name,
            "jain": values["jain"],
            "mean_throughput_bps": values["mean_throughput_bps"],
        }
        for name, values in summary["configurations"].items()
    ])
    _print_table(table)
    return EXIT_OK


def parse_densities(text):
    """
    Parse a comma-separated density list such as "50,75,100".

    Raises
    ------
    BadDensityList
        If the list is empty, unparseable or holds a non-positive value.
    """
    if text is None or not text.strip():
        raise BadDensityList("The density list is empty.")
    densities = []
    for part in text.split(","):
        try:
            densities.append(float(part))
        except ValueError:
            raise BadDensityList(f"Density {part.strip()!r} is not a number.") from None
    return check_densities(densities)


def cmd_sweep(manifest):
    """
    Run one campaign per density and write sweep.csv.

    Returns
    -------
    int
        Exit status.
    """
    try:
        scenario = load_scenario(manifest)
        densities = parse_densities(manifest.densities)
    except (ValueError, TypeError) as e:
        _error(e)
        return EXIT_CONFIG_ERROR

    try:
        (target,) = _prepare_outputs(manifest, ["sweep.csv"])
    except OSError as e:
        _error(e)
        return EXIT_IO_ERROR

    try:
        sweep = density_sweep(
            scenario,
            densities,
            num_workers=manifest.num_workers,
            output_paths=manifest.output_paths,
            wandb_logging=manifest.wandb_logging,
            project_name=manifest.project_name,
        )
    except ValueError as e:
        _error(e)
        return EXIT_CONFIG_ERROR

    try:
        write_csv(sweep, target)
    except OSError as e:
        _error(e)
        return EXIT_IO_ERROR

    _print_table(sweep)
    return EXIT_OK


def cmd_pattern(manifest):
    """
    Write the radiation pattern grid of the gNB or UE array to pattern.csv.

    Returns
    -------
    int
        Exit status.
    """
    try:
        scenario = load_scenario(manifest)
        if manifest.array == "ue":
            geom = ArrayGeometry(*scenario.ue_array, element_pattern=scenario.ue_element_pattern)
        else:
            geom = ArrayGeometry(*scenario.gnb_array, element_pattern=scenario.gnb_element_pattern)
        grid = pattern_grid(geom, manifest.phi_step_deg, manifest.theta_step_deg)
    except (ValueError, TypeError) as e:
        _error(e)
        return EXIT_CONFIG_ERROR

    try:
        (target,) = _prepare_outputs(manifest, ["pattern.csv"])
        write_csv(grid, target)
    except OSError as e:
        _error(e)
        return EXIT_IO_ERROR

    peak = grid.loc[grid["gain_db"].idxmax()]
    print(
        f"{manifest.array} array {geom.rows}x{geom.cols}: peak gain {peak['gain_db']:.9g} dB "
        f"at phi={peak['phi_deg']:g}, theta={peak['theta_deg']:g} ({len(grid)} points)"
    )
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "pattern": cmd_pattern}


def build_parser():
    """Argument parser with the run, sweep and pattern subcommands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="Scenario JSON file (defaults are used when omitted).")
    common.add_argument("--out", default=".", help="Output directory (created if absent).")
    common.add_argument("--seed", type=int, default=None, help="Master seed override.")
    common.add_argument("--trials", type=int, default=None, help="Number of trials override.")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="Worker processes (results do not depend on it).")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="Override a configuration field; repeatable.")
    common.add_argument("--force", action="store_true",
                        help="Overwrite existing result files.")

    logging_args = argparse.ArgumentParser(add_help=False)
    logging_args.add_argument("--log-dir", default=None,
                              help="Write per-trial metrics with a CSV logger under this directory.")
    logging_args.add_argument("--wandb", action="store_true",
                              help="Log per-trial metrics to Weights & Biases.")
    logging_args.add_argument("--project-name", default=None, help="wandb project name.")

    parser = argparse.ArgumentParser(
        prog="mmshare",
        description="Baseline vs dynamic spectrum sharing between mmWave operators.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", parents=[common, logging_args],
                                help="Run a campaign and write results.json and CDF CSVs.")
    run.add_argument("--dump-trials", type=int, default=0, metavar="K",
                     help="Also dump the deployment, links and allocations of the first K trials.")

    sweep = subparsers.add_parser("sweep", parents=[common, logging_args],
                                  help="Run one campaign per gNB density and write sweep.csv.")
    sweep.add_argument("--densities", default="50,75,100",
                       help="Comma-separated gNB densities per km^2 (default 50,75,100).")

    pattern = subparsers.add_parser("pattern", parents=[common],
                                    help="Write an array radiation pattern to pattern.csv.")
    pattern.add_argument("--array", choices=["gnb", "ue"], default="gnb")
    pattern.add_argument("--phi-step", type=float, default=1.0, help="Azimuth step in degrees.")
    pattern.add_argument("--theta-step", type=float, default=1.0, help="Zenith step in degrees.")

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    manifest = RunManifest.from_args(args)
    return COMMANDS[manifest.command](manifest)


if __name__ == "__main__":
    sys.exit(main())
