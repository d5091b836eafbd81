"""
Monte Carlo trials and campaigns.

One trial draws a deployment, the links of every operator, the association and the
interferers' scheduling decisions, then scores the typical UE under four configurations: the
baseline and dynamic allocations, each with the SINR and with the interference-free SNR.
Both policies see exactly the same random draws, so their difference is never noise.

A campaign runs ``num_trials`` independently seeded trials (optionally in worker processes)
and aggregates, per configuration, the sorted throughput samples, Jain's index over them and
their mean. Aggregation sorts the samples and sums with ``math.fsum``, so the result does not
depend on the number of workers.
"""

import dataclasses
import functools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from mmshare import allocation
from mmshare.allocation import (
    BASELINE,
    DYNAMIC,
    POLICIES,
    FairnessReport,
    baseline_allocation,
    dynamic_allocation,
    fairness_report,
    typical_gnb,
)
from mmshare.antenna import ArrayGeometry, beamforming_gain
from mmshare.channel import LinkState, build_link_table
from mmshare.deployment import generate_deployment
from mmshare.exceptions import AllZero, BadDensityList, DegenerateTrial, EmptyInput
from mmshare.link import UNASSOCIATED, associate, sinr, throughput
from mmshare.scenario import (
    derive_trial_seed,
    scenario_to_dict,
    trial_rng,
    validate_config,
)
from mmshare.utils import logging_utils
from mmshare.utils.results_io import SCHEMA_VERSION, round_sig

CONFIGURATIONS = ("baseline_sinr", "dynamic_sinr", "baseline_snr", "dynamic_snr")
MAX_RESAMPLES = 1000


@dataclasses.dataclass(frozen=True)
class TrialRecord:
    """Typical-UE throughputs (bit/s) of one trial under the four configurations."""

    trial_index: int
    baseline_sinr_bps: float
    dynamic_sinr_bps: float
    baseline_snr_bps: float
    dynamic_snr_bps: float
    loads: tuple
    n_typical: int
    resample_count: int

    def throughput(self, configuration):
        return getattr(self, f"{configuration}_bps")

    def metrics(self):
        """Flat dict of the record for a run logger."""
        metrics = {name: self.throughput(name) for name in CONFIGURATIONS}
        metrics.update({f"load_{m}": float(load) for m, load in enumerate(self.loads)})
        metrics["n_typical"] = self.n_typical
        metrics["resample_count"] = self.resample_count
        return metrics


@dataclasses.dataclass(frozen=True)
class TrialOutcome:
    """Full state of a trial, kept for the per-trial dumps."""

    record: TrialRecord
    deployment: object
    link_tables: tuple
    probe_tables: tuple
    associations: tuple
    typical_gnbs: tuple
    scheduled_ues: tuple
    allocations: dict


def _gnb_geometry(scenario):
    return ArrayGeometry(*scenario.gnb_array, element_pattern=scenario.gnb_element_pattern)


def _ue_geometry(scenario):
    return ArrayGeometry(*scenario.ue_array, element_pattern=scenario.ue_element_pattern)


def schedule(association, rng):
    """
    Uniformly random scheduler: every gNB with associated UEs picks one of them.

    Returns the scheduled UE of every gNB (-1 for idle gNBs). Draws are made in gNB order.
    """
    scheduled = np.full(len(association.ue_counts), UNASSOCIATED, dtype=np.int64)
    for gnb in association.active_gnbs:
        ues = association.ues_of(gnb)
        scheduled[gnb] = ues[rng.integers(len(ues))]
    return scheduled


def serving_links(scenario, deployment, table, association, scheduled, ue_index):
    """
    Serving link and interfering links of an associated UE, with beam gains.

    The serving gNB and the UE point their beams at each other. Every other active gNB of the
    operator points at its scheduled UE while the UE keeps its beam on the serving gNB.

    Returns
    -------
    serving : LinkRecord
    interferers : list of LinkRecord
        In increasing gNB index order.
    """
    j = int(ue_index)
    i = int(association.serving_gnb[j])
    orientations = deployment.gnb_orientations[table.operator_index]
    gnb_geom = _gnb_geometry(scenario)
    ue_geom = _ue_geometry(scenario).oriented(table.ue_azimuth_rad[i, j])

    tx_dir = gnb_geom.to_local(table.gnb_zenith_rad[i, j],
                               table.gnb_azimuth_rad[i, j] - orientations[i])
    rx_dir = ue_geom.to_local(table.ue_zenith_rad[i, j], table.ue_azimuth_rad[i, j])
    gain = beamforming_gain(gnb_geom, tx_dir, ue_geom, rx_dir, tx_dir, rx_dir)
    serving = table.record(i, j).with_beam_gain(gain)

    others = association.active_gnbs
    others = others[others != i]
    if others.size == 0:
        return serving, []

    targets = scheduled[others]
    tx_actual = gnb_geom.to_local(table.gnb_zenith_rad[others, j],
                                  table.gnb_azimuth_rad[others, j] - orientations[others])
    tx_steer = gnb_geom.to_local(table.gnb_zenith_rad[others, targets],
                                 table.gnb_azimuth_rad[others, targets] - orientations[others])
    rx_actual = ue_geom.to_local(table.ue_zenith_rad[others, j], table.ue_azimuth_rad[others, j])
    gains = np.atleast_1d(beamforming_gain(gnb_geom, tx_steer, ue_geom, rx_dir, tx_actual, rx_actual))

    interferers = [table.record(k, j).with_beam_gain(g) for k, g in zip(others, gains)]
    return serving, interferers


def _draw_deployment(scenario, trial_index):
    seed = derive_trial_seed(scenario.master_seed, trial_index)
    for attempt in range(MAX_RESAMPLES + 1):
        rng = trial_rng(seed, attempt)
        try:
            return generate_deployment(scenario, rng), rng, attempt
        except DegenerateTrial:
            continue
    raise DegenerateTrial(
        f"Trial {trial_index}: the typical operator drew no gNB in {MAX_RESAMPLES + 1} attempts."
    )


def simulate_trial(scenario, trial_index):
    """
    Run one trial and keep its full state.

    Parameters
    ----------
    scenario : ScenarioConfig
        Scenario (validated on the way in).
    trial_index : int
        Index of the trial; with the master seed it fixes every random draw.

    Returns
    -------
    TrialOutcome

    Raises
    ------
    DegenerateTrial
        If no usable deployment was drawn after the maximum number of resamples.
    """
    scenario = validate_config(scenario)
    deployment, rng, resamples = _draw_deployment(scenario, trial_index)
    params = scenario.channel_params
    num_operators = scenario.num_operators
    centre = deployment.typical_ue.as_array()[None, :]

    link_tables, probe_tables = [], []
    for m in range(num_operators):
        link_tables.append(build_link_table(deployment.gnb_positions[m],
                                            deployment.ue_positions[m], m, rng, params))
        probe_tables.append(
            None if m == deployment.typical_operator_index
            else build_link_table(deployment.gnb_positions[m], centre, m, rng, params)
        )

    associations = [associate(deployment, link_tables, m) for m in range(num_operators)]
    typical_ue = deployment.typical_ue_index
    typical_gnbs = [
        typical_gnb(link_tables[m], associations[m], typical_ue) if probe_tables[m] is None
        else typical_gnb(probe_tables[m])
        for m in range(num_operators)
    ]
    scheduled = [schedule(a, rng) for a in associations]

    loads = allocation.extract_loads(scenario, associations, typical_gnbs,
                                     deployment.typical_operator_index)
    allocations = {
        BASELINE: baseline_allocation(scenario, loads),
        DYNAMIC: dynamic_allocation(loads, scenario.total_bandwidth_hz,
                                    scenario.allocation_floor_fraction),
    }

    throughputs = dict.fromkeys(CONFIGURATIONS, 0.0)
    own = associations[0]
    serving_gnb = int(own.serving_gnb[typical_ue])
    n_typical = int(own.ue_counts[serving_gnb]) if serving_gnb != UNASSOCIATED else 0
    if serving_gnb != UNASSOCIATED:
        serving, interferers = serving_links(scenario, deployment, link_tables[0], own,
                                             scheduled[0], typical_ue)
        for policy in POLICIES:
            width = allocations[policy].bandwidths_hz[0]
            sample = sinr(serving, interferers, scenario.tx_power_dbm, width,
                          scenario.noise_psd_dbm_hz)
            throughputs[f"{policy}_sinr"] = throughput(width, n_typical, sample.sinr_linear)
            throughputs[f"{policy}_snr"] = throughput(width, n_typical, sample.snr_linear)

    record = TrialRecord(
        trial_index=int(trial_index),
        baseline_sinr_bps=throughputs["baseline_sinr"],
        dynamic_sinr_bps=throughputs["dynamic_sinr"],
        baseline_snr_bps=throughputs["baseline_snr"],
        dynamic_snr_bps=throughputs["dynamic_snr"],
        loads=tuple(loads),
        n_typical=n_typical,
        resample_count=resamples,
    )
    return TrialOutcome(
        record=record,
        deployment=deployment,
        link_tables=tuple(link_tables),
        probe_tables=tuple(probe_tables),
        associations=tuple(associations),
        typical_gnbs=tuple(typical_gnbs),
        scheduled_ues=tuple(scheduled),
        allocations=allocations,
    )


def run_trial(scenario, trial_index):
    """Run one trial and return its :class:`TrialRecord`."""
    return simulate_trial(scenario, trial_index).record


def link_dataframe(outcome, scenario):
    """
    Link dump of a trial: the serving link of every associated UE of every operator, under
    each policy. Columns trial, operator, gnb, ue, state, pl_db, sinr_db, snr_db,
    throughput_bps, policy.
    """
    scenario = validate_config(scenario)
    rows = []
    for m, (table, association) in enumerate(zip(outcome.link_tables, outcome.associations)):
        for ue in np.flatnonzero(association.serving_gnb != UNASSOCIATED):
            serving, interferers = serving_links(scenario, outcome.deployment, table,
                                                 association, outcome.scheduled_ues[m], ue)
            n_users = int(association.ue_counts[serving.gnb_index])
            for policy in POLICIES:
                width = outcome.allocations[policy].bandwidths_hz[m]
                sample = sinr(serving, interferers, scenario.tx_power_dbm, width,
                              scenario.noise_psd_dbm_hz)
                rows.append({
                    "trial": outcome.record.trial_index,
                    "operator": m,
                    "gnb": serving.gnb_index,
                    "ue": serving.ue_index,
                    "state": LinkState(serving.state).name,
                    "pl_db": serving.path_loss_db,
                    "sinr_db": sample.sinr_db,
                    "snr_db": sample.snr_db,
                    "throughput_bps": throughput(width, n_users, sample.sinr_linear),
                    "policy": policy,
                })
    columns = ["trial", "operator", "gnb", "ue", "state", "pl_db", "sinr_db", "snr_db",
               "throughput_bps", "policy"]
    return pd.DataFrame(rows, columns=columns)


def empirical_cdf(samples):
    """
    Empirical CDF of a set of samples.

    Returns
    -------
    list of tuple
        (value, probability) with values sorted; tied values share the highest step.

    Raises
    ------
    EmptyInput
        If there are no samples.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise EmptyInput("The empirical CDF needs at least one sample.")
    probabilities = np.searchsorted(x, x, side="right") / x.size
    return list(zip(x.tolist(), probabilities.tolist()))


@dataclasses.dataclass(frozen=True)
class ConfigurationSummary:
    """Aggregated typical-UE throughputs of one configuration."""

    name: str
    samples: tuple
    jain: float
    mean_throughput_bps: float
    num_samples: int

    @classmethod
    def from_samples(cls, name, samples):
        x = np.sort(np.asarray(samples, dtype=float))
        try:
            report = fairness_report(x)
        except AllZero:
            warnings.warn(
                f"Every {name} throughput sample is zero; Jain's index is undefined (nan)."
            )
            report = FairnessReport(jain=math.nan, n=int(x.size), mean_throughput_bps=0.0)
        return cls(
            name=name,
            samples=tuple(x.tolist()),
            jain=report.jain,
            mean_throughput_bps=report.mean_throughput_bps,
            num_samples=report.n,
        )


@dataclasses.dataclass(frozen=True)
class CampaignResult:
    """Per-configuration aggregates of a campaign, with the trial records."""

    scenario: object
    configurations: dict
    total_trials: int
    total_resamples: int
    records: tuple

    @classmethod
    def from_records(cls, scenario, records):
        records = tuple(sorted(records, key=lambda r: r.trial_index))
        configurations = {
            name: ConfigurationSummary.from_samples(name, [r.throughput(name) for r in records])
            for name in CONFIGURATIONS
        }
        return cls(
            scenario=scenario,
            configurations=configurations,
            total_trials=len(records),
            total_resamples=sum(r.resample_count for r in records),
            records=records,
        )

    def cdf(self, configuration):
        """Empirical CDF of a configuration's samples."""
        return empirical_cdf(self.configurations[configuration].samples)

    def summary(self):
        """The results document: metadata plus J and mean throughput per configuration."""
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": scenario_to_dict(self.scenario),
            "total_trials": self.total_trials,
            "total_resamples": self.total_resamples,
            "configurations": {
                name: {
                    "jain": round_sig(c.jain),
                    "mean_throughput_bps": round_sig(c.mean_throughput_bps),
                    "num_samples": c.num_samples,
                }
                for name, c in self.configurations.items()
            },
        }

    def summary_metrics(self):
        """Flat dict of the aggregates for a run logger."""
        metrics = {}
        for name, c in self.configurations.items():
            metrics[f"{name}_jain"] = c.jain
            metrics[f"{name}_mean_throughput_bps"] = c.mean_throughput_bps
        return metrics


def _log_campaign(result, output_paths, wandb_logging, project_name, extra_log_string_dict):
    logger = logging_utils.set_logger(
        run_name="campaign",
        project_name=project_name,
        output_paths=output_paths,
        extra_log_string_dict=extra_log_string_dict,
        wandb_logging=wandb_logging,
    )
    logger.log_hyperparams(scenario_to_dict(result.scenario))
    for record in result.records:
        logger.log_metrics(record.metrics(), step=record.trial_index)
    logger.log_metrics(result.summary_metrics(), step=result.total_trials)
    logging_utils.close_logger(logger, wandb_logging)


def run_campaign(scenario, num_workers=1, output_paths=None, wandb_logging=False,
                 project_name=None, extra_log_string_dict=None):
    """
    Run every trial of a scenario and aggregate the results.

    Parameters
    ----------
    scenario : ScenarioConfig
        Scenario to run (validated on the way in).
    num_workers : int
        Worker processes. 1 runs the trials in this process. The result does not depend on it.
    output_paths : dict or None
        Output paths; a "logs" entry turns on CSV logging of per-trial metrics. Default None.
    wandb_logging : bool
        Log to Weights & Biases instead of CSV. Default False.
    project_name : str or None
        wandb project name. Default None ("mmshare").
    extra_log_string_dict : dict or None
        Extra strings for the run name and tags, e.g. {"density": 75}. Default None.

    Returns
    -------
    CampaignResult
    """
    scenario = validate_config(scenario)
    if num_workers is None or num_workers < 1:
        raise ValueError(f"num_workers must be >= 1, got {num_workers!r}.")

    indexes = range(scenario.num_trials)
    if num_workers > 1:
        chunksize = max(1, scenario.num_trials // (4 * num_workers))
        with ProcessPoolExecutor(max_workers=num_workers) as executor:
            records = list(executor.map(functools.partial(run_trial, scenario), indexes,
                                        chunksize=chunksize))
    else:
        records = [run_trial(scenario, k) for k in indexes]

    result = CampaignResult.from_records(scenario, records)
    if result.total_resamples:
        resampled = sum(1 for r in result.records if r.resample_count)
        warnings.warn(
            f"{resampled} trial(s) drew no gNB for the typical operator and were resampled "
            f"({result.total_resamples} resample(s) in total)."
        )

    if logging_utils.needs_logger(output_paths, wandb_logging):
        _log_campaign(result, output_paths, wandb_logging, project_name, extra_log_string_dict)

    return result


def check_densities(densities):
    """
    Check a density list for a sweep.

    Raises
    ------
    BadDensityList
        If the list is empty or holds a value that is not a positive number.
    """
    densities = list(densities) if densities is not None else []
    if not densities:
        raise BadDensityList("The density list is empty.")
    checked = []
    for d in densities:
        if isinstance(d, bool) or not isinstance(d, (int, float, np.integer, np.floating)):
            raise BadDensityList(f"Density {d!r} is not a number.")
        if not (d > 0 and math.isfinite(d)):
            raise BadDensityList(f"Densities must be finite and > 0, got {d!r}.")
        checked.append(float(d))
    return checked


def density_sweep(scenario, densities, num_workers=1, output_paths=None, wandb_logging=False,
                  project_name=None, extra_log_string_dict=None):
    """
    One campaign per gNB density, all with the same master seed.

    Parameters
    ----------
    scenario : ScenarioConfig
        Base scenario; its gNB density is replaced by each swept value.
    densities : sequence of float
        gNB densities per km^2 per operator, in output order.
    num_workers, output_paths, wandb_logging, project_name, extra_log_string_dict
        As for :func:`run_campaign`; the density is added to the run name.

    Returns
    -------
    pandas.DataFrame
        Columns density_per_km2, policy, jain, mean_throughput_gbps; one row per policy (SINR
        configurations) per density, in density order.

    Raises
    ------
    BadDensityList
        If the density list is empty or holds a non-positive value.
    """
    densities = check_densities(densities)
    rows = []
    for density in densities:
        swept = validate_config(dataclasses.replace(scenario, gnb_density_per_km2=density))
        extra = dict(extra_log_string_dict or {})
        extra["density"] = f"{density:g}"
        result = run_campaign(
            swept,
            num_workers=num_workers,
            output_paths=output_paths,
            wandb_logging=wandb_logging,
            project_name=project_name,
            extra_log_string_dict=extra,
        )
        for policy in POLICIES:
            summary = result.configurations[f"{policy}_sinr"]
            rows.append({
                "density_per_km2": density,
                "policy": policy,
                "jain": summary.jain,
                "mean_throughput_gbps": summary.mean_throughput_bps / 1e9,
            })
    return pd.DataFrame(rows, columns=["density_per_km2", "policy", "jain",
                                       "mean_throughput_gbps"])
