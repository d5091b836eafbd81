"""
Figures and tables for campaign results.

Each plot is a class with a ``from_*`` classmethod that takes results and returns a matplotlib
figure: :class:`ThroughputCDFPlot` draws the typical-UE throughput CDFs of a campaign and
:class:`FairnessComparison` the Jain index and mean throughput of a density sweep.
"""

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from mmshare.harness import CONFIGURATIONS, CampaignResult

POLICY_COLOURS = {"baseline": "#f082ef", "dynamic": "#00b64e"}
METRIC_LINESTYLES = {"sinr": "solid", "snr": "dashed"}


def _split_configuration(name):
    policy, metric = name.split("_")
    return policy, metric


def get_performance_dataframe(campaign):
    """
    Tabulate a campaign: one row per configuration.

    Parameters
    ----------
    campaign : CampaignResult
        Campaign to tabulate.

    Returns
    -------
    pandas.DataFrame
        Columns configuration, policy, metric, jain, mean_throughput_gbps, num_samples.
    """
    if not isinstance(campaign, CampaignResult):
        raise ValueError(
            f"Argument 'campaign' must be a CampaignResult, not {type(campaign).__name__}."
        )
    rows = []
    for name in CONFIGURATIONS:
        summary = campaign.configurations[name]
        policy, metric = _split_configuration(name)
        rows.append({
            "configuration": name,
            "policy": policy,
            "metric": metric,
            "jain": summary.jain,
            "mean_throughput_gbps": summary.mean_throughput_bps / 1e9,
            "num_samples": summary.num_samples,
        })
    return pd.DataFrame(rows)


class ThroughputCDFPlot:
    """
    Empirical CDF of the typical-UE throughput for the four configurations of a campaign.
    Solid lines use the SINR and dashed lines the interference-free SNR.
    """

    @classmethod
    def from_campaign(cls, campaign, ax=None):
        """
        Parameters
        ----------
        campaign : CampaignResult
            Campaign to plot.
        ax : matplotlib.axes.Axes, optional
            Axes to draw on. A new figure is created if None.

        Returns
        -------
        fig : matplotlib.pyplot.figure
            The figure of the plot.
        """
        if not isinstance(campaign, CampaignResult):
            raise ValueError(
                f"Argument 'campaign' must be a CampaignResult, not {type(campaign).__name__}."
            )
        if ax is None:
            fig, ax = plt.subplots(figsize=(7, 5))
        else:
            fig = ax.figure

        for name in CONFIGURATIONS:
            policy, metric = _split_configuration(name)
            cdf = np.asarray(campaign.cdf(name))
            ax.step(
                cdf[:, 0] / 1e9,
                cdf[:, 1],
                where="post",
                color=POLICY_COLOURS[policy],
                linestyle=METRIC_LINESTYLES[metric],
                label=f"{policy} ({metric.upper()})",
            )

        scenario = campaign.scenario
        ax.set_xlabel("Throughput (Gbps)")
        ax.set_ylabel("CDF")
        ax.set_ylim(0, 1)
        ax.set_title(
            f"Typical UE throughput, {scenario.gnb_density_per_km2:g} gNB/km$^2$, "
            f"T={campaign.total_trials}"
        )
        ax.legend()
        return fig


class FairnessComparison:
    """Jain index (left) and mean throughput (right) against gNB density, one line per policy."""

    @classmethod
    def from_sweep(cls, sweep):
        """
        Parameters
        ----------
        sweep : pandas.DataFrame
            Output of :func:`mmshare.harness.density_sweep`.

        Returns
        -------
        fig : matplotlib.pyplot.figure
            The figure of the plot.
        """
        required = {"density_per_km2", "policy", "jain", "mean_throughput_gbps"}
        if not isinstance(sweep, pd.DataFrame) or not required.issubset(sweep.columns):
            raise ValueError(
                "Argument 'sweep' must be a dataframe with columns "
                f"{', '.join(sorted(required))}."
            )
        if sweep.empty:
            raise ValueError("Argument 'sweep' is empty.")

        fig, axes = plt.subplots(1, 2, figsize=(12, 5))
        for policy, rows in sweep.groupby("policy", sort=False):
            rows = rows.sort_values("density_per_km2", kind="stable")
            colour = POLICY_COLOURS.get(policy)
            axes[0].plot(rows["density_per_km2"], rows["jain"], marker="o", color=colour,
                         label=policy)
            axes[1].plot(rows["density_per_km2"], rows["mean_throughput_gbps"], marker="o",
                         color=colour, label=policy)

        axes[0].set_ylabel("Jain fairness index")
        axes[1].set_ylabel("Mean throughput (Gbps)")
        for ax in axes:
            ax.set_xlabel("gNB density per operator (gNB/km$^2$)")
            ax.legend()
        fig.suptitle("Baseline vs dynamic sharing")
        plt.tight_layout()
        return fig
