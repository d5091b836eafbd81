"""
Band allocation policies and Jain's fairness index.

The baseline policy gives every operator its licensed chunks (one 200 MHz chunk each in the
default scenario). The dynamic policy splits the whole band in proportion to the operators'
loads, optionally guaranteeing each operator a floor. Allocations are disjoint contiguous
sub-bands ordered by operator index.
"""

import dataclasses
import math

import numpy as np
import pandas as pd

from mmshare.exceptions import AllZero, EmptyInput, FloorTooLarge

BASELINE = "baseline"
DYNAMIC = "dynamic"
POLICIES = (BASELINE, DYNAMIC)
_FLOAT_SLACK = 1e-12


@dataclasses.dataclass(frozen=True)
class AllocationResult:
    """
    Bandwidth of every operator under one policy.

    Attributes
    ----------
    policy : str
        "baseline" or "dynamic".
    bandwidths_hz : tuple of float
        W_m per operator.
    loads : tuple
        Per-operator loads of the trial (used by the dynamic rule).
    sub_bands_hz : tuple of tuple
        (start, stop) of each operator's sub-band, offsets from the bottom of the band.
    """

    policy: str
    bandwidths_hz: tuple
    loads: tuple
    sub_bands_hz: tuple

    @property
    def total_hz(self):
        return math.fsum(self.bandwidths_hz)


def _sub_bands(bandwidths):
    bands, start = [], 0.0
    for width in bandwidths:
        bands.append((start, start + width))
        start += width
    return tuple(bands)


def baseline_allocation(scenario, loads=None):
    """
    Exclusive licensed chunks.

    Parameters
    ----------
    scenario : ValidatedScenario
        Scenario (chunk size, licensed chunks, unsold-chunk sharing).
    loads : sequence, optional
        Loads of the trial, only recorded in the result.

    Returns
    -------
    AllocationResult
        ``W_m = licensed_chunks[m] * chunk_bandwidth_hz``, plus an equal share of the unsold
        chunks when ``share_unsold_chunks`` is set.
    """
    m = scenario.num_operators
    chunks = scenario.licensed_chunks or (1,) * m
    bandwidths = [c * scenario.chunk_bandwidth_hz for c in chunks]

    if scenario.share_unsold_chunks:
        total_chunks = int(math.floor(
            scenario.total_bandwidth_hz / scenario.chunk_bandwidth_hz + _FLOAT_SLACK
        ))
        unsold = total_chunks - sum(chunks)
        if unsold > 0:
            extra = unsold * scenario.chunk_bandwidth_hz / m
            bandwidths = [w + extra for w in bandwidths]

    loads = tuple(loads) if loads is not None else (0,) * m
    return AllocationResult(
        policy=BASELINE,
        bandwidths_hz=tuple(float(w) for w in bandwidths),
        loads=loads,
        sub_bands_hz=_sub_bands(bandwidths),
    )


def dynamic_allocation(loads, total_bandwidth_hz, floor_fraction=0.0):
    """
    Load-proportional split of the whole band.

    Parameters
    ----------
    loads : sequence of non-negative numbers
        Load L_m of every operator.
    total_bandwidth_hz : float
        Band W_tot to split.
    floor_fraction : float
        Guaranteed share f_min of every operator. Default 0.

    Returns
    -------
    AllocationResult
        ``W_m = f_min W_tot + (1 - M f_min) W_tot L_m / sum(L)``, or ``W_tot / M`` each when
        every load is zero. The rounding residue goes to the last operator with a positive
        share, so the allocations sum to W_tot.

    Raises
    ------
    FloorTooLarge
        If ``floor_fraction * M > 1``.
    ValueError
        If a load is negative or there are no operators.
    """
    loads = tuple(loads)
    m = len(loads)
    if m == 0:
        raise ValueError("dynamic_allocation needs at least one operator load.")
    if any(load < 0 for load in loads):
        raise ValueError(f"Loads must be >= 0, got {list(loads)}.")
    if floor_fraction < 0:
        raise ValueError(f"floor_fraction must be >= 0, got {floor_fraction!r}.")
    if floor_fraction * m > 1 + _FLOAT_SLACK:
        raise FloorTooLarge(
            f"floor_fraction * num_operators = {floor_fraction} * {m} exceeds 1."
        )

    total_load = math.fsum(loads)
    if total_load == 0:
        bandwidths = [total_bandwidth_hz / m] * m
    else:
        floor_hz = floor_fraction * total_bandwidth_hz
        shared_fraction = 1 - m * floor_fraction
        bandwidths = [
            floor_hz + shared_fraction * total_bandwidth_hz * load / total_load
            for load in loads
        ]

    residue = total_bandwidth_hz - math.fsum(bandwidths)
    if residue != 0:
        last = max(k for k, w in enumerate(bandwidths) if w > 0)
        bandwidths[last] += residue

    return AllocationResult(
        policy=DYNAMIC,
        bandwidths_hz=tuple(float(w) for w in bandwidths),
        loads=loads,
        sub_bands_hz=_sub_bands(bandwidths),
    )


def typical_gnb(link_table, association=None, ue_index=None):
    """
    The gNB of an operator closest (in path loss) to the centre of the area.

    For the typical UE's own operator pass its association map and index, and the serving gNB
    is returned. Otherwise ``link_table`` holds the links from the operator's gNBs to a probe
    at the centre. Returns -1 when every candidate link is in outage.
    """
    if association is not None:
        return int(association.serving_gnb[ue_index])
    pl = link_table.path_loss_db[:, 0]
    if pl.size == 0 or not np.isfinite(pl).any():
        return -1
    return int(np.argmin(pl))


def extract_loads(scenario, associations, typical_gnbs, typical_operator_index=0):
    """
    Per-operator load used by the dynamic policy.

    Every operator has a user at the centre of the area served by its typical gNB. For the
    typical operator that user is the typical UE and is already in its association; for every
    other operator the centre probe is added to the counts here, so the loads of all operators
    are counted the same way.

    Parameters
    ----------
    scenario : ValidatedScenario
        Selects the metric through ``load_metric``.
    associations : sequence of AssociationMap
        Association of every operator.
    typical_gnbs : sequence of int
        Typical gNB of every operator (-1 if none, and then the centre user is not served).
    typical_operator_index : int
        Operator whose association already holds the centre user. Default 0.

    Returns
    -------
    tuple
        ``typical_gnb``: UEs on the typical gNB, centre user included (int).
        ``relative``: UEs on the typical gNB divided by the mean load of the operator's
        serving gNBs (float).
        ``operator_total``: associated UEs of the operator, centre user included (int).
    """
    loads = []
    for m, (association, gnb) in enumerate(zip(associations, typical_gnbs)):
        counts = np.asarray(association.ue_counts)
        if gnb >= 0 and m != typical_operator_index:
            counts = counts.copy()
            counts[gnb] += 1
        on_typical = int(counts[gnb]) if gnb >= 0 else 0
        if scenario.load_metric == "operator_total":
            loads.append(int(counts.sum()))
        elif scenario.load_metric == "relative":
            active = counts[counts > 0]
            loads.append(on_typical / float(active.mean()) if active.size else 0.0)
        else:
            loads.append(on_typical)
    return tuple(loads)


def jain_fairness(values):
    """
    Jain's fairness index ``(sum x)^2 / (n sum x^2)``.

    Parameters
    ----------
    values : sequence of float
        Non-negative values (throughputs).

    Returns
    -------
    float
        Index in [1/n, 1].

    Raises
    ------
    EmptyInput
        If there are no values.
    AllZero
        If every value is zero.
    ValueError
        If a value is negative.
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("Jain's index needs at least one value.")
    if np.any(x < 0):
        raise ValueError("Jain's index is defined for non-negative values only.")
    if not np.any(x > 0):
        raise AllZero("Jain's index is undefined when every value is zero.")
    return math.fsum(x) ** 2 / (x.size * math.fsum(x * x))


@dataclasses.dataclass(frozen=True)
class FairnessReport:
    """Jain's index, sample count and mean of a set of throughputs."""

    jain: float
    n: int
    mean_throughput_bps: float


def fairness_report(values):
    """:class:`FairnessReport` of a set of throughputs (same errors as :func:`jain_fairness`)."""
    x = np.asarray(values, dtype=float).ravel()
    jain = jain_fairness(x)
    return FairnessReport(jain=jain, n=int(x.size), mean_throughput_bps=math.fsum(x) / x.size)


def allocation_dataframe(trial_index, allocations):
    """
    Allocation trace of a trial: one row per (policy, operator) with columns
    trial, policy, operator, load, W_m_hz.
    """
    rows = []
    for allocation in allocations:
        for operator, (load, width) in enumerate(zip(allocation.loads, allocation.bandwidths_hz)):
            rows.append({
                "trial": trial_index,
                "policy": allocation.policy,
                "operator": operator,
                "load": load,
                "W_m_hz": width,
            })
    return pd.DataFrame(rows, columns=["trial", "policy", "operator", "load", "W_m_hz"])
