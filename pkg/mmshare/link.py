"""
Association, SINR, SNR and throughput of a UE.

A UE associates with the gNB of its own operator that has the smallest path loss; links in
outage are never chosen and a UE whose links are all in outage stays unassociated. The SINR
of a UE served by gNB i counts as interference every other gNB of the same operator that has
at least one associated UE (idle gNBs are silent). Operators use disjoint bands, so there is
no interference across operators.

The gNB shares its band equally among its associated UEs, so the throughput of a UE is
``W / N * log2(1 + SINR)``.
"""

import dataclasses
import math

import numpy as np

from mmshare.exceptions import OutageServingLink, ZeroUsers

UNASSOCIATED = -1


@dataclasses.dataclass(frozen=True)
class AssociationMap:
    """
    Association of the UEs of one operator.

    Attributes
    ----------
    operator_index : int
        Operator of the UEs and gNBs.
    serving_gnb : numpy.ndarray
        For every UE, the index of its serving gNB or -1 when unassociated.
    ue_counts : numpy.ndarray
        For every gNB, the number N_i of UEs it serves.
    """

    operator_index: int
    serving_gnb: np.ndarray
    ue_counts: np.ndarray

    @property
    def num_associated(self):
        return int(np.count_nonzero(self.serving_gnb != UNASSOCIATED))

    def is_associated(self, ue_index):
        return bool(self.serving_gnb[ue_index] != UNASSOCIATED)

    def ues_of(self, gnb_index):
        """Indexes of the UEs served by a gNB, in increasing order."""
        return np.flatnonzero(self.serving_gnb == gnb_index)

    @property
    def active_gnbs(self):
        """Indexes of the gNBs serving at least one UE."""
        return np.flatnonzero(self.ue_counts > 0)


@dataclasses.dataclass(frozen=True)
class SinrSample:
    """Powers in watts and the resulting SINR and SNR (linear) of one UE."""

    signal_power_w: float
    interference_power_w: float
    noise_power_w: float
    sinr_linear: float
    snr_linear: float

    @property
    def sinr_db(self):
        return 10.0 * math.log10(self.sinr_linear) if self.sinr_linear > 0 else -math.inf

    @property
    def snr_db(self):
        return 10.0 * math.log10(self.snr_linear) if self.snr_linear > 0 else -math.inf


def associate(deployment, link_records, operator_index):
    """
    Associate every UE of an operator with its minimum path-loss gNB.

    Parameters
    ----------
    deployment : Deployment
        Deployment of the trial (used to check the link table covers every node).
    link_records : LinkTable or sequence of LinkTable
        Links of the operator, or the per-operator link tables of the trial.
    operator_index : int
        Operator to associate.

    Returns
    -------
    AssociationMap
        Ties go to the lowest gNB index; UEs with every link in outage are unassociated.
    """
    table = link_records
    if isinstance(link_records, (list, tuple)):
        table = link_records[operator_index]

    expected = (len(deployment.gnb_positions[operator_index]),
                len(deployment.ue_positions[operator_index]))
    if table.path_loss_db.shape != expected:
        raise ValueError(
            f"Link table of operator {operator_index} has shape {table.path_loss_db.shape}, "
            f"expected (num_gnbs, num_ues) = {expected}."
        )

    num_gnbs, num_ues = expected
    serving = np.full(num_ues, UNASSOCIATED, dtype=np.int64)
    if num_gnbs > 0 and num_ues > 0:
        best = np.argmin(table.path_loss_db, axis=0)
        reachable = np.isfinite(table.path_loss_db[best, np.arange(num_ues)])
        serving[reachable] = best[reachable]

    counts = np.bincount(serving[serving != UNASSOCIATED], minlength=num_gnbs)
    return AssociationMap(operator_index=operator_index, serving_gnb=serving, ue_counts=counts)


def dbm_to_watts(power_dbm):
    return 10.0 ** ((power_dbm - 30.0) / 10.0)


def received_power_w(tx_power_dbm, path_loss_db, gain_linear):
    """``P / l * G`` in watts; zero for an infinite path loss."""
    if math.isinf(path_loss_db):
        return 0.0
    return dbm_to_watts(tx_power_dbm - path_loss_db) * gain_linear


def noise_power_w(bandwidth_hz, noise_psd_dbm_hz):
    """Noise power ``W * N_0`` in watts."""
    return bandwidth_hz * dbm_to_watts(noise_psd_dbm_hz)


def _ratio(signal, denominator):
    if denominator > 0:
        return signal / denominator
    return math.inf if signal > 0 else 0.0


def sinr(typical_link, interferer_links, tx_power_dbm, bandwidth_hz, noise_psd_dbm_hz):
    """
    SINR of a UE on its serving link.

    Parameters
    ----------
    typical_link : LinkRecord
        Serving link, with ``beam_gain_linear`` set to the aligned beam gain.
    interferer_links : list of LinkRecord
        Links from the interfering gNBs to the same UE, each with ``beam_gain_linear`` set to
        the gain of the interferer's beam towards its scheduled UE. Outage links add nothing.
    tx_power_dbm : float
        Transmit power P of every gNB.
    bandwidth_hz : float
        Bandwidth W of the operator.
    noise_psd_dbm_hz : float
        Noise spectral density N_0.

    Returns
    -------
    SinrSample

    Raises
    ------
    OutageServingLink
        If the serving link is in outage.
    """
    if typical_link.is_outage:
        raise OutageServingLink(
            f"Serving link gNB {typical_link.gnb_index} -> UE {typical_link.ue_index} "
            f"of operator {typical_link.operator_index} is in outage."
        )
    signal = received_power_w(tx_power_dbm, typical_link.path_loss_db,
                              typical_link.beam_gain_linear)
    interference = sum(
        received_power_w(tx_power_dbm, link.path_loss_db, link.beam_gain_linear)
        for link in interferer_links
        if not link.is_outage
    )
    noise = noise_power_w(bandwidth_hz, noise_psd_dbm_hz)
    return SinrSample(
        signal_power_w=signal,
        interference_power_w=float(interference),
        noise_power_w=noise,
        sinr_linear=_ratio(signal, interference + noise),
        snr_linear=_ratio(signal, noise),
    )


def snr(typical_link, tx_power_dbm, bandwidth_hz, noise_psd_dbm_hz):
    """SNR (linear) of a UE on its serving link; :func:`sinr` without interferers."""
    return sinr(typical_link, [], tx_power_dbm, bandwidth_hz, noise_psd_dbm_hz).snr_linear


def throughput(bandwidth_hz, n_users_on_gnb, gamma):
    """
    Throughput of a UE in bit/s, ``W / N * log2(1 + gamma)``.

    Raises
    ------
    ZeroUsers
        If the gNB has a nonzero bandwidth but no associated UE.
    ValueError
        If the bandwidth or gamma is negative.
    """
    if bandwidth_hz < 0 or gamma < 0:
        raise ValueError(
            f"bandwidth_hz and gamma must be >= 0, got {bandwidth_hz!r} and {gamma!r}."
        )
    if bandwidth_hz == 0:
        return 0.0
    if n_users_on_gnb < 1:
        raise ZeroUsers(
            f"Throughput requested for a gNB with {n_users_on_gnb} associated UE(s)."
        )
    return bandwidth_hz / n_users_on_gnb * math.log2(1.0 + gamma)
