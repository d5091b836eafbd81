import math

import numpy as np
import pytest

from mmshare.channel import LinkRecord, LinkState, LinkTable
from mmshare.deployment import Deployment, Position
from mmshare.exceptions import OutageServingLink, ZeroUsers
from mmshare.link import (
    UNASSOCIATED,
    associate,
    noise_power_w,
    received_power_w,
    sinr,
    snr,
    throughput,
)


def make_table(path_loss, operator_index=0):
    pl = np.asarray(path_loss, dtype=float)
    states = np.where(np.isinf(pl), LinkState.OUTAGE, LinkState.LOS).astype(np.int8)
    zeros = np.zeros(pl.shape)
    return LinkTable(operator_index=operator_index, distance_m=np.ones(pl.shape), states=states,
                     path_loss_db=pl, gnb_azimuth_rad=zeros, gnb_zenith_rad=zeros,
                     ue_azimuth_rad=zeros, ue_zenith_rad=zeros)


def make_deployment(num_gnbs, num_ues):
    return Deployment(
        gnb_positions=(np.zeros((num_gnbs, 3)),),
        ue_positions=(np.zeros((num_ues, 3)),),
        gnb_orientations=(np.zeros(num_gnbs),),
        typical_ue=Position(0.0, 0.0, 1.5),
    )


def make_link(path_loss_db, gain_linear, gnb_index=0, state=LinkState.LOS):
    return LinkRecord(gnb_index=gnb_index, ue_index=0, operator_index=0, distance_3d_m=50.0,
                      state=state, path_loss_db=path_loss_db, gnb_azimuth_rad=0.0,
                      gnb_zenith_rad=0.0, ue_azimuth_rad=0.0, ue_zenith_rad=0.0,
                      beam_gain_linear=gain_linear)


def test_single_gnb_serves_everyone():
    association = associate(make_deployment(1, 3), make_table([[100.0, 120.0, 90.0]]), 0)

    assert list(association.serving_gnb) == [0, 0, 0]
    assert list(association.ue_counts) == [3]
    assert association.num_associated == 3


def test_smallest_path_loss_wins():
    association = associate(make_deployment(2, 1), make_table([[110.0], [100.0]]), 0)
    assert association.serving_gnb[0] == 1


def test_ties_go_to_the_lowest_index():
    association = associate(make_deployment(3, 1), make_table([[105.0], [100.0], [100.0]]), 0)
    assert association.serving_gnb[0] == 1


def test_all_outage_ue_is_unassociated():
    table = make_table([[np.inf, 100.0], [np.inf, 130.0]])
    association = associate(make_deployment(2, 2), table, 0)

    assert association.serving_gnb[0] == UNASSOCIATED
    assert not association.is_associated(0)
    assert association.is_associated(1)
    assert list(association.ue_counts) == [1, 0]
    assert list(association.active_gnbs) == [0]
    assert list(association.ues_of(0)) == [1]


def test_accepts_a_sequence_of_tables():
    tables = [make_table([[100.0]], 0)]
    assert associate(make_deployment(1, 1), tables, 0).serving_gnb[0] == 0


def test_table_must_match_the_deployment():
    with pytest.raises(ValueError, match="shape"):
        associate(make_deployment(2, 2), make_table([[100.0, 100.0]]), 0)


def test_counts_sum_to_associated_ues():
    rng = np.random.default_rng(0)
    pl = rng.uniform(60.0, 160.0, size=(7, 40))
    pl[rng.random(pl.shape) < 0.3] = np.inf
    association = associate(make_deployment(7, 40), make_table(pl), 0)

    assert association.ue_counts.sum() == association.num_associated
    for gnb in range(7):
        assert association.ue_counts[gnb] == len(association.ues_of(gnb))


def test_association_invariant_under_increasing_transform():
    rng = np.random.default_rng(1)
    pl = rng.uniform(60.0, 160.0, size=(5, 30))
    pl[rng.random(pl.shape) < 0.2] = np.inf

    a = associate(make_deployment(5, 30), make_table(pl), 0)
    b = associate(make_deployment(5, 30), make_table(np.exp(pl / 50.0) + 3.0), 0)
    assert np.array_equal(a.serving_gnb, b.serving_gnb)


def test_sinr_reference_case():
    sample = sinr(make_link(120.0, 100.0), [], tx_power_dbm=30.0, bandwidth_hz=2.0e8,
                  noise_psd_dbm_hz=-174.0)

    assert 10 * math.log10(sample.signal_power_w) + 30 == pytest.approx(-70.0, abs=1e-9)
    assert 10 * math.log10(sample.noise_power_w) + 30 == pytest.approx(-91.0, abs=0.01)
    assert sample.sinr_db == pytest.approx(21.0, abs=0.02)
    assert sample.sinr_linear == sample.snr_linear
    assert sample.interference_power_w == 0.0


def test_snr_reference_case():
    gamma = snr(make_link(120.0, 100.0), 30.0, 2.0e8, -174.0)
    assert 10 * math.log10(gamma) == pytest.approx(21.0, abs=0.02)


def test_snr_scaling():
    base = snr(make_link(120.0, 100.0), 30.0, 2.0e8, -174.0)

    assert snr(make_link(120.0, 100.0), 30.0, 4.0e8, -174.0) == pytest.approx(base / 2, rel=1e-12)
    assert snr(make_link(120.0, 200.0), 30.0, 2.0e8, -174.0) == pytest.approx(base * 2, rel=1e-12)


def test_symmetric_interferer_gives_unit_sinr():
    sample = sinr(make_link(110.0, 50.0), [make_link(110.0, 50.0, gnb_index=1)],
                  tx_power_dbm=30.0, bandwidth_hz=2.0e8, noise_psd_dbm_hz=-300.0)
    assert sample.sinr_linear == pytest.approx(1.0, rel=1e-9)


def test_interference_matches_resummation():
    rng = np.random.default_rng(2)
    interferers = [
        make_link(float(pl), float(g), gnb_index=k + 1)
        for k, (pl, g) in enumerate(zip(rng.uniform(90, 150, 25), rng.uniform(0.01, 300, 25)))
    ]
    interferers.append(make_link(np.inf, 10.0, gnb_index=26, state=LinkState.OUTAGE))

    sample = sinr(make_link(100.0, 500.0), interferers, 30.0, 2.0e8, -174.0)

    total = 0.0
    for link in interferers:
        if not math.isinf(link.path_loss_db):
            total += 10.0 ** ((30.0 - link.path_loss_db - 30.0) / 10.0) * link.beam_gain_linear
    assert sample.interference_power_w == total
    assert sample.sinr_linear == sample.signal_power_w / (total + sample.noise_power_w)


def test_sinr_never_exceeds_snr():
    rng = np.random.default_rng(3)
    for _ in range(200):
        interferers = [make_link(float(pl), 10.0, gnb_index=k + 1)
                       for k, pl in enumerate(rng.uniform(90, 200, rng.integers(0, 5)))]
        sample = sinr(make_link(float(rng.uniform(80, 160)), 100.0), interferers,
                      30.0, 2.0e8, -174.0)
        assert sample.sinr_linear <= sample.snr_linear
        assert (sample.sinr_linear == sample.snr_linear) == (sample.interference_power_w == 0)


def test_outage_serving_link():
    link = make_link(np.inf, 1.0, state=LinkState.OUTAGE)
    with pytest.raises(OutageServingLink):
        sinr(link, [], 30.0, 2.0e8, -174.0)


def test_power_helpers():
    assert received_power_w(30.0, np.inf, 100.0) == 0.0
    assert received_power_w(30.0, 30.0, 1.0) == pytest.approx(1e-3)
    assert noise_power_w(1.0, -174.0) == pytest.approx(10 ** (-20.4))


@pytest.mark.parametrize(
    "bandwidth, users, gamma, expected",
    [
        (2.0e8, 1, 3.0, 4.0e8),
        (2.0e8, 2, 3.0, 2.0e8),
        (2.0e8, 4, 15.0, 2.0e8),
        (2.0e8, 1, 0.0, 0.0),
        (0.0, 3, 7.0, 0.0),
        (0.0, 0, 7.0, 0.0),
    ],
)
def test_throughput(bandwidth, users, gamma, expected):
    assert throughput(bandwidth, users, gamma) == expected


def test_throughput_zero_users():
    with pytest.raises(ZeroUsers):
        throughput(2.0e8, 0, 3.0)


@pytest.mark.parametrize("bandwidth, gamma", [(-1.0, 1.0), (1.0, -1.0)])
def test_throughput_rejects_negative_inputs(bandwidth, gamma):
    with pytest.raises(ValueError):
        throughput(bandwidth, 1, gamma)
