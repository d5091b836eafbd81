import json

import numpy as np
import pytest

from mmshare.channel import (
    ChannelParams,
    LinkRecord,
    LinkState,
    build_link_table,
    deterministic_path_loss_db,
    export_channel_table,
    path_loss_db,
    sample_path_loss_db,
)
from mmshare.exceptions import NonPositiveDistance, OutageLink

NO_SHADOWING = ChannelParams(los_sigma_db=0.0, nlos_sigma_db=0.0)


@pytest.mark.parametrize(
    "state, distance, expected",
    [
        (LinkState.LOS, 100.0, 101.4),
        (LinkState.LOS, 1.0, 61.4),
        (LinkState.NLOS, 100.0, 130.4),
    ],
)
def test_path_loss_without_shadowing(state, distance, expected):
    assert deterministic_path_loss_db(state, distance) == pytest.approx(expected, abs=1e-9)
    rng = np.random.default_rng(0)
    assert path_loss_db(state, distance, rng, NO_SHADOWING) == pytest.approx(expected, abs=1e-9)


def test_outage_has_no_path_loss():
    with pytest.raises(OutageLink):
        path_loss_db(LinkState.OUTAGE, 100.0, np.random.default_rng(0))


def test_path_loss_rejects_zero_distance():
    with pytest.raises(NonPositiveDistance):
        path_loss_db(LinkState.LOS, 0.0, np.random.default_rng(0))


@pytest.mark.parametrize("state", [LinkState.LOS, LinkState.NLOS])
def test_deterministic_part_increases_with_distance(state):
    d = np.linspace(1.0, 1000.0, 500)
    assert np.all(np.diff(deterministic_path_loss_db(state, d)) > 0)


@pytest.mark.parametrize(
    "state, expected_mean, sigma",
    [(LinkState.LOS, 101.4, 5.8), (LinkState.NLOS, 130.4, 8.7)],
)
def test_shadowing_statistics(state, expected_mean, sigma):
    n = 10 ** 5
    pl = sample_path_loss_db(np.full(n, int(state)), np.full(n, 100.0),
                             np.random.default_rng(23))

    assert pl.mean() == pytest.approx(expected_mean, abs=0.1)
    assert pl.std() == pytest.approx(sigma, rel=0.02)


def test_configured_sigma_is_used():
    params = ChannelParams(los_sigma_db=2.0)
    n = 10 ** 5
    pl = sample_path_loss_db(np.zeros(n, dtype=np.int8), np.full(n, 50.0),
                             np.random.default_rng(5), params)
    assert pl.std() == pytest.approx(2.0, rel=0.02)


def test_outage_entries_are_infinite():
    states = np.array([LinkState.LOS, LinkState.OUTAGE, LinkState.NLOS], dtype=np.int8)
    pl = sample_path_loss_db(states, np.array([10.0, 400.0, 50.0]), np.random.default_rng(1))

    assert np.isinf(pl[1])
    assert np.all(np.isfinite(pl[[0, 2]]))


@pytest.fixture
def table():
    gnbs = np.array([[0.0, 0.0, 10.0], [100.0, 0.0, 10.0]])
    ues = np.array([[0.0, 10.0, 1.5], [30.0, 40.0, 1.5], [900.0, 900.0, 1.5]])
    return build_link_table(gnbs, ues, operator_index=2, rng=np.random.default_rng(9))


def test_link_table_shapes(table):
    assert table.num_gnbs == 2
    assert table.num_ues == 3
    assert table.operator_index == 2
    for name in ("distance_m", "states", "path_loss_db", "gnb_azimuth_rad", "gnb_zenith_rad",
                 "ue_azimuth_rad", "ue_zenith_rad"):
        assert getattr(table, name).shape == (2, 3)


def test_link_table_geometry(table):
    assert table.distance_m[0, 0] == pytest.approx(np.hypot(10.0, 8.5))
    assert table.gnb_azimuth_rad[0, 0] == pytest.approx(np.pi / 2)
    assert table.ue_azimuth_rad[0, 0] == pytest.approx(-np.pi / 2)
    # gNB above the UE: looking down from the gNB, up from the UE
    assert table.gnb_zenith_rad[0, 0] > np.pi / 2
    assert table.ue_zenith_rad[0, 0] == pytest.approx(np.pi - table.gnb_zenith_rad[0, 0])


def test_link_table_far_links_are_outage(table):
    assert np.all(table.states[:, 2] == LinkState.OUTAGE)
    assert np.all(np.isinf(table.path_loss_db[:, 2]))


def test_link_table_is_reproducible():
    gnbs = np.random.default_rng(0).uniform(-200, 200, size=(6, 3))
    gnbs[:, 2] = 10.0
    ues = np.random.default_rng(1).uniform(-200, 200, size=(9, 3))
    ues[:, 2] = 1.5

    a = build_link_table(gnbs, ues, 0, np.random.default_rng(4))
    b = build_link_table(gnbs, ues, 0, np.random.default_rng(4))
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.path_loss_db, b.path_loss_db)


def test_record(table):
    record = table.record(1, 2)

    assert isinstance(record, LinkRecord)
    assert (record.gnb_index, record.ue_index, record.operator_index) == (1, 2, 2)
    assert record.is_outage
    assert record.path_loss_db == np.inf
    assert record.beam_gain_linear is None
    assert record.with_beam_gain(3).beam_gain_linear == 3.0


def test_export_channel_table(tmp_path):
    params = ChannelParams(los_sigma_db=4.0)
    path = tmp_path / "channel.json"
    export_channel_table(params, path)

    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert ChannelParams.from_mapping(json.loads(raw)) == params
