"""
Link-state sampling and path loss for every gNB-UE pair of a trial.

Each link is in one of three states (LOS, NLOS or outage) with distance-dependent
probabilities. Non-outage links get a log-distance path loss with lognormal shadowing drawn
once per link per trial, so the channel is flat over time and frequency within a trial.
Outage links carry an infinite path loss.

Distances are 3D (gNB and UE heights included) and feed both the state draw and the path loss.
Angles stored in a :class:`LinkTable` are global: azimuth in radians from the x axis and
zenith angle in radians from the vertical.
"""

import dataclasses
import enum
import json

import numpy as np

from mmshare.exceptions import (
    NonPositiveDistance,
    NonPositiveParameter,
    OutageLink,
    UnknownConfigKey,
)


class LinkState(enum.IntEnum):
    """Channel state of a link."""

    LOS = 0
    NLOS = 1
    OUTAGE = 2


@dataclasses.dataclass(frozen=True)
class ChannelParams:
    """
    Channel constants table (28 GHz macro-cell measurement fit).

    Path loss is ``alpha + 10 * beta * log10(d) + chi`` with ``chi ~ N(0, sigma^2)`` dB.
    The outage probability is ``max(0, 1 - exp(-d / outage_decay_m + outage_offset))`` and
    the LOS probability ``(1 - p_out) * exp(-d / los_decay_m)``.
    """

    los_alpha_db: float = 61.4
    los_beta: float = 2.0
    los_sigma_db: float = 5.8
    nlos_alpha_db: float = 72.0
    nlos_beta: float = 2.92
    nlos_sigma_db: float = 8.7
    outage_decay_m: float = 30.0
    outage_offset: float = 5.2
    los_decay_m: float = 67.1

    @classmethod
    def from_mapping(cls, mapping):
        """
        Build a table from a (partial) mapping of overrides.

        Raises
        ------
        UnknownConfigKey
            If the mapping names a constant that does not exist.
        """
        if mapping is None:
            return cls()
        if isinstance(mapping, cls):
            return mapping
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise UnknownConfigKey(
                f"Unknown channel_params key(s): {', '.join(unknown)}. "
                f"Known keys are: {', '.join(sorted(known))}."
            )
        return cls(**{key: float(value) for key, value in mapping.items()})

    def problems(self):
        """List the violated invariants of the table (empty when valid)."""
        found = []
        for name in ("outage_decay_m", "los_decay_m"):
            if not getattr(self, name) > 0:
                found.append(NonPositiveParameter(
                    f"channel_params.{name} must be > 0, got {getattr(self, name)!r}."
                ))
        for name in ("los_sigma_db", "nlos_sigma_db"):
            if not getattr(self, name) >= 0:
                found.append(NonPositiveParameter(
                    f"channel_params.{name} must be >= 0, got {getattr(self, name)!r}."
                ))
        return found

    def state_constants(self, state):
        """(alpha, beta, sigma) for a non-outage state."""
        state = LinkState(state)
        if state is LinkState.LOS:
            return self.los_alpha_db, self.los_beta, self.los_sigma_db
        if state is LinkState.NLOS:
            return self.nlos_alpha_db, self.nlos_beta, self.nlos_sigma_db
        raise OutageLink("Outage links have no path loss constants; their path loss is +inf.")

    def to_dict(self):
        return dataclasses.asdict(self)


DEFAULT_CHANNEL_PARAMS = ChannelParams()


@dataclasses.dataclass(frozen=True)
class LinkRecord:
    """
    One gNB-UE link of a trial.

    ``beam_gain_linear`` is filled in when the link takes part in an SINR computation: the
    aligned gain for a serving link, the gain towards the interferer's scheduled UE otherwise.
    """

    gnb_index: int
    ue_index: int
    operator_index: int
    distance_3d_m: float
    state: LinkState
    path_loss_db: float
    gnb_azimuth_rad: float
    gnb_zenith_rad: float
    ue_azimuth_rad: float
    ue_zenith_rad: float
    beam_gain_linear: float = None

    @property
    def is_outage(self):
        return self.state is LinkState.OUTAGE

    def with_beam_gain(self, gain_linear):
        return dataclasses.replace(self, beam_gain_linear=float(gain_linear))


@dataclasses.dataclass(frozen=True)
class LinkTable:
    """
    All links between the gNBs and UEs of one operator, as (num_gnbs, num_ues) arrays.

    ``gnb_*`` angles point from the gNB towards the UE, ``ue_*`` angles from the UE towards
    the gNB.
    """

    operator_index: int
    distance_m: np.ndarray
    states: np.ndarray
    path_loss_db: np.ndarray
    gnb_azimuth_rad: np.ndarray
    gnb_zenith_rad: np.ndarray
    ue_azimuth_rad: np.ndarray
    ue_zenith_rad: np.ndarray

    @property
    def num_gnbs(self):
        return self.distance_m.shape[0]

    @property
    def num_ues(self):
        return self.distance_m.shape[1]

    def record(self, gnb_index, ue_index):
        """The :class:`LinkRecord` for one (gNB, UE) pair."""
        i, j = int(gnb_index), int(ue_index)
        return LinkRecord(
            gnb_index=i,
            ue_index=j,
            operator_index=self.operator_index,
            distance_3d_m=float(self.distance_m[i, j]),
            state=LinkState(int(self.states[i, j])),
            path_loss_db=float(self.path_loss_db[i, j]),
            gnb_azimuth_rad=float(self.gnb_azimuth_rad[i, j]),
            gnb_zenith_rad=float(self.gnb_zenith_rad[i, j]),
            ue_azimuth_rad=float(self.ue_azimuth_rad[i, j]),
            ue_zenith_rad=float(self.ue_zenith_rad[i, j]),
        )


def _check_distance(distance_3d_m):
    d = np.asarray(distance_3d_m, dtype=float)
    if np.any(~(d > 0)):
        raise NonPositiveDistance(
            f"Link distances must be > 0 m, got minimum {float(np.min(d))!r}."
        )
    return d


def _probabilities(d, params):
    p_out = np.maximum(0.0, 1.0 - np.exp(-d / params.outage_decay_m + params.outage_offset))
    los_factor = np.exp(-d / params.los_decay_m)
    p_los = (1.0 - p_out) * los_factor
    p_nlos = (1.0 - p_out) * (1.0 - los_factor)
    return p_los, p_nlos, p_out


def link_state_probabilities(distance_3d_m, params=DEFAULT_CHANNEL_PARAMS):
    """
    Probabilities of the three link states at a given distance.

    Parameters
    ----------
    distance_3d_m : float
        3D link distance in metres, > 0.
    params : ChannelParams
        Channel constants. Default is the standard table.

    Returns
    -------
    tuple of float
        (p_los, p_nlos, p_out), each in [0, 1], summing to 1.

    Raises
    ------
    NonPositiveDistance
        If the distance is not strictly positive.
    """
    d = _check_distance(distance_3d_m)
    p_los, p_nlos, p_out = _probabilities(d, params)
    return float(p_los), float(p_nlos), float(p_out)


def _draw_states(d, u, params):
    p_los, _, p_out = _probabilities(d, params)
    states = np.full(d.shape, LinkState.NLOS, dtype=np.int8)
    states[u < p_out + p_los] = LinkState.LOS
    states[u < p_out] = LinkState.OUTAGE
    return states


def sample_link_state(distance_3d_m, rng, params=DEFAULT_CHANNEL_PARAMS):
    """Draw the state of one link of the given distance."""
    d = _check_distance(distance_3d_m)
    u = rng.random()
    return LinkState(int(_draw_states(d, np.asarray(u), params)))


def sample_link_states(distance_3d_m, rng, params=DEFAULT_CHANNEL_PARAMS):
    """Vectorised :func:`sample_link_state`: one independent draw per entry, as an int8 array."""
    d = _check_distance(distance_3d_m)
    u = rng.random(d.shape)
    return _draw_states(d, u, params)


def deterministic_path_loss_db(state, distance_3d_m, params=DEFAULT_CHANNEL_PARAMS):
    """Path loss without shadowing, ``alpha + 10 * beta * log10(d)``."""
    alpha, beta, _ = params.state_constants(state)
    d = _check_distance(distance_3d_m)
    pl = alpha + beta * 10.0 * np.log10(d)
    return float(pl) if np.ndim(pl) == 0 else pl


def path_loss_db(state, distance_3d_m, rng, params=DEFAULT_CHANNEL_PARAMS):
    """
    Path loss of one link in dB, including a lognormal shadowing draw.

    Raises
    ------
    OutageLink
        If ``state`` is outage.
    NonPositiveDistance
        If the distance is not strictly positive.
    """
    if LinkState(state) is LinkState.OUTAGE:
        raise OutageLink("path_loss_db called for an outage link; outage path loss is +inf.")
    _, _, sigma = params.state_constants(state)
    return deterministic_path_loss_db(state, distance_3d_m, params) + sigma * rng.standard_normal()


def sample_path_loss_db(states, distance_3d_m, rng, params=DEFAULT_CHANNEL_PARAMS):
    """
    Vectorised path loss for an array of links. A shadowing normal is drawn for every entry
    (outage included) so the number of draws only depends on the array shape.
    """
    states = np.asarray(states)
    d = _check_distance(distance_3d_m)
    normals = rng.standard_normal(d.shape)

    alpha = np.where(states == LinkState.LOS, params.los_alpha_db, params.nlos_alpha_db)
    beta = np.where(states == LinkState.LOS, params.los_beta, params.nlos_beta)
    sigma = np.where(states == LinkState.LOS, params.los_sigma_db, params.nlos_sigma_db)

    pl = alpha + beta * 10.0 * np.log10(d) + sigma * normals
    return np.where(states == LinkState.OUTAGE, np.inf, pl)


def direction_angles(origins, targets):
    """
    Global direction angles from every origin to every target.

    Parameters
    ----------
    origins : numpy.ndarray
        (n, 3) positions.
    targets : numpy.ndarray
        (m, 3) positions.

    Returns
    -------
    distance : numpy.ndarray
        (n, m) 3D distances.
    azimuth : numpy.ndarray
        (n, m) azimuth angles in radians, in (-pi, pi].
    zenith : numpy.ndarray
        (n, m) zenith angles in radians, in [0, pi].
    """
    origins = np.asarray(origins, dtype=float).reshape(-1, 3)
    targets = np.asarray(targets, dtype=float).reshape(-1, 3)
    diff = targets[None, :, :] - origins[:, None, :]
    distance = np.linalg.norm(diff, axis=-1)
    azimuth = np.arctan2(diff[..., 1], diff[..., 0])
    with np.errstate(invalid="ignore", divide="ignore"):
        zenith = np.arccos(np.clip(diff[..., 2] / distance, -1.0, 1.0))
    return distance, azimuth, zenith


def build_link_table(gnb_positions, ue_positions, operator_index, rng,
                     params=DEFAULT_CHANNEL_PARAMS):
    """
    Sample the states and path losses of every link between one operator's gNBs and a set of UEs.

    The states are drawn first (one uniform per link, row-major), then the shadowing
    (one normal per link, row-major).

    Parameters
    ----------
    gnb_positions : numpy.ndarray
        (G, 3) gNB positions.
    ue_positions : numpy.ndarray
        (U, 3) UE positions.
    operator_index : int
        Operator the gNBs belong to.
    rng : numpy.random.Generator
        Random stream of the trial.
    params : ChannelParams
        Channel constants.

    Returns
    -------
    LinkTable
    """
    distance, gnb_azimuth, gnb_zenith = direction_angles(gnb_positions, ue_positions)
    _check_distance(distance)
    states = sample_link_states(distance, rng, params)
    path_loss = sample_path_loss_db(states, distance, rng, params)

    ue_azimuth = np.arctan2(-np.sin(gnb_azimuth), -np.cos(gnb_azimuth))
    ue_zenith = np.pi - gnb_zenith

    return LinkTable(
        operator_index=operator_index,
        distance_m=distance,
        states=states,
        path_loss_db=path_loss,
        gnb_azimuth_rad=gnb_azimuth,
        gnb_zenith_rad=gnb_zenith,
        ue_azimuth_rad=ue_azimuth,
        ue_zenith_rad=ue_zenith,
    )


def export_channel_table(params, path):
    """
    Write the channel constants as a JSON object, in the shape the ``channel_params``
    configuration key accepts.
    """
    params = ChannelParams.from_mapping(params)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(params.to_dict(), sort_keys=True, indent=2) + "\n")
