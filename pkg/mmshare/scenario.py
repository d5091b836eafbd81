"""
Scenario configuration, its validation, and the deterministic per-trial seeds.

A scenario is read from a UTF-8 JSON object whose keys are the field names of
:class:`ScenarioConfig`. Unknown keys are rejected. Every field has a documented default, so
an empty object is the default scenario: five operators with one 200 MHz chunk each out of
1 GHz at 27 GHz.
"""

import dataclasses
import json
import numbers

import numpy as np

from mmshare.channel import ChannelParams
from mmshare.exceptions import (
    ChunkOverflow,
    FloorTooLarge,
    InvalidScenario,
    UnknownConfigKey,
)
from mmshare.utils.check_validity import (
    array_shape_problem,
    check_dtype,
    check_number,
    positive_problem,
)

LOAD_METRICS = ("typical_gnb", "relative", "operator_total")
MAX_CHUNKS_PER_OPERATOR = 2
_UINT64 = 2 ** 64
_FLOAT_SLACK = 1e-12


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """
    Physical and experimental parameters of a campaign.

    Attributes
    ----------
    num_operators : int
        Number of operators M.
    total_bandwidth_hz : float
        Total band W_tot shared by the operators.
    chunk_bandwidth_hz : float
        Size of one licensed chunk.
    gnb_density_per_km2, ue_density_per_km2 : float
        gNB and UE densities per operator.
    area_side_m : float
        Side of the square simulation region.
    carrier_frequency_hz : float
        Carrier frequency (only used for half-wavelength bookkeeping).
    tx_power_dbm : float
        gNB transmit power P.
    noise_psd_dbm_hz : float
        Noise power spectral density N_0, noise figure included.
    gnb_array, ue_array : tuple of int
        (rows, cols) of the gNB and UE planar arrays.
    gnb_height_m, ue_height_m : float
        Antenna heights.
    allocation_floor_fraction : float
        Minimum share f_min of W_tot guaranteed to every operator by the dynamic policy.
    num_trials : int
        Number of Monte Carlo trials T.
    master_seed : int
        64-bit master seed from which every trial seed is derived.
    licensed_chunks : tuple of int or None
        Chunks (0, 1 or 2) licensed to each operator; None means one each.
    share_unsold_chunks : bool
        Whether the baseline splits unlicensed chunks equally among the operators.
    load_metric : str
        Load used by the dynamic policy: "typical_gnb", "relative" or "operator_total".
    gnb_element_pattern, ue_element_pattern : bool
        Use the 3GPP element pattern (True) or isotropic elements (False) at each side.
    channel_params : dict, ChannelParams or None
        Overrides of the channel constants table.
    """

    num_operators: int = 5
    total_bandwidth_hz: float = 1.0e9
    chunk_bandwidth_hz: float = 2.0e8
    gnb_density_per_km2: float = 75.0
    ue_density_per_km2: float = 100.0
    area_side_m: float = 1000.0
    carrier_frequency_hz: float = 2.7e10
    tx_power_dbm: float = 30.0
    noise_psd_dbm_hz: float = -167.0
    gnb_array: tuple = (8, 8)
    ue_array: tuple = (4, 4)
    gnb_height_m: float = 10.0
    ue_height_m: float = 1.5
    allocation_floor_fraction: float = 0.0
    num_trials: int = 10000
    master_seed: int = 0
    licensed_chunks: tuple = None
    share_unsold_chunks: bool = False
    load_metric: str = "typical_gnb"
    gnb_element_pattern: bool = True
    ue_element_pattern: bool = True
    channel_params: object = None


@dataclasses.dataclass(frozen=True)
class ValidatedScenario(ScenarioConfig):
    """A :class:`ScenarioConfig` that passed :func:`validate_config`, defaults filled in."""

    @property
    def wavelength_m(self):
        return 299792458.0 / self.carrier_frequency_hz


@dataclasses.dataclass(frozen=True)
class TrialSeed:
    """Seed of one trial, derived from the master seed."""

    value: int
    trial_index: int


CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(ScenarioConfig))


def _type_checks(cfg):
    for name in ("num_operators", "num_trials", "master_seed"):
        check_number(getattr(cfg, name), name, integer=True)
    for name in ("total_bandwidth_hz", "chunk_bandwidth_hz", "gnb_density_per_km2",
                 "ue_density_per_km2", "area_side_m", "carrier_frequency_hz", "tx_power_dbm",
                 "noise_psd_dbm_hz", "gnb_height_m", "ue_height_m",
                 "allocation_floor_fraction"):
        check_number(getattr(cfg, name), name)
    for name in ("share_unsold_chunks", "gnb_element_pattern", "ue_element_pattern"):
        check_dtype(getattr(cfg, name), bool, name)
    check_dtype(cfg.load_metric, str, "load_metric")


def validate_config(cfg):
    """
    Validate a scenario and fill in the defaults of absent optional fields.

    Parameters
    ----------
    cfg : ScenarioConfig
        Scenario to validate. A ValidatedScenario is accepted too and comes back unchanged.

    Returns
    -------
    ValidatedScenario

    Raises
    ------
    TypeError
        If a field has the wrong type.
    InvalidScenario
        If invariants are broken. A single violation is raised as its own class
        (``NonPositiveParameter``, ``ChunkOverflow``, ``FloorTooLarge``, ``BadArrayShape``,
        ``UnknownConfigKey``); several are raised together as ``InvalidScenario`` whose
        ``problems`` attribute lists each of them.
    """
    if not isinstance(cfg, ScenarioConfig):
        raise TypeError(
            f"validate_config expects a ScenarioConfig, not {type(cfg).__name__}."
        )
    _type_checks(cfg)
    problems = []

    def add(problem):
        if problem is not None:
            problems.append(problem)

    m = cfg.num_operators
    add(positive_problem(m, "num_operators"))
    for name in ("total_bandwidth_hz", "chunk_bandwidth_hz", "gnb_density_per_km2",
                 "ue_density_per_km2", "area_side_m", "carrier_frequency_hz", "num_trials"):
        add(positive_problem(getattr(cfg, name), name))
    for name in ("gnb_height_m", "ue_height_m", "allocation_floor_fraction", "master_seed"):
        add(positive_problem(getattr(cfg, name), name, allow_zero=True))

    if cfg.master_seed >= _UINT64:
        problems.append(InvalidScenario(f"master_seed must be < 2**64, got {cfg.master_seed}."))

    if m > 0 and cfg.chunk_bandwidth_hz * m > cfg.total_bandwidth_hz * (1 + _FLOAT_SLACK):
        problems.append(ChunkOverflow(
            f"num_operators * chunk_bandwidth_hz = {m} * {cfg.chunk_bandwidth_hz:g} Hz exceeds "
            f"total_bandwidth_hz = {cfg.total_bandwidth_hz:g} Hz."
        ))
    if cfg.allocation_floor_fraction * m > 1 + _FLOAT_SLACK:
        problems.append(FloorTooLarge(
            f"allocation_floor_fraction * num_operators = {cfg.allocation_floor_fraction} * {m} "
            "exceeds 1."
        ))

    gnb_array = tuple(cfg.gnb_array) if isinstance(cfg.gnb_array, (list, tuple)) else cfg.gnb_array
    ue_array = tuple(cfg.ue_array) if isinstance(cfg.ue_array, (list, tuple)) else cfg.ue_array
    add(array_shape_problem(gnb_array, "gnb_array"))
    add(array_shape_problem(ue_array, "ue_array"))

    if cfg.licensed_chunks is None:
        licensed_chunks = (1,) * max(m, 0)
    else:
        licensed_chunks = tuple(cfg.licensed_chunks)
        if len(licensed_chunks) != m:
            problems.append(InvalidScenario(
                f"licensed_chunks must have num_operators = {m} entries, got {len(licensed_chunks)}."
            ))
        bad = [c for c in licensed_chunks
               if not isinstance(c, numbers.Integral) or isinstance(c, bool)
               or not 0 <= c <= MAX_CHUNKS_PER_OPERATOR]
        if bad:
            problems.append(InvalidScenario(
                f"licensed_chunks entries must be integers in 0..{MAX_CHUNKS_PER_OPERATOR}, "
                f"got {list(licensed_chunks)}."
            ))
        elif sum(licensed_chunks) * cfg.chunk_bandwidth_hz > cfg.total_bandwidth_hz * (1 + _FLOAT_SLACK):
            problems.append(ChunkOverflow(
                f"licensed_chunks total {sum(licensed_chunks)} chunk(s) of "
                f"{cfg.chunk_bandwidth_hz:g} Hz exceeds total_bandwidth_hz = "
                f"{cfg.total_bandwidth_hz:g} Hz."
            ))

    if cfg.load_metric not in LOAD_METRICS:
        problems.append(InvalidScenario(
            f"load_metric must be one of {', '.join(LOAD_METRICS)}, got {cfg.load_metric!r}."
        ))

    channel_params = None
    try:
        channel_params = ChannelParams.from_mapping(cfg.channel_params)
    except UnknownConfigKey as e:
        problems.append(e)
    else:
        problems.extend(channel_params.problems())

    if len(problems) == 1:
        raise problems[0]
    if problems:
        raise InvalidScenario(
            "Invalid scenario:\n" + "\n".join(f"  - {p}" for p in problems),
            problems,
        )

    values = {name: getattr(cfg, name) for name in CONFIG_KEYS}
    values.update(
        gnb_array=tuple(int(n) for n in gnb_array),
        ue_array=tuple(int(n) for n in ue_array),
        licensed_chunks=tuple(int(c) for c in licensed_chunks),
        channel_params=channel_params,
    )
    return ValidatedScenario(**values)


def config_from_dict(mapping):
    """
    Build a :class:`ScenarioConfig` from a mapping of field values.

    Raises
    ------
    UnknownConfigKey
        If the mapping has a key that is not a configuration field.
    """
    if not isinstance(mapping, dict):
        raise InvalidScenario(
            f"A scenario must be a JSON object, got {type(mapping).__name__}."
        )
    unknown = sorted(set(mapping) - set(CONFIG_KEYS))
    if unknown:
        raise UnknownConfigKey(f"Unknown configuration key(s): {', '.join(unknown)}.")
    values = dict(mapping)
    for name in ("gnb_array", "ue_array", "licensed_chunks"):
        if isinstance(values.get(name), list):
            values[name] = tuple(values[name])
    return ScenarioConfig(**values)


def read_config_file(path):
    """Read a configuration file into a plain dict (no validation)."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_config(path=None, overrides=None):
    """
    Load a scenario from a UTF-8 JSON file and apply ``key=value`` overrides.

    Parameters
    ----------
    path : str or Path or None
        Configuration file. None starts from the default scenario.
    overrides : list of str or None
        Overrides passed to :func:`apply_overrides` after the file is read.

    Returns
    -------
    ScenarioConfig
        Not validated yet.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    json.JSONDecodeError
        If the file is not valid JSON.
    InvalidScenario
        If the file does not hold a JSON object.
    UnknownConfigKey
        If the file or an override names an unknown field.
    """
    mapping = {} if path is None else read_config_file(path)
    if not isinstance(mapping, dict):
        raise InvalidScenario(
            f"A scenario must be a JSON object, got {type(mapping).__name__}."
        )
    return config_from_dict(apply_overrides(mapping, overrides))


def _parse_override_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    parts = [part.strip() for part in text.split(",")]
    try:
        values = [json.loads(part) for part in parts]
    except json.JSONDecodeError:
        return text
    if len(parts) > 1 and all(isinstance(n, (int, float)) for n in values):
        return values
    return text


def apply_overrides(mapping, overrides):
    """
    Apply ``key=value`` overrides to a configuration mapping.

    Values are parsed as JSON (``5``, ``true``, ``[8, 8]``), then as a comma-separated list of
    numbers (``8,8``), and are otherwise kept as strings. Dotted keys set one entry of a nested
    object, e.g. ``channel_params.los_sigma_db=0``.

    Parameters
    ----------
    mapping : dict
        Configuration mapping (not modified).
    overrides : list of str
        ``key=value`` strings, applied in order.

    Returns
    -------
    dict
        New mapping with the overrides applied.

    Raises
    ------
    UnknownConfigKey
        If an override names an unknown field or is not of the form key=value.
    """
    result = dict(mapping)
    for override in overrides or []:
        key, sep, raw = override.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UnknownConfigKey(f"Override {override!r} is not of the form key=value.")
        value = _parse_override_value(raw.strip())
        head, _, tail = key.partition(".")
        if head not in CONFIG_KEYS:
            raise UnknownConfigKey(f"Unknown configuration key in override: {head!r}.")
        if tail:
            nested = result.get(head)
            nested = dict(nested.to_dict() if isinstance(nested, ChannelParams) else nested or {})
            nested[tail] = value
            result[head] = nested
        else:
            result[head] = value
    return result


def scenario_to_dict(scenario):
    """JSON-safe dict of a scenario (tuples become lists, channel constants a dict)."""
    out = {}
    for name in CONFIG_KEYS:
        value = getattr(scenario, name)
        if isinstance(value, ChannelParams):
            value = value.to_dict()
        elif isinstance(value, tuple):
            value = list(value)
        out[name] = value
    return out


# SplitMix64 finaliser constants
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB
_MASK = _UINT64 - 1


def _splitmix64(x):
    z = (x + _GOLDEN_GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _MIX_1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_2) & _MASK
    return z ^ (z >> 31)


def derive_trial_seed(master_seed, trial_index):
    """
    Seed of one trial: SplitMix64 finaliser applied to ``master_seed XOR trial_index``.

    The finaliser is a bijection of 64-bit integers, so for a fixed master seed distinct trial
    indexes always give distinct seeds.

    Parameters
    ----------
    master_seed : int
        Master seed in [0, 2**64).
    trial_index : int
        Trial index, >= 0.

    Returns
    -------
    TrialSeed
    """
    if trial_index < 0:
        raise ValueError(f"trial_index must be >= 0, got {trial_index}.")
    x = (int(master_seed) ^ int(trial_index)) & _MASK
    return TrialSeed(value=_splitmix64(x), trial_index=int(trial_index))


def derive_trial_seeds(master_seed, trial_indexes):
    """Vectorised :func:`derive_trial_seed`, returning the seed values as a uint64 array."""
    x = np.uint64(int(master_seed) & _MASK) ^ np.atleast_1d(np.asarray(trial_indexes, dtype=np.uint64))
    z = x + np.uint64(_GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_2)
    return z ^ (z >> np.uint64(31))


def trial_rng(trial_seed, attempt=0):
    """
    Random stream of a trial. ``attempt`` selects the resampling substream (0 for the first draw).
    """
    value = trial_seed.value if isinstance(trial_seed, TrialSeed) else int(trial_seed)
    return np.random.default_rng([value, int(attempt)])

