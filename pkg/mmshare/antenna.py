"""
Uniform planar array (UPA) beamforming with the 3GPP element radiation pattern.

Arrays are vertical planes facing the horizon. Angles passed to this module are in degrees
and in the array's local frame: ``theta`` is the zenith angle (90 is the horizon) and ``phi``
the azimuth from the array boresight. :meth:`ArrayGeometry.to_local` converts global
directions (as stored in a :class:`mmshare.channel.LinkTable`) into that frame.

Element (p, q) of a ``rows x cols`` array (p the row, q the column, flattened row-major) has
response phase ``2 * pi * spacing * (p * cos(theta) + q * sin(theta) * sin(phi))``.
Beams are conjugate (matched-filter) beams with unit norm.
"""

import dataclasses

import numpy as np
import pandas as pd

from mmshare.exceptions import AngleOutOfRange, BadArrayShape

ELEMENT_MAX_GAIN_DBI = 8.0
HALF_POWER_BEAMWIDTH_DEG = 65.0
SIDE_LOBE_LEVEL_DB = 30.0
MAX_ATTENUATION_DB = 30.0


def wrap_angle_deg(angle_deg):
    """Wrap angles in degrees to [-180, 180)."""
    return (np.asarray(angle_deg, dtype=float) + 180.0) % 360.0 - 180.0


@dataclasses.dataclass(frozen=True)
class ArrayGeometry:
    """
    Uniform planar array.

    Attributes
    ----------
    rows, cols : int
        Number of elements along the vertical and horizontal axes.
    element_spacing_wavelengths : float
        Element spacing in wavelengths (half a wavelength).
    orientation_rad : float
        Global azimuth of the array boresight in radians.
    element_pattern : bool
        Whether the elements follow the 3GPP pattern (True) or are isotropic 0 dBi (False).
    """

    rows: int
    cols: int
    element_spacing_wavelengths: float = 0.5
    orientation_rad: float = 0.0
    element_pattern: bool = True

    def __post_init__(self):
        if int(self.rows) < 1 or int(self.cols) < 1:
            raise BadArrayShape(
                f"Array dimensions must be >= 1, got ({self.rows}, {self.cols})."
            )

    @property
    def num_elements(self):
        return int(self.rows) * int(self.cols)

    def oriented(self, orientation_rad):
        """Copy of the geometry with another boresight azimuth."""
        return dataclasses.replace(self, orientation_rad=float(orientation_rad))

    def to_local(self, zenith_rad, azimuth_rad):
        """
        Convert global directions into local (theta_deg, phi_deg) of this array.

        Returns
        -------
        theta_deg, phi_deg : numpy.ndarray
            Zenith angle in [0, 180] and azimuth from boresight in [-180, 180).
        """
        theta = np.degrees(np.asarray(zenith_rad, dtype=float))
        phi = wrap_angle_deg(np.degrees(np.asarray(azimuth_rad, dtype=float) - self.orientation_rad))
        return theta, phi


def _check_angles(theta_deg, phi_deg):
    theta = np.asarray(theta_deg, dtype=float)
    phi = np.asarray(phi_deg, dtype=float)
    if np.any((theta < 0) | (theta > 180)) or np.any(np.isnan(theta)):
        raise AngleOutOfRange(f"theta must lie in [0, 180] degrees, got {theta_deg!r}.")
    if np.any((phi < -180) | (phi > 180)) or np.any(np.isnan(phi)):
        raise AngleOutOfRange(f"phi must lie in [-180, 180] degrees, got {phi_deg!r}.")
    return theta, phi


def element_gain_db(theta_deg, phi_deg):
    """
    3GPP element gain in dBi.

    Parameters
    ----------
    theta_deg : float or array
        Zenith angle in degrees, in [0, 180].
    phi_deg : float or array
        Azimuth from boresight in degrees, in [-180, 180].

    Returns
    -------
    float or numpy.ndarray
        ``8 - min(-(A_V + A_H), 30)`` with ``A_V = -min(12 ((theta - 90) / 65)^2, 30)`` and
        ``A_H = -min(12 (phi / 65)^2, 30)``.

    Raises
    ------
    AngleOutOfRange
        If an angle lies outside its range.
    """
    theta, phi = _check_angles(theta_deg, phi_deg)
    a_v = -np.minimum(12.0 * ((theta - 90.0) / HALF_POWER_BEAMWIDTH_DEG) ** 2, SIDE_LOBE_LEVEL_DB)
    a_h = -np.minimum(12.0 * (phi / HALF_POWER_BEAMWIDTH_DEG) ** 2, MAX_ATTENUATION_DB)
    gain = ELEMENT_MAX_GAIN_DBI - np.minimum(-(a_v + a_h), MAX_ATTENUATION_DB)
    return float(gain) if np.ndim(gain) == 0 else gain


def element_gain_linear(geom, theta_deg, phi_deg):
    """Linear element gain of ``geom`` (1 for isotropic elements)."""
    if not geom.element_pattern:
        _check_angles(theta_deg, phi_deg)
        return np.ones(np.broadcast(np.asarray(theta_deg), np.asarray(phi_deg)).shape)
    return 10.0 ** (np.asarray(element_gain_db(theta_deg, phi_deg)) / 10.0)


def _element_indexes(geom):
    p = np.repeat(np.arange(geom.rows), geom.cols)
    q = np.tile(np.arange(geom.cols), geom.rows)
    return p, q


def array_response(geom, theta_deg, phi_deg):
    """
    Array response vector(s) for the given local direction(s).

    Parameters
    ----------
    geom : ArrayGeometry
        Array geometry.
    theta_deg, phi_deg : float or array
        Local direction(s) in degrees; arrays broadcast together.

    Returns
    -------
    numpy.ndarray
        Complex array of shape ``broadcast_shape + (rows * cols,)`` with unit-magnitude entries.
    """
    theta, phi = _check_angles(theta_deg, phi_deg)
    theta, phi = np.broadcast_arrays(np.radians(theta), np.radians(phi))
    p, q = _element_indexes(geom)
    phase = 2.0 * np.pi * geom.element_spacing_wavelengths * (
        p * np.cos(theta)[..., None] + q * (np.sin(theta) * np.sin(phi))[..., None]
    )
    return np.exp(1j * phase)


def steering_vector(geom, theta_deg, phi_deg):
    """Unit-norm conjugate beam towards the given local direction(s)."""
    return array_response(geom, theta_deg, phi_deg) / np.sqrt(geom.num_elements)


def array_factor(geom, steer, actual):
    """
    Power gain ``|w^H a|^2`` of a beam steered to ``steer`` seen from direction ``actual``.

    ``steer`` and ``actual`` are (theta_deg, phi_deg) pairs of scalars or broadcastable arrays.
    """
    w = steering_vector(geom, *steer)
    a = array_response(geom, *actual)
    return np.abs(np.sum(np.conj(w) * a, axis=-1)) ** 2


def beamforming_gain(tx_geom, tx_steer_dir, rx_geom, rx_steer_dir, actual_tx_angles,
                     actual_rx_angles):
    """
    Linear beamforming gain of a link, array factors and element gains at both ends.

    Parameters
    ----------
    tx_geom, rx_geom : ArrayGeometry
        Transmit (gNB) and receive (UE) arrays.
    tx_steer_dir, rx_steer_dir : tuple
        (theta_deg, phi_deg) the beams are steered to, in the local frame of each array.
    actual_tx_angles, actual_rx_angles : tuple
        (theta_deg, phi_deg) of the actual link direction at each end, local frame.
        Every angle may be an array; all of them broadcast together.

    Returns
    -------
    float or numpy.ndarray
        ``|w_tx^H a_tx|^2 g_tx |w_rx^H a_rx|^2 g_rx``. When the beams are steered to the actual
        directions this equals ``N_tx g_tx N_rx g_rx``.
    """
    gain = (
        array_factor(tx_geom, tx_steer_dir, actual_tx_angles)
        * element_gain_linear(tx_geom, *actual_tx_angles)
        * array_factor(rx_geom, rx_steer_dir, actual_rx_angles)
        * element_gain_linear(rx_geom, *actual_rx_angles)
    )
    return float(gain) if np.ndim(gain) == 0 else gain


def pattern_grid(geom, phi_step_deg=1.0, theta_step_deg=1.0):
    """
    Radiation pattern of an array steered at boresight, over a (phi, theta) grid.

    Parameters
    ----------
    geom : ArrayGeometry
        Array geometry.
    phi_step_deg : float
        Azimuth step in degrees; the grid spans [-180, 180].
    theta_step_deg : float
        Zenith step in degrees; the grid spans [0, 180].

    Returns
    -------
    pandas.DataFrame
        Columns phi_deg, theta_deg, gain_db (phi varying slowest).

    Raises
    ------
    AngleOutOfRange
        If a step is not in (0, 360] for phi or (0, 180] for theta.
    """
    if not 0 < phi_step_deg <= 360:
        raise AngleOutOfRange(f"phi_step_deg must be in (0, 360], got {phi_step_deg!r}.")
    if not 0 < theta_step_deg <= 180:
        raise AngleOutOfRange(f"theta_step_deg must be in (0, 180], got {theta_step_deg!r}.")

    phis = -180.0 + phi_step_deg * np.arange(int(np.floor(360.0 / phi_step_deg + 1e-9)) + 1)
    thetas = theta_step_deg * np.arange(int(np.floor(180.0 / theta_step_deg + 1e-9)) + 1)
    phis, thetas = np.minimum(phis, 180.0), np.minimum(thetas, 180.0)
    phi_grid, theta_grid = np.meshgrid(phis, thetas, indexing="ij")
    phi_grid, theta_grid = phi_grid.ravel(), theta_grid.ravel()

    gain = (
        array_factor(geom, (90.0, 0.0), (theta_grid, phi_grid))
        * element_gain_linear(geom, theta_grid, phi_grid)
    )
    gain_db = 10.0 * np.log10(np.maximum(gain, np.finfo(float).tiny))

    return pd.DataFrame({"phi_deg": phi_grid, "theta_deg": theta_grid, "gain_db": gain_db})
