"""
Random deployment of gNBs and UEs.

Every operator deploys its gNBs and its UEs as two independent homogeneous Poisson point
processes over a square region centred on the origin. A typical UE, whose throughput is
scored, sits exactly at the centre and belongs to the first operator (index 0).
"""

import dataclasses

import numpy as np
import pandas as pd

from mmshare.exceptions import DegenerateTrial, NonPositiveParameter


@dataclasses.dataclass(frozen=True)
class Position:
    """A point in metres; z is the antenna height."""

    x: float
    y: float
    z: float

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, xyz):
        return cls(float(xyz[0]), float(xyz[1]), float(xyz[2]))


@dataclasses.dataclass(frozen=True)
class Deployment:
    """
    Positions of one trial.

    Attributes
    ----------
    gnb_positions : tuple of numpy.ndarray
        Per operator, a (G_m, 3) array of gNB positions.
    ue_positions : tuple of numpy.ndarray
        Per operator, a (U_m, 3) array of UE positions. The typical UE is the last row of
        operator ``typical_operator_index``.
    gnb_orientations : tuple of numpy.ndarray
        Per operator, the boresight azimuth in radians of every gNB array.
    typical_ue : Position
        The typical UE, at the centre of the region.
    typical_operator_index : int
        Operator of the typical UE.
    """

    gnb_positions: tuple
    ue_positions: tuple
    gnb_orientations: tuple
    typical_ue: Position
    typical_operator_index: int = 0

    @property
    def num_operators(self):
        return len(self.gnb_positions)

    @property
    def typical_ue_index(self):
        """Index of the typical UE among the UEs of its operator."""
        return len(self.ue_positions[self.typical_operator_index]) - 1

    def gnb_list(self, operator_index):
        """gNB positions of an operator as a list of :class:`Position`."""
        return [Position.from_array(row) for row in self.gnb_positions[operator_index]]

    def ue_list(self, operator_index):
        """UE positions of an operator as a list of :class:`Position`."""
        return [Position.from_array(row) for row in self.ue_positions[operator_index]]


def sample_ppp(intensity_per_km2, region_side_m, rng, height_m=0.0):
    """
    Sample a homogeneous Poisson point process over a square centred on the origin.

    Parameters
    ----------
    intensity_per_km2 : float
        Points per square kilometre, >= 0.
    region_side_m : float
        Side of the square in metres, > 0.
    rng : numpy.random.Generator
        Random stream. One Poisson draw, then one uniform draw of shape (n, 2).
    height_m : float
        z coordinate of every point. Default 0.

    Returns
    -------
    numpy.ndarray
        (n, 3) positions with n ~ Poisson(intensity * area_km2).

    Raises
    ------
    NonPositiveParameter
        If the intensity is negative or the side is not positive.
    """
    if intensity_per_km2 < 0:
        raise NonPositiveParameter(f"intensity_per_km2 must be >= 0, got {intensity_per_km2!r}.")
    if not region_side_m > 0:
        raise NonPositiveParameter(f"region_side_m must be > 0, got {region_side_m!r}.")

    area_km2 = (region_side_m / 1000.0) ** 2
    count = rng.poisson(intensity_per_km2 * area_km2)
    half = region_side_m / 2.0
    xy = rng.uniform(-half, half, size=(count, 2))
    return np.column_stack([xy, np.full(count, float(height_m))])


def generate_deployment(scenario, rng):
    """
    Draw the gNBs and UEs of every operator and plant the typical UE.

    Draw order: for each operator its gNBs then its UEs, then the orientations of every gNB
    array (uniform in [-pi, pi)), operator by operator.

    Parameters
    ----------
    scenario : ValidatedScenario
        Scenario to deploy.
    rng : numpy.random.Generator
        Random stream of the trial.

    Returns
    -------
    Deployment

    Raises
    ------
    DegenerateTrial
        If the typical UE's operator drew no gNB.
    """
    gnbs, ues = [], []
    for _ in range(scenario.num_operators):
        gnbs.append(sample_ppp(scenario.gnb_density_per_km2, scenario.area_side_m, rng,
                               scenario.gnb_height_m))
        ues.append(sample_ppp(scenario.ue_density_per_km2, scenario.area_side_m, rng,
                              scenario.ue_height_m))

    typical_ue = Position(0.0, 0.0, float(scenario.ue_height_m))
    ues[0] = np.vstack([ues[0], typical_ue.as_array()[None, :]])

    if len(gnbs[0]) == 0:
        raise DegenerateTrial("The typical operator drew no gNB; the trial must be resampled.")

    orientations = [rng.uniform(-np.pi, np.pi, size=len(g)) for g in gnbs]

    return Deployment(
        gnb_positions=tuple(gnbs),
        ue_positions=tuple(ues),
        gnb_orientations=tuple(orientations),
        typical_ue=typical_ue,
        typical_operator_index=0,
    )


def deployment_dataframe(deployment, trial_index):
    """
    Tabulate a deployment: one row per node with columns
    trial, operator, node_type (gnb, ue or typical), x_m, y_m, z_m.
    """
    frames = []
    for m in range(deployment.num_operators):
        for node_type, positions in (("gnb", deployment.gnb_positions[m]),
                                     ("ue", deployment.ue_positions[m])):
            types = [node_type] * len(positions)
            if node_type == "ue" and m == deployment.typical_operator_index:
                types[-1] = "typical"
            frames.append(pd.DataFrame({
                "trial": trial_index,
                "operator": m,
                "node_type": types,
                "x_m": positions[:, 0],
                "y_m": positions[:, 1],
                "z_m": positions[:, 2],
            }))
    return pd.concat(frames, ignore_index=True)
