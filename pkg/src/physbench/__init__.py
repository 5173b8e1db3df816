"""Physics-adherence scoring for tracked 2D object trajectories.

The package turns timestamped object positions into smoothed kinematics,
checks them against the conserved quantities of six benchmark experiments,
fits a physics-informed network per trajectory, and aggregates everything
into gate verdicts, Physical Invariance scores and Dynamical scores.
"""

from .types import (
    ExperimentKind,
    ExperimentSpec,
    KinematicSeries,
    KinematicsConfig,
    Trajectory,
)

__all__ = [
    "ExperimentKind",
    "ExperimentSpec",
    "KinematicSeries",
    "KinematicsConfig",
    "Trajectory",
]

__version__ = "0.1.0"
