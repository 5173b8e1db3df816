"""Three-stage discard filter for trajectories and the batch discard rate.

Stages run in a fixed order (disappearance, duplicate objects, stillness) and
a trajectory counts under the *first* stage it fails, so the per-reason
counts always partition the discarded set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .types import Trajectory


class GateReason(str, enum.Enum):
    KEPT = "kept"
    DISAPPEAR = "disappear"
    DUPLICATE = "duplicate"
    STILL = "still"


DISCARD_REASONS = (GateReason.DISAPPEAR, GateReason.DUPLICATE, GateReason.STILL)


@dataclass(frozen=True)
class GateConfig:
    """Thresholds for the three stages.

    ``frame_diagonal`` is in the same length unit as the trajectories (pixels
    for pixel input) and anchors the stillness ratio.
    """

    min_visible_fraction: float = 0.95
    max_multi_object_fraction: float = 0.2
    stillness_path_ratio: float = 0.05
    frame_diagonal: float = 1.0

    def validate(self) -> None:
        if not 0.0 < self.min_visible_fraction <= 1.0:
            raise ValidationError("min_visible_fraction must lie in (0, 1]")
        if not 0.0 <= self.max_multi_object_fraction < 1.0:
            raise ValidationError("max_multi_object_fraction must lie in [0, 1)")
        if self.stillness_path_ratio <= 0:
            raise ValidationError("stillness_path_ratio must be positive")
        if self.frame_diagonal <= 0:
            raise ValidationError("frame_diagonal must be positive")


@dataclass(frozen=True)
class GateVerdict:
    kept: bool
    reason: GateReason

    def __post_init__(self):
        if self.kept != (self.reason == GateReason.KEPT):
            raise ValidationError("kept flag must match the reason")


@dataclass(frozen=True)
class DiscardSummary:
    rate: float
    counts: dict  # GateReason -> int, discard reasons only
    total: int


def gate(traj: Trajectory, cfg: GateConfig | None = None) -> GateVerdict:
    """First-failure verdict over the three discard stages."""
    cfg = cfg or GateConfig()
    cfg.validate()

    visible_fraction = float(np.mean(traj.visible))
    if visible_fraction < cfg.min_visible_fraction:
        return GateVerdict(kept=False, reason=GateReason.DISAPPEAR)

    multi_fraction = float(np.mean(traj.object_count > 1))
    if multi_fraction > cfg.max_multi_object_fraction:
        return GateVerdict(kept=False, reason=GateReason.DUPLICATE)

    if traj.path_length() / cfg.frame_diagonal < cfg.stillness_path_ratio:
        return GateVerdict(kept=False, reason=GateReason.STILL)

    return GateVerdict(kept=True, reason=GateReason.KEPT)


def discard_rate(verdicts: Sequence[GateVerdict] | Iterable[GateVerdict]) -> DiscardSummary:
    """(N_disappear + N_duplicate + N_still) / N_total plus per-reason counts."""
    verdicts = list(verdicts)
    if not verdicts:
        raise ValidationError("cannot compute a discard rate over zero verdicts")
    counts = {reason: 0 for reason in DISCARD_REASONS}
    for v in verdicts:
        if not v.kept:
            counts[v.reason] += 1
    discarded = sum(counts.values())
    return DiscardSummary(rate=discarded / len(verdicts), counts=counts,
                          total=len(verdicts))
