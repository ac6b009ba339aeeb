"""Deterministic COLREGs classification for a power-driven vessel pair.

An encounter is classified in two stages: each vessel maps the relative
bearing of the other (plus the course-opposition measure) into one of four
regions (head-on / starboard / overtaking / port), and the ordered region
pair maps into an applicable rule plus the acting vessel's give-way or
stand-on obligation.

Region band boundaries (degrees): head-on covers [0, 5] and (355, 360) plus
any pair whose courses are within 5 deg of reciprocal; starboard covers
(5, 112.5]; overtaking (112.5, 247.5]; port (247.5, 355].  The course
proximity test uses |dpsi| uniformly in all bands so the mapping is total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import NamedTuple

import numpy as np

from .kinematics import (
    DegenerateRelativeMotion,
    VesselState,
    cpa,
    reciprocal_course,
    reciprocal_course_arrays,
    relative_bearing,
    wrap_degrees,
)


class Region(IntEnum):
    """Bearing region of one vessel as seen from the other."""

    HEAD_ON = 0
    STARBOARD = 1
    OVERTAKING = 2
    PORT = 3


class Rule(Enum):
    """Applicable COLREGs rule; R0 means none of rules 13-15 applies."""

    R0 = 0
    R13 = 13
    R14 = 14
    R15 = 15


class Obligation(IntEnum):
    STAND_ON = 0
    GIVE_WAY = 1


class SituationOutcome(NamedTuple):
    """(rule, obligation) classification for the acting vessel."""

    rule: Rule
    obligation: Obligation


@dataclass(frozen=True)
class ComfortZone:
    """Risk thresholds: action radius d_act (m) and awareness horizon t_aware (s)."""

    d_act: float
    t_aware: float

    def __post_init__(self) -> None:
        if not self.d_act > 0.0:
            raise ValueError(f"d_act must be positive, got {self.d_act}")
        if not self.t_aware > 0.0:
            raise ValueError(f"t_aware must be positive, got {self.t_aware}")


# Rows: acting vessel's region.  Columns: target vessel's region, both in
# Region order (HEAD_ON, STARBOARD, OVERTAKING, PORT).  The three diagonal
# same-region crossings cannot arise from a persistent approach and carry no
# rule; they are conservatively assigned a give-way obligation.
_SITUATION_TABLE: tuple[tuple[SituationOutcome, ...], ...] = (
    (
        SituationOutcome(Rule.R14, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R15, Obligation.STAND_ON),
        SituationOutcome(Rule.R13, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R15, Obligation.GIVE_WAY),
    ),
    (
        SituationOutcome(Rule.R15, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R0, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R13, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R15, Obligation.GIVE_WAY),
    ),
    (
        SituationOutcome(Rule.R13, Obligation.STAND_ON),
        SituationOutcome(Rule.R13, Obligation.STAND_ON),
        SituationOutcome(Rule.R0, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R13, Obligation.STAND_ON),
    ),
    (
        SituationOutcome(Rule.R15, Obligation.STAND_ON),
        SituationOutcome(Rule.R15, Obligation.STAND_ON),
        SituationOutcome(Rule.R13, Obligation.GIVE_WAY),
        SituationOutcome(Rule.R0, Obligation.GIVE_WAY),
    ),
)

# Integer lookup mirrors for the vectorised path.
RULE_VALUES: tuple[Rule, ...] = (Rule.R0, Rule.R13, Rule.R14, Rule.R15)
_RULE_INDEX = np.array(
    [[RULE_VALUES.index(cell.rule) for cell in row] for row in _SITUATION_TABLE],
    dtype=np.int64,
)
_OBLIGATION = np.array(
    [[int(cell.obligation) for cell in row] for row in _SITUATION_TABLE],
    dtype=np.int64,
)


def bearing_region(beta: float, own_course: float, other_course: float) -> Region:
    """Map a relative bearing (deg) and the two courses into a Region."""
    beta = wrap_degrees(beta)
    dpsi = reciprocal_course(own_course, other_course)
    if beta <= 5.0 or beta > 355.0 or abs(dpsi) <= 5.0:
        return Region.HEAD_ON
    if beta <= 112.5:
        return Region.STARBOARD
    if beta <= 247.5:
        return Region.OVERTAKING
    return Region.PORT


def mutual_situation(own_region: Region, other_region: Region) -> SituationOutcome:
    """(rule, obligation) for the acting vessel given both region views."""
    return _SITUATION_TABLE[own_region][other_region]


def give_way_pairs() -> frozenset[tuple[Region, Region]]:
    """All (own, other) region pairs whose outcome obliges the acting vessel
    to give way.  Derived from the situation table, never transcribed."""
    return frozenset(
        (Region(a), Region(t))
        for a in Region
        for t in Region
        if _SITUATION_TABLE[a][t].obligation is Obligation.GIVE_WAY
    )


def classify_sample(
    own: VesselState, other: VesselState, zone: ComfortZone
) -> tuple[bool, SituationOutcome]:
    """Single-sample risk test plus situation classification.

    Risk requires DCPA <= d_act with the CPA inside the awareness window
    0 <= TCPA <= t_aware.  A degenerate pair (matched velocities) poses a
    risk only if the constant separation is already inside d_act.

    Raises:
        CoincidentPositions: propagated from the bearing computation.
    """
    try:
        result = cpa(own, other)
        risk = result.dcpa <= zone.d_act and 0.0 <= result.tcpa <= zone.t_aware
    except DegenerateRelativeMotion:
        separation = math.hypot(own.north - other.north, own.east - other.east)
        risk = separation <= zone.d_act
    beta_own = relative_bearing(own, other)
    beta_other = relative_bearing(other, own)
    outcome = mutual_situation(
        bearing_region(beta_own, own.course, other.course),
        bearing_region(beta_other, other.course, own.course),
    )
    return risk, outcome


# ---------------------------------------------------------------------------
# Vectorised classification kernels.
# ---------------------------------------------------------------------------


def region_codes(beta: np.ndarray, dpsi: np.ndarray) -> np.ndarray:
    """Region indices (Region values) for bearing/course-opposition columns."""
    head_on = (beta <= 5.0) | (beta > 355.0) | (np.abs(dpsi) <= 5.0)
    return np.where(
        head_on,
        int(Region.HEAD_ON),
        np.where(
            beta <= 112.5,
            int(Region.STARBOARD),
            np.where(beta <= 247.5, int(Region.OVERTAKING), int(Region.PORT)),
        ),
    )


def situation_codes(
    beta_own: np.ndarray,
    beta_other: np.ndarray,
    course_own: np.ndarray,
    course_other: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised mutual classification.

    Returns (own_region, other_region, rule_index, obligation) integer
    columns, with rule_index indexing RULE_VALUES.
    """
    dpsi = reciprocal_course_arrays(course_own, course_other)
    own_region = region_codes(beta_own, dpsi)
    # |dpsi| is symmetric between the two viewpoints, so reuse it.
    other_region = region_codes(beta_other, dpsi)
    rule_index = _RULE_INDEX[own_region, other_region]
    obligation = _OBLIGATION[own_region, other_region]
    return own_region, other_region, rule_index, obligation
