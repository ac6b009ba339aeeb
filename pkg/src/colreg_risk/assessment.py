"""Result containers shared by the two estimation pipelines."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .colregs import Obligation, Region, Rule


class Method(Enum):
    KDE = "kde"
    DES = "des"


@dataclass(frozen=True)
class SituationDistribution:
    """Per-vessel region probabilities and the joint region-pair table."""

    own_regions: Mapping[Region, float]
    other_regions: Mapping[Region, float]
    joint: Mapping[tuple[Region, Region], float]


@dataclass(frozen=True)
class RiskAssessment:
    """Probability bundle for one assessed vessel pair.

    ``p_risk`` is P(DCPA <= d_act); ``p_tcpa_window`` is P(0 <= TCPA <=
    t_aware), reported separately because the action threshold alone
    drives the risk columns.  ``p_rule`` aggregates both obligations under
    R13/R15 and always sums to one across the four rules.  ``p_stand_on``
    is defined as 1 - p_give_way.
    """

    p_risk: float
    p_tcpa_window: float
    p_rule: Mapping[Rule, float]
    p_give_way: float
    p_stand_on: float
    method: Method
    n_samples: int
    seed: int
    situation: SituationDistribution | None = None


# The six (rule, obligation) events a classified sample can land in.
SITUATION_EVENTS: tuple[tuple[Rule, Obligation], ...] = (
    (Rule.R0, Obligation.GIVE_WAY),
    (Rule.R13, Obligation.STAND_ON),
    (Rule.R13, Obligation.GIVE_WAY),
    (Rule.R14, Obligation.GIVE_WAY),
    (Rule.R15, Obligation.STAND_ON),
    (Rule.R15, Obligation.GIVE_WAY),
)


def assessment_from_counts(
    risk_count: int,
    window_count: int,
    situation_counts: Mapping[tuple[Rule, Obligation], int],
    n: int,
    method: Method,
    seed: int,
    situation: SituationDistribution | None = None,
) -> RiskAssessment:
    """Assemble a RiskAssessment from per-sample event counts.

    Every sample must land in exactly one situation event; the give-way
    probability is the give-way-classified fraction times the risk
    probability, mirroring the conditional-times-marginal factorisation.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    total = sum(situation_counts.get(event, 0) for event in SITUATION_EVENTS)
    if total != n:
        raise ValueError(f"situation counts sum to {total}, expected {n}")

    p_rule = {rule: 0.0 for rule in Rule}
    give_way_count = 0
    for (rule, obligation), count in situation_counts.items():
        p_rule[rule] += count / n
        if obligation is Obligation.GIVE_WAY:
            give_way_count += count

    p_risk = risk_count / n
    p_give_way = (give_way_count / n) * p_risk
    return RiskAssessment(
        p_risk=p_risk,
        p_tcpa_window=window_count / n,
        p_rule=MappingProxyType(p_rule),
        p_give_way=p_give_way,
        p_stand_on=1.0 - p_give_way,
        method=method,
        n_samples=n,
        seed=seed,
        situation=situation,
    )
