"""End-to-end encounter assessment under tracker uncertainty.

Two interchangeable Monte-Carlo pipelines produce a ``RiskAssessment`` for
a vessel pair: a density pipeline that fits kernel densities to the sampled
CPA/bearing quantities and integrates the relevant bands, and a counting
pipeline that walks the discrete-event loop per sample and averages the
indicator outcomes.  Both draw the same perturbed state batches for a given
seed, so their disagreement measures the method, not the noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assessment import Method, RiskAssessment, SituationDistribution, assessment_from_counts
from .automaton import AutomatonConfig
from .colregs import (
    ComfortZone,
    Obligation,
    Region,
    Rule,
    mutual_situation,
    situation_codes,
)
from .density import (
    DensityEstimate,
    Topology,
    TooFewSamples,
    fit,
    integrate,
    select_bandwidth,
)
from .kinematics import VesselState, bearing_arrays, cpa_arrays, reciprocal_course_arrays
from .sampling import SampleBatch, StateUncertainty, draw_pair, pair_stream_seeds

_REGIONS = (Region.HEAD_ON, Region.STARBOARD, Region.OVERTAKING, Region.PORT)
# Bearing bands per region; the head-on band wraps through north.
_REGION_ARCS = {
    Region.HEAD_ON: (355.0, 5.0),
    Region.STARBOARD: (5.0, 112.5),
    Region.OVERTAKING: (112.5, 247.5),
    Region.PORT: (247.5, 355.0),
}


@dataclass(frozen=True)
class EncounterBuffers:
    """Per-sample CPA and bearing quantities for one sampled batch.

    Degenerate samples (matched velocities) carry tcpa = +inf and dcpa
    equal to the current separation.
    """

    tcpa: np.ndarray
    dcpa: np.ndarray
    bearing_jk: np.ndarray
    bearing_kj: np.ndarray
    course_delta: np.ndarray
    degenerate: np.ndarray


def encounter_buffers(batch: SampleBatch) -> EncounterBuffers:
    """Vectorised CPA/bearing evaluation of a sampled batch."""
    sj, sk = batch.states_j, batch.states_k
    tcpa, dcpa, degenerate = cpa_arrays(
        sj.north, sj.east, sj.course, sj.speed,
        sk.north, sk.east, sk.course, sk.speed,
    )
    return EncounterBuffers(
        tcpa=tcpa,
        dcpa=dcpa,
        bearing_jk=bearing_arrays(sj.north, sj.east, sj.course, sk.north, sk.east),
        bearing_kj=bearing_arrays(sk.north, sk.east, sk.course, sj.north, sj.east),
        course_delta=reciprocal_course_arrays(sj.course, sk.course),
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# Density-pipeline helpers.  Buffers with zero spread (exact tracking) fall
# back to point masses so the pipeline degrades to the deterministic answer.
# ---------------------------------------------------------------------------


class _BufferDensity:
    def __init__(self, values: np.ndarray, topology: Topology, selector: str):
        self.topology = topology
        if values.size and float(np.ptp(values)) == 0.0:
            self.point: float | None = float(values[0])
            self.estimate: DensityEstimate | None = None
        else:
            self.point = None
            h = select_bandwidth(values, selector, topology)
            self.estimate = fit(values, h, topology)

    def mass(self, lo: float, hi: float) -> float:
        if self.point is not None:
            value = self.point
            if self.topology is Topology.CIRCLE360 and lo > hi:
                return float(value >= lo or value <= hi)
            return float(lo <= value <= hi)
        assert self.estimate is not None
        return integrate(self.estimate, lo, hi)


def _region_probabilities(
    bearing_density: _BufferDensity, p_course_opposed: float
) -> np.ndarray:
    """Marginal region probabilities for one vessel.

    The head-on probability is the union of the bearing band and the
    course-proximity event (treated as independent); the other bands are
    scaled by the complement so the four probabilities sum to one.
    """
    band = np.array([bearing_density.mass(*_REGION_ARCS[r]) for r in _REGIONS])
    probs = band * (1.0 - p_course_opposed)
    head_on = band[0] + p_course_opposed - band[0] * p_course_opposed
    probs[0] = head_on
    return probs


def _situation_from_marginals(
    own: np.ndarray, other: np.ndarray
) -> SituationDistribution:
    joint = {
        (a, t): float(own[a] * other[t])
        for a in _REGIONS
        for t in _REGIONS
    }
    return SituationDistribution(
        own_regions={r: float(own[r]) for r in _REGIONS},
        other_regions={r: float(other[r]) for r in _REGIONS},
        joint=joint,
    )


def assess_kde(
    j_mean: VesselState,
    j_unc: StateUncertainty,
    k_mean: VesselState,
    k_unc: StateUncertainty,
    zone: ComfortZone,
    n: int,
    seed: int,
    bandwidth: str = "isj",
) -> RiskAssessment:
    """Density-pipeline assessment of one vessel pair.

    Draws ``n`` paired samples, fits densities to the TCPA, DCPA, two
    bearing and course-opposition buffers (bearings on the circle, the rest
    on the line), and integrates: risk from the DCPA density inside d_act,
    region probabilities from the bearing bands with the head-on course
    correction, the joint as the product of the two marginals, and the
    give-way probability as the give-way mass of the joint times the risk.
    """
    if n < 1000:
        raise TooFewSamples(f"density pipeline needs n >= 1000, got {n}")
    batch = draw_pair(j_mean, j_unc, k_mean, k_unc, n, seed)
    buf = encounter_buffers(batch)

    dcpa_density = _BufferDensity(buf.dcpa, Topology.LINE, bandwidth)
    p_risk = dcpa_density.mass(0.0, zone.d_act)

    finite = np.isfinite(buf.tcpa)
    finite_frac = float(np.mean(finite))
    if finite_frac > 0.0:
        tcpa_density = _BufferDensity(buf.tcpa[finite], Topology.LINE, bandwidth)
        p_window = finite_frac * tcpa_density.mass(0.0, zone.t_aware)
    else:
        p_window = 0.0

    opposed_density = _BufferDensity(buf.course_delta, Topology.LINE, bandwidth)
    p_course_opposed = opposed_density.mass(-5.0, 5.0)

    own = _region_probabilities(
        _BufferDensity(buf.bearing_jk, Topology.CIRCLE360, bandwidth), p_course_opposed
    )
    other = _region_probabilities(
        _BufferDensity(buf.bearing_kj, Topology.CIRCLE360, bandwidth), p_course_opposed
    )

    p_rule = {rule: 0.0 for rule in Rule}
    give_way_fraction = 0.0
    for a in _REGIONS:
        for t in _REGIONS:
            cell = float(own[a] * other[t])
            outcome = mutual_situation(a, t)
            p_rule[outcome.rule] += cell
            if outcome.obligation is Obligation.GIVE_WAY:
                give_way_fraction += cell

    p_give_way = give_way_fraction * p_risk
    return RiskAssessment(
        p_risk=p_risk,
        p_tcpa_window=p_window,
        p_rule=p_rule,
        p_give_way=p_give_way,
        p_stand_on=1.0 - p_give_way,
        method=Method.KDE,
        n_samples=n,
        seed=seed,
        situation=_situation_from_marginals(own, other),
    )


def assess_des(
    j_mean: VesselState,
    j_unc: StateUncertainty,
    k_mean: VesselState,
    k_unc: StateUncertainty,
    zone: ComfortZone,
    n: int,
    seed: int,
    cfg: AutomatonConfig | None = None,
) -> RiskAssessment:
    """Counting-pipeline assessment of one vessel pair.

    Draws the same paired samples as the density pipeline for the given
    seed and evaluates the discrete-event loop per sample.  The per-sample
    word tests are applied as vectorised masks; the result is identical to
    running the automaton sample by sample, which the test-suite checks
    against ``automaton.run_once`` directly.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if cfg is None:
        cfg = AutomatonConfig(d_act=zone.d_act, t_aware=zone.t_aware)
    batch = draw_pair(j_mean, j_unc, k_mean, k_unc, n, seed)
    buf = encounter_buffers(batch)

    risk_count = int(np.count_nonzero(buf.dcpa <= cfg.d_act))
    window_count = int(np.count_nonzero((buf.tcpa >= 0.0) & (buf.tcpa <= cfg.t_aware)))

    own_r, other_r, rule_idx, obligation = situation_codes(
        buf.bearing_jk, buf.bearing_kj, batch.states_j.course, batch.states_k.course
    )
    event_counts = np.bincount(rule_idx * 2 + obligation, minlength=8)
    rule_values = (Rule.R0, Rule.R13, Rule.R14, Rule.R15)
    situation_counts = {}
    for idx, rule in enumerate(rule_values):
        for oblig in (Obligation.STAND_ON, Obligation.GIVE_WAY):
            count = int(event_counts[idx * 2 + int(oblig)])
            if count:
                situation_counts[(rule, oblig)] = count

    joint_counts = np.bincount(own_r * 4 + other_r, minlength=16)
    joint = {
        (a, t): float(joint_counts[int(a) * 4 + int(t)] / n)
        for a in _REGIONS
        for t in _REGIONS
    }
    own_marginal = np.bincount(own_r, minlength=4) / n
    other_marginal = np.bincount(other_r, minlength=4) / n
    situation = SituationDistribution(
        own_regions={r: float(own_marginal[r]) for r in _REGIONS},
        other_regions={r: float(other_marginal[r]) for r in _REGIONS},
        joint=joint,
    )

    return assessment_from_counts(
        risk_count=risk_count,
        window_count=window_count,
        situation_counts=situation_counts,
        n=n,
        method=Method.DES,
        seed=seed,
        situation=situation,
    )


def propagation_study(
    bearings: list[float],
    range_m: float,
    n: int,
    seed: int,
    dispersion: tuple[float, float, float, float] = (10.0, 10.0, 2.0, 2.0),
) -> dict[float, EncounterBuffers]:
    """Sample the CPA/bearing transformations for a ring of target placements.

    For each bearing the own ship is sampled around (0, 0, course 0,
    10 m/s) and the target around a point ``range_m`` away on that bearing,
    heading back on the mirrored course (180 - bearing) at 10 m/s, both
    with the given per-component standard deviations.  Returns the raw
    per-bearing buffers for histogram and density export.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    for bearing in bearings:
        if not 0.0 <= bearing < 360.0:
            raise ValueError(f"bearing must lie in [0, 360), got {bearing}")
    unc = StateUncertainty(*dispersion)
    own_mean = VesselState(0.0, 0.0, 0.0, 10.0)
    pair_seeds = pair_stream_seeds(seed, max(2, len(bearings)))

    out: dict[float, EncounterBuffers] = {}
    for bearing, pair_seed in zip(bearings, pair_seeds):
        rad = math.radians(bearing)
        target_mean = VesselState(
            range_m * math.cos(rad),
            range_m * math.sin(rad),
            (180.0 - bearing) % 360.0,
            10.0,
        )
        batch = draw_pair(own_mean, unc, target_mean, unc, n, pair_seed)
        out[bearing] = encounter_buffers(batch)
    return out
