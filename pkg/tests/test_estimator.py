import math

import numpy as np
import pytest

from colreg_risk import (
    AutomatonConfig,
    Method,
    Rule,
    StateUncertainty,
    VesselState,
    assess_des,
    assess_kde,
    encounter_buffers,
    make_uncertainty,
    propagation_study,
)
from colreg_risk.density import TooFewSamples
from colreg_risk.sampling import draw_pair

from scenarios import DIAG, OWN_1, OWN_2, TARGET_1, TARGET_2, ZONE

EXACT = StateUncertainty(0.0, 0.0, 0.0, 0.0)


def rule_vector(a):
    return [a.p_risk, a.p_rule[Rule.R0], a.p_rule[Rule.R13],
            a.p_rule[Rule.R14], a.p_rule[Rule.R15], a.p_give_way]


class TestBuffers:
    def test_matches_scalar_kinematics(self):
        unc = make_uncertainty(DIAG, 1.0)
        batch = draw_pair(OWN_1, EXACT, TARGET_1, unc, 200, seed=1, clamp_speed=True)
        buf = encounter_buffers(batch)
        from colreg_risk import cpa, relative_bearing

        for i in range(0, 200, 17):
            a, b = batch.states_j.state(i), batch.states_k.state(i)
            res = cpa(a, b)
            assert buf.tcpa[i] == pytest.approx(res.tcpa, rel=1e-12)
            assert buf.dcpa[i] == pytest.approx(res.dcpa, rel=1e-12)
            assert buf.bearing_jk[i] == pytest.approx(relative_bearing(a, b), abs=1e-12)
            assert buf.bearing_kj[i] == pytest.approx(relative_bearing(b, a), abs=1e-12)

    def test_degenerate_entries(self):
        batch = draw_pair(
            VesselState(0, 0, 45, 7), EXACT, VesselState(30, 40, 45, 7), EXACT,
            10, seed=2,
        )
        buf = encounter_buffers(batch)
        assert np.all(buf.degenerate)
        assert np.all(np.isinf(buf.tcpa))
        assert np.allclose(buf.dcpa, 50.0)


class TestZeroUncertainty:
    def test_scenario1_deterministic(self):
        kde = assess_kde(OWN_1, EXACT, TARGET_1, EXACT, ZONE, 2000, seed=3)
        des = assess_des(OWN_1, EXACT, TARGET_1, EXACT, ZONE, 2000, seed=3)
        for a in (kde, des):
            assert a.p_risk == 0.0
            assert a.p_give_way == 0.0
            assert a.p_stand_on == 1.0
            assert a.p_rule[Rule.R15] == 1.0

    def test_scenario2_deterministic(self):
        des = assess_des(OWN_2, EXACT, TARGET_2, EXACT, ZONE, 100, seed=4)
        assert des.p_risk == 1.0
        assert des.p_rule[Rule.R15] == 1.0
        assert des.p_give_way == 0.0  # stand-on classification


class TestDesPath:
    def test_single_sample_binary(self):
        unc = make_uncertainty(DIAG, 1.0)
        a = assess_des(OWN_1, EXACT, TARGET_1, unc, ZONE, 1, seed=5)
        for value in rule_vector(a):
            assert value in (0.0, 1.0)

    def test_matches_scalar_automaton(self):
        from colreg_risk import run_once

        cfg = AutomatonConfig(d_act=ZONE.d_act, t_aware=ZONE.t_aware)
        unc = make_uncertainty(DIAG, 1.0)
        n = 400
        batch = draw_pair(OWN_2, EXACT, TARGET_2, unc, n, seed=6, clamp_speed=True)
        strings = [
            run_once(batch.states_j.state(i), batch.states_k.state(i), cfg)
            for i in range(n)
        ]
        from colreg_risk import estimate_probabilities

        scalar = estimate_probabilities(strings, seed=6)
        vector = assess_des(OWN_2, EXACT, TARGET_2, unc, ZONE, n, seed=6)
        # Same seed, same batch; the vectorised path must agree exactly
        # (clamping never fires here: five sigmas from zero).
        assert vector.p_risk == scalar.p_risk
        for rule in Rule:
            assert vector.p_rule[rule] == scalar.p_rule[rule]
        assert vector.p_give_way == scalar.p_give_way

    def test_counts_consistency(self):
        unc = make_uncertainty(DIAG, 2.0)
        a = assess_des(OWN_2, EXACT, TARGET_2, unc, ZONE, 20_000, seed=7)
        assert math.fsum(a.p_rule[r] for r in Rule) == pytest.approx(1.0, abs=1e-12)
        assert a.p_give_way + a.p_stand_on == 1.0
        assert a.situation is not None
        joint_total = math.fsum(a.situation.joint.values())
        assert joint_total == pytest.approx(1.0, abs=1e-9)


class TestKdePath:
    def test_needs_enough_samples(self):
        with pytest.raises(TooFewSamples):
            assess_kde(OWN_1, EXACT, TARGET_1, make_uncertainty(DIAG, 1.0), ZONE, 500, seed=8)

    def test_risk_matches_empirical_fraction(self):
        unc = make_uncertainty(DIAG, 1.0)
        n = 20_000
        a = assess_kde(OWN_1, EXACT, TARGET_1, unc, ZONE, n, seed=9)
        batch = draw_pair(OWN_1, EXACT, TARGET_1, unc, n, seed=9)
        frac = float(np.mean(encounter_buffers(batch).dcpa <= ZONE.d_act))
        assert abs(a.p_risk - frac) <= 0.015

    def test_marginals_and_joint(self):
        unc = make_uncertainty(DIAG, 1.5)
        a = assess_kde(OWN_2, EXACT, TARGET_2, unc, ZONE, 20_000, seed=10)
        dist = a.situation
        assert math.fsum(dist.own_regions.values()) == pytest.approx(1.0, abs=1e-9)
        assert math.fsum(dist.other_regions.values()) == pytest.approx(1.0, abs=1e-9)
        assert math.fsum(dist.joint.values()) == pytest.approx(1.0, abs=1e-9)
        for (a_r, t_r), value in dist.joint.items():
            assert value == pytest.approx(
                dist.own_regions[a_r] * dist.other_regions[t_r], rel=1e-9, abs=1e-12
            )
        assert math.fsum(a.p_rule[r] for r in Rule) == pytest.approx(1.0, abs=1e-9)
        assert a.p_give_way + a.p_stand_on == 1.0

    def test_head_on_checkpoint_small_n(self):
        # Course-proximity boundary case: the rule-14 probability tracks the
        # normal tail of the course-opposition margin.
        unc = make_uncertainty(DIAG, 0.1)
        a = assess_kde(OWN_2, EXACT, TARGET_2, unc, ZONE, 20_000, seed=11)
        assert a.p_rule[Rule.R14] == pytest.approx(0.006, abs=0.004)

    def test_window_probability(self):
        unc = make_uncertainty(DIAG, 1.0)
        a = assess_kde(OWN_2, EXACT, TARGET_2, unc, ZONE, 5000, seed=12)
        # Nominal TCPA is 50 s, far inside the 600 s horizon.
        assert a.p_tcpa_window == pytest.approx(1.0, abs=0.01)


class TestDeterminismAndAgreement:
    def test_seed_determinism(self):
        unc = make_uncertainty(DIAG, 1.0)
        a = assess_kde(OWN_2, EXACT, TARGET_2, unc, ZONE, 5000, seed=13)
        b = assess_kde(OWN_2, EXACT, TARGET_2, unc, ZONE, 5000, seed=13)
        assert rule_vector(a) == rule_vector(b)
        assert a.p_tcpa_window == b.p_tcpa_window
        c = assess_des(OWN_2, EXACT, TARGET_2, unc, ZONE, 5000, seed=13)
        d = assess_des(OWN_2, EXACT, TARGET_2, unc, ZONE, 5000, seed=13)
        assert rule_vector(c) == rule_vector(d)

    def test_methods_agree_at_moderate_n(self):
        unc = make_uncertainty(DIAG, 0.5)
        kde = assess_kde(OWN_2, EXACT, TARGET_2, unc, ZONE, 20_000, seed=14)
        des = assess_des(OWN_2, EXACT, TARGET_2, unc, ZONE, 20_000, seed=14)
        for a, b in zip(rule_vector(kde), rule_vector(des)):
            assert abs(a - b) <= 0.03

    def test_metadata(self):
        unc = make_uncertainty(DIAG, 1.0)
        a = assess_kde(OWN_1, EXACT, TARGET_1, unc, ZONE, 2000, seed=15)
        assert a.method is Method.KDE and a.n_samples == 2000 and a.seed == 15
        b = assess_des(OWN_1, EXACT, TARGET_1, unc, ZONE, 2000, seed=15)
        assert b.method is Method.DES

    def test_small_alpha_concentrates_on_deterministic_rule(self):
        # Shrinking uncertainty drives the rule mass onto the deterministic
        # classification and the risk toward its deterministic indicator.
        unc = make_uncertainty(DIAG, 0.01)
        a = assess_des(OWN_1, EXACT, TARGET_1, unc, ZONE, 20_000, seed=16)
        assert a.p_rule[Rule.R15] > 0.999
        assert a.p_risk < 0.005  # deterministic DCPA is outside the zone


class TestPropagationStudy:
    def test_nominal_head_on_closure(self):
        # Noise-free check of the construction: bearing 0 places the target
        # 1000 m ahead on a reciprocal course, closing at 20 m/s.
        study = propagation_study([0.0], 1000.0, 2000, seed=16,
                                  dispersion=(0.0, 0.0, 0.0, 0.0))
        assert np.allclose(study[0.0].tcpa, 50.0)

    def test_buffers_shapes_and_keys(self):
        study = propagation_study([0.0, 90.0, 180.0], 1000.0, 500, seed=17)
        assert set(study) == {0.0, 90.0, 180.0}
        for buffers in study.values():
            assert buffers.tcpa.shape == (500,)
            assert np.all(buffers.dcpa >= 0.0)
            assert np.all((buffers.bearing_jk >= 0) & (buffers.bearing_jk < 360))

    def test_sampled_means_near_nominal(self):
        study = propagation_study([0.0, 180.0], 1000.0, 10_000, seed=18)
        assert float(np.mean(study[0.0].tcpa)) == pytest.approx(51.0, abs=1.5)
        neg = float(np.mean(study[180.0].tcpa < 0))
        assert 0.4 <= neg <= 0.6

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            propagation_study([0.0], 1000.0, 0, seed=19)
        with pytest.raises(ValueError):
            propagation_study([400.0], 1000.0, 10, seed=20)
