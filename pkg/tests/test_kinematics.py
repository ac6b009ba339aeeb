import math

import numpy as np
import pytest

from colreg_risk import (
    CoincidentPositions,
    DegenerateRelativeMotion,
    VesselState,
    cpa,
    reciprocal_course,
    relative_bearing,
    velocity_of,
)
from colreg_risk.kinematics import (
    bearing_arrays,
    cpa_arrays,
    reciprocal_course_arrays,
    wrap_degrees,
)

from scenarios import OWN_1, OWN_2, TARGET_1


def random_state(rng):
    return VesselState(
        north=float(rng.uniform(-5000, 5000)),
        east=float(rng.uniform(-5000, 5000)),
        course=float(rng.uniform(0, 360)) % 360.0,
        speed=float(rng.uniform(0.5, 25)),
    )


class TestVelocity:
    def test_due_north(self):
        v = velocity_of(VesselState(0, 0, 0.0, 10.0))
        assert v.v_north == 10.0 and v.v_east == 0.0

    def test_due_west(self):
        v = velocity_of(VesselState(0, 0, 270.0, 10.0))
        assert v.v_north == pytest.approx(0.0, abs=1e-12)
        assert v.v_east == pytest.approx(-10.0, abs=1e-12)

    def test_zero_speed(self):
        v = velocity_of(VesselState(0, 0, 90.0, 0.0))
        assert v.v_north == 0.0 and v.v_east == 0.0


class TestCpa:
    def test_scenario1_dcpa_matches_reference(self):
        assert cpa(OWN_1, TARGET_1).dcpa == pytest.approx(176.78, abs=0.01)

    def test_scenario1_tcpa_hand_evaluation(self):
        # Hand evaluation: dp.dv = -1250*10 - 1000*10 = -22500, |dv|^2 = 200.
        assert cpa(OWN_1, TARGET_1).tcpa == pytest.approx(22500.0 / 200.0, rel=1e-12)

    def test_scenario2_dcpa_matches_reference(self):
        own = VesselState(0.0, 0.0, 0.0, 10.0)
        target = VesselState(995.40, -95.85, 174.5, 10.0)
        assert cpa(own, target).dcpa == pytest.approx(47.98, abs=0.01)

    def test_identical_velocities_degenerate(self):
        with pytest.raises(DegenerateRelativeMotion):
            cpa(VesselState(0, 0, 0, 10), VesselState(100, 0, 0, 10))

    def test_result_consistency(self):
        res = cpa(OWN_1, TARGET_1)
        gap = math.hypot(
            res.pos_j_at_cpa[0] - res.pos_k_at_cpa[0],
            res.pos_j_at_cpa[1] - res.pos_k_at_cpa[1],
        )
        assert gap == pytest.approx(res.dcpa, rel=1e-12)
        assert res.dcpa >= 0.0
        assert res.rel_speed_sq == pytest.approx(200.0, rel=1e-12)

    def test_symmetry_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b = random_state(rng), random_state(rng)
            try:
                r_ab, r_ba = cpa(a, b), cpa(b, a)
            except DegenerateRelativeMotion:
                continue
            assert r_ab.tcpa == pytest.approx(r_ba.tcpa, rel=1e-9, abs=1e-9)
            assert r_ab.dcpa == pytest.approx(r_ba.dcpa, rel=1e-9, abs=1e-9)

    def test_translation_invariance(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            a, b = random_state(rng), random_state(rng)
            dn, de = float(rng.uniform(-1e5, 1e5)), float(rng.uniform(-1e5, 1e5))
            a2 = VesselState(a.north + dn, a.east + de, a.course, a.speed)
            b2 = VesselState(b.north + dn, b.east + de, b.course, b.speed)
            try:
                r, r2 = cpa(a, b), cpa(a2, b2)
            except DegenerateRelativeMotion:
                continue
            assert r2.tcpa == pytest.approx(r.tcpa, rel=1e-9, abs=1e-9)
            assert r2.dcpa == pytest.approx(r.dcpa, rel=1e-9, abs=1e-6)

    def test_dcpa_is_grid_minimum(self):
        # Independent oracle: separation minimised over a dense time grid
        # around TCPA must match the closed form within a millimeter.
        rng = np.random.default_rng(13)
        checked = 0
        while checked < 40:
            a, b = random_state(rng), random_state(rng)
            try:
                res = cpa(a, b)
            except DegenerateRelativeMotion:
                continue
            va, vb = velocity_of(a), velocity_of(b)
            t = res.tcpa + np.arange(-100.0, 100.0 + 1e-9, 0.01)
            sep = np.hypot(
                (a.north - b.north) + (va.v_north - vb.v_north) * t,
                (a.east - b.east) + (va.v_east - vb.v_east) * t,
            )
            assert res.dcpa == pytest.approx(float(sep.min()), abs=1e-3)
            checked += 1


class TestRelativeBearing:
    def test_dead_ahead(self):
        assert relative_bearing(VesselState(0, 0, 0, 1), VesselState(1000, 0, 0, 1)) == 0.0

    def test_scenario2_reference_bearing(self):
        target = VesselState(995.40, -95.85, 174.5, 10.0)
        assert relative_bearing(OWN_2, target) == pytest.approx(354.5, abs=0.01)

    def test_atan2_oracle(self):
        expected = math.degrees(math.atan2(1000.0, 1250.0))
        assert relative_bearing(OWN_1, TARGET_1) == pytest.approx(expected, rel=1e-12)

    def test_coincident_positions(self):
        with pytest.raises(CoincidentPositions):
            relative_bearing(VesselState(5, 5, 0, 1), VesselState(5, 5, 90, 1))

    def test_rotation_invariance(self):
        rng = np.random.default_rng(14)
        for _ in range(200):
            a, b = random_state(rng), random_state(rng)
            delta = float(rng.uniform(0, 360))
            rad = math.radians(delta)
            dn, de = b.north - a.north, b.east - a.east
            rotated = VesselState(
                a.north + dn * math.cos(rad) - de * math.sin(rad),
                a.east + dn * math.sin(rad) + de * math.cos(rad),
                b.course,
                b.speed,
            )
            a_rot = VesselState(a.north, a.east, (a.course + delta) % 360.0, a.speed)
            before = relative_bearing(a, b)
            after = relative_bearing(a_rot, rotated)
            diff = (after - before + 180.0) % 360.0 - 180.0
            assert abs(diff) < 1e-6

    def test_output_range(self):
        rng = np.random.default_rng(15)
        for _ in range(500):
            a, b = random_state(rng), random_state(rng)
            beta = relative_bearing(a, b)
            assert 0.0 <= beta < 360.0


class TestReciprocalCourse:
    def test_reciprocal_pair(self):
        assert reciprocal_course(0.0, 180.0) == 0.0

    def test_modular_oracle(self):
        assert reciprocal_course(0.0, 174.5) == pytest.approx((-174.5) % 360.0 - 180.0)
        assert reciprocal_course(0.0, 174.5) == pytest.approx(5.5)

    def test_identical_courses(self):
        assert reciprocal_course(90.0, 90.0) == -180.0

    def test_output_range(self):
        rng = np.random.default_rng(16)
        psi = rng.uniform(-720, 720, size=(500, 2))
        for a, b in psi:
            value = reciprocal_course(float(a), float(b))
            assert -180.0 <= value < 180.0


class TestArrayKernels:
    def test_wrap_degrees_edge(self):
        assert wrap_degrees(-1e-16) == 0.0
        assert wrap_degrees(360.0) == 0.0
        arr = wrap_degrees(np.array([-1e-16, 360.0, 719.5, -0.5]))
        assert np.all((arr >= 0.0) & (arr < 360.0))

    def test_cpa_arrays_match_scalar(self):
        rng = np.random.default_rng(17)
        states = [(random_state(rng), random_state(rng)) for _ in range(300)]
        # Columns plus one deliberately degenerate pair at the end.
        a_list = [p[0] for p in states] + [VesselState(0, 0, 45, 7)]
        b_list = [p[1] for p in states] + [VesselState(10, 10, 45, 7)]
        cols = lambda xs, f: np.array([f(x) for x in xs])
        tcpa, dcpa, degenerate = cpa_arrays(
            cols(a_list, lambda s: s.north), cols(a_list, lambda s: s.east),
            cols(a_list, lambda s: s.course), cols(a_list, lambda s: s.speed),
            cols(b_list, lambda s: s.north), cols(b_list, lambda s: s.east),
            cols(b_list, lambda s: s.course), cols(b_list, lambda s: s.speed),
        )
        for i, (a, b) in enumerate(zip(a_list, b_list)):
            try:
                res = cpa(a, b)
                assert not degenerate[i]
                assert tcpa[i] == pytest.approx(res.tcpa, rel=1e-12, abs=1e-12)
                assert dcpa[i] == pytest.approx(res.dcpa, rel=1e-12, abs=1e-12)
            except DegenerateRelativeMotion:
                assert degenerate[i]
                assert np.isinf(tcpa[i])
                assert dcpa[i] == pytest.approx(math.hypot(a.north - b.north, a.east - b.east))

    def test_bearing_arrays_match_scalar(self):
        rng = np.random.default_rng(18)
        pairs = [(random_state(rng), random_state(rng)) for _ in range(300)]
        beta = bearing_arrays(
            np.array([a.north for a, _ in pairs]), np.array([a.east for a, _ in pairs]),
            np.array([a.course for a, _ in pairs]),
            np.array([b.north for _, b in pairs]), np.array([b.east for _, b in pairs]),
        )
        for i, (a, b) in enumerate(pairs):
            assert beta[i] == pytest.approx(relative_bearing(a, b), abs=1e-12)

    def test_reciprocal_arrays_match_scalar(self):
        rng = np.random.default_rng(19)
        pj, pk = rng.uniform(0, 360, 200), rng.uniform(0, 360, 200)
        arr = reciprocal_course_arrays(pj, pk)
        for i in range(200):
            assert arr[i] == pytest.approx(reciprocal_course(float(pj[i]), float(pk[i])))


class TestValidation:
    def test_course_out_of_range(self):
        with pytest.raises(ValueError):
            VesselState(0, 0, 360.0, 1.0)

    def test_negative_speed(self):
        with pytest.raises(ValueError):
            VesselState(0, 0, 0.0, -1.0)

    def test_nonfinite_position(self):
        with pytest.raises(ValueError):
            VesselState(math.nan, 0, 0.0, 1.0)
