import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadarm.errors import EmptyWaypointList
from quadarm.trajectory import Waypoint, generate_reference, segment_duration

DT = 1e-2
coords = st.floats(-20, 20)
points = st.tuples(coords, coords, coords)


class TestWaypoint:
    def test_validation(self):
        with pytest.raises(ValueError):
            Waypoint((0, 0))
        with pytest.raises(ValueError):
            Waypoint((0, 0, math.nan))
        with pytest.raises(ValueError):
            Waypoint((0, 0, 0), hold_time=-1)


class TestGenerate:
    def test_empty(self):
        with pytest.raises(EmptyWaypointList):
            generate_reference([], 1.0, DT)

    def test_single_waypoint(self):
        ref = generate_reference([Waypoint((1, 2, 3))], 1.0, DT)
        assert len(ref) == 1
        assert np.allclose(ref.position, [[1, 2, 3]])

    def test_single_waypoint_padded(self):
        ref = generate_reference([Waypoint((1, 2, 3))], 1.0, DT, duration=2.0)
        assert len(ref) == 201
        assert np.all(ref.position == [1, 2, 3])
        assert np.all(ref.velocity == 0.0)

    def test_ten_metres_at_one_metre_per_second(self):
        ref = generate_reference([Waypoint((0, 0, 0)), Waypoint((10, 0, 0))], 1.0, 1e-3)
        assert ref.duration == pytest.approx(10.0)
        assert np.allclose(ref.velocity[:-1, 0], 1.0)

    def test_trapezoid_duration(self):
        # 10 m, 1 m/s, 0.5 m/s^2: 2 s ramps covering 1 m each, 8 s cruise
        assert segment_duration(10.0, 1.0, 0.5) == pytest.approx(12.0)
        # too short to reach cruise: triangle
        assert segment_duration(0.5, 1.0, 0.5) == pytest.approx(2.0)

    def test_hold_and_truncation(self):
        wps = [Waypoint((0, 0, 0), hold_time=1.0), Waypoint((1, 0, 0), hold_time=2.0)]
        ref = generate_reference(wps, 1.0, DT)
        assert ref.duration == pytest.approx(4.0)
        assert ref.holds == ((0, 100, 0), (200, 400, 1))
        short = generate_reference(wps, 1.0, DT, duration=0.5)
        assert short.duration == pytest.approx(0.5)

    def test_yaw_interpolated(self):
        ref = generate_reference([Waypoint((0, 0, 0), 0.0), Waypoint((2, 0, 0), 1.0)], 1.0, DT)
        assert ref.yaw[0] == 0.0 and ref.yaw[-1] == 1.0
        assert np.all(np.diff(ref.yaw) >= 0)

    def test_pure_rotation_waypoint(self):
        ref = generate_reference([Waypoint((0, 0, 0), 0.0), Waypoint((0, 0, 0), 1.0)], 1.0, DT)
        assert ref.yaw[-1] == 1.0

    @pytest.mark.parametrize("kw", [dict(cruise_speed=0.0), dict(dt=0.0),
                                    dict(accel_limit=-1.0)])
    def test_invalid_args(self, kw):
        args = dict(cruise_speed=1.0, dt=DT)
        args.update(kw)
        with pytest.raises(ValueError):
            generate_reference([Waypoint((0, 0, 0)), Waypoint((1, 0, 0))], **args)


class TestProperties:
    @given(st.lists(points, min_size=1, max_size=5), st.floats(0.2, 3.0),
           st.one_of(st.none(), st.floats(0.2, 2.0)))
    def test_passes_through_waypoints(self, pts, speed, accel):
        wps = [Waypoint(p) for p in pts]
        ref = generate_reference(wps, speed, DT, accel)
        assert np.allclose(ref.position[0], pts[0])
        assert np.allclose(ref.position[-1], pts[-1])
        for p in pts:
            assert np.min(np.linalg.norm(ref.position - p, axis=1)) < 1e-9

    @given(st.lists(points, min_size=2, max_size=5), st.floats(0.2, 3.0),
           st.one_of(st.none(), st.floats(0.2, 2.0)))
    def test_speed_limit(self, pts, speed, accel):
        ref = generate_reference([Waypoint(p) for p in pts], speed, DT, accel)
        v = np.linalg.norm(ref.velocity, axis=1)
        assert np.all(v <= speed * (1 + 1e-9) + 1e-9)

    @given(points, points, st.floats(0.2, 3.0), st.floats(0.2, 2.0))
    def test_acceleration_limit(self, a, b, speed, accel):
        ref = generate_reference([Waypoint(a), Waypoint(b)], speed, DT, accel)
        v = np.linalg.norm(ref.velocity[:-1], axis=1)
        # sample-average speeds: consecutive differences stay within accel*dt
        assert np.all(np.abs(np.diff(v)) <= accel * DT * (1 + 1e-6) + 1e-9)

    @given(st.lists(points, min_size=2, max_size=4), st.floats(0.2, 3.0))
    def test_velocity_integrates_to_position(self, pts, speed):
        ref = generate_reference([Waypoint(p) for p in pts], speed, DT, 0.7)
        rebuilt = ref.position[0] + np.vstack([np.zeros(3), np.cumsum(ref.velocity[:-1] * DT, axis=0)])
        assert np.allclose(rebuilt, ref.position, atol=1e-9)

    @given(points, points, st.floats(0.2, 3.0))
    def test_continuity(self, a, b, speed):
        ref = generate_reference([Waypoint(a), Waypoint(b)], speed, DT, 0.5)
        step = np.linalg.norm(np.diff(ref.position, axis=0), axis=1)
        assert np.all(step <= speed * DT * (1 + 1e-9) + 1e-12)

    def test_csv(self, tmp_path):
        ref = generate_reference([Waypoint((0, 0, 0)), Waypoint((1, 0, 0))], 1.0, 0.1)
        ref.to_csv(tmp_path / "r.csv")
        data = np.loadtxt(tmp_path / "r.csv", delimiter=",", skiprows=1)
        assert data.shape == (11, 8)
