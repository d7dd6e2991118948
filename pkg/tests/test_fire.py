import math
import random

import pytest

from evacflow.errors import InputError
from evacflow.fire import (
    FireScenario,
    GrowingCircle,
    build_cache,
    fire_set_at,
    merge_scenarios,
    scenario_from_dict,
    scenario_to_dict,
    validate_monotone,
)
from evacflow.geometry import Circle, FireSet, Point, contains, validate_ring

from nets import fig_fire, fig_net, make_net, random_fire, random_net


def square(cx, cy, half):
    return validate_ring([(cx - half, cy - half), (cx + half, cy - half),
                          (cx + half, cy + half), (cx - half, cy + half)])


class TestFireSetAt:
    def test_linear_growth(self):
        sc = FireScenario(circles=(GrowingCircle(Point(0, 0), 10.0, 1.0),))
        assert fire_set_at(sc, 5).circles[0].radius == 15.0
        assert fire_set_at(sc, 0).circles[0].radius == 10.0

    def test_frames_step_hold(self):
        sc = FireScenario(frames=(
            (0, FireSet(polygons=(square(0, 0, 5),))),
            (3, FireSet(polygons=(square(0, 0, 9),))),
        ))
        assert fire_set_at(sc, 2) is fire_set_at(sc, 0)
        assert fire_set_at(sc, 3).polygons[0][1].x == 9.0
        # held indefinitely past the last frame
        assert fire_set_at(sc, 40) is fire_set_at(sc, 3)

    def test_before_coverage_rejected(self):
        sc = FireScenario(frames=((4, FireSet(polygons=(square(0, 0, 5),))),))
        with pytest.raises(InputError, match="coverage"):
            fire_set_at(sc, 3)


class TestValidateMonotone:
    def test_growing_circles_ok(self):
        assert validate_monotone(fig_fire(), 20) is None

    def test_shrinking_circle_flagged(self):
        sc = FireScenario(circles=(GrowingCircle(Point(0, 0), 10.0, -1.0),))
        assert validate_monotone(sc, 20) == 0

    def test_shrinking_frame_flagged(self):
        sc = FireScenario(frames=(
            (0, FireSet(polygons=(square(0, 0, 5),))),
            (3, FireSet(polygons=(square(0, 0, 4),))),
        ))
        assert validate_monotone(sc, 5) == 2  # frame at 3 no longer covers frame held at 2

    def test_identical_frames_ok(self):
        fs = FireSet(polygons=(square(0, 0, 5),))
        sc = FireScenario(frames=((0, fs), (2, fs)))
        assert validate_monotone(sc, 6) is None


class TestBuildCache:
    def test_node_at_center_always_overtaken(self):
        net = fig_net()
        sc = FireScenario(circles=(GrowingCircle(Point(0, 0), 1.0, 1.0),))  # on n1
        cache = build_cache(net, sc, 4)
        assert all("n1" in cache.overtaken[t] for t in range(5))

    def test_overtake_instant_matches_distance(self):
        # n1 is 12 m from the circle edge at t=0 minus r0 10 -> distance 2, growth 1
        cache = build_cache(fig_net(), fig_fire(), 4)
        assert [("n1" in cache.overtaken[t]) for t in range(5)] == [False, False, True, True, True]

    def test_distance_decreases_at_growth_rate(self):
        net = make_net(
            nodes={"a": (1000.0, 0.0, 1, 0), "b": (1000.0, 500.0, 0, 1)},
            arcs={("a", "b"): (1, 5)},
        )
        sc = FireScenario(circles=(GrowingCircle(Point(0, 0), 10.0, 1.0),))
        cache = build_cache(net, sc, 20)
        d = [cache.arc_dist[t][("a", "b")] for t in range(21)]
        assert d[0] == pytest.approx(990.0)
        for t in range(20):
            assert d[t] - d[t + 1] == pytest.approx(1.0)

    def test_extend_appends_one_instance(self):
        net = fig_net()
        cache = build_cache(net, fig_fire(), 3)
        cache.extend(net, fig_fire())
        assert cache.T == 4
        assert len(cache.overtaken) == 5

    def test_nested_overtaken_and_monotone_distance_random(self):
        rng = random.Random(1234)
        for _ in range(25):
            net = random_net(rng)
            sc = random_fire(rng)
            cache = build_cache(net, sc, 12)
            for t in range(12):
                assert cache.overtaken[t] <= cache.overtaken[t + 1]
                for key in net.arcs:
                    assert cache.arc_dist[t][key] >= cache.arc_dist[t + 1][key] - 1e-9


class TestMergeScenarios:
    def test_identity_merge_matches_old_pointwise(self):
        old = fig_fire()
        merged = merge_scenarios(old, old, t_fire=3, T=8)
        probe = [Point(x, y) for x in (-30, -15, 0, 10) for y in (-10, 0, 10)]
        for t in range(9):
            a, b = fire_set_at(old, t), fire_set_at(merged, t)
            for p in probe:
                assert contains(a, p) == contains(b, p)

    def test_union_adds_second_circle_from_t_fire(self):
        old = fig_fire()
        new = FireScenario(circles=(GrowingCircle(Point(500, 500), 20.0, 1.0),))
        merged = merge_scenarios(old, new, t_fire=5, T=10)
        inside_new = Point(500, 500)
        assert not contains(fire_set_at(merged, 4), inside_new)
        assert contains(fire_set_at(merged, 6), inside_new)
        assert len(fire_set_at(merged, 6).circles) == 2

    def test_concentric_faster_growth_takes_larger_radius(self):
        old = FireScenario(circles=(GrowingCircle(Point(0, 0), 10.0, 1.0),))
        new = FireScenario(circles=(GrowingCircle(Point(0, 0), 10.0, 3.0),))
        merged = merge_scenarios(old, new, t_fire=2, T=10)
        radii = {c.radius for c in fire_set_at(merged, 6).circles}
        assert max(radii) == 28.0  # union of concentric circles = the larger one
        p = Point(27, 0)
        assert contains(fire_set_at(merged, 6), p)
        assert not contains(fire_set_at(old, 6), p)

    def test_merged_is_monotone(self):
        rng = random.Random(7)
        for _ in range(10):
            old = random_fire(rng)
            new = random_fire(rng)
            merged = merge_scenarios(old, new, t_fire=rng.randint(0, 5), T=10)
            assert validate_monotone(merged, 10) is None


class TestScenarioDocs:
    def test_circle_round_trip(self):
        origin = (40.0, -105.0)
        doc = {"type": "circles", "circles": [
            {"lat": 40.001, "lon": -105.002, "r0_m": 50.0, "growth_m_per_instance": 2.0}]}
        sc = scenario_from_dict(doc, origin)
        assert sc.circles[0].r0 == 50.0
        out = scenario_to_dict(sc, origin)
        assert out["type"] == "circles"
        assert out["circles"][0]["lat"] == pytest.approx(40.001, abs=1e-6)

    def test_frames_round_trip(self):
        origin = (40.0, -105.0)
        doc = {"type": "frames", "frames": [
            {"t": 0, "multipolygon": [[[40.0, -105.0], [40.001, -105.0], [40.001, -104.999]]]},
            {"t": 2, "multipolygon": [[[40.0, -105.0], [40.002, -105.0], [40.002, -104.998]]]},
        ]}
        sc = scenario_from_dict(doc, origin)
        assert len(sc.frames) == 2
        out = scenario_to_dict(sc, origin)
        assert [f["t"] for f in out["frames"]] == [0, 2]

    def test_bad_type_rejected(self):
        with pytest.raises(InputError, match="unknown fire scenario"):
            scenario_from_dict({"type": "lava"}, (0, 0))

    def test_nonpositive_radius_rejected(self):
        with pytest.raises(InputError):
            scenario_from_dict(
                {"type": "circles", "circles": [{"lat": 0, "lon": 0, "r0_m": 0}]}, (0, 0)
            )
