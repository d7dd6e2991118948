import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evacflow.geometry import (
    Circle,
    FireSet,
    Point,
    contains,
    dist_point_segment,
    dist_polyline_fireset,
    haversine_m,
    point_in_ring,
    polyline,
    project,
    unproject,
    validate_ring,
)

ORIGIN = (40.0, -105.0)


class TestProject:
    def test_origin_maps_to_itself(self):
        assert project(*ORIGIN, ORIGIN) == (0.0, 0.0)

    def test_one_degree_north(self):
        p = project(ORIGIN[0] + 1.0, ORIGIN[1], ORIGIN)
        assert p.x == 0.0
        assert abs(p.y - 111194.9) < 0.1

    def test_one_degree_east_at_lat60(self):
        origin = (60.0, 10.0)
        p = project(60.0, 11.0, origin)
        assert abs(p.x - 55597.5) < 0.1
        assert p.y == 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            project(91.0, 0.0, ORIGIN)
        with pytest.raises(ValueError):
            project(0.0, 200.0, ORIGIN)

    def test_unproject_round_trip(self):
        p = project(40.1, -104.9, ORIGIN)
        lat, lon = unproject(p, ORIGIN)
        assert abs(lat - 40.1) < 1e-9
        assert abs(lon + 104.9) < 1e-9

    @given(
        lat0=st.floats(-70, 70),
        lon0=st.floats(-179, 179),
        dlat=st.floats(-0.03, 0.03),
        dlon=st.floats(-0.03, 0.03),
        dlat2=st.floats(-0.03, 0.03),
        dlon2=st.floats(-0.03, 0.03),
    )
    @settings(max_examples=200, deadline=None)
    def test_locally_metric_faithful(self, lat0, lon0, dlat, dlon, dlat2, dlon2):
        # two points a few km around the origin: projected distance matches
        # the great circle within 1%
        origin = (lat0, lon0)
        a = project(lat0 + dlat, lon0 + dlon, origin)
        b = project(lat0 + dlat2, lon0 + dlon2, origin)
        ref = haversine_m(lat0 + dlat, lon0 + dlon, lat0 + dlat2, lon0 + dlon2)
        if ref < 1.0:
            return
        got = math.hypot(a.x - b.x, a.y - b.y)
        assert got == pytest.approx(ref, rel=0.01)


class TestDistPointSegment:
    def test_foot_inside_segment(self):
        assert dist_point_segment(Point(0, 1), Point(-1, 0), Point(1, 0)) == 1.0

    def test_nearest_endpoint(self):
        assert dist_point_segment(Point(3, 0), Point(-1, 0), Point(1, 0)) == 2.0

    def test_perpendicular_drop(self):
        assert dist_point_segment(Point(2, 2), Point(0, 0), Point(4, 0)) == 2.0

    def test_degenerate_segment_is_point_distance(self):
        assert dist_point_segment(Point(3, 4), Point(0, 0), Point(0, 0)) == 5.0

    @given(
        st.tuples(*[st.floats(-100, 100) for _ in range(6)]),
    )
    @settings(max_examples=200, deadline=None)
    def test_bounded_by_endpoints(self, xs):
        px, py, ax, ay, bx, by = xs
        p, a, b = Point(px, py), Point(ax, ay), Point(bx, by)
        d = dist_point_segment(p, a, b)
        assert 0.0 <= d
        assert d <= min(math.hypot(px - ax, py - ay), math.hypot(px - bx, py - by)) + 1e-9


class TestFireSetDistance:
    def test_circle_minus_radius(self):
        fire = FireSet(circles=(Circle(Point(0, 0), 2.0),))
        line = polyline([(5, 0), (5, 4)])
        assert dist_polyline_fireset(line, fire) == 3.0

    def test_vertex_inside_circle_is_zero(self):
        fire = FireSet(circles=(Circle(Point(0, 0), 2.0),))
        line = polyline([(1, 0), (10, 0)])
        assert dist_polyline_fireset(line, fire) == 0.0

    def test_min_over_union_components(self):
        fire = FireSet(circles=(Circle(Point(0, 8), 5.0), Circle(Point(0, -9), 2.0)))
        line = polyline([(-10, 0), (10, 0)])
        assert dist_polyline_fireset(line, fire) == 3.0

    def test_empty_fire_rejected(self):
        with pytest.raises(ValueError, match="empty fire"):
            dist_polyline_fireset(polyline([(0, 0), (1, 0)]), FireSet())

    def test_polygon_crossing_is_zero(self):
        ring = validate_ring([(0, 0), (4, 0), (4, 4), (0, 4)])
        fire = FireSet(polygons=(ring,))
        assert dist_polyline_fireset(polyline([(-1, 2), (5, 2)]), fire) == 0.0

    def test_polygon_inside_is_zero(self):
        ring = validate_ring([(0, 0), (4, 0), (4, 4), (0, 4)])
        fire = FireSet(polygons=(ring,))
        assert dist_polyline_fireset(polyline([(1, 1), (2, 2)]), fire) == 0.0

    def test_polygon_offset(self):
        ring = validate_ring([(0, 0), (4, 0), (4, 4), (0, 4)])
        fire = FireSet(polygons=(ring,))
        assert dist_polyline_fireset(polyline([(6, 0), (6, 4)]), fire) == 2.0

    @given(
        r=st.floats(0.5, 20),
        grow=st.floats(0, 10),
        cx=st.floats(-50, 50),
        cy=st.floats(-50, 50),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_radius(self, r, grow, cx, cy):
        line = polyline([(30, -40), (35, 0), (30, 40)])
        d1 = dist_polyline_fireset(line, FireSet(circles=(Circle(Point(cx, cy), r),)))
        d2 = dist_polyline_fireset(line, FireSet(circles=(Circle(Point(cx, cy), r + grow),)))
        assert d2 <= d1 + 1e-12


class TestContains:
    def test_boundary_is_inside(self):
        fire = FireSet(circles=(Circle(Point(0, 0), 5.0),))
        assert contains(fire, Point(3, 4)) is True

    def test_outside_circle(self):
        fire = FireSet(circles=(Circle(Point(0, 0), 5.0),))
        assert contains(fire, Point(4, 4)) is False

    def test_empty_set_contains_nothing(self):
        assert contains(FireSet(), Point(0, 0)) is False

    def test_polygon_boundary_inside(self):
        ring = validate_ring([(0, 0), (4, 0), (4, 4), (0, 4)])
        assert point_in_ring(Point(2, 0), ring) is True
        assert point_in_ring(Point(2, 2), ring) is True
        assert point_in_ring(Point(5, 2), ring) is False

    def test_contained_point_forces_zero_distance(self):
        fire = FireSet(circles=(Circle(Point(10, 10), 3.0),))
        p = Point(11, 11)
        assert contains(fire, p)
        line = polyline([(0, 0), (p.x, p.y), (20, 0)])
        assert dist_polyline_fireset(line, fire) == 0.0


class TestValidateRing:
    def test_closing_vertex_dropped(self):
        ring = validate_ring([(0, 0), (4, 0), (4, 4), (0, 0)])
        assert len(ring) == 3

    def test_self_intersecting_rejected(self):
        with pytest.raises(ValueError, match="self-intersects"):
            validate_ring([(0, 0), (4, 4), (4, 0), (0, 4)])

    def test_too_few_vertices_rejected(self):
        with pytest.raises(ValueError):
            validate_ring([(0, 0), (1, 1)])
