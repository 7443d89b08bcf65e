import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steiner_cover.geom import (
    DegenerateSegmentError,
    GeometryError,
    InvalidNetworkError,
    OnBoundaryError,
    Polyline,
    build_arrangement,
    build_segment_arrangement,
    convex_hull,
    is_convex_position,
    segment_intersect,
    winding_many,
    winding_number,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]


def hexagon():
    h = math.sqrt(3) / 2
    return np.array([(-0.5, h), (-1, 0), (-0.5, -h), (0.5, -h), (1, 0), (0.5, h)])


class TestSegmentIntersect:
    def test_crossing(self):
        hit = segment_intersect(((0, 0), (2, 0)), ((1, -1), (1, 1)))
        assert hit.kind == "point"
        assert np.allclose(hit.point, (1, 0))

    def test_disjoint_collinear(self):
        assert not segment_intersect(((0, 0), (1, 0)), ((2, 0), (3, 0)))

    def test_shared_endpoint(self):
        hit = segment_intersect(((0, 0), (1, 1)), ((1, 1), (2, 0)))
        assert hit.kind == "endpoint"
        assert np.allclose(hit.point, (1, 1))

    def test_overlap(self):
        hit = segment_intersect(((0, 0), (2, 0)), ((1, 0), (3, 0)))
        assert hit.kind == "overlap"
        assert np.allclose(sorted(p[0] for p in hit.points), [1, 2])

    def test_t_junction_keeps_endpoint_exactly(self):
        c = np.array([0.1, 0.1]) * 3
        hit = segment_intersect(((0, 0), (1, 1)), (c, (1, 0)))
        assert hit and tuple(hit.point) == tuple(c)

    def test_degenerate(self):
        with pytest.raises(DegenerateSegmentError):
            segment_intersect(((0, 0), (0, 0)), ((1, 0), (2, 0)))


class TestWinding:
    def test_inside(self):
        assert winding_number(SQUARE, (0.5, 0.5)) == 1

    def test_outside(self):
        assert winding_number(SQUARE, (5, 5)) == 0

    def test_clockwise(self):
        assert winding_number(SQUARE[::-1], (0.5, 0.5)) == -1

    def test_on_boundary(self):
        with pytest.raises(OnBoundaryError):
            winding_number(SQUARE, (1, 0.5))

    def test_open_loop(self):
        with pytest.raises(GeometryError):
            winding_number(SQUARE[:-1], (0.5, 0.5))

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=5, max_size=5))
    def test_vectorized_matches_scalar(self, pts):
        ring = np.array(SQUARE[:-1], float)
        P = np.array(pts)
        keep = [p for p in P if min(abs(p[0]), abs(p[0] - 1), abs(p[1]), abs(p[1] - 1)) > 1e-6]
        if not keep:
            return
        keep = np.array(keep)
        assert list(winding_many(ring, keep)) == [winding_number(SQUARE, p) for p in keep]


class TestArrangement:
    def test_hexagon_minus_edge(self):
        H = hexagon()
        net = [(H[k], H[k + 1]) for k in range(5)]
        A = build_arrangement(H, net)
        assert A.n_faces == 2
        assert A.euler_ok()

    def test_tripod(self):
        T = np.array([(-math.sqrt(3) / 2, -0.5), (math.sqrt(3) / 2, -0.5), (0, 1)])
        A = build_arrangement(T, [((0, 0), p) for p in T])
        assert len(A.bounded_faces()) == 3

    def test_tripod_areas(self):
        T = np.array([(-math.sqrt(3) / 2, -0.5), (math.sqrt(3) / 2, -0.5), (0, 1)])
        A = build_arrangement(T, [((0, 0), p) for p in T])
        areas = sorted(abs(A.faces[k].area) for k in A.bounded_faces())
        assert areas == pytest.approx([3 * math.sqrt(3) / 12] * 3, rel=1e-12)

    def test_empty_network(self):
        A = build_arrangement(hexagon())
        assert len(A.bounded_faces()) == 1

    def test_interior_leaf_is_allowed(self):
        A = build_arrangement(hexagon(), [((0, 0), (0.2, 0.1))])
        assert len(A.bounded_faces()) == 1
        assert A.euler_ok()

    def test_crossing_network_rejected(self):
        with pytest.raises(InvalidNetworkError):
            build_arrangement(hexagon(), [((-0.5, 0), (0.5, 0)), ((0, -0.5), (0, 0.5))])

    def test_locate(self):
        A = build_arrangement(np.array(SQUARE[:-1], float), [((0, 0), (1, 1))])
        f = A.locate([(0.8, 0.2), (0.2, 0.8), (3, 3)])
        assert f[0] != f[1] and f[2] == A.unbounded

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)),
                    min_size=1, max_size=8))
    def test_euler_on_random_segments(self, raw):
        segs = [((a, b), (c, d), "s") for a, b, c, d in raw if math.hypot(a - c, b - d) > 1e-3]
        if not segs:
            return
        A = build_segment_arrangement(segs)
        assert A.euler_ok()
        # each bounded face has positive area
        assert all(A.faces[k].area > 0 for k in A.bounded_faces())


def test_polyline_rejects_repeated_vertex():
    with pytest.raises(DegenerateSegmentError):
        Polyline([(0, 0), (0, 0), (1, 0)])


def test_convex_position():
    assert is_convex_position(hexagon())
    assert not is_convex_position([(0, 0), (1, 0), (2, 0)])
    assert not is_convex_position([(0, 0), (2, 0), (1, 0.1), (1, 2)])
    assert len(convex_hull(np.vstack([hexagon(), [(0, 0)]]))) == 6
