"""The frozen reference values are reproduced by the independent oracles."""

import math

import pytest
import sympy as sp

import oracles as O


def test_full_topology_counts():
    # (2n-5)!! full topologies on n terminals
    assert [len(O.full_topologies(n)) for n in (3, 4, 5, 6)] == [1, 3, 15, 105]


def test_pentagon_length_oracle():
    L = O.min_full_length(O.regular_polygon(5), starts=3)
    assert L == pytest.approx(O.PENTAGON_STEINER_LENGTH, abs=1e-9)


def test_square_length_oracle():
    P = O.regular_polygon(4, first_deg=225)
    assert O.min_full_length(P) == pytest.approx(O.SQUARE_STEINER_LENGTH, abs=1e-9)
    assert sp.nsimplify(O.SQUARE_STEINER_LENGTH, [sp.sqrt(3)]) == 1 + sp.sqrt(3)


def test_hexagon_lower_bound_and_orbit():
    H = O.hexagon()
    assert O.min_full_length(H, starts=1, polish=False) > O.HEXAGON_STEINER_LENGTH - 1e-6
    path = [(H[k], H[k + 1]) for k in range(5)]
    assert sum(math.dist(a, b) for a, b in path) == pytest.approx(5.0, abs=1e-12)
    assert len(O.dihedral_orbit(H, path)) == 6


def test_hexagon_family_shapes():
    H = O.hexagon()
    zig = [(1, 6), (2, 6), (4, 7), (5, 7), (0, 8), (6, 8), (8, 9), (3, 9), (7, 9)]
    snow = [(0, 6), (1, 6), (2, 7), (3, 7), (4, 8), (5, 8), (6, 9), (7, 9), (8, 9)]
    assert O.full_tree_length(H, zig, 3) == pytest.approx(O.ZIGZAG_LENGTH, abs=1e-9)
    assert O.full_tree_length(H, snow, 3) == pytest.approx(O.SNOWFLAKE_LENGTH, abs=1e-9)


def test_exact_margins():
    n = O.exact_norms(O.HEXAGON_PHI1)
    assert {sp.nsimplify(v) for v in n.values()} == {2, 2 * sp.sqrt(3), 4}
    assert sorted({float(v) for v in n.values()}) == pytest.approx(sorted(O.HEXAGON_PHI1_NORMS), abs=1e-15)
    p = O.exact_norms(O.PENTAGON_PHI)
    assert [p[(2, 4)], p[(2, 5)], p[(3, 5)]] == [sp.sqrt(12), 4, sp.sqrt(12)]
    assert all(p[k] == 2 for k in p if k not in {(2, 4), (2, 5), (3, 5)})
    t = O.exact_norms(O.TRIANGLE_PHI)
    assert set(t.values()) == {2}


def test_obtuse_margin_formula():
    a = sp.Symbol("a", positive=True)
    n = O.exact_norms(O.obtuse_phi(a))
    assert sp.simplify(n[(2, 3)] - 4 * sp.Abs(sp.sin(a))) == 0
    for x in (sp.pi / 12, sp.pi / 8, sp.pi / 6):
        assert sp.simplify(n[(2, 3)].subs(a, x) - 4 * sp.sin(x)) == 0
    assert sp.simplify(n[(1, 2)]) == 2 and sp.simplify(n[(1, 3)]) == 2
