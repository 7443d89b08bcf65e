import math

import numpy as np
import pytest

import oracles as O
from steiner_cover.calib import (
    BUILTIN_NAMES,
    PRINTED_VALUES,
    ExtensionError,
    SheetField,
    builtin,
    chart_shift,
    check_divergence_free,
    check_size,
    obtuse_values,
    rotation_matrix,
    stripe_extension,
    transform_field,
    verify,
)
from steiner_cover.covering import PointConfig, build_covering, canonical_cuts
from steiner_cover.families import printed_family
from steiner_cover.sheets import perimeter

NAMES = [n.replace("(alpha)", "") for n in BUILTIN_NAMES]


@pytest.fixture(scope="module")
def fixtures():
    return {}


def get(cache, name):
    if name not in cache:
        cache[name] = builtin(name)
    return cache[name]


@pytest.mark.parametrize("name", NAMES)
def test_builtin_verifies(fixtures, name):
    fx = get(fixtures, name)
    rep = fx.verify()
    assert rep.verdict, str(rep)
    assert rep.integral == pytest.approx(perimeter(fx.E), abs=1e-9)
    assert rep.saturation < 1e-9
    assert rep.perimeter == pytest.approx(2 * fx.network.length, abs=1e-9)


def test_printed_values_match_reference():
    def same(a, b):
        return np.allclose(np.asarray(a, float), np.array([[float(x) for x in v] for v in b]), atol=1e-15)

    assert same(PRINTED_VALUES["pentagon(5)"], O.PENTAGON_PHI)
    assert same(PRINTED_VALUES["hexagon-1"], O.HEXAGON_PHI1)
    assert same(PRINTED_VALUES["triangle-equilateral"], O.TRIANGLE_PHI)
    for a in (math.pi / 12, math.pi / 7):
        assert same(obtuse_values(a), O.obtuse_phi(a))


def test_pentagon_exempt_margins(fixtures):
    fx = get(fixtures, "pentagon(5)")
    rep = fx.verify()
    ex = rep.size.exempt_values()
    assert sorted(ex) == [(2, 4), (2, 5), (3, 5)]
    assert [ex[p] for p in sorted(ex)] == pytest.approx(O.PENTAGON_J5_EXEMPT, abs=1e-12)


def test_hexagon_phi1_norms(fixtures):
    rep = get(fixtures, "hexagon-1").verify()
    got = {round(v, 12) for v, _ in rep.size.rows.values()}
    assert got == {round(x, 12) for x in O.HEXAGON_PHI1_NORMS}


def test_pentagon_without_family_fails(fixtures):
    fx = get(fixtures, "pentagon(5)")
    rep = fx.verify(J=())
    assert not rep.verdict and rep.divergence_ok and rep.equality_ok
    assert rep.dominating_violation() == "size: |Phi^2 - Phi^5| = 4 > 2"
    assert rep.conclusion().startswith("no conclusion")


def test_wrong_family_flags_foreign_interfaces(fixtures):
    fx = get(fixtures, "pentagon(5)")
    assert fx.verify().in_family
    rep = fx.verify(J=set(printed_family(5, 5)) | {(1, 2)})
    assert rep.size_ok and rep.foreign == ((1, 2),) and not rep.verdict
    assert rep.dominating_violation().startswith("family:")


def test_printed_j10_reconciliation():
    fx = get({}, "hexagon-1")
    f = stripe_extension(np.array(PRINTED_VALUES["hexagon-10"]), fx.cov)
    size = check_size(f, printed_family(6, 10), fx.cov)
    v = size.violations()
    assert (2, 4) in v and v[(2, 4)] == pytest.approx(math.sqrt(12), abs=1e-12)
    assert builtin("hexagon-10").reconciled is False
    assert "reconciliation" in builtin("hexagon-10").note


def test_divergence_detects_broken_field(fixtures):
    fx = get(fixtures, "triangle-equilateral")
    f = fx.field
    vals = f.values.copy()
    k = f.arrangement.locate([(0.05, 0.02)])[0]
    vals[0, k] += (0.3, 0.1)
    bad = SheetField(f.arrangement, vals, f.window)
    assert not check_divergence_free(bad, fx.cov).ok()
    assert not verify(bad, fx.E).verdict


def test_translation_invariance(fixtures):
    fx = get(fixtures, "square")
    r0 = fx.verify()
    r1 = verify(fx.field.translated((0.7, -1.3)), fx.E, J=fx.J)
    assert r1.verdict
    assert r1.integral == pytest.approx(r0.integral, abs=1e-9)
    assert r1.size == r0.size


def test_rotation_preserves_size_table(fixtures):
    fx = get(fixtures, "hexagon-1")
    g = transform_field(fx.field, rotation_matrix(math.pi / 3), [1, 2, 3, 4, 5, 6])
    assert check_size(g) == check_size(fx.field)


def test_obtuse_margin():
    for a in (math.pi / 12, math.pi / 8, math.pi / 6):
        rep = builtin(f"triangle-obtuse({a!r})").verify()
        assert rep.verdict
        assert rep.size.rows[(2, 3)][0] == pytest.approx(4 * math.sin(a), abs=1e-12)
    with pytest.raises(ValueError):
        builtin("triangle-obtuse(pi/5)")


def test_chart_shift_zero_inside_hull(fixtures):
    fx = get(fixtures, "pentagon(5)")
    P = fx.config.points
    assert not chart_shift(fx.cov, [P.mean(axis=0), 0.5 * P[0] + 0.5 * P[2]]).any()
    # far beyond the middle of e_1, on the far side of Sigma_1
    mid = (P[0] + P[1]) / 2
    out = mid + 0.8 * (mid - P.mean(axis=0)) / np.hypot(*(mid - P.mean(axis=0)))
    assert chart_shift(fx.cov, [out])[0] in (0, 1)


def test_stripe_extension_needs_convex_position():
    c = PointConfig([(0, 0), (2, 0), (1, 0.3), (1, 2)])
    from steiner_cover.sheets import network_cuts, relabel_terminals, tour_order
    from steiner_cover.steiner import Network

    net = Network(c, np.zeros((0, 2)), [(0, 2), (2, 1), (2, 3)])
    net2, _ = relabel_terminals(net, tour_order(net))
    cov = build_covering(net2.terminals, network_cuts(net2))
    with pytest.raises(ExtensionError):
        stripe_extension(np.zeros((4, 2)), cov)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        builtin("heptagon")
    with pytest.raises(KeyError):
        builtin("hexagon-15")


def test_segment_field_sizes():
    fx = builtin("segment")
    assert fx.verify().size.rows == {(1, 2): (pytest.approx(2.0), False)}
    cov = build_covering(fx.config, canonical_cuts(fx.config))
    assert check_divergence_free(fx.field, cov).ok()
