import pytest

import oracles as O
from steiner_cover.calib import PRINTED_VALUES, _config, builtin, stripe_extension
from steiner_cover.families import (
    PRINTED,
    EmptyFamilyError,
    FamilyIndexSet,
    IncompleteCertificateError,
    certify,
    cover_check,
    crossing,
    dihedral_symmetries,
    family_candidate,
    field_implied,
    hexagon_families,
    interface_pairs_in_hull_chart,
    interleave_closure,
    is_adjacent,
    membership,
    minimality_driver,
    pentagon_families,
    printed_family,
    relabel_pairs,
    reversal,
    split_violations,
    topology_pairs,
    triangulations,
)
from steiner_cover.sheets import network_to_sheeted_set
from steiner_cover.steiner import embed_topology, enumerate_topologies


def test_pair_normalisation():
    F = FamilyIndexSet({(4, 2), (3, 1)}, 5)
    assert list(F) == [(1, 3), (2, 4)]
    assert (4, 2) in F and len(F) == 2
    assert F.shifted(1).J == {(2, 4), (3, 5)}
    with pytest.raises(ValueError):
        FamilyIndexSet({(1, 6)}, 5)  # 6 wraps onto 1


def test_crossing_and_closure():
    assert crossing((1, 3), (2, 4), 5)
    assert not crossing((1, 3), (3, 5), 5)
    assert not crossing((1, 3), (4, 5), 5)
    assert interleave_closure([(1, 3)], 5).J == {(2, 4), (2, 5)}
    assert split_violations([(1, 3), (2, 4)], 5) == [(1, 3), (2, 4)]
    assert split_violations([(1, 3), (1, 4)], 5) == []


def test_triangulation_counts():
    # Catalan numbers C_{m-2}
    assert [len(triangulations(m)) for m in (4, 5, 6, 7)] == [2, 5, 14, 42]


def test_pentagon_catalog_matches_printed():
    cat = pentagon_families()
    assert len(cat) == 5
    assert [f.J for f in cat] == [printed_family(5, k).J for k in range(1, 6)]
    assert "no differences" in cat.report()


def test_hexagon_catalog():
    cat = hexagon_families()
    assert len(cat) == 14
    assert all(f.J == printed_family(6, f.index).J for f in cat)
    assert sum("literal reading is empty" in d for d in cat.diff) == 6
    assert sum("reconciliation case" in d for d in cat.diff) == 3


def test_printed_j10_field_implies_j7():
    implied = field_implied(PRINTED_VALUES["hexagon-10"])
    assert implied == printed_family(6, 7).J
    assert relabel_pairs(printed_family(6, 10).J, reversal(6), 6) == implied


def test_field_implied_exempt_sets():
    assert field_implied(PRINTED_VALUES["pentagon(5)"]) == printed_family(5, 5).J
    assert field_implied(PRINTED_VALUES["hexagon-1"]) == printed_family(6, 1).J
    assert field_implied(PRINTED_VALUES["hexagon-13"]) == printed_family(6, 13).J


def test_dihedral_symmetries():
    c = _config("pentagon")
    syms = dihedral_symmetries(c)
    assert len(syms) == 10
    J5 = printed_family(5, 5).J
    assert {g.pairs(J5, 5) for g in syms} == {printed_family(5, k).J for k in range(1, 6)}
    for g in syms:
        assert field_implied(g.values(PRINTED_VALUES["pentagon(5)"])) == g.pairs(J5, 5)


def test_topology_pairs_match_drawn_interfaces():
    c = _config("pentagon")
    cov = builtin("pentagon(5)").cov
    path = next(t for t in enumerate_topologies(5)
                if t.k == 0 and set(t.edges) == {(0, 1), (1, 2), (2, 3), (3, 4)})
    E = network_to_sheeted_set(embed_topology(path, c), cov)
    drawn = {p for p in interface_pairs_in_hull_chart(E) if not is_adjacent(p, 5)}
    assert topology_pairs(path) == drawn == {(1, 3), (1, 4)}


def test_pentagon_cover():
    rep = cover_check(_config("pentagon"), pentagon_families().families)
    assert rep.ok, str(rep)
    assert rep.n_topologies == 360 and rep.n_class_t == 135
    assert all(n > 0 for n in rep.family_counts.values())


def test_incomplete_cover_detected():
    fams = pentagon_families().families[:1]
    rep = cover_check(_config("pentagon"), fams, geometric=False)
    assert not rep.ok and rep.uncovered


def test_family_candidate_length():
    c = _config("pentagon")
    cand = family_candidate(c, printed_family(5, 5))
    assert cand.length == pytest.approx(O.PENTAGON_STEINER_LENGTH, abs=1e-9)
    assert membership(cand.E, printed_family(5, 5))


def test_empty_family():
    allpairs = [(a, b) for a in range(1, 6) for b in range(a + 1, 6)]
    with pytest.raises(EmptyFamilyError):
        family_candidate(_config("pentagon"), allpairs)


def test_certify_pentagon():
    rep = certify("pentagon")
    assert rep.winners == [1, 2, 3, 4, 5]
    assert rep.minimum_perimeter == pytest.approx(2 * O.PENTAGON_STEINER_LENGTH, abs=1e-9)
    assert all(c.verified for c in rep.certificates)
    assert "winners: families 1, 2, 3, 4, 5" in str(rep)


def test_driver_stages():
    fx = builtin("pentagon(5)")
    fams = pentagon_families().families
    with pytest.raises(IncompleteCertificateError) as e:
        minimality_driver(fx.config, fams[:1], {}, {}, fx.cov)
    assert e.value.stage == "cover"
    with pytest.raises(IncompleteCertificateError) as e:
        minimality_driver(fx.config, fams, {}, {}, fx.cov)
    assert e.value.stage == "candidate"
    # a field that calibrates J5 does not calibrate J1
    cands = {f.index: family_candidate(fx.config, f, fx.cov) for f in fams}
    fields = {f.index: stripe_extension(fx.hull_values, fx.cov) for f in fams}
    with pytest.raises(IncompleteCertificateError) as e:
        minimality_driver(fx.config, fams, cands, fields, fx.cov)
    assert e.value.stage == "calibration"


def test_printed_table_shapes():
    assert len(PRINTED[5]) == 5 and len(PRINTED[6]) == 14
    assert all(len(v) == 3 for v in PRINTED[5].values())
    assert all(len(v) == 6 for v in PRINTED[6].values())
