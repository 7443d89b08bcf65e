import math

import numpy as np
import pytest

from steiner_cover.calib import _config
from steiner_cover.covering import PointConfig, build_covering, canonical_cuts
from steiner_cover.sheets import (
    ClassTError,
    check_constraints,
    interfaces,
    localized_perimeter,
    network_to_sheeted_set,
    perimeter,
    tour_order,
)
from steiner_cover.steiner import Network, embed_topology, enumerate_topologies, steiner_tree


def _setup(name):
    c = _config(name)
    return c, build_covering(c, canonical_cuts(c))


def tripod():
    c, cov = _setup("triangle-equilateral")
    return Network(c, [(0.0, 0.0)], [(0, 3), (1, 3), (2, 3)]), cov


def test_tripod_perimeter_is_twice_length():
    net, cov = tripod()
    E = network_to_sheeted_set(net, cov)
    assert perimeter(E) == pytest.approx(6.0, abs=1e-12)
    assert check_constraints(E).ok
    assert E.cov is cov and E.relabeling is None


def test_tripod_interface_pairs():
    net, cov = tripod()
    E = network_to_sheeted_set(net, cov)
    got = {I.pair: I.length for I in interfaces(E)}
    assert sum(got.values()) == pytest.approx(3.0)
    assert all(1 <= a < b <= 3 for a, b in got)


def test_hexagon_path():
    c, cov = _setup("hexagon")
    net = Network(c, np.zeros((0, 2)), [(k, k + 1) for k in range(5)])
    E = network_to_sheeted_set(net, cov)
    assert perimeter(E) == pytest.approx(10.0, abs=1e-12)
    assert check_constraints(E).ok


@pytest.mark.parametrize("name", ["square", "pentagon"])
def test_minimizers(name):
    c, cov = _setup(name)
    res = steiner_tree(c)
    for net in res.minimizers:
        E = network_to_sheeted_set(net, cov)
        assert perimeter(E) == pytest.approx(2 * res.length, abs=1e-9)


def test_random_class_t_networks():
    rng = np.random.default_rng(11)
    tops = {m: enumerate_topologies(m) for m in range(3, 6)}
    done = 0
    while done < 12:
        m = int(rng.integers(3, 6))
        try:
            c = PointConfig(rng.uniform(-1, 1, (m, 2)))
            top = tops[m][rng.integers(len(tops[m]))]
            base = embed_topology(top, c)
            S = base.steiner_points + rng.normal(0, 0.15, base.steiner_points.shape)
            net = Network(c, S, top.edges, top)
            E = network_to_sheeted_set(net)
        except (ClassTError, ValueError):
            continue
        assert perimeter(E) == pytest.approx(2 * net.length, abs=1e-9)
        assert check_constraints(E).ok
        done += 1


def test_relabelled_when_terminal_order_differs():
    c = PointConfig([(0, 0), (2, 0), (1, 0.2), (1, 2)])  # not in convex position
    net = Network(c, np.zeros((0, 2)), [(0, 2), (2, 1), (2, 3)])
    E = network_to_sheeted_set(net)
    assert E.relabeling is not None and sorted(E.relabeling) == [0, 1, 2, 3]
    assert perimeter(E) == pytest.approx(2 * net.length, abs=1e-12)


def test_tour_order_of_path():
    c, _ = _setup("square")
    net = Network(c, np.zeros((0, 2)), [(0, 1), (1, 3), (3, 2)])
    order = tour_order(net)
    k = order.index(0)
    assert order[k:] + order[:k] == [0, 1, 2, 3]  # convex position: hull order


def test_crossing_network_rejected():
    c, _ = _setup("square")
    net = Network(c, np.zeros((0, 2)), [(0, 2), (1, 3), (0, 1)])
    with pytest.raises(ClassTError):
        network_to_sheeted_set(net)


def test_constraint_failures_reported():
    net, cov = tripod()
    E = network_to_sheeted_set(net, cov)
    lab = E.labels.copy()
    lab[E.arrangement.unbounded] = 2
    assert "sheet_one_at_infinity" in check_constraints(E.with_labels(lab)).failed()
    lab = E.labels.copy()
    lab[0] = 0
    assert "one_label_per_face" in check_constraints(E.with_labels(lab)).failed()


def test_localized_perimeter():
    net, cov = tripod()
    E = network_to_sheeted_set(net, cov)
    big = [(-5, -5), (5, -5), (5, 5), (-5, 5)]
    assert localized_perimeter(E, big) == pytest.approx(perimeter(E))
    r = 0.5
    disc = [(r * math.cos(t), r * math.sin(t)) for t in np.linspace(0, 2 * math.pi, 400, endpoint=False)]
    assert localized_perimeter(E, disc) == pytest.approx(2 * 3 * r, rel=1e-4)
