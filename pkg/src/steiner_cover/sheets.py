"""Constrained sheeted sets: face labelings of the cut arrangement.

A :class:`SheetedSet` labels every face of the arrangement formed by the
boundary of Omega, the cut curves and an optional network with the D-chart
sheet that the set occupies over that face.  Crossing an edge that lies on
Sigma_i transports the label with the covering shift; an edge is part of the
reduced boundary exactly when the transported label disagrees with the label
on the other side.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .covering import (
    CoveringError,
    CoveringSpace,
    CutSystem,
    PointConfig,
    build_covering,
    canonical_cuts,
)
from .geom import (
    EPS_GEO,
    Arrangement,
    GeometryError,
    Polyline,
    as_points,
    build_segment_arrangement,
    convex_hull,
    diameter,
    dilate,
    point_segment_distance,
    polygon_segments,
    segment_intersect,
    winding_many,
)
from .steiner import Network

INTERFACE_EPS = 1e-12


class ConstructionError(GeometryError):
    pass


class ClassTError(ConstructionError):
    pass


def _has_tag(tags, kind):
    return any(isinstance(t, tuple) and t[0] == kind for t in tags)


def _sigma_tag(tags):
    for t in tags:
        if isinstance(t, tuple) and t[0] == "sigma":
            return t[1]
    return None


@dataclass(frozen=True)
class InterfaceSet:
    pair: tuple
    edges: tuple
    length: float


@dataclass(frozen=True, eq=False)
class SheetedSet:
    cov: CoveringSpace
    arrangement: Arrangement
    labels: np.ndarray
    face_r: np.ndarray
    network: Network | None = None
    relabeling: tuple | None = None

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=int).copy()
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @property
    def m(self):
        return self.cov.m

    def with_labels(self, labels) -> "SheetedSet":
        return SheetedSet(self.cov, self.arrangement, labels, self.face_r, None, self.relabeling)

    def label_at(self, pts) -> np.ndarray:
        return self.labels[self.arrangement.locate(pts)]

    def edge_labels(self):
        """Per edge: (label left, label right, left label carried across)."""
        A = self.arrangement
        f, g = A.edge_faces[:, 0], A.edge_faces[:, 1]
        lf, lg = self.labels[f], self.labels[g]
        carried = lf.copy()
        for e, tags in enumerate(A.edge_tags):
            if _sigma_tag(tags) is not None:
                carried[e] = self.cov.transfer(int(lf[e]), int(self.face_r[f[e]]), int(self.face_r[g[e]]))
        return lf, lg, carried

    def interface_mask(self) -> np.ndarray:
        _, lg, carried = self.edge_labels()
        return carried != lg

    def interface_pairs(self):
        """Per interface edge: unordered sheet pair, named in the right face's chart."""
        _, lg, carried = self.edge_labels()
        out = {}
        for e in np.nonzero(carried != lg)[0]:
            a, b = int(carried[e]), int(lg[e])
            out[int(e)] = (min(a, b), max(a, b))
        return out

    def interface_length(self) -> float:
        return float(self.arrangement.edge_len[self.interface_mask()].sum())


# ----------------------------------------------------------------- building


def _base_segments(cov: CoveringSpace, extra=()):
    segs = polygon_segments(cov.cuts.omega, "domain") + cov.segments()
    segs += [(a, b, "network") for a, b in extra]
    return segs


def sheeted_set(cov: CoveringSpace, segments=(), labeler=None, network=None) -> SheetedSet:
    """Sheeted set on the arrangement of Omega, the cuts and ``segments``.

    ``labeler`` maps (face sample points, face region offsets) to labels; the
    default labels everything 1.  The unbounded face always gets label 1.
    """
    A = build_segment_arrangement(_base_segments(cov, segments), points=cov.config.points)
    samples = np.array([f.sample for f in A.faces])
    r = cov.region_index(samples)
    r[A.unbounded] = 0
    if labeler is None:
        lab = np.ones(A.n_faces, dtype=int)
    else:
        lab = np.asarray(labeler(samples, r), dtype=int)
    lab = lab.copy()
    lab[A.unbounded] = 1
    r.setflags(write=False)
    return SheetedSet(cov, A, lab, r, network)


def _tree_path(net: Network, s: int, t: int):
    adj = {v: net.neighbors(v) for v in range(net.n)}
    prev = {s: None}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in adj[v]:
            if w not in prev:
                prev[w] = v
                q.append(w)
    if t not in prev:
        raise ClassTError("network is not connected")
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def _recipe_labeler(net: Network, cov: CoveringSpace):
    m = cov.m
    V = net.vertices
    loops = []
    for j in range(1, m):
        path = _tree_path(net, j - 1, j)
        sig = cov.cuts.sigma[j - 1].vertices
        ring = np.vstack([sig[:-1], V[path[::-1]][:-1]])
        loops.append((m + 1 - j, ring))

    def labeler(samples, r):
        lab = np.ones(len(samples), dtype=int)
        hit = np.zeros(len(samples), dtype=int)
        for value, ring in loops:
            inside = winding_many(ring, samples) != 0
            lab[inside] = value
            hit += inside
        if np.any(hit > 1):
            raise ConstructionError("recipe regions overlap; cuts do not follow the network")
        return lab

    return labeler


def _check_class_t(net: Network):
    if len(net.edges) != net.n - 1:
        raise ClassTError("network contains a loop")
    segs = net.segments()
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            share = set(net.edges[i]) & set(net.edges[j])
            h = segment_intersect(segs[i], segs[j])
            if not h:
                continue
            if share and h.kind == "endpoint":
                continue
            raise ClassTError("network edges intersect away from their end points")


def network_to_sheeted_set(net: Network, cov: CoveringSpace | None = None) -> SheetedSet:
    """Set whose reduced boundary projects onto the class-T network ``net``.

    If the terminals are not labelled in the cyclic order in which the
    network meets them, or the supplied cuts cross the network, the
    terminals are relabelled along the network and cuts are drawn around it.
    """
    _check_class_t(net)
    order = tour_order(net)
    if cov is not None and order == list(range(net.m)) and np.allclose(
        cov.config.points, net.terminals.points, atol=EPS_GEO
    ):
        try:
            return _recipe_set(net, cov, None)
        except ConstructionError:
            pass
    net2, perm = relabel_terminals(net, order)
    cov2 = None
    if net2.terminals.is_convex() and net2.terminals.orientation() > 0:
        try:
            cov2 = build_covering(net2.terminals, canonical_cuts(net2.terminals))
            return _recipe_set(net2, cov2, perm)
        except (ConstructionError, CoveringError):
            cov2 = None
    cov2 = build_covering(net2.terminals, network_cuts(net2))
    return _recipe_set(net2, cov2, perm)


def _recipe_set(net, cov, perm):
    E = sheeted_set(cov, net.segments(), _recipe_labeler(net, cov), network=net)
    E = SheetedSet(E.cov, E.arrangement, E.labels, E.face_r, net, perm)
    A = E.arrangement
    is_net = np.array([("network" in t) for t in A.edge_tags], dtype=bool)
    if not np.array_equal(E.interface_mask(), is_net):
        raise ConstructionError("projected interfaces differ from the network")
    return E


# -------------------------------------------------- relabelling and contours


def _incident_angles(net: Network, v: int):
    V = net.vertices
    return sorted(
        (math.atan2(*(V[w] - V[v])[::-1]) % (2 * math.pi), w) for w in net.neighbors(v)
    )


def _wedges(net: Network, v: int):
    """Angular gaps (lo, hi) between consecutive incident edges, hi > lo."""
    ang = [a for a, _ in _incident_angles(net, v)]
    if len(ang) == 1:
        return [(ang[0], ang[0] + 2 * math.pi)]
    out = []
    for k in range(len(ang)):
        lo, hi = ang[k], ang[(k + 1) % len(ang)]
        if hi <= lo:
            hi += 2 * math.pi
        out.append((lo, hi))
    return out


def _clearance(net: Network) -> float:
    """Safe offset scale: feature size damped by the narrowest terminal wedge."""
    narrow = min(hi - lo for v in range(net.m) for lo, hi in _wedges(net, v))
    return _feature_size(net) * math.sin(min(narrow, math.pi) / 2)


def _feature_size(net: Network) -> float:
    segs = net.segments()
    V = net.vertices
    best = float(np.min(net.edge_lengths))
    for i, (a, b) in enumerate(segs):
        for v in range(net.n):
            if v in net.edges[i]:
                continue
            best = min(best, point_segment_distance(V[v], a, b))
    return best


def _contour(net: Network, delta: float):
    from shapely.geometry import MultiLineString
    from shapely.geometry.polygon import orient

    poly = MultiLineString([[tuple(a), tuple(b)] for a, b in net.segments()]).buffer(
        delta, quad_segs=3
    )
    poly = orient(poly, 1.0)
    ring = np.array(poly.exterior.coords)
    return ring


class _Ring:
    """Closed polyline with arclength parametrisation."""

    def __init__(self, ring):
        if np.hypot(*(ring[0] - ring[-1])) > EPS_GEO:
            ring = np.vstack([ring, ring[:1]])
        self.v = ring
        seg = np.hypot(*np.diff(ring, axis=0).T)
        self.s = np.concatenate([[0.0], np.cumsum(seg)])
        self.L = float(self.s[-1])

    def ray_hit(self, p, d):
        """Nearest crossing of the ray p + t d (t > 0) with the ring: (t, arclength)."""
        best = (math.inf, None)
        for k in range(len(self.v) - 1):
            a, b = self.v[k], self.v[k + 1]
            e = b - a
            den = d[0] * (-e[1]) + d[1] * e[0]
            if abs(den) < 1e-15:
                continue
            w = a - p
            t = (w[0] * (-e[1]) + w[1] * e[0]) / den
            u = (d[0] * w[1] - d[1] * w[0]) / den
            if t > 0 and -1e-12 <= u <= 1 + 1e-12 and t < best[0]:
                best = (t, self.s[k] + u * (self.s[k + 1] - self.s[k]))
        if best[1] is None:
            raise ConstructionError("ray misses the contour")
        return best

    def point(self, s):
        s = s % self.L
        k = min(np.searchsorted(self.s, s, side="right") - 1, len(self.v) - 2)
        t = (s - self.s[k]) / (self.s[k + 1] - self.s[k])
        return self.v[k] + t * (self.v[k + 1] - self.v[k])

    def piece(self, s0, s1):
        """Points along the ring from arclength s0 forward to s1 (wrapping)."""
        if s1 < s0:
            s1 += self.L
        pts = [self.point(s0)]
        inner = [x for x in np.concatenate([self.s[:-1], self.s[:-1] + self.L]) if s0 < x < s1]
        for x in sorted(inner):
            pts.append(self.point(x))
        pts.append(self.point(s1))
        return np.array(pts)


def _wedge_visits(net: Network, ring: _Ring):
    visits = []
    for v in range(net.m):
        for lo, hi in _wedges(net, v):
            th = 0.5 * (lo + hi)
            _, s = ring.ray_hit(net.vertices[v], np.array([math.cos(th), math.sin(th)]))
            visits.append((s, v, lo, hi))
    return visits


def _tour_wedges(net: Network, ring: _Ring):
    """Per terminal its widest wedge (the outer one at a hull vertex), with
    the contour position of the wedge bisector, ordered along the walk."""
    best = {}
    for s, v, lo, hi in _wedge_visits(net, ring):
        key = (hi - lo, -lo)
        if v not in best or key > best[v][0]:
            best[v] = (key, s, lo, hi)
    s0 = best[0][1]
    rows = sorted((v, s, lo, hi) for v, (_, s, lo, hi) in best.items())
    rows.sort(key=lambda r: (r[1] - s0) % ring.L)
    return rows, s0


def tour_order(net: Network, delta=None):
    """Terminals in the order a counterclockwise walk around the network meets
    their outer wedges."""
    if net.m <= 2:
        return list(range(net.m))
    delta = delta or _clearance(net) / 5
    rows, _ = _tour_wedges(net, _Ring(_contour(net, delta)))
    return [v for v, *_ in rows]


def relabel_terminals(net: Network, order):
    """Network with terminals renumbered so that ``order[k]`` becomes terminal k."""
    m = net.m
    inv = {old: new for new, old in enumerate(order)}
    pts = net.terminals.points[list(order)]
    ren = lambda v: inv[v] if v < m else v
    edges = [(ren(a), ren(b)) for a, b in net.edges]
    return Network(PointConfig(pts), net.steiner_points, edges, None, net.degenerate), tuple(order)


def network_cuts(net: Network, delta=None, margin=0.2) -> CutSystem:
    """Cuts hugging the network: Sigma' at offset delta, Sigma at 2 delta.

    Terminals must already be numbered in tour order.  Each cut leaves its
    terminal along a ray in its widest wedge, so the two
    Sigma rays at a terminal sit between the two Sigma' rays.
    """
    m = net.m
    delta = delta or _clearance(net) / 5
    inner = _Ring(_contour(net, delta))
    outer = _Ring(_contour(net, 2 * delta))
    rows, s0 = _tour_wedges(net, inner)
    if [v for v, *_ in rows] != list(range(m)):
        raise ConstructionError("terminals are not numbered in tour order")
    first = {v: (lo, hi) for v, _, lo, hi in rows}
    spokes = {}
    for v in range(m):
        lo, hi = first[v]
        p = net.vertices[v]
        hits = []
        for frac in (0.35, 0.45, 0.55, 0.65):
            th = lo + frac * (hi - lo)
            d = np.array([math.cos(th), math.sin(th)])
            hits.append((inner.ray_hit(p, d), outer.ray_hit(p, d), d))
        rel = lambda h: (h[0][1] - s0) % inner.L
        hits.sort(key=rel)
        spokes[v] = hits
    sigma, sigmap = [], []
    for j in range(m - 1):
        p, q = net.vertices[j], net.vertices[j + 1]
        (ti_a, si_a), (to_a, so_a), da = spokes[j][2]
        (ti_b, si_b), (to_b, so_b), db = spokes[j + 1][1]
        body = outer.piece(so_a, so_b)
        sigma.append(Polyline(_dedupe(np.vstack([[p], body, [q]]))))
        (ti_a, si_a), _, da = spokes[j][3]
        (ti_b, si_b), _, db = spokes[j + 1][0]
        body = inner.piece(si_a, si_b)
        sigmap.append(Polyline(_dedupe(np.vstack([[p], body, [q]]))))
    hull = convex_hull(outer.v)
    omega = dilate(hull, margin * diameter(hull))
    return CutSystem(sigma, sigmap, omega)


def _dedupe(pts, eps=1e-12):
    out = [pts[0]]
    for p in pts[1:]:
        if np.hypot(*(p - out[-1])) > eps:
            out.append(p)
    return np.array(out)


# ------------------------------------------------------------ measurements


def perimeter(E: SheetedSet) -> float:
    return 2.0 * E.interface_length()


def interfaces(E: SheetedSet):
    pairs = E.interface_pairs()
    L = E.arrangement.edge_len
    groups = {}
    for e, p in pairs.items():
        groups.setdefault(p, []).append(e)
    out = []
    for p in sorted(groups):
        es = tuple(sorted(groups[p]))
        length = float(L[list(es)].sum())
        if length > INTERFACE_EPS:
            out.append(InterfaceSet(p, es, length))
    return out


def localized_perimeter(E: SheetedSet, window) -> float:
    """Perimeter of E inside the preimage of a convex polygon ``window``."""
    from shapely.geometry import LineString, Polygon

    W = Polygon(as_points(window))
    A = E.arrangement
    total = 0.0
    for e in np.nonzero(E.interface_mask())[0]:
        a, b = A.vertices[A.edges[e]]
        total += LineString([tuple(a), tuple(b)]).intersection(W).length
    return 2.0 * total


@dataclass
class ConstraintReport:
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(v[0] for v in self.checks.values())

    def failed(self):
        return [k for k, v in self.checks.items() if not v[0]]

    def __str__(self):
        return "\n".join(f"{k}: {'pass' if ok else 'FAIL'} {msg}".rstrip() for k, (ok, msg) in self.checks.items())


def check_constraints(E: SheetedSet, class_t: bool | None = None) -> ConstraintReport:
    rep = ConstraintReport()
    A = E.arrangement
    m = E.m
    lab = E.labels
    ok = len(lab) == A.n_faces and bool(np.all((lab >= 1) & (lab <= m)))
    rep.checks["one_label_per_face"] = (ok, "" if ok else "labels missing or out of range")
    ok = int(lab[A.unbounded]) == 1
    rep.checks["sheet_one_at_infinity"] = (ok, "" if ok else f"unbounded face has label {lab[A.unbounded]}")
    mask = E.interface_mask()
    ends = A.edges[mask]
    P = E.cov.config.points
    missing = []
    for k, p in enumerate(P):
        d = np.hypot(*(A.vertices - p).T)
        v = int(d.argmin())
        if d[v] > EPS_GEO or not np.any(ends == v):
            missing.append(k + 1)
    rep.checks["terminals_on_boundary"] = (
        not missing, "" if not missing else f"terminals {missing} not on the reduced boundary")
    if class_t is None:
        class_t = E.network is not None
    if class_t:
        comp = _components(A, ends)
        ids = set()
        for p in P:
            v = int(np.hypot(*(A.vertices - p).T).argmin())
            ids.add(comp.get(v, -1 - v))
        ok = len(ids) == 1
        rep.checks["terminals_connected"] = (ok, "" if ok else "terminals split between boundary components")
    return rep


def _components(A: Arrangement, edges):
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(int(a))] = find(int(b))
    return {v: find(v) for v in list(parent)}
