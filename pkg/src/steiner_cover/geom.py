"""Planar primitives, predicates and segment arrangements.

Everything here works in double precision with a single absolute snapping
tolerance ``EPS_GEO``.  Points closer than that are the same vertex; a point
closer than that to an edge is *on* the edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

EPS_GEO = 1e-9


class GeometryError(ValueError):
    """Base class for geometric input errors."""


class DegenerateSegmentError(GeometryError):
    pass


class OnBoundaryError(GeometryError):
    pass


class InvalidNetworkError(GeometryError):
    pass


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"non-finite coordinate {p!r}")
    return a


def as_points(pts) -> np.ndarray:
    a = np.asarray(pts, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(a)):
        raise GeometryError("non-finite coordinate in point list")
    return a


def cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def orient(a, b, c) -> float:
    """Twice the signed area of triangle abc (positive when counterclockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def signed_area(ring) -> float:
    r = as_points(ring)
    if len(r) > 1 and np.allclose(r[0], r[-1]):
        r = r[:-1]
    x, y = r[:, 0], r[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def point_segment_distance(p, a, b) -> float:
    p, a, b = as_point(p), as_point(a), as_point(b)
    d = b - a
    L2 = float(d @ d)
    if L2 == 0.0:
        return float(np.hypot(*(p - a)))
    t = min(1.0, max(0.0, float((p - a) @ d) / L2))
    return float(np.hypot(*(p - a - t * d)))


# ---------------------------------------------------------------------------
# segment intersection


@dataclass(frozen=True)
class Intersection:
    """Result of :func:`segment_intersect`.

    ``kind`` is one of ``"none"``, ``"point"`` (proper crossing or a
    T-junction), ``"endpoint"`` (shared endpoint) or ``"overlap"``
    (collinear overlap, ``points`` holds the two ends of the common part).
    """

    kind: str
    points: tuple = ()

    @property
    def point(self):
        return self.points[0] if self.points else None

    def __bool__(self):
        return self.kind != "none"


def _check_segment(seg):
    a, b = as_point(seg[0]), as_point(seg[1])
    if np.hypot(*(b - a)) <= EPS_GEO:
        raise DegenerateSegmentError(f"zero-length segment {a.tolist()}-{b.tolist()}")
    return a, b


def _canon(points):
    # order-independent presentation so the result is symmetric in its arguments
    pts = sorted((tuple(map(float, p)) for p in points))
    return tuple(np.array(p) for p in pts)


def segment_intersect(s1, s2, eps: float = EPS_GEO) -> Intersection:
    a, b = _check_segment(s1)
    c, d = _check_segment(s2)
    return _intersect(a, b, c, d, eps)


def _snap(p, ends, eps):
    for q in ends:
        if math.hypot(p[0] - q[0], p[1] - q[1]) <= eps:
            return q
    return p


def _intersect(a, b, c, d, eps):
    r, s = b - a, d - c
    rs = r[0] * s[1] - r[1] * s[0]
    nr, ns = math.hypot(r[0], r[1]), math.hypot(s[0], s[1])
    shared = [p for p in (a, b) if min(math.hypot(*(p - c)), math.hypot(*(p - d))) <= eps]

    if abs(rs) <= eps * nr * ns:
        # parallel; collinear only when c lies on the supporting line of ab
        if abs(cross(r, c - a)) / nr > eps:
            return Intersection("none")
        t0 = float((c - a) @ r) / nr**2
        t1 = float((d - a) @ r) / nr**2
        lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        if hi * nr - lo * nr < -eps:
            return Intersection("none")
        if (hi - lo) * nr <= eps:
            p = _snap(a + 0.5 * (lo + hi) * r, (a, b, c, d), eps)
            kind = "endpoint" if shared else "point"
            return Intersection(kind, _canon([p]))
        ends = [_snap(a + lo * r, (a, b, c, d), eps), _snap(a + hi * r, (a, b, c, d), eps)]
        return Intersection("overlap", _canon(ends))

    t = cross(c - a, s) / rs
    u = cross(c - a, r) / rs
    if t * nr < -eps or (t - 1) * nr > eps or u * ns < -eps or (u - 1) * ns > eps:
        return Intersection("none")
    # T-junctions keep the exact endpoint so rebuilt arrangements do not drift
    p = _snap(a + min(1.0, max(0.0, t)) * r, (a, b, c, d), eps)
    if shared:
        return Intersection("endpoint", _canon([shared[0]]))
    return Intersection("point", _canon([p]))


# ---------------------------------------------------------------------------
# winding numbers


def winding_number(loop, p, eps: float = EPS_GEO) -> int:
    """Winding number of the closed polyline ``loop`` around ``p``."""
    pts = as_points(loop.vertices if isinstance(loop, Polyline) else loop)
    p = as_point(p)
    if len(pts) < 3 or np.hypot(*(pts[0] - pts[-1])) > eps:
        raise GeometryError("loop must be closed (first vertex equal to last)")
    for a, b in zip(pts[:-1], pts[1:]):
        if point_segment_distance(p, a, b) <= eps:
            raise OnBoundaryError(f"point {p.tolist()} lies on the loop")
    v = pts - p
    ang = np.arctan2(v[:, 1], v[:, 0])
    d = np.diff(ang)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return int(round(d.sum() / (2 * np.pi)))


def winding_many(ring: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Crossing-number winding of many points around a closed ring (no repeat)."""
    a = ring
    b = np.roll(ring, -1, axis=0)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    ay, by = a[:, 1][None, :], b[:, 1][None, :]
    ax, bx = a[:, 0][None, :], b[:, 0][None, :]
    side = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    up = (ay <= py) & (by > py) & (side > 0)
    down = (ay > py) & (by <= py) & (side < 0)
    return up.sum(axis=1) - down.sum(axis=1)


# ---------------------------------------------------------------------------
# polylines and convex polygons


@dataclass(frozen=True, eq=False)
class Polyline:
    vertices: np.ndarray

    def __post_init__(self):
        v = as_points(self.vertices)
        if len(v) < 2:
            raise GeometryError("a polyline needs at least two vertices")
        if np.any(np.hypot(*np.diff(v, axis=0).T) <= EPS_GEO):
            raise DegenerateSegmentError("consecutive polyline vertices coincide")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    @property
    def closed(self) -> bool:
        return bool(np.hypot(*(self.vertices[0] - self.vertices[-1])) <= EPS_GEO)

    def segments(self):
        v = self.vertices
        return [(v[k], v[k + 1]) for k in range(len(v) - 1)]

    def length(self) -> float:
        return float(np.hypot(*np.diff(self.vertices, axis=0).T).sum())

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1].copy())

    def concat(self, other: "Polyline") -> "Polyline":
        if np.hypot(*(self.end - other.start)) > EPS_GEO:
            raise GeometryError("polylines are not composable")
        return Polyline(np.vstack([self.vertices, other.vertices[1:]]))

    def is_simple(self) -> bool:
        segs = self.segments()
        n = len(segs)
        for i in range(n):
            for j in range(i + 1, n):
                hit = segment_intersect(segs[i], segs[j])
                if not hit:
                    continue
                if j == i + 1 and hit.kind == "endpoint":
                    continue
                if self.closed and i == 0 and j == n - 1 and hit.kind == "endpoint":
                    continue
                return False
        return True

    def to_list(self):
        return self.vertices.tolist()


def convex_hull(points) -> np.ndarray:
    """Counterclockwise hull vertices (monotone chain), collinear points dropped."""
    pts = sorted(set(map(tuple, as_points(points).tolist())))
    if len(pts) <= 2:
        return np.array(pts, dtype=float)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and orient(out[-2], out[-1], p) <= EPS_GEO * 1e-3:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def is_convex_position(points, eps: float = EPS_GEO) -> bool:
    """True when the points, in the given cyclic order, are strictly convex (CCW)."""
    pts = as_points(points)
    m = len(pts)
    if m == 2:
        return bool(np.hypot(*(pts[1] - pts[0])) > eps)
    if m < 2:
        return False
    for k in range(m):
        a, b, c = pts[k], pts[(k + 1) % m], pts[(k + 2) % m]
        scale = max(np.hypot(*(b - a)), np.hypot(*(c - b)), 1.0)
        if orient(a, b, c) <= eps * scale:
            return False
    return abs(signed_area(pts) - _winding_area(pts)) < 1e-9 * max(1.0, abs(signed_area(pts)))


def _winding_area(pts):
    # strictly convex and simple iff total turning is exactly 2*pi
    m = len(pts)
    turn = 0.0
    for k in range(m):
        u = pts[(k + 1) % m] - pts[k]
        v = pts[(k + 2) % m] - pts[(k + 1) % m]
        turn += math.atan2(cross(u, v), float(u @ v))
    return signed_area(pts) if abs(turn - 2 * math.pi) < 1e-6 else float("nan")


def dilate(points, radius: float, samples: int = 16) -> np.ndarray:
    """Convex polygon containing the ``radius``-neighbourhood of Conv(points)."""
    pts = as_points(points)
    # circumscribed polygon of the disc: scale the sampled circle outward
    k = np.arange(samples) * 2 * np.pi / samples
    ring = np.stack([np.cos(k), np.sin(k)], axis=1) * radius / math.cos(math.pi / samples)
    cloud = (pts[:, None, :] + ring[None, :, :]).reshape(-1, 2)
    return convex_hull(cloud)


def diameter(points) -> float:
    pts = as_points(points)
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def ray_exit(poly: np.ndarray, origin, direction) -> np.ndarray:
    """First point where the ray leaves the convex polygon ``poly``."""
    o, d = as_point(origin), as_point(direction)
    best = math.inf
    n = len(poly)
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        e = b - a
        den = cross(d, e)
        if abs(den) < 1e-15:
            continue
        t = cross(a - o, e) / den
        u = cross(a - o, d) / den
        if t > EPS_GEO and -1e-12 <= u <= 1 + 1e-12:
            best = min(best, t)
    if not math.isfinite(best):
        raise GeometryError("ray does not leave the polygon")
    return o + best * d


# ---------------------------------------------------------------------------
# arrangements


@dataclass
class Face:
    outer: list | None
    holes: list
    area: float
    sample: np.ndarray


@dataclass
class Arrangement:
    """Planar subdivision induced by a set of tagged segments.

    Half-edge ``2e`` runs ``edges[e][0] -> edges[e][1]``, ``2e+1`` the other
    way.  ``edge_faces[e] = (left of 2e, left of 2e+1)``.
    """

    vertices: np.ndarray
    edges: np.ndarray
    edge_len: np.ndarray
    edge_tags: list
    faces: list
    edge_faces: np.ndarray
    unbounded: int
    n_components: int
    he_next: np.ndarray = field(repr=False)
    he_face: np.ndarray = field(repr=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.faces)

    def euler_ok(self) -> bool:
        return self.n_vertices - self.n_edges + self.n_faces == 1 + self.n_components

    def bounded_faces(self):
        return [k for k in range(self.n_faces) if k != self.unbounded]

    def face_rings(self, k):
        f = self.faces[k]
        rings = [] if f.outer is None else [self.vertices[f.outer]]
        rings += [self.vertices[h] for h in f.holes]
        return rings

    def edges_tagged(self, pred) -> list:
        return [e for e, tags in enumerate(self.edge_tags) if any(pred(t) for t in tags)]

    def edge_midpoint(self, e) -> np.ndarray:
        u, v = self.edges[e]
        return 0.5 * (self.vertices[u] + self.vertices[v])

    def edge_normal(self, e) -> np.ndarray:
        """Unit normal pointing into the left face of half-edge ``2e``."""
        u, v = self.edges[e]
        d = self.vertices[v] - self.vertices[u]
        return np.array([-d[1], d[0]]) / np.hypot(*d)

    def locate(self, pts) -> np.ndarray:
        """Face index containing each point (points must avoid edges)."""
        pts = as_points(pts)
        out = np.full(len(pts), self.unbounded, dtype=int)
        todo = np.ones(len(pts), dtype=bool)
        for k, f in enumerate(self.faces):
            if f.outer is None or not todo.any():
                continue
            idx = np.nonzero(todo)[0]
            inside = winding_many(self.vertices[f.outer], pts[idx]) != 0
            for h in f.holes:
                if not inside.any():
                    break
                inside &= winding_many(self.vertices[h], pts[idx]) == 0
            out[idx[inside]] = k
            todo[idx[inside]] = False
        return out

    def face_adjacency(self) -> dict:
        adj = {k: set() for k in range(self.n_faces)}
        for e, (f, g) in enumerate(self.edge_faces):
            if f != g:
                adj[int(f)].add(int(g))
                adj[int(g)].add(int(f))
        return adj

    def total_bounded_area(self) -> float:
        return float(sum(self.faces[k].area for k in self.bounded_faces()))


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def _cluster(points: np.ndarray, eps: float):
    """Snap points within ``eps`` to a common representative (lowest index)."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    from scipy.spatial import cKDTree

    n = len(points)
    pairs = cKDTree(points).query_pairs(eps, output_type="ndarray")
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, comp = connected_components(g, directed=False)
    first = np.full(comp.max() + 1, n, dtype=int)
    np.minimum.at(first, comp, np.arange(n))
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return points[first[order]].reshape(-1, 2), rank[comp]


def _face_sample(rings, eps=EPS_GEO):
    ys = np.unique(np.concatenate([r[:, 1] for r in rings]))
    outer = rings[0]
    lo, hi = outer[:, 1].min(), outer[:, 1].max()
    ys = ys[(ys >= lo) & (ys <= hi)]
    gaps = np.diff(ys)
    order = np.argsort(-gaps)
    best, best_w = None, -1.0
    for g in order[: min(6, len(order))]:
        y = 0.5 * (ys[g] + ys[g + 1])
        xs = []
        for r in rings:
            a, b = r, np.roll(r, -1, axis=0)
            m = ((a[:, 1] < y) & (b[:, 1] > y)) | ((a[:, 1] > y) & (b[:, 1] < y))
            t = (y - a[m, 1]) / (b[m, 1] - a[m, 1])
            xs.append(a[m, 0] + t * (b[m, 0] - a[m, 0]))
        xs = np.sort(np.concatenate(xs))
        for k in range(0, len(xs) - 1, 2):
            w = xs[k + 1] - xs[k]
            # prefer wide chords, weighted by the vertical clearance
            score = min(w, gaps[g])
            if score > best_w:
                best_w, best = score, np.array([0.5 * (xs[k] + xs[k + 1]), y])
    if best is None:
        raise GeometryError("could not find an interior point for a face")
    return best


def build_segment_arrangement(
    segments: Sequence[tuple], eps: float = EPS_GEO, points: Iterable = ()
) -> Arrangement:
    """Arrangement of tagged segments ``(a, b, tag)``; ``tag`` may be None.

    Overlapping pieces are merged and their tags united.  Extra ``points``
    are inserted as vertices wherever they fall on a segment.
    """
    segs = []
    for s in segments:
        a, b = as_point(s[0]), as_point(s[1])
        tag = s[2] if len(s) > 2 else None
        if np.hypot(*(b - a)) <= eps:
            continue
        segs.append((a, b, tag))
    n = len(segs)
    extra = [as_point(p) for p in points]

    if n == 0:
        return Arrangement(
            vertices=np.zeros((0, 2)), edges=np.zeros((0, 2), int), edge_len=np.zeros(0),
            edge_tags=[], faces=[Face(None, [], math.inf, np.zeros(2))],
            edge_faces=np.zeros((0, 2), int), unbounded=0, n_components=0,
            he_next=np.zeros(0, int), he_face=np.zeros(0, int),
        )

    A = np.array([s[0] for s in segs])
    B = np.array([s[1] for s in segs])
    lo = np.minimum(A, B) - eps
    hi = np.maximum(A, B) + eps
    ov = (
        (lo[:, None, 0] <= hi[None, :, 0]) & (lo[None, :, 0] <= hi[:, None, 0])
        & (lo[:, None, 1] <= hi[None, :, 1]) & (lo[None, :, 1] <= hi[:, None, 1])
    )
    ii, jj = np.nonzero(np.triu(ov, 1))
    # drop pairs where one segment lies strictly to one side of the other
    d = B - A
    L = np.hypot(d[:, 0], d[:, 1])

    def side(k, P):
        return (d[k, 0] * (P[:, 1] - A[k, 1]) - d[k, 1] * (P[:, 0] - A[k, 0])) / L[k]

    s1, s2 = side(ii, A[jj]), side(ii, B[jj])
    s3, s4 = side(jj, A[ii]), side(jj, B[ii])
    apart = ((s1 > eps) & (s2 > eps)) | ((s1 < -eps) & (s2 < -eps)) \
        | ((s3 > eps) & (s4 > eps)) | ((s3 < -eps) & (s4 < -eps))
    ii, jj = ii[~apart], jj[~apart]

    cuts = [[A[k], B[k]] for k in range(n)]
    for i, j in zip(ii.tolist(), jj.tolist()):
        hit = _intersect(A[i], B[i], A[j], B[j], eps)
        if hit:
            cuts[i].extend(hit.points)
            cuts[j].extend(hit.points)
    for p in extra:
        rel = p - A
        t = np.clip(np.einsum("ij,ij->i", rel, d) / L**2, 0.0, 1.0)
        near = np.hypot(*(rel - t[:, None] * d).T) <= eps
        for k in np.nonzero(near)[0]:
            cuts[k].append(p)

    allpts = np.array([p for c in cuts for p in c])
    verts, lab = _cluster(allpts, eps)
    # a vertex produced for one segment may sit on another one
    pos = 0
    seg_vs = []
    for k in range(n):
        ids = set(lab[pos: pos + len(cuts[k])].tolist())
        pos += len(cuts[k])
        seg_vs.append(ids)
    for k in range(n):
        rel = verts - A[k]
        t = (rel @ d[k]) / L[k] ** 2
        dist = np.abs(rel[:, 0] * d[k, 1] - rel[:, 1] * d[k, 0]) / L[k]
        on = np.nonzero((dist <= eps) & (t * L[k] >= -eps) & ((t - 1) * L[k] <= eps))[0]
        seg_vs[k].update(on.tolist())

    edge_map: dict = {}
    for k in range(n):
        ids = sorted(seg_vs[k], key=lambda v: float((verts[v] - A[k]) @ d[k]))
        for u, v in zip(ids[:-1], ids[1:]):
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            tags = edge_map.setdefault(key, set())
            if segs[k][2] is not None:
                tags.add(segs[k][2])

    keys = sorted(edge_map)
    edges = np.array(keys, dtype=int).reshape(-1, 2)
    used = np.unique(edges)
    remap = -np.ones(len(verts), dtype=int)
    remap[used] = np.arange(len(used))
    verts = verts[used]
    edges = remap[edges]
    tags = [frozenset(edge_map[k]) for k in keys]
    return _assemble(verts, edges, tags)


def _assemble(verts, edges, tags) -> Arrangement:
    E = len(edges)
    V = len(verts)
    he_orig = np.empty(2 * E, dtype=int)
    he_orig[0::2] = edges[:, 0]
    he_orig[1::2] = edges[:, 1]
    he_dest = np.empty(2 * E, dtype=int)
    he_dest[0::2] = edges[:, 1]
    he_dest[1::2] = edges[:, 0]
    vec = verts[he_dest] - verts[he_orig]
    ang = np.arctan2(vec[:, 1], vec[:, 0])

    out = [[] for _ in range(V)]
    for h in np.argsort(ang, kind="stable").tolist():
        out[he_orig[h]].append(h)
    rank = np.empty(2 * E, dtype=int)
    for lst in out:
        for r, h in enumerate(lst):
            rank[h] = r

    he_next = np.empty(2 * E, dtype=int)
    for h in range(2 * E):
        t = h ^ 1
        lst = out[he_orig[t]]
        he_next[h] = lst[(rank[t] - 1) % len(lst)]

    # connected components of the edge graph
    dsu = _DSU(V)
    for u, v in edges.tolist():
        dsu.union(u, v)
    comp_of = np.array([dsu.find(v) for v in range(V)])
    n_comp = len(set(comp_of.tolist()))

    cycle_of = -np.ones(2 * E, dtype=int)
    cycles = []
    for h0 in range(2 * E):
        if cycle_of[h0] >= 0:
            continue
        cyc = []
        h = h0
        while cycle_of[h] < 0:
            cycle_of[h] = len(cycles)
            cyc.append(h)
            h = he_next[h]
        cycles.append(cyc)

    cyc_vertices = [he_orig[c].tolist() for c in cycles]
    cyc_area = [signed_area(verts[v]) if len(v) > 2 else 0.0 for v in cyc_vertices]
    # every component has exactly one outer cycle: the one of least signed area
    # (a tree's only cycle has zero area up to rounding)
    outer_of = {}
    for k, cyc in enumerate(cyc_vertices):
        c = comp_of[cyc[0]]
        if c not in outer_of or cyc_area[k] < cyc_area[outer_of[c]]:
            outer_of[c] = k
    neg_ids = sorted(outer_of.values())
    pos_ids = [k for k in range(len(cycles)) if k not in set(neg_ids)]

    faces = []
    cyc_face = -np.ones(len(cycles), dtype=int)
    for k in pos_ids:
        cyc_face[k] = len(faces)
        faces.append(Face(cyc_vertices[k], [], cyc_area[k], None))
    unbounded = len(faces)
    faces.append(Face(None, [], math.inf, None))

    for k in neg_ids:
        v0 = cyc_vertices[k][0]
        comp = comp_of[v0]
        probe = verts[v0][None, :]
        host, host_area = unbounded, math.inf
        for q in pos_ids:
            if comp_of[cyc_vertices[q][0]] == comp:
                continue
            if cyc_area[q] < host_area and winding_many(verts[cyc_vertices[q]], probe)[0] != 0:
                host, host_area = cyc_face[q], cyc_area[q]
        cyc_face[k] = host
        faces[host].holes.append(cyc_vertices[k])
        if host != unbounded:
            faces[host].area += cyc_area[k]

    he_face = cyc_face[cycle_of]
    for k, f in enumerate(faces):
        if f.outer is None:
            ext = verts.max(axis=0) if V else np.zeros(2)
            f.sample = ext + 1.0
        else:
            rings = [verts[f.outer]] + [verts[h] for h in f.holes]
            f.sample = _face_sample(rings)

    edge_faces = np.stack([he_face[0::2], he_face[1::2]], axis=1) if E else np.zeros((0, 2), int)
    elen = np.hypot(*(verts[edges[:, 1]] - verts[edges[:, 0]]).T) if E else np.zeros(0)
    return Arrangement(
        vertices=verts, edges=edges, edge_len=elen, edge_tags=tags, faces=faces,
        edge_faces=edge_faces, unbounded=unbounded, n_components=n_comp,
        he_next=he_next, he_face=he_face,
    )


def polygon_segments(poly, tag: Hashable = None):
    P = as_points(poly)
    return [(P[k], P[(k + 1) % len(P)], tag) for k in range(len(P))]


def build_arrangement(domain, network=None, eps: float = EPS_GEO) -> Arrangement:
    """Faces of ``domain`` cut by a straight-line network, plus the outer face.

    ``network`` is anything exposing ``segments()`` (pairs of points) or a
    plain list of segments.  Network edges may touch only at endpoints.
    """
    net_segs = []
    if network is not None:
        raw = network.segments() if hasattr(network, "segments") else network
        net_segs = [(as_point(a), as_point(b)) for a, b in raw]
    for i in range(len(net_segs)):
        for j in range(i + 1, len(net_segs)):
            hit = segment_intersect(net_segs[i], net_segs[j], eps)
            if hit.kind in ("point", "overlap"):
                raise InvalidNetworkError(
                    f"network edges {i} and {j} cross away from a shared endpoint"
                )
    segs = polygon_segments(domain, "domain") + [(a, b, "network") for a, b in net_segs]
    return build_segment_arrangement(segs, eps)
