"""Admissible cut systems and the m-sheeted covering they define.

Sheet bookkeeping convention.  A point of the covering over ``x`` is named by
its sheet index in the chart that removes the Sigma cuts (the "D chart").  On
the outer region O the two charts agree; on the region I_i enclosed by
Sigma_i and Sigma'_i the D sheet ``j`` is glued to the other chart's sheet
``j + i``.  Consequently a path crossing Sigma_i from O into I_i moves from D
sheet ``k`` to D sheet ``k - i`` (mod m), and crossing any Sigma' cut leaves
the D sheet unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import (
    EPS_GEO,
    GeometryError,
    Polyline,
    as_point,
    as_points,
    cross,
    diameter,
    dilate,
    is_convex_position,
    point_segment_distance,
    segment_intersect,
    signed_area,
    winding_many,
)


class CoveringError(GeometryError):
    pass


class NonTransversalError(CoveringError):
    pass


@dataclass(frozen=True, eq=False)
class PointConfig:
    """Terminals p_1..p_m in cyclic order (stored 0-based)."""

    points: np.ndarray

    def __post_init__(self):
        p = as_points(self.points)
        if len(p) < 2:
            raise GeometryError("need at least two terminals")
        d = np.hypot(*(p[:, None, :] - p[None, :, :]).transpose(2, 0, 1))
        np.fill_diagonal(d, np.inf)
        if d.min() <= EPS_GEO:
            raise GeometryError("terminals must be pairwise distinct")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def m(self) -> int:
        return len(self.points)

    def __len__(self):
        return self.m

    def __getitem__(self, k):
        return self.points[k]

    def is_convex(self) -> bool:
        return is_convex_position(self.points)

    def orientation(self) -> int:
        if self.m == 2:
            return 1
        return 1 if signed_area(self.points) > 0 else -1

    def transformed(self, R=None, t=(0.0, 0.0)) -> "PointConfig":
        R = np.eye(2) if R is None else np.asarray(R, float)
        return PointConfig(self.points @ R.T + np.asarray(t, float))


@dataclass(frozen=True, eq=False)
class CutSystem:
    sigma: tuple
    sigma_prime: tuple
    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "sigma_prime", tuple(self.sigma_prime))
        object.__setattr__(self, "omega", as_points(self.omega))

    def segments(self):
        """Tagged segments: ``("sigma", i)`` / ``("sigmap", i)``, i 1-based."""
        out = []
        for i, c in enumerate(self.sigma, start=1):
            out += [(a, b, ("sigma", i)) for a, b in c.segments()]
        for i, c in enumerate(self.sigma_prime, start=1):
            out += [(a, b, ("sigmap", i)) for a, b in c.segments()]
        return out


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)

    def add(self, name, ok, msg=None):
        ok0, msgs = self.checks.get(name, (True, []))
        if not ok and msg:
            msgs = msgs + [msg]
        self.checks[name] = (ok0 and ok, msgs)

    @property
    def ok(self) -> bool:
        return all(v[0] for v in self.checks.values())

    def failed(self):
        return [k for k, v in self.checks.items() if not v[0]]

    def __str__(self):
        lines = []
        for k, (ok, msgs) in self.checks.items():
            lines.append(f"({k}) {'pass' if ok else 'FAIL'}" + (": " + "; ".join(msgs) if msgs else ""))
        return "\n".join(lines)


def _is_terminal(p, pts, eps=EPS_GEO):
    return bool(np.min(np.hypot(*(pts - p).T)) <= eps)


def _curve_hits(c1: Polyline, c2: Polyline):
    """All intersection pieces between two polylines."""
    hits = []
    for s in c1.segments():
        for t in c2.segments():
            h = segment_intersect(s, t)
            if h:
                hits.append(h)
    return hits


def _point_in_convex(poly, p, eps=EPS_GEO) -> bool:
    n = len(poly)
    sgn = 1.0 if signed_area(poly) > 0 else -1.0
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        if sgn * cross(b - a, p - a) < -eps * np.hypot(*(b - a)):
            return False
    return True


def validate_cuts(config: PointConfig, cuts: CutSystem) -> ValidationReport:
    rep = ValidationReport()
    P = config.points
    m = config.m
    for name in ("a", "b", "c", "i", "ii", "omega"):
        rep.add(name, True)
    for fam, curves in (("sigma", cuts.sigma), ("sigma'", cuts.sigma_prime)):
        if len(curves) != m - 1:
            rep.add("a", False, f"{fam}: expected {m - 1} curves, got {len(curves)}")
            return rep
        for i, c in enumerate(curves):
            ends_ok = (
                np.hypot(*(c.start - P[i])) <= EPS_GEO and np.hypot(*(c.end - P[i + 1])) <= EPS_GEO
            )
            if not ends_ok:
                rep.add("a", False, f"{fam}_{i + 1} does not run p{i + 1} -> p{i + 2}")
            if not c.is_simple():
                rep.add("a", False, f"{fam}_{i + 1} is not simple")
        for i in range(m - 1):
            for j in range(i + 1, m - 1):
                hits = _curve_hits(curves[i], curves[j])
                if j == i + 1:
                    bad = [h for h in hits if h.kind == "overlap"
                           or np.hypot(*(h.point - P[i + 1])) > EPS_GEO]
                    if bad:
                        rep.add("b", False, f"{fam}_{i + 1} meets {fam}_{j + 1} away from p{i + 2}")
                elif hits:
                    rep.add("c", False, f"{fam}_{i + 1} meets {fam}_{j + 1}")
    for i, s in enumerate(cuts.sigma):
        for j, t in enumerate(cuts.sigma_prime):
            for h in _curve_hits(s, t):
                if h.kind == "overlap" or not _is_terminal(h.point, P):
                    rep.add("i", False, f"sigma_{i + 1} meets sigma'_{j + 1} outside S")
                    break
    if rep.checks["a"][0]:
        for i in range(1, m - 1):
            ok = _local_order_ok(P[i], cuts.sigma[i - 1], cuts.sigma[i],
                                 cuts.sigma_prime[i - 1], cuts.sigma_prime[i])
            if not ok:
                rep.add("ii", False, f"sigma arcs at p{i + 1} are separated by sigma' arcs")
    om = cuts.omega
    for c in list(cuts.sigma) + list(cuts.sigma_prime):
        if not all(_point_in_convex(om, v) for v in c.vertices):
            rep.add("omega", False, "a cut leaves Omega")
            break
    if not _point_in_convex(om, P.mean(axis=0)) or not all(_point_in_convex(om, p) for p in P):
        rep.add("omega", False, "Omega does not contain the terminals")
    return rep


def _local_order_ok(p, s_in, s_out, t_in, t_out) -> bool:
    # directions of the four arcs leaving p
    dirs = [
        ("s", s_in.vertices[-2] - p),
        ("s", s_out.vertices[1] - p),
        ("t", t_in.vertices[-2] - p),
        ("t", t_out.vertices[1] - p),
    ]
    angs = [math.atan2(d[1], d[0]) for _, d in dirs]
    order = sorted(range(4), key=lambda k: angs[k])
    sa = sorted(angs)
    if min((sa[(k + 1) % 4] - sa[k]) % (2 * math.pi) for k in range(4)) < 1e-12:
        return False
    kinds = [dirs[k][0] for k in order]
    # the two sigma arcs must be cyclically adjacent
    return any(kinds[k] == "s" and kinds[(k + 1) % 4] == "s" for k in range(4))


def outward_normal(a, b, orientation: int = 1) -> np.ndarray:
    d = as_point(b) - as_point(a)
    n = np.array([d[1], -d[0]]) / np.hypot(*d)
    return n * orientation


def canonical_cuts(config: PointConfig, bulge: float = 0.1, margin: float = 0.2) -> CutSystem:
    """Sigma' along the polygon sides, Sigma bent outward over each side.

    ``bulge`` is the apex height as a fraction of the side length; Omega is
    Conv(S) dilated by ``margin`` times the diameter.
    """
    P = config.points
    if config.m > 2 and not config.is_convex():
        # sheets can still be built from a network (see sheets.relabel_terminals)
        raise CoveringError(
            "terminals are not in strictly convex position; canonical cuts need a "
            "convex cyclic order -- relabel along the network boundary instead"
        )
    o = config.orientation()
    sigma, sigmap = [], []
    for i in range(config.m - 1):
        a, b = P[i], P[i + 1]
        apex = 0.5 * (a + b) + bulge * np.hypot(*(b - a)) * outward_normal(a, b, o)
        sigma.append(Polyline(np.array([a, apex, b])))
        sigmap.append(Polyline(np.array([a, b])))
    omega = dilate(P, margin * diameter(P))
    return CutSystem(sigma, sigmap, omega)


@dataclass(frozen=True)
class SheetPermutation:
    """Bijection of {1..m}; ``mapping[k-1]`` is the image of sheet k."""

    mapping: tuple

    def __post_init__(self):
        mp = tuple(int(x) for x in self.mapping)
        if sorted(mp) != list(range(1, len(mp) + 1)):
            raise ValueError(f"not a permutation: {mp}")
        object.__setattr__(self, "mapping", mp)

    @classmethod
    def identity(cls, m):
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def shift(cls, m, s):
        return cls(tuple(((k - 1 + s) % m) + 1 for k in range(1, m + 1)))

    @property
    def m(self):
        return len(self.mapping)

    def __call__(self, k):
        return self.mapping[k - 1]

    def then(self, other: "SheetPermutation") -> "SheetPermutation":
        """Apply ``self`` first, then ``other``."""
        return SheetPermutation(tuple(other(self(k)) for k in range(1, self.m + 1)))

    def is_identity(self):
        return self.mapping == tuple(range(1, self.m + 1))

    def cycles(self):
        seen, out = set(), []
        for k in range(1, self.m + 1):
            if k in seen:
                continue
            cyc, j = [], k
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self(j)
            out.append(tuple(cyc))
        return out

    def is_transitive(self):
        return len(self.cycles()) == 1


@dataclass(frozen=True, eq=False)
class CoveringSpace:
    config: PointConfig
    cuts: CutSystem
    lens_rings: tuple
    lens_ccw: tuple

    @property
    def m(self):
        return self.config.m

    @property
    def shift_table(self) -> dict:
        tab = {"O": 0}
        tab.update({f"I{i}": i for i in range(1, self.m)})
        return tab

    def region_index(self, pts) -> np.ndarray:
        """Sum of i over the regions I_i containing each point (0 on O)."""
        pts = as_points(pts)
        r = np.zeros(len(pts), dtype=int)
        for i, ring in enumerate(self.lens_rings, start=1):
            r += i * (winding_many(ring, pts) != 0)
        return r

    def transfer(self, k: int, r_from: int, r_to: int) -> int:
        """D-sheet reached from sheet ``k`` when crossing a Sigma edge."""
        return ((k - 1 + r_from - r_to) % self.m) + 1

    def segments(self):
        return self.cuts.segments()


def build_covering(config: PointConfig, cuts: CutSystem) -> CoveringSpace:
    rep = validate_cuts(config, cuts)
    if not rep.ok:
        raise CoveringError("invalid cuts:\n" + str(rep))
    rings, ccw = [], []
    for s, t in zip(cuts.sigma, cuts.sigma_prime):
        ring = np.vstack([s.vertices[:-1], t.vertices[::-1][:-1]])
        rings.append(ring)
        ccw.append(signed_area(ring) > 0)
    return CoveringSpace(config, cuts, tuple(rings), tuple(ccw))


def monodromy(cov: CoveringSpace, loop) -> SheetPermutation:
    """Sheet permutation produced by lifting a closed polyline."""
    L = loop if isinstance(loop, Polyline) else Polyline(as_points(loop))
    if not L.closed:
        raise CoveringError("loop must be closed")
    m = cov.m
    cut_vertices = np.vstack([c.vertices for c in cov.cuts.sigma] + [cov.config.points])
    for a, b in L.segments():
        for v in cut_vertices:
            if point_segment_distance(v, a, b) <= EPS_GEO:
                raise NonTransversalError("loop passes through a terminal or cut vertex")
    shift = 0
    for a, b in L.segments():
        for i, s in enumerate(cov.cuts.sigma, start=1):
            for c, d in s.segments():
                h = segment_intersect((a, b), (c, d))
                if not h:
                    continue
                if h.kind != "point":
                    raise NonTransversalError("loop runs along a cut")
                for v in (a, b):
                    if point_segment_distance(v, c, d) <= EPS_GEO:
                        raise NonTransversalError("loop vertex lies on a cut")
                to_left = cross(d - c, b - a) > 0
                entering = to_left == cov.lens_ccw[i - 1]
                shift += -i if entering else i
    return SheetPermutation.shift(m, shift)


def circle_loop(center, radius, n=64) -> Polyline:
    c = as_point(center)
    t = (np.arange(n + 1) % n) * 2 * np.pi / n + 0.123
    return Polyline(c + radius * np.stack([np.cos(t), np.sin(t)], axis=1))
