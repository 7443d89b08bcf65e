"""Exact Steiner trees for small terminal sets by full topology enumeration."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .covering import PointConfig
from .geom import EPS_GEO, GeometryError, as_points

M_MAX = 8
MOVE_TOL = 1e-13
MAX_SWEEPS = 100_000
COLLAPSE_TOL = 1e-9
TIE_TOL = 1e-9
ANGLE_TOL = 1e-6


class SizeError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, msg, residual):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class TopologyError(ValueError):
    pass


def _thread_count():
    """STEINER_COVER_THREADS, with 0 meaning one worker per CPU."""
    try:
        n = int(os.environ.get("STEINER_COVER_THREADS", "1"))
    except ValueError:
        return 1
    return (os.cpu_count() or 1) if n == 0 else max(1, n)


# ---------------------------------------------------------------- topologies


@dataclass(frozen=True)
class SteinerTopology:
    """Tree on terminals ``0..m-1`` and Steiner vertices ``m..m+k-1``."""

    m: int
    k: int
    edges: tuple

    def __post_init__(self):
        es = tuple(sorted(tuple(sorted(map(int, e))) for e in self.edges))
        object.__setattr__(self, "edges", es)
        n = self.m + self.k
        if len(es) != n - 1:
            raise TopologyError("a tree on n vertices has n-1 edges")
        deg = [0] * n
        for a, b in es:
            if a == b or not (0 <= a < n and 0 <= b < n):
                raise TopologyError(f"bad edge {(a, b)}")
            deg[a] += 1
            deg[b] += 1
        if any(d != 3 for d in deg[self.m:]):
            raise TopologyError("Steiner vertices must have degree 3")
        if any(d < 1 for d in deg[: self.m]):
            raise TopologyError("terminals must have degree >= 1")
        if len(_components(n, es)) != 1:
            raise TopologyError("topology is not connected")

    @property
    def n(self):
        return self.m + self.k

    @cached_property
    def adjacency(self):
        adj = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(x)) for x in adj)

    def degree(self, v):
        return len(self.adjacency[v])

    @cached_property
    def key(self) -> str:
        """Canonical form up to relabelling of Steiner vertices."""
        return _encode(self.adjacency, 0, -1, self.m)

    @property
    def is_full(self) -> bool:
        return all(self.degree(t) == 1 for t in range(self.m))

    def split(self, edge):
        """Terminal sets (0-based) on the two sides of ``edge``."""
        a, b = edge
        side = _reach(self.adjacency, a, b)
        left = frozenset(v for v in side if v < self.m)
        return left, frozenset(range(self.m)) - left

    def edge_splits(self):
        return {e: self.split(e) for e in self.edges}

    def is_cyclic_compatible(self) -> bool:
        """Whether the tree can be drawn without crossings inside a convex
        polygon whose vertices are the terminals in the order 0..m-1."""
        return all(_is_interval(s, self.m) for e in self.edges for s in self.split(e))

    def __str__(self):
        lab = lambda v: f"p{v + 1}" if v < self.m else f"s{v - self.m + 1}"
        return " ".join(f"{lab(a)}-{lab(b)}" for a, b in self.edges)


def _components(n, edges):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    return {find(v) for v in range(n)}


def _reach(adj, start, blocked):
    """Vertices reachable from ``start`` without using the edge to ``blocked``."""
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if (v == start and w == blocked) or w in seen:
                continue
            seen.add(w)
            stack.append(w)
    return seen


def _is_interval(s, m) -> bool:
    if not s or len(s) == m:
        return True
    inside = [k in s for k in range(m)]
    starts = sum(1 for k in range(m) if inside[k] and not inside[k - 1])
    return starts == 1


def _encode(adj, v, parent, m):
    kids = sorted(_encode(adj, w, v, m) for w in adj[v] if w != parent)
    head = str(v) if v < m else "S"
    return head + ("(" + ",".join(kids) + ")" if kids else "")


def _relabel(m_new, k, edges, m_old):
    """Shift Steiner indices after inserting a terminal."""
    f = lambda v: v if v < m_old else v + (m_new - m_old)
    return [(f(a), f(b)) for a, b in edges]


def _extend(top: SteinerTopology, max_terminal_degree: int):
    m, k = top.m, top.k
    t = m  # new terminal index before Steiner shift
    base = _relabel(m + 1, k, top.edges, m)
    n_new = m + 1 + k
    deg = [0] * n_new
    for a, b in base:
        deg[a] += 1
        deg[b] += 1
    out = []
    for i, (a, b) in enumerate(base):
        rest = base[:i] + base[i + 1:]
        s = n_new  # new Steiner vertex
        out.append(SteinerTopology(m + 1, k + 1, rest + [(a, s), (b, s), (t, s)]))
        out.append(SteinerTopology(m + 1, k, rest + [(a, t), (b, t)]))
    for v in range(m):
        if deg[v] < max_terminal_degree:
            out.append(SteinerTopology(m + 1, k, base + [(v, t)]))
    if max_terminal_degree >= 3:
        for s in range(m + 1, n_new):
            es = [tuple(t if x == s else (x - 1 if x > s else x) for x in e) for e in base]
            out.append(SteinerTopology(m + 1, k - 1, es))
    return out


def enumerate_topologies(m: int, adjacency_filter=None, max_terminal_degree: int = 3):
    """All trees on labelled terminals with degree-3 Steiner vertices.

    Terminals of degree above 3 are excluded by default: such vertices have
    an angle below 120 degrees and never occur in a shortest network.
    """
    if not isinstance(m, (int, np.integer)) or not 2 <= m <= M_MAX:
        raise SizeError(f"m must be in [2, {M_MAX}], got {m}")
    first = SteinerTopology(2, 0, [(0, 1)])
    level = {first.key: first}
    for _ in range(2, m):
        nxt = {}
        for top in level.values():
            for t in _extend(top, max_terminal_degree):
                nxt.setdefault(t.key, t)
        level = nxt
    tops = sorted(level.values(), key=lambda t: (t.k, t.key))
    if adjacency_filter is not None:
        tops = [t for t in tops if adjacency_filter(t)]
    return tops


# ------------------------------------------------------------------ networks


@dataclass(frozen=True, eq=False)
class Network:
    terminals: PointConfig
    steiner_points: np.ndarray
    edges: tuple
    topology: SteinerTopology | None = None
    degenerate: bool = False
    class_t: bool = True

    def __post_init__(self):
        sp = as_points(self.steiner_points) if len(self.steiner_points) else np.zeros((0, 2))
        sp.setflags(write=False)
        object.__setattr__(self, "steiner_points", sp)
        object.__setattr__(self, "edges", tuple(tuple(sorted(map(int, e))) for e in self.edges))
        n = self.n
        if any(not (0 <= a < n and 0 <= b < n) or a == b for a, b in self.edges):
            raise GeometryError("edge refers to an unknown vertex")
        if len(_components(n, self.edges)) != 1:
            raise GeometryError("network is not connected")
        if self.class_t and len(self.edges) != n - 1:
            raise GeometryError("class-T network must be a tree")
        if np.any(self.edge_lengths <= EPS_GEO):
            raise GeometryError("zero-length edge")

    @property
    def m(self):
        return self.terminals.m

    @property
    def n(self):
        return self.m + len(self.steiner_points)

    @cached_property
    def vertices(self) -> np.ndarray:
        return np.vstack([self.terminals.points, self.steiner_points])

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        V = self.vertices
        e = np.array(self.edges, dtype=int).reshape(-1, 2)
        return np.hypot(*(V[e[:, 0]] - V[e[:, 1]]).T)

    @property
    def length(self) -> float:
        return float(self.edge_lengths.sum())

    def degree(self, v):
        return sum(v in e for e in self.edges)

    def segments(self):
        V = self.vertices
        return [(V[a], V[b]) for a, b in self.edges]

    def neighbors(self, v):
        return sorted(b if a == v else a for a, b in self.edges if v in (a, b))

    def angle_report(self):
        """Smallest angle between consecutive edges at each vertex of degree >= 2."""
        V = self.vertices
        out = {}
        for v in range(self.n):
            nb = self.neighbors(v)
            if len(nb) < 2:
                continue
            ang = sorted(math.atan2(*(V[w] - V[v])[::-1]) for w in nb)
            gaps = [(ang[(i + 1) % len(ang)] - ang[i]) % (2 * math.pi) for i in range(len(ang))]
            out[v] = min(gaps)
        return out

    def check_regularity(self, tol=ANGLE_TOL):
        """Steiner points: three 120 degree angles; terminals: angles >= 120."""
        bad = []
        for v, a in self.angle_report().items():
            if v >= self.m:
                if self.degree(v) != 3 or abs(a - 2 * math.pi / 3) > tol:
                    bad.append(v)
            elif a < 2 * math.pi / 3 - tol:
                bad.append(v)
        return bad

    def geometry_key(self, digits=7):
        """Hashable description of the drawn set, independent of vertex order."""
        segs = []
        for a, b in self.segments():
            pa = tuple(np.round(a, digits) + 0.0)
            pb = tuple(np.round(b, digits) + 0.0)
            segs.append(tuple(sorted([pa, pb])))
        return tuple(sorted(segs))

    def transformed(self, R=None, t=(0.0, 0.0)):
        R = np.eye(2) if R is None else np.asarray(R, float)
        sp = self.steiner_points @ R.T + np.asarray(t, float) if len(self.steiner_points) else self.steiner_points
        return Network(self.terminals.transformed(R, t), sp, self.edges, self.topology,
                       self.degenerate, self.class_t)

    def to_dict(self):
        return {
            "steiner_points": self.steiner_points.tolist(),
            "edges": [list(e) for e in self.edges],
            "length": self.length,
        }

    def __repr__(self):
        return f"Network(m={self.m}, steiner={len(self.steiner_points)}, length={self.length:.12g})"


def network_from_segments(config: PointConfig, segments, eps=EPS_GEO) -> Network:
    """Network whose vertices are the terminals plus all other segment endpoints."""
    P = config.points
    extra = []
    idx = []
    for a, b in segments:
        pair = []
        for p in (np.asarray(a, float), np.asarray(b, float)):
            d = np.hypot(*(P - p).T)
            if d.min() <= eps:
                pair.append(int(d.argmin()))
                continue
            for j, q in enumerate(extra):
                if np.hypot(*(q - p)) <= eps:
                    pair.append(config.m + j)
                    break
            else:
                extra.append(p)
                pair.append(config.m + len(extra) - 1)
        idx.append(tuple(pair))
    sp = np.array(extra) if extra else np.zeros((0, 2))
    return Network(config, sp, idx, class_t=len(idx) == config.m + len(extra) - 1)


# -------------------------------------------------------------- optimization


def fermat_points(A, B, C):
    """Fermat-Torricelli points of many triangles (rows of A, B, C)."""
    A, B, C = (np.asarray(x, float) for x in (A, B, C))
    a = np.hypot(*(B - C).T)
    b = np.hypot(*(C - A).T)
    c = np.hypot(*(A - B).T)

    def angle(opp, s1, s2):
        den = 2 * s1 * s2
        with np.errstate(invalid="ignore", divide="ignore"):
            cosv = np.where(den > 0, (s1**2 + s2**2 - opp**2) / np.where(den > 0, den, 1), 1.0)
        return np.arccos(np.clip(cosv, -1, 1))

    alpha, beta, gamma = angle(a, b, c), angle(b, c, a), angle(c, a, b)
    third = math.pi / 3
    with np.errstate(divide="ignore", invalid="ignore"):
        wa = a / np.sin(alpha + third)
        wb = b / np.sin(beta + third)
        wc = c / np.sin(gamma + third)
        tot = wa + wb + wc
        F = (wa[:, None] * A + wb[:, None] * B + wc[:, None] * C) / tot[:, None]
    big = 2 * math.pi / 3 - 1e-15
    tiny = 1e-15
    F = np.where((alpha >= big)[:, None], A, F)
    F = np.where((beta >= big)[:, None], B, F)
    F = np.where((gamma >= big)[:, None], C, F)
    # two coincident neighbours attract the point onto them
    F = np.where(((b <= tiny) | (c <= tiny))[:, None] & ~(a <= tiny)[:, None], A, F)
    F = np.where(((a <= tiny))[:, None], B, F)
    bad = ~np.isfinite(F).all(axis=1)
    F[bad] = ((A + B + C) / 3)[bad]
    return F


@dataclass
class OptimizedTopology:
    topology: SteinerTopology
    network: Network
    length: float
    degenerate: bool
    sweeps: int
    raw_points: np.ndarray = field(repr=False)
    converged: bool = True


def _initial_points(top: SteinerTopology, P: np.ndarray) -> np.ndarray:
    """Barycentric (Tutte) placement: each Steiner point at the mean of its neighbours."""
    k, m = top.k, top.m
    if k == 0:
        return np.zeros((0, 2))
    L = np.zeros((k, k))
    rhs = np.zeros((k, 2))
    for s in range(k):
        v = m + s
        for w in top.adjacency[v]:
            L[s, s] += 1
            if w >= m:
                L[s, w - m] -= 1
            else:
                rhs[s] += P[w]
    return np.linalg.solve(L, rhs)


def embed_topology(top: SteinerTopology, config: PointConfig) -> Network:
    """Tutte embedding: terminals fixed, Steiner points at neighbour means."""
    X = _initial_points(top, config.points)
    return Network(config, X, top.edges, top)


def _batch_optimize(tops, P, max_sweeps):
    """Gauss-Seidel Fermat sweeps for many topologies at once."""
    m = len(P)
    T = len(tops)
    kmax = max(t.k for t in tops)
    X = np.zeros((T, kmax + m, 2))
    nb = np.zeros((T, kmax, 3), dtype=int)
    for i, t in enumerate(tops):
        X[i, :m] = P
        # Steiner s lives at row m + s
        X[i, m:m + t.k] = _initial_points(t, P)
        for s in range(t.k):
            nb[i, s] = t.adjacency[m + s]
    ks = np.array([t.k for t in tops])
    rows = np.arange(T)
    active = np.ones(T, bool)
    sweeps = np.zeros(T, int)
    move = np.full(T, np.inf)
    for it in range(max_sweeps):
        idx = rows[active]
        if len(idx) == 0:
            break
        mv = np.zeros(len(idx))
        for s in range(kmax):
            sel = idx[ks[idx] > s]
            if len(sel) == 0:
                continue
            n3 = nb[sel, s]
            A = X[sel, n3[:, 0]]
            B = X[sel, n3[:, 1]]
            C = X[sel, n3[:, 2]]
            F = fermat_points(A, B, C)
            d = np.hypot(*(F - X[sel, m + s]).T)
            X[sel, m + s] = F
            pos = np.searchsorted(idx, sel)
            mv[pos] = np.maximum(mv[pos], d)
        sweeps[idx] += 1
        move[idx] = mv
        active[idx[mv < MOVE_TOL]] = False
    return X[:, m:], sweeps, move, active


def _contract(top: SteinerTopology, P, S, tol=COLLAPSE_TOL):
    """Merge Steiner points that sit on a neighbour; returns points and edges."""
    m = top.m
    V = np.vstack([P, S])
    n = len(V)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    collapsed = False
    for a, b in top.edges:
        if np.hypot(*(V[a] - V[b])) <= tol and (a >= m or b >= m):
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            # terminals absorb Steiner points
            if rb < m:
                ra, rb = rb, ra
            parent[rb] = ra
            collapsed = True
    if not collapsed:
        return S, list(top.edges), False
    roots = sorted({find(v) for v in range(m, n)} - set(range(m)))
    ren = {r: m + j for j, r in enumerate(roots)}
    rep = lambda v: find(v) if find(v) < m else ren[find(v)]
    edges = sorted({tuple(sorted((rep(a), rep(b)))) for a, b in top.edges if find(a) != find(b)})
    S2 = np.array([V[r] for r in roots]) if roots else np.zeros((0, 2))
    return S2, edges, True


def dual_lower_bound(top: SteinerTopology, P, S) -> float:
    """Certified lower bound on the shortest network with topology ``top``.

    Edge directions at the current Steiner positions are projected onto the
    force-balance subspace at Steiner points and scaled into the unit ball;
    by weak duality the resulting value bounds the fixed-topology minimum.
    """
    m = top.m
    V = np.vstack([P, S]) if len(S) else np.asarray(P, float)
    E = np.array(top.edges, dtype=int)
    d = V[E[:, 0]] - V[E[:, 1]]
    L = np.hypot(*d.T)
    y = d / np.maximum(L, 1e-300)[:, None]
    if top.k:
        A = np.zeros((top.k, len(E)))
        for j, (a, b) in enumerate(E):
            if a >= m:
                A[a - m, j] += 1
            if b >= m:
                A[b - m, j] -= 1
        y = y - A.T @ np.linalg.lstsq(A @ A.T, A @ y, rcond=None)[0]
    y /= max(1.0, float(np.hypot(*y.T).max()))
    return float((y * d).sum())


def optimize_topologies(tops, config: PointConfig, max_sweeps=MAX_SWEEPS, strict=True):
    P = config.points
    if not tops:
        return []
    full = [t for t in tops if t.k > 0]
    results = {}
    for t in tops:
        if t.k == 0:
            net = Network(config, np.zeros((0, 2)), t.edges, t)
            results[t.key] = OptimizedTopology(t, net, net.length, False, 0, np.zeros((0, 2)), True)
    if full:
        threads = _thread_count()
        chunks = [full[i::threads] for i in range(threads)] if threads > 1 else [full]
        chunks = [c for c in chunks if c]
        if len(chunks) > 1:
            with ThreadPoolExecutor(len(chunks)) as ex:
                outs = list(ex.map(lambda c: (c, _batch_optimize(c, P, max_sweeps)), chunks))
        else:
            outs = [(full, _batch_optimize(full, P, max_sweeps))]
        for chunk, (S, sweeps, move, active) in outs:
            for i, t in enumerate(chunk):
                if active[i] and strict:
                    raise ConvergenceError(f"topology {t} did not converge", move[i])
                pts = S[i, : t.k].copy()
                S2, edges, deg = _contract(t, P, pts)
                net = Network(config, S2, edges, t, degenerate=deg)
                results[t.key] = OptimizedTopology(
                    t, net, net.length, deg, int(sweeps[i]), pts, not active[i]
                )
    return [results[t.key] for t in tops]


def optimize_topology(top: SteinerTopology, config: PointConfig, max_sweeps=MAX_SWEEPS):
    """Shortest network with the given topology; returns ``(network, length)``."""
    if top.m != config.m:
        raise TopologyError("topology and configuration disagree on m")
    r = optimize_topologies([top], config, max_sweeps)[0]
    return r.network, r.length


@dataclass
class SteinerResult:
    network: Network
    length: float
    minimizers: list
    n_topologies: int
    n_pruned: int = 0

    def __iter__(self):
        yield self.network
        yield self.length


FIRST_STAGE_SWEEPS = 5000


def steiner_tree(config: PointConfig, tie_tol=TIE_TOL) -> SteinerResult:
    """Global minimum over all topologies, with every co-minimizer.

    Topologies still moving after a first batch of sweeps are discarded only
    when their dual lower bound exceeds the incumbent; the rest are iterated
    to the full sweep cap.
    """
    if config.m > M_MAX:
        raise SizeError(f"m must be <= {M_MAX}")
    if config.m == 2:
        net = Network(config, np.zeros((0, 2)), [(0, 1)])
        return SteinerResult(net, net.length, [net], 1)
    tops = enumerate_topologies(config.m)
    res = optimize_topologies(tops, config, FIRST_STAGE_SWEEPS, strict=False)
    best = min(r.length for r in res if r.converged)
    pruned, retry = 0, []
    for r in res:
        if r.converged:
            continue
        if dual_lower_bound(r.topology, config.points, r.raw_points) > best + tie_tol:
            pruned += 1
        else:
            retry.append(r.topology)
    again = {r.topology.key: r for r in optimize_topologies(retry, config)}
    res = [again.get(r.topology.key, r) for r in res if r.converged or r.topology.key in again]
    res.sort(key=lambda r: (r.length, r.topology.key))
    best = res[0].length
    seen, mins = set(), []
    for r in res:
        if r.length > best + tie_tol:
            break
        g = r.network.geometry_key()
        if g not in seen:
            seen.add(g)
            mins.append(r.network)
    return SteinerResult(mins[0], best, mins, len(tops), pruned)


def minimum_spanning_length(points) -> float:
    from scipy.sparse.csgraph import minimum_spanning_tree
    from scipy.spatial.distance import cdist

    P = as_points(points)
    return float(minimum_spanning_tree(cdist(P, P)).sum())
