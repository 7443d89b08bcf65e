"""Families of competitors with prescribed vanishing interfaces.

A family F(J) collects the constrained sets whose (i, j) interfaces vanish
for every pair in J.  For terminals in convex position the labels 1..m sit
on the hull edges in cyclic order, a nonvanishing (i, j) interface forces
every interleaved pair to vanish, and the nonvanishing diagonal pairs of a
class-T network never cross.  Every such network therefore lies in the
family of some triangulation of the label polygon, which is how the derived
lists below are generated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .covering import CoveringSpace, PointConfig, build_covering, canonical_cuts
from .geom import GeometryError
from .sheets import ClassTError, ConstructionError, SheetedSet, network_to_sheeted_set
from .steiner import (
    Network,
    SteinerTopology,
    embed_topology,
    enumerate_topologies,
    network_from_segments,
    optimize_topologies,
)


class EmptyFamilyError(ValueError):
    pass


class IncompleteCertificateError(RuntimeError):
    """A driver stage failed; ``stage`` is "cover", "candidate" or "calibration"."""

    def __init__(self, msg, stage="calibration"):
        super().__init__(msg)
        self.stage = stage


def _pair(a, b, m):
    a, b = (a - 1) % m + 1, (b - 1) % m + 1
    return (min(a, b), max(a, b))


def _between(x, i, j, m):
    """x strictly inside the arc from i up to j (cyclically)."""
    return 0 < (x - i) % m < (j - i) % m


def is_adjacent(p, m):
    return (p[1] - p[0]) % m in (1, m - 1)


def diagonals(m):
    return [p for p in combinations(range(1, m + 1), 2) if not is_adjacent(p, m)]


def crossing(p, q, m) -> bool:
    if len(set(p) | set(q)) < 4:
        return False
    return _between(q[0], p[0], p[1], m) != _between(q[1], p[0], p[1], m)


@dataclass(frozen=True)
class FamilyIndexSet:
    J: frozenset
    m: int
    provenance: str = "derived-from-split"
    declared: frozenset | None = None
    index: int | None = None

    def __post_init__(self):
        J = frozenset(_pair(a, b, self.m) for a, b in self.J)
        if any(a == b for a, b in J):
            raise ValueError("a family pair needs two distinct labels")
        object.__setattr__(self, "J", J)

    def __iter__(self):
        return iter(sorted(self.J))

    def __len__(self):
        return len(self.J)

    def __contains__(self, p):
        return _pair(*p, self.m) in self.J

    def shifted(self, k):
        return FamilyIndexSet({_pair(a + k, b + k, self.m) for a, b in self.J}, self.m,
                              self.provenance, self.declared)

    def label(self):
        tag = f"J{self.index}" if self.index is not None else "J"
        return tag + " = {" + ", ".join(f"({a},{b})" for a, b in sorted(self.J)) + "}"


def interleave_closure(nonvanishing, m) -> FamilyIndexSet:
    """All pairs interleaved with some declared nonvanishing pair."""
    N = {_pair(a, b, m) for a, b in nonvanishing}
    J = set()
    for i, j in N:
        for k1 in range(1, m + 1):
            if not _between(k1, i, j, m):
                continue
            for k2 in range(1, m + 1):
                if _between(k2, j, i, m):
                    J.add(_pair(k1, k2, m))
    return FamilyIndexSet(frozenset(J), m, "derived-from-split", frozenset(N))


def triangulations(m):
    """Maximal non-crossing sets of diagonals of the label polygon."""
    D = diagonals(m)
    out = []
    for T in combinations(D, m - 3):
        if not any(crossing(p, q, m) for p, q in combinations(T, 2)):
            out.append(frozenset(T))
    return out


def split_families(m):
    """Cover of class T: every F_{i,j} with 2 <= |i-j| <= m/2, refined into
    the triangulations containing (i, j); deduplicated, first-seen order."""
    tris = triangulations(m)
    seen, out = set(), []
    for k in range(2, m // 2 + 1):
        for i in range(1, m + 1):
            d = _pair(i, i + k, m)
            for T in tris:
                if d in T and T not in seen:
                    seen.add(T)
                    out.append(interleave_closure(T, m))
    if m <= 3:
        out.append(FamilyIndexSet(frozenset(), m, "derived-from-split", frozenset()))
    return out


PRINTED = {
    5: {
        1: [(1, 3), (1, 4), (2, 4)],
        2: [(1, 3), (1, 4), (3, 5)],
        3: [(1, 3), (2, 5), (3, 5)],
        4: [(1, 4), (2, 4), (2, 5)],
        5: [(2, 4), (2, 5), (3, 5)],
    },
    6: {
        1: [(2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)],
        2: [(1, 3), (1, 4), (1, 5), (3, 5), (3, 6), (4, 6)],
        3: [(1, 4), (1, 5), (2, 4), (2, 5), (2, 6), (4, 6)],
        4: [(1, 3), (1, 5), (2, 5), (2, 6), (3, 5), (3, 6)],
        5: [(1, 3), (1, 4), (2, 4), (2, 6), (3, 6), (4, 6)],
        6: [(1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (3, 5)],
        7: [(1, 5), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6)],
        8: [(1, 3), (1, 4), (2, 6), (3, 5), (3, 6), (4, 6)],
        9: [(1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (4, 6)],
        10: [(1, 3), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)],
        11: [(1, 3), (1, 4), (1, 5), (2, 4), (3, 6), (4, 6)],
        12: [(1, 4), (1, 5), (2, 4), (2, 5), (2, 6), (3, 5)],
        13: [(1, 4), (2, 4), (2, 5), (2, 6), (3, 6), (4, 6)],
        14: [(1, 3), (1, 4), (1, 5), (2, 5), (3, 5), (3, 6)],
    },
}


def printed_family(m, index) -> FamilyIndexSet:
    return FamilyIndexSet(frozenset(PRINTED[m][index]), m, "printed-list", index=index)


def field_implied(values, tol=1e-9):
    """Pairs on which constant per-sheet values exceed the size bound."""
    v = np.asarray(values, float)
    return frozenset(
        (i + 1, j + 1)
        for i in range(len(v)) for j in range(i + 1, len(v))
        if np.hypot(*(v[i] - v[j])) > 2 + tol
    )


def relabel_pairs(J, label_map, m):
    return frozenset(_pair(label_map[a - 1], label_map[b - 1], m) for a, b in J)


def reversal(m):
    """Sheet relabelling l -> 2 - l induced by reversing the terminal order."""
    return [(2 - k - 1) % m + 1 for k in range(1, m + 1)]


def _refinement_readings(m):
    """Literal readings of the subfamily definitions used for the polygon
    examples; each declared pair set is either consistent (no two declared
    pairs interleave) or self-contradictory."""
    rows = []
    if m == 5:
        for i in range(1, 6):
            j = i + 2
            jj = (j - 1) % m + 1
            for k, other in ((1, (i, j + 1)), (2, (i - 1, j))):
                rows.append((f"F^{k}_{{{i},{jj}}}", {_pair(i, j, m), _pair(*other, m)}))
    elif m == 6:
        for i in range(1, 4):
            j = i + 3
            opts = [((i, j - 1), (i, j + 1)), ((i + 1, j), (i - 1, j)),
                    ((i, j - 1), (i + 1, j)), ((i - 1, j), (i, j + 1))]
            for k, (a, b) in enumerate(opts, start=1):
                rows.append((f"F^{k}_{{{i},{j}}}", {_pair(i, j, m), _pair(*a, m), _pair(*b, m)}))
    return rows


@dataclass
class FamilyCatalog:
    m: int
    printed: dict
    derived: list
    diff: list

    @property
    def families(self):
        """Derived lists, indexed like the printed ones where the sets agree."""
        return list(self.derived)

    def __iter__(self):
        return iter(self.derived)

    def __len__(self):
        return len(self.derived)

    def report(self):
        lines = [f"{len(self.printed)} printed and {len(self.derived)} derived families (m={self.m})"]
        for k in sorted(self.printed):
            d = next((f for f in self.derived if f.index == k), None)
            mark = "=" if d is not None and d.J == self.printed[k].J else "!="
            lines.append(f"  {self.printed[k].label()}  {mark} derived")
        lines += ["  " + s for s in self.diff] or ["  no differences"]
        return "\n".join(lines)


def _catalog(m, notes=()):
    printed = {k: printed_family(m, k) for k in PRINTED[m]}
    derived = split_families(m)
    aligned = []
    used = set()
    for k, P in printed.items():
        for f in derived:
            if f.J == P.J and id(f) not in used:
                used.add(id(f))
                aligned.append(FamilyIndexSet(f.J, m, f.provenance, f.declared, k))
                break
    extra = [f for f in derived if id(f) not in used]
    nxt = max(printed) + 1
    for f in extra:
        aligned.append(FamilyIndexSet(f.J, m, f.provenance, f.declared, nxt))
        nxt += 1
    diff = []
    for k, P in printed.items():
        if not any(f.index == k and f.J == P.J for f in aligned):
            diff.append(f"J{k}: printed list matches no derived family")
    for f in extra:
        diff.append(f"derived family {f.label()} has no printed counterpart")
    for name, N in _refinement_readings(m):
        cl = interleave_closure(N, m)
        if cl.J & cl.declared:
            diff.append(f"{name}: declared pairs {sorted(N)} interleave, literal reading is empty")
    diff += list(notes)
    return FamilyCatalog(m, printed, sorted(aligned, key=lambda f: f.index), diff)


def pentagon_families() -> FamilyCatalog:
    return _catalog(5)


def hexagon_families() -> FamilyCatalog:
    from .calib import PRINTED_VALUES

    m = 6
    phi10 = PRINTED_VALUES["hexagon-10"]
    implied = field_implied(phi10)
    notes = []
    for k in (10, 11, 12):
        P = frozenset(PRINTED[m][k])
        base = printed_family(m, 10).J
        shift = next(s for s in range(m) if {_pair(a + s, b + s, m) for a, b in base} == P)
        imp = frozenset(_pair(a + shift, b + shift, m) for a, b in implied)
        mirror = relabel_pairs(P, reversal(m), m)
        tag = next((i for i, q in PRINTED[m].items() if frozenset(q) == imp), None)
        notes.append(
            f"J{k}: the printed field exceeds 2 on {sorted(imp)} (= printed J{tag}), "
            f"not on printed {sorted(P)}; reversing the sheet order maps J{k} to "
            f"{sorted(mirror)}; reconciliation case"
        )
    return _catalog(m, notes)


# ----------------------------------------------------------------- membership


def interface_pairs_in_hull_chart(E: SheetedSet, min_length=1e-12):
    """Nonvanishing interface pairs of E, named in the chart of Conv(S)."""
    from .calib import _chart_pair, chart_shift

    A = E.arrangement
    pairs = E.interface_pairs()
    if not pairs:
        return {}
    edges = sorted(pairs)
    c = chart_shift(E.cov, np.array([A.edge_midpoint(e) for e in edges]))
    out = {}
    for e, ci in zip(edges, c):
        p = _chart_pair(pairs[e], int(ci), E.m)
        out[p] = out.get(p, 0.0) + float(A.edge_len[e])
    return {p: L for p, L in out.items() if L >= min_length}


def membership(E: SheetedSet, J) -> bool:
    J = J.J if isinstance(J, FamilyIndexSet) else {_pair(a, b, E.m) for a, b in J}
    return not (set(interface_pairs_in_hull_chart(E)) & set(J))


def split_violations(pairs, m):
    """Pairs that are nonvanishing although interleaved with another nonvanishing pair."""
    N = {_pair(a, b, m) for a, b in pairs}
    return sorted(N & interleave_closure(N, m).J)


def topology_pairs(top: SteinerTopology):
    """Nonvanishing diagonal pairs predicted by a cyclic-compatible topology."""
    m = top.m
    out = set()
    for e in top.edges:
        side = top.split(e)[0]
        start = next(s for s in side if (s - 1) % m not in side)
        s, t = start + 1, (start + len(side) - 1) % m + 1
        p = _pair(m + 2 - s, m + 1 - t, m)
        if not is_adjacent(p, m):
            out.add(p)
    return frozenset(out)


@dataclass
class CoverReport:
    n_topologies: int
    n_class_t: int
    n_excluded: int
    uncovered: list
    split_failures: list
    pattern_mismatches: list
    family_counts: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.uncovered and not self.split_failures and not self.pattern_mismatches

    def __str__(self):
        return (
            f"{self.n_topologies} topologies, {self.n_class_t} drawable in class T, "
            f"{self.n_excluded} excluded (not drawable without crossings); "
            f"uncovered {len(self.uncovered)}, split-lemma failures {len(self.split_failures)}, "
            f"pattern mismatches {len(self.pattern_mismatches)}"
        )


def _drawn(top: SteinerTopology, config: PointConfig, opt=None):
    """A crossing-free drawing of ``top``: Tutte placement, else optimized."""
    for make in (lambda: embed_topology(top, config), lambda: opt):
        try:
            net = make()
        except GeometryError:
            continue
        if net is None:
            continue
        if net.topology is None or net.topology.key == top.key:
            return net
    return None


def cover_check(config: PointConfig, families, cov: CoveringSpace | None = None,
                geometric: bool = True) -> CoverReport:
    """Every class-T topology on ``config`` lies in at least one family."""
    m = config.m
    if m > 2 and not config.is_convex():
        raise ValueError("cover_check needs terminals in convex position")
    fams = [f if isinstance(f, FamilyIndexSet) else FamilyIndexSet(frozenset(f), m) for f in families]
    cov = cov or build_covering(config, canonical_cuts(config))
    tops = enumerate_topologies(m)
    drawable = [t for t in tops if t.is_cyclic_compatible()]
    uncovered, failures, mismatches = [], [], []
    counts = {f.index: 0 for f in fams}
    for top in drawable:
        pred = topology_pairs(top)
        pairs = pred
        if geometric:
            net = _drawn(top, config)
            try:
                E = network_to_sheeted_set(net, cov) if net is not None else None
            except (ConstructionError, GeometryError):
                E = None
            if E is None:
                mismatches.append((str(top), "no class-T drawing"))
                continue
            got = interface_pairs_in_hull_chart(E)
            pairs = frozenset(p for p in got if not is_adjacent(p, m))
            if pairs != pred:
                mismatches.append((str(top), sorted(pairs), sorted(pred)))
        bad = split_violations(pairs, m)
        if bad:
            failures.append((str(top), bad))
        hit = [f for f in fams if not (pairs & f.J)]
        if not hit:
            uncovered.append((str(top), sorted(pairs)))
        for f in hit:
            counts[f.index] = counts.get(f.index, 0) + 1
    return CoverReport(len(tops), len(drawable), len(tops) - len(drawable),
                       uncovered, failures, mismatches, counts)


# ----------------------------------------------------------------- candidates


@dataclass
class Candidate:
    family: FamilyIndexSet
    E: SheetedSet
    network: Network
    length: float
    n_topologies: int

    @property
    def perimeter(self):
        return 2.0 * self.length


_OPT_CACHE: dict = {}


def _optimized_compatible(config: PointConfig):
    key = (config.m, config.points.tobytes())
    if key not in _OPT_CACHE:
        tops = [t for t in enumerate_topologies(config.m) if t.is_cyclic_compatible()]
        res = optimize_topologies(tops, config, strict=False)
        _OPT_CACHE.clear()
        _OPT_CACHE[key] = list(zip(tops, res))
    return _OPT_CACHE[key]


def family_candidate(config: PointConfig, J, cov: CoveringSpace | None = None, tol=1e-9) -> Candidate:
    """Shortest network whose topology keeps every J pair vanishing."""
    m = config.m
    fam = J if isinstance(J, FamilyIndexSet) else FamilyIndexSet(frozenset(J), m)
    if m > 2 and not config.is_convex():
        raise ValueError("family_candidate needs terminals in convex position")
    cov = cov or build_covering(config, canonical_cuts(config))
    if m == 2:
        net = Network(config, np.zeros((0, 2)), [(0, 1)])
        return Candidate(fam, network_to_sheeted_set(net, cov), net, net.length, 1)
    pool = [(t, r) for t, r in _optimized_compatible(config) if not (topology_pairs(t) & fam.J)]
    if not pool:
        raise EmptyFamilyError(f"no topology is compatible with {fam.label()}")
    pool.sort(key=lambda tr: (tr[1].length, not tr[1].converged, tr[0].key))
    for top, r in pool:
        try:
            E = network_to_sheeted_set(r.network, cov)
        except (ConstructionError, GeometryError):
            continue
        if membership(E, fam):
            return Candidate(fam, E, r.network, r.length, len(pool))
    raise EmptyFamilyError(f"no compatible network realizes {fam.label()}")


# ---------------------------------------------------------------- symmetries


@dataclass(frozen=True)
class Symmetry:
    """Orthogonal map permuting the terminals, with its sheet relabelling."""

    M: np.ndarray
    perm: tuple  # terminal i (0-based) -> perm[i]
    labels: tuple  # sheet l (1-based) -> labels[l-1]

    def pairs(self, J, m):
        return relabel_pairs(J, self.labels, m)

    def network(self, net: Network) -> Network:
        segs = [(self.M @ a, self.M @ b) for a, b in net.segments()]
        return network_from_segments(net.terminals, segs)

    def values(self, vals):
        vals = np.asarray(vals, float)
        out = np.zeros_like(vals)
        for k in range(len(vals)):
            out[self.labels[k] - 1] = self.M @ vals[k]
        return out


def dihedral_symmetries(config: PointConfig, tol=1e-9):
    """Symmetries of a regular polygon: rotations first, then reflections."""
    P = config.points
    m = config.m
    c = P.mean(axis=0)
    if np.hypot(*c) > tol:
        raise ValueError("configuration must be centred at the origin")
    out = []
    for refl in (False, True):
        for k in range(m):
            perm = [((k - i) if refl else (i + k)) % m for i in range(m)]
            Q = P[perm]
            M, *_ = np.linalg.lstsq(P, Q, rcond=None)
            M = M.T
            if np.abs(P @ M.T - Q).max() > tol or np.abs(M @ M.T - np.eye(2)).max() > tol:
                continue
            # face of e_j carries label 1 - j (mod m); follow the image edge
            if refl:
                labels = tuple((-k - l) % m + 1 for l in range(1, m + 1))
            else:
                labels = tuple((l - k - 1) % m + 1 for l in range(1, m + 1))
            out.append(Symmetry(M, tuple(perm), labels))
    return out


# -------------------------------------------------------------------- driver


@dataclass
class FamilyCertificate:
    family: FamilyIndexSet
    candidate: Candidate
    report: object  # calib.CalibrationReport

    @property
    def verified(self):
        return bool(self.report.verdict)


@dataclass
class DriverReport:
    m: int
    cover: CoverReport
    certificates: list
    winners: list
    minimum_perimeter: float
    gaps: dict
    tie_tol: float = 1e-9

    def __str__(self):
        lines = [f"cover check: {self.cover}"]
        for c in self.certificates:
            lines.append(
                f"  family {c.family.index:>2}: P = {c.candidate.perimeter:.12f}  "
                f"{'verified' if c.verified else 'NOT VERIFIED'}"
                + (f"  gap {self.gaps[c.family.index]:.3e}"
                   if self.gaps[c.family.index] > self.tie_tol else "")
            )
        lines.append(
            f"winners: families {', '.join(str(w) for w in self.winners)} "
            f"at P = {self.minimum_perimeter:.12f}"
        )
        return "\n".join(lines)


def minimality_driver(config: PointConfig, families, candidates: dict, fields: dict,
                      cov: CoveringSpace | None = None, tie_tol=1e-9, cover=None,
                      **tol) -> DriverReport:
    """Certify the global minimizers from per-family calibrations.

    ``candidates`` and ``fields`` map family index to Candidate and SheetField;
    ``tol`` (tol_div, tol_size, tol_eq) is passed to ``verify``.
    """
    from .calib import verify

    cov = cov or build_covering(config, canonical_cuts(config))
    cover = cover or cover_check(config, families, cov)
    if not cover.ok:
        raise IncompleteCertificateError(f"families do not cover class T: {cover}", "cover")
    certs = []
    for f in families:
        if f.index not in candidates or f.index not in fields:
            raise IncompleteCertificateError(
                f"family {f.index} has no candidate or calibration", "candidate")
        cand = candidates[f.index]
        rep = verify(fields[f.index], cand.E, cov, f.J, **tol)
        if not rep.verdict:
            raise IncompleteCertificateError(
                f"family {f.index}: calibration fails ({rep.dominating_violation()})"
            )
        certs.append(FamilyCertificate(f, cand, rep))
    best = min(c.candidate.perimeter for c in certs)
    winners = [c.family.index for c in certs if c.candidate.perimeter <= best + tie_tol]
    gaps = {c.family.index: c.candidate.perimeter - best for c in certs}
    return DriverReport(config.m, cover, certs, winners, best, gaps, tie_tol)


def certify(name: str, tie_tol=1e-9, **tol) -> DriverReport:
    """End-to-end certificate for the built-in pentagon or hexagon."""
    from .calib import builtin, stripe_extension

    if name == "pentagon":
        cat, bases = pentagon_families(), ["pentagon(5)"]
    elif name == "hexagon":
        cat, bases = hexagon_families(), ["hexagon-1", "hexagon-10", "hexagon-13"]
    else:
        raise ValueError(f"unknown driver configuration {name!r}")
    fx = [builtin(b) for b in bases]
    config, cov = fx[0].config, fx[0].cov
    m = config.m
    images = []
    for F in fx:
        for g in dihedral_symmetries(config):
            images.append((g.pairs(F.J, m), g.values(F.hull_values)))
    fams = cat.families
    candidates, fields = {}, {}
    for f in fams:
        vals = next((v for J, v in images if J == f.J), None)
        if vals is None:
            continue
        candidates[f.index] = family_candidate(config, f, cov)
        fields[f.index] = stripe_extension(vals, cov)
    return minimality_driver(config, fams, candidates, fields, cov, tie_tol, **tol)
