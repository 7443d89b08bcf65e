"""Scene files (JSON, version ``steiner-cover/1``) and SVG rendering.

A scene holds a point configuration and, optionally, cuts, networks,
sheeted sets, calibration fields and named J-sets.  Sheeted sets are stored
as their network segments plus one witness point per bounded face, so the
file does not depend on how faces happen to be numbered.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .calib import SheetField, field_from_cells
from .covering import CutSystem, PointConfig, build_covering, canonical_cuts
from .geom import EPS_GEO, Polyline, segment_intersect, signed_area
from .sheets import SheetedSet, sheeted_set
from .steiner import Network

VERSION = "steiner-cover/1"


class SceneError(ValueError):
    """Schema violation; ``path`` is the JSON path, ``line``/``column`` 1-based."""

    def __init__(self, msg, path="$", line=None, column=None):
        self.path, self.line, self.column = path, line, column
        where = path if line is None else f"{path} (line {line}, column {column})"
        super().__init__(f"{where}: {msg}")


@dataclass(frozen=True)
class NamedJ:
    name: str
    pairs: frozenset


@dataclass(frozen=True, eq=False)
class SceneFile:
    config: PointConfig
    cuts: CutSystem | None = None
    networks: tuple = ()
    sets: tuple = ()
    fields: tuple = ()
    jsets: tuple = ()
    meta: dict = field(default_factory=dict)

    @property
    def m(self):
        return self.config.m

    def covering(self):
        cuts = self.cuts if self.cuts is not None else canonical_cuts(self.config)
        return build_covering(self.config, cuts)

    def jset(self, name):
        for j in self.jsets:
            if j.name == name:
                return j.pairs
        raise KeyError(name)


# ------------------------------------------------------------- encoding


def _pts(a):
    return [[float(x) + 0.0, float(y) + 0.0] for x, y in np.asarray(a, float).reshape(-1, 2)]


def _seg_key(s):
    return sorted(s)


def _ring_key(r):
    """Rotate a ring to start at its lexicographically smallest vertex."""
    k = min(range(len(r)), key=lambda i: r[i])
    return r[k:] + r[:k]


def _cuts_doc(c: CutSystem):
    return {
        "sigma": [_pts(p.vertices) for p in c.sigma],
        "sigma_prime": [_pts(p.vertices) for p in c.sigma_prime],
        "omega": _pts(c.omega),
    }


def _net_doc(n: Network):
    return {
        "steiner_points": _pts(n.steiner_points),
        "edges": [list(e) for e in n.edges],
        "class_t": bool(n.class_t),
    }


def _same_cuts(a: CutSystem, b: CutSystem | None):
    return b is not None and json.dumps(_cuts_doc(a)) == json.dumps(_cuts_doc(b))


def _set_doc(E: SheetedSet, scene_cuts):
    A = E.arrangement
    segs = sorted(
        _seg_key(_pts(A.vertices[A.edges[e]]))
        for e in A.edges_tagged(lambda t: t == "network")
    )
    faces = sorted(
        ({"witness": _pts([A.faces[k].sample])[0], "label": int(E.labels[k])}
         for k in A.bounded_faces()),
        key=lambda d: d["witness"],
    )
    doc = {"segments": segs, "faces": faces}
    if E.relabeling is not None:
        doc["terminal_order"] = [int(i) for i in E.relabeling]
    if E.relabeling is not None or not _same_cuts(E.cov.cuts, scene_cuts):
        doc["cuts"] = _cuts_doc(E.cov.cuts)
    return doc


def _field_doc(f: SheetField):
    A = f.arrangement
    cells = sorted(
        ({"polygon": _ring_key(_pts(outer)), "values": _pts(vals)}
         for outer, _holes, vals in f.cells()),
        key=lambda d: d["polygon"],
    )
    return {
        "window": _ring_key(_pts(f.window)),
        "segments": sorted(_seg_key(_pts(A.vertices[e])) for e in A.edges),
        "cells": cells,
    }


def to_dict(scene: SceneFile) -> dict:
    doc = {"version": VERSION, "config": {"points": _pts(scene.config.points)}}
    if scene.meta:
        doc["meta"] = scene.meta
    if scene.cuts is not None:
        doc["cuts"] = _cuts_doc(scene.cuts)
    if scene.networks:
        doc["networks"] = [_net_doc(n) for n in scene.networks]
    if scene.sets:
        doc["sets"] = [_set_doc(E, scene.cuts) for E in scene.sets]
    if scene.fields:
        doc["fields"] = [_field_doc(f) for f in scene.fields]
    if scene.jsets:
        doc["jsets"] = [
            {"name": j.name, "pairs": [list(p) for p in sorted(j.pairs)]} for j in scene.jsets
        ]
    return doc


def dumps(scene: SceneFile) -> str:
    return json.dumps(to_dict(scene), indent=1) + "\n"


def save(scene: SceneFile, path):
    Path(path).write_text(dumps(scene), encoding="utf-8")


# ------------------------------------------------------------- decoding


def _locate(text, path):
    """Offset of the value at ``path`` (keys / indices) in the JSON ``text``."""
    dec = json.JSONDecoder()
    ws = " \t\r\n"

    def skip(i):
        while i < len(text) and text[i] in ws:
            i += 1
        return i

    i = skip(0)
    for step in path:
        if i >= len(text):
            return None
        if text[i] == "{" and isinstance(step, str):
            i = skip(i + 1)
            while text[i] == '"':
                key, i = json.decoder.scanstring(text, i + 1)
                i = skip(skip(i) + 1)
                if key == step:
                    break
                i = skip(dec.raw_decode(text, i)[1])
                i = skip(i + 1) if text[i] == "," else i
            else:
                return None
        elif text[i] == "[" and isinstance(step, int):
            i = skip(i + 1)
            for _ in range(step):
                i = skip(dec.raw_decode(text, i)[1])
                if text[i] != ",":
                    return None
                i = skip(i + 1)
        else:
            return None
    return i


class _Reader:
    def __init__(self, text):
        self.text = text

    def fail(self, msg, path=()):
        s = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)
        line = col = None
        if self.text is not None:
            try:
                off = _locate(self.text, list(path))
            except (ValueError, IndexError):
                off = None
            if off is not None:
                line = self.text.count("\n", 0, off) + 1
                col = off - (self.text.rfind("\n", 0, off) + 1) + 1
        raise SceneError(msg, s, line, col)

    def get(self, doc, key, path, kind=None, required=True):
        if not isinstance(doc, dict):
            self.fail("expected an object", path)
        if key not in doc:
            if required:
                self.fail(f"missing key {key!r}", path)
            return None
        v = doc[key]
        if kind is not None and not isinstance(v, kind):
            self.fail(f"expected {kind.__name__ if isinstance(kind, type) else 'value'}", path + (key,))
        return v

    def points(self, v, path, min_len=0):
        if not isinstance(v, list) or len(v) < min_len:
            self.fail(f"expected a list of at least {min_len} points", path)
        for k, p in enumerate(v):
            if (not isinstance(p, list) or len(p) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in p)
                    or not all(math.isfinite(x) for x in p)):
                self.fail("expected a point [x, y] of finite numbers", path + (k,))
        return np.array(v, float).reshape(-1, 2)

    def polygon(self, v, path):
        P = self.points(v, path, 3)
        if abs(signed_area(P)) <= EPS_GEO:
            self.fail("polygon has zero area", path)
        n = len(P)
        for a in range(n):
            for b in range(a + 2, n):
                if a == 0 and b == n - 1:
                    continue
                if segment_intersect((P[a], P[(a + 1) % n]), (P[b], P[(b + 1) % n])).kind != "none":
                    self.fail("polygon is not simple", path)
        return P


def _read_cuts(r, doc, path, m):
    sig = r.get(doc, "sigma", path, list)
    sp = r.get(doc, "sigma_prime", path, list)
    if len(sig) != m - 1 or len(sp) != m - 1:
        r.fail(f"expected {m - 1} sigma and sigma_prime curves", path)
    sig = [Polyline(r.points(c, path + ("sigma", k), 2)) for k, c in enumerate(sig)]
    sp = [Polyline(r.points(c, path + ("sigma_prime", k), 2)) for k, c in enumerate(sp)]
    omega = r.polygon(r.get(doc, "omega", path), path + ("omega",))
    return CutSystem(sig, sp, omega)


def _read_network(r, doc, path, config):
    sp = r.points(r.get(doc, "steiner_points", path, list), path + ("steiner_points",))
    edges = r.get(doc, "edges", path, list)
    n = config.m + len(sp)
    for k, e in enumerate(edges):
        if (not isinstance(e, list) or len(e) != 2 or not all(type(x) is int for x in e)
                or not all(0 <= x < n for x in e) or e[0] == e[1]):
            r.fail(f"edge must be two distinct vertex indices in 0..{n - 1}", path + ("edges", k))
    class_t = r.get(doc, "class_t", path, bool, required=False)
    try:
        return Network(config, sp, [tuple(e) for e in edges],
                       class_t=len(edges) == n - 1 if class_t is None else class_t)
    except ValueError as exc:
        r.fail(str(exc), path)


def _read_set(r, doc, path, config, scene_cuts):
    order = r.get(doc, "terminal_order", path, list, required=False)
    cfg = config
    if order is not None:
        if sorted(order) != list(range(config.m)) or not all(type(i) is int for i in order):
            r.fail("terminal_order must be a permutation of 0..m-1", path + ("terminal_order",))
        cfg = PointConfig(config.points[order])
    cd = r.get(doc, "cuts", path, dict, required=False)
    cuts = _read_cuts(r, cd, path + ("cuts",), cfg.m) if cd is not None else scene_cuts
    try:
        cov = build_covering(cfg, cuts if cuts is not None else canonical_cuts(cfg))
    except ValueError as exc:
        r.fail(str(exc), path)
    segs = r.get(doc, "segments", path, list)
    segs = [tuple(r.points(s, path + ("segments", k), 2)) for k, s in enumerate(segs)]
    for k, s in enumerate(segs):
        if len(s) != 2:
            r.fail("segment must have two endpoints", path + ("segments", k))
    E = sheeted_set(cov, segs)
    A = E.arrangement
    faces = r.get(doc, "faces", path, list)
    labels = np.ones(A.n_faces, dtype=int)
    seen = {}
    for k, fd in enumerate(faces):
        fp = path + ("faces", k)
        w = r.points([r.get(fd, "witness", fp)], fp + ("witness",))
        lab = r.get(fd, "label", fp, int)
        if type(lab) is not int or not 1 <= lab <= cfg.m:
            r.fail(f"label must be in 1..{cfg.m}", fp + ("label",))
        face = int(A.locate(w)[0])
        if face == A.unbounded:
            r.fail("witness lies in no bounded face", fp + ("witness",))
        if face in seen:
            r.fail(f"witness resolves to the same face as faces[{seen[face]}]", fp + ("witness",))
        seen[face] = k
        labels[face] = lab
    missing = [k for k in A.bounded_faces() if k not in seen]
    if missing:
        r.fail(f"{len(missing)} face(s) have no witness", path + ("faces",))
    E = SheetedSet(cov, A, labels, E.face_r, None, tuple(order) if order is not None else None)
    return E


def _read_field(r, doc, path, m):
    W = r.polygon(r.get(doc, "window", path), path + ("window",))
    segs = r.get(doc, "segments", path, list, required=False) or []
    extra = []
    for k, s in enumerate(segs):
        p = r.points(s, path + ("segments", k), 2)
        if len(p) != 2:
            r.fail("segment must have two endpoints", path + ("segments", k))
        extra.append((p[0], p[1], "cell"))
    cells = []
    for k, cd in enumerate(r.get(doc, "cells", path, list)):
        cp = path + ("cells", k)
        poly = r.polygon(r.get(cd, "polygon", cp), cp + ("polygon",))
        vals = r.points(r.get(cd, "values", cp), cp + ("values",))
        if len(vals) != m:
            r.fail(f"expected {m} sheet vectors", cp + ("values",))
        cells.append((abs(signed_area(poly)), k, poly, vals))
    # larger cells first, so faces inside holes take the inner cell's value
    cells.sort(key=lambda c: (-c[0], c[1]))
    return field_from_cells(W, [(p, v) for _, _, p, v in cells], m, extra)


def _read_jset(r, doc, path, m):
    name = r.get(doc, "name", path, str)
    pairs = r.get(doc, "pairs", path, list)
    out = set()
    for k, p in enumerate(pairs):
        if (not isinstance(p, list) or len(p) != 2 or not all(type(x) is int for x in p)
                or not all(1 <= x <= m for x in p)):
            r.fail(f"pair must be two labels in 1..{m}", path + ("pairs", k))
        if p[0] == p[1]:
            r.fail("pair has i = j", path + ("pairs", k))
        out.add((min(p), max(p)))
    return NamedJ(name, frozenset(out))


def from_dict(doc, text=None) -> SceneFile:
    r = _Reader(text)
    if not isinstance(doc, dict):
        r.fail("expected an object")
    v = r.get(doc, "version", (), str)
    if v != VERSION:
        r.fail(f"unsupported version {v!r}, expected {VERSION!r}", ("version",))
    known = {"version", "config", "meta", "cuts", "networks", "sets", "fields", "jsets"}
    for k in doc:
        if k not in known:
            r.fail(f"unknown key {k!r}", (k,))
    cdoc = r.get(doc, "config", (), dict)
    P = r.points(r.get(cdoc, "points", ("config",)), ("config", "points"), 2)
    try:
        config = PointConfig(P)
    except ValueError as exc:
        r.fail(str(exc), ("config", "points"))
    cuts = None
    if doc.get("cuts") is not None:
        cuts = _read_cuts(r, r.get(doc, "cuts", (), dict), ("cuts",), config.m)

    def block(key):
        v = doc.get(key) or []
        if not isinstance(v, list):
            r.fail("expected a list", (key,))
        return v

    nets = tuple(_read_network(r, d, ("networks", k), config) for k, d in enumerate(block("networks")))
    sets = tuple(_read_set(r, d, ("sets", k), config, cuts) for k, d in enumerate(block("sets")))
    fields = tuple(_read_field(r, d, ("fields", k), config.m) for k, d in enumerate(block("fields")))
    jsets = tuple(_read_jset(r, d, ("jsets", k), config.m) for k, d in enumerate(block("jsets")))
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        r.fail("expected an object", ("meta",))
    return SceneFile(config, cuts, nets, sets, fields, jsets, meta)


def loads(text: str) -> SceneFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(exc.msg, "$", exc.lineno, exc.colno) from None
    return from_dict(doc, text)


def load(path) -> SceneFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SceneError(f"not UTF-8: {exc}") from None
    return loads(text)


# ------------------------------------------------------------- fixtures


def fixture_names():
    d = resources.files("steiner_cover") / "data"
    names = [p.name[:-5] for p in d.iterdir() if p.name.endswith(".json")]
    return sorted(names, key=lambda n: (re.sub(r"\d+$", "", n), int(re.sub(r"^\D*", "", n) or 0)))


def fixture_path(name):
    return resources.files("steiner_cover") / "data" / f"{name}.json"


def load_fixture(name) -> SceneFile:
    p = fixture_path(name)
    if not p.is_file():
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    return loads(p.read_text(encoding="utf-8"))


def fixture_scene(fx) -> SceneFile:
    """Scene holding a built-in fixture (config, cuts, network, set, field, J)."""
    jsets = [NamedJ("J", fx.J)]
    if fx.printed_J is not None and fx.printed_J != fx.J:
        jsets.append(NamedJ("printed", fx.printed_J))
    meta = {"name": fx.name, "perimeter": 2 * fx.network.length}
    if fx.note:
        meta["note"] = fx.note
    return SceneFile(fx.config, fx.cov.cuts, (fx.network,), (fx.E,), (fx.field,),
                     tuple(jsets), meta)


# ------------------------------------------------------------- rendering


@dataclass(frozen=True)
class RenderOptions:
    panel: float = 240.0
    pad: float = 14.0
    arrow: float | None = None  # length of a unit vector in px; None = auto
    fill: bool = True
    strip: bool = False  # one panel per network instead of per sheet
    titles: tuple = ()


_SHEET_COLORS = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
                 "#76b7b2", "#edc948", "#9c755f")


def _f(x):
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    def __init__(self, lo, hi, size, pad, x0):
        span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-12)
        self.s = (size - 2 * pad) / span
        self.lo, self.hi, self.pad, self.x0 = lo, hi, pad, x0
        self.cx = x0 + size / 2 - (lo[0] + hi[0]) / 2 * self.s
        self.cy = size / 2 + (lo[1] + hi[1]) / 2 * self.s

    def __call__(self, p):
        return self.cx + p[0] * self.s, self.cy - p[1] * self.s

    def path(self, pts, close=False):
        q = [self(p) for p in pts]
        d = "M" + " L".join(f"{_f(x)},{_f(y)}" for x, y in q)
        return d + (" Z" if close else "")


def _bbox(scene):
    pts = [scene.config.points]
    if scene.cuts is not None:
        pts.append(scene.cuts.omega)
    for n in scene.networks:
        pts.append(n.vertices)
    for f in scene.fields:
        pts.append(f.window)
    for E in scene.sets:
        pts.append(E.cov.cuts.omega)
    P = np.vstack(pts)
    return P.min(axis=0), P.max(axis=0)


def _panel(out, fr, scene, sheet, opts, net_only=None):
    cuts = scene.cuts
    if cuts is None and scene.sets:
        cuts = scene.sets[0].cov.cuts
    if sheet is not None and opts.fill:
        for E in scene.sets:
            A = E.arrangement
            for k in A.bounded_faces():
                if E.labels[k] != sheet:
                    continue
                rings = A.face_rings(k)
                d = " ".join(fr.path(r, True) for r in rings)
                out.append(f'<path d="{d}" fill="{_SHEET_COLORS[(sheet - 1) % 8]}" '
                           'fill-opacity="0.25" fill-rule="evenodd" stroke="none"/>')
    if cuts is not None:
        for c in cuts.sigma:
            out.append(f'<path d="{fr.path(c.vertices)}" fill="none" stroke="#888" '
                       'stroke-width="1" stroke-dasharray="4,3"/>')
        for c in cuts.sigma_prime:
            out.append(f'<path d="{fr.path(c.vertices)}" fill="none" stroke="#bbb" '
                       'stroke-width="1" stroke-dasharray="1,3"/>')
    nets = scene.networks if net_only is None else (net_only,)
    for n in nets:
        d = " ".join(fr.path(s) for s in n.segments())
        out.append(f'<path d="{d}" fill="none" stroke="#222" stroke-width="2"/>')
    if sheet is not None:
        for f in scene.fields:
            _arrows(out, fr, f, sheet, opts)
    for k, p in enumerate(scene.config.points, start=1):
        x, y = fr(p)
        out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="3.5" fill="#000"/>')
        out.append(f'<text x="{_f(x + 5)}" y="{_f(y - 5)}" font-size="10">p{k}</text>')


def _arrow_scale(scene, opts, fr):
    if opts.arrow is not None:
        return opts.arrow
    vmax = max((float(np.abs(f.values).max()) for f in scene.fields), default=0.0)
    return 0.0 if vmax == 0 else 0.09 * (opts.panel - 2 * opts.pad) / vmax


def _arrows(out, fr, f, sheet, opts):
    A = f.arrangement
    for k in A.bounded_faces():
        v = f.values[sheet - 1, k]
        if np.hypot(*v) <= 1e-12:
            continue
        c = A.faces[k].sample
        x, y = fr(c)
        dx, dy = v[0] * fr.arrow, -v[1] * fr.arrow
        out.append(f'<line x1="{_f(x)}" y1="{_f(y)}" x2="{_f(x + dx)}" y2="{_f(y + dy)}" '
                   'stroke="#c00" stroke-width="1" marker-end="url(#a)"/>')


def render_svg(scene: SceneFile, options: RenderOptions | None = None) -> str:
    """SVG 1.1 document; identical scenes give identical bytes."""
    opts = options or RenderOptions()
    lo, hi = _bbox(scene)
    span = hi - lo
    lo, hi = lo - 0.05 * span, hi + 0.05 * span
    if opts.strip and scene.networks:
        panels = [(None, n) for n in scene.networks]
    elif scene.sets or scene.fields:
        panels = [(k, None) for k in range(1, scene.m + 1)]
    else:
        panels = [(None, None)]
    size = opts.panel
    W, H = size * len(panels), size + 22
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(W)}" '
        f'height="{_f(H)}" viewBox="0 0 {_f(W)} {_f(H)}" font-family="sans-serif">',
        '<defs><marker id="a" markerWidth="6" markerHeight="6" refX="5" refY="3" '
        'orient="auto"><path d="M0,0 L6,3 L0,6 Z" fill="#c00"/></marker></defs>',
    ]
    scale = None
    for i, (sheet, net) in enumerate(panels):
        fr = _Frame(lo, hi, size, opts.pad, i * size)
        if scale is None:
            scale = _arrow_scale(scene, opts, fr)
        fr.arrow = scale
        out.append(f'<g id="panel{i + 1}">')
        out.append(f'<rect x="{_f(i * size + 2)}" y="2" width="{_f(size - 4)}" '
                   f'height="{_f(size - 4)}" fill="none" stroke="#ddd"/>')
        _panel(out, fr, scene, sheet, opts, net)
        if i < len(opts.titles):
            title = opts.titles[i]
        elif sheet is not None:
            title = f"sheet {sheet}"
        elif net is not None:
            title = f"length {net.length:.6f}"
        else:
            title = ""
        if title:
            out.append(f'<text x="{_f(i * size + size / 2)}" y="{_f(size + 14)}" '
                       f'font-size="12" text-anchor="middle">{_escape(title)}</text>')
        out.append("</g>")
    if scene.fields and scale:
        out.append(f'<g id="legend"><line x1="8" y1="{_f(H - 6)}" x2="{_f(8 + scale)}" '
                   f'y2="{_f(H - 6)}" stroke="#c00" stroke-width="1" marker-end="url(#a)"/>'
                   f'<text x="{_f(12 + scale)}" y="{_f(H - 3)}" font-size="9">|v| = 1</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(scene, path, options=None):
    Path(path).write_text(render_svg(scene, options), encoding="utf-8")


def candidate_strip(config, candidates, cuts=None) -> str:
    """Side-by-side panels of (title, network) pairs, e.g. one per family."""
    nets = tuple(n for _, n in candidates)
    sc = SceneFile(config, cuts, nets)
    return render_svg(sc, RenderOptions(panel=160, strip=True,
                                        titles=tuple(t for t, _ in candidates)))


__all__ = [
    "VERSION", "SceneError", "NamedJ", "SceneFile", "RenderOptions",
    "to_dict", "from_dict", "dumps", "loads", "save", "load",
    "fixture_names", "fixture_path", "load_fixture", "fixture_scene",
    "render_svg", "write_svg", "candidate_strip",
]
