"""Command line: ``steiner-cover {solve,verify,families,driver,render,fixtures}``.

Exit codes: 0 pass, 1 input error, 2 size cap, 3 verification failed,
4 incomplete certificate.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_FAIL, EXIT_INCOMPLETE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def threads():
    """Worker count from STEINER_COVER_THREADS (0 = one per CPU, unset = 1)."""
    raw = os.environ.get("STEINER_COVER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"STEINER_COVER_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("STEINER_COVER_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _scene(arg):
    from . import scene as S

    if Path(arg).is_file():
        return S.load(arg)
    name = arg.replace("(", "-").replace(")", "")
    if name in S.fixture_names():
        return S.load_fixture(name)
    raise UsageError(f"{arg}: no such file or built-in fixture")


def _points(text):
    import numpy as np

    pts = []
    for tok in text.replace(";", " ").split():
        try:
            x, y = (float(v) for v in tok.strip("()").split(","))
        except ValueError:
            raise UsageError(f"bad point {tok!r}; expected x,y") from None
        pts.append((x, y))
    return np.array(pts)


def _family(spec, scene):
    """J from a scene J-set name, a printed family ``J<k>``, or pairs ``2-4,2-5``."""
    from .families import PRINTED

    if spec is None:
        return frozenset()
    try:
        return scene.jset(spec)
    except KeyError:
        pass
    m = scene.m
    if spec[:1] in "JjFf" and spec[1:].isdigit():
        k = int(spec[1:])
        if m in PRINTED and k in PRINTED[m]:
            return frozenset(PRINTED[m][k])
        raise UsageError(f"no printed family {spec} for m={m}")
    pairs = set()
    for tok in spec.replace(";", ",").split(","):
        tok = tok.strip().strip("()")
        if not tok:
            continue
        try:
            i, j = (int(v) for v in tok.replace(":", "-").split("-"))
        except ValueError:
            raise UsageError(f"bad --family {spec!r}") from None
        if i == j or not (1 <= i <= m and 1 <= j <= m):
            raise UsageError(f"bad pair {tok!r} for m={m}")
        pairs.add((min(i, j), max(i, j)))
    return frozenset(pairs)


def _tol(args):
    t = {}
    if args.tol_cal is not None:
        t = {"tol_div": args.tol_cal, "tol_size": args.tol_cal, "tol_eq": args.tol_cal}
    return t


def _emit(args, text, doc):
    if args.json:
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        print(text)
    if args.out and doc is not None:
        Path(args.out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


# ------------------------------------------------------------- commands


def cmd_solve(args):
    from .covering import PointConfig
    from .steiner import TIE_TOL, SizeError, steiner_tree

    if args.points:
        from .scene import SceneFile

        sc = SceneFile(PointConfig(_points(args.points)))
    elif args.scene:
        sc = _scene(args.scene)
    else:
        raise UsageError("solve needs a scene, a fixture name or --points")
    try:
        res = steiner_tree(sc.config, tie_tol=args.tol_geo or TIE_TOL)
    except SizeError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    n = len(res.minimizers)
    lines = [f"length {res.length:.9f}, {n} minimizer{'s' if n != 1 else ''}",
             f"perimeter P = {2 * res.length:.9f}"]
    for k, net in enumerate(res.minimizers, start=1):
        edges = " ".join(_vname(a, net.m) + "-" + _vname(b, net.m) for a, b in net.edges)
        lines.append(f"  [{k}] {edges}")
    doc = {
        "length": res.length,
        "perimeter": 2 * res.length,
        "topologies": res.n_topologies,
        "minimizers": [n.to_dict() for n in res.minimizers],
    }
    if args.json:
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))
    if args.out:
        from dataclasses import replace

        from . import scene as S
        from .sheets import network_to_sheeted_set

        cov = None
        if sc.config.m > 2 and sc.config.is_convex() and sc.config.orientation() > 0:
            cov = sc.covering()
        sets = tuple(network_to_sheeted_set(n, cov) for n in res.minimizers)
        S.save(replace(sc, networks=tuple(res.minimizers), sets=sets), args.out)
    if args.svg:
        from . import scene as S

        Path(args.svg).write_text(S.candidate_strip(
            sc.config, [(f"length {n.length:.6f}", n) for n in res.minimizers]), encoding="utf-8")
    return EXIT_OK


def _vname(v, m):
    return f"p{v + 1}" if v < m else f"s{v - m + 1}"


def _verify_one(path, args):
    from .calib import verify

    sc = _scene(path)
    if not sc.sets or not sc.fields:
        raise UsageError(f"{path}: verify needs a scene with a set and a field")
    J = _family(args.family, sc)
    rep = verify(sc.fields[0], sc.sets[0], sc.covering(), J, **_tol(args))
    note = sc.meta.get("note")
    if note and "reconciliation" in note:
        rep.notes.append(f"note: {note}")
    spec = (args.family or "").upper()
    if sc.m == 6 and spec in ("J10", "J11", "J12") and not rep.verdict:
        rep.notes.append(
            f"reconciliation case: printed {spec} differs from the pairs on which the "
            "printed field exceeds 2 (see `steiner-cover families hexagon`)")
    return path, rep


def cmd_verify(args):
    paths = args.scene
    with ThreadPoolExecutor(max_workers=min(threads(), len(paths))) as ex:
        results = list(ex.map(lambda p: _verify_one(p, args), paths))
    # results keep input order whatever the scheduling
    texts, docs, ok = [], [], True
    for path, rep in results:
        ok &= bool(rep.verdict)
        head = f"== {path}" if len(paths) > 1 else None
        texts.append("\n".join(filter(None, [head, str(rep)])))
        docs.append({"scene": path, **rep.to_dict()})
    _emit(args, "\n\n".join(texts), docs[0] if len(docs) == 1 else docs)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_families(args):
    from .families import hexagon_families, pentagon_families

    cat = {"pentagon": pentagon_families, "hexagon": hexagon_families}[args.config]()
    text = cat.report()
    doc = {
        "m": cat.m,
        "printed": {str(k): sorted(list(p) for p in f.J) for k, f in sorted(cat.printed.items())},
        "derived": {str(f.index): sorted(list(p) for p in f.J) for f in cat.derived},
        "diff": list(cat.diff),
    }
    if args.cover:
        from .calib import _config
        from .families import cover_check

        rep = cover_check(_config(args.config), cat.families)
        text += f"\ncover check: {rep}"
        doc["cover"] = {"ok": rep.ok, "topologies": rep.n_topologies, "class_t": rep.n_class_t,
                        "uncovered": len(rep.uncovered), "split_failures": len(rep.split_failures)}
        if not rep.ok:
            _emit(args, text, doc)
            return EXIT_INCOMPLETE
    _emit(args, text, doc)
    return EXIT_OK


def cmd_driver(args):
    from .families import EmptyFamilyError, IncompleteCertificateError, certify

    try:
        rep = certify(args.config, tie_tol=args.tol_geo or 1e-9, **_tol(args))
    except IncompleteCertificateError as exc:
        print(f"stage {exc.stage} failed: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    except EmptyFamilyError as exc:
        print(f"stage candidate failed: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    w = rep.winners
    if args.config == "pentagon":
        concl = f"{len(w)} tied global minimizers (families {', '.join(map(str, w))})"
    else:
        concl = f"global minimizers: families {', '.join(map(str, w))}"
    concl += f", P = {rep.minimum_perimeter:.9f}"
    text = f"{rep}\n{concl}"
    doc = {
        "config": args.config,
        "cover_ok": rep.cover.ok,
        "families": [
            {"index": c.family.index, "J": sorted(list(p) for p in c.family.J),
             "perimeter": c.candidate.perimeter, "verified": c.verified,
             "gap": rep.gaps[c.family.index]}
            for c in rep.certificates
        ],
        "winners": w,
        "minimum_perimeter": rep.minimum_perimeter,
    }
    from . import scene as S

    svg = args.svg or f"driver-{args.config}.svg"
    cands = [(f"F{c.family.index}  P={c.candidate.perimeter:.4f}", c.candidate.network)
             for c in rep.certificates]
    Path(svg).write_text(S.candidate_strip(rep.certificates[0].candidate.network.terminals, cands),
                         encoding="utf-8")
    text += f"\nsummary written to {svg}"
    _emit(args, text, doc)
    return EXIT_OK


def cmd_render(args):
    from . import scene as S

    sc = _scene(args.scene)
    out = args.svg or args.out
    if not out:
        raise UsageError("render needs --svg PATH")
    S.write_svg(sc, out, S.RenderOptions(strip=args.strip))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_fixtures(args):
    from . import scene as S

    names = S.fixture_names()
    if args.name:
        name = args.name.replace("(", "-").replace(")", "")
        if name not in names:
            raise UsageError(f"unknown fixture {args.name!r}")
        names = [name]
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        for n in names:
            (d / f"{n}.json").write_bytes(S.fixture_path(n).read_bytes())
        print(f"wrote {len(names)} fixture(s) to {d}")
        return EXIT_OK
    for n in names:
        sc = S.load_fixture(n)
        extra = f"  ({sc.meta['note']})" if "note" in sc.meta else ""
        print(f"{n:22s} m={sc.m}  P={sc.meta.get('perimeter', float('nan')):.9f}{extra}")
    return EXIT_OK


# ------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--out", help="write output (scene or JSON report) to this path")
    common.add_argument("--svg", help="write an SVG figure to this path")
    common.add_argument("--tol-geo", type=float, default=None,
                        help="geometric / tie tolerance (default 1e-9)")
    common.add_argument("--tol-cal", type=float, default=None,
                        help="calibration tolerances: divergence, size, equality (default 1e-9)")

    p = argparse.ArgumentParser(prog="steiner-cover", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", parents=[common], help="exact Steiner tree(s) of a configuration")
    s.add_argument("scene", nargs="?", help="scene file or built-in fixture name")
    s.add_argument("--points", help='terminals, e.g. "0,0 3,0"')
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", parents=[common], help="check a calibration certificate")
    s.add_argument("scene", nargs="+", help="scene file(s) or fixture name(s)")
    s.add_argument("--family", help="J-set name in the scene, printed family J<k>, or pairs 2-4,2-5")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("families", parents=[common], help="printed and derived family lists")
    s.add_argument("config", choices=["pentagon", "hexagon"])
    s.add_argument("--cover", action="store_true", help="also run the exhaustive cover check")
    s.set_defaults(func=cmd_families)

    s = sub.add_parser("driver", parents=[common], help="end-to-end minimality certificate")
    s.add_argument("config", choices=["pentagon", "hexagon"])
    s.set_defaults(func=cmd_driver)

    s = sub.add_parser("render", parents=[common], help="SVG figure of a scene")
    s.add_argument("scene")
    s.add_argument("--strip", action="store_true", help="one panel per network")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("fixtures", parents=[common], help="list or export the built-in fixtures")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None):
    from .geom import GeometryError
    from .scene import SceneError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for the size cap
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (UsageError, SceneError, GeometryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
