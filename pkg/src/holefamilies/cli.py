"""Command-line front end for hole families, depth and graded cohomology."""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .cohomology import (ScanResult, compare_characteristics, graded_cohomology, in_minus_interior,
                         seminormal_vanishing_check, star_depth, support_scan)
from .constructions import (builtin_names, edge_ring_monoid, get_builtin, graph, polytopal_monoid,
                            simplicial_complex, stanley_reisner_monoid, volume_check)
from .holes import (CertificationError, decomposition_dict, default_box, enumerate_holes,
                    family_decomposition, ring_report)
from .linalg import FieldSpec
from .monoid import AffineMonoid, Box, build, in_gp

KINDS = ("monoid", "complex", "graph", "polytope")
BIG = 2 ** 53


class InputError(ValueError):
    pass


def _tokens(path: str) -> list[tuple[int, list[str]]]:
    p = Path(path)
    if not p.exists():
        raise InputError(f"{path}: no such file")
    out = []
    for n, line in enumerate(p.read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].split()
        if body:
            out.append((n, body))
    if not out:
        raise InputError(f"{path}: empty file")
    return out


def _ints(path: str, lineno: int, parts: list[str]) -> list[int]:
    vals = []
    for col, tok in enumerate(parts, start=1):
        try:
            vals.append(int(tok))
        except ValueError:
            raise InputError(f"{path}:{lineno}: column {col}: expected an integer, got {tok!r}") from None
    return vals


def _point_rows(path: str) -> list[list[int]]:
    rows = _tokens(path)
    n0, head = rows[0]
    header = _ints(path, n0, head)
    if len(header) != 2 or header[0] < 1 or header[1] < 1:
        raise InputError(f"{path}:{n0}: header must be 'N m' with positive N and m")
    N, m = header
    body = rows[1:]
    if len(body) != m:
        raise InputError(f"{path}: header announces {m} rows, found {len(body)}")
    out = []
    for lineno, parts in body:
        v = _ints(path, lineno, parts)
        if len(v) != N:
            raise InputError(f"{path}:{lineno}: expected {N} integers, got {len(v)}")
        out.append(v)
    return out


def parse_monoid_file(path: str) -> AffineMonoid:
    """First line 'N m', then m generators of length N."""
    rows = _point_rows(path)
    try:
        return build(rows)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


def parse_polytope_file(path: str) -> list[tuple[int, ...]]:
    return [tuple(r) for r in _point_rows(path)]


def parse_complex_file(path: str):
    """First line the vertex count n, then one facet per line (vertices 0..n-1)."""
    rows = _tokens(path)
    n0, head = rows[0]
    header = _ints(path, n0, head)
    if len(header) != 1 or header[0] < 1:
        raise InputError(f"{path}:{n0}: header must be the vertex count")
    n = header[0]
    facets = [_ints(path, ln, parts) for ln, parts in rows[1:]]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            D = simplicial_complex(n, facets)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return D
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


def parse_graph_file(path: str):
    """First line the vertex count n, then one edge 'u v' per line."""
    rows = _tokens(path)
    n0, head = rows[0]
    header = _ints(path, n0, head)
    if len(header) != 1 or header[0] < 1:
        raise InputError(f"{path}:{n0}: header must be the vertex count")
    edges = []
    for ln, parts in rows[1:]:
        e = _ints(path, ln, parts)
        if len(e) != 2:
            raise InputError(f"{path}:{ln}: an edge needs two vertices")
        edges.append(e)
    try:
        return graph(header[0], edges)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) > BIG else x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in seq]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holefamilies", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    a = sub.add_parser("analyze", help="analyze an affine monoid")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME", help="one of: " + ", ".join(builtin_names()))
    src.add_argument("--file", metavar="PATH", help="read the input from a text file")
    a.add_argument("--kind", choices=KINDS, default="monoid",
                   help="file format: generators, simplicial complex, graph or polytope points")
    a.add_argument("--faces", action="store_true", help="face lattice with star dimensions")
    a.add_argument("--holes", action="store_true", help="holes inside the box")
    a.add_argument("--families", action="store_true", help="certified decomposition into families of holes")
    a.add_argument("--serre", action="store_true", help="normality, local normality, R1, S2 and the depth bound")
    a.add_argument("--seminormal", action="store_true", help="seminormality with a cohomology check")
    a.add_argument("--depth", action="store_true", help="star depth per characteristic with a witness degree")
    a.add_argument("--cohomology", "--degree", dest="degree", metavar="v1,...,vN",
                   help="local cohomology dimensions in one degree")
    a.add_argument("--scan", action="store_true", help="cohomology on the scanned degrees")
    a.add_argument("--compare-char", dest="compare", metavar="p[,p...]",
                   help="compare characteristic 0 against these primes")
    a.add_argument("--volume-check", dest="volume", action="store_true",
                   help="normalized volume against lattice points (degree one generators)")
    a.add_argument("--char", default=None, metavar="p[,p...]", help="field characteristics, 0 or primes (default 0)")
    a.add_argument("--box", type=int, default=None, metavar="R",
                   help="enumeration box: total facet height at most R; no automatic enlargement")
    a.add_argument("--json", action="store_true", help="machine-readable output")
    return ap


def _load(args) -> tuple[AffineMonoid, Optional[list]]:
    if args.builtin is not None:
        try:
            M = get_builtin(args.builtin)
        except KeyError as e:
            raise InputError(str(e.args[0])) from None
        pts = None
        if all(g[-1] == 1 for g in M.generators):
            pts = [g[:-1] for g in M.generators]
        return M, pts
    if args.kind == "monoid":
        M = parse_monoid_file(args.file)
        pts = [g[:-1] for g in M.generators] if all(g[-1] == 1 for g in M.generators) else None
        return M, pts
    if args.kind == "complex":
        return stanley_reisner_monoid(parse_complex_file(args.file)), None
    if args.kind == "graph":
        G = parse_graph_file(args.file)
        if not G.edges:
            raise InputError(f"{args.file}: the graph has no edges")
        return edge_ring_monoid(G), None
    pts = parse_polytope_file(args.file)
    return polytopal_monoid(pts, vertices_only=True), pts


def _fields(args) -> list[FieldSpec]:
    if args.char is None:
        return [FieldSpec(0)]
    try:
        return [FieldSpec(p) for p in _int_list(args.char, "--char")]
    except ValueError as e:
        raise InputError(str(e)) from None


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return _analyze(args, out)
    except InputError as e:
        print(f"error: {e}", file=err)
        return 1
    except CertificationError as e:
        print(f"error: {e}", file=err)
        print(f"suggested: --box {e.suggested_box.radius}", file=err)
        return 2


def _analyze(args, out) -> int:
    wanted = [args.faces, args.holes, args.families, args.serre, args.seminormal, args.depth,
              args.degree is not None, args.scan, args.compare is not None, args.volume]
    if not any(wanted):
        raise InputError("no analysis requested; pass at least one of --faces, --holes, --families, "
                         "--serre, --seminormal, --depth, --cohomology, --scan, --compare-char, --volume-check")
    if args.box is not None and args.box < 1:
        raise InputError("--box must be positive")
    M, pts = _load(args)
    fields = _fields(args)
    degree = None
    if args.degree is not None:
        degree = tuple(_int_list(args.degree, "--cohomology"))
        if len(degree) != M.ambient:
            raise InputError(f"degree has {len(degree)} entries, the monoid lives in Z^{M.ambient}")
        if not in_gp(M, degree):
            raise InputError(f"degree {list(degree)} is not in the group of the monoid")
    primes = None
    if args.compare is not None:
        primes = _int_list(args.compare, "--compare-char")
        if not primes or any(p < 2 for p in primes):
            raise InputError("--compare-char needs primes")
        try:
            for p in primes:
                FieldSpec(p)
        except ValueError as e:
            raise InputError(str(e)) from None

    box = Box(args.box) if args.box is not None else default_box(M)
    report: dict = {"ambient": M.ambient, "star_dim": M.star_dim, "generators": [list(g) for g in M.generators]}
    text: list[str] = [f"monoid in Z^{M.ambient}, {len(M.generators)} generators, star dimension {M.star_dim}"]

    D = None
    needs_D = any([args.families, args.serre, args.seminormal, args.depth, args.scan, args.compare is not None])
    if needs_D:
        D = family_decomposition(M, box)

    if args.faces:
        faces = [{"id": F.id, "facets": sorted(F.facet_set), "star_dim": F.star_dim,
                  "generators": len(F.generator_indices)} for F in M.faces.faces]
        report["faces"] = {"facet_forms": [list(f) for f in M.facet_forms], "faces": faces}
        text.append(f"faces: {len(faces)} (facets: {len(M.facet_forms)})")
        for j, f in enumerate(M.facet_forms):
            text.append(f"  facet {j}: {list(f)}")
        for f in faces:
            text.append(f"  face {f['id']}: facets {f['facets']} star_dim {f['star_dim']}")

    if args.holes:
        hs = enumerate_holes(M, box)
        report["holes"] = {"box": box.radius, "holes": [list(h) for h in hs]}
        text.append(f"holes in box {box.radius}: {len(hs)}")
        for h in hs:
            text.append(f"  {list(h)}")

    if args.families:
        report["families"] = decomposition_dict(D)
        text.append(f"families: {len(D.families)} (certified box {D.verified_box.radius})")
        for f in D.families:
            text.append(f"  face {sorted(f.face.facet_set)} star_dim {f.star_dim} "
                        f"representative {list(f.representative)}")

    rep = ring_report(M, D) if D is not None else None
    if args.serre:
        report["serre"] = rep.as_dict()
        text.append(f"normal: {rep.is_normal}  locally normal: {rep.is_locally_normal}  "
                    f"R1: {rep.serre_R1}  S2: {rep.serre_S2}")
        text.append(f"depth bound: {rep.depth_upper_bound}  exact: {rep.depth_exact}")

    scan: Optional[ScanResult] = None
    if args.scan or args.compare is not None:
        scan_fields = {k.characteristic for k in fields} | {0, *(primes or [])}
        scan = support_scan(M, D, sorted(scan_fields))

    if args.seminormal:
        chk = seminormal_vanishing_check(M, D)
        report["seminormal"] = {"seminormal": rep.is_seminormal, "consistent": chk.consistent,
                                "violation": list(chk.violation) if chk.violation else None,
                                "checked": chk.checked}
        line = f"seminormal: {rep.is_seminormal}"
        if chk.violation:
            line += f" (nonvanishing cohomology at {list(chk.violation)})"
        text.append(line)

    if args.depth:
        res = []
        for k in fields:
            r = star_depth(M, D, k, scan)
            res.append({"char": k.characteristic, "star_depth": r.star_depth, "method": r.method,
                        "witness": list(r.witness_degree) if r.witness_degree else None, "note": r.note})
            text.append(f"depth (char {k.characteristic}): {r.star_depth} via {r.method}"
                        + (f", witness {list(r.witness_degree)}" if r.witness_degree else ""))
        report["depth"] = res
        if not args.serre:
            text.append(f"depth bound: {rep.depth_upper_bound}")

    if degree is not None:
        cr = graded_cohomology(M, degree, fields)
        report["cohomology"] = [{"degree": list(degree), "char": p, "h": list(h)}
                                for p, h in sorted(cr.dims.items())]
        for p, h in sorted(cr.dims.items()):
            text.append(f"h at {list(degree)} (char {p}): {list(h)}")

    if args.scan:
        rows = []
        for q, r in sorted(scan.reports.items()):
            if in_minus_interior(M, q):
                continue
            if any(any(h) for h in r.dims.values()):
                rows.append({"degree": list(q), "source": scan.sources[q],
                             "h": {str(p): list(h) for p, h in sorted(r.dims.items())}})
        report["scan"] = {"scanned": len(scan.reports), "nonzero": rows}
        text.append(f"scan: {len(scan.reports)} degrees, {len(rows)} with nonzero cohomology outside -int")
        for row in rows:
            text.append(f"  {row['degree']} ({row['source']}): " +
                        "  ".join(f"char {p} {h}" for p, h in row["h"].items()))

    if args.compare is not None:
        cmp = compare_characteristics(M, D, primes, scan)
        diffs = [{"degree": list(q), "i": i, "char": p, "h_rational": a, "h_char": b}
                 for q, i, p, a, b in cmp.differences]
        report["compare_char"] = {"primes": primes, "differences": diffs,
                                  "indices": sorted(cmp.indices), "protected": list(cmp.protected)}
        text.append(f"characteristic differences: {len(diffs)} at indices {sorted(cmp.indices)}")
        for row in diffs:
            text.append(f"  {row['degree']} h^{row['i']}: char 0 {row['h_rational']}, "
                        f"char {row['char']} {row['h_char']}")

    if args.volume:
        if pts is None:
            raise InputError("volume check needs a polytope: generators must all end in 1")
        try:
            vc = volume_check(pts)
        except ValueError as e:
            raise InputError(str(e)) from None
        report["volume_check"] = vc.as_dict()
        text.append(f"normalized volume {vc.normalized_volume}, lattice points {vc.lattice_points}, "
                    f"interior {vc.interior_points}, volume >= points - 1: {vc.holds}"
                    + ("" if vc.bound_applies else " (no interior point, bound not guaranteed)"))

    if args.json:
        out.write(dumps(report) + "\n")
    else:
        out.write("\n".join(text) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
