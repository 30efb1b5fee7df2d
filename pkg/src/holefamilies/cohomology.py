"""Graded local cohomology of monoid algebras through the Ishida complex."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .holes import HoleDecomposition, HoleFamily, enumerate_holes, ring_report
from .linalg import FieldSpec, Vector, dot, in_rational_span, lattice_contains, rank_over_field, vadd, vscale, vsub
from .monoid import AffineMonoid, in_gp, in_saturation, monoid_points

DEFAULT_FIELDS = (FieldSpec(0), FieldSpec(2), FieldSpec(3))


def _fields(fields) -> list[FieldSpec]:
    if fields is None:
        return list(DEFAULT_FIELDS)
    out = []
    for k in fields:
        out.append(k if isinstance(k, FieldSpec) else FieldSpec(int(k)))
    return out


@dataclass(frozen=True)
class DegreeComplex:
    degree: Vector
    nabla: frozenset[int]
    positions: tuple[tuple[int, ...], ...]          # face ids with star_dim i, for i = 0..d
    differentials: tuple[tuple[tuple[int, ...], ...], ...]   # delta_i: position i -> i+1

    @property
    def d(self) -> int:
        return len(self.positions) - 1

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * len(p) for i, p in enumerate(self.positions))


def degree_complex(M: AffineMonoid, q: Sequence[int]) -> DegreeComplex:
    from .holes import nabla

    q = tuple(int(a) for a in q)
    if not in_gp(M, q):
        raise ValueError(f"degree {q} is not in the group of the monoid")
    nab = frozenset(nabla(M, q))
    d = M.star_dim
    pos = tuple(tuple(F.id for F in M.faces.faces if F.star_dim == i and F.id in nab) for i in range(d + 1))
    diffs = []
    for i in range(d):
        src, dst = pos[i], pos[i + 1]
        col = {fid: k for k, fid in enumerate(src)}
        rows = []
        for gid in dst:
            row = [0] * len(src)
            for fid in src:
                s = M.faces.signs.get((fid, gid))
                if s is not None:
                    row[col[fid]] = s
            rows.append(tuple(row))
        diffs.append(tuple(rows))
    return DegreeComplex(q, nab, pos, tuple(diffs))


def _matmul(A, B):
    # A: m x n, B: n x p
    if not A or not B:
        return []
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def differential_squares_vanish(C: DegreeComplex) -> bool:
    for i in range(len(C.differentials) - 1):
        P = _matmul(C.differentials[i + 1], C.differentials[i])
        if any(any(row) for row in P):
            return False
    return True


def complex_cohomology(C: DegreeComplex, k: FieldSpec) -> tuple[int, ...]:
    d = C.d
    ranks = []
    for i in range(d):
        D = C.differentials[i]
        ranks.append(rank_over_field(D, k) if D and D[0] else 0)
    h = []
    for i in range(d + 1):
        n = len(C.positions[i])
        out_rank = ranks[i] if i < d else 0
        in_rank = ranks[i - 1] if i > 0 else 0
        h.append(n - out_rank - in_rank)
    return tuple(h)


@dataclass
class CohomologyReport:
    degree: Vector
    dims: dict[int, tuple[int, ...]]

    def to_json_lines(self) -> list[str]:
        return [json.dumps({"degree": list(self.degree), "char": p, "h": list(h)})
                for p, h in sorted(self.dims.items())]


def graded_cohomology(M: AffineMonoid, q: Sequence[int], fields=None) -> CohomologyReport:
    C = degree_complex(M, q)
    return CohomologyReport(C.degree, {k.characteristic: complex_cohomology(C, k) for k in _fields(fields)})


# ---------------------------------------------------------------------------
# special degrees


def in_minus_interior(M: AffineMonoid, q: Sequence[int]) -> bool:
    return in_gp(M, q) and all(dot(f, q) < 0 for f in M.cone.facet_forms)


def in_minus_saturation(M: AffineMonoid, q: Sequence[int]) -> bool:
    return in_saturation(M, vscale(-1, q))


def interior_sentinel(M: AffineMonoid) -> Vector:
    return vscale(-1, M.interior_point(M.faces.top))


def nonvan_multiplier(M: AffineMonoid, fam: HoleFamily) -> Optional[int]:
    """Least m such that p - m*c_F lies beyond every facet not containing F."""
    c = M.interior_point(fam.face)
    p = fam.representative
    m = 0
    any_facet = False
    for j, f in enumerate(M.cone.facet_forms):
        if j in fam.face.facet_set:
            continue
        any_facet = True
        fc, fp = dot(f, c), dot(f, p)
        if fc <= 0:
            return None
        m = max(m, fp // fc + 1)
    if not any_facet:
        return None
    return m


def nonvan_witnesses(M: AffineMonoid, fam: HoleFamily, count: int = 3) -> list[Vector]:
    m = nonvan_multiplier(M, fam)
    if m is None:
        return []
    c = M.interior_point(fam.face)
    return [vsub(fam.representative, vscale(m + t, c)) for t in range(count)]


def in_family_coset(M: AffineMonoid, fam: HoleFamily, q: Sequence[int]) -> bool:
    return lattice_contains(M.face_group(fam.face), vsub(q, fam.representative))


# ---------------------------------------------------------------------------
# scans


@dataclass
class ScanResult:
    reports: dict[Vector, CohomologyReport]
    sources: dict[Vector, str]
    fields: list[int]

    def nonzero(self, p: int, i: int) -> list[Vector]:
        return sorted(q for q, r in self.reports.items() if r.dims[p][i])


def _face_points(M: AffineMonoid, F, R: int) -> list[Vector]:
    lin = max((abs(c) for g in M.generators for c in M.lineality_coords(g)), default=0)
    pts = monoid_points(M, R, R + lin)
    return sorted((x for x in pts if M.on_face(F, x)), key=lambda v: (M.height(v), v))


def _witness_order(v: Vector):
    return (sum(abs(a) for a in v), v)


def scan_candidates(M: AffineMonoid, D: HoleDecomposition, hole_radius: Optional[int] = None,
                    coset_radius: Optional[int] = None) -> dict[Vector, str]:
    """Degrees to scan: holes, nonvan translates, coset neighbourhoods and a sentinel."""
    cands: dict[Vector, str] = {}
    if hole_radius is None:
        hole_radius = D.box.radius
    from .monoid import Box

    for h in enumerate_holes(M, Box(hole_radius)):
        cands.setdefault(h, "hole")
    S = [M.height(s) for s in _module_points(M)]
    cutoff = 3 * max(S + [1])
    if coset_radius is None:
        coset_radius = max(M.height(g) for g in M.generators)
    for fam in D.families:
        m = nonvan_multiplier(M, fam)
        if m is not None:
            c = M.interior_point(fam.face)
            top = max(cutoff, m + 2)
            for t in range(1, top + 1):
                cands.setdefault(vsub(fam.representative, vscale(t, c)), "translate")
        pts = _face_points(M, fam.face, coset_radius)
        for t1 in pts:
            for t2 in pts:
                cands.setdefault(vsub(vadd(fam.representative, t1), t2), "coset")
    cands.setdefault(interior_sentinel(M), "sentinel")
    return cands


def _module_points(M: AffineMonoid):
    from .monoid import saturation_module_generators

    return saturation_module_generators(M).points


def support_scan(M: AffineMonoid, D: HoleDecomposition, fields=None, hole_radius: Optional[int] = None,
                 coset_radius: Optional[int] = None) -> ScanResult:
    fl = _fields(fields)
    cands = scan_candidates(M, D, hole_radius, coset_radius)
    reports = {}
    for q in sorted(cands, key=lambda v: (M.height(v), v)):
        reports[q] = graded_cohomology(M, q, fl)
    return ScanResult(reports, cands, [k.characteristic for k in fl])


@dataclass(frozen=True)
class DepthResult:
    star_depth: int
    witness_degree: Optional[Vector]
    method: str
    note: str = ""


def families_pairwise_disjoint(M: AffineMonoid, D: HoleDecomposition) -> bool:
    """No hole of the certified box lies in two families."""
    for h in enumerate_holes(M, D.verified_box):
        if sum(1 for f in D.families if in_family_coset(M, f, h)) > 1:
            return False
    return True


def _family_witness(M: AffineMonoid, fam: HoleFamily) -> Vector:
    if fam.star_dim == 0:
        return fam.representative
    return nonvan_witnesses(M, fam, 1)[0]


def star_depth(M: AffineMonoid, D: HoleDecomposition, field: FieldSpec | int = 0,
               scan: Optional[ScanResult] = None) -> DepthResult:
    k = field if isinstance(field, FieldSpec) else FieldSpec(int(field))
    d = M.star_dim
    rep = ring_report(M, D)
    if rep.is_normal:
        return DepthResult(d, interior_sentinel(M), "normal")
    if rep.depth_exact is not None:
        fam = min(D.families, key=lambda f: f.star_dim)
        return DepthResult(rep.depth_exact, _family_witness(M, fam), "family-criterion",
                           rep.justification.get("depth", ""))
    if (M.is_simplicial() or rep.is_seminormal) and families_pairwise_disjoint(M, D):
        fam = min(D.families, key=lambda f: f.star_dim)
        why = "simplicial" if M.is_simplicial() else "seminormal"
        return DepthResult(1 + fam.star_dim, _family_witness(M, fam), "family-criterion",
                           f"{why} with pairwise disjoint families")
    if scan is None or k.characteristic not in scan.fields:
        scan = support_scan(M, D, [k])
    p = k.characteristic
    for i in range(d + 1):
        wit = [q for q, r in scan.reports.items() if r.dims[p][i]]
        if wit:
            w = min(wit, key=_witness_order)
            return DepthResult(i, w, "cohomology-scan",
                               "scan-based: witnessed lower degrees vanish on the scanned region; "
                               f"upper bound {rep.depth_upper_bound} from the least family dimension")
    raise AssertionError("no nonvanishing cohomology found, the sentinel should give h^d")


@dataclass
class CharacteristicReport:
    differences: list[tuple[Vector, int, int, int, int]]    # degree, i, char p, dim over Q, dim over F_p
    d: int
    protected: tuple[int, ...]

    @property
    def indices(self) -> set[int]:
        return {t[1] for t in self.differences}


def compare_characteristics(M: AffineMonoid, D: HoleDecomposition, primes: Iterable[int] = (2, 3),
                            scan: Optional[ScanResult] = None) -> CharacteristicReport:
    primes = [int(p) for p in primes]
    fields = [0] + primes
    if scan is None or any(p not in scan.fields for p in fields):
        scan = support_scan(M, D, fields)
    d = M.star_dim
    diffs = []
    for q, r in sorted(scan.reports.items()):
        for p in primes:
            for i in range(d + 1):
                if r.dims[0][i] != r.dims[p][i]:
                    diffs.append((q, i, p, r.dims[0][i], r.dims[p][i]))
    protected = tuple(sorted({0, 1, 2, d - 1, d} & set(range(d + 1))))
    bad = [t for t in diffs if t[1] in protected]
    if bad:
        raise AssertionError(f"characteristic dependence at a protected index: {bad[0]}")
    if d <= 5 and diffs:
        raise AssertionError(f"characteristic dependence in star dimension {d}: {diffs[0]}")
    return CharacteristicReport(diffs, d, protected)


@dataclass
class SeminormalCheck:
    seminormal: bool
    consistent: bool
    violation: Optional[Vector] = None
    checked: int = 0


def seminormal_vanishing_check(M: AffineMonoid, D: HoleDecomposition,
                               samples: Optional[Sequence[Sequence[int]]] = None) -> SeminormalCheck:
    """Vanishing off -Qbar for seminormal monoids, a violating degree otherwise."""
    rep = ring_report(M, D)
    if samples is None:
        samples = list(scan_candidates(M, D))
    if rep.is_seminormal:
        n = 0
        for q in samples:
            q = tuple(q)
            if in_minus_saturation(M, q):
                continue
            n += 1
            r = graded_cohomology(M, q, [0])
            if any(r.dims[0]):
                return SeminormalCheck(True, False, q, n)
        return SeminormalCheck(True, True, None, n)
    for fam in D.families:
        if in_rational_span(M.face_generators(fam.face), fam.representative):
            continue
        q = _family_witness(M, fam)
        if in_minus_saturation(M, q):
            continue
        r = graded_cohomology(M, q, [0])
        if any(r.dims[0]):
            return SeminormalCheck(False, True, q, 1)
    return SeminormalCheck(False, False, None, 0)
