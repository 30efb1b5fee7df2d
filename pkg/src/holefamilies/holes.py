"""Holes of an affine monoid and their decomposition into families."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cone import Face
from .linalg import Vector, dot, hnf_basis, in_rational_span, lattice_contains, reduce_mod, vsub
from .monoid import (AffineMonoid, Box, build, in_localization, in_localized_saturation, in_Q, in_saturation,
                     is_normal, localize, monoid_points, saturation_module_generators,
                     saturation_points)


class CertificationError(RuntimeError):
    """Raised when the enumeration box misses holes found in the doubled box."""

    def __init__(self, message: str, suggested_box: Box):
        super().__init__(message)
        self.suggested_box = suggested_box


@dataclass(frozen=True)
class HoleFamily:
    face: Face
    representative: Vector      # the least hole of the family (height, then lex)
    residue: Vector             # canonical representative of the coset modulo gp(face)
    star_dim: int

    def key(self) -> tuple[int, Vector]:
        return (self.face.id, self.residue)

    def contains(self, M: AffineMonoid, x: Sequence[int]) -> bool:
        """Membership of x in (representative + gp(face)) intersected with cone(Q)."""
        return (lattice_contains(M.face_group(self.face), vsub(x, self.representative))
                and M.cone.contains(x) and lattice_contains(M.lattice, x))

    def in_coset(self, M: AffineMonoid, x: Sequence[int]) -> bool:
        return lattice_contains(M.face_group(self.face), vsub(x, self.representative))


@dataclass
class HoleDecomposition:
    families: list[HoleFamily]
    multiplicities: dict[int, int]
    verified_box: Box
    box: Box
    holes: list[Vector] = field(default_factory=list, repr=False)

    def keys(self) -> set[tuple[int, Vector]]:
        return {f.key() for f in self.families}

    def star_dims(self) -> set[int]:
        return {f.star_dim for f in self.families}

    def to_json(self) -> str:
        return json.dumps(decomposition_dict(self), sort_keys=True)


def decomposition_dict(D: HoleDecomposition) -> dict:
    return {
        "families": [
            {"face": sorted(f.face.facet_set), "star_dim": f.star_dim,
             "representative": list(f.representative)}
            for f in D.families
        ],
        "multiplicities": {str(k): v for k, v in sorted(D.multiplicities.items())},
        "certified_box": D.verified_box.radius,
    }


def default_box(M: AffineMonoid) -> Box:
    """Largest module generator height plus largest generator height; certification doubles it."""
    S = saturation_module_generators(M).points
    hs = max(M.height(s) for s in S)
    hg = max(M.height(g) for g in M.generators)
    return Box(max(1, hs + hg))


def _order(M: AffineMonoid, v: Vector):
    # least height first; ties prefer small lineality and nonnegative entries
    return (M.height(v), sum(abs(c) for c in M.lineality_coords(v)), tuple(abs(a) for a in v),
            tuple(-a for a in v))


def enumerate_holes(M: AffineMonoid, box: Optional[Box] = None) -> list[Vector]:
    box = box or default_box(M)
    R = box.radius
    holes = saturation_points(M, R) - monoid_points(M, R)
    return sorted(holes, key=lambda v: _order(M, v))


def nabla(M: AffineMonoid, q: Sequence[int]) -> set[int]:
    """Ids of the faces F with q in Q_F, found top-down (the set is upward closed)."""
    q = tuple(q)
    members: set[int] = set()
    for F in reversed(M.faces.faces):
        if any(g not in members for g in M.faces.covers[F.id]):
            continue
        if in_localization(M, F, q):
            members.add(F.id)
    return members


def maximal_hole_faces(M: AffineMonoid, h: Sequence[int]) -> list[Face]:
    h = tuple(h)
    if not in_saturation(M, h) or in_Q(M, h):
        raise ValueError(f"{h} is not a hole")
    nab = nabla(M, h)
    out = []
    for F in M.faces.faces:
        if F.id in nab:
            continue
        if all(g in nab for g in M.faces.covers[F.id]):
            out.append(F)
    return out


def family_decomposition(M: AffineMonoid, box: Optional[Box] = None, certify: bool = True,
                         escalations: int = 3) -> HoleDecomposition:
    """Families of holes found in box; without a box the default one is enlarged on failure."""
    if box is not None or not certify:
        return _decompose(M, box or default_box(M), certify)
    box = default_box(M)
    for _ in range(escalations):
        try:
            return _decompose(M, box, True)
        except CertificationError as e:
            box = e.suggested_box
    return _decompose(M, box, True)


def _decompose(M: AffineMonoid, box: Box, certify: bool) -> HoleDecomposition:
    if M.cone.lineality.rank == M.cone.dim:
        # a group has no holes
        return HoleDecomposition([], {}, box.doubled() if certify else box, box, [])
    holes = enumerate_holes(M, box)
    found: dict[tuple[int, Vector], Face] = {}
    for h in holes:
        for F in maximal_hole_faces(M, h):
            found.setdefault((F.id, reduce_mod(M.face_group(F), h)), F)
    families = []
    for (fid, res), F in sorted(found.items(), key=lambda t: (t[1].star_dim, t[0][0], t[0][1])):
        G = M.face_group(F)
        members = [h for h in holes if lattice_contains(G, vsub(h, res))]
        rep = min(members, key=lambda v: _order(M, v))
        families.append(HoleFamily(F, rep, res, F.star_dim))
    mult: dict[int, int] = {}
    for f in families:
        mult[f.face.id] = mult.get(f.face.id, 0) + 1
    verified = box
    if certify:
        big = box.doubled()
        big_holes = enumerate_holes(M, big)
        residues: dict[int, set] = {}
        for fid, res in found:
            residues.setdefault(fid, set()).add(res)
        lattices = [(M.face_group(M.faces.faces[fid]), rs) for fid, rs in residues.items()]
        missed = [h for h in big_holes if not any(reduce_mod(G, h) in rs for G, rs in lattices)]
        if not missed:
            missed = _missed_family_starts(M, big_holes, set(holes), found)
        if missed:
            need = max(max([M.height(h), *[abs(c) for c in M.lineality_coords(h)]]) for h in missed)
            raise CertificationError(
                f"box too small: {len(missed)} holes of the doubled box lie outside the families found, "
                f"e.g. {missed[0]}; try --box {max(need, box.radius + 1)}",
                Box(max(need, box.radius + 1)))
        verified = big
    return HoleDecomposition(families, mult, verified, box, holes)


def _missed_family_starts(M: AffineMonoid, big_holes: Sequence[Vector], seen: set,
                          found: dict) -> list[Vector]:
    # The least hole h of a family over F has h - g outside the cone for every
    # non-unit generator g of F; only such holes can start an unseen family.
    # All points involved lie in gp(Q), so the facet forms decide cone membership.
    forms = M.cone.facet_forms
    gsig = [tuple(dot(f, g) for f in forms) for g in M.generators]
    steps = {F.id: [i for i in F.generator_indices if M.height(M.generators[i]) > 0]
             for F in M.faces.faces if F is not M.units_face}
    out = []
    for h in big_holes:
        if h in seen:
            continue
        hs = [dot(f, h) for f in forms]
        inside = {i for i, s in enumerate(gsig) if all(a >= b for a, b in zip(hs, s))}
        starts = {fid for fid, gi in steps.items() if gi and inside.isdisjoint(gi)}
        if not starts:
            continue
        for F in maximal_hole_faces(M, h):
            if F.id in starts and (F.id, reduce_mod(M.face_group(F), h)) not in found:
                out.append(h)
                break
    return out


def localized_families(D: HoleDecomposition, F: Face) -> list[HoleFamily]:
    return [f for f in D.families if f.face.facet_set <= F.facet_set]


def localized_decomposition_keys(M: AffineMonoid, F: Face, box: Optional[Box] = None) -> set:
    """Families of Q_F computed from scratch, as (generator set of face, residue) pairs."""
    ML = localize(M, F)
    DL = family_decomposition(ML, box or default_box(ML))
    out = set()
    original = set(M.generators)
    for f in DL.families:
        gens = frozenset(g for g in ML.face_generators(f.face) if g in original)
        out.add((gens, reduce_mod(hnf_basis(ML.face_generators(f.face), M.ambient), f.representative)))
    return out


def family_keys_by_generators(M: AffineMonoid, fams: Sequence[HoleFamily]) -> set:
    out = set()
    for f in fams:
        gens = frozenset(M.face_generators(f.face))
        # gp of the localized face also contains the inverted interior point
        out.add((gens, reduce_mod(M.face_group(f.face), f.representative)))
    return out


def localization_mismatches(M: AffineMonoid, D: HoleDecomposition, F: Face,
                            samples: Sequence[Sequence[int]]) -> list[Vector]:
    """Sample points where 'hole of Q_F' disagrees with membership in a family over a face containing F."""
    fams = localized_families(D, F)
    bad = []
    for x in samples:
        x = tuple(x)
        hole = in_localized_saturation(M, F, x) and not in_localization(M, F, x)
        covered = in_localized_saturation(M, F, x) and any(f.in_coset(M, x) for f in fams)
        if hole != covered:
            bad.append(x)
    return bad


# ---------------------------------------------------------------------------
# ring-theoretic criteria


@dataclass
class RingReport:
    is_normal: bool
    is_locally_normal: bool
    serre_R1: bool
    serre_S2: bool
    depth_upper_bound: int
    depth_exact: Optional[int]
    is_seminormal: bool
    justification: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "is_normal": self.is_normal, "is_locally_normal": self.is_locally_normal,
            "serre_R1": self.serre_R1, "serre_S2": self.serre_S2,
            "depth_upper_bound": self.depth_upper_bound, "depth_exact": self.depth_exact,
            "is_seminormal": self.is_seminormal, "justification": dict(self.justification),
        }


def seminormal_by_families(M: AffineMonoid, D: HoleDecomposition) -> bool:
    """Every family representative lies in the rational span of its face."""
    return all(in_rational_span(M.face_generators(f.face), f.representative) for f in D.families)


def face_is_normal(M: AffineMonoid, F: Face) -> bool:
    gens = M.face_generators(F)
    if not gens:
        return True
    return is_normal(build(gens))


def holes_equal_translate(M: AffineMonoid, D: HoleDecomposition) -> bool:
    """Check, inside the certified box, that the holes are exactly p + F for a single family."""
    if len(D.families) != 1:
        return False
    fam = D.families[0]
    F, p = fam.face, fam.representative
    R = D.verified_box.radius
    holes = set(enumerate_holes(M, D.verified_box))
    on_face = [x for x in monoid_points(M, R) if M.on_face(F, x)]
    translate = {tuple(a + b for a, b in zip(p, f)) for f in on_face}
    translate = {x for x in translate if M.height(x) <= R and
                 all(abs(c) <= R for c in M.lineality_coords(x))}
    return translate == holes


def ring_report(M: AffineMonoid, D: HoleDecomposition) -> RingReport:
    d = M.star_dim
    dims = sorted(D.star_dims())
    normal = not D.families and is_normal(M)
    why = {}
    if normal:
        why["depth"] = "normal: maximal depth"
        return RingReport(True, True, True, True, d, d, True, why)
    locally_normal = all(k == 0 for k in dims)
    r1 = all(k != d - 1 for k in dims)
    s2 = all(k == d - 1 for k in dims)
    bound = 1 + min(dims) if dims else d
    why["depth_upper_bound"] = "one plus the least family dimension"
    exact = None
    if d >= 2 and 0 in dims:
        exact = 1
        why["depth"] = "a zero-dimensional family forces depth one"
    elif holes_equal_translate(M, D) and face_is_normal(M, D.families[0].face):
        exact = 1 + D.families[0].star_dim
        why["depth"] = "holes form a single translate of a normal face"
    semi = seminormal_by_families(M, D)
    why["seminormal"] = "representatives in the rational span of their faces"
    return RingReport(False, locally_normal, r1, s2, bound, exact, semi, why)


# ---------------------------------------------------------------------------
# intersection filtration


def filtration_levels(M: AffineMonoid, p: Sequence[int]) -> list[bool]:
    """For i = 0..d-1: is p in the intersection of Q_G over faces of star_dim i."""
    d = M.star_dim
    out = []
    for i in range(d):
        out.append(all(in_localization(M, G, p) for G in M.faces.faces if G.star_dim == i))
    return out


def annihilator_witness(M: AffineMonoid, fam: HoleFamily, limit: int = 500) -> Vector:
    """Push the representative by generators off the face while it stays a hole."""
    q = fam.representative
    off = [g for g in M.generators if not M.on_face(fam.face, g)]
    for _ in range(limit):
        for g in off:
            w = tuple(a + b for a, b in zip(q, g))
            if not in_Q(M, w) and not in_localization(M, fam.face, w):
                q = w
                break
        else:
            return q
    return q


@dataclass
class FiltrationReport:
    table: dict[Vector, list[bool]]
    strict_levels: set[int]
    family_levels: set[int]

    @property
    def consistent(self) -> bool:
        return self.strict_levels == self.family_levels


def intersection_filtration_check(M: AffineMonoid, sample_points: Optional[Sequence[Sequence[int]]] = None,
                                  D: Optional[HoleDecomposition] = None) -> FiltrationReport:
    """Compare strict steps of the chain of intersections with the family dimensions.

    Without samples, the holes of D together with one witness per family are used.
    """
    d = M.star_dim
    if sample_points is None:
        if D is None:
            D = family_decomposition(M)
        sample_points = list(D.holes) + [annihilator_witness(M, f) for f in D.families]
    table = {}
    strict = set()
    for p in sample_points:
        p = tuple(p)
        if not lattice_contains(M.lattice, p):
            raise ValueError(f"sample point {p} is not in the group of the monoid")
        lv = filtration_levels(M, p)
        table[p] = lv
        for i in range(d - 1):
            if lv[i + 1] and not lv[i]:
                strict.add(i)
    fam = {f.star_dim for f in D.families if f.star_dim <= d - 2} if D is not None else set()
    for i in strict:
        if D is not None and i not in D.star_dims():
            raise AssertionError(f"strict inclusion at level {i} without a family of that dimension")
    return FiltrationReport(table, strict, fam)
