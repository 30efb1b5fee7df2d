"""Affine monoids with exact membership oracles."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor
from typing import Optional, Sequence

from .cone import (ConeDescription, Face, FaceLattice, dual_description, face_lattice,
                   incidence_signs, triangulate)
from .linalg import (IntMatrix, Lattice, Vector, as_matrix, dot, feasible_mixed, hnf_basis,
                     lattice_contains, lattice_coordinates, reduce_mod, solve_nonneg_mixed,
                     solve_rational, vadd, vscale, vsub)

REGIONS = ("Q", "gpQ", "cone", "saturation", "interior", "localized", "localized_saturation")


@dataclass(frozen=True)
class Box:
    """Points x with sum of facet heights <= radius and lineality coordinates in [-radius, radius]."""

    radius: int

    def doubled(self) -> "Box":
        return Box(2 * self.radius)


@dataclass
class AffineMonoid:
    generators: IntMatrix
    lattice: Lattice
    cone: ConeDescription
    faces: FaceLattice
    units_face: Face
    star_dim: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ambient(self) -> int:
        return self.lattice.ambient

    @property
    def facet_forms(self) -> IntMatrix:
        return self.cone.facet_forms

    def height(self, v: Sequence[int]) -> int:
        # the total facet height is itself a linear form
        w = self._cache.get("height")
        if w is None:
            w = self._cache["height"] = tuple(map(sum, zip(*self.cone.facet_forms))) or (0,) * self.ambient
        return dot(w, v)

    def lineality_coords(self, v: Sequence[int]) -> Vector:
        return tuple(dot(b, v) for b in self.cone.lineality.basis)

    def face_generators(self, F: Face) -> list[Vector]:
        return [self.generators[i] for i in F.generator_indices]

    def interior_point(self, F: Face) -> Vector:
        p = tuple([0] * self.ambient)
        for i in F.generator_indices:
            if i not in self.units_face.generator_indices:
                p = vadd(p, self.generators[i])
        return p

    def facets(self) -> list[Face]:
        return self.faces.facets()

    def face_group(self, F: Face) -> Lattice:
        """gp(F), the integer span of the generators on F."""
        key = ("gpF", F.id)
        if key not in self._cache:
            self._cache[key] = hnf_basis(self.face_generators(F), self.ambient)
        return self._cache[key]

    def on_face(self, F: Face, v: Sequence[int]) -> bool:
        return all(dot(self.cone.facet_forms[j], v) == 0 for j in F.facet_set)

    def is_simplicial(self) -> bool:
        return len(self.cone.facet_forms) == self.star_dim

    def is_positive(self) -> bool:
        return self.units_face.star_dim == 0 and self.cone.lineality.rank == 0


@dataclass(frozen=True)
class MembershipQuery:
    point: Vector
    region: str
    face: Optional[Face] = None


@dataclass(frozen=True)
class MembershipResult:
    value: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.value


@dataclass(frozen=True)
class ModuleGenerators:
    points: tuple[Vector, ...]
    witness: tuple[tuple[int, ...], ...]


def build(generators: Sequence[Sequence[int]]) -> AffineMonoid:
    rows = as_matrix(generators)
    if not rows:
        raise ValueError("a monoid needs at least one generator")
    gens: list[Vector] = []
    for g in rows:
        if any(g) and g not in gens:
            gens.append(g)
    if not gens:
        raise ValueError("all generators are zero")
    gens_t = tuple(gens)
    N = len(gens_t[0])
    C = dual_description(gens_t)
    L = face_lattice(C, gens_t)
    incidence_signs(L, gens_t)
    M = AffineMonoid(gens_t, hnf_basis(gens_t, N), C, L, L.bottom, L.top.star_dim)
    _check_units(M)
    return M


def _check_units(M: AffineMonoid) -> None:
    # the units face must be a group: every generator on it has its negative in Q
    for i in M.units_face.generator_indices:
        if not in_Q(M, vscale(-1, M.generators[i])):
            raise AssertionError("units face is not a group")


def _check_dim(M: AffineMonoid, v: Sequence[int]) -> Vector:
    if len(v) != M.ambient:
        raise ValueError(f"point of length {len(v)} in ambient dimension {M.ambient}")
    return tuple(int(a) for a in v)


# ---------------------------------------------------------------------------
# membership


def in_gp(M: AffineMonoid, q: Sequence[int]) -> bool:
    return lattice_contains(M.lattice, _check_dim(M, q))


def in_cone(M: AffineMonoid, q: Sequence[int]) -> bool:
    return M.cone.contains(_check_dim(M, q))


def in_saturation(M: AffineMonoid, q: Sequence[int]) -> bool:
    q = _check_dim(M, q)
    return in_gp(M, q) and all(dot(f, q) >= 0 for f in M.cone.facet_forms)


def in_localized_saturation(M: AffineMonoid, F: Face, q: Sequence[int]) -> bool:
    q = _check_dim(M, q)
    return in_gp(M, q) and all(dot(M.cone.facet_forms[j], q) >= 0 for j in F.facet_set)


def in_interior(M: AffineMonoid, F: Face, q: Sequence[int]) -> bool:
    q = _check_dim(M, q)
    if not in_gp(M, q):
        return False
    for j, f in enumerate(M.cone.facet_forms):
        h = dot(f, q)
        if j in F.facet_set:
            if h != 0:
                return False
        elif h <= 0:
            return False
    return True


def in_Q(M: AffineMonoid, q: Sequence[int]) -> bool:
    q = _check_dim(M, q)
    if not in_saturation(M, q):
        return False
    return feasible_mixed(M.generators, M.units_face.generator_indices, q)


def in_localization(M: AffineMonoid, F: Face, q: Sequence[int]) -> bool:
    """Exact test of q in Q_F = Q + gp(F)."""
    q = _check_dim(M, q)
    if not in_localized_saturation(M, F, q):
        return False
    if F.id == M.faces.top.id:
        return True
    return feasible_mixed(M.generators, F.generator_indices, q)


def contains(M: AffineMonoid, query: MembershipQuery) -> MembershipResult:
    q = _check_dim(M, query.point)
    reg = query.region
    if reg == "gpQ":
        y = lattice_coordinates(M.lattice, q)
        return MembershipResult(y is not None, y)
    if reg == "cone":
        return MembershipResult(in_cone(M, q))
    if reg == "saturation":
        return MembershipResult(in_saturation(M, q))
    if reg in ("interior", "localized", "localized_saturation") and query.face is None:
        raise ValueError(f"region {reg} needs a face")
    if reg == "interior":
        return MembershipResult(in_interior(M, query.face, q))
    if reg == "localized_saturation":
        return MembershipResult(in_localized_saturation(M, query.face, q))
    if reg == "Q":
        if not in_saturation(M, q):
            return MembershipResult(False)
        x = solve_nonneg_mixed(M.generators, M.units_face.generator_indices, q)
        return MembershipResult(x is not None, x)
    if reg == "localized":
        if not in_localized_saturation(M, query.face, q):
            return MembershipResult(False)
        x = solve_nonneg_mixed(M.generators, query.face.generator_indices, q)
        return MembershipResult(x is not None, x)
    raise ValueError(f"unknown region {reg!r}; expected one of {REGIONS}")


# ---------------------------------------------------------------------------
# box enumeration


def _region_ok(M: AffineMonoid, v: Sequence[int], R: int, lin_cap: int) -> bool:
    return M.height(v) <= R and all(abs(c) <= lin_cap for c in M.lineality_coords(v))


def monoid_points(M: AffineMonoid, R: int, lin_cap: Optional[int] = None) -> set[Vector]:
    """All points of Q with height <= R and lineality coordinates within lin_cap."""
    if lin_cap is None:
        lin_cap = R
    key = ("Qbox", R, lin_cap)
    if key in M._cache:
        return M._cache[key]
    k = M.cone.lineality.rank
    slack = 0
    if k:
        c = max(max((abs(x) for x in M.lineality_coords(g)), default=0) for g in M.generators)
        # reorderings of a sum keep partial sums this close to the segment
        slack = (k + 1) * c
    steps = [(g, M.height(g)) for g in M.generators]
    zero = tuple([0] * M.ambient)
    seen = {zero}
    stack = [zero]
    cap = lin_cap + slack
    while stack:
        v = stack.pop()
        hv = M.height(v)
        for g, hg in steps:
            if hv + hg > R:
                continue
            w = vadd(v, g)
            if w in seen:
                continue
            if k and any(abs(c) > cap for c in M.lineality_coords(w)):
                continue
            seen.add(w)
            stack.append(w)
    if k:
        seen = {v for v in seen if all(abs(c) <= lin_cap for c in M.lineality_coords(v))}
    M._cache[key] = seen
    return seen


def saturation_points(M: AffineMonoid, R: int) -> set[Vector]:
    """All points of the normalization with height <= R and lineality coordinates in [-R, R]."""
    key = ("Qbar", R)
    if key in M._cache:
        return M._cache[key]
    S = saturation_module_generators(M).points
    extra = max((abs(c) for s in S for c in M.lineality_coords(s)), default=0)
    base = monoid_points(M, R, R + extra)
    out = set()
    for s in S:
        hs = M.height(s)
        if hs > R:
            continue
        for q in base:
            if M.height(q) + hs <= R:
                w = vadd(s, q)
                if _region_ok(M, w, R, R):
                    out.add(w)
    M._cache[key] = out
    return out


# ---------------------------------------------------------------------------
# module generators of the normalization


def _pointed_simplices(M: AffineMonoid) -> list[tuple[int, ...]]:
    units = set(M.units_face.generator_indices)
    idx = [i for i in range(len(M.generators)) if i not in units]
    if not idx:
        return []
    # facet heights kill the lineality and are injective modulo it
    images = [M.cone.heights(M.generators[i]) for i in idx]
    simp = triangulate(images)
    return [tuple(idx[j] for j in s) for s in simp]


def saturation_module_generators(M: AffineMonoid) -> ModuleGenerators:
    if "modgens" in M._cache:
        return M._cache["modgens"]
    N = M.ambient
    units = list(M.units_face.generator_indices)
    unit_lat = hnf_basis([M.generators[i] for i in units], N)
    lin_basis = list(M.cone.lineality.basis)
    B = M.lattice.basis
    simplices = _pointed_simplices(M)
    if not simplices:
        simplices = [()]
    cands: set[Vector] = set()
    for s in simplices:
        gens = [M.generators[i] for i in s]
        sub = [lattice_coordinates(M.lattice, v) for v in gens + [M.generators[i] for i in units]]
        H = hnf_basis(sub, len(B))
        diag = [H.basis[i][c] for i, c in enumerate(H.pivots)]
        if len(diag) != len(B):
            raise AssertionError("simplicial cone is not full rank")
        ranges = [range(d) for d in diag]
        for a in product(*ranges):
            x = [0] * N
            for ai, row in zip(a, B):
                if ai:
                    x = [xa + ai * rb for xa, rb in zip(x, row)]
            x = tuple(x)
            lam = solve_rational(gens + lin_basis, x) if (gens or lin_basis) else ()
            if lam is None:
                raise AssertionError("lattice point outside the span")
            for c, g in zip(lam[: len(gens)], gens):
                f = floor(c)
                if f:
                    x = vsub(x, vscale(f, g))
            cands.add(reduce_mod(unit_lat, x))
    reduced: list[Vector] = []
    for s in sorted(cands, key=lambda v: (M.height(v), v)):
        if any(in_Q(M, vsub(s, t)) for t in reduced):
            continue
        reduced.append(s)
    out = ModuleGenerators(tuple(reduced), tuple(simplices))
    M._cache["modgens"] = out
    return out


def normalization_generators(M: AffineMonoid) -> list[Vector]:
    """A generating set of the normalization as a monoid (Hilbert basis when positive)."""
    cands = set(saturation_module_generators(M).points) | set(M.generators)
    cands.discard(tuple([0] * M.ambient))
    if M.cone.lineality.rank:
        units = _saturated_units(M)
        pointed = {c for c in cands if any(dot(f, c) for f in M.cone.facet_forms)}
        return sorted(set(units) | {vscale(-1, v) for v in units}) + sorted(pointed)
    out: list[Vector] = []
    for x in sorted(cands, key=lambda v: (M.height(v), v)):
        if any(c != x and in_saturation(M, vsub(x, c)) for c in cands):
            continue
        out.append(x)
    return out


def _saturated_units(M: AffineMonoid) -> list[Vector]:
    # basis of gp(Q) intersected with the lineality space
    from .linalg import integer_kernel

    B = M.lattice.basis
    forms = M.cone.facet_forms
    # coordinates y with (y*B) killed by every facet form
    rows = [tuple(dot(f, b) for b in B) for f in forms]
    ker = integer_kernel(rows, len(B)) if rows else tuple(
        tuple(int(i == j) for j in range(len(B))) for i in range(len(B)))
    out = []
    for y in ker:
        v = [0] * M.ambient
        for yi, b in zip(y, B):
            v = [a + yi * c for a, c in zip(v, b)]
        out.append(tuple(v))
    return out


def is_normal(M: AffineMonoid) -> bool:
    return saturation_module_generators(M).points == (tuple([0] * M.ambient),)


# ---------------------------------------------------------------------------
# localization and seminormality


def localize(M: AffineMonoid, F: Face) -> AffineMonoid:
    f0 = M.interior_point(F)
    gens = list(M.generators)
    if any(f0):
        gens.append(vscale(-1, f0))
    return build(gens)


def corresponding_face(M: AffineMonoid, ML: AffineMonoid, G: Face) -> Face:
    """The face of a localization ML that corresponds to the face G of M."""
    target = set(M.face_generators(G))
    original = set(M.generators)
    for H in ML.faces.faces:
        if set(ML.face_generators(H)) & original == target:
            return H
    raise KeyError("face has no counterpart in the localization")


def is_seminormal_pointwise(M: AffineMonoid, box_radius: int):
    """Check 2q, 3q in Q implies q in Q on all holes in the box.

    Returns (True, None) or (False, counterexample).
    """
    if box_radius < 1:
        raise ValueError("box_radius must be at least 1")
    Qp = monoid_points(M, box_radius)
    for q in sorted(saturation_points(M, box_radius) - Qp, key=lambda v: (M.height(v), v)):
        if in_Q(M, vscale(2, q)) and in_Q(M, vscale(3, q)):
            return False, q
    return True, None
