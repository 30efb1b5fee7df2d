"""Polyhedral geometry of a rational cone given by integer generators."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .linalg import (IntMatrix, Lattice, Vector, as_matrix, determinant, dot, hnf_basis,
                     hnf_with_transform, lattice_coordinates, primitive, rational_rank,
                     saturation, solve_rational)


@dataclass(frozen=True)
class ConeDescription:
    ambient: int
    rays: IntMatrix
    facet_forms: IntMatrix
    lineality: Lattice
    dim: int
    generators: IntMatrix = field(default=(), repr=False)

    def heights(self, v: Sequence[int]) -> Vector:
        return tuple(dot(f, v) for f in self.facet_forms)

    def contains(self, v: Sequence[int]) -> bool:
        if not _in_span(self, v):
            return False
        return all(dot(f, v) >= 0 for f in self.facet_forms)

    @property
    def is_pointed(self) -> bool:
        return self.lineality.rank == 0


def _in_span(C: ConeDescription, v: Sequence[int]) -> bool:
    if not any(v):
        return True
    return solve_rational(C.generators, v) is not None


def _extreme_rays_of_dual(rows: list[Vector], r: int) -> list[Vector]:
    """Extreme rays of {y in Q^r : a.y >= 0 for all rows a} (rows of rank r)."""
    rows = sorted(set(primitive(a) for a in rows if any(a)))
    basis: list[int] = []
    for i, a in enumerate(rows):
        if rational_rank([rows[j] for j in basis] + [a]) > len(basis):
            basis.append(i)
        if len(basis) == r:
            break
    B = [rows[i] for i in basis]
    rays: list[Vector] = []
    for k in range(r):
        e = [0] * r
        e[k] = 1
        # solve B y = e_k, i.e. y * B^T = e_k
        y = solve_rational([tuple(B[i][j] for i in range(r)) for j in range(r)], e)
        den = 1
        for c in y:
            den = den * c.denominator // gcd(den, c.denominator)
        rays.append(primitive(tuple(int(c * den) for c in y)))
    tight: list[set[int]] = []
    for y in rays:
        tight.append({i for i in basis if dot(rows[i], y) == 0})
    for i, a in enumerate(rows):
        if i in basis:
            continue
        vals = [dot(a, y) for y in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos] + [rays[k] for k in zer]
        new_tight = [tight[k] for k in pos] + [tight[k] | {i} for k in zer]
        for p in pos:
            for n in neg:
                common = tight[p] & tight[n]
                if len(common) < r - 2:
                    continue
                if any(w != p and w != n and common <= tight[w] for w in range(len(rays))):
                    continue
                vp, vn = vals[p], vals[n]
                y = primitive(tuple(vp * a2 - vn * a1 for a1, a2 in zip(rays[p], rays[n])))
                new_rays.append(y)
                new_tight.append(common | {i})
        rays, tight = new_rays, new_tight
    return sorted(rays)


def span_pivots(gens: Sequence[Sequence[int]], ambient: int) -> tuple[int, ...]:
    """Coordinates on which the rational span of gens projects isomorphically."""
    return hnf_basis(gens, ambient).pivots


def dual_description(generators: Sequence[Sequence[int]]) -> ConeDescription:
    """Facet forms, extreme rays and lineality of the cone spanned by generators."""
    gens = as_matrix(generators)
    nonzero = [g for g in gens if any(g)]
    if not nonzero:
        raise ValueError("cone needs at least one nonzero generator")
    N = len(gens[0])
    piv = span_pivots(nonzero, N)
    r = len(piv)
    proj = [tuple(g[c] for c in piv) for g in nonzero]
    normals = _extreme_rays_of_dual(proj, r)
    forms = []
    for y in normals:
        f = [0] * N
        for c, val in zip(piv, y):
            f[c] = val
        forms.append(primitive(tuple(f)))
    forms = tuple(sorted(set(forms)))
    lin_gens = [g for g in nonzero if all(dot(f, g) == 0 for f in forms)]
    lineality = saturation(lin_gens, N) if lin_gens else hnf_basis([], N)
    lin_rank = lineality.rank
    rays = []
    groups: dict[frozenset[int], Vector] = {}
    for g in nonzero:
        if g in lin_gens:
            continue
        z = frozenset(k for k, f in enumerate(forms) if dot(f, g) == 0)
        if z in groups:
            continue
        face_dim = r - rational_rank([forms[k] for k in z]) if z else r
        if face_dim == lin_rank + 1:
            groups[z] = g
    for z, g in groups.items():
        rays.append(primitive(g))
    rays = tuple(sorted(set(rays)))
    return ConeDescription(N, rays, forms, lineality, r, tuple(nonzero))


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Face:
    id: int
    facet_set: frozenset[int]
    generator_indices: tuple[int, ...]
    star_dim: int
    span: Lattice

    @property
    def facet_mask(self) -> int:
        m = 0
        for j in self.facet_set:
            m |= 1 << j
        return m

    def __repr__(self):
        return f"Face(id={self.id}, facets={sorted(self.facet_set)}, star_dim={self.star_dim})"


@dataclass
class FaceLattice:
    faces: list[Face]
    covers: dict[int, tuple[int, ...]]          # face id -> ids of faces covering it
    signs: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def bottom(self) -> Face:
        return self.faces[0]

    @property
    def top(self) -> Face:
        return self.faces[-1]

    def by_facets(self, facets) -> Face:
        key = frozenset(facets)
        for F in self.faces:
            if F.facet_set == key:
                return F
        raise KeyError(f"no face with facet set {sorted(key)}")

    def contains_face(self, G: Face, F: Face) -> bool:
        """True when F is a subface of G."""
        return G.facet_set <= F.facet_set

    def facets(self) -> list[Face]:
        d = self.top.star_dim
        return [F for F in self.faces if F.star_dim == d - 1]


def face_lattice(C: ConeDescription, monoid_generators: Sequence[Sequence[int]]) -> FaceLattice:
    gens = as_matrix(monoid_generators)
    N = C.ambient
    nf = len(C.facet_forms)
    zero_sets = [frozenset(k for k, f in enumerate(C.facet_forms) if dot(f, g) == 0) for g in gens]
    all_facets = frozenset(range(nf))

    def close(gen_idx: frozenset[int]) -> frozenset[int]:
        s = set(all_facets)
        for i in gen_idx:
            s &= zero_sets[i]
        return frozenset(s)

    full = frozenset(range(len(gens)))
    seen: dict[frozenset[int], frozenset[int]] = {frozenset(): full}
    queue = [frozenset()]
    while queue:
        fs = queue.pop()
        gi = seen[fs]
        for j in range(nf):
            if j in fs:
                continue
            ng = frozenset(i for i in gi if j in zero_sets[i])
            nfs = close(ng) if ng else all_facets
            if nfs not in seen:
                seen[nfs] = ng
                queue.append(nfs)
    bottom_gens = seen[all_facets] if all_facets in seen else frozenset()
    base_rank = rational_rank([gens[i] for i in sorted(bottom_gens)]) if bottom_gens else 0
    raw = []
    for fs, gi in seen.items():
        idx = tuple(sorted(gi))
        rk = rational_rank([gens[i] for i in idx]) if idx else 0
        raw.append((rk - base_rank, tuple(sorted(fs)), fs, idx))
    raw.sort(key=lambda t: (t[0], t[1]))
    faces = []
    for k, (sd, _, fs, idx) in enumerate(raw):
        faces.append(Face(k, fs, idx, sd, hnf_basis([gens[i] for i in idx], N)))
    covers: dict[int, list[int]] = {F.id: [] for F in faces}
    for F in faces:
        for G in faces:
            if G.star_dim == F.star_dim + 1 and G.facet_set < F.facet_set:
                covers[F.id].append(G.id)
    L = FaceLattice(faces, {k: tuple(v) for k, v in covers.items()})
    _check_graded(L)
    return L


def _check_graded(L: FaceLattice) -> None:
    # every non-top face is covered, every non-bottom face covers something
    top = L.top.id
    covered = {g for v in L.covers.values() for g in v}
    for F in L.faces:
        if F.id != top and not L.covers[F.id]:
            raise AssertionError(f"face {F.id} has no cover; lattice not graded")
        if F.id != L.bottom.id and F.id not in covered:
            raise AssertionError(f"face {F.id} covers nothing; lattice not graded")


def incidence_signs(L: FaceLattice, monoid_generators: Sequence[Sequence[int]]) -> FaceLattice:
    """Populate L.signs so that every length-two interval anticommutes."""
    gens = as_matrix(monoid_generators)
    signs = {}
    for F in L.faces:
        fset = set(F.generator_indices)
        for gid in L.covers[F.id]:
            G = L.faces[gid]
            v = next(gens[i] for i in G.generator_indices if i not in fset)
            piv = G.span.pivots
            M = [tuple(v[c] for c in piv)] + [tuple(row[c] for c in piv) for row in F.span.basis]
            det = determinant(M)
            if det == 0:
                raise AssertionError("degenerate orientation")
            # the HNF basis of G restricted to its pivots has positive determinant
            signs[(F.id, gid)] = 1 if det > 0 else -1
    L.signs = signs
    check_diamonds(L)
    return L


def check_diamonds(L: FaceLattice) -> None:
    for F in L.faces:
        tops: dict[int, int] = {}
        for g in L.covers[F.id]:
            for h in L.covers[g]:
                tops[h] = tops.get(h, 0) + L.signs[(F.id, g)] * L.signs[(g, h)]
        for h, s in tops.items():
            if s != 0:
                raise AssertionError(f"diamond condition fails on [{F.id}, {h}]")


# ---------------------------------------------------------------------------
# triangulation and volume


def triangulate(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Placing triangulation of cone(vectors) into simplicial cones on the vectors.

    The vectors must span a pointed cone.  Returns index tuples.
    """
    vecs = as_matrix(vectors)
    order = [i for i, v in enumerate(vecs) if any(v)]
    simplices: list[tuple[int, ...]] = []
    used: list[int] = []
    rank = 0
    for i in order:
        v = vecs[i]
        if not used:
            used.append(i)
            simplices = [(i,)]
            rank = 1
            continue
        new_rank = rational_rank([vecs[j] for j in used] + [v])
        if new_rank > rank:
            simplices = [tuple(sorted(s + (i,))) for s in simplices]
            rank = new_rank
            used.append(i)
            continue
        C = dual_description([vecs[j] for j in used])
        if C.contains(v):
            used.append(i)
            continue
        added = []
        for s in simplices:
            for w in s:
                tau = tuple(x for x in s if x != w)
                for f in C.facet_forms:
                    if dot(f, v) < 0 and all(dot(f, vecs[x]) == 0 for x in tau):
                        added.append(tuple(sorted(tau + (i,))))
                        break
        simplices.extend(added)
        used.append(i)
    return sorted(set(simplices))


def lattice_volume(vectors: Sequence[Sequence[int]], lattice: Lattice) -> int:
    """|det| of full-rank vectors in coordinates of the given lattice basis."""
    coords = []
    for v in vectors:
        y = lattice_coordinates(lattice, v)
        if y is None:
            raise ValueError("vector outside the lattice")
        coords.append(y)
    return abs(determinant(coords))


def triangulate_and_volume(C: ConeDescription, height_form: Optional[Sequence[int]] = None):
    """Simplicial subcones on the extreme rays and the normalized volume.

    With a height form the volume is that of the cross section at height one,
    measured in the saturated lattice of the span; without one it is the sum of
    the simplicial multiplicities.
    """
    if not C.is_pointed:
        if C.dim == C.lineality.rank:
            return [], None
        raise ValueError("cone with lineality: triangulate its pointed quotient")
    rays = C.rays
    simplices = triangulate(rays)
    L = saturation(rays, C.ambient)
    total = Fraction(0)
    for s in simplices:
        vol = lattice_volume([rays[i] for i in s], L)
        if height_form is not None:
            den = 1
            for i in s:
                h = dot(height_form, rays[i])
                if h <= 0:
                    raise ValueError("height form must be positive on every ray")
                den *= h
            total += Fraction(vol, den)
        else:
            total += vol
    simp = [tuple(rays[i] for i in s) for s in simplices]
    if total.denominator == 1:
        total = int(total)
    return simp, total
