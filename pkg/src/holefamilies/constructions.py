"""Example monoids and an independent Stanley-Reisner cohomology oracle."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Optional, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from .cone import dual_description, triangulate_and_volume
from .linalg import FieldSpec, Vector, dot
from .monoid import AffineMonoid, build, monoid_points


@dataclass(frozen=True)
class SimplicialComplex:
    n: int
    facets: tuple[frozenset[int], ...]   # vertices are 0..n-1

    def faces(self) -> set[frozenset[int]]:
        out = {frozenset()}
        for F in self.facets:
            for k in range(1, len(F) + 1):
                for s in combinations(sorted(F), k):
                    out.add(frozenset(s))
        return out

    def contains(self, s) -> bool:
        s = frozenset(s)
        return any(s <= F for F in self.facets)

    @property
    def dim(self) -> int:
        return max(len(F) for F in self.facets) - 1

    def link(self, F) -> "SimplicialComplex":
        F = frozenset(F)
        fs = [G - F for G in self.facets if F <= G]
        return SimplicialComplex(self.n, tuple(frozenset(x) for x in fs))


def simplicial_complex(n: int, facets: Sequence[Sequence[int]], warn: bool = True) -> SimplicialComplex:
    """Normalize a facet list: drop faces contained in others."""
    sets = [frozenset(f) for f in facets]
    if not sets:
        raise ValueError("a simplicial complex needs at least one facet")
    for s in sets:
        if any(v < 0 or v >= n for v in s):
            raise ValueError(f"vertex out of range in facet {sorted(s)}")
    keep = []
    for s in sets:
        if s in keep:
            continue
        if any(s < t for t in sets):
            if warn:
                warnings.warn(f"facet {sorted(s)} is contained in another facet and was dropped")
            continue
        keep.append(s)
    keep.sort(key=lambda s: (len(s), sorted(s)))
    return SimplicialComplex(n, tuple(keep))


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]   # vertices are 0..n-1


def graph(n: int, edges: Sequence[Sequence[int]]) -> Graph:
    out = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge {e} has a vertex out of range")
        key = (min(u, v), max(u, v))
        if key not in out:
            out.append(key)
    return Graph(n, tuple(sorted(out)))


# ---------------------------------------------------------------------------
# Stanley-Reisner type monoids


def sr_predicate(D: SimplicialComplex, q: Sequence[int]) -> bool:
    if any(a < 0 for a in q):
        return False
    supp = frozenset(i for i, a in enumerate(q) if a)
    return (not D.contains(supp)) or sum(q) % 2 == 0


def stanley_reisner_generators(D: SimplicialComplex) -> list[Vector]:
    n = D.n
    bound = 2 * n + 3
    # q - 2e_i has the same support and parity when q_i >= 3, so irreducibles
    # have entries at most 2; the degree bound is checked as well
    gens: list[Vector] = []
    cands = sorted((q for q in product(range(3), repeat=n) if any(q) and sum(q) <= bound),
                   key=lambda q: (sum(q), q))
    for q in cands:
        if not sr_predicate(D, q):
            continue
        reducible = False
        for g in gens:
            if all(a >= b for a, b in zip(q, g)):
                r = tuple(a - b for a, b in zip(q, g))
                if any(r) and sr_predicate(D, r):
                    reducible = True
                    break
        if not reducible:
            gens.append(q)
    return gens


def check_sr_generators(D: SimplicialComplex, M: AffineMonoid, radius: int) -> None:
    """Points generated by M agree with the defining predicate up to total degree radius."""
    gen = {q for q in monoid_points(M, radius) if sum(q) <= radius}
    pred = {q for q in product(range(radius + 1), repeat=D.n) if sum(q) <= radius and sr_predicate(D, q)}
    if gen != pred:
        raise AssertionError("generator set does not reproduce the defining predicate")


def stanley_reisner_monoid(D: SimplicialComplex, verify_radius: Optional[int] = None) -> AffineMonoid:
    gens = stanley_reisner_generators(D)
    M = build(gens)
    if verify_radius is None:
        verify_radius = 6 if D.n <= 4 else 5
    # the facet forms of the orthant are the coordinates, so heights are degrees
    check_sr_generators(D, M, verify_radius)
    return M


def _chain_dims_ranks(X: SimplicialComplex) -> tuple[dict[int, int], dict[int, list[int]]]:
    """Face counts per dimension (including the empty face) and integer invariant factors of boundaries."""
    faces = sorted(X.faces(), key=lambda s: (len(s), sorted(s)))
    by_dim: dict[int, list[frozenset]] = {}
    for s in faces:
        by_dim.setdefault(len(s) - 1, []).append(s)
    counts = {k: len(v) for k, v in by_dim.items()}
    inv: dict[int, list[int]] = {}
    for k in sorted(by_dim):
        if k - 1 not in by_dim:
            continue
        lower = {s: i for i, s in enumerate(by_dim[k - 1])}
        rows = len(by_dim[k - 1])
        cols = len(by_dim[k])
        M = [[0] * cols for _ in range(rows)]
        for j, s in enumerate(by_dim[k]):
            vs = sorted(s)
            for t, v in enumerate(vs):
                M[lower[s - {v}]][j] = (-1) ** t
        inv[k] = [int(x) for x in invariant_factors(Matrix(M), domain=ZZ)]
    return counts, inv


def reduced_homology(X: SimplicialComplex, p: int) -> dict[int, int]:
    """dim of reduced homology over the field of characteristic p, by degree (from -1 up)."""
    counts, inv = _chain_dims_ranks(X)

    def rank(k: int) -> int:
        if k not in inv:
            return 0
        return sum(1 for a in inv[k] if a != 0 and (p == 0 or a % p != 0))

    return {k: counts[k] - rank(k) - rank(k + 1) for k in sorted(counts)}


def hochster_oracle(D: SimplicialComplex, q: Sequence[int], field: FieldSpec | int = 0) -> tuple[int, ...]:
    """dims of H^j_m(k[D])_q for j = 0 .. dim D + 1, via reduced cohomology of links."""
    p = field.characteristic if isinstance(field, FieldSpec) else int(field)
    top = D.dim + 1
    out = [0] * (top + 1)
    if len(q) != D.n:
        raise ValueError("degree length differs from the number of vertices")
    if any(a > 0 for a in q):
        return tuple(out)
    F = frozenset(i for i, a in enumerate(q) if a < 0)
    if not D.contains(F):
        return tuple(out)
    h = reduced_homology(D.link(F), p)
    for j in range(top + 1):
        out[j] = h.get(j - len(F) - 1, 0)
    return tuple(out)


def rp2_facets() -> list[tuple[int, ...]]:
    """The 6-vertex triangulation of the real projective plane, vertices 0..5."""
    tri = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
           (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6)]
    return [tuple(v - 1 for v in t) for t in tri]


def rp2() -> SimplicialComplex:
    return simplicial_complex(6, rp2_facets())


def cone_over(D: SimplicialComplex) -> SimplicialComplex:
    apex = D.n
    return simplicial_complex(D.n + 1, [tuple(sorted(F)) + (apex,) for F in D.facets])


# ---------------------------------------------------------------------------
# edge rings and polytopes


def edge_ring_monoid(G: Graph) -> AffineMonoid:
    if not G.edges:
        raise ValueError("the graph needs at least one edge")
    gens = []
    for u, v in G.edges:
        e = [0] * G.n
        e[u] = 1
        e[v] = 1
        gens.append(tuple(e))
    return build(gens)


def two_triangle_graph(k: int) -> Graph:
    """Triangles {1,2,3} and {4,5,6} joined by k paths 3 - j - 4 (0-based labels)."""
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    for j in range(6, 6 + k):
        edges += [(2, j), (j, 3)]
    return graph(6 + k, edges)


def lattice_points(vertices: Sequence[Sequence[int]]) -> list[Vector]:
    """Lattice points of the convex hull, by a bounding-box scan against the facets."""
    verts = [tuple(v) for v in vertices]
    lifted = [v + (1,) for v in verts]
    C = dual_description(lifted)
    lo = [min(v[i] for v in verts) for i in range(len(verts[0]))]
    hi = [max(v[i] for v in verts) for i in range(len(verts[0]))]
    out = []
    for p in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if C.contains(p + (1,)):
            out.append(tuple(p))
    return out


def polytopal_monoid(points: Sequence[Sequence[int]], vertices_only: bool = False) -> AffineMonoid:
    pts = lattice_points(points) if vertices_only else [tuple(p) for p in points]
    return build([p + (1,) for p in pts])


@dataclass(frozen=True)
class VolumeCheck:
    normalized_volume: int
    lattice_points: int
    interior_points: int

    @property
    def bound_applies(self) -> bool:
        return self.interior_points > 0

    @property
    def holds(self) -> bool:
        return self.normalized_volume >= self.lattice_points - 1

    def as_dict(self) -> dict:
        return {"normalized_volume": self.normalized_volume, "lattice_points": self.lattice_points,
                "interior_points": self.interior_points, "bound_applies": self.bound_applies,
                "holds": self.holds}


def volume_check(vertices: Sequence[Sequence[int]]) -> VolumeCheck:
    """Normalized volume against the number of lattice points of a full-dimensional lattice polytope."""
    pts = lattice_points(vertices)
    lifted = [p + (1,) for p in pts]
    C = dual_description(lifted)
    if C.dim != len(lifted[0]):
        raise ValueError("the polytope is not full-dimensional")
    height = tuple([0] * (C.ambient - 1) + [1])
    _, vol = triangulate_and_volume(C, height)
    inner = sum(1 for q in lifted if all(dot(f, q) > 0 for f in C.facet_forms))
    return VolumeCheck(int(vol), len(pts), inner)


# ---------------------------------------------------------------------------
# catalog


def _fig1():
    return build([(2, 0), (3, 0), (0, 2), (0, 3)])


def _trung_hoa():
    return build([(0, 0, 1), (1, 0, 1), (0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1)])


def _nonpositive():
    return build([(0, 0, 2), (0, 0, -2), (1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 1, 1)])


def _parity():
    return stanley_reisner_monoid(simplicial_complex(2, [(0, 1)]))


def _two_points():
    return stanley_reisner_monoid(simplicial_complex(2, [(0,), (1,)]))


def _rp2_cone():
    return stanley_reisner_monoid(cone_over(rp2()))


_CATALOG: dict[str, Callable[[], AffineMonoid]] = {
    "fig1-quadrant": _fig1,
    "trung-hoa": _trung_hoa,
    "nonpositive-seminormal": _nonpositive,
    "edge-G7": lambda: edge_ring_monoid(two_triangle_graph(1)),
    "edge-G8": lambda: edge_ring_monoid(two_triangle_graph(2)),
    "sr-rp2-cone": _rp2_cone,
    "sr-two-points": _two_points,
    "parity-N2": _parity,
}

_BUILT: dict[str, AffineMonoid] = {}


def builtin_names() -> list[str]:
    return list(_CATALOG)


def builtin_examples() -> dict[str, Callable[[], AffineMonoid]]:
    """Names mapped to constructors; see get_builtin for cached instances."""
    return dict(_CATALOG)


def get_builtin(name: str) -> AffineMonoid:
    if name not in _CATALOG:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(_CATALOG)}")
    if name not in _BUILT:
        _BUILT[name] = _CATALOG[name]()
    return _BUILT[name]


def builtin_complex(name: str) -> Optional[SimplicialComplex]:
    return {
        "sr-rp2-cone": cone_over(rp2()),
        "sr-two-points": simplicial_complex(2, [(0,), (1,)]),
        "parity-N2": simplicial_complex(2, [(0, 1)]),
    }.get(name)
