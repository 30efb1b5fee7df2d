"""Acceptance criteria; each test prints one PASS/FAIL line with its runtime."""
import random
import time

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from holefamilies.cohomology import (compare_characteristics, degree_complex, differential_squares_vanish,
                                     graded_cohomology, in_minus_interior, interior_sentinel,
                                     nonvan_witnesses, seminormal_vanishing_check, star_depth, support_scan)
from holefamilies.constructions import builtin_names, get_builtin, volume_check
from holefamilies.holes import (Box, CertificationError, enumerate_holes, family_decomposition,
                                holes_equal_translate, intersection_filtration_check, localization_mismatches,
                                ring_report, seminormal_by_families)
from holefamilies.linalg import lattice_contains, vscale, vsub
from holefamilies.monoid import build, in_gp, is_seminormal_pointwise, saturation_module_generators

from common import FIG1, TRUNG_HOA
from oracles import holes_in_box, lattice_volume_2d

# random monoids whose normalization needs more module generators than this are redrawn
MAX_MODULE_GENERATORS = 12
ORACLE_BOUND = 6


class Criterion:
    """Collects failed checks; prints one PASS/FAIL line with the runtime on exit."""

    def __init__(self, capsys, name, limit):
        self.capsys, self.name, self.limit = capsys, name, limit
        self.failures = []
        self.info = ""

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, kind, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc is not None:
            self.failures.append(f"{kind.__name__}: {exc}")
        self.check(elapsed < self.limit, f"runtime {elapsed:.1f}s exceeds {self.limit}s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "" if not self.failures else " :: " + "; ".join(map(str, self.failures[:5]))
        with self.capsys.disabled():
            print(f"\n{status} {self.name} ({elapsed:.1f}s{self.info}){detail}")
        assert not self.failures, self.failures


def _h(M, q, p):
    return graded_cohomology(M, q, [p]).dims[p]


def test_quadrant_criterion(capsys):
    with Criterion(capsys, "quadrant: two facet families, S2 without R1, depth 2", 1) as c:
        M = build(FIG1)
        D = family_decomposition(M)
        c.check(len(D.families) == 2, "family count")
        c.check({tuple(sorted(f.face.facet_set)) for f in D.families} == {(0,), (1,)}, "faces are the facets")
        c.check({f.representative for f in D.families} == {(0, 1), (1, 0)}, "representatives")
        r = ring_report(M, D)
        c.check(r.serre_S2 and not r.serre_R1 and not r.is_seminormal, "S2/R1/seminormal")
        for p in (0, 2, 3):
            c.check(star_depth(M, D, p).star_depth == 2, f"depth at char {p}")


def test_wall_criterion(capsys):
    with Criterion(capsys, "wall: one facet family, bound 3, depth 2, no characteristic dependence", 5) as c:
        M = build(TRUNG_HOA)
        D = family_decomposition(M)
        c.check(len(D.families) == 1, "family count")
        f = D.families[0]
        c.check(f.star_dim == 2 and M.cone.facet_forms[next(iter(f.face.facet_set))] == (0, 1, 0), "face y = 0")
        c.check(ring_report(M, D).depth_upper_bound == 3, "upper bound")
        S = support_scan(M, D, [0, 2, 3, 5])
        dep = star_depth(M, D, 0, S)
        c.check(dep.star_depth == 2 and dep.witness_degree == (0, 1, 0), ("depth", dep))
        c.check(S.nonzero(0, 2) == [(0, 1, 0)], ("h^2 support", S.nonzero(0, 2)))
        c.check(_h(M, (0, 1, 0), 0)[2] == 1, "h^2 is one dimensional")
        c.check(compare_characteristics(M, D, [2, 3, 5], S).differences == [], "characteristic differences")


def test_nonpositive_criterion(capsys):
    with Criterion(capsys, "z-axis: one zero-dimensional family, depth 1, seminormal", 2) as c:
        M = get_builtin("nonpositive-seminormal")
        D = family_decomposition(M)
        c.check([f.star_dim for f in D.families] == [0], "one zero-dimensional family")
        fam = D.families[0]
        odd = [(0, 0, z) for z in range(-7, 8, 2)]
        even = [(0, 0, z) for z in range(-6, 7, 2)]
        c.check(all(fam.contains(M, q) for q in odd) and not any(fam.contains(M, q) for q in even), "odd z-axis")
        c.check(star_depth(M, D, 0).star_depth == 1, "depth")
        c.check(seminormal_by_families(M, D), "seminormal by families")
        c.check(is_seminormal_pointwise(M, 2 * D.verified_box.radius)[0], "seminormal pointwise")
        S = support_scan(M, D, [0])
        for q, r in S.reports.items():
            want = 1 if fam.contains(M, q) else 0
            c.check(r.dims[0][1] == want, ("h^1", q, r.dims[0]))


def test_edge_ring_criterion(capsys):
    with Criterion(capsys, "edge ring G7: holes are one translate of a face, depth 7", 60) as c:
        M = get_builtin("edge-G7")
        D = family_decomposition(M)
        c.check(holes_equal_translate(M, D), "holes equal F + q")
        c.check(D.families[0].representative == (1, 1, 1, 1, 1, 1, 0), "representative")
        c.check(D.families[0].star_dim == 6, "star dimension")
        c.check(ring_report(M, D).depth_exact == 7, "exact depth")


def test_projective_cone_criterion(capsys):
    with Criterion(capsys, "projective plane cone: depth 5 or 4 by characteristic", 600) as c:
        M = get_builtin("sr-rp2-cone")
        D = family_decomposition(M)
        S = support_scan(M, D, [0, 2, 3])
        for p, want in ((0, 5), (3, 5), (2, 4)):
            c.check(star_depth(M, D, p, S).star_depth == want, f"depth at char {p}")
        rep = compare_characteristics(M, D, [2, 3], S)
        c.check(rep.indices.isdisjoint({0, 1, 2, 6, 7}), ("indices", rep.indices))


# ---------------------------------------------------------------------------
# property suite


def random_monoid(rng):
    while True:
        N = rng.choice([2, 3])
        gens = [tuple(rng.randint(0, 6) for _ in range(N)) for _ in range(rng.randint(N, N + 2))]
        try:
            M = build(gens)
        except ValueError:
            continue
        if len(saturation_module_generators(M).points) <= MAX_MODULE_GENERATORS:
            return gens, M


def _samples(M, D, rng, n):
    out = [interior_sentinel(M)] + list(D.holes[:n])
    while len(out) < 2 * n:
        q = tuple(rng.randint(-4, 4) for _ in range(M.ambient))
        if in_gp(M, q):
            out.append(q)
    return out


def property_failures(M, D, rng, n=15):
    bad = []
    steps = [M.height(g) for g in M.generators if M.height(g) > 0]
    if D.families:
        D2 = family_decomposition(M, Box(D.box.radius + min(steps)))
        if D2.keys() != D.keys():
            bad.append("unique")
    holes = enumerate_holes(M, D.verified_box)
    if not all(any(f.contains(M, h) for f in D.families) for h in holes):
        bad.append("coverage")
    for f in D.families:
        own = [h for h in holes if f.contains(M, h)]
        if own and all(any(g.contains(M, h) for g in D.families if g is not f) for h in own):
            bad.append("irredundant")
    for F in M.faces.faces:
        cF = M.interior_point(F)
        pts = list(D.holes[:30]) + [vsub(h, vscale(k, cF)) for h in D.holes[:10] for k in (1, 2)]
        if localization_mismatches(M, D, F, pts):
            bad.append("localized holes")
            break
    e_d = tuple([0] * M.star_dim + [1])
    for q in _samples(M, D, rng, n):
        C = degree_complex(M, q)
        if not differential_squares_vanish(C):
            bad.append(("d^2", q))
        h = graded_cohomology(M, q, [0, 2]).dims
        for v in h.values():
            if sum((-1) ** i * x for i, x in enumerate(v)) != C.euler_characteristic():
                bad.append(("euler", q))
            if in_minus_interior(M, q) and v != e_d:
                bad.append(("top degree", q))
    if not seminormal_vanishing_check(M, D).consistent:
        bad.append("seminormal vanishing")
    if not intersection_filtration_check(M, None, D).consistent:
        bad.append("filtration")
    for f in D.families:
        if f.star_dim == 0:
            continue
        ws = nonvan_witnesses(M, f, 3)
        want = tuple(1 if i == f.star_dim + 1 else 0 for i in range(M.star_dim + 1))
        if len(ws) < 3 or any(not lattice_contains(M.face_group(f.face), vsub(w, f.representative))
                              or _h(M, w, 0) != want for w in ws):
            bad.append(("translates", f.key()))
    return bad


def _random_polytope(rng, dim):
    while True:
        pts = [tuple(rng.randint(-3, 3) for _ in range(dim)) for _ in range(rng.randint(dim + 1, dim + 4))]
        try:
            vc = volume_check(pts)
        except ValueError:
            continue
        if vc.interior_points:
            return pts, vc


def test_property_suite(capsys):
    with Criterion(capsys, "property suite: built-in and 50 random monoids, 50 polytopes", 900) as c:
        for name in builtin_names():
            M = get_builtin(name)
            D = family_decomposition(M)
            for b in property_failures(M, D, random.Random(11), 8 if M.ambient > 4 else 15):
                c.check(False, (name, b))
        rng = random.Random(2024)
        nonnormal = 0
        for i in range(50):
            gens, M = random_monoid(rng)
            try:
                D = family_decomposition(M)
            except CertificationError as e:
                c.check(False, ("certification", gens, str(e)))
                continue
            nonnormal += bool(D.families)
            # brute force: every hole with coordinates at most 6 lies in a family,
            # and the enumeration agrees with the oracle where both apply
            ref = holes_in_box(gens, ORACLE_BOUND)
            c.check(all(any(f.contains(M, h) for f in D.families) for h in ref), ("oracle coverage", gens))
            mine = {h for h in enumerate_holes(M, D.verified_box) if max(h) <= ORACLE_BOUND}
            c.check(mine == {h for h in ref if M.height(h) <= D.verified_box.radius}, ("oracle holes", gens))
            for b in property_failures(M, D, rng):
                c.check(False, (gens, b))
        c.info = f"; {nonnormal} of the random monoids are not normal"
        prng = random.Random(7)
        for i in range(50):
            dim = 2 if i < 30 else 3
            pts, vc = _random_polytope(prng, dim)
            ref = lattice_volume_2d(pts) if dim == 2 else round(6 * ConvexHull(np.array(pts)).volume)
            c.check(vc.normalized_volume == ref, ("volume", pts))
            c.check(vc.holds, ("volume bound", pts))
