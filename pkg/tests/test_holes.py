import pytest
from hypothesis import given, settings, strategies as st

from holefamilies.constructions import builtin_names, get_builtin
from holefamilies.holes import (Box, CertificationError, annihilator_witness, enumerate_holes,
                                family_decomposition, intersection_filtration_check, localization_mismatches,
                                localized_decomposition_keys, family_keys_by_generators, localized_families,
                                maximal_hole_faces, ring_report)
from holefamilies.linalg import vscale, vsub
from holefamilies.monoid import build, in_localization

from common import FIG1, TRUNG_HOA, decomposition
from oracles import holes_in_box


def test_quadrant_holes_in_square():
    M = build(FIG1)
    got = {h for h in enumerate_holes(M, Box(12)) if max(h) <= 6}
    expected = {(1, y) for y in range(7)} | {(x, 1) for x in (0, 2, 3, 4, 5, 6)}
    assert got == expected == holes_in_box(FIG1, 6)


def test_wall_holes():
    M = build(TRUNG_HOA)
    got = {h for h in enumerate_holes(M, Box(40)) if h[2] <= 4}
    cone = {(x, 1, z) for z in range(5) for x in range(z + 1) if 1 <= 3 * z}
    assert got == cone


def test_non_hole_rejected():
    M = build(FIG1)
    with pytest.raises(ValueError):
        maximal_hole_faces(M, (2, 2))


def test_quadrant_families():
    M = build(FIG1)
    D = family_decomposition(M)
    assert len(D.families) == 2
    by_face = {tuple(sorted(f.face.facet_set)): f for f in D.families}
    assert set(by_face) == {(0,), (1,)}
    for f in D.families:
        assert f.star_dim == 1
    reps = {f.representative for f in D.families}
    assert reps == {(0, 1), (1, 0)}


def test_wall_family():
    M = build(TRUNG_HOA)
    D = family_decomposition(M)
    assert len(D.families) == 1
    f = D.families[0]
    assert f.star_dim == 2
    assert M.cone.facet_forms[next(iter(f.face.facet_set))] == (0, 1, 0)
    assert f.representative[1] == 1


def test_nonpositive_family():
    M = get_builtin("nonpositive-seminormal")
    D = family_decomposition(M)
    assert [f.star_dim for f in D.families] == [0]
    assert D.families[0].face is M.units_face
    assert D.multiplicities == {M.units_face.id: 1}


def test_edge_ring_family():
    M = get_builtin("edge-G7")
    D = decomposition("edge-G7")
    assert len(D.families) == 1
    f = D.families[0]
    assert f.representative == (1, 1, 1, 1, 1, 1, 0)
    assert f.star_dim == 6
    gens = set(M.face_generators(f.face))
    triangles = {g for g in M.generators if g[6] == 0 and g[2] + g[3] < 2}
    assert gens == triangles and len(gens) == 6


def test_certification_failure_suggests_box():
    M = get_builtin("edge-G7")
    with pytest.raises(CertificationError) as info:
        family_decomposition(M, Box(14))
    assert "box too small" in str(info.value)
    R = info.value.suggested_box
    assert R.radius > 14
    family_decomposition(M, R)


@pytest.mark.parametrize("name", builtin_names())
def test_decomposition_independent_of_box(name):
    M = get_builtin(name)
    D = decomposition(name)
    step = min(h for h in (M.height(g) for g in M.generators) if h > 0)
    D2 = family_decomposition(M, Box(D.box.radius + step))
    assert D2.verified_box != D.verified_box
    assert D.keys() == D2.keys()


@pytest.mark.parametrize("name", builtin_names())
def test_coverage_and_irredundancy(name):
    M = get_builtin(name)
    D = decomposition(name)
    holes = enumerate_holes(M, D.verified_box)
    for h in holes:
        assert any(f.contains(M, h) for f in D.families)
    for f in D.families:
        own = [h for h in holes if f.contains(M, h)]
        assert any(not any(g.contains(M, h) for g in D.families if g is not f) for h in own) or not own


@pytest.mark.parametrize("name", ["fig1-quadrant", "trung-hoa", "nonpositive-seminormal", "sr-two-points"])
def test_localization_from_scratch(name):
    M = get_builtin(name)
    D = decomposition(name)
    for F in M.faces.faces:
        assert localized_decomposition_keys(M, F) == family_keys_by_generators(M, localized_families(D, F))


@pytest.mark.parametrize("name", builtin_names())
def test_localization_pointwise(name):
    M = get_builtin(name)
    D = decomposition(name)
    for F in M.faces.faces:
        c = M.interior_point(F)
        pts = list(D.holes) + [vsub(h, vscale(k, c)) for h in D.holes[:20] for k in (1, 2, 3)]
        assert localization_mismatches(M, D, F, pts) == []


def test_ring_report_quadrant():
    M = build(FIG1)
    r = ring_report(M, family_decomposition(M))
    assert r.serre_S2 and not r.serre_R1 and not r.is_seminormal
    assert r.depth_upper_bound == 2


def test_ring_report_wall():
    M = build(TRUNG_HOA)
    r = ring_report(M, family_decomposition(M))
    assert not r.is_locally_normal and r.depth_upper_bound == 3 and r.serre_S2 and not r.serre_R1


def test_ring_report_edge_ring():
    M = get_builtin("edge-G7")
    r = ring_report(M, decomposition("edge-G7"))
    assert r.depth_exact == 7 and r.serre_S2 and not r.serre_R1
    M = get_builtin("edge-G8")
    r = ring_report(M, decomposition("edge-G8"))
    assert r.depth_exact == 7 and M.star_dim == 8


def test_ring_report_zero_dimensional_family():
    M = get_builtin("nonpositive-seminormal")
    r = ring_report(M, family_decomposition(M))
    assert r.depth_exact == 1 and r.is_seminormal and r.is_locally_normal is True


def test_normal_examples():
    for name in ("parity-N2",):
        M = get_builtin(name)
        r = ring_report(M, family_decomposition(M))
        assert r.is_normal and r.depth_exact == M.star_dim


@pytest.mark.parametrize("name", builtin_names())
def test_filtration_matches_family_dimensions(name):
    M = get_builtin(name)
    D = decomposition(name)
    rep = intersection_filtration_check(M, None, D)
    assert rep.consistent
    d = M.star_dim
    assert rep.family_levels == {k for k in D.star_dims() if k <= d - 2}


def test_filtration_rejects_points_outside_group():
    M = build([(2, 0), (0, 2)])
    with pytest.raises(ValueError):
        intersection_filtration_check(M, [(1, 0)])


def test_annihilator_witness_stays_outside_face():
    M = get_builtin("edge-G8")
    f = decomposition("edge-G8").families[0]
    w = annihilator_witness(M, f)
    assert not in_localization(M, f.face, w)


_small_gens = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=2, max_size=4)


@settings(max_examples=30, deadline=None)
@given(_small_gens)
def test_families_cover_brute_force_holes(gens):
    try:
        M = build(gens)
    except ValueError:
        return
    D = family_decomposition(M)
    ref = holes_in_box(gens, 8)
    for h in ref:
        assert any(f.contains(M, h) for f in D.families), h
    for f in D.families:
        assert f.representative in set(enumerate_holes(M, D.box))
    mine = {h for h in enumerate_holes(M, D.verified_box) if max(h) <= 8}
    assert mine == {h for h in ref if M.height(h) <= D.verified_box.radius}
