"""Families of holes, local cohomology and depth of affine monoid algebras."""
from .linalg import FieldSpec, Lattice, hnf_basis, lattice_contains, rank_over_field, solve_nonneg_mixed
from .cone import dual_description, face_lattice, incidence_signs, triangulate_and_volume
from .monoid import AffineMonoid, Box, MembershipQuery, build, contains, localize

__all__ = [
    "FieldSpec", "Lattice", "hnf_basis", "lattice_contains", "rank_over_field", "solve_nonneg_mixed",
    "dual_description", "face_lattice", "incidence_signs", "triangulate_and_volume",
    "AffineMonoid", "Box", "MembershipQuery", "build", "contains", "localize",
]
