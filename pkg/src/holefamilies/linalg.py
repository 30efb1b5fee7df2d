"""Exact integer and rational linear algebra.

Everything here works on plain Python integers, so there is no overflow and no
floating point.  Matrices are tuples of row tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vector = tuple[int, ...]
IntMatrix = tuple[Vector, ...]


def as_matrix(rows: Iterable[Sequence[int]]) -> IntMatrix:
    out = tuple(tuple(int(x) for x in r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("matrix rows have different lengths")
    return out


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def vadd(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c: int, v: Sequence[int]) -> Vector:
    return tuple(c * a for a in v)


def primitive(v: Sequence[int]) -> Vector:
    from math import gcd

    g = 0
    for a in v:
        g = gcd(g, a)
    if g == 0:
        return tuple(v)
    return tuple(a // g for a in v)


@dataclass(frozen=True)
class FieldSpec:
    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p < 0 or p == 1 or (p > 1 and not _is_prime(p)):
            raise ValueError(f"characteristic must be 0 or a prime, got {p}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class Lattice:
    """Integer row span, stored by its row Hermite normal form."""

    ambient: int
    basis: IntMatrix
    pivots: tuple[int, ...] = field(default=())

    @property
    def rank(self) -> int:
        return len(self.basis)


def hnf_with_transform(rows: Sequence[Sequence[int]], ncols: Optional[int] = None):
    """Row Hermite normal form H with a unimodular T such that T * rows = [H; 0].

    Returns (H, T, pivots).  The rows of T past len(H) span the integer left
    kernel of `rows`.  Entries above each pivot are reduced into [0, pivot).
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    if ncols is None:
        ncols = len(A[0]) if A else 0
    T = [[int(i == j) for j in range(m)] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            # smallest absolute value as pivot, lowest index on ties
            best = min(nz, key=lambda i: (abs(A[i][c]), i))
            if best != r:
                A[r], A[best] = A[best], A[r]
                T[r], T[best] = T[best], T[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c] != 0:
                    f = A[i][c] // A[r][c]
                    if f:
                        A[i] = [a - f * b for a, b in zip(A[i], A[r])]
                        T[i] = [a - f * b for a, b in zip(T[i], T[r])]
                    if A[i][c] != 0:
                        done = False
            if done:
                break
        if r < m and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
                T[r] = [-a for a in T[r]]
            p = A[r][c]
            for i in range(r):
                f = A[i][c] // p
                if f:
                    A[i] = [a - f * b for a, b in zip(A[i], A[r])]
                    T[i] = [a - f * b for a, b in zip(T[i], T[r])]
            pivots.append(c)
            r += 1
    H = tuple(tuple(row) for row in A[:r])
    return H, tuple(tuple(row) for row in T), tuple(pivots)


def hnf_basis(generators: Iterable[Sequence[int]], ambient: Optional[int] = None) -> Lattice:
    rows = as_matrix(generators)
    if ambient is None:
        if not rows:
            raise ValueError("ambient dimension needed for an empty generator set")
        ambient = len(rows[0])
    if rows and len(rows[0]) != ambient:
        raise ValueError("generator length does not match ambient dimension")
    H, _, piv = hnf_with_transform(rows, ambient)
    return Lattice(ambient, H, piv)


def reduce_mod(L: Lattice, v: Sequence[int]) -> Vector:
    """Canonical residue of v modulo L (unique per coset)."""
    if len(v) != L.ambient:
        raise ValueError(f"vector of length {len(v)} in ambient dimension {L.ambient}")
    w = list(v)
    for row, c in zip(L.basis, L.pivots):
        f = w[c] // row[c]
        if f:
            w = [a - f * b for a, b in zip(w, row)]
    return tuple(w)


def lattice_coordinates(L: Lattice, v: Sequence[int]) -> Optional[Vector]:
    """Integer y with y * basis = v, or None when v is not in L."""
    if len(v) != L.ambient:
        raise ValueError(f"vector of length {len(v)} in ambient dimension {L.ambient}")
    w = list(v)
    y = []
    for row, c in zip(L.basis, L.pivots):
        if w[c] % row[c]:
            return None
        f = w[c] // row[c]
        y.append(f)
        if f:
            w = [a - f * b for a, b in zip(w, row)]
    if any(w):
        return None
    return tuple(y)


def lattice_contains(L: Lattice, v: Sequence[int]) -> bool:
    return lattice_coordinates(L, v) is not None


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """Basis of the saturated lattice {x in Z^ncols : rows * x = 0}."""
    cols = [[r[j] for r in rows] for j in range(ncols)]
    H, T, _ = hnf_with_transform(cols, len(rows))
    return tuple(T[len(H):])


def saturation(rows: Sequence[Sequence[int]], ncols: int) -> Lattice:
    """The lattice Z^ncols intersected with the rational span of `rows`."""
    perp = integer_kernel(rows, ncols)
    return hnf_basis(integer_kernel(perp, ncols), ncols)


def rank_over_field(A: Sequence[Sequence[int]], k: FieldSpec | int = 0) -> int:
    p = k.characteristic if isinstance(k, FieldSpec) else int(k)
    M = [list(map(int, r)) for r in A]
    if not M or not M[0]:
        return 0
    if p:
        return _rank_mod_p(M, p)
    return _rank_bareiss(M)


def _rank_mod_p(M: list[list[int]], p: int) -> int:
    M = [[a % p for a in row] for row in M]
    m, n = len(M), len(M[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], p - 2, p)
        M[r] = [a * inv % p for a in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        r += 1
        if r == m:
            break
    return r


def _rank_bareiss(M: list[list[int]]) -> int:
    # fraction-free elimination; every division below is exact
    m, n = len(M), len(M[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, m):
            M[i] = [(M[r][c] * M[i][j] - M[i][c] * M[r][j]) // prev for j in range(n)]
        prev = M[r][c]
        r += 1
        if r == m:
            break
    return r


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def solve_rational(M: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[tuple[Fraction, ...]]:
    """Some rational x with x * M = b (M given by rows), or None."""
    rows = [list(map(Fraction, r)) for r in M]
    m = len(rows)
    n = len(b)
    # eliminate on the transpose system M^T x = b
    A = [[rows[i][j] for i in range(m)] + [Fraction(b[j])] for j in range(n)]
    piv_cols = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [a * inv for a in A[r]]
        for i in range(n):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * bb for a, bb in zip(A[i], A[r])]
        piv_cols.append(c)
        r += 1
    if any(A[i][m] != 0 for i in range(r, n)):
        return None
    x = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        x[c] = A[i][m]
    return tuple(x)


def in_rational_span(M: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    if not any(v):
        return True
    if not M:
        return False
    return solve_rational(M, v) is not None


def rational_rank(M: Sequence[Sequence[int]]) -> int:
    return rank_over_field(M, 0)


# ---------------------------------------------------------------------------
# mixed nonnegative / free integer feasibility


class _MixedPlan:
    """Precomputed data for deciding b in N*A_constrained + Z*A_free."""

    def __init__(self, cols: IntMatrix, free: frozenset[int]):
        from .cone import dual_description

        self.cols = cols
        self.free = sorted(free)
        N = len(cols[0])
        self.N = N
        constrained = [j for j in range(len(cols)) if j not in free]
        vecs = [cols[j] for j in constrained]
        vecs += [cols[j] for j in self.free] + [vscale(-1, cols[j]) for j in self.free]
        vecs = [v for v in vecs if any(v)]
        if vecs:
            self.forms = dual_description(vecs).facet_forms
        else:
            self.forms = ()
        # constrained columns inside the lineality generate a group, so they
        # may be treated as free for the decision
        self.units = [j for j in constrained if all(dot(f, cols[j]) == 0 for f in self.forms)]
        self.pointed = [j for j in constrained if j not in self.units]
        self.group_cols = sorted(self.free + self.units)
        self.group = hnf_basis([cols[j] for j in self.group_cols], N)
        self.free_lattice = hnf_basis([cols[j] for j in self.free], N)
        self.steps = [(j, cols[j], tuple(dot(f, cols[j]) for f in self.forms)) for j in self.pointed]
        self.infeasible: set[Vector] = set()
        self.feasible: set[Vector] = set()
        self._neg_cert: dict[int, dict[int, int]] = {}

    def heights(self, v):
        return tuple(dot(f, v) for f in self.forms)

    def search(self, b: Sequence[int], want_path: bool):
        """DFS over residues b - (pointed part); returns list of step indices or None."""
        start = reduce_mod(self.group, b)
        hs = self.heights(b)
        if any(h < 0 for h in hs):
            return None
        if not want_path:
            if start in self.feasible:
                return []
            if start in self.infeasible:
                return None
        visited = {start}
        stack = [(start, hs, 0)]
        parent: dict[Vector, tuple[Vector, int]] = {}
        while stack:
            r, h, k = stack.pop()
            if not any(r) or (not want_path and r in self.feasible):
                path = []
                cur = r
                while cur != start:
                    prev, j = parent[cur]
                    path.append(j)
                    cur = prev
                self.feasible.add(start)
                self.feasible.update(parent_states(parent, r, start))
                return path[::-1]
            # push in reverse so the lowest index is explored first
            nxt = []
            for j, g, gh in self.steps:
                nh = tuple(a - c for a, c in zip(h, gh))
                if any(a < 0 for a in nh):
                    continue
                s = reduce_mod(self.group, vsub(r, g))
                if s in visited or s in self.infeasible:
                    continue
                nxt.append((s, nh, j))
            for s, nh, j in reversed(nxt):
                if s in visited:
                    continue
                visited.add(s)
                parent[s] = (r, j)
                stack.append((s, nh, 0))
        self.infeasible.update(visited)
        return None

    def negation_certificate(self, u: int) -> dict[int, int]:
        """Nonnegative c on unit columns with col_u + sum c_h col_h in Z*free."""
        if u in self._neg_cert:
            return self._neg_cert[u]
        from collections import deque

        start = reduce_mod(self.free_lattice, self.cols[u])
        parent = {start: None}
        queue = deque([start])
        goal = None
        zero = tuple([0] * self.N)
        while queue:
            r = queue.popleft()
            if r == zero:
                goal = r
                break
            for h in self.units:
                s = reduce_mod(self.free_lattice, vadd(r, self.cols[h]))
                if s not in parent:
                    parent[s] = (r, h)
                    queue.append(s)
        if goal is None:
            raise AssertionError("unit column without negation certificate")
        cert: dict[int, int] = {}
        cur = goal
        while parent[cur] is not None:
            prev, h = parent[cur]
            cert[h] = cert.get(h, 0) + 1
            cur = prev
        self._neg_cert[u] = cert
        return cert


def parent_states(parent, end, start):
    out = []
    cur = end
    while cur != start:
        out.append(cur)
        cur = parent[cur][0]
    return out


_PLANS: dict[tuple[IntMatrix, frozenset[int]], _MixedPlan] = {}


def _plan(cols: IntMatrix, free: frozenset[int]) -> _MixedPlan:
    key = (cols, free)
    pl = _PLANS.get(key)
    if pl is None:
        pl = _MixedPlan(cols, free)
        _PLANS[key] = pl
    return pl


def _group_coefficients(cols: IntMatrix, idx: Sequence[int], v: Sequence[int], N: int) -> dict[int, int]:
    """Integer coefficients a with sum a_j cols[j] = v over j in idx."""
    if not idx:
        if any(v):
            raise AssertionError("vector not in the zero lattice")
        return {}
    rows = [cols[j] for j in idx]
    H, T, piv = hnf_with_transform(rows, N)
    y = lattice_coordinates(Lattice(N, H, piv), v)
    if y is None:
        raise AssertionError("vector not in the lattice of the given columns")
    out = {j: 0 for j in idx}
    for yi, trow in zip(y, T):
        if yi:
            for j, t in zip(idx, trow):
                out[j] += yi * t
    return out


def feasible_mixed(columns: Sequence[Sequence[int]], free_cols: Iterable[int], b: Sequence[int]) -> bool:
    """Decision version of solve_nonneg_mixed, with memoised search states."""
    cols = as_matrix(columns)
    if not cols:
        return not any(b)
    if len(b) != len(cols[0]):
        raise ValueError("dimension mismatch")
    pl = _plan(cols, frozenset(free_cols))
    return pl.search(tuple(b), want_path=False) is not None


def solve_nonneg_mixed(columns: Sequence[Sequence[int]], free_cols: Iterable[int],
                       b: Sequence[int]) -> Optional[Vector]:
    """Decide b = sum x_j columns[j] with x_j >= 0 off free_cols and x_j in Z on them.

    Returns the coefficient vector x, or None when infeasible.  The decision is
    exact: the search visits every reachable residue before answering None.
    """
    cols = as_matrix(columns)
    b = tuple(int(a) for a in b)
    if not cols:
        return () if not any(b) else None
    N = len(cols[0])
    if len(b) != N:
        raise ValueError("dimension mismatch")
    free = frozenset(free_cols)
    pl = _plan(cols, free)
    path = pl.search(b, want_path=True)
    if path is None:
        return None
    x = [0] * len(cols)
    for j in path:
        x[j] += 1
    rest = b
    for j in range(len(cols)):
        if x[j]:
            rest = vsub(rest, vscale(x[j], cols[j]))
    coeff = _group_coefficients(cols, pl.group_cols, rest, N)
    for j, a in coeff.items():
        x[j] += a
    for u in pl.units:
        if x[u] < 0:
            t = -x[u]
            cert = pl.negation_certificate(u)
            z = cols[u]
            x[u] += t
            for h, c in cert.items():
                x[h] += t * c
                z = vadd(z, vscale(c, cols[h]))
            fc = _group_coefficients(cols, pl.free, vscale(t, z), N)
            for j, a in fc.items():
                x[j] -= a
    x = tuple(x)
    check = [0] * N
    for j, a in enumerate(x):
        if a:
            check = [s + a * c for s, c in zip(check, cols[j])]
    assert tuple(check) == b, "witness does not reproduce the right-hand side"
    assert all(x[j] >= 0 for j in range(len(cols)) if j not in free), "negative constrained coefficient"
    return x
