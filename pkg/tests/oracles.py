"""Brute-force reference computations, independent of the package internals."""
from __future__ import annotations

from itertools import product

import numpy as np
from scipy.optimize import linprog
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp


def points_in_box(gens, bound):
    """Nonnegative combinations of nonnegative generators with every coordinate <= bound."""
    N = len(gens[0])
    seen = {tuple([0] * N)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple(a + b for a, b in zip(v, g))
                if max(w) <= bound and w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def in_cone_lp(gens, x) -> bool:
    A = np.array(gens, dtype=float).T
    res = linprog(np.zeros(len(gens)), A_eq=A, b_eq=np.array(x, dtype=float),
                  bounds=[(0, None)] * len(gens), method="highs")
    return res.status == 0


def in_group_snf(gens, x) -> bool:
    """x in the integer row span of gens, via a Smith decomposition S = U A V."""
    A = Matrix(gens)
    S, U, V = smith_normal_decomp(A, domain=ZZ)
    # y A = x  <=>  (y U^-1) S = x V
    r = Matrix([list(x)]) * V
    m = min(S.shape)
    for j in range(S.shape[1]):
        s = S[j, j] if j < m else 0
        if s == 0:
            if r[0, j] != 0:
                return False
        elif r[0, j] % s != 0:
            return False
    return True


def saturation_in_box(gens, bound):
    N = len(gens[0])
    return {x for x in product(range(bound + 1), repeat=N)
            if in_cone_lp(gens, x) and in_group_snf(gens, x)}


def holes_in_box(gens, bound):
    return saturation_in_box(gens, bound) - points_in_box(gens, bound)


def rank_mod(rows, p):
    A = [[a % p for a in r] for r in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [a * inv % p for a in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def lattice_volume_2d(vertices):
    """Twice the area of the convex hull, by the shoelace formula on a monotone-chain hull."""
    pts = sorted(set(map(tuple, vertices)))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    s = 0
    for i in range(len(hull)):
        x1, y1 = hull[i]
        x2, y2 = hull[(i + 1) % len(hull)]
        s += x1 * y2 - x2 * y1
    return abs(s)
