from functools import lru_cache

from holefamilies.constructions import get_builtin
from holefamilies.holes import Box, family_decomposition

FIG1 = [(2, 0), (3, 0), (0, 2), (0, 3)]
TRUNG_HOA = [(0, 0, 1), (1, 0, 1), (0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1)]

# the projective-plane cone lives in Z^7; a smaller box keeps the suite fast
SMALL_BOX = {"sr-rp2-cone": Box(3)}


@lru_cache(maxsize=None)
def decomposition(name):
    return family_decomposition(get_builtin(name), SMALL_BOX.get(name))
