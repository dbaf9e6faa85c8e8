"""Integer direction vectors that index the stability polytope's inequalities.

The region of stabilizable arrival rates is cut out by half-spaces
``alpha . rate <= beta``.  Only finitely many directions ``alpha`` are
needed: candidate coordinates are products of N-1 capacity values (the set
W), and a partition-ratio filter keeps exactly the directions whose
hyperplanes can touch the region on a maximal face.  Everything here runs
in exact integer/rational arithmetic; no float equality is ever tested.
"""

from __future__ import annotations

import itertools
import math
import operator
from fractions import Fraction
from typing import Sequence

DEFAULT_ENUM_CAP = 10_000_000


def build_w(M: int, N: int) -> list[int]:
    """All distinct products of N-1 factors drawn with repetition from {0..M}.

    Always contains 0 (any zero factor) and 1 (all-ones).  For N = 1 the
    empty product leaves {1}.
    """
    if M < 1:
        raise ValueError(f"need M >= 1, got {M}")
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    vals = {1}
    for _ in range(N - 1):
        vals = {v * m for v in vals for m in range(M + 1)}
    return sorted(vals)


def wn_count(M: int, N: int) -> int:
    """Closed-form size of the candidate direction space, ((M+N-2 choose N-1)+1)^N.

    The binomial term counts the multisets of N-1 nonzero factors, plus one
    for the all-zero product.  It coincides with len(build_w(M, N))**N as
    long as distinct factor multisets always yield distinct products, which
    holds for M <= 3 (products 2^a * 3^b are unique) and for N = 2 (a single
    factor).  From M = 4 upward collisions such as 2*2 = 1*4 make the
    enumerated set strictly smaller than this count.
    """
    if M < 1 or N < 2:
        raise ValueError(f"need M >= 1 and N >= 2, got ({M}, {N})")
    return (math.comb(M + N - 2, N - 1) + 1) ** N


def canonicalize(alpha: Sequence[int]) -> tuple[int, ...]:
    """Scale-free representative: divide by the gcd of the nonzero coordinates."""
    coords = [int(a) for a in alpha]
    if any(a < 0 for a in coords):
        raise ValueError("direction coordinates must be nonnegative")
    g = 0
    for a in coords:
        g = math.gcd(g, a)
    if g == 0:
        raise ValueError("zero vector has no canonical direction")
    return tuple(a // g for a in coords)


def _ratio_set(M: int) -> frozenset[Fraction]:
    return frozenset(Fraction(n, m) for m in range(1, M + 1) for n in range(1, M + 1))


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    try:
        return Fraction(operator.index(x))  # ints, incl. numpy integer scalars
    except TypeError:
        return Fraction(float(x))  # exact: a float is a binary rational


def _passes_partition_filter(alpha: Sequence[Fraction], ratios: frozenset[Fraction]) -> bool:
    """True iff every bipartition with nonzero parts links up through a capacity ratio.

    For each unordered split of the coordinates into two nonempty groups,
    both containing at least one nonzero entry, there must be a nonzero
    entry on each side whose ratio equals n/m for nonzero capacities
    m, n <= M.  Splits with an all-zero side impose nothing.  Swapping the
    sides inverts the ratio, and the ratio set is closed under inversion,
    so only the 2^(N-1) - 1 unordered bipartitions are visited (coordinate
    0 stays on the first side).
    """
    N = len(alpha)
    nonzero = [a != 0 for a in alpha]
    for mask in range(2 ** (N - 1)):
        left = [0] + [i for i in range(1, N) if (mask >> (i - 1)) & 1]
        if len(left) == N:
            continue
        in_left = [False] * N
        for i in left:
            in_left[i] = True
        right = [i for i in range(1, N) if not in_left[i]]
        left_nz = [i for i in left if nonzero[i]]
        right_nz = [j for j in right if nonzero[j]]
        if not left_nz or not right_nz:
            continue
        if not any(alpha[i] / alpha[j] in ratios for i in left_nz for j in right_nz):
            return False
    return True


def in_v(alpha: Sequence, M: int) -> bool:
    """Whether a nonnegative direction survives the partition-ratio filter.

    Accepts real coordinates; floats are converted to exact rationals, so
    the equality test ``alpha_i * m == alpha_j * n`` is never subject to
    rounding.  Positive scalings of the same vector agree whenever the
    scaling is exact (integers, or powers of two for float inputs).
    """
    if M < 1:
        raise ValueError(f"need M >= 1, got {M}")
    coords = [_to_fraction(x) for x in alpha]
    if any(c < 0 for c in coords):
        raise ValueError("direction coordinates must be nonnegative")
    if all(c == 0 for c in coords):
        raise ValueError("zero vector is not a direction")
    return _passes_partition_filter(coords, _ratio_set(M))


def build_vhat(M: int, N: int, cap: int = DEFAULT_ENUM_CAP) -> list[tuple[int, ...]]:
    """The scaling-free direction set: one inequality per element.

    Enumerates the candidate space (every coordinate from build_w, zero
    vector excluded), keeps directions passing the partition filter,
    canonicalizes by gcd, and deduplicates scalar multiples.  The result
    is sorted and contains every standard basis vector.
    """
    if N == 1:
        return [(1,)]
    W = build_w(M, N)
    total = len(W) ** N
    if total > cap:
        raise ValueError(f"enumeration cap exceeded: |W|^N = {total} > {cap}")
    ratios = _ratio_set(M)
    out = set()
    for cand in itertools.product(W, repeat=N):
        if all(a == 0 for a in cand):
            continue
        fracs = [Fraction(a) for a in cand]
        if _passes_partition_filter(fracs, ratios):
            out.add(canonicalize(cand))
    return sorted(out)
