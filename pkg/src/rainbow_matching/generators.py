"""Instance generators: random families, Latin-square partitions, tight examples.

All generators are pure functions of their parameters; the seeded ones use a
private ``random.Random`` so equal seeds give equal families on any platform.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb, factorial
from typing import Iterator, Sequence

from .core import Edge, Matching, MatchingFamily


class NotLatin(ValueError):
    """The given array is not a Latin square on symbols 1..n."""


class NTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    """Parameters for one random family draw."""

    n: int
    size: int
    u_max: int
    w_max: int
    seed: int

    def __post_init__(self) -> None:
        if self.n <= 0 or self.size <= 0 or self.u_max <= 0 or self.w_max <= 0:
            raise ValueError(f"all GenSpec fields must be positive: {self}")
        if self.size > min(self.u_max, self.w_max):
            raise ValueError(
                f"matching size {self.size} exceeds universe bound "
                f"{min(self.u_max, self.w_max)}"
            )


def random_family(spec: GenSpec) -> MatchingFamily:
    """Draw n independent uniform random matchings of exactly ``spec.size`` edges.

    Each matching pairs the first ``size`` entries of one random permutation
    per side, so the edges are uniform over size-``size`` matchings of the
    complete bipartite graph on [0, u_max) x [0, w_max).
    """
    rng = random.Random(spec.seed)
    matchings = []
    for _ in range(spec.n):
        lefts = list(range(spec.u_max))
        rights = list(range(spec.w_max))
        rng.shuffle(lefts)
        rng.shuffle(rights)
        matchings.append(
            tuple(Edge(u, w) for u, w in zip(lefts[: spec.size], rights[: spec.size]))
        )
    return MatchingFamily(tuple(matchings))


def latin_family(square: Sequence[Sequence[int]]) -> MatchingFamily:
    """Turn an order-n Latin square on symbols 1..n into its n color matchings.

    Matching s-1 holds the cells carrying symbol s, as edges (row, column) in
    row-major order; together they partition K_{n,n}.
    """
    n = len(square)
    symbols = set(range(1, n + 1))
    for i, row in enumerate(square):
        if len(row) != n or set(row) != symbols:
            raise NotLatin(f"row {i} is not a permutation of 1..{n}")
    for j in range(n):
        if {square[i][j] for i in range(n)} != symbols:
            raise NotLatin(f"column {j} is not a permutation of 1..{n}")

    matchings = []
    for s in range(1, n + 1):
        matchings.append(
            tuple(
                Edge(i, j)
                for i in range(n)
                for j in range(n)
                if square[i][j] == s
            )
        )
    return MatchingFamily(tuple(matchings))


def cyclic_square(n: int) -> list[list[int]]:
    """The cyclic Latin square of order n: cell (i, j) holds ((i+j) mod n) + 1."""
    if n < 1:
        raise NTooSmall("cyclic square needs n >= 1")
    return [[(i + j) % n + 1 for j in range(n)] for i in range(n)]


def random_latin_square(n: int, seed: int) -> list[list[int]]:
    """A seeded random Latin square: row, column and symbol shuffles of the cyclic square.

    Not uniform over all Latin squares, but cheap and enough for property
    scans.
    """
    rng = random.Random(seed)
    square = cyclic_square(n)
    rows = list(range(n))
    cols = list(range(n))
    syms = list(range(1, n + 1))
    rng.shuffle(rows)
    rng.shuffle(cols)
    rng.shuffle(syms)
    return [[syms[square[i][j] - 1] for j in cols] for i in rows]


def knn_partition_family(n: int, seed: int) -> MatchingFamily:
    """A seeded random partition of K_{n,n} into n perfect matchings."""
    return latin_family(random_latin_square(n, seed))


def drisko_tight(n: int) -> MatchingFamily:
    """2n-2 matchings of size n whose maximum rainbow matching has size n-1.

    Uses the two perfect matchings of the 2n-cycle on [0,n) + [0,n): the
    identity matching repeated n-1 times, then the shift-by-one matching
    repeated n-1 times.  The extremal property is confirmed by the oracle in
    tests rather than assumed.
    """
    if n < 2:
        raise NTooSmall("the tight construction needs n >= 2")
    identity = tuple(Edge(i, i) for i in range(n))
    shifted = tuple(Edge(i, (i + 1) % n) for i in range(n))
    return MatchingFamily((identity,) * (n - 1) + (shifted,) * (n - 1))


def count_matchings(size: int, u_max: int, w_max: int) -> int:
    """How many distinct ordered-canonical matchings of ``size`` edges exist."""
    return comb(u_max, size) * comb(w_max, size) * factorial(size)


def count_families(n: int, size: int, u_max: int, w_max: int) -> int:
    return count_matchings(size, u_max, w_max) ** n


def all_matchings(size: int, u_max: int, w_max: int) -> Iterator[Matching]:
    """Every matching of exactly ``size`` edges, lefts ascending, in a stable order."""
    for lefts in itertools.combinations(range(u_max), size):
        for rights in itertools.combinations(range(w_max), size):
            for perm in itertools.permutations(rights):
                yield tuple(Edge(u, w) for u, w in zip(lefts, perm))


def all_families(n: int, size: int, u_max: int, w_max: int) -> Iterator[MatchingFamily]:
    """Every ordered family of n matchings over the given universe (with repetition)."""
    pool = list(all_matchings(size, u_max, w_max))
    for combo in itertools.product(pool, repeat=n):
        yield MatchingFamily(tuple(combo))
