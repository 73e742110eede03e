"""Domain types and basic predicates for rainbow matchings in bipartite graphs.

A *matching family* is an indexed list of matchings F_0..F_{n-1} over a shared
bipartite vertex universe; indices act as colors.  A *rainbow assignment* picks
at most one edge per index such that the picked edges form a matching.  The
vertex universe is implicit: exactly the ids that appear in some family edge.
Left ids and right ids live in disjoint namespaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union


class InvalidFamily(ValueError):
    """Raw input does not describe a valid matching family."""


class NegativeVertexId(InvalidFamily):
    pass


class DuplicateEdge(InvalidFamily):
    pass


class DuplicateVertexInMatching(InvalidFamily):
    pass


class IndexOutOfRange(ValueError):
    """Assignment refers to a family index that does not exist."""


class FreeIndexAlreadyChosen(ValueError):
    """Frontier computation requires the free index to be unchosen."""


@dataclass(frozen=True, slots=True, order=True)
class Edge:
    """An edge (left, right) of a bipartite graph.

    ``left`` is a U-side id and ``right`` a W-side id; equal numbers on
    opposite sides denote different vertices.
    """

    left: int
    right: int

    def __str__(self) -> str:
        return f"({self.left},{self.right})"


Matching = tuple[Edge, ...]
ChoiceMap = Mapping[int, Edge]


def _check_matching(edges: Sequence[Edge], index: int) -> Matching:
    seen_left: set[int] = set()
    seen_right: set[int] = set()
    seen: set[Edge] = set()
    for e in edges:
        if e.left < 0 or e.right < 0:
            raise NegativeVertexId(f"matching {index}: negative vertex id in {e}")
        if e in seen:
            raise DuplicateEdge(f"matching {index}: duplicate edge {e}")
        if e.left in seen_left or e.right in seen_right:
            raise DuplicateVertexInMatching(
                f"matching {index}: edge {e} shares an endpoint with an earlier edge"
            )
        seen.add(e)
        seen_left.add(e.left)
        seen_right.add(e.right)
    return tuple(edges)


@dataclass(frozen=True)
class MatchingFamily:
    """An ordered family of matchings over a shared bipartite universe.

    Edge order inside each matching is the deterministic iteration order used
    by every solver and oracle operation.  Whole edges may repeat across
    different matchings (they can never both be picked).
    """

    matchings: tuple[Matching, ...]

    def __post_init__(self) -> None:
        checked = tuple(_check_matching(m, i) for i, m in enumerate(self.matchings))
        object.__setattr__(self, "matchings", checked)

    @property
    def n(self) -> int:
        return len(self.matchings)

    @cached_property
    def left_vertices(self) -> frozenset[int]:
        return frozenset(e.left for m in self.matchings for e in m)

    @cached_property
    def right_vertices(self) -> frozenset[int]:
        return frozenset(e.right for m in self.matchings for e in m)

    def min_size(self) -> int:
        return min((len(m) for m in self.matchings), default=0)

    def __iter__(self):
        return iter(self.matchings)

    def __len__(self) -> int:
        return len(self.matchings)


RawEdge = Union[Sequence[int], Edge]


def validate_family(raw: Iterable[Iterable[RawEdge]]) -> MatchingFamily:
    """Build a MatchingFamily from nested (left, right) pairs, preserving order.

    Raises NegativeVertexId, DuplicateEdge or DuplicateVertexInMatching when a
    matching invariant is violated.
    """
    matchings = []
    for pairs in raw:
        edges = []
        for p in pairs:
            if isinstance(p, Edge):
                edges.append(p)
            else:
                u, w = p
                edges.append(Edge(int(u), int(w)))
        matchings.append(tuple(edges))
    return MatchingFamily(tuple(matchings))


@dataclass(frozen=True)
class RainbowAssignment:
    """A partial choice of one edge per family index whose image is a matching."""

    choices: tuple[tuple[int, Edge], ...]

    @classmethod
    def from_mapping(cls, choices: ChoiceMap) -> "RainbowAssignment":
        return cls(tuple(sorted(choices.items())))

    def as_dict(self) -> dict[int, Edge]:
        return dict(self.choices)

    def __len__(self) -> int:
        return len(self.choices)


def as_choice_dict(assignment: Union[RainbowAssignment, ChoiceMap]) -> dict[int, Edge]:
    if isinstance(assignment, RainbowAssignment):
        return assignment.as_dict()
    return dict(assignment)


def verify_rainbow(
    family: MatchingFamily, assignment: Union[RainbowAssignment, ChoiceMap]
) -> bool:
    """True iff every chosen edge belongs to its matching and the image is a matching.

    Raises IndexOutOfRange for choices at indices outside the family.
    """
    choices = as_choice_dict(assignment)
    lefts: set[int] = set()
    rights: set[int] = set()
    for i, e in choices.items():
        if not 0 <= i < family.n:
            raise IndexOutOfRange(f"choice index {i} outside family of {family.n}")
        if e not in family.matchings[i]:
            return False
        if e.left in lefts or e.right in rights:
            return False
        lefts.add(e.left)
        rights.add(e.right)
    return True


@dataclass(frozen=True)
class Frontier:
    """Uncovered vertices and the staging area for path augmentation.

    ``contested_left`` holds the U-vertices where the free matching would
    enter an uncovered right vertex but is blocked by an assignment edge;
    ``contested_choices`` are those blocking assignment entries, in index
    order, ``contested_rights`` their right endpoints and
    ``contested_indices`` their owning family indices.
    """

    uncovered_left: frozenset[int]
    uncovered_right: frozenset[int]
    contested_left: frozenset[int]
    contested_choices: tuple[tuple[int, Edge], ...]
    contested_rights: frozenset[int]
    contested_indices: tuple[int, ...]


def compute_frontier(
    family: MatchingFamily,
    assignment: Union[RainbowAssignment, ChoiceMap],
    free_index: int,
) -> Frontier:
    """Compute the frontier structures for one distinguished free matching.

    The free matching's edges that reach an uncovered right vertex from a
    covered left vertex determine the contested region.
    """
    if not 0 <= free_index < family.n:
        raise IndexOutOfRange(f"free index {free_index} outside family of {family.n}")
    choices = as_choice_dict(assignment)
    if free_index in choices:
        raise FreeIndexAlreadyChosen(f"index {free_index} already has a chosen edge")

    covered_left = {e.left for e in choices.values()}
    covered_right = {e.right for e in choices.values()}
    uncovered_left = frozenset(family.left_vertices - covered_left)
    uncovered_right = frozenset(family.right_vertices - covered_right)

    contested_left = frozenset(
        e.left
        for e in family.matchings[free_index]
        if e.right in uncovered_right and e.left in covered_left
    )
    contested_choices = tuple(
        (i, e) for i, e in sorted(choices.items()) if e.left in contested_left
    )
    contested_rights = frozenset(e.right for _, e in contested_choices)
    contested_indices = tuple(i for i, _ in contested_choices)

    return Frontier(
        uncovered_left=uncovered_left,
        uncovered_right=uncovered_right,
        contested_left=contested_left,
        contested_choices=contested_choices,
        contested_rights=contested_rights,
        contested_indices=contested_indices,
    )
