"""Constructive rainbow-matching solver.

Grows a rainbow assignment one edge at a time using moves of escalating
sophistication:

1. Simple: take the first edge of the lowest unchosen matching that avoids
   the current image.
2. Swap2: remove one chosen edge and re-route through both of its endpoints
   with fresh edges from two unchosen matchings.
3. Path moves: designate one unchosen matching as *free*, compute the
   contested region (assignment edges blocking the free matching's entries
   into uncovered right vertices), and walk an alternating path of new edges
   through the contested rights.  The walk ends in one of three net steps:
   a triple swap (path of length one closing on its own start), a segment
   rewiring (the new edge hits an earlier path position), or a final closure
   (an edge into the uncovered rights plus a free-matching edge).  Each net
   step removes the displaced assignment edges and adds one edge more.

Every applied step nets exactly +1, so a solve performs at most n
augmentations.  With RAINBOW_DEBUG_ASSERT=1 in the environment, the full
rainbow invariant is re-verified after every applied step.
"""

from __future__ import annotations

import os
import time
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from . import oracle as _oracle
from .core import (
    ChoiceMap,
    Edge,
    Frontier,
    MatchingFamily,
    RainbowAssignment,
    as_choice_dict,
    compute_frontier,
    validate_family,
    verify_rainbow,
)

SIMPLE = "Simple"
SWAP2 = "Swap2"
PATH_TRIPLE = "PathTriple"
PATH_SEGMENT = "PathSegment"
PATH_CLOSURE = "PathClosure"
PATH_EXTEND = "PathExtend"

STEP_KINDS = (SIMPLE, SWAP2, PATH_TRIPLE, PATH_SEGMENT, PATH_CLOSURE, PATH_EXTEND)

COMPLETE = "Complete"
INCOMPLETE = "Incomplete"
COUNTEREXAMPLE_CANDIDATE = "CounterexampleCandidate"

DEBUG_ENV_VAR = "RAINBOW_DEBUG_ASSERT"

ORACLE_FALLBACK = "OracleFallback"
CLAIM_SAMPLES = "Claim23Samples"
CLAIM_VIOLATIONS = "Claim23Violations"


class PreconditionViolated(ValueError):
    pass


def debug_checks_enabled() -> bool:
    return os.environ.get(DEBUG_ENV_VAR) == "1"


@dataclass(frozen=True)
class AugmentStep:
    """One applied move: ``removed`` assignment entries replaced by ``added``.

    Augmenting kinds have len(added) == len(removed) + 1; PathExtend exists
    only as a counter key (path growth never touches the assignment).
    """

    kind: str
    removed: tuple[tuple[int, Edge], ...]
    added: tuple[tuple[int, Edge], ...]

    def format_line(self) -> str:
        return f"{self.kind} - {_format_entries(self.removed)} + {_format_entries(self.added)}"


def _format_entries(entries: tuple[tuple[int, Edge], ...]) -> str:
    return "[" + ",".join(f"({i},({e.left},{e.right}))" for i, e in entries) + "]"


def format_trace(steps: Iterable[AugmentStep]) -> str:
    return "".join(step.format_line() + "\n" for step in steps)


@dataclass
class PathState:
    """Alternating-path state during one path-augmentation attempt.

    ``new_edges[i]`` and ``old_edges[i]`` share a family index; each new edge
    runs from an unused uncovered left vertex to the right endpoint of the
    next displaced assignment edge, so ``old_edges`` is always one longer.
    """

    new_edges: list[tuple[int, Edge]]
    old_edges: list[tuple[int, Edge]]


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve: status, final assignment, applied steps, counters."""

    status: str
    n: int
    assignment: RainbowAssignment
    trace: tuple[AugmentStep, ...]
    counters: dict[str, int]
    wall_time_s: float

    def __post_init__(self) -> None:
        if (self.status == COMPLETE) != (len(self.assignment) == self.n):
            raise ValueError("status must be Complete exactly when all indices are chosen")

    @property
    def size(self) -> int:
        return len(self.assignment)

    def summary(self) -> str:
        return f"{self.status} {self.size}/{self.n}"


def apply_step(
    family: MatchingFamily, choices: dict[int, Edge], step: AugmentStep, check: bool = False
) -> None:
    """Apply ``step`` to ``choices`` in place.

    With ``check`` (or the debug env var) the structural contract is
    enforced: removed entries must be present, added indices unchosen, the
    net gain exactly +1 for augmenting kinds, and the result a valid rainbow
    assignment.
    """
    check = check or debug_checks_enabled()
    if check:
        for i, e in step.removed:
            if choices.get(i) != e:
                raise ValueError(f"step removes ({i},{e}) which is not chosen")
        for i, _ in step.added:
            if i in choices and i not in {j for j, _ in step.removed}:
                raise ValueError(f"step adds to already-chosen index {i}")
        if step.kind != PATH_EXTEND and len(step.added) != len(step.removed) + 1:
            raise ValueError(f"{step.kind} step must net exactly +1")
    for i, _ in step.removed:
        del choices[i]
    for i, e in step.added:
        choices[i] = e
    if check and not verify_rainbow(family, choices):
        raise ValueError(f"assignment invalid after step {step.format_line()}")


def replay_steps(
    family: MatchingFamily, steps: Iterable[AugmentStep]
) -> RainbowAssignment:
    """Re-apply a trace from scratch, verifying every step; returns the result."""
    choices: dict[int, Edge] = {}
    for step in steps:
        apply_step(family, choices, step, check=True)
    return RainbowAssignment.from_mapping(choices)


def _next_simple(family: MatchingFamily, choices: ChoiceMap) -> Optional[AugmentStep]:
    covered_left = {e.left for e in choices.values()}
    covered_right = {e.right for e in choices.values()}
    for i in range(family.n):
        if i in choices:
            continue
        for e in family.matchings[i]:
            if e.left not in covered_left and e.right not in covered_right:
                return AugmentStep(SIMPLE, (), ((i, e),))
    return None


def greedy_extend(
    family: MatchingFamily, assignment: Union[RainbowAssignment, ChoiceMap, None] = None
) -> tuple[RainbowAssignment, tuple[AugmentStep, ...]]:
    """Repeatedly pick, for the lowest extendable unchosen index, the first
    edge disjoint from the image; stop when no unchosen matching has one."""
    choices = {} if assignment is None else as_choice_dict(assignment)
    steps: list[AugmentStep] = []
    while True:
        step = _next_simple(family, choices)
        if step is None:
            break
        apply_step(family, choices, step)
        steps.append(step)
    return RainbowAssignment.from_mapping(choices), tuple(steps)


def augment_swap2(
    family: MatchingFamily, assignment: Union[RainbowAssignment, ChoiceMap]
) -> Optional[AugmentStep]:
    """Find the first swap move: remove a chosen edge e, add one fresh edge
    through e's right endpoint from an uncovered left vertex and one through
    e's left endpoint into an uncovered right vertex, taken from two distinct
    unchosen matchings.  Returns None when no such triple exists."""
    choices = as_choice_dict(assignment)
    unchosen = [i for i in range(family.n) if i not in choices]
    chosen = sorted(choices.items())
    covered_left = {e.left for e in choices.values()}
    covered_right = {e.right for e in choices.values()}

    for p in unchosen:
        for q in unchosen:
            if q == p:
                continue
            for j, e in chosen:
                e1 = next(
                    (
                        c
                        for c in family.matchings[p]
                        if c.right == e.right and c.left not in covered_left
                    ),
                    None,
                )
                if e1 is None:
                    continue
                e2 = next(
                    (
                        c
                        for c in family.matchings[q]
                        if c.left == e.left and c.right not in covered_right
                    ),
                    None,
                )
                if e2 is None:
                    continue
                added = tuple(sorted(((p, e1), (q, e2))))
                return AugmentStep(SWAP2, ((j, e),), added)
    return None


def _claim_counts(
    family: MatchingFamily, frontier: Frontier
) -> tuple[bool, bool]:
    """Measure, for every contested matching, the structural edge counts the
    stuck-state analysis relies on.

    Returns (no contested matching has two edges between the uncovered
    sides, every contested matching meets the lower bounds on edges from
    uncovered lefts to covered rights / covered lefts to uncovered rights /
    uncovered lefts into the contested rights).
    """
    n = family.n
    lo_two_thirds = (2 * n) // 3
    lo_third = (n + 2) // 3
    x = frontier.uncovered_left
    y = frontier.uncovered_right
    wp = frontier.contested_rights
    clean = True
    bounds_ok = True
    for owner in frontier.contested_indices:
        uncovered_both = 0
        x_to_covered = 0
        covered_to_y = 0
        x_to_contested = 0
        for e in family.matchings[owner]:
            in_x = e.left in x
            in_y = e.right in y
            if in_x and in_y:
                uncovered_both += 1
            if in_x and not in_y:
                x_to_covered += 1
            if in_y and not in_x:
                covered_to_y += 1
            if in_x and e.right in wp:
                x_to_contested += 1
        if uncovered_both > 1:
            clean = False
        if (
            x_to_covered < lo_two_thirds
            or covered_to_y < lo_two_thirds
            or x_to_contested < lo_third
        ):
            bounds_ok = False
    return clean, bounds_ok


def _sample_claims(
    family: MatchingFamily,
    choices: ChoiceMap,
    frontier: Frontier,
    counters: Optional[Counter],
) -> None:
    # Counter sampling only makes sense where the stuck-state analysis
    # applies: one index short of full, sizes at or above the 5n/3 threshold.
    if counters is None:
        return
    n = family.n
    if len(choices) != n - 1 or family.min_size() < (5 * n) // 3:
        return
    clean, bounds_ok = _claim_counts(family, frontier)
    if not clean:
        # A contested matching with two edges between the uncovered sides is
        # an augmentation site (see _unblock_contested_choice), not a sample.
        return
    counters[CLAIM_SAMPLES] += 1
    if not bounds_ok:
        counters[CLAIM_VIOLATIONS] += 1


def _free_partners(
    family: MatchingFamily, frontier: Frontier, free_index: int
) -> dict[int, Edge]:
    """Map each contested left vertex to the free-matching edge entering an
    uncovered right vertex there (unique: the free matching is a matching)."""
    return {
        e.left: e
        for e in family.matchings[free_index]
        if e.right in frontier.uncovered_right and e.left in frontier.contested_left
    }


def _unblock_contested_choice(
    family: MatchingFamily,
    choices: ChoiceMap,
    frontier: Frontier,
    free_index: int,
) -> Optional[AugmentStep]:
    """Swap a contested choice for an edge of the same matching between the
    uncovered sides, letting the free matching enter at the freed left vertex.

    Applies whenever a contested matching has an edge with both endpoints
    uncovered that avoids its free-matching partner; two such edges make one
    qualifying edge certain.
    """
    partners = _free_partners(family, frontier, free_index)
    x = frontier.uncovered_left
    y = frontier.uncovered_right
    for owner, r in frontier.contested_choices:
        f = partners[r.left]
        for e2 in family.matchings[owner]:
            if e2.left in x and e2.right in y and e2.right != f.right:
                added = tuple(sorted(((owner, e2), (free_index, f))))
                return AugmentStep(SWAP2, ((owner, r),), added)
    return None


def _segment_step(
    path: PathState,
    cut: int,
    closing_owner: int,
    closing_edge: Edge,
    free_index: int,
    free_partner: Edge,
) -> AugmentStep:
    removed = tuple(sorted(path.old_edges[cut:]))
    added_list = path.new_edges[cut:] + [(closing_owner, closing_edge), (free_index, free_partner)]
    kind = PATH_TRIPLE if len(path.new_edges) == 1 else PATH_SEGMENT
    return AugmentStep(kind, removed, tuple(sorted(added_list)))


def _closure_step(
    family: MatchingFamily,
    path: PathState,
    free_index: int,
    frontier: Frontier,
) -> Optional[AugmentStep]:
    """Final closure: an edge of the last path matching into the uncovered
    rights, anchored at a displaced left vertex, plus a disjoint free-matching
    edge anchored at another one."""
    y = frontier.uncovered_right
    tail_owner = path.old_edges[-1][0]
    segment_lefts = {r.left for _, r in path.old_edges}
    free_edges = family.matchings[free_index]
    for e in family.matchings[tail_owner]:
        if e.right not in y or e.left not in segment_lefts:
            continue
        for f in free_edges:
            if (
                f.right in y
                and f.right != e.right
                and f.left in segment_lefts
                and f.left != e.left
            ):
                removed = tuple(sorted(path.old_edges))
                added = tuple(
                    sorted(path.new_edges + [(tail_owner, e), (free_index, f)])
                )
                return AugmentStep(PATH_CLOSURE, removed, added)
    return None


def augment_by_path(
    family: MatchingFamily,
    assignment: Union[RainbowAssignment, ChoiceMap],
    free_index: int,
    counters: Optional[Counter] = None,
) -> Optional[AugmentStep]:
    """Attempt one path augmentation with ``free_index`` as the free matching.

    Seeds an alternating path at the first contested matching with an edge
    from an uncovered left vertex into the contested rights, then grows it.
    Each grow step scans the matching owning the last displaced edge:

    - a candidate hitting the right endpoint of an earlier path position
      closes the path as a triple swap or segment rewiring;
    - once the path holds ceil(n/3) new edges, the final closure is attempted
      instead of growing further (this also caps path growth);
    - otherwise the first candidate into a new contested right extends the
      path.

    Returns the collapsed net step, or None when no move is found.  Raises
    PreconditionViolated if ``free_index`` already has a choice.
    """
    choices = as_choice_dict(assignment)
    if not 0 <= free_index < family.n:
        raise PreconditionViolated(f"free index {free_index} outside family")
    if free_index in choices:
        raise PreconditionViolated(f"free index {free_index} already chosen")

    frontier = compute_frontier(family, choices, free_index)
    _sample_claims(family, choices, frontier, counters)
    if not frontier.contested_left:
        return None

    x = frontier.uncovered_left
    wp = frontier.contested_rights
    choice_at_right = {e.right: (i, e) for i, e in frontier.contested_choices}

    path: Optional[PathState] = None
    for owner, chosen in frontier.contested_choices:
        seed = next(
            (e for e in family.matchings[owner] if e.left in x and e.right in wp),
            None,
        )
        if seed is not None:
            path = PathState(
                new_edges=[(owner, seed)],
                old_edges=[(owner, chosen), choice_at_right[seed.right]],
            )
            break
    if path is None:
        return None

    grow_cap = (family.n + 2) // 3
    while True:
        k = len(path.new_edges)
        tail_owner, _ = path.old_edges[-1]
        used_lefts = {e.left for _, e in path.new_edges}
        # Rights of the displaced edges before the tail; the tail's own right
        # cannot recur (candidates come from the tail's matching).
        earlier_rights = {r.right: pos for pos, (_, r) in enumerate(path.old_edges[:-1])}
        candidates = [
            e
            for e in family.matchings[tail_owner]
            if e.left in x and e.left not in used_lefts and e.right in wp
        ]
        hit = next((e for e in candidates if e.right in earlier_rights), None)
        if hit is not None:
            cut = earlier_rights[hit.right]
            partners = _free_partners(family, frontier, free_index)
            free_partner = next(
                partners[r.left] for _, r in path.old_edges[cut:] if r.left in partners
            )
            return _segment_step(path, cut, tail_owner, hit, free_index, free_partner)
        if k >= grow_cap:
            return _closure_step(family, path, free_index, frontier)
        ext = candidates[0] if candidates else None
        if ext is None:
            return None
        path.new_edges.append((tail_owner, ext))
        path.old_edges.append(choice_at_right[ext.right])
        if counters is not None:
            counters[PATH_EXTEND] += 1
        assert len(path.new_edges) <= grow_cap, "path growth exceeded its cap"


def classify_stuck(family: MatchingFamily) -> str:
    """Status for a solver that stopped short: a family whose matchings all
    meet the 5n/3 threshold should never stall, so that case is surfaced as a
    counterexample candidate rather than a plain failure."""
    n = family.n
    if n > 0 and family.min_size() >= (5 * n) // 3:
        return COUNTEREXAMPLE_CANDIDATE
    return INCOMPLETE


def solve_full(
    family: Union[MatchingFamily, Iterable],
    *,
    use_path_moves: bool = True,
    small_n_oracle_fallback: bool = True,
) -> SolveReport:
    """Grow a rainbow assignment to full size, or report how far it got.

    Escalation per round: simple picks, then the swap move over all unchosen
    pairs, then path augmentation for each unchosen index as the free
    matching in ascending order, then the contested-choice unblock swap.
    With ``use_path_moves=False`` the solver is restricted to the
    {Simple, Swap2} moves.  For n <= 3 a stall falls back to the exact
    oracle (the path analysis needs n > 3); the adopted witness is recorded
    in the counters, not the trace.
    """
    if not isinstance(family, MatchingFamily):
        family = validate_family(family)
    started = time.perf_counter()
    n = family.n
    choices: dict[int, Edge] = {}
    trace: list[AugmentStep] = []
    counters: Counter = Counter()

    def applied(step: AugmentStep) -> None:
        apply_step(family, choices, step)
        trace.append(step)
        counters[step.kind] += 1

    while len(choices) < n:
        step = _next_simple(family, choices)
        if step is None:
            step = augment_swap2(family, choices)
        if step is None and use_path_moves:
            unchosen = [i for i in range(n) if i not in choices]
            for free_index in unchosen:
                step = augment_by_path(family, choices, free_index, counters)
                if step is not None:
                    break
            if step is None:
                for free_index in unchosen:
                    frontier = compute_frontier(family, choices, free_index)
                    step = _unblock_contested_choice(family, choices, frontier, free_index)
                    if step is not None:
                        break
        if step is None:
            break
        applied(step)

    if len(choices) == n:
        status = COMPLETE
    elif small_n_oracle_fallback and n <= 3:
        result = _oracle.max_rainbow(family)
        if result.max_size == n:
            choices = result.witness.as_dict()
            counters[ORACLE_FALLBACK] += 1
            status = COMPLETE
        else:
            status = classify_stuck(family)
    else:
        status = classify_stuck(family)

    return SolveReport(
        status=status,
        n=n,
        assignment=RainbowAssignment.from_mapping(choices),
        trace=tuple(trace),
        counters=dict(counters),
        wall_time_s=time.perf_counter() - started,
    )
