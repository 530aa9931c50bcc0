"""Direct solvers for bodies of weight-set constraints sharing one weight set.

The core observation: once per-constraint occurrence counts are capped at a
bound ``h``, variables with equal capped occurrence profiles are
interchangeable, so only the number chosen from each profile class matters.
The solver enumerates count vectors over profile classes instead of variable
subsets, which is what makes it parameterized rather than exponential in n.

Capping is sound because a count can only exceed ``h`` when ``h`` came from
the weight set rather than from the instance: for a finite set the constraint
sum then necessarily overshoots every admissible weight (infeasible), for a
cofinite set it overshoots every excluded weight (automatically fine). Parity
sets never cap, since there ``h`` equals the instance's own bound.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import NotApplicableError
from .instances import Instance, WeightKind, param_e, param_t, satisfies
from .relations import WeightSet, WeightSetKind, WRelation


@dataclass(frozen=True)
class ProfileClass:
    """Variables sharing one capped occurrence profile across the body."""

    profile: tuple[int, ...]
    count: int
    representatives: tuple[str, ...]


@dataclass(frozen=True)
class SolveStats:
    """Instrumentation: cap, class count, and multisets actually tested."""

    h: int
    class_count: int
    multisets_enumerated: int
    pruned: bool = False


def shared_weight_set(inst: Instance) -> WeightSet | None:
    """The single weight set used by every body constraint; None for an empty body."""
    shared: WeightSet | None = None
    for i, c in enumerate(inst.body, start=1):
        if not isinstance(c.relation, WRelation):
            raise NotApplicableError(f"constraint {i} is not a weight-set relation")
        ws = c.relation.weights
        if shared is None:
            shared = ws
        elif shared != ws:
            raise NotApplicableError("body constraints use different weight sets")
    return shared


def compute_h(inst: Instance, weights: WeightSet) -> int:
    """Occurrence cap: min of the instance's per-constraint bound and the
    largest structurally relevant weight of the shared set."""
    shared = shared_weight_set(inst)
    if shared is not None and shared != weights:
        raise NotApplicableError("the body does not share the given weight set")
    candidates = [param_e(inst)]
    if weights.kind in (WeightSetKind.FINITE, WeightSetKind.COFINITE) and weights.values:
        candidates.append(max(weights.values))
    return min(candidates)


def profile_classes(inst: Instance, h: int) -> tuple[ProfileClass, ...]:
    """Group variables by their occurrence profiles, capped at ``h + 1``."""
    over = h + 1
    per_constraint = [Counter(c.scope) for c in inst.body]
    groups: dict[tuple[int, ...], list[str]] = {}
    for v in sorted(inst.variables):
        prof = tuple(min(counts.get(v, 0), over) for counts in per_constraint)
        groups.setdefault(prof, []).append(v)
    return tuple(
        ProfileClass(prof, len(names), tuple(names))
        for prof, names in sorted(groups.items())
    )


def _feasible(
    weights: WeightSet | None,
    h: int,
    classes: tuple[ProfileClass, ...],
    vector: tuple[int, ...],
    body_len: int,
) -> bool:
    for i in range(body_len):
        assert weights is not None
        total = 0
        capped = False
        for cls, n in zip(classes, vector):
            if not n:
                continue
            m = cls.profile[i]
            if m > h:
                capped = True
                break
            total += m * n
        if capped:
            if weights.kind is WeightSetKind.FINITE:
                return False
            assert weights.kind is WeightSetKind.COFINITE, "parity sets cannot hit the cap"
            continue
        if not weights.contains(total):
            return False
    return True


def _count_vectors(classes: tuple[ProfileClass, ...], target: int):
    """All ways to pick ``target`` variables across classes, lexicographically."""
    caps = [cls.count for cls in classes]
    room_after = [0] * (len(classes) + 1)
    for j in range(len(classes) - 1, -1, -1):
        room_after[j] = room_after[j + 1] + caps[j]
    counts = [0] * len(classes)

    def walk(j: int, remaining: int):
        if remaining > room_after[j]:
            return
        if j == len(classes):
            yield tuple(counts)
            return
        for n in range(min(caps[j], remaining) + 1):
            counts[j] = n
            yield from walk(j + 1, remaining - n)
        counts[j] = 0

    yield from walk(0, target)


def solve_w_kue_with_stats(inst: Instance) -> tuple[frozenset[str] | None, SolveStats]:
    """Profile-class solver; returns the witness and instrumentation counters."""
    weights = shared_weight_set(inst)
    h = compute_h(inst, weights) if weights is not None else 0
    classes = profile_classes(inst, h)
    body_len = len(inst.body)
    k0 = inst.weight.k0
    targets = (k0,) if inst.weight.kind is WeightKind.EXACT else tuple(range(k0 + 1))
    tested = 0
    for target in targets:
        for vector in _count_vectors(classes, target):
            tested += 1
            if body_len and not _feasible(weights, h, classes, vector, body_len):
                continue
            witness = frozenset(
                name
                for cls, n in zip(classes, vector)
                for name in cls.representatives[:n]
            )
            assert satisfies(inst, witness), "representative witness failed its instance"
            return witness, SolveStats(h, len(classes), tested)
    return None, SolveStats(h, len(classes), tested)


def solve_w_kue(inst: Instance) -> frozenset[str] | None:
    return solve_w_kue_with_stats(inst)[0]


def solve_w_kt_with_stats(inst: Instance) -> tuple[frozenset[str] | None, SolveStats]:
    """Count-bound solver: prune bodies too large to touch, then solve.

    Needs 0 outside the shared weight set, so every constraint must be
    touched by any satisfying assignment; more than t * k0 constraints then
    cannot all be touched by k0 variables and the instance is rejected
    without enumerating anything.
    """
    weights = shared_weight_set(inst)
    if weights is not None and weights.contains(0):
        raise NotApplicableError("weight sets containing 0 defeat the count bound")
    if len(inst.body) > param_t(inst) * inst.weight.k0:
        h = compute_h(inst, weights) if weights is not None else 0
        return None, SolveStats(h, 0, 0, pruned=True)
    return solve_w_kue_with_stats(inst)


def solve_w_kt(inst: Instance) -> frozenset[str] | None:
    return solve_w_kt_with_stats(inst)[0]
