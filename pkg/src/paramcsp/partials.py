"""Partial tuples of a relation and the membership characterization they induce.

A non-member tuple set ``T`` is *partial* when every strictly smaller partial
tuple inside it can be completed to a member without leaving ``T``. Each
partial is stored with its *completions*: the minimal member supersets. The
resulting table characterizes membership: ``D`` belongs to the relation
exactly when every partial inside ``D`` has a completion inside ``D``.

Tables are computed by exhaustive scan over all ``2**arity`` tuple sets, so
everything here is guarded by a capacity cap; partial tables can be
exponentially large, which no cleverness can get around.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import combinations

from ._sets import canonical_sets
from .errors import CapacityError, UsageError
from .relations import ExplicitRelation, Relation, _check_positions

DEFAULT_CAPACITY = 12


@dataclass(frozen=True)
class PartialsTable:
    """All partial tuple sets of one relation, each with its completions."""

    relation: Relation
    partials: tuple[tuple[int, ...], ...]
    completions: Mapping[tuple[int, ...], tuple[tuple[int, ...], ...]]


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(p + 1 for p in range(mask.bit_length()) if mask >> p & 1)


def _set_to_mask(positions: Iterable[int]) -> int:
    mask = 0
    for p in positions:
        mask |= 1 << (p - 1)
    return mask


def _member_masks(rel: Relation) -> list[bool]:
    q = rel.arity
    return [rel._contains(_mask_to_set(m)) for m in range(1 << q)]


def _minimal_supersets(mask: int, members: Iterable[int]) -> list[int]:
    """Member masks strictly containing ``mask``, filtered down to the minimal ones."""
    candidates = sorted(
        (m for m in members if m != mask and mask & ~m == 0),
        key=lambda m: (m.bit_count(), m),
    )
    minimal: list[int] = []
    for m in candidates:
        if not any(u & ~m == 0 for u in minimal):
            minimal.append(m)
    return minimal


def completions(rel: Relation, positions: Iterable[int], *, capacity: int = DEFAULT_CAPACITY) -> tuple[tuple[int, ...], ...]:
    """Minimal member supersets of a non-member tuple set.

    Raises :class:`UsageError` when the tuple set is already a member. For
    explicitly listed relations this scans the member list; otherwise it
    enumerates supersets, so the arity must stay within ``capacity``.
    """
    pset = _check_positions(rel, positions)
    if rel._contains(pset):
        raise UsageError("completions are defined for non-members only")
    mask = _set_to_mask(pset)
    if isinstance(rel, ExplicitRelation):
        members: Iterable[int] = (_set_to_mask(m) for m in rel.members)
    else:
        if rel.arity > capacity:
            raise CapacityError(
                f"arity {rel.arity} above the exhaustive bound {capacity}"
            )
        members = (m for m in range(1 << rel.arity) if rel._contains(_mask_to_set(m)))
    return canonical_sets(_mask_to_set(m) for m in _minimal_supersets(mask, list(members)))


def compute_partials(rel: Relation, *, capacity: int = DEFAULT_CAPACITY) -> PartialsTable:
    """Build the full partial-tuple table of ``rel`` by exhaustive scan.

    Any relation with arity above ``capacity`` raises :class:`CapacityError`;
    the scan is ``2**arity`` memberships plus submask walks, and the table
    itself can be that large.
    """
    q = rel.arity
    if q > capacity:
        raise CapacityError(f"arity {q} above the exhaustive bound {capacity}")
    member = _member_masks(rel)
    member_list = [m for m in range(1 << q) if member[m]]
    partial_comps: dict[int, list[int]] = {}
    for size in range(q + 1):
        for combo in combinations(range(q), size):
            mask = 0
            for p in combo:
                mask |= 1 << p
            if member[mask]:
                continue
            # Walk proper submasks; every one that is itself partial must
            # have a completion inside this mask.
            ok = True
            sub = (mask - 1) & mask
            while True:
                comps = partial_comps.get(sub)
                if comps is not None and not any(u & ~mask == 0 for u in comps):
                    ok = False
                    break
                if sub == 0:
                    break
                sub = (sub - 1) & mask
            if ok:
                partial_comps[mask] = _minimal_supersets(mask, member_list)
    partials = canonical_sets(_mask_to_set(m) for m in partial_comps)
    table = {
        tuple(sorted(_mask_to_set(m))): canonical_sets(_mask_to_set(u) for u in comps)
        for m, comps in partial_comps.items()
    }
    return PartialsTable(relation=rel, partials=partials, completions=table)


def characterize_membership(table: PartialsTable, positions: Iterable[int]) -> bool:
    """Decide membership using only the partials table.

    True exactly when every partial tuple set inside the given set has at
    least one completion inside it as well.
    """
    pset = _check_positions(table.relation, positions)
    for t in table.partials:
        if pset.issuperset(t):
            if not any(pset.issuperset(u) for u in table.completions[t]):
                return False
    return True
