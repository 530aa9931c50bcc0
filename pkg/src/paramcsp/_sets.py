"""Set-encoding plumbing shared by the public modules.

Finite sets travel as ``frozenset`` in memory and as sorted tuples wherever a
canonical, comparable encoding is needed (table keys, serialized documents,
printed output).
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from typing import TypeVar

T = TypeVar("T")


def canonical_set(elements: Iterable[T]) -> tuple[T, ...]:
    """Deduplicate and sort one set into its canonical tuple form."""
    return tuple(sorted(set(elements)))


def canonical_sets(sets: Iterable[Iterable[T]]) -> tuple[tuple[T, ...], ...]:
    """Canonicalize a family of sets: each sorted, the family ordered lexicographically."""
    return tuple(sorted({canonical_set(s) for s in sets}))


def lex_subsets(items: Sequence[T], max_size: int) -> Iterator[tuple[T, ...]]:
    """Yield all subsets of ``items`` with at most ``max_size`` elements.

    Subsets come out in lexicographic order over the element sequence as given
    (callers pass a sorted sequence when they need the canonical order), so the
    empty set is first and ``(items[0],)`` precedes ``(items[0], items[1])``.
    """
    n = len(items)
    prefix: list[T] = []

    def walk(start: int) -> Iterator[tuple[T, ...]]:
        yield tuple(prefix)
        if len(prefix) >= max_size:
            return
        for i in range(start, n):
            prefix.append(items[i])
            yield from walk(i + 1)
            prefix.pop()

    return walk(0)
