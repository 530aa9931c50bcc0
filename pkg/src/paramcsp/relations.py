"""Boolean relations over tuple weights, and the membership cost model.

A Boolean tuple of arity ``r`` is identified with the set of its 1-positions,
a subset of ``{1..r}``. Three relation families cover everything here:

* :class:`WRelation` constrains the tuple weight (number of 1-positions).
* :class:`CWRelation` splits positions into a head block and a tail block and
  constrains the tail weight only when the whole head is set.
* :class:`ExplicitRelation` lists its members outright.

Every relation carries a positive ``index`` (its position in some fixed
enumeration of the language; defaults to the arity) which only matters for
:func:`membership_cost`.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from ._sets import canonical_set, canonical_sets
from .errors import DomainError, ValidationError


class WeightSetKind(Enum):
    FINITE = "finite"
    COFINITE = "cofinite"
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class WeightSet:
    """A set of admissible tuple weights.

    ``values`` holds the members for FINITE kinds and the excluded weights for
    COFINITE kinds; the parity kinds carry no values. Values normalize to a
    sorted, deduplicated tuple, so structurally equal sets compare equal.
    """

    kind: WeightSetKind
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        raw = tuple(self.values)
        for w in raw:
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                raise ValidationError(f"weight values must be nonnegative integers, got {w!r}")
        vals = canonical_set(raw)
        if self.kind in (WeightSetKind.EVEN, WeightSetKind.ODD) and vals:
            raise ValidationError(f"{self.kind.value} weight sets carry no values")
        object.__setattr__(self, "values", vals)

    @classmethod
    def finite(cls, values: Iterable[int]) -> WeightSet:
        return cls(WeightSetKind.FINITE, tuple(values))

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> WeightSet:
        return cls(WeightSetKind.COFINITE, tuple(excluded))

    @classmethod
    def even(cls) -> WeightSet:
        return cls(WeightSetKind.EVEN)

    @classmethod
    def odd(cls) -> WeightSet:
        return cls(WeightSetKind.ODD)

    def contains(self, weight: int) -> bool:
        if not isinstance(weight, int) or isinstance(weight, bool) or weight < 0:
            raise DomainError(f"weights are nonnegative integers, got {weight!r}")
        if self.kind is WeightSetKind.FINITE:
            return weight in self.values
        if self.kind is WeightSetKind.COFINITE:
            return weight not in self.values
        if self.kind is WeightSetKind.EVEN:
            return weight % 2 == 0
        return weight % 2 == 1


def weightset_contains(weights: WeightSet, weight: int) -> bool:
    """Decide ``weight in weights``."""
    return weights.contains(weight)


def _normalize_index(rel: object, arity: int, index: int | None) -> None:
    if index is None:
        index = arity
    if not isinstance(index, int) or isinstance(index, bool) or index < 1:
        raise ValidationError(f"relation index must be a positive integer, got {index!r}")
    object.__setattr__(rel, "index", index)


@dataclass(frozen=True)
class WRelation:
    """All tuples of the given arity whose weight lies in ``weights``."""

    weights: WeightSet
    arity: int
    index: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.arity, int) or isinstance(self.arity, bool) or self.arity < 1:
            raise ValidationError(f"arity must be a positive integer, got {self.arity!r}")
        _normalize_index(self, self.arity, self.index)

    def _contains(self, positions: frozenset[int]) -> bool:
        return self.weights.contains(len(positions))


@dataclass(frozen=True)
class CWRelation:
    """Conditional weight relation with ``head`` leading and ``tail`` trailing positions.

    A tuple is a member unless all ``head`` positions are set and the number of
    set tail positions falls outside ``weights``. With ``head == 0`` this
    degenerates to :class:`WRelation` over the tail; with ``tail == 0`` and a
    weight set not containing 0 it forbids setting the whole head at once.
    """

    weights: WeightSet
    head: int
    tail: int
    index: int | None = None

    def __post_init__(self) -> None:
        for name in ("head", "tail"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValidationError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.head + self.tail < 1:
            raise ValidationError("relation arity must be at least 1")
        _normalize_index(self, self.arity, self.index)

    @property
    def arity(self) -> int:
        return self.head + self.tail

    def _contains(self, positions: frozenset[int]) -> bool:
        for p in range(1, self.head + 1):
            if p not in positions:
                return True
        tail_weight = sum(1 for p in positions if p > self.head)
        return self.weights.contains(tail_weight)


@dataclass(frozen=True)
class ExplicitRelation:
    """A relation given by an explicit list of members (sets of 1-positions)."""

    arity: int
    members: tuple[tuple[int, ...], ...] = ()
    index: int | None = None
    _member_sets: frozenset[frozenset[int]] = field(
        init=False, repr=False, compare=False, default=frozenset()
    )

    def __post_init__(self) -> None:
        if not isinstance(self.arity, int) or isinstance(self.arity, bool) or self.arity < 1:
            raise ValidationError(f"arity must be a positive integer, got {self.arity!r}")
        checked: list[tuple[int, ...]] = []
        for member in self.members:
            entry = tuple(member)
            for p in entry:
                if not isinstance(p, int) or isinstance(p, bool) or not 1 <= p <= self.arity:
                    raise ValidationError(
                        f"member position {p!r} outside 1..{self.arity}"
                    )
            checked.append(entry)
        canon = canonical_sets(checked)
        object.__setattr__(self, "members", canon)
        object.__setattr__(self, "_member_sets", frozenset(frozenset(m) for m in canon))
        _normalize_index(self, self.arity, self.index)

    def _contains(self, positions: frozenset[int]) -> bool:
        return positions in self._member_sets


Relation = Union[WRelation, CWRelation, ExplicitRelation]


def _check_positions(rel: Relation, positions: Iterable[int]) -> frozenset[int]:
    pset = frozenset(positions)
    for p in pset:
        if not isinstance(p, int) or isinstance(p, bool) or not 1 <= p <= rel.arity:
            raise DomainError(f"position {p!r} outside 1..{rel.arity}")
    return pset


def relation_membership(rel: Relation, positions: Iterable[int]) -> bool:
    """Decide whether the tuple with the given 1-positions belongs to ``rel``.

    Positions outside ``1..rel.arity`` raise :class:`DomainError`.
    """
    return rel._contains(_check_positions(rel, positions))


def ceil_log2(x: int) -> int:
    """Smallest ``k`` with ``2**k >= x``, for positive ``x``."""
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise DomainError(f"ceil_log2 needs a positive integer, got {x!r}")
    return (x - 1).bit_length()


def default_checker_cost(weight: int) -> int:
    """Default per-check base cost: tuple weight plus one."""
    return weight + 1


@dataclass(frozen=True)
class AffineCost:
    """Affine base-cost function ``slope * weight + offset``; serializable."""

    slope: int = 1
    offset: int = 1

    def __post_init__(self) -> None:
        for name in ("slope", "offset"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValidationError(f"{name} must be a nonnegative integer, got {v!r}")

    def __call__(self, weight: int) -> int:
        return self.slope * weight + self.offset


@dataclass(frozen=True)
class CostModel:
    """Charge for one membership check: ``checker_cost(|T|) * ceil_log2(index + 1)**exponent``.

    The logarithmic factor accounts for reading the relation's index; the
    ``checker_cost`` factor accounts for reading the tuple itself.
    """

    exponent: int = 1
    checker_cost: Callable[[int], int] = default_checker_cost

    def __post_init__(self) -> None:
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool) or self.exponent < 0:
            raise ValidationError(f"exponent must be a nonnegative integer, got {self.exponent!r}")

    def cost(self, index: int, weight: int) -> int:
        if not isinstance(index, int) or isinstance(index, bool) or index < 1:
            raise DomainError(f"relation index must be a positive integer, got {index!r}")
        if not isinstance(weight, int) or isinstance(weight, bool) or weight < 0:
            raise DomainError(f"tuple weight must be a nonnegative integer, got {weight!r}")
        base = self.checker_cost(weight)
        if not isinstance(base, int) or base < 0:
            raise ValidationError(f"checker_cost must return a nonnegative integer, got {base!r}")
        return base * ceil_log2(index + 1) ** self.exponent


def membership_cost(cost_model: CostModel, rel: Relation, positions: Iterable[int]) -> int:
    """Charge for checking the tuple with the given 1-positions against ``rel``."""
    pset = _check_positions(rel, positions)
    return cost_model.cost(rel.index, len(pset))
