"""Guess-and-check machines: compilation from instances, and simulation.

A machine guesses a candidate set of variables (the branch) and runs a cheap
checker over precompiled tables. Budgets are materialized integers computed
from instance parameters at build time; :func:`simulate` enforces them on
every branch and raises if one is exceeded, since that can only mean the
budget arithmetic or the checker is wrong.

Two checkers are compiled from instances. The appearance checker stores, per
variable, the constraints it appears in, the set of constraints that reject
the empty tuple, and the constraint table itself; a branch passes when every
touched constraint accepts its selected positions and every empty-rejecting
constraint is touched. The conditional-weight checker stores counting tables
keyed by head-image and tail-image sets and accepts via an inclusion-exclusion
identity, without ever looking at a concrete constraint during the branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from math import comb
from typing import Union

from ._sets import lex_subsets
from .errors import (
    BudgetExceededError,
    DomainError,
    NotApplicableError,
    ParamCSPError,
    UsageError,
    ValidationError,
)
from .instances import (
    Constraint,
    Instance,
    WeightKind,
    WeightParameter,
    _fresh_prefix,
    lift_kle_to_k,
    param_e,
    param_t,
    satisfies,
)
from .partials import compute_partials
from .relations import (
    CostModel,
    CWRelation,
    ExplicitRelation,
    WeightSet,
    WeightSetKind,
    WRelation,
)


@dataclass(frozen=True)
class SimulationResult:
    accepted: bool
    witness: frozenset[str] | None
    max_branch_steps: int
    branches_explored: int


@dataclass(frozen=True)
class AlwaysReject:
    """Checker for machines whose build already proved unsatisfiability."""


ALWAYS_REJECT = AlwaysReject()


@dataclass(frozen=True)
class AppearanceChecker:
    """Tables for the occurrence-based checker.

    ``e_v`` maps each variable to the 1-based body indices it appears in;
    ``d_set`` lists the indices rejecting the empty tuple. ``positions`` is
    derived from the constraints and maps index -> variable -> scope
    positions.
    """

    constraints: tuple[Constraint, ...]
    e_v: dict[str, tuple[int, ...]]
    d_set: tuple[int, ...]
    cost_model: CostModel
    positions: dict[int, dict[str, tuple[int, ...]]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        pos: dict[int, dict[str, tuple[int, ...]]] = {}
        for i, c in enumerate(self.constraints, start=1):
            per: dict[str, list[int]] = {}
            for p, v in enumerate(c.scope, start=1):
                per.setdefault(v, []).append(p)
            pos[i] = {v: tuple(ps) for v, ps in per.items()}
        object.__setattr__(self, "positions", pos)

    def check(self, combo: tuple[str, ...], steps: int) -> tuple[bool, int]:
        touched: set[int] = set()
        for v in combo:
            ev = self.e_v.get(v)
            if ev:
                steps += len(ev)
                touched.update(ev)
        for i in sorted(touched):
            c = self.constraints[i - 1]
            pos = self.positions[i]
            sel: list[int] = []
            for v in combo:
                ps = pos.get(v)
                if ps:
                    sel.extend(ps)
            steps += len(sel)
            steps += self.cost_model.cost(c.relation.index, len(sel))
            if not c.relation._contains(frozenset(sel)):
                return False, steps
        steps += len(self.d_set)
        for i in self.d_set:
            if i not in touched:
                return False, steps
        return True, steps


TableKey = tuple[frozenset[str], frozenset[str]]


@dataclass(frozen=True)
class CWChecker:
    """Counting tables for the conditional-weight checker.

    ``delta_sizes[(B, G)]`` counts body constraints whose head image is
    exactly ``B`` and whose tail image contains ``G``; ``lambda_caps`` holds,
    for the same keys, the largest number of tail positions any one of those
    constraints maps into ``G`` (repeats counted); ``delta_empty`` is the
    ``G = {}`` column. Unstored keys read as zero. ``sum_bound`` bounds every
    inclusion-exclusion partial sum and is asserted during checking.
    """

    b: int
    delta_sizes: dict[TableKey, int]
    lambda_caps: dict[TableKey, int]
    delta_empty: dict[frozenset[str], int]
    sum_bound: int

    def check(self, combo: tuple[str, ...], steps: int) -> tuple[bool, int]:
        subs = [
            frozenset(c)
            for size in range(len(combo) + 1)
            for c in combinations(combo, size)
        ]
        b = self.b
        pairs_g = [g for g in subs if len(g) <= b + 1]
        terms_g = [g for g in subs if 1 <= len(g) <= b]
        for bset in subs:
            lb = len(bset)
            for g in pairs_g:
                steps += lb + len(g) + 1
                if self.lambda_caps.get((bset, g), 0) > b:
                    return False, steps
        for bset in subs:
            lb = len(bset)
            total = 0
            for g in terms_g:
                steps += lb + len(g) + 2
                d = self.delta_sizes.get((bset, g), 0)
                total += d if len(g) % 2 else -d
                assert -self.sum_bound <= total <= self.sum_bound, "partial sum escaped its bound"
            steps += lb + 2
            if total != self.delta_empty.get(bset, 0):
                return False, steps
        return True, steps


@dataclass(frozen=True)
class CombinedChecker:
    first: "GuessCheckMachine"
    second: "GuessCheckMachine"


Checker = Union[AlwaysReject, AppearanceChecker, CWChecker, CombinedChecker]


@dataclass(frozen=True)
class GuessCheckMachine:
    """A compiled machine: sorted universe, guess bound, step budget, checker."""

    universe: tuple[str, ...]
    k0: int
    exact: bool
    budget: int
    checker: Checker

    def __post_init__(self) -> None:
        names = tuple(self.universe)
        object.__setattr__(self, "universe", names)
        if list(names) != sorted(set(names)):
            raise ValidationError("machine universe must be sorted and duplicate-free")
        if not isinstance(self.k0, int) or isinstance(self.k0, bool) or self.k0 < 0:
            raise ValidationError(f"k0 must be a nonnegative integer, got {self.k0!r}")
        if not isinstance(self.budget, int) or self.budget < 0:
            raise ValidationError(f"budget must be a nonnegative integer, got {self.budget!r}")

    def run_branch(self, combo: tuple[str, ...]) -> tuple[bool, int]:
        """Run one guess; returns (accepted, steps charged). ``combo`` must be sorted."""
        steps = len(combo)
        if self.exact:
            if len(combo) != self.k0:
                return False, steps
        elif len(combo) > self.k0:
            return False, steps
        ck = self.checker
        if isinstance(ck, AlwaysReject):
            return False, steps
        if isinstance(ck, CombinedChecker):
            first_ok, first_steps = ck.first.run_branch(combo)
            steps += first_steps
            if not first_ok:
                return False, steps
            second_ok, second_steps = ck.second.run_branch(combo)
            return second_ok, steps + second_steps
        return ck.check(combo, steps)


def reduce_appearance(inst: Instance, cost_model: CostModel | None = None) -> GuessCheckMachine:
    """Compile an exact-weight instance into an appearance-checking machine.

    When more constraints reject the empty tuple than k0 guessed variables
    can touch, no assignment of weight k0 exists and the machine degenerates
    to an immediate reject with budget 0.
    """
    if inst.weight.kind is not WeightKind.EXACT:
        raise NotApplicableError("appearance machines need an exact weight bound; lift first")
    cm = cost_model if cost_model is not None else CostModel()
    k0 = inst.weight.k0
    t0 = param_t(inst)
    e0 = param_e(inst)
    universe = tuple(sorted(inst.variables))
    occurrences: dict[str, list[int]] = {}
    empty_rejecting: list[int] = []
    for i, c in enumerate(inst.body, start=1):
        for v in sorted(set(c.scope)):
            occurrences.setdefault(v, []).append(i)
        if not c.relation._contains(frozenset()):
            empty_rejecting.append(i)
    if len(empty_rejecting) > k0 * t0:
        return GuessCheckMachine(universe, k0, True, 0, ALWAYS_REJECT)
    weight_cap = k0 * e0
    check_cap = 0
    for c in inst.body:
        for w in range(weight_cap + 1):
            check_cap = max(check_cap, cm.cost(c.relation.index, w))
    budget = k0 + k0 * t0 + (k0 * t0) * (weight_cap + check_cap) + k0 * t0
    checker = AppearanceChecker(
        constraints=inst.body,
        e_v={v: tuple(ix) for v, ix in sorted(occurrences.items())},
        d_set=tuple(empty_rejecting),
        cost_model=cm,
    )
    return GuessCheckMachine(universe, k0, True, budget, checker)


def _cw_shared_bound(inst: Instance) -> int:
    """Validate a conditional-weight body sharing one initial-segment tail bound."""
    bound: int | None = None
    for i, c in enumerate(inst.body, start=1):
        rel = c.relation
        if not isinstance(rel, CWRelation):
            raise NotApplicableError(f"constraint {i} is not a conditional-weight relation")
        ws = rel.weights
        cb = len(ws.values)
        if ws.kind is not WeightSetKind.FINITE or ws.values != tuple(range(1, cb + 1)):
            raise NotApplicableError(
                f"constraint {i} tail weights must be an initial segment 1..b"
            )
        if bound is None:
            bound = cb
        elif bound != cb:
            raise NotApplicableError("tail bounds differ across the body")
    return 0 if bound is None else bound


def delta_set(inst: Instance, head_set: frozenset[str] | set[str], tail_set: frozenset[str] | set[str]) -> tuple[int, ...]:
    """1-based indices of body constraints with head image exactly ``head_set``
    and tail image containing ``tail_set``."""
    _cw_shared_bound(inst)
    bset = frozenset(head_set)
    gset = frozenset(tail_set)
    for label, s in (("head", bset), ("tail", gset)):
        extra = s - inst.variable_set
        if extra:
            raise DomainError(f"{label} set uses undeclared variables: {sorted(extra)}")
    hits: list[int] = []
    for i, c in enumerate(inst.body, start=1):
        d = c.relation.head
        if frozenset(c.scope[:d]) == bset and gset <= frozenset(c.scope[d:]):
            hits.append(i)
    return tuple(hits)


def build_cw_tables(inst: Instance, k0: int) -> CWChecker:
    """Count head/tail image patterns of a conditional-weight body.

    Only witnessed keys are stored, with head images larger than ``k0``
    skipped outright: no guess of at most ``k0`` variables can ever bind
    them. The total entry count is asserted against its combinatorial cap.
    """
    if not isinstance(k0, int) or isinstance(k0, bool) or k0 < 0:
        raise DomainError(f"k0 must be a nonnegative integer, got {k0!r}")
    b = _cw_shared_bound(inst)
    n_size = max(len(inst.variables), len(inst.body), 1)
    g_cap = min(b + 1, k0)
    delta_sizes: dict[TableKey, int] = {}
    lambda_caps: dict[TableKey, int] = {}
    delta_empty: dict[frozenset[str], int] = {}
    for c in inst.body:
        d = c.relation.head
        head_img = frozenset(c.scope[:d])
        if len(head_img) > k0:
            continue
        delta_empty[head_img] = delta_empty.get(head_img, 0) + 1
        tail_vars = c.scope[d:]
        tail_img = sorted(set(tail_vars))
        for size in range(1, min(g_cap, len(tail_img)) + 1):
            for chosen in combinations(tail_img, size):
                g = frozenset(chosen)
                key = (head_img, g)
                delta_sizes[key] = delta_sizes.get(key, 0) + 1
                hits = sum(1 for v in tail_vars if v in g)
                if hits > lambda_caps.get(key, 0):
                    lambda_caps[key] = hits
    entries = len(delta_empty) + len(delta_sizes)
    cap = n_size * sum(comb(n_size, i) for i in range(b + 2))
    assert entries <= cap, f"{entries} stored table entries exceed the cap {cap}"
    assert all(len(bset) <= k0 and len(g) <= g_cap for bset, g in delta_sizes), "oversized table key"
    sum_bound = n_size * sum(comb(k0, j) for j in range(1, min(b, k0) + 1))
    return CWChecker(
        b=b,
        delta_sizes=delta_sizes,
        lambda_caps=lambda_caps,
        delta_empty=delta_empty,
        sum_bound=sum_bound,
    )


def inclusion_exclusion_union(
    tables: CWChecker,
    head_set: frozenset[str] | set[str],
    candidates: frozenset[str] | set[str],
    bound: int,
) -> int:
    """Alternating sum of stored counts over nonempty tail subsets of ``candidates``.

    With all tail images inside ``candidates`` no larger than ``bound``, this
    equals the number of constraints with head image ``head_set`` whose tail
    image meets ``candidates`` at all.
    """
    bset = frozenset(head_set)
    elems = sorted(candidates)
    total = 0
    for size in range(1, min(bound, len(elems)) + 1):
        sign = 1 if size % 2 else -1
        for chosen in combinations(elems, size):
            total += sign * tables.delta_sizes.get((bset, frozenset(chosen)), 0)
    return total


def _cw_budget(k0: int, b: int) -> int:
    """Exact cost of one full conditional-weight check at guess size ``k0``."""
    pair_part = 0
    term_part = 0
    for i in range(k0 + 1):
        heads = comb(k0, i)
        for j in range(min(b + 1, k0) + 1):
            pair_part += heads * comb(k0, j) * (i + j + 1)
        for j in range(1, min(b, k0) + 1):
            term_part += heads * comb(k0, j) * (i + j + 2)
        term_part += heads * (i + 2)
    return k0 + pair_part + term_part


def reduce_cw(inst: Instance) -> GuessCheckMachine:
    """Compile an exact-weight conditional-weight instance into a table machine."""
    if inst.weight.kind is not WeightKind.EXACT:
        raise NotApplicableError("table machines need an exact weight bound; lift first")
    k0 = inst.weight.k0
    checker = build_cw_tables(inst, k0)
    return GuessCheckMachine(
        universe=tuple(sorted(inst.variables)),
        k0=k0,
        exact=True,
        budget=_cw_budget(k0, checker.b),
        checker=checker,
    )


def combine_machines(first: GuessCheckMachine, second: GuessCheckMachine) -> GuessCheckMachine:
    """Chain two machines over the same universe and guess bound.

    The combined budget is the sum of the parts plus ``k0`` for writing the
    shared guess once more when handing it to the second checker.
    """
    if first.universe != second.universe:
        raise UsageError("machines disagree on the universe")
    if first.k0 != second.k0 or first.exact != second.exact:
        raise UsageError("machines disagree on the guess bound")
    return GuessCheckMachine(
        universe=first.universe,
        k0=first.k0,
        exact=first.exact,
        budget=first.budget + second.budget + first.k0,
        checker=CombinedChecker(first, second),
    )


def simulate(machine: GuessCheckMachine) -> SimulationResult:
    """Deterministically explore guesses until one accepts.

    Exact machines enumerate size-k0 subsets of the universe in sorted order;
    at-most machines enumerate all subsets up to size k0 in lexicographic
    subset order. The first accepting branch ends the run. Machines that
    rejected at build time explore nothing.
    """
    if isinstance(machine.checker, AlwaysReject):
        return SimulationResult(False, None, 0, 0)
    names = machine.universe
    if machine.exact:
        if machine.k0 > len(names):
            return SimulationResult(False, None, 0, 0)
        branches = combinations(names, machine.k0)
    else:
        branches = lex_subsets(names, machine.k0)
    max_steps = 0
    explored = 0
    for combo in branches:
        explored += 1
        accepted, steps = machine.run_branch(combo)
        if steps > machine.budget:
            raise BudgetExceededError(
                f"branch {combo!r} used {steps} steps against budget {machine.budget}"
            )
        if steps > max_steps:
            max_steps = steps
        if accepted:
            return SimulationResult(True, frozenset(combo), max_steps, explored)
    return SimulationResult(False, None, max_steps, explored)


@dataclass(frozen=True)
class CompletionReduction:
    """Result of the indicator-variable reduction, with naming metadata.

    ``indicator_keys`` maps each fresh indicator variable to the set of
    original variables it stands for; ``bound`` is the shared tail bound of
    the conditional part (2**d).
    """

    instance: Instance
    original_variables: tuple[str, ...]
    indicator_keys: dict[str, frozenset[str]]
    bound: int


_INDICATOR_STEM = "lam"


def explicitize_w_body(inst: Instance, d: int) -> Instance:
    """Expand finite weight-set constraints into explicitly listed relations.

    Every admissible weight must be at most ``d``; the member lists stay
    polynomial because only tuples of weight up to ``d`` qualify. Constraints
    that are already explicit pass through unchanged.
    """
    new_body: list[Constraint] = []
    for i, c in enumerate(inst.body, start=1):
        rel = c.relation
        if isinstance(rel, ExplicitRelation):
            new_body.append(c)
            continue
        if not isinstance(rel, WRelation) or rel.weights.kind is not WeightSetKind.FINITE:
            raise NotApplicableError(
                f"constraint {i}: only finite weight-set constraints convert"
            )
        values = rel.weights.values
        if values and max(values) > d:
            raise UsageError(f"constraint {i}: weight {max(values)} above the bound {d}")
        members = tuple(
            chosen
            for w in values
            if w <= rel.arity
            for chosen in combinations(range(1, rel.arity + 1), w)
        )
        new_body.append(Constraint(ExplicitRelation(rel.arity, members), c.scope))
    return replace(inst, body=tuple(new_body))


def completion_reduction(inst: Instance, d: int) -> CompletionReduction:
    """Reduce an explicit-relation instance to the weight-plus-conditional language.

    One indicator variable is minted per distinct variable-set image of a
    partial tuple or completion; indicators are bound to their key sets by
    conditional constraints in both directions, and each partial's constraint
    requires a true completion indicator whenever the partial's own indicator
    is true. The output weight is at most ``k0 + 2**k0``.
    """
    if inst.weight.kind is not WeightKind.EXACT:
        raise NotApplicableError("the completion reduction starts from an exact weight bound")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise UsageError(f"the member-size bound must be a positive integer, got {d!r}")
    if not inst.variables:
        raise UsageError("the completion reduction needs at least one variable")
    for i, c in enumerate(inst.body, start=1):
        if not isinstance(c.relation, ExplicitRelation):
            raise NotApplicableError(f"constraint {i} is not an explicit relation")
        oversized = [m for m in c.relation.members if len(m) > d]
        if oversized:
            raise UsageError(
                f"constraint {i} has a member of size {len(oversized[0])}, above the bound {d}"
            )
    k0 = inst.weight.k0
    tables = {}
    keyset: set[frozenset[str]] = set()
    partial_records: list[tuple[frozenset[str], tuple[frozenset[str], ...]]] = []
    seen_records: set[tuple[frozenset[str], tuple[frozenset[str], ...]]] = set()
    for c in inst.body:
        if c.relation not in tables:
            tables[c.relation] = compute_partials(c.relation)
        table = tables[c.relation]
        for t in table.partials:
            key = frozenset(c.scope[p - 1] for p in t)
            images = {frozenset(c.scope[p - 1] for p in u) for u in table.completions[t]}
            comp_keys = tuple(sorted(images, key=sorted))
            record = (key, comp_keys)
            if record in seen_records:
                continue
            seen_records.add(record)
            partial_records.append(record)
            keyset.add(key)
            keyset.update(comp_keys)
    ordered_keys = sorted(keyset, key=sorted)
    prefix = _fresh_prefix(_INDICATOR_STEM, inst.variables)
    width = max(3, len(str(len(ordered_keys))))
    name_of = {key: f"{prefix}{i:0{width}d}" for i, key in enumerate(ordered_keys, start=1)}
    bound = 2**d
    tail_ws = WeightSet.finite(range(1, bound + 1))
    body: list[Constraint] = [
        Constraint(
            WRelation(WeightSet.finite((k0,)), arity=len(inst.variables)),
            inst.variables,
        )
    ]
    partial_records.sort(key=lambda rec: (name_of[rec[0]], tuple(name_of[u] for u in rec[1])))
    for key, comp_keys in partial_records:
        scope = (name_of[key],) + tuple(name_of[u] for u in comp_keys)
        body.append(Constraint(CWRelation(tail_ws, head=1, tail=len(comp_keys)), scope))
    for key in ordered_keys:
        indicator = name_of[key]
        key_vars = tuple(sorted(key))
        body.append(Constraint(CWRelation(tail_ws, head=len(key), tail=1), key_vars + (indicator,)))
        for x in key_vars:
            body.append(Constraint(CWRelation(tail_ws, head=1, tail=1), (indicator, x)))
    reduced = Instance(
        variables=inst.variables + tuple(name_of[key] for key in ordered_keys),
        weight=WeightParameter(WeightKind.ATMOST, k0 + 2**k0),
        body=tuple(body),
    )
    return CompletionReduction(
        instance=reduced,
        original_variables=inst.variables,
        indicator_keys={name_of[key]: key for key in ordered_keys},
        bound=bound,
    )


def reduce_completion(inst: Instance, d: int) -> Instance:
    """The instance produced by :func:`completion_reduction`."""
    return completion_reduction(inst, d).instance


def solve_wd_pipeline(inst: Instance, d: int) -> frozenset[str] | None:
    """End-to-end solver for exact-weight instances with finite weights in [0, d].

    For ``d = 0`` the answer is immediate: constraints admitting weight 0
    forbid their scopes, constraints admitting nothing are contradictions.
    Otherwise the body is made explicit, reduced through indicator variables,
    lifted to an exact weight, split into its weight and conditional parts,
    compiled into a combined machine, and simulated; an accepting witness is
    projected back onto the original variables.
    """
    if inst.weight.kind is not WeightKind.EXACT:
        raise NotApplicableError("the pipeline starts from an exact weight bound")
    if not isinstance(d, int) or isinstance(d, bool) or d < 0:
        raise UsageError(f"the member-size bound must be a nonnegative integer, got {d!r}")
    if d == 0:
        forbidden: set[str] = set()
        contradiction = False
        for i, c in enumerate(inst.body, start=1):
            rel = c.relation
            if not isinstance(rel, WRelation) or rel.weights.kind is not WeightSetKind.FINITE:
                raise NotApplicableError(
                    f"constraint {i}: only finite weight-set constraints convert"
                )
            if rel.weights.values and max(rel.weights.values) > 0:
                raise UsageError(f"constraint {i}: weight above the bound 0")
            if not rel.weights.values:
                contradiction = True
            forbidden.update(c.scope)
        if contradiction:
            return None
        allowed = sorted(set(inst.variables) - forbidden)
        if inst.weight.k0 > len(allowed):
            return None
        witness = frozenset(allowed[: inst.weight.k0])
        if not satisfies(inst, witness):
            raise ParamCSPError("pipeline produced an invalid witness")
        return witness
    explicit = explicitize_w_body(inst, d)
    reduction = completion_reduction(explicit, d)
    lifted = lift_kle_to_k(reduction.instance)
    w_part = replace(
        lifted,
        body=tuple(c for c in lifted.body if isinstance(c.relation, WRelation)),
    )
    cw_part = replace(
        lifted,
        body=tuple(c for c in lifted.body if isinstance(c.relation, CWRelation)),
    )
    machine = combine_machines(reduce_appearance(w_part), reduce_cw(cw_part))
    result = simulate(machine)
    if not result.accepted:
        return None
    assert result.witness is not None
    witness = frozenset(v for v in result.witness if v in inst.variable_set)
    if not satisfies(inst, witness):
        raise ParamCSPError("pipeline produced an invalid witness")
    return witness
