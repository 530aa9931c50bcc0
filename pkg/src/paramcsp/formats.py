"""JSON documents for instances and machines.

Documents are versioned, canonical, and diagnostic-friendly: serialization
always produces sorted keys and sorted set encodings so equal objects give
byte-identical text, and parse errors name the offending field path
(``constraints[2].scope``) instead of just failing.

Positions inside relations are 1-based in documents, matching the in-memory
convention. Weight values are plain nonnegative integers.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import ValidationError
from .instances import Constraint, Instance, WeightKind, WeightParameter, weight_relation
from .machines import (
    ALWAYS_REJECT,
    AlwaysReject,
    AppearanceChecker,
    CombinedChecker,
    CWChecker,
    GuessCheckMachine,
)
from .relations import (
    AffineCost,
    CostModel,
    CWRelation,
    ExplicitRelation,
    Relation,
    WeightSet,
    WeightSetKind,
    WRelation,
    default_checker_cost,
)

FORMAT_VERSION = "1"


def _dump(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"document is not valid JSON: {exc}") from exc


def _as_object(value: Any, path: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ValidationError(f"{path}: expected an object, got {type(value).__name__}")
    return value


def _as_list(value: Any, path: str) -> list[Any]:
    if not isinstance(value, list):
        raise ValidationError(f"{path}: expected a list, got {type(value).__name__}")
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ValidationError(f"{path}: expected a string, got {type(value).__name__}")
    return value


def _as_int(value: Any, path: str, *, low: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"{path}: expected an integer, got {type(value).__name__}")
    if low is not None and value < low:
        raise ValidationError(f"{path}: expected an integer >= {low}, got {value}")
    return value


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ValidationError(f"{path}: expected a boolean, got {type(value).__name__}")
    return value


def _get(obj: dict[str, Any], key: str, path: str) -> Any:
    if key not in obj:
        raise ValidationError(f"{path}: missing required field {key!r}")
    return obj[key]


def _check_version(obj: dict[str, Any], path: str) -> None:
    version = _as_str(_get(obj, "format_version", path), f"{path}.format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            f"{path}.format_version: unsupported version {version!r}, expected {FORMAT_VERSION!r}"
        )


def _weights_to_doc(ws: WeightSet) -> dict[str, Any]:
    doc: dict[str, Any] = {"kind": ws.kind.value}
    if ws.kind in (WeightSetKind.FINITE, WeightSetKind.COFINITE):
        doc["values"] = list(ws.values)
    return doc


def _weights_from_doc(value: Any, path: str) -> WeightSet:
    obj = _as_object(value, path)
    kind_name = _as_str(_get(obj, "kind", path), f"{path}.kind")
    try:
        kind = WeightSetKind(kind_name)
    except ValueError:
        raise ValidationError(f"{path}.kind: unknown weight-set kind {kind_name!r}") from None
    raw = obj.get("values", [])
    values = tuple(
        _as_int(v, f"{path}.values[{i}]", low=0)
        for i, v in enumerate(_as_list(raw, f"{path}.values"))
    )
    try:
        return WeightSet(kind, values)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _relation_to_doc(rel: Relation) -> dict[str, Any]:
    if isinstance(rel, WRelation):
        doc: dict[str, Any] = {
            "type": "W",
            "weights": _weights_to_doc(rel.weights),
            "arity": rel.arity,
        }
    elif isinstance(rel, CWRelation):
        doc = {
            "type": "CW",
            "weights": _weights_to_doc(rel.weights),
            "d": rel.head,
            "m": rel.tail,
        }
    elif isinstance(rel, ExplicitRelation):
        doc = {
            "type": "explicit",
            "arity": rel.arity,
            "members": [list(m) for m in rel.members],
        }
    else:
        raise ValidationError(f"unknown relation type {type(rel).__name__}")
    if rel.index != rel.arity:
        doc["index"] = rel.index
    return doc


def _relation_from_doc(value: Any, path: str) -> Relation:
    obj = _as_object(value, path)
    rtype = _as_str(_get(obj, "type", path), f"{path}.type")
    index = None
    if "index" in obj:
        index = _as_int(obj["index"], f"{path}.index", low=1)
    try:
        if rtype == "W":
            weights = _weights_from_doc(_get(obj, "weights", path), f"{path}.weights")
            arity = _as_int(_get(obj, "arity", path), f"{path}.arity", low=1)
            return WRelation(weights, arity, index)
        if rtype == "CW":
            weights = _weights_from_doc(_get(obj, "weights", path), f"{path}.weights")
            head = _as_int(_get(obj, "d", path), f"{path}.d", low=0)
            tail = _as_int(_get(obj, "m", path), f"{path}.m", low=0)
            return CWRelation(weights, head, tail, index)
        if rtype == "explicit":
            arity = _as_int(_get(obj, "arity", path), f"{path}.arity", low=1)
            raw_members = _as_list(_get(obj, "members", path), f"{path}.members")
            members = []
            for i, member in enumerate(raw_members):
                entries = _as_list(member, f"{path}.members[{i}]")
                members.append(
                    tuple(
                        _as_int(p, f"{path}.members[{i}][{j}]", low=1)
                        for j, p in enumerate(entries)
                    )
                )
            return ExplicitRelation(arity, tuple(members), index)
    except ValidationError as exc:
        msg = str(exc)
        raise ValidationError(msg if msg.startswith(path) else f"{path}: {msg}") from None
    raise ValidationError(f"{path}.type: unknown relation type {rtype!r}")


def serialize_instance(inst: Instance, *, materialize_weight: bool = False) -> str:
    """Render an instance document; canonical, ends with a newline.

    With ``materialize_weight`` the weight bound is additionally written as
    an explicit constraint over all variables, for consumers that want the
    bound inside the body; the parameter field stays authoritative either way.
    """
    constraints = [
        {"relation": _relation_to_doc(c.relation), "scope": list(c.scope)}
        for c in inst.body
    ]
    if materialize_weight:
        constraints.append(
            {
                "relation": _relation_to_doc(weight_relation(inst)),
                "scope": list(inst.variables),
            }
        )
    doc = {
        "format_version": FORMAT_VERSION,
        "variables": list(inst.variables),
        "parameter": {"kind": inst.weight.kind.value, "k": inst.weight.k0},
        "constraints": constraints,
    }
    return _dump(doc)


def parse_instance(text: str) -> Instance:
    """Parse an instance document, naming the failing field on error."""
    top = _as_object(_load(text), "document")
    _check_version(top, "document")
    names = [
        _as_str(v, f"variables[{i}]")
        for i, v in enumerate(_as_list(_get(top, "variables", "document"), "variables"))
    ]
    param = _as_object(_get(top, "parameter", "document"), "parameter")
    kind_name = _as_str(_get(param, "kind", "parameter"), "parameter.kind")
    try:
        kind = WeightKind(kind_name)
    except ValueError:
        raise ValidationError(f"parameter.kind: unknown kind {kind_name!r}") from None
    k0 = _as_int(_get(param, "k", "parameter"), "parameter.k", low=0)
    declared = set(names)
    body = []
    for i, entry in enumerate(_as_list(_get(top, "constraints", "document"), "constraints")):
        path = f"constraints[{i}]"
        obj = _as_object(entry, path)
        rel = _relation_from_doc(_get(obj, "relation", path), f"{path}.relation")
        scope = tuple(
            _as_str(v, f"{path}.scope[{j}]")
            for j, v in enumerate(_as_list(_get(obj, "scope", path), f"{path}.scope"))
        )
        for j, v in enumerate(scope):
            if v not in declared:
                raise ValidationError(f"{path}.scope[{j}]: undeclared variable {v!r}")
        try:
            body.append(Constraint(rel, scope))
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from None
    try:
        return Instance(tuple(names), WeightParameter(kind, k0), tuple(body))
    except ValidationError as exc:
        raise ValidationError(f"document: {exc}") from None


def parse_relation(text: str) -> Relation:
    """Parse a bare relation document (the constraint ``relation`` object)."""
    return _relation_from_doc(_load(text), "relation")


def _cost_model_to_doc(cm: CostModel) -> dict[str, Any]:
    doc: dict[str, Any] = {"exponent": cm.exponent}
    if cm.checker_cost is default_checker_cost:
        doc["checker"] = "default"
    elif isinstance(cm.checker_cost, AffineCost):
        doc["checker"] = {"slope": cm.checker_cost.slope, "offset": cm.checker_cost.offset}
    else:
        raise ValidationError("only the default and affine checker costs serialize")
    return doc


def _cost_model_from_doc(value: Any, path: str) -> CostModel:
    obj = _as_object(value, path)
    exponent = _as_int(_get(obj, "exponent", path), f"{path}.exponent", low=0)
    checker = _get(obj, "checker", path)
    if checker == "default":
        return CostModel(exponent)
    cobj = _as_object(checker, f"{path}.checker")
    slope = _as_int(_get(cobj, "slope", f"{path}.checker"), f"{path}.checker.slope", low=0)
    offset = _as_int(_get(cobj, "offset", f"{path}.checker"), f"{path}.checker.offset", low=0)
    return CostModel(exponent, AffineCost(slope, offset))


def _machine_to_doc(machine: GuessCheckMachine) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "universe": list(machine.universe),
        "k0": machine.k0,
        "exact": machine.exact,
        "budget": machine.budget,
    }
    ck = machine.checker
    if isinstance(ck, AlwaysReject):
        doc["kind"] = "always-reject"
    elif isinstance(ck, AppearanceChecker):
        doc["kind"] = "appearance"
        doc["cost_model"] = _cost_model_to_doc(ck.cost_model)
        doc["constraints"] = [
            {"relation": _relation_to_doc(c.relation), "scope": list(c.scope)}
            for c in ck.constraints
        ]
        doc["e_v"] = {v: list(ix) for v, ix in sorted(ck.e_v.items())}
        doc["d_set"] = list(ck.d_set)
    elif isinstance(ck, CWChecker):
        doc["kind"] = "cw"
        doc["b"] = ck.b
        doc["sum_bound"] = ck.sum_bound
        rows = []
        for bset, count in ck.delta_empty.items():
            rows.append({"head": sorted(bset), "tail": [], "count": count})
        for (bset, gset), count in ck.delta_sizes.items():
            rows.append(
                {
                    "head": sorted(bset),
                    "tail": sorted(gset),
                    "count": count,
                    "max_positions": ck.lambda_caps[(bset, gset)],
                }
            )
        rows.sort(key=lambda row: (row["head"], row["tail"]))
        doc["tables"] = rows
    elif isinstance(ck, CombinedChecker):
        doc["kind"] = "combined"
        doc["first"] = _machine_to_doc(ck.first)
        doc["second"] = _machine_to_doc(ck.second)
    else:
        raise ValidationError(f"unknown checker type {type(ck).__name__}")
    return doc


def serialize_machine(machine: GuessCheckMachine) -> str:
    """Render a machine document with canonically ordered tables."""
    return _dump({"format_version": FORMAT_VERSION, "machine": _machine_to_doc(machine)})


def _machine_from_doc(value: Any, path: str) -> GuessCheckMachine:
    obj = _as_object(value, path)
    kind = _as_str(_get(obj, "kind", path), f"{path}.kind")
    universe = tuple(
        _as_str(v, f"{path}.universe[{i}]")
        for i, v in enumerate(_as_list(_get(obj, "universe", path), f"{path}.universe"))
    )
    k0 = _as_int(_get(obj, "k0", path), f"{path}.k0", low=0)
    exact = _as_bool(_get(obj, "exact", path), f"{path}.exact")
    budget = _as_int(_get(obj, "budget", path), f"{path}.budget", low=0)
    if kind == "always-reject":
        checker: Any = ALWAYS_REJECT
    elif kind == "appearance":
        cost_model = _cost_model_from_doc(_get(obj, "cost_model", path), f"{path}.cost_model")
        constraints = []
        for i, entry in enumerate(_as_list(_get(obj, "constraints", path), f"{path}.constraints")):
            cpath = f"{path}.constraints[{i}]"
            centry = _as_object(entry, cpath)
            rel = _relation_from_doc(_get(centry, "relation", cpath), f"{cpath}.relation")
            scope = tuple(
                _as_str(v, f"{cpath}.scope[{j}]")
                for j, v in enumerate(_as_list(_get(centry, "scope", cpath), f"{cpath}.scope"))
            )
            try:
                constraints.append(Constraint(rel, scope))
            except ValidationError as exc:
                raise ValidationError(f"{cpath}: {exc}") from None
        count = len(constraints)
        e_v = {}
        for v, raw in _as_object(_get(obj, "e_v", path), f"{path}.e_v").items():
            ix = tuple(
                _as_int(n, f"{path}.e_v.{v}[{j}]", low=1)
                for j, n in enumerate(_as_list(raw, f"{path}.e_v.{v}"))
            )
            for n in ix:
                if n > count:
                    raise ValidationError(f"{path}.e_v.{v}: index {n} beyond {count} constraints")
            e_v[v] = ix
        d_raw = _as_list(_get(obj, "d_set", path), f"{path}.d_set")
        d_set = tuple(
            _as_int(n, f"{path}.d_set[{j}]", low=1) for j, n in enumerate(d_raw)
        )
        for n in d_set:
            if n > count:
                raise ValidationError(f"{path}.d_set: index {n} beyond {count} constraints")
        checker = AppearanceChecker(tuple(constraints), e_v, d_set, cost_model)
    elif kind == "cw":
        b = _as_int(_get(obj, "b", path), f"{path}.b", low=0)
        sum_bound = _as_int(_get(obj, "sum_bound", path), f"{path}.sum_bound", low=0)
        delta_sizes: dict[tuple[frozenset[str], frozenset[str]], int] = {}
        lambda_caps: dict[tuple[frozenset[str], frozenset[str]], int] = {}
        delta_empty: dict[frozenset[str], int] = {}
        for i, entry in enumerate(_as_list(_get(obj, "tables", path), f"{path}.tables")):
            rpath = f"{path}.tables[{i}]"
            row = _as_object(entry, rpath)
            head = frozenset(
                _as_str(v, f"{rpath}.head[{j}]")
                for j, v in enumerate(_as_list(_get(row, "head", rpath), f"{rpath}.head"))
            )
            tail = frozenset(
                _as_str(v, f"{rpath}.tail[{j}]")
                for j, v in enumerate(_as_list(_get(row, "tail", rpath), f"{rpath}.tail"))
            )
            count = _as_int(_get(row, "count", rpath), f"{rpath}.count", low=0)
            if tail:
                key = (head, tail)
                if key in delta_sizes:
                    raise ValidationError(f"{rpath}: duplicate table key")
                delta_sizes[key] = count
                lambda_caps[key] = _as_int(
                    _get(row, "max_positions", rpath), f"{rpath}.max_positions", low=0
                )
            else:
                if head in delta_empty:
                    raise ValidationError(f"{rpath}: duplicate table key")
                delta_empty[head] = count
        checker = CWChecker(b, delta_sizes, lambda_caps, delta_empty, sum_bound)
    elif kind == "combined":
        first = _machine_from_doc(_get(obj, "first", path), f"{path}.first")
        second = _machine_from_doc(_get(obj, "second", path), f"{path}.second")
        if first.universe != universe or second.universe != universe:
            raise ValidationError(f"{path}: combined parts disagree on the universe")
        if first.k0 != k0 or second.k0 != k0 or first.exact != exact or second.exact != exact:
            raise ValidationError(f"{path}: combined parts disagree on the guess bound")
        checker = CombinedChecker(first, second)
    else:
        raise ValidationError(f"{path}.kind: unknown machine kind {kind!r}")
    try:
        return GuessCheckMachine(universe, k0, exact, budget, checker)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def parse_machine(text: str) -> GuessCheckMachine:
    """Parse a machine document, naming the failing field on error."""
    top = _as_object(_load(text), "document")
    _check_version(top, "document")
    return _machine_from_doc(_get(top, "machine", "document"), "machine")
