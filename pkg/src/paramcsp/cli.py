"""Command-line interface.

Exit codes are part of the contract: 0 satisfiable / accepted / verification
passed, 1 unsatisfiable / rejected / verification failed, 2 usage or
validation errors, 3 method not applicable to the instance.

Instance and machine documents are read from files, with ``-`` for stdin.
Identical arguments and inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections.abc import Sequence

from .errors import (
    CapacityError,
    DomainError,
    NotApplicableError,
    UsageError,
    ValidationError,
)
from .formats import (
    parse_instance,
    parse_machine,
    parse_relation,
    serialize_instance,
    serialize_machine,
)
from .fpt_solvers import solve_w_kt, solve_w_kue
from .instances import (
    PROFILES,
    Instance,
    InstanceConfig,
    WeightKind,
    brute_force_solve,
    lift_kle_to_k,
    param_e,
    param_t,
    param_u,
    random_instance,
    satisfies,
)
from .machines import (
    SimulationResult,
    explicitize_w_body,
    reduce_appearance,
    reduce_completion,
    reduce_cw,
    simulate,
    solve_wd_pipeline,
)
from .partials import DEFAULT_CAPACITY, compute_partials
from .relations import ExplicitRelation, WeightSetKind, WRelation

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_USAGE = 2
EXIT_NOT_APPLICABLE = 3

SOLVE_METHODS = ("brute", "fpt-kue", "fpt-kt", "cw-machine", "completion-pipeline")
REDUCE_TARGETS = ("appearance", "cw", "w-cw")
VERIFY_METHODS = ("fpt-kue", "fpt-kt", "appearance", "cw-machine", "completion-pipeline")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _ensure_exact(inst: Instance) -> tuple[Instance, frozenset[str]]:
    """Lift an at-most instance for the machine methods; report on stderr."""
    if inst.weight.kind is WeightKind.EXACT:
        return inst, inst.variable_set
    print("note: lifting the at-most bound to an exact one with padding variables", file=sys.stderr)
    return lift_kle_to_k(inst), inst.variable_set


def _print_witness(witness: frozenset[str] | None) -> int:
    if witness is None:
        print("UNSAT")
        return EXIT_UNSAT
    names = " ".join(sorted(witness))
    print(f"WITNESS {names}".rstrip())
    return EXIT_SAT


def _print_budget_report(result: SimulationResult, budget: int) -> None:
    print(f"budget: {budget}")
    print(f"max-branch-steps: {result.max_branch_steps}")
    print(f"branches-explored: {result.branches_explored}")


def _infer_bound(inst: Instance) -> int:
    """Largest member size or admissible weight in the body; at least 1."""
    bound = 1
    for c in inst.body:
        rel = c.relation
        if isinstance(rel, ExplicitRelation):
            bound = max(bound, max((len(m) for m in rel.members), default=0))
        elif isinstance(rel, WRelation) and rel.weights.kind is WeightSetKind.FINITE:
            bound = max(bound, max(rel.weights.values, default=0))
    return bound


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = parse_instance(_read_text(args.instance))
    if args.method == "brute":
        return _print_witness(brute_force_solve(inst))
    if args.method == "fpt-kue":
        return _print_witness(solve_w_kue(inst))
    if args.method == "fpt-kt":
        return _print_witness(solve_w_kt(inst))
    if args.method == "cw-machine":
        lifted, originals = _ensure_exact(inst)
        machine = reduce_cw(lifted)
        result = simulate(machine)
        witness = None
        if result.accepted:
            assert result.witness is not None
            witness = frozenset(result.witness & originals)
        code = _print_witness(witness)
        if args.budget_report:
            _print_budget_report(result, machine.budget)
        return code
    bound = args.bound if args.bound is not None else _infer_bound(inst)
    return _print_witness(solve_wd_pipeline(inst, bound))


def _cmd_reduce(args: argparse.Namespace) -> int:
    inst = parse_instance(_read_text(args.instance))
    lifted, _ = _ensure_exact(inst)
    if args.to == "appearance":
        text = serialize_machine(reduce_appearance(lifted))
    elif args.to == "cw":
        text = serialize_machine(reduce_cw(lifted))
    else:
        bound = args.bound if args.bound is not None else _infer_bound(lifted)
        explicit = explicitize_w_body(lifted, bound)
        text = serialize_instance(reduce_completion(explicit, bound))
    _write_text(args.out, text)
    return EXIT_SAT


def _cmd_simulate(args: argparse.Namespace) -> int:
    machine = parse_machine(_read_text(args.machine))
    result = simulate(machine)
    if result.accepted:
        assert result.witness is not None
        print("ACCEPT")
        print(f"WITNESS {' '.join(sorted(result.witness))}".rstrip())
    else:
        print("REJECT")
    if args.budget_report:
        _print_budget_report(result, machine.budget)
    return EXIT_SAT if result.accepted else EXIT_UNSAT


def _set_str(positions: tuple[int, ...]) -> str:
    return "{" + ",".join(str(p) for p in positions) + "}"


def _cmd_partials(args: argparse.Namespace) -> int:
    if (args.relation is None) == (args.instance is None):
        raise UsageError("pass exactly one of --instance or --relation")
    if args.relation is not None:
        rel = parse_relation(args.relation)
    else:
        inst = parse_instance(_read_text(args.instance))
        if not 1 <= args.constraint <= len(inst.body):
            raise UsageError(
                f"constraint {args.constraint} out of range 1..{len(inst.body)}"
            )
        rel = inst.body[args.constraint - 1].relation
    table = compute_partials(rel, capacity=args.capacity)
    for t in table.partials:
        comps = table.completions[t]
        rhs = " | ".join(_set_str(u) for u in comps) if comps else "-"
        print(f"{_set_str(t)} -> {rhs}")
    return EXIT_SAT


def _cmd_stats(args: argparse.Namespace) -> int:
    inst = parse_instance(_read_text(args.instance))
    if inst.weight.kind is WeightKind.EXACT:
        print(f"parameter: k = {inst.weight.k0} (exact)")
    else:
        print(f"parameter: k <= {inst.weight.k0} (at-most)")
    print(f"u = {param_u(inst)}")
    print(f"t = {param_t(inst)}")
    print(f"e = {param_e(inst)}")
    return EXIT_SAT


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _cmd_gen(args: argparse.Namespace) -> int:
    cfg = InstanceConfig(
        n=args.n,
        k0=args.k0,
        profile=args.profile,
        body_len=args.body,
        min_arity=args.min_arity,
        max_arity=args.max_arity,
        atmost=args.atmost,
        cw_bound=args.cw_bound,
        member_size=args.member_size,
        max_members=args.max_members,
        weight_cap=args.weight_cap,
        finite_values=_parse_int_list(args.finite_values) if args.finite_values else None,
        exclude_zero=args.exclude_zero,
    )
    inst = random_instance(args.seed, cfg)
    _write_text(args.out, serialize_instance(inst, materialize_weight=args.materialize_weight_constraint))
    return EXIT_SAT


def _verify_config(method: str, case: int) -> InstanceConfig:
    if method == "fpt-kue":
        profile = ("w-finite", "w-cofinite", "w-even", "w-odd")[case % 4]
        return InstanceConfig(
            n=4 + case % 9,
            k0=case % 4,
            profile=profile,
            body_len=1 + case % 3,
            max_arity=4,
            atmost=case % 2 == 1,
        )
    if method == "fpt-kt":
        profile = ("w-finite", "w-cofinite", "w-odd")[case % 3]
        return InstanceConfig(
            n=4 + case % 9,
            k0=case % 4,
            profile=profile,
            body_len=1 + case % 4,
            max_arity=4,
            atmost=case % 2 == 1,
            exclude_zero=True,
        )
    if method == "appearance":
        return InstanceConfig(
            n=4 + case % 7,
            k0=case % 4,
            profile="mixed",
            body_len=1 + case % 3,
            max_arity=4,
        )
    if method == "cw-machine":
        return InstanceConfig(
            n=4 + case % 7,
            k0=case % 4,
            profile="cw",
            body_len=1 + case % 3,
            max_arity=4,
            cw_bound=case % 3,
        )
    return InstanceConfig(
        n=3 + case % 3,
        k0=case % 3,
        profile="w-finite",
        body_len=1 + case % 2,
        max_arity=2,
        finite_values=(1,),
    )


def _verify_decide(method: str, inst: Instance) -> frozenset[str] | None:
    if method == "fpt-kue":
        return solve_w_kue(inst)
    if method == "fpt-kt":
        return solve_w_kt(inst)
    if method == "appearance":
        result = simulate(reduce_appearance(inst))
        return result.witness if result.accepted else None
    if method == "cw-machine":
        result = simulate(reduce_cw(inst))
        return result.witness if result.accepted else None
    return solve_wd_pipeline(inst, 1)


def _cmd_verify(args: argparse.Namespace) -> int:
    rows: list[dict[str, object]] = []
    agree_count = 0
    for case in range(args.count):
        seed = args.seed * 1_000_003 + case
        cfg = _verify_config(args.method, case)
        inst = random_instance(seed, cfg)
        expected = brute_force_solve(inst)
        got = _verify_decide(args.method, inst)
        agree = (expected is None) == (got is None)
        if agree and got is not None and not satisfies(inst, got):
            agree = False
        if agree:
            agree_count += 1
        else:
            expected_word = "unsat" if expected is None else "sat"
            got_word = "unsat" if got is None else "sat"
            print(f"mismatch case={case} seed={seed}: expected {expected_word}, got {got_word}")
        rows.append(
            {
                "case": case,
                "seed": seed,
                "profile": cfg.profile,
                "n": cfg.n,
                "k0": cfg.k0,
                "expected": "unsat" if expected is None else "sat",
                "got": "unsat" if got is None else "sat",
                "agree": int(agree),
            }
        )
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8", newline="") as handle:
                writer = csv.DictWriter(
                    handle,
                    fieldnames=["case", "seed", "profile", "n", "k0", "expected", "got", "agree"],
                )
                writer.writeheader()
                writer.writerows(rows)
        except OSError as exc:
            raise UsageError(f"cannot write {args.report}: {exc}") from exc
    print(f"verify {args.method}: {agree_count}/{args.count} agree")
    return EXIT_SAT if agree_count == args.count else EXIT_UNSAT


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paramcsp",
        description="Weighted Boolean constraint satisfaction with parameterized solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide an instance document")
    solve.add_argument("instance", help="instance document path, - for stdin")
    solve.add_argument("--method", choices=SOLVE_METHODS, default="brute")
    solve.add_argument("--bound", type=int, default=None, help="member-size bound for the completion pipeline")
    solve.add_argument("--budget-report", action="store_true", help="print machine budget usage")
    solve.set_defaults(func=_cmd_solve)

    reduce_cmd = sub.add_parser("reduce", help="compile an instance into a machine or reduced instance")
    reduce_cmd.add_argument("instance", help="instance document path, - for stdin")
    reduce_cmd.add_argument("--to", choices=REDUCE_TARGETS, required=True)
    reduce_cmd.add_argument("--bound", type=int, default=None, help="member-size bound for the w-cw target")
    reduce_cmd.add_argument("--out", default=None, help="output path, stdout by default")
    reduce_cmd.set_defaults(func=_cmd_reduce)

    simulate_cmd = sub.add_parser("simulate", help="run a machine document")
    simulate_cmd.add_argument("machine", help="machine document path, - for stdin")
    simulate_cmd.add_argument("--budget-report", action="store_true", help="print machine budget usage")
    simulate_cmd.set_defaults(func=_cmd_simulate)

    partials_cmd = sub.add_parser("partials", help="print the partial-tuple table of a relation")
    partials_cmd.add_argument("--instance", default=None, help="instance document path, - for stdin")
    partials_cmd.add_argument("--constraint", type=int, default=1, help="1-based body index (with --instance)")
    partials_cmd.add_argument("--relation", default=None, help="inline relation JSON")
    partials_cmd.add_argument("--capacity", type=int, default=DEFAULT_CAPACITY, help="exhaustive arity cap")
    partials_cmd.set_defaults(func=_cmd_partials)

    stats = sub.add_parser("stats", help="print instance parameters")
    stats.add_argument("instance", help="instance document path, - for stdin")
    stats.set_defaults(func=_cmd_stats)

    gen = sub.add_parser("gen", help="generate a pseudorandom instance document")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, required=True, help="variable count")
    gen.add_argument("--k0", type=int, required=True, help="weight bound")
    gen.add_argument("--profile", choices=PROFILES, default="mixed")
    gen.add_argument("--body", type=int, default=2, help="constraint count")
    gen.add_argument("--min-arity", type=int, default=1)
    gen.add_argument("--max-arity", type=int, default=4)
    gen.add_argument("--atmost", action="store_true", help="use an at-most weight bound")
    gen.add_argument("--cw-bound", type=int, default=1, help="shared tail bound for the cw profile")
    gen.add_argument("--member-size", type=int, default=2, help="max member size for explicit relations")
    gen.add_argument("--max-members", type=int, default=4)
    gen.add_argument("--weight-cap", type=int, default=3, help="largest random weight value")
    gen.add_argument("--finite-values", default=None, help="comma-separated shared finite weights")
    gen.add_argument("--exclude-zero", action="store_true", help="keep 0 out of the weight sets")
    gen.add_argument("--materialize-weight-constraint", action="store_true")
    gen.add_argument("--out", default=None, help="output path, stdout by default")
    gen.set_defaults(func=_cmd_gen)

    verify = sub.add_parser("verify", help="cross-check a method against brute force on random instances")
    verify.add_argument("--method", choices=VERIFY_METHODS, required=True)
    verify.add_argument("--count", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--report", default=None, help="write a per-case CSV report")
    verify.set_defaults(func=_cmd_verify)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (None, 0):
            return EXIT_SAT
        return EXIT_USAGE
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotApplicableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
