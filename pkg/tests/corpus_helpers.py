"""Seeded instance corpora shared by the unit and acceptance tests.

Every corpus is a pure function of the case index: the shape comes from a
``*_config`` helper and the content from :func:`paramcsp.random_instance`
with a seed derived from the case, so a failing case reproduces from its
number alone, no recorded seeds needed.
"""

from __future__ import annotations

from collections.abc import Callable, Iterator

from paramcsp import Instance, InstanceConfig, random_instance

SOLVER_PROFILES = ("w-finite", "w-cofinite", "w-even", "w-odd")

_SEED_STRIDE = 1_000_003


def seed_for(case: int, salt: int = 0) -> int:
    return salt * 7_777_777 + _SEED_STRIDE * case


def solver_config(case: int, profile: str) -> InstanceConfig:
    """Shared-weight-set bodies sized for the profile-class solvers."""
    return InstanceConfig(
        n=3 + case % 12,
        k0=case % 5,
        profile=profile,
        body_len=case % 5,
        max_arity=1 + case % 4,
        atmost=case % 2 == 1,
        weight_cap=2 + case % 3,
        exclude_zero=case % 7 == 0,
    )


def machine_config(case: int) -> InstanceConfig:
    """Mixed-language exact instances for machine-versus-brute comparisons."""
    return InstanceConfig(
        n=2 + case % 11,
        k0=case % 4,
        profile="mixed",
        body_len=case % 4,
        max_arity=1 + case % 3,
        cw_bound=1 + case % 2,
        member_size=1 + case % 3,
        max_members=case % 5,
        weight_cap=2,
    )


def cw_config(case: int) -> InstanceConfig:
    """All-conditional-weight exact instances sharing one tail bound."""
    return InstanceConfig(
        n=2 + case % 11,
        k0=case % 4,
        profile="cw",
        body_len=case % 4,
        max_arity=1 + case % 3,
        cw_bound=1 + case % 2,
    )


def explicit_config(case: int) -> InstanceConfig:
    """Explicitly listed relations for the indicator-variable reduction."""
    return InstanceConfig(
        n=2 + case % 7,
        k0=case % 4,
        profile="explicit",
        body_len=case % 4,
        max_arity=1 + case % 4,
        member_size=1 + case % 3,
        max_members=1 + case % 4,
    )


def parity_config(case: int) -> InstanceConfig:
    return InstanceConfig(
        n=2 + case % 11,
        k0=case % 4,
        profile="w-parity",
        body_len=case % 5,
        max_arity=1 + case % 4,
        atmost=case % 3 == 2,
    )


def atmost_config(case: int) -> InstanceConfig:
    return InstanceConfig(
        n=2 + case % 11,
        k0=case % 4,
        profile="mixed",
        body_len=case % 5,
        max_arity=1 + case % 4,
        atmost=True,
        member_size=1 + case % 3,
        max_members=case % 5,
    )


def pipeline_config(case: int) -> InstanceConfig:
    """Weight-one clause bodies for the end-to-end pipeline.

    The reduced machine enumerates all guesses of size k0 + 2**k0 over the
    original variables plus one indicator per variable-set image plus
    padding, so the k0 = 2 shapes stay deliberately tight to keep each run
    well under a second.
    """
    k0 = case % 3
    if k0 == 2:
        return InstanceConfig(
            n=3 + case % 4,
            k0=2,
            profile="w-finite",
            body_len=1 + case % 2,
            max_arity=2,
            finite_values=(1,),
        )
    return InstanceConfig(
        n=3 + case % 6,
        k0=k0,
        profile="w-finite",
        body_len=1 + case % 3,
        max_arity=1 + case % 3,
        finite_values=(1,),
    )


def instances(
    count: int,
    config_fn: Callable[..., InstanceConfig],
    *args: object,
    salt: int = 0,
) -> Iterator[tuple[int, Instance]]:
    for case in range(count):
        yield case, random_instance(seed_for(case, salt), config_fn(case, *args))
