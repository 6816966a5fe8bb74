"""Shared fixtures: golden ASTs, deterministic AST generators, eval helpers."""

from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import settings

from ptacl import policies as pl
from ptacl import targets as tg
from ptacl.policies import DecisionOp, DecisionSet, eval_policy
from ptacl.targets import Request, build_universe, universe_requests

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("ci", deadline=None, derandomize=True)
settings.load_profile("ci")


def req(*pairs: tuple[str, str]) -> Request:
    return Request(frozenset(pairs))


# ---------------------------------------------------------------------------
# Golden ASTs shared by unit, syntax and acceptance tests
# ---------------------------------------------------------------------------


def chinese_wall_policy() -> pl.Policy:
    inner = pl.Combined(tg.Null(), DecisionOp.AND_CUP, (
        pl.Targeted(tg.Match("employer", "A"), pl.Allow()),
        pl.Targeted(tg.Match("employer", "B"), pl.Deny()),
    ))
    return pl.Combined(tg.Null(), DecisionOp.AND_CUP, (
        pl.Targeted(tg.Match("confidential", "true"), inner),
        pl.Allow(),
    ))


CW_R1 = req(("employer", "A"), ("confidential", "true"))
CW_R2 = req(("employer", "A"), ("employer", "B"), ("confidential", "true"))
CW_R3 = req(("confidential", "false"))
CW_R4 = req(("confidential", "true"))


def nested_deny_by_default_policy() -> pl.Policy:
    """Deny-by-default tree whose five targets hit 1, 0, bottom, 1, 1."""
    leaf_pair = pl.And(
        pl.Targeted(tg.Match("x", "1"), pl.Allow()),
        pl.Targeted(tg.Match("x", "2"), pl.Deny()),
    )
    return pl.Dbd(
        pl.Targeted(
            tg.Name("x"),
            pl.And(
                pl.Not(pl.Targeted(tg.Match("y", "1"), leaf_pair)),
                pl.Targeted(tg.Match("w", "1"), pl.Allow()),
            ),
        )
    )


NESTED_PROBE = req(("x", "1"), ("w", "1"))


def value_hiding_attack_policy() -> pl.Policy:
    """Deny-overrides pair that rewards hiding one value of a repeated name."""
    return pl.Combined(tg.Null(), DecisionOp.AND_CUP, (
        pl.Allow(),
        pl.Targeted(tg.Match("role", "intern"), pl.Deny()),
    ))


VH_FULL = req(("role", "intern"), ("role", "staff"))
VH_HIDDEN = req(("role", "staff"))


def acl_interface_target() -> tg.Target:
    return tg.Opt(
        tg.And(
            tg.And(tg.Match("object", "test.txt"), tg.Name("subject")),
            tg.Name("action"),
        )
    )


def allow_stable_policy() -> pl.Policy:
    return pl.And(
        pl.Dbd(pl.Targeted(tg.Match("a", "1"), pl.Allow())),
        pl.Dbd(pl.Targeted(tg.Name("b"), pl.Allow())),
    )


def swap_like(t: tg.Target, bottom_name: str) -> tg.Target:
    """Wrap a target so its value's ZERO and BOTTOM swap (ONE unchanged).

    ``bottom_name`` must not occur in any evaluated request for the swap
    reading to be exact; the wrapper exists to build targets that become
    *less* conclusive as attributes are added.
    """
    pseudo_bottom = tg.Name(bottom_name)
    return tg.StrongAnd(tg.Or(t, pseudo_bottom), tg.Opt(tg.Or(t, tg.Not(t))))


def nonmonotone_probe() -> tg.Target:
    """Evaluates to ONE on the empty request but BOTTOM once (a, 1) arrives."""
    base = tg.Sup(tg.Match("a", "1"), tg.Match("b", "2"))
    return swap_like(tg.Not(swap_like(base, "zz")), "zz")


# ---------------------------------------------------------------------------
# Deterministic AST generators (explicit seeds; no global randomness)
# ---------------------------------------------------------------------------

NAMES = ("a", "b")
VALUES = ("1", "2")

TARGET_LEAVES = ("name", "match", "null")
TARGET_OPS_ALL = ("opt", "not", "and", "or", "sand", "wor", "sup")
TARGET_OPS_CORE = ("opt", "not", "and", "or")
TARGET_OPS_STRONG = ("not", "and", "or", "sand", "wor")  # preserve strong monotonicity
TARGET_OPS_WEAK = ("opt", "and", "or", "wor")  # preserve weak monotonicity

_TARGET_BINARY = {"and": tg.And, "or": tg.Or, "sand": tg.StrongAnd, "wor": tg.WeakOr, "sup": tg.Sup}


def random_target(
    rng: random.Random,
    depth: int = 3,
    ops: tuple[str, ...] = TARGET_OPS_ALL,
    names: tuple[str, ...] = NAMES,
    values: tuple[str, ...] = VALUES,
) -> tg.Target:
    if depth <= 0 or rng.random() < 0.3:
        kind = rng.choice(TARGET_LEAVES)
        if kind == "null":
            return tg.Null()
        if kind == "name":
            return tg.Name(rng.choice(names))
        return tg.Match(rng.choice(names), rng.choice(values))
    op = rng.choice(ops)
    if op == "opt":
        return tg.Opt(random_target(rng, depth - 1, ops, names, values))
    if op == "not":
        return tg.Not(random_target(rng, depth - 1, ops, names, values))
    node = _TARGET_BINARY[op]
    return node(
        random_target(rng, depth - 1, ops, names, values),
        random_target(rng, depth - 1, ops, names, values),
    )


POLICY_CONNECTIVES_ALL = ("not", "dbd", "and", "targeted", "combined")

_COMBINED_OPS = tuple(DecisionOp)


def random_policy(
    rng: random.Random,
    depth: int = 3,
    connectives: tuple[str, ...] = POLICY_CONNECTIVES_ALL,
    target_ops: tuple[str, ...] = TARGET_OPS_CORE,
    target_depth: int = 1,
    combined_ops: tuple[DecisionOp, ...] = _COMBINED_OPS,
) -> pl.Policy:
    if depth <= 0 or rng.random() < 0.25:
        return pl.Allow() if rng.random() < 0.5 else pl.Deny()

    def sub() -> pl.Policy:
        return random_policy(rng, depth - 1, connectives, target_ops, target_depth, combined_ops)

    kind = rng.choice(connectives)
    if kind == "not":
        return pl.Not(sub())
    if kind == "dbd":
        return pl.Dbd(sub())
    if kind == "and":
        return pl.And(sub(), sub())
    if kind == "targeted":
        return pl.Targeted(random_target(rng, target_depth, target_ops), sub())
    op = rng.choice(combined_ops)
    children = tuple(sub() for _ in range(rng.choice((2, 3))))
    target = tg.Null() if rng.random() < 0.5 else random_target(rng, target_depth, target_ops)
    return pl.Combined(target, op, children)


def policy_universe(p: pl.Policy) -> frozenset[tuple[str, str]]:
    return build_universe(pl.policy_targets(p))


def eval_over_universe(p: pl.Policy, universe) -> dict[Request, DecisionSet]:
    """Evaluate a policy once per universe request (memo for subset checks)."""
    return {q: eval_policy(p, q) for q in universe_requests(universe)}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xACCE55)
