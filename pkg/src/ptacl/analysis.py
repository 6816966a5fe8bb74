"""Monotonicity analysis and attribute-hiding attack search.

A user who controls which attributes reach the decision point can try to
improve their outcome by *hiding* some of them.  Two target properties bound
what hiding can achieve:

* strongly monotonic: on any sub-request the target evaluates either the
  same or to undecided -- hiding can only lose information;
* weakly monotonic: sub-request evaluations never become more conclusive
  (undecided < unmatched < matched).

Atomic targets are weakly monotonic outright, but strongly monotonic only
when attribute sources behave all-or-nothing (a name's values are delivered
in full or not at all), because hiding one value of a repeated name can flip
a match to a mismatch.

:func:`classify_target` propagates per-operator preservation rules
bottom-up; the rules are sound but incomplete, and nodes without a rule fall
back to the brute-force :func:`check_monotonic_semantic`.
:func:`classify_policy_guarantee` lifts the target classes to whole-policy
guarantees; :func:`find_hiding_attacks` searches a concrete request's
sub-requests for strictly more favourable outcomes.

Enumerations are exhaustive within an explicit budget and deterministic;
exceeding a budget raises rather than silently sampling.  An optional
sampling mode exists for larger instances and marks its verdicts
non-exhaustive.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .errors import BudgetExceededError
from .policies import (
    AccessDecision,
    DecisionSet,
    Policy,
    eval_policy,
    policy_connectives,
    policy_targets,
    resolve,
)
from .targets import And as TAnd
from .targets import Not as TNot
from .targets import Or as TOr
from .targets import (
    Match,
    Name,
    Null,
    Opt,
    Request,
    StrongAnd,
    Sup,
    Target,
    WeakOr,
    build_universe,
    eval_target,
)
from .tri import BOTTOM, ONE, TriValue, weak_le

DEFAULT_LIMIT = 12


class SubsetMode(enum.Enum):
    """How sub-requests may be formed when attributes are hidden."""

    ARBITRARY = "arbitrary-subset"
    ALL_OR_NOTHING = "all-or-nothing"


class MonotonicityKind(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"


@dataclass(frozen=True)
class MonotonicityVerdict:
    holds: bool
    counterexample: tuple[Request, Request] | None = None  # (q, q') with q' subset of q
    exhaustive: bool = True


@dataclass(frozen=True)
class MonotonicityClass:
    """Syntactic classification of a target; flags are sufficient, not complete."""

    strong_under_all_or_nothing: bool
    weak: bool
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class GuaranteeClass:
    """Which hiding-resistance guarantees a policy's shape supports.

    ``set_inclusion_*``: hiding attributes can only widen the decision set
    (so the conservative resolver never improves), under the all-or-nothing
    assumption or under arbitrary hiding respectively.
    ``conclusive_stability``: a conclusive singleton obtained on a
    sub-request persists on the full request (operators restricted to
    not/and over weakly monotonic targets).
    ``allow_stability``: an {allow} singleton persists (dbd/and over weakly
    monotonic targets).
    """

    set_inclusion_all_or_nothing: bool
    set_inclusion_arbitrary: bool
    conclusive_stability: bool
    allow_stability: bool
    reasons: tuple[str, ...] = ()

    @property
    def unconditional(self) -> tuple[str, ...]:
        names = []
        if self.set_inclusion_arbitrary:
            names.append("set-inclusion")
        if self.conclusive_stability:
            names.append("conclusive-stability")
        if self.allow_stability:
            names.append("allow-stability")
        return tuple(names)


@dataclass(frozen=True)
class HidingWitness:
    """A strict sub-request that turns a denial into an allow."""

    original_request: Request
    reduced_request: Request
    original_decisions: DecisionSet
    reduced_decisions: DecisionSet
    original_outcome: AccessDecision
    reduced_outcome: AccessDecision
    mode: SubsetMode

    def __post_init__(self) -> None:
        if not (self.reduced_request.pairs < self.original_request.pairs):
            raise ValueError("reduced request must be a strict subset of the original")
        if self.original_outcome is not AccessDecision.DENY or self.reduced_outcome is not AccessDecision.ALLOW:
            raise ValueError("a hiding witness must flip deny into allow")

    @property
    def hidden_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.original_request.pairs - self.reduced_request.pairs))


# ---------------------------------------------------------------------------
# Sub-request enumeration
# ---------------------------------------------------------------------------


def sub_requests(q: Request, mode: SubsetMode, proper: bool = False) -> Iterator[Request]:
    """Sub-requests of ``q`` under the mode, smallest first, deterministic.

    ARBITRARY yields every subset of the pairs; ALL_OR_NOTHING only subsets
    formed by dropping whole name groups.
    """
    if mode is SubsetMode.ARBITRARY:
        pool = q.sorted_pairs()
        upper = len(pool) - 1 if proper else len(pool)
        for size in range(upper + 1):
            for combo in combinations(pool, size):
                yield Request(frozenset(combo))
    else:
        names = sorted(q.names)
        upper = len(names) - 1 if proper else len(names)
        for size in range(upper + 1):
            for kept in combinations(names, size):
                yield q.restrict_names(kept)


def _mode_budget(q: Request, mode: SubsetMode) -> int:
    return len(q) if mode is SubsetMode.ARBITRARY else len(q.names)


# ---------------------------------------------------------------------------
# Semantic monotonicity checking
# ---------------------------------------------------------------------------


def _violates(kind: MonotonicityKind, sub_value: TriValue, full_value: TriValue) -> bool:
    if kind is MonotonicityKind.STRONG:
        return sub_value is not BOTTOM and sub_value is not full_value
    return not weak_le(sub_value, full_value)


def check_monotonic_semantic(
    t: Target,
    kind: MonotonicityKind,
    mode: SubsetMode,
    limit: int = DEFAULT_LIMIT,
    sample: int | None = None,
    seed: int = 0,
) -> MonotonicityVerdict:
    """Brute-force monotonicity check over the target's generated universe.

    Enumerates every request over ``build_universe(t)`` and every
    sub-request allowed by ``mode``; with equality-only matching and one
    fresh value per name the universe covers all behaviours, so a pass is
    meaningful, not just sampled luck.  If the universe exceeds ``limit``
    pairs the call raises, unless ``sample`` asks for that many randomly
    drawn (request, sub-request) probes, whose verdict is flagged
    non-exhaustive.

    The target is evaluated once per subset of the universe; the
    (request, sub-request) scan works on bitmasks.  Requests are visited
    smallest first, lexicographically within a size (and likewise the
    sub-requests of each), so the returned counterexample is deterministic
    and minimal in that order.
    """
    pool = sorted(build_universe([t]))
    n = len(pool)
    if n > limit:
        if sample is None:
            raise BudgetExceededError(
                f"universe has {n} pairs, limit is {limit}",
                required=n,
                limit=limit,
            )
        return _check_sampled(t, kind, mode, pool, sample, seed)

    values: list[TriValue] = [
        eval_target(t, _mask_request(pool, mask)) for mask in range(1 << n)
    ]

    def found(q_mask: int, sub_mask: int) -> MonotonicityVerdict:
        return MonotonicityVerdict(
            False, (_mask_request(pool, q_mask), _mask_request(pool, sub_mask))
        )

    bits = [1 << i for i in range(n)]
    for size in range(n + 1):
        for combo in combinations(range(n), size):
            q_mask = sum(bits[i] for i in combo)
            full_value = values[q_mask]
            if kind is MonotonicityKind.WEAK and full_value is _WEAK_TOP:
                continue  # nothing can exceed the top of the weak order
            if mode is SubsetMode.ARBITRARY:
                for sub_size in range(size + 1):
                    for sub in combinations(combo, sub_size):
                        sub_mask = sum(bits[i] for i in sub)
                        if _violates(kind, values[sub_mask], full_value):
                            return found(q_mask, sub_mask)
            else:
                groups = _name_group_masks(pool, q_mask)
                for group_count in range(len(groups) + 1):
                    for kept in combinations(groups, group_count):
                        sub_mask = 0
                        for g in kept:
                            sub_mask |= g
                        if _violates(kind, values[sub_mask], full_value):
                            return found(q_mask, sub_mask)
    return MonotonicityVerdict(True, None)


_WEAK_TOP = ONE


def _mask_request(pool: list[tuple[str, str]], mask: int) -> Request:
    return Request(frozenset(pool[i] for i in range(len(pool)) if mask & (1 << i)))


def _name_group_masks(pool: list[tuple[str, str]], q_mask: int) -> list[int]:
    """Bitmasks of the request's pairs grouped by name, in sorted-name order."""
    groups: dict[str, int] = {}
    for i, (name, _) in enumerate(pool):
        if q_mask & (1 << i):
            groups[name] = groups.get(name, 0) | (1 << i)
    return [groups[name] for name in sorted(groups)]


def _check_sampled(
    t: Target,
    kind: MonotonicityKind,
    mode: SubsetMode,
    universe: list[tuple[str, str]],
    sample: int,
    seed: int,
) -> MonotonicityVerdict:
    rng = random.Random(seed)
    for _ in range(sample):
        q = Request(frozenset(p for p in universe if rng.random() < 0.5))
        if mode is SubsetMode.ARBITRARY:
            q_sub = Request(frozenset(p for p in q.pairs if rng.random() < 0.5))
        else:
            kept = [n for n in sorted(q.names) if rng.random() < 0.5]
            q_sub = q.restrict_names(kept)
        if _violates(kind, eval_target(t, q_sub), eval_target(t, q)):
            return MonotonicityVerdict(False, (q, q_sub), exhaustive=False)
    return MonotonicityVerdict(True, None, exhaustive=False)


# ---------------------------------------------------------------------------
# Syntactic classification
# ---------------------------------------------------------------------------


def classify_target(t: Target, limit: int = DEFAULT_LIMIT) -> MonotonicityClass:
    """Bottom-up flag propagation with per-operator preservation rules.

    Atoms hold both properties (the strong one under all-or-nothing).
    Strong monotonicity survives not/and/or and the strong-and/weak-or
    extensions but not opt; weak monotonicity survives opt/and/or/weak-or
    but not negation or strong-and.  The sup extension has no syntactic
    rule and defers to the semantic checker on its subtree; flags are
    sufficient conditions, never proofs of failure.
    """
    notes: list[str] = []

    def go(node: Target) -> tuple[bool, bool]:
        match node:
            case Null() | Name() | Match():
                return True, True
            case Opt(child=c):
                _, wk = go(c)
                return False, wk
            case TNot(child=c):
                st, _ = go(c)
                return st, False
            case TAnd(left=l, right=r) | TOr(left=l, right=r) | WeakOr(left=l, right=r):
                st_l, wk_l = go(l)
                st_r, wk_r = go(r)
                return st_l and st_r, wk_l and wk_r
            case StrongAnd(left=l, right=r):
                st_l, _ = go(l)
                st_r, _ = go(r)
                return st_l and st_r, False
            case Sup():
                return _semantic_flags(node)
        raise TypeError(f"not a target node: {node!r}")

    def _semantic_flags(node: Target) -> tuple[bool, bool]:
        try:
            strong = check_monotonic_semantic(
                node, MonotonicityKind.STRONG, SubsetMode.ALL_OR_NOTHING, limit=limit
            ).holds
            weak = check_monotonic_semantic(
                node, MonotonicityKind.WEAK, SubsetMode.ARBITRARY, limit=limit
            ).holds
            notes.append("sup subtree classified by semantic check")
            return strong, weak
        except BudgetExceededError:
            notes.append("sup subtree exceeded the semantic-check budget; flags cleared")
            return False, False

    strong, weak = go(t)
    return MonotonicityClass(strong, weak, tuple(notes))


# ---------------------------------------------------------------------------
# Policy guarantees
# ---------------------------------------------------------------------------


def classify_policy_guarantee(p: Policy, limit: int = DEFAULT_LIMIT) -> GuaranteeClass:
    """Classify which hiding-resistance guarantees apply to a policy.

    Derived operators are judged through their core lowering, so a policy
    built from deny-overrides style combinators needs all three connectives
    and loses the stability classes.  Set inclusion depends only on the
    embedded targets' strong monotonicity (all-or-nothing or arbitrary).
    """
    reasons: list[str] = []
    targets = policy_targets(p)

    strong_aon = True
    weak_all = True
    for t in targets:
        cls = classify_target(t, limit=limit)
        if not cls.strong_under_all_or_nothing and strong_aon:
            strong_aon = False
            reasons.append(
                "set-inclusion (all-or-nothing): target not strongly monotonic under all-or-nothing"
            )
        if not cls.weak and weak_all:
            weak_all = False
            reasons.append("stability classes: target not weakly monotonic")

    strong_arbitrary = True
    for t in targets:
        verdict = check_monotonic_semantic(
            t, MonotonicityKind.STRONG, SubsetMode.ARBITRARY, limit=limit
        )
        if not verdict.holds:
            strong_arbitrary = False
            reasons.append(
                "set-inclusion (arbitrary subsets): target fails the strong check under value hiding"
            )
            break

    connectives = policy_connectives(p)
    conclusive_ok = connectives <= {"not", "and"}
    allow_ok = connectives <= {"dbd", "and"}
    if not conclusive_ok:
        extra = sorted(connectives - {"not", "and"})
        reasons.append(f"conclusive-stability: connective(s) {', '.join(extra)} outside not/and after lowering")
    if not allow_ok:
        extra = sorted(connectives - {"dbd", "and"})
        reasons.append(f"allow-stability: connective(s) {', '.join(extra)} outside dbd/and after lowering")

    return GuaranteeClass(
        set_inclusion_all_or_nothing=strong_aon,
        set_inclusion_arbitrary=strong_arbitrary,
        conclusive_stability=conclusive_ok and weak_all,
        allow_stability=allow_ok and weak_all,
        reasons=tuple(reasons),
    )


# ---------------------------------------------------------------------------
# Hiding-attack search
# ---------------------------------------------------------------------------


def find_hiding_attacks(
    p: Policy,
    q: Request,
    mode: SubsetMode = SubsetMode.ARBITRARY,
    limit: int = DEFAULT_LIMIT,
) -> list[HidingWitness]:
    """All strict sub-requests of ``q`` whose resolved outcome improves to allow.

    Returns witnesses sorted by how few attributes were hidden (minimal
    attacks first), then lexicographically; empty when the full request is
    already allowed.
    """
    exponent = _mode_budget(q, mode)
    if exponent > limit:
        raise BudgetExceededError(
            f"hiding search would enumerate 2**{exponent} sub-requests, limit is 2**{limit}",
            required=exponent,
            limit=limit,
        )
    full_decisions = eval_policy(p, q)
    full_outcome = resolve(full_decisions)
    if full_outcome is AccessDecision.ALLOW:
        return []
    witnesses: list[HidingWitness] = []
    for q_sub in sub_requests(q, mode, proper=True):
        reduced_decisions = eval_policy(p, q_sub)
        if resolve(reduced_decisions) is AccessDecision.ALLOW:
            witnesses.append(
                HidingWitness(
                    original_request=q,
                    reduced_request=q_sub,
                    original_decisions=full_decisions,
                    reduced_decisions=reduced_decisions,
                    original_outcome=full_outcome,
                    reduced_outcome=AccessDecision.ALLOW,
                    mode=mode,
                )
            )
    witnesses.sort(key=lambda w: (len(w.hidden_pairs), w.hidden_pairs))
    return witnesses
