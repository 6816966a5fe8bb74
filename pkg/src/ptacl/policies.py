"""Policies: composing authorization decisions under target uncertainty.

A policy evaluates against a request to a non-empty *decision set*, a subset
of {allow, deny, not-applicable} (ONE, ZERO, BOTTOM on the shared carrier).
When a target cannot be decided, evaluation keeps both branches: the result
collects every decision the policy could have produced, and the conservative
resolver (:func:`resolve`) grants access only for the singleton {allow}.
That combination is what makes withholding attributes unrewarding.

Core policy nodes: ``Allow``, ``Deny``, ``Not``, ``Dbd`` (deny-by-default),
``And`` (strong conjunction, so a not-applicable operand is preferred over an
allow), ``Targeted`` (restrict a policy to a target).  ``Combined`` groups n
sub-policies under one target and a decision operator; commutative operators
evaluate as sets in linear time (:func:`eval_nary_fast`), the order-dependent
first/last-applicable operators as lists (:func:`eval_list_fold`).  Both fast
paths are validated against the definitional product (:func:`naive_product`).

All ASTs are immutable and evaluation is pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Iterable, Iterator, Sequence

from .errors import BudgetExceededError, SourceSpan
from .targets import Request, Target, eval_target
from .tri import (
    BOTTOM,
    ONE,
    VALUES,
    ZERO,
    TriValue,
    neg,
    strong_and,
    sup,
    weak_and,
    weak_or,
    weaken,
)

# ---------------------------------------------------------------------------
# Decision sets
# ---------------------------------------------------------------------------

_BIT = {ONE: 1, ZERO: 2, BOTTOM: 4}


@dataclass(frozen=True)
class DecisionSet:
    """Non-empty subset of {ONE, ZERO, BOTTOM}, stored as a 3-bit mask."""

    mask: int

    def __post_init__(self) -> None:
        if not 1 <= self.mask <= 7:
            raise ValueError("decision set must be a non-empty subset of the three decisions")

    @classmethod
    def of(cls, *values: TriValue) -> "DecisionSet":
        return cls.from_iterable(values)

    @classmethod
    def from_iterable(cls, values: Iterable[TriValue]) -> "DecisionSet":
        mask = 0
        for v in values:
            mask |= _BIT[v]
        return cls(mask)

    @classmethod
    def only(cls, value: TriValue) -> "DecisionSet":
        return cls(_BIT[value])

    def members(self) -> tuple[TriValue, ...]:
        """Members in canonical order ONE, ZERO, BOTTOM."""
        return tuple(v for v in VALUES if self.mask & _BIT[v])

    def __contains__(self, value: TriValue) -> bool:
        return bool(self.mask & _BIT[value])

    def __iter__(self) -> Iterator[TriValue]:
        return iter(self.members())

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __or__(self, other: "DecisionSet") -> "DecisionSet":
        return DecisionSet(self.mask | other.mask)

    def issubset(self, other: "DecisionSet") -> bool:
        return self.mask | other.mask == other.mask

    @property
    def is_singleton(self) -> bool:
        return len(self) == 1

    def map(self, fn: Callable[[TriValue], TriValue]) -> "DecisionSet":
        return DecisionSet.from_iterable(fn(v) for v in self.members())

    def combine(self, fn: Callable[[TriValue, TriValue], TriValue], other: "DecisionSet") -> "DecisionSet":
        return DecisionSet.from_iterable(
            fn(a, b) for a in self.members() for b in other.members()
        )


ALLOW_SET = DecisionSet.only(ONE)
DENY_SET = DecisionSet.only(ZERO)
GAP_SET = DecisionSet.only(BOTTOM)

#: All seven non-empty decision sets, by ascending mask.
ALL_DECISION_SETS = tuple(DecisionSet(mask) for mask in range(1, 8))


class AccessDecision(enum.Enum):
    ALLOW = "allow"
    DENY = "deny"


def resolve(ds: DecisionSet) -> AccessDecision:
    """Conservative resolution: allow only the certain singleton {ONE}."""
    return AccessDecision.ALLOW if ds == ALLOW_SET else AccessDecision.DENY


# ---------------------------------------------------------------------------
# Decision operators
# ---------------------------------------------------------------------------


class CombineMode(enum.Enum):
    SET = "set"
    LIST = "list"


class DecisionOp(enum.Enum):
    """Binary decision-combining operators (enum values double as keywords)."""

    AND_P = "and"
    AND_CUP = "and_cup"
    OR_CUP = "or_cup"
    AND_CAP = "and_cap"
    OR_CAP = "or_cap"
    FIRST_APPLICABLE = "fa"
    LAST_APPLICABLE = "la"

    @property
    def commutative(self) -> bool:
        return self in _LATTICE_OPS

    @property
    def default_mode(self) -> CombineMode:
        return CombineMode.SET if self.commutative else CombineMode.LIST


def _op_table(rows: tuple[tuple[TriValue, ...], ...]) -> dict[tuple[TriValue, TriValue], TriValue]:
    return {
        (a, b): rows[i][j]
        for i, a in enumerate(VALUES)
        for j, b in enumerate(VALUES)
    }


# Deny-overrides among conclusive decisions; not-applicable is an identity.
_AND_CUP_TABLE = _op_table((
    (ONE, ZERO, ONE),
    (ZERO, ZERO, ZERO),
    (ONE, ZERO, BOTTOM),
))

# Allow-overrides among conclusive decisions; not-applicable is an identity.
_OR_CUP_TABLE = _op_table((
    (ONE, ONE, ONE),
    (ONE, ZERO, ZERO),
    (ONE, ZERO, BOTTOM),
))

# First conclusive operand wins; not-applicable defers to the other side.
_FA_TABLE = _op_table((
    (ONE, ONE, ONE),
    (ZERO, ZERO, ZERO),
    (ONE, ZERO, BOTTOM),
))

# Mirror image of first-applicable.
_LA_TABLE = {(a, b): _FA_TABLE[(b, a)] for a in VALUES for b in VALUES}

_OP_TABLES: dict[DecisionOp, dict[tuple[TriValue, TriValue], TriValue]] = {
    DecisionOp.AND_P: {(a, b): strong_and(a, b) for a in VALUES for b in VALUES},
    DecisionOp.AND_CUP: _AND_CUP_TABLE,
    DecisionOp.OR_CUP: _OR_CUP_TABLE,
    DecisionOp.AND_CAP: {(a, b): weak_and(a, b) for a in VALUES for b in VALUES},
    DecisionOp.OR_CAP: {(a, b): weak_or(a, b) for a in VALUES for b in VALUES},
    DecisionOp.FIRST_APPLICABLE: _FA_TABLE,
    DecisionOp.LAST_APPLICABLE: _LA_TABLE,
}

#: Total order (ascending) whose min/max each commutative operator computes.
OP_ORDERINGS: dict[DecisionOp, tuple[TriValue, TriValue, TriValue]] = {
    DecisionOp.AND_P: (ZERO, BOTTOM, ONE),
    DecisionOp.AND_CUP: (ZERO, ONE, BOTTOM),
    DecisionOp.AND_CAP: (BOTTOM, ZERO, ONE),
    DecisionOp.OR_CUP: (BOTTOM, ZERO, ONE),
    DecisionOp.OR_CAP: (ZERO, ONE, BOTTOM),
}

_CONJUNCTIVE = frozenset({DecisionOp.AND_P, DecisionOp.AND_CUP, DecisionOp.AND_CAP})
_DISJUNCTIVE = frozenset({DecisionOp.OR_CUP, DecisionOp.OR_CAP})
_LATTICE_OPS = _CONJUNCTIVE | _DISJUNCTIVE


def apply_decision_op(op: DecisionOp, a: TriValue, b: TriValue) -> TriValue:
    return _OP_TABLES[op][(a, b)]


def abd(a: TriValue) -> TriValue:
    """Allow-by-default: not-applicable becomes allow, conclusive values stay."""
    return ONE if a is BOTTOM else a


# Value-level composites rebuilding the derived operators from the core
# connectives (negation, deny-by-default weakening, strong conjunction).
# Tests pin the hard-coded tables against these.


def abd_composite(a: TriValue) -> TriValue:
    return neg(weaken(neg(a)))


def and_cup_composite(a: TriValue, b: TriValue) -> TriValue:
    """Deny-overrides as the De Morgan dual of allow-overrides (= sup)."""
    return neg(sup(neg(a), neg(b)))


def first_applicable_composite(a: TriValue, b: TriValue) -> TriValue:
    """First-applicable as abd(a) strong_and (a or_cup b).

    abd(a) masks the right operand with a deny whenever the left operand is
    conclusive-deny, and lets sup pick the conclusive value otherwise.
    """
    return strong_and(abd(a), sup(a, b))


def last_applicable_composite(a: TriValue, b: TriValue) -> TriValue:
    return first_applicable_composite(b, a)


# ---------------------------------------------------------------------------
# Policy AST
# ---------------------------------------------------------------------------


class Policy:
    """Base class for policy AST nodes."""


def _span_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Allow(Policy):
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Deny(Policy):
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Not(Policy):
    child: Policy
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Dbd(Policy):
    """Deny-by-default: a not-applicable child decision becomes deny."""

    child: Policy
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class And(Policy):
    """Strong conjunction of decisions; prefers not-applicable over allow."""

    left: Policy
    right: Policy
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Targeted(Policy):
    """Restrict a policy to a target.

    An unmatched target yields {not-applicable}; an undecidable target keeps
    both possibilities by adding not-applicable to the child's decisions.
    """

    target: Target
    child: Policy
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Combined(Policy):
    """n-ary combination of sub-policies under one target and operator.

    ``mode`` selects the evaluation strategy: SET (commutative operators
    only) uses the linear-time lattice shortcut, LIST folds in the given
    order.  The mode never changes the result, only how it is computed; the
    concrete syntax does not encode it and parsing always assigns the
    operator's default mode.
    """

    target: Target
    op: DecisionOp
    children: tuple[Policy, ...]
    mode: CombineMode | None = None
    span: SourceSpan | None = _span_field()

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("combined policy needs at least two children")
        mode = self.mode if self.mode is not None else self.op.default_mode
        if mode is CombineMode.SET and not self.op.commutative:
            raise ValueError(f"operator {self.op.value} is order-dependent and requires list mode")
        object.__setattr__(self, "mode", mode)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _apply_target(tv: TriValue, child_set: Callable[[], DecisionSet]) -> DecisionSet:
    if tv is ONE:
        return child_set()
    if tv is ZERO:
        return GAP_SET
    return child_set() | GAP_SET


def eval_policy(p: Policy, q: Request) -> DecisionSet:
    """Evaluate a policy against a request.  Total; result is never empty."""
    match p:
        case Allow():
            return ALLOW_SET
        case Deny():
            return DENY_SET
        case Not(child=c):
            return eval_policy(c, q).map(neg)
        case Dbd(child=c):
            return eval_policy(c, q).map(weaken)
        case And(left=l, right=r):
            return eval_policy(l, q).combine(strong_and, eval_policy(r, q))
        case Targeted(target=t, child=c):
            return _apply_target(eval_target(t, q), lambda: eval_policy(c, q))
        case Combined(target=t, op=op, children=children, mode=mode):
            def combined() -> DecisionSet:
                sets = [eval_policy(child, q) for child in children]
                if mode is CombineMode.SET:
                    return eval_nary_fast(op, sets)
                return _fold_sets(op, sets)

            return _apply_target(eval_target(t, q), combined)
    raise TypeError(f"not a policy node: {p!r}")


def eval_nary_fast(op: DecisionOp, sets: Sequence[DecisionSet]) -> DecisionSet:
    """Exact n-ary combination for the commutative (lattice) operators.

    Linear in the number of operands: under the operator's total order the
    achievable results are exactly the members of the union bounded by the
    min of the per-operand maxima (conjunctive) or the max of the per-operand
    minima (disjunctive).  Validated against :func:`naive_product`.
    """
    if op not in _LATTICE_OPS:
        raise ValueError(f"operator {op.value} is order-dependent; use eval_list_fold")
    if not sets:
        raise ValueError("need at least one operand set")
    if len(sets) == 1:
        return sets[0]
    order = OP_ORDERINGS[op]
    rank = {v: i for i, v in enumerate(order)}
    union = 0
    if op in _CONJUNCTIVE:
        bound = min(max(rank[v] for v in s) for s in sets)
        keep = [v for v in VALUES if rank[v] <= bound]
    else:
        bound = max(min(rank[v] for v in s) for s in sets)
        keep = [v for v in VALUES if rank[v] >= bound]
    for s in sets:
        union |= s.mask
    return DecisionSet.from_iterable(v for v in keep if union & _BIT[v])


def _fold_sets(op: DecisionOp, sets: Sequence[DecisionSet]) -> DecisionSet:
    """Left fold of the set-lifted binary operator (exact for associative ops)."""
    return reduce(lambda acc, s: acc.combine(lambda a, b: apply_decision_op(op, a, b), s), sets)


def eval_list_fold(op: DecisionOp, sets: Sequence[DecisionSet]) -> DecisionSet:
    """Exact ordered combination for first/last-applicable.

    Both operators are associative, so the set-lifted left fold equals the
    definitional product while keeping the accumulator at most three values.
    """
    if op in _LATTICE_OPS:
        raise ValueError(f"operator {op.value} is commutative; use eval_nary_fast")
    if len(sets) < 2:
        raise ValueError("need at least two operand sets")
    return _fold_sets(op, sets)


def naive_product(op: DecisionOp, sets: Sequence[DecisionSet], limit: int = 12) -> DecisionSet:
    """Definitional oracle: fold every combination of operand choices.

    Exponential in the number of operands; refuses more than ``limit``.
    """
    if not sets:
        raise ValueError("need at least one operand set")
    if len(sets) > limit:
        raise BudgetExceededError(
            f"naive product over {len(sets)} operands, limit is {limit}",
            required=len(sets),
            limit=limit,
        )
    results: set[TriValue] = set()

    def walk(index: int, acc: TriValue) -> None:
        if index == len(sets):
            results.add(acc)
            return
        for v in sets[index].members():
            walk(index + 1, apply_decision_op(op, acc, v))

    first = sets[0]
    if len(sets) == 1:
        return first
    for v in first.members():
        walk(1, v)
    return DecisionSet.from_iterable(results)


# ---------------------------------------------------------------------------
# Derived operators as policy rewrites
# ---------------------------------------------------------------------------


def p_abd(p: Policy) -> Policy:
    """Allow-by-default of a policy, in core connectives."""
    return Not(Dbd(Not(p)))


def p_strong_or(a: Policy, b: Policy) -> Policy:
    return Not(And(Not(a), Not(b)))


def p_or_cup(a: Policy, b: Policy) -> Policy:
    """Allow-overrides (sup) as a core-connective composite."""
    return And(p_strong_or(a, Dbd(b)), p_strong_or(Dbd(a), b))


def p_and_cup(a: Policy, b: Policy) -> Policy:
    """Deny-overrides as the double negation of allow-overrides."""
    return Not(p_or_cup(Not(a), Not(b)))


def p_and_cap(a: Policy, b: Policy) -> Policy:
    """Weak conjunction of decisions in core connectives."""
    return p_strong_or(And(a, b), p_strong_or(And(a, Not(a)), And(b, Not(b))))


def p_or_cap(a: Policy, b: Policy) -> Policy:
    """Weak disjunction of decisions in core connectives."""
    return And(p_strong_or(a, b), And(p_strong_or(a, Not(a)), p_strong_or(b, Not(b))))


def p_first_applicable(a: Policy, b: Policy) -> Policy:
    return And(p_abd(a), p_or_cup(a, b))


def p_last_applicable(a: Policy, b: Policy) -> Policy:
    return p_first_applicable(b, a)


_BINARY_ENCODERS: dict[DecisionOp, Callable[[Policy, Policy], Policy]] = {
    DecisionOp.AND_P: And,
    DecisionOp.AND_CUP: p_and_cup,
    DecisionOp.OR_CUP: p_or_cup,
    DecisionOp.AND_CAP: p_and_cap,
    DecisionOp.OR_CAP: p_or_cap,
    DecisionOp.FIRST_APPLICABLE: p_first_applicable,
    DecisionOp.LAST_APPLICABLE: p_last_applicable,
}


def desugar_policy(p: Policy) -> Policy:
    """Lower Combined nodes to the core connectives {Allow, Deny, Not, Dbd, And, Targeted}.

    A Combined node becomes a left-nested chain of binary encodings under a
    target restriction.  The encodings are exact at the level of individual
    decisions, hence exact whenever every embedded target evaluates
    conclusively (singleton decision sets).  When some target is undecidable
    the encodings may widen the result: an operand then contributes a
    multi-valued set, and its repeated occurrences inside an encoding choose
    values independently, so the rewritten policy evaluates to a superset of
    the original's decision set.  (No exact core rewrite exists: the core's
    only injective single-occurrence unaries are identity and negation, which
    cannot express the sup operator without duplicating an operand.)
    """
    match p:
        case Allow() | Deny():
            return p
        case Not(child=c):
            return Not(desugar_policy(c))
        case Dbd(child=c):
            return Dbd(desugar_policy(c))
        case And(left=l, right=r):
            return And(desugar_policy(l), desugar_policy(r))
        case Targeted(target=t, child=c):
            return Targeted(t, desugar_policy(c))
        case Combined(target=t, op=op, children=children):
            encode = _BINARY_ENCODERS[op]
            lowered = [desugar_policy(child) for child in children]
            chain = reduce(encode, lowered)
            return Targeted(t, chain)
    raise TypeError(f"not a policy node: {p!r}")


def is_core_policy(p: Policy) -> bool:
    match p:
        case Allow() | Deny():
            return True
        case Not(child=c) | Dbd(child=c):
            return is_core_policy(c)
        case And(left=l, right=r):
            return is_core_policy(l) and is_core_policy(r)
        case Targeted(child=c):
            return is_core_policy(c)
    return False


# ---------------------------------------------------------------------------
# Structure helpers (used by the analysis layer and tests)
# ---------------------------------------------------------------------------


def policy_targets(p: Policy) -> tuple[Target, ...]:
    """All targets embedded in the policy, in depth-first order."""
    found: list[Target] = []

    def walk(node: Policy) -> None:
        match node:
            case Allow() | Deny():
                pass
            case Not(child=c) | Dbd(child=c):
                walk(c)
            case And(left=l, right=r):
                walk(l)
                walk(r)
            case Targeted(target=t, child=c):
                found.append(t)
                walk(c)
            case Combined(target=t, children=children):
                found.append(t)
                for child in children:
                    walk(child)

    walk(p)
    return tuple(found)


def policy_connectives(p: Policy) -> frozenset[str]:
    """Names of the unary/binary connectives used ('not', 'dbd', 'and').

    Combined nodes are reported through their lowered form, so a policy using
    a derived operator reports every connective its encoding needs.
    """
    found: set[str] = set()

    def walk(node: Policy) -> None:
        match node:
            case Allow() | Deny():
                pass
            case Not(child=c):
                found.add("not")
                walk(c)
            case Dbd(child=c):
                found.add("dbd")
                walk(c)
            case And(left=l, right=r):
                found.add("and")
                walk(l)
                walk(r)
            case Targeted(child=c):
                walk(c)
            case Combined():
                walk(desugar_policy(node))

    walk(p)
    return frozenset(found)
