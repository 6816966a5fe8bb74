"""Targets: when is a policy applicable to a request.

A request is a finite set of (attribute-name, attribute-value) string pairs;
a name may occur several times with different values.  A target is an AST
over atoms (``Null``, ``Name``, ``Match``) and connectives, evaluated against
a request to a :class:`~ptacl.tri.TriValue`:

* ONE    -- the request matches the target,
* ZERO   -- the relevant attribute name is present but no value matches,
* BOTTOM -- the request lacks the information to decide.

Core connectives are ``Opt`` (weakening), ``Not`` (negation), ``And`` (weak
conjunction, so a missing mandatory conjunct keeps the target undecided) and
``Or`` (strong disjunction).  The extended connectives ``StrongAnd``,
``WeakOr`` and ``Sup`` expose the remaining kernel operators directly; they
are expressible in the core (see :func:`desugar_target`) and exist as
conveniences.

Only string equality is supported when matching values; comparison
predicates are reserved syntax and rejected by the parser.

Everything here is immutable and pure; shared use across threads is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .errors import BudgetExceededError, SourceSpan
from .tri import (
    BOTTOM,
    ONE,
    ZERO,
    TriValue,
    neg,
    strong_and,
    strong_or,
    sup,
    weak_and,
    weak_or,
    weaken,
)

Pair = tuple[str, str]


@dataclass(frozen=True)
class Request:
    """A finite set of attribute pairs; duplicates collapse, may be empty."""

    pairs: frozenset[Pair] = frozenset()

    def __post_init__(self) -> None:
        pairs = frozenset(self.pairs)
        for name, value in pairs:
            if not isinstance(name, str) or not isinstance(value, str):
                raise TypeError(f"attribute pair must be two strings: {(name, value)!r}")
            if not name or not value:
                raise ValueError(f"attribute names and values must be non-empty: {(name, value)!r}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def of(cls, *pairs: Pair) -> "Request":
        return cls(frozenset(pairs))

    @property
    def names(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.pairs)

    def sorted_pairs(self) -> tuple[Pair, ...]:
        return tuple(sorted(self.pairs))

    def values_for(self, name: str) -> frozenset[str]:
        return frozenset(v for n, v in self.pairs if n == name)

    def restrict_names(self, names: Iterable[str]) -> "Request":
        keep = set(names)
        return Request(frozenset(p for p in self.pairs if p[0] in keep))

    def issubset(self, other: "Request") -> bool:
        return self.pairs <= other.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.sorted_pairs())


EMPTY_REQUEST = Request()


# ---------------------------------------------------------------------------
# Target AST
# ---------------------------------------------------------------------------


class Target:
    """Base class for target AST nodes."""


def _span_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Null(Target):
    """Matches every request."""

    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Name(Target):
    """Matches when the attribute name occurs at all (never evaluates to ZERO)."""

    name: str
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Match(Target):
    """Matches the exact attribute pair (name, value)."""

    name: str
    value: str
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Opt(Target):
    """Make a sub-target optional: an undecided sub-result counts as unmatched."""

    child: Target
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Not(Target):
    child: Target
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class And(Target):
    """Weak conjunction: a missing mandatory conjunct keeps the result undecided."""

    left: Target
    right: Target
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Or(Target):
    """Strong disjunction: one matched disjunct settles the target."""

    left: Target
    right: Target
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class StrongAnd(Target):
    """Extended node: strong conjunction (an unmatched conjunct settles it)."""

    left: Target
    right: Target
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class WeakOr(Target):
    """Extended node: weak disjunction (undecidedness is contagious)."""

    left: Target
    right: Target
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Sup(Target):
    """Extended node: most-conclusive-wins combination (sup of ONE > ZERO > BOTTOM)."""

    left: Target
    right: Target
    span: SourceSpan | None = _span_field()


CORE_NODES = (Null, Name, Match, Opt, Not, Or)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_target(t: Target, q: Request) -> TriValue:
    """Evaluate a target against a request.  Total."""
    match t:
        case Null():
            return ONE
        case Name(name=n):
            return ONE if any(pn == n for pn, _ in q.pairs) else BOTTOM
        case Match(name=n, value=v):
            if (n, v) in q.pairs:
                return ONE
            if any(pn == n for pn, _ in q.pairs):
                return ZERO
            return BOTTOM
        case Opt(child=c):
            return weaken(eval_target(c, q))
        case Not(child=c):
            return neg(eval_target(c, q))
        case And(left=l, right=r):
            return weak_and(eval_target(l, q), eval_target(r, q))
        case Or(left=l, right=r):
            return strong_or(eval_target(l, q), eval_target(r, q))
        case StrongAnd(left=l, right=r):
            return strong_and(eval_target(l, q), eval_target(r, q))
        case WeakOr(left=l, right=r):
            return weak_or(eval_target(l, q), eval_target(r, q))
        case Sup(left=l, right=r):
            return sup(eval_target(l, q), eval_target(r, q))
    raise TypeError(f"not a target node: {t!r}")


def atomic_eval_by_splitting(t: Name | Match, q: Request) -> TriValue:
    """Atomic evaluation as the sup-fold of per-pair verdicts.

    Equivalent to :func:`eval_target` on atoms; kept as an independent
    formulation of the same semantics (the request can be split into
    singletons and the verdicts folded with ``sup``).
    """
    if not isinstance(t, (Name, Match)):
        raise TypeError("splitting evaluation applies to atomic targets only")
    verdict = BOTTOM
    for pair in q.sorted_pairs():
        verdict = sup(verdict, eval_target(t, Request.of(pair)))
    return verdict


# ---------------------------------------------------------------------------
# Desugaring to the core
# ---------------------------------------------------------------------------


def _enc_strong_and(a: Target, b: Target) -> Target:
    return Not(Or(Not(a), Not(b)))


def desugar_target(t: Target) -> Target:
    """Rewrite a target using core nodes only (Null, Name, Match, Opt, Not, Or).

    Evaluation is preserved exactly for every request: target evaluation is
    single-valued, so duplicating operands inside an encoding is harmless.
    """
    match t:
        case Null() | Name() | Match():
            return t
        case Opt(child=c):
            return Opt(desugar_target(c))
        case Not(child=c):
            return Not(desugar_target(c))
        case Or(left=l, right=r):
            return Or(desugar_target(l), desugar_target(r))
        case StrongAnd(left=l, right=r):
            return _enc_strong_and(desugar_target(l), desugar_target(r))
        case And(left=l, right=r):
            a, b = desugar_target(l), desugar_target(r)
            return Or(
                _enc_strong_and(a, b),
                Or(_enc_strong_and(a, Not(a)), _enc_strong_and(b, Not(b))),
            )
        case WeakOr(left=l, right=r):
            a, b = desugar_target(l), desugar_target(r)
            return _enc_strong_and(
                Or(a, b),
                _enc_strong_and(Or(a, Not(a)), Or(b, Not(b))),
            )
        case Sup(left=l, right=r):
            a, b = desugar_target(l), desugar_target(r)
            return _enc_strong_and(Or(a, Opt(b)), Or(Opt(a), b))
    raise TypeError(f"not a target node: {t!r}")


def is_core_target(t: Target) -> bool:
    match t:
        case Null() | Name() | Match():
            return True
        case Opt(child=c) | Not(child=c):
            return is_core_target(c)
        case Or(left=l, right=r):
            return is_core_target(l) and is_core_target(r)
    return False


# ---------------------------------------------------------------------------
# Brute-force universes and equivalence
# ---------------------------------------------------------------------------

FRESH_VALUE_BASE = "fresh"


def fresh_value(mentioned: Iterable[str]) -> str:
    """A value distinct from everything mentioned, deterministically chosen."""
    taken = set(mentioned)
    candidate = FRESH_VALUE_BASE
    i = 1
    while candidate in taken:
        i += 1
        candidate = f"{FRESH_VALUE_BASE}_{i}"
    return candidate


def mentioned_atoms(t: Target) -> tuple[set[str], set[Pair]]:
    """Names and (name, value) pairs mentioned by the atoms of ``t``."""
    names: set[str] = set()
    pairs: set[Pair] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        match node:
            case Name(name=n):
                names.add(n)
            case Match(name=n, value=v):
                names.add(n)
                pairs.add((n, v))
            case Opt(child=c) | Not(child=c):
                stack.append(c)
            case And(left=l, right=r) | Or(left=l, right=r) | StrongAnd(left=l, right=r) \
                    | WeakOr(left=l, right=r) | Sup(left=l, right=r):
                stack.append(l)
                stack.append(r)
    return names, pairs


def build_universe(ts: Iterable[Target]) -> frozenset[Pair]:
    """Candidate pairs whose subsets cover all evaluation behaviours.

    Every mentioned (name, value) pair is included, plus one fresh pair per
    mentioned name.  One fresh value per name suffices: matching is equality
    only, so all unmatched values are interchangeable.
    """
    names: set[str] = set()
    pairs: set[Pair] = set()
    for t in ts:
        t_names, t_pairs = mentioned_atoms(t)
        names |= t_names
        pairs |= t_pairs
    fresh = fresh_value(v for _, v in pairs)
    for n in names:
        pairs.add((n, fresh))
    return frozenset(pairs)


def universe_requests(universe: Iterable[Pair]) -> Iterator[Request]:
    """All subsets of the universe, smallest first, lexicographic within a size."""
    pool = sorted(set(universe))
    for size in range(len(pool) + 1):
        for combo in combinations(pool, size):
            yield Request(frozenset(combo))


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    witness: Request | None = None


def targets_equivalent(t1: Target, t2: Target, limit: int = 12) -> EquivalenceVerdict:
    """Decide semantic equivalence by enumerating the joint universe.

    Raises :class:`BudgetExceededError` when the universe has more than
    ``limit`` pairs (2**limit candidate requests).  On inequivalence the
    returned witness is a smallest distinguishing request.
    """
    universe = build_universe([t1, t2])
    if len(universe) > limit:
        raise BudgetExceededError(
            f"equivalence universe has {len(universe)} pairs, limit is {limit}",
            required=len(universe),
            limit=limit,
        )
    for q in universe_requests(universe):
        if eval_target(t1, q) is not eval_target(t2, q):
            return EquivalenceVerdict(False, q)
    return EquivalenceVerdict(True, None)
