"""Three-valued logic kernel.

The single carrier ``TriValue`` = {ONE, ZERO, BOTTOM} is shared by two
interpretations:

* target decisions: ONE = the request matches, ZERO = the attribute name is
  present but no value matches, BOTTOM = the attribute is absent so the
  target cannot be decided;
* policy decisions: ONE = allow, ZERO = deny, BOTTOM = not applicable.

The two readings of BOTTOM are deliberately different (missing information
vs. irrelevant policy); the kernel itself is interpretation-neutral and the
call sites document which view they take.

Binary operators come in a weak pair (``weak_and``/``weak_or``, where BOTTOM
is contagious) and a strong pair (``strong_and``/``strong_or``, where the
dominant element wins) -- the weak and strong Kleene connectives.  On top of
those sit the supremum ``sup`` of the total order ONE > ZERO > BOTTOM, and
the involution ``swap`` exchanging ZERO and BOTTOM.

All tables are hard-coded constants: the tables are the ground truth, and
the ordering- or composition-based derivations (``*_composite`` functions,
``conclusiveness``) exist so tests can cross-check the constants against an
independent formulation.  Everything here is a pure total function over an
immutable three-symbol enumeration and is safe for unrestricted concurrent
use.
"""

from __future__ import annotations

import enum


class TriValue(enum.Enum):
    """The three-element decision carrier."""

    ONE = "1"
    ZERO = "0"
    BOTTOM = "bot"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"TriValue.{self.name}"

    @property
    def token(self) -> str:
        """Short display token: ``1``, ``0`` or the bottom symbol."""
        return _TOKENS[self]


ONE = TriValue.ONE
ZERO = TriValue.ZERO
BOTTOM = TriValue.BOTTOM

#: All three values, in table order (rows and columns of the operator tables).
VALUES: tuple[TriValue, TriValue, TriValue] = (ONE, ZERO, BOTTOM)

_TOKENS = {ONE: "1", ZERO: "0", BOTTOM: "⊥"}


def _table(rows: tuple[tuple[TriValue, ...], ...]) -> dict[tuple[TriValue, TriValue], TriValue]:
    """Build a lookup from a 3x3 grid laid out in VALUES order."""
    out: dict[tuple[TriValue, TriValue], TriValue] = {}
    for a, row in zip(VALUES, rows):
        for b, result in zip(VALUES, row):
            out[(a, b)] = result
    return out


# Weak conjunction: BOTTOM absorbs, otherwise boolean "and".
WEAK_AND_TABLE = _table((
    (ONE, ZERO, BOTTOM),
    (ZERO, ZERO, BOTTOM),
    (BOTTOM, BOTTOM, BOTTOM),
))

# Weak disjunction: BOTTOM absorbs, otherwise boolean "or".
WEAK_OR_TABLE = _table((
    (ONE, ONE, BOTTOM),
    (ONE, ZERO, BOTTOM),
    (BOTTOM, BOTTOM, BOTTOM),
))

# Strong conjunction: ZERO dominates, BOTTOM otherwise absorbs.
STRONG_AND_TABLE = _table((
    (ONE, ZERO, BOTTOM),
    (ZERO, ZERO, ZERO),
    (BOTTOM, ZERO, BOTTOM),
))

# Strong disjunction: ONE dominates, BOTTOM otherwise absorbs.
STRONG_OR_TABLE = _table((
    (ONE, ONE, ONE),
    (ONE, ZERO, BOTTOM),
    (ONE, BOTTOM, BOTTOM),
))

# Supremum of the total order ONE > ZERO > BOTTOM.
SUP_TABLE = _table((
    (ONE, ONE, ONE),
    (ONE, ZERO, ZERO),
    (ONE, ZERO, BOTTOM),
))

NEG_TABLE = {ONE: ZERO, ZERO: ONE, BOTTOM: BOTTOM}

# "Optional" weakening: BOTTOM becomes ZERO, conclusive values unchanged.
WEAKEN_TABLE = {ONE: ONE, ZERO: ZERO, BOTTOM: ZERO}

# Swap of ZERO and BOTTOM, fixing ONE; an involution.
SWAP_TABLE = {ONE: ONE, ZERO: BOTTOM, BOTTOM: ZERO}


def weak_and(a: TriValue, b: TriValue) -> TriValue:
    return WEAK_AND_TABLE[(a, b)]


def weak_or(a: TriValue, b: TriValue) -> TriValue:
    return WEAK_OR_TABLE[(a, b)]


def strong_and(a: TriValue, b: TriValue) -> TriValue:
    return STRONG_AND_TABLE[(a, b)]


def strong_or(a: TriValue, b: TriValue) -> TriValue:
    return STRONG_OR_TABLE[(a, b)]


def sup(a: TriValue, b: TriValue) -> TriValue:
    """Least upper bound under ONE > ZERO > BOTTOM."""
    return SUP_TABLE[(a, b)]


def neg(a: TriValue) -> TriValue:
    return NEG_TABLE[a]


def weaken(a: TriValue) -> TriValue:
    return WEAKEN_TABLE[a]


def swap(a: TriValue) -> TriValue:
    return SWAP_TABLE[a]


def conclusiveness(a: TriValue) -> int:
    """Rank in the order BOTTOM < ZERO < ONE (0, 1, 2).

    This is both the order whose maximum defines ``sup`` and the order used
    by the weak-monotonicity comparison: larger means more conclusive in the
    "matched" direction.
    """
    if a is ONE:
        return 2
    if a is ZERO:
        return 1
    return 0


def weak_le(a: TriValue, b: TriValue) -> bool:
    """a precedes-or-equals b under BOTTOM < ZERO < ONE."""
    return conclusiveness(a) <= conclusiveness(b)


def is_conclusive(a: TriValue) -> bool:
    return a is not BOTTOM


# ---------------------------------------------------------------------------
# Derived constructions.  The strong pair plus neg and weaken is functionally
# complete, and the composites below rebuild the remaining operators from it.
# They are exported so tests can pin the hard-coded tables against them.
# ---------------------------------------------------------------------------


def weak_and_composite(a: TriValue, b: TriValue) -> TriValue:
    """weak_and rebuilt from the strong operators and negation."""
    return strong_or(
        strong_and(a, b),
        strong_or(strong_and(a, neg(a)), strong_and(b, neg(b))),
    )


def weak_or_composite(a: TriValue, b: TriValue) -> TriValue:
    """weak_or rebuilt from the strong operators and negation."""
    return strong_and(
        strong_or(a, b),
        strong_and(strong_or(a, neg(a)), strong_or(b, neg(b))),
    )


def sup_composite(a: TriValue, b: TriValue) -> TriValue:
    """sup rebuilt from strong operators and weakening."""
    return strong_and(strong_or(a, weaken(b)), strong_or(weaken(a), b))


def swap_composite(a: TriValue) -> TriValue:
    """swap rebuilt as (a strong_or BOTTOM) strong_and weaken(a strong_or neg a)."""
    return strong_and(strong_or(a, BOTTOM), weaken(strong_or(a, neg(a))))
