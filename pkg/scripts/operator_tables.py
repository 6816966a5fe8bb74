#!/usr/bin/env python3
"""Print every operator table and confirm the derived constructions.

Useful as a quick visual reference and as a standalone sanity check that the
hard-coded tables, the order-based formulations and the core-connective
encodings all agree.
"""

from __future__ import annotations

from itertools import product

from ptacl import tri
from ptacl.policies import (
    DecisionOp,
    abd,
    abd_composite,
    and_cup_composite,
    apply_decision_op,
    first_applicable_composite,
    last_applicable_composite,
)
from ptacl.tri import VALUES


def show_binary(title: str, fn) -> None:
    header = " | ".join(v.token for v in VALUES)
    print(f"{title}:")
    print(f"      {header}")
    for a in VALUES:
        row = " | ".join(fn(a, b).token for b in VALUES)
        print(f"  {a.token:>3}   {row}")
    print()


def show_unary(title: str, fn) -> None:
    cells = "  ".join(f"{a.token} -> {fn(a).token}" for a in VALUES)
    print(f"{title}:  {cells}\n")


def main() -> None:
    print("# Kernel operators (rows = left operand)\n")
    show_binary("weak and", tri.weak_and)
    show_binary("weak or", tri.weak_or)
    show_binary("strong and", tri.strong_and)
    show_binary("strong or", tri.strong_or)
    show_binary("sup (1 > 0 > bot)", tri.sup)
    show_unary("negation", tri.neg)
    show_unary("weaken (opt)", tri.weaken)
    show_unary("swap", tri.swap)

    print("# Decision operators\n")
    for op in DecisionOp:
        show_binary(op.value, lambda a, b, op=op: apply_decision_op(op, a, b))
    show_unary("abd", abd)

    checks = {
        "weak and == strong-op construction": all(
            tri.weak_and_composite(a, b) is tri.weak_and(a, b) for a, b in product(VALUES, VALUES)
        ),
        "weak or == strong-op construction": all(
            tri.weak_or_composite(a, b) is tri.weak_or(a, b) for a, b in product(VALUES, VALUES)
        ),
        "sup == strong-op construction": all(
            tri.sup_composite(a, b) is tri.sup(a, b) for a, b in product(VALUES, VALUES)
        ),
        "swap == strong-op construction": all(tri.swap_composite(a) is tri.swap(a) for a in VALUES),
        "and_cup == double-negated sup": all(
            and_cup_composite(a, b) is apply_decision_op(DecisionOp.AND_CUP, a, b)
            for a, b in product(VALUES, VALUES)
        ),
        "abd == not dbd not": all(abd_composite(a) is abd(a) for a in VALUES),
        "fa == abd/sup composite": all(
            first_applicable_composite(a, b)
            is apply_decision_op(DecisionOp.FIRST_APPLICABLE, a, b)
            for a, b in product(VALUES, VALUES)
        ),
        "la == flipped fa": all(
            last_applicable_composite(a, b)
            is apply_decision_op(DecisionOp.LAST_APPLICABLE, a, b)
            for a, b in product(VALUES, VALUES)
        ),
    }
    print("# Construction checks\n")
    width = max(len(k) for k in checks)
    for label, ok in checks.items():
        print(f"  {label.ljust(width)}  {'ok' if ok else 'MISMATCH'}")
    if not all(checks.values()):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
