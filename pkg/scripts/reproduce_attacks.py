#!/usr/bin/env python3
"""Walk through the attribute-hiding demonstrations on the bundled fixtures.

Prints, for the Chinese-Wall policy and the deny-overrides pair, how each
request evaluates, what the conservative resolver decides, and which
sub-requests constitute hiding attacks under both hiding models.
"""

from __future__ import annotations

from pathlib import Path

from ptacl import (
    SubsetMode,
    classify_policy_guarantee,
    eval_policy,
    find_hiding_attacks,
    parse_policy,
    parse_request,
    resolve,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def show(label: str) -> str:
    return label.ljust(26)


def decisions_str(ds) -> str:
    return "{" + ",".join(f"{v.token}_P" for v in ds.members()) + "}"


def report(policy_name: str, request_names: list[str]) -> None:
    policy = parse_policy((FIXTURES / policy_name).read_text(encoding="utf-8"))
    print(f"== {policy_name}")
    requests = {}
    for name in request_names:
        q = parse_request((FIXTURES / name).read_text(encoding="utf-8"))
        requests[name] = q
        ds = eval_policy(policy, q)
        print(f"  {show(name)} {decisions_str(ds):>12}  ->  {resolve(ds).value}")

    guarantee = classify_policy_guarantee(policy)
    safe = ", ".join(guarantee.unconditional) or "none"
    print(f"  unconditional guarantees: {safe}")

    for name, q in requests.items():
        for mode in (SubsetMode.ARBITRARY, SubsetMode.ALL_OR_NOTHING):
            for w in find_hiding_attacks(policy, q, mode):
                hidden = ", ".join(f"{n}={v}" for n, v in w.hidden_pairs)
                print(
                    f"  attack on {name} [{mode.value}]: hide {hidden}"
                    f"  ({decisions_str(w.original_decisions)} -> {decisions_str(w.reduced_decisions)})"
                )
    print()


def main() -> None:
    report(
        "chinese_wall.ptp",
        [
            "cw_employee_a.ptq",
            "cw_both_employers.ptq",
            "cw_not_confidential.ptq",
            "cw_confidential_only.ptq",
        ],
    )
    report("value_hiding_attack.ptp", ["vh_full.ptq", "vh_hidden.ptq"])
    report("allow_stable.ptp", ["cw_confidential_only.ptq"])


if __name__ == "__main__":
    main()
