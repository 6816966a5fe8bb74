"""Command-line interface.

Subcommands: ``eval`` (decide a request against a policy), ``analyze``
(monotonicity / guarantee classification for a target or policy file),
``hiding`` (search a request for attribute-hiding attacks) and ``serve``
(run the HTTP decision point).

Exit codes: 0 success (and, under ``--resolve``, an allow decision);
1 deny under ``--resolve``; 2 usage or parse errors; 3 an analysis budget
was exceeded; 4 hiding witnesses were found.  Every reporting command takes
``--json`` for machine-readable output with stable field names
(``decisions``, ``resolved``, ``witnesses``, ``class``).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import policies as pl
from . import targets as tg
from .analysis import (
    DEFAULT_LIMIT,
    MonotonicityKind,
    SubsetMode,
    check_monotonic_semantic,
    classify_policy_guarantee,
    classify_target,
    find_hiding_attacks,
)
from .errors import BudgetExceededError, ParseError
from .policies import AccessDecision, DecisionSet, eval_policy, resolve
from .service import create_app, decision_set_payload
from .syntax import parse_policy, parse_request, parse_target, print_request, print_target
from .targets import Request, eval_target
from .tri import TriValue

MODE_CHOICES = [m.value for m in SubsetMode]


def format_decision_set(ds: DecisionSet) -> str:
    return "{" + ",".join(f"{v.token}_P" for v in ds.members()) + "}"


def format_target_value(v: TriValue) -> str:
    return f"{v.token}_T"


def _die_parse(exc: ParseError, path: str) -> None:
    click.echo(f"{path}: {exc}", err=True)
    sys.exit(2)


def _load_policy(path: str) -> pl.Policy:
    try:
        return parse_policy(Path(path).read_text(encoding="utf-8"))
    except ParseError as exc:
        _die_parse(exc, path)
        raise AssertionError("unreachable")


def _load_request(path: str) -> Request:
    try:
        return parse_request(Path(path).read_text(encoding="utf-8"))
    except ParseError as exc:
        _die_parse(exc, path)
        raise AssertionError("unreachable")


def _request_lines(q: Request, indent: str = "  ") -> list[str]:
    body = print_request(q)
    if not body:
        return [f"{indent}(empty request)"]
    return [f"{indent}{line}" for line in body.splitlines()]


@click.group()
def main() -> None:
    """Evaluate and analyze three-valued attribute-based access policies."""


@main.command("eval")
@click.argument("policy_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("request_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--resolve", "do_resolve", is_flag=True, help="Apply the conservative resolver and set the exit code.")
@click.option("--trace", is_flag=True, help="Print the annotated evaluation tree.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def cli_eval(policy_file: str, request_file: str, do_resolve: bool, trace: bool, as_json: bool) -> None:
    """Evaluate POLICY_FILE against REQUEST_FILE."""
    policy = _load_policy(policy_file)
    request = _load_request(request_file)
    decisions = eval_policy(policy, request)
    outcome = resolve(decisions)
    if as_json:
        payload = {
            "decisions": decision_set_payload(decisions),
            "resolved": outcome.value if do_resolve else None,
        }
        if trace:
            payload["trace"] = _trace_lines(policy, request, 0)
        click.echo(json.dumps(payload))
    else:
        if trace:
            for line in _trace_lines(policy, request, 0):
                click.echo(line)
        click.echo(f"decisions: {format_decision_set(decisions)}")
        if do_resolve:
            click.echo(f"resolved: {outcome.value}")
    if do_resolve and outcome is AccessDecision.DENY:
        sys.exit(1)


def _trace_lines(p: pl.Policy, q: Request, depth: int) -> list[str]:
    indent = "  " * depth
    ds = format_decision_set(eval_policy(p, q))
    match p:
        case pl.Allow():
            return [f"{indent}allow -> {ds}"]
        case pl.Deny():
            return [f"{indent}deny -> {ds}"]
        case pl.Not(child=c):
            return [f"{indent}not -> {ds}"] + _trace_lines(c, q, depth + 1)
        case pl.Dbd(child=c):
            return [f"{indent}dbd -> {ds}"] + _trace_lines(c, q, depth + 1)
        case pl.And(left=l, right=r):
            return (
                [f"{indent}and -> {ds}"]
                + _trace_lines(l, q, depth + 1)
                + _trace_lines(r, q, depth + 1)
            )
        case pl.Targeted(target=t, child=c):
            tv = format_target_value(eval_target(t, q))
            head = f"{indent}target {print_target(t)} [{tv}] -> {ds}"
            return [head] + _trace_lines(c, q, depth + 1)
        case pl.Combined(target=t, op=op, children=children):
            tv = format_target_value(eval_target(t, q))
            head = f"{indent}combine {op.value} over target {print_target(t)} [{tv}] -> {ds}"
            lines = [head]
            for child in children:
                lines.extend(_trace_lines(child, q, depth + 1))
            return lines
    raise TypeError(f"not a policy node: {p!r}")


@main.command("analyze")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(MODE_CHOICES), default=SubsetMode.ARBITRARY.value,
              help="Hiding model used for semantic counterexamples.")
@click.option("--limit", type=int, default=DEFAULT_LIMIT, help="Enumeration budget (powerset exponent).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def cli_analyze(file: str, mode: str, limit: int, as_json: bool) -> None:
    """Classify the target or policy in FILE (.ptt targets, .ptp policies)."""
    path = Path(file)
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".ptt":
            _analyze_target(parse_target(text), SubsetMode(mode), limit, as_json)
        else:
            _analyze_policy(parse_policy(text), limit, as_json)
    except ParseError as exc:
        _die_parse(exc, file)
    except BudgetExceededError as exc:
        click.echo(f"analysis budget exceeded: {exc} (rerun with --limit {exc.required})", err=True)
        sys.exit(3)


def _analyze_target(t: tg.Target, mode: SubsetMode, limit: int, as_json: bool) -> None:
    cls = classify_target(t, limit=limit)
    strong = check_monotonic_semantic(t, MonotonicityKind.STRONG, SubsetMode.ALL_OR_NOTHING, limit=limit)
    weak = check_monotonic_semantic(t, MonotonicityKind.WEAK, mode, limit=limit)
    if as_json:
        click.echo(json.dumps({
            "kind": "target",
            "class": {
                "strong_under_all_or_nothing": cls.strong_under_all_or_nothing,
                "weak": cls.weak,
            },
            "notes": list(cls.notes),
            "strong_counterexample": _counterexample_payload(strong.counterexample),
            "weak_counterexample": _counterexample_payload(weak.counterexample),
        }))
        return
    click.echo("kind: target")
    click.echo(f"weak: {_yesno(cls.weak)}")
    click.echo(f"strong (all-or-nothing): {_yesno(cls.strong_under_all_or_nothing)}")
    for note in cls.notes:
        click.echo(f"note: {note}")
    for label, verdict in (("strong", strong), ("weak", weak)):
        if verdict.counterexample is not None:
            q, q_sub = verdict.counterexample
            click.echo(f"{label} counterexample, full request:")
            click.echo("\n".join(_request_lines(q)))
            click.echo(f"{label} counterexample, sub-request:")
            click.echo("\n".join(_request_lines(q_sub)))


def _counterexample_payload(pair: tuple[Request, Request] | None):
    if pair is None:
        return None
    q, q_sub = pair
    return {"request": sorted(q.pairs), "sub_request": sorted(q_sub.pairs)}


def _analyze_policy(p: pl.Policy, limit: int, as_json: bool) -> None:
    guarantee = classify_policy_guarantee(p, limit=limit)
    if as_json:
        click.echo(json.dumps({
            "kind": "policy",
            "class": {
                "set_inclusion_all_or_nothing": guarantee.set_inclusion_all_or_nothing,
                "set_inclusion_arbitrary": guarantee.set_inclusion_arbitrary,
                "conclusive_stability": guarantee.conclusive_stability,
                "allow_stability": guarantee.allow_stability,
            },
            "unconditional": list(guarantee.unconditional),
            "reasons": list(guarantee.reasons),
        }))
        return
    click.echo("kind: policy")
    click.echo(f"set-inclusion (all-or-nothing): {_yesno(guarantee.set_inclusion_all_or_nothing)}")
    click.echo(f"set-inclusion (arbitrary subsets): {_yesno(guarantee.set_inclusion_arbitrary)}")
    click.echo(f"conclusive-stability: {_yesno(guarantee.conclusive_stability)}")
    click.echo(f"allow-stability: {_yesno(guarantee.allow_stability)}")
    if guarantee.unconditional:
        click.echo(f"unconditional guarantee: {', '.join(guarantee.unconditional)}")
    else:
        click.echo("unconditional guarantee: none")
    for reason in guarantee.reasons:
        click.echo(f"reason: {reason}")


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


@main.command("hiding")
@click.argument("policy_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("request_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(MODE_CHOICES), default=SubsetMode.ARBITRARY.value)
@click.option("--limit", type=int, default=DEFAULT_LIMIT, help="Enumeration budget (powerset exponent).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def cli_hiding(policy_file: str, request_file: str, mode: str, limit: int, as_json: bool) -> None:
    """Search REQUEST_FILE's sub-requests for attribute-hiding attacks."""
    policy = _load_policy(policy_file)
    request = _load_request(request_file)
    try:
        witnesses = find_hiding_attacks(policy, request, SubsetMode(mode), limit=limit)
    except BudgetExceededError as exc:
        click.echo(f"hiding search budget exceeded: {exc} (rerun with --limit {exc.required})", err=True)
        sys.exit(3)
    if as_json:
        click.echo(json.dumps({
            "witnesses": [
                {
                    "hidden": [list(p) for p in w.hidden_pairs],
                    "reduced_request": [list(p) for p in w.reduced_request.sorted_pairs()],
                    "original_decisions": decision_set_payload(w.original_decisions),
                    "reduced_decisions": decision_set_payload(w.reduced_decisions),
                }
                for w in witnesses
            ],
        }))
    else:
        click.echo(f"witnesses: {len(witnesses)}")
        for i, w in enumerate(witnesses, start=1):
            hidden = ", ".join(f"{n} = {v}" for n, v in w.hidden_pairs)
            click.echo(
                f"{i}) hide [{hidden}]: "
                f"{format_decision_set(w.original_decisions)} -> {format_decision_set(w.reduced_decisions)}"
            )
            click.echo("   reduced request:")
            click.echo("\n".join(_request_lines(w.reduced_request, indent="     ")))
    if witnesses:
        sys.exit(4)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8462, show_default=True, type=int)
@click.option("--policy-dir", envvar="PTACL_POLICY_DIR", type=click.Path(exists=True, file_okay=False),
              default=None, help="Directory of .ptp files loaded at startup (env: PTACL_POLICY_DIR).")
def cli_serve(host: str, port: int, policy_dir: str | None) -> None:
    """Run the HTTP policy decision point."""
    import uvicorn

    app = create_app(policy_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
