"""Embedded policy-decision-point service.

A small HTTP facade over the evaluator and analyzer: policies are registered
under unique ids (or preloaded from a directory of ``.ptp`` files at
startup), then evaluated against requests posted as ``[name, value]`` pairs.
The store is append-only and records are immutable, so concurrent
evaluations never observe partial updates; registration is serialized behind
a lock.

Endpoints:

* ``POST /v1/policies`` ``{id, source}`` -> 201 (409 duplicate, 400 parse error)
* ``GET  /v1/policies/{id}`` -> the stored source (404 unknown)
* ``POST /v1/policies/{id}/evaluate`` ``{request: [[name, value], ...]}``
  -> ``{decisions, resolved}``
* ``POST /v1/policies/{id}/analyze`` ``{mode, limit}`` -> classification
  report (422 when the analysis budget is exceeded)
* ``GET  /healthz`` -> 200

Malformed bodies and parse errors return 400 with a diagnostic (including
the source span for syntax errors).
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request as HttpRequest
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .analysis import DEFAULT_LIMIT, SubsetMode, classify_policy_guarantee
from .errors import BudgetExceededError, ParseError
from .policies import DecisionSet, Policy, eval_policy, resolve
from .syntax import parse_policy
from .targets import Request

DECISION_NAMES = {"1": "allow", "0": "deny", "bot": "not_applicable"}


def decision_set_payload(ds: DecisionSet) -> list[str]:
    return [DECISION_NAMES[v.value] for v in ds.members()]


@dataclass(frozen=True)
class PolicyRecord:
    policy_id: str
    source: str
    policy: Policy
    loaded_at: float


class DuplicatePolicyError(Exception):
    pass


class PolicyStore:
    """Id -> parsed policy map; ids are unique and records never change."""

    def __init__(self) -> None:
        self._records: dict[str, PolicyRecord] = {}
        self._lock = threading.Lock()

    def register(self, policy_id: str, source: str) -> PolicyRecord:
        policy = parse_policy(source)
        record = PolicyRecord(policy_id, source, policy, time.time())
        with self._lock:
            if policy_id in self._records:
                raise DuplicatePolicyError(policy_id)
            self._records[policy_id] = record
        return record

    def get(self, policy_id: str) -> PolicyRecord | None:
        return self._records.get(policy_id)

    def ids(self) -> list[str]:
        return sorted(self._records)


def load_policy_dir(store: PolicyStore, directory: Path) -> None:
    """Load every ``*.ptp`` file (id = stem); any failure aborts startup."""
    for path in sorted(directory.glob("*.ptp")):
        try:
            store.register(path.stem, path.read_text(encoding="utf-8"))
        except ParseError as exc:
            raise RuntimeError(f"failed to load policy {path}: {exc}") from exc
        except DuplicatePolicyError as exc:
            raise RuntimeError(f"duplicate policy id {path.stem!r} while loading {path}") from exc


class RegisterBody(BaseModel):
    id: str = Field(min_length=1)
    source: str


class EvaluateBody(BaseModel):
    request: list[tuple[str, str]]


class AnalyzeBody(BaseModel):
    mode: str = SubsetMode.ARBITRARY.value
    limit: int = DEFAULT_LIMIT


class _HttpError(Exception):
    """Internal: carries a status code and JSON payload to the handler."""

    def __init__(self, status: int, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.payload = {"error": message, **extra}


def create_app(policy_dir: Path | str | None = None) -> FastAPI:
    store = PolicyStore()
    if policy_dir is not None:
        load_policy_dir(store, Path(policy_dir))

    app = FastAPI(title="ptacl policy decision point")
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def _malformed_body(_request: HttpRequest, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    @app.exception_handler(_HttpError)
    async def _http_error(_request: HttpRequest, exc: _HttpError):
        return JSONResponse(status_code=exc.status, content=exc.payload)

    def _get_or_404(policy_id: str) -> PolicyRecord:
        record = store.get(policy_id)
        if record is None:
            raise _HttpError(404, f"unknown policy id {policy_id!r}")
        return record

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "policies": len(store.ids())}

    @app.post("/v1/policies", status_code=201)
    def register_policy(body: RegisterBody):
        try:
            store.register(body.id, body.source)
        except DuplicatePolicyError:
            raise _HttpError(409, f"policy id {body.id!r} already registered")
        except ParseError as exc:
            raise _HttpError(
                400,
                f"policy does not parse: {exc.message}",
                span=[exc.span.start, exc.span.end],
            )
        return {"id": body.id}

    @app.get("/v1/policies/{policy_id}")
    def get_policy(policy_id: str):
        record = _get_or_404(policy_id)
        return {"id": record.policy_id, "source": record.source}

    @app.post("/v1/policies/{policy_id}/evaluate")
    def evaluate_policy(policy_id: str, body: EvaluateBody):
        record = _get_or_404(policy_id)
        try:
            request = Request(frozenset(body.request))
        except (TypeError, ValueError) as exc:
            raise _HttpError(400, f"malformed request: {exc}")
        decisions = eval_policy(record.policy, request)
        return {
            "decisions": decision_set_payload(decisions),
            "resolved": resolve(decisions).value,
        }

    @app.post("/v1/policies/{policy_id}/analyze")
    def analyze_policy(policy_id: str, body: AnalyzeBody):
        record = _get_or_404(policy_id)
        try:
            SubsetMode(body.mode)
        except ValueError:
            raise _HttpError(400, f"unknown mode {body.mode!r}")
        try:
            guarantee = classify_policy_guarantee(record.policy, limit=body.limit)
        except BudgetExceededError as exc:
            raise _HttpError(422, f"analysis budget exceeded: {exc}", required=exc.required)
        return {
            "mode": body.mode,
            "class": {
                "set_inclusion_all_or_nothing": guarantee.set_inclusion_all_or_nothing,
                "set_inclusion_arbitrary": guarantee.set_inclusion_arbitrary,
                "conclusive_stability": guarantee.conclusive_stability,
                "allow_stability": guarantee.allow_stability,
            },
            "unconditional": list(guarantee.unconditional),
            "reasons": list(guarantee.reasons),
        }

    return app
