"""HTTP session service: a decision maker answers elicitation queries over
the wire instead of through an in-process oracle.

A session is persisted as its replayable essence — instance reference,
run config, and the answers recorded so far.  Every state transition
re-runs the interactive loop against a scripted oracle that replays those
answers and suspends (``NeedsAnswer``) at the first unanswered query, so a
restarted service rebuilds every session deterministically from disk.
"""

import json
import threading
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import TypeAdapter

from . import schemas
from .core import Answer, QueryContext, RigaConfig, RunTrace, riga_run
from .prefs import CostVector, Family, Orientation
from .problems import CatalogInstance, Instance, Solution, gen_knapsack, gen_tsp

MMR_FLOOR = 1e-12

_INSTANCE_ADAPTER: TypeAdapter = TypeAdapter(schemas.InstanceSpec)


class SessionState(str, Enum):
    AWAITING_ANSWER = "AwaitingAnswer"
    COMPUTING = "Computing"
    FINISHED = "Finished"
    FAILED = "Failed"


class NeedsAnswer(Exception):
    """Raised by the wire oracle when the recorded answers run out: the run
    suspends at this query until the decision maker responds."""

    def __init__(self, a: CostVector, b: CostVector, context: QueryContext | None):
        super().__init__("the decision maker must answer a query")
        self.a = a
        self.b = b
        self.context = context


class ApiError(Exception):
    """An HTTP error with the service's JSON error shape."""

    def __init__(self, status_code: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message
        self.field = field

    def body(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.field is not None:
            out["field"] = self.field
        return out


class ScriptedOracle:
    """Replays recorded answers in order; suspends when they run out."""

    def __init__(self, script: list[Answer]):
        self.script = list(script)
        self.asked = 0
        self.context: QueryContext | None = None

    def observe_query(self, context: QueryContext) -> None:
        self.context = context

    def answer(self, a: CostVector, b: CostVector) -> Answer:
        index = self.asked
        self.asked += 1
        if index < len(self.script):
            return self.script[index]
        raise NeedsAnswer(a, b, self.context)


@dataclass(frozen=True)
class Snapshot:
    """Immutable view of where a session's run stands; reads never lock."""

    state: SessionState
    pending: NeedsAnswer | None = None
    solution: Solution | None = None
    trace: RunTrace | None = None

    def __post_init__(self) -> None:
        has_query = self.pending is not None
        if has_query != (self.state is SessionState.AWAITING_ANSWER):
            raise ValueError("exactly the AwaitingAnswer state carries a query")


@dataclass
class Session:
    id: str
    config: RigaConfig
    instance: Instance
    instance_data: dict
    answers: list[Answer]
    snapshot: Snapshot
    lock: threading.Lock = field(default_factory=threading.Lock)


def compute_snapshot(
    instance: Instance, config: RigaConfig, answers: list[Answer]
) -> Snapshot:
    """Replay the recorded answers; suspend at the next query or finish."""
    oracle = ScriptedOracle(answers)
    try:
        solution, trace = riga_run(instance, config, oracle)
    except NeedsAnswer as pending:
        return Snapshot(SessionState.AWAITING_ANSWER, pending=pending)
    state = (
        SessionState.FAILED
        if any(not record.accepted for record in trace.queries)
        else SessionState.FINISHED
    )
    return Snapshot(state, solution=solution, trace=trace)


def build_instance(spec) -> Instance:
    if spec.problem == "knapsack":
        return gen_knapsack(spec.size, spec.n, spec.seed)
    if spec.problem == "tsp":
        return gen_tsp(spec.size, spec.n, spec.seed)
    return CatalogInstance(
        tuple(CostVector(tuple(option)) for option in spec.options),
        Orientation(spec.orientation),
    )


class SessionStore:
    """In-memory sessions with optional JSON persistence per session."""

    def __init__(self, state_dir: str | Path | None = None):
        self._sessions: dict[str, Session] = {}
        self._dir = None if state_dir is None else Path(state_dir)
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._dir.glob("*.json")):
                session = self._rebuild(json.loads(path.read_text()))
                self._sessions[session.id] = session

    def _rebuild(self, record: dict) -> Session:
        config = RigaConfig.from_json(record["config"])
        spec = _INSTANCE_ADAPTER.validate_python(record["instance"])
        instance = build_instance(spec)
        answers = [Answer(a) for a in record["answers"]]
        return Session(
            id=record["id"],
            config=config,
            instance=instance,
            instance_data=record["instance"],
            answers=answers,
            snapshot=compute_snapshot(instance, config, answers),
        )

    def _persist(self, session: Session) -> None:
        if self._dir is None:
            return
        record = {
            "id": session.id,
            "config": session.config.to_json(),
            "instance": session.instance_data,
            "answers": [answer.value for answer in session.answers],
        }
        path = self._dir / f"{session.id}.json"
        scratch = path.with_suffix(".tmp")
        scratch.write_text(json.dumps(record, indent=2))
        scratch.replace(path)

    def create(self, config: RigaConfig, instance: Instance, instance_data: dict) -> Session:
        session = Session(
            id=uuid.uuid4().hex,
            config=config,
            instance=instance,
            instance_data=instance_data,
            answers=[],
            snapshot=compute_snapshot(instance, config, []),
        )
        self._sessions[session.id] = session
        self._persist(session)
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise ApiError(404, "not_found", f"no session {session_id!r}")
        return session

    def apply_answer(self, session: Session, choice: str, query_index: int | None) -> Session:
        with session.lock:
            state = session.snapshot.state
            if state is not SessionState.AWAITING_ANSWER:
                raise ApiError(
                    409, "conflict", f"session is {state.value}; no query is pending"
                )
            pending_index = len(session.answers)
            if query_index is not None and query_index != pending_index:
                raise ApiError(
                    409,
                    "stale_query",
                    f"the pending query has index {pending_index}, not {query_index}",
                    field="query_index",
                )
            session.answers.append(Answer(choice))
            self._persist(session)
            session.snapshot = Snapshot(SessionState.COMPUTING)
            session.snapshot = compute_snapshot(
                session.instance, session.config, session.answers
            )
        return session


# ---------------------------------------------------------------------------
# Views


def _progress(session: Session) -> dict:
    snapshot = session.snapshot
    asked = len(session.answers)
    total = session.config.generations
    if snapshot.pending is not None and snapshot.pending.context is not None:
        context = snapshot.pending.context
        ratio = (
            context.mmr / context.mmr_start if context.mmr_start > MMR_FLOOR else 0.0
        )
        return {
            "generation": context.generation,
            "total_generations": total,
            "queries_asked": asked,
            "normalized_mmr": ratio,
        }
    if snapshot.trace is not None and snapshot.trace.generations:
        last = snapshot.trace.generations[-1]
        ratio = last.mmr_after / last.mmr_before if last.mmr_before > MMR_FLOOR else 0.0
        return {
            "generation": last.index,
            "total_generations": total,
            "queries_asked": asked,
            "normalized_mmr": ratio,
        }
    return {
        "generation": 0,
        "total_generations": total,
        "queries_asked": asked,
        "normalized_mmr": None,
    }


def _session_view(session: Session) -> dict:
    trace = session.snapshot.trace
    return {
        "id": session.id,
        "state": session.snapshot.state.value,
        "problem": session.instance.problem,
        "n": session.instance.n,
        "size": session.instance.size,
        "family": session.config.family.value,
        "orientation": session.config.orientation.value,
        "config": session.config.to_json(),
        "progress": _progress(session),
        "warnings": [] if trace is None else list(trace.warnings),
    }


def _objective_context(pending: NeedsAnswer) -> list[dict]:
    pool = pending.context.pool if pending.context is not None else ()
    vectors = [*pool, pending.a, pending.b]
    n = pending.a.n
    return [
        {
            "label": f"objective {k + 1}",
            "min": min(v.values[k] for v in vectors),
            "max": max(v.values[k] for v in vectors),
        }
        for k in range(n)
    ]


def _query_view(session: Session) -> dict:
    pending = session.snapshot.pending
    assert pending is not None
    return {
        "query_index": len(session.answers),
        "a": list(pending.a.values),
        "b": list(pending.b.values),
        "objectives": _objective_context(pending),
        "progress": _progress(session),
    }


# ---------------------------------------------------------------------------
# Application


def build_app(state_dir: str | Path | None = None) -> FastAPI:
    """The session API; sessions persist under ``state_dir`` when given."""
    store = SessionStore(state_dir)
    app = FastAPI(title="rigabench session service")
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(status_code=exc.status_code, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc: RequestValidationError):
        errors = exc.errors()
        first = errors[0] if errors else {}
        location = [str(part) for part in first.get("loc", ()) if part != "body"]
        body = {
            "code": "invalid_request",
            "message": str(first.get("msg", "invalid request")),
        }
        if location:
            body["field"] = ".".join(location)
        return JSONResponse(status_code=422, content=body)

    @app.get("/healthz", response_model=schemas.HealthOut)
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", response_model=schemas.SessionOut, status_code=201)
    def create_session(request: schemas.CreateSessionRequest):
        try:
            instance = build_instance(request.instance)
        except ValueError as exc:
            raise ApiError(400, "invalid_instance", str(exc), field="instance")
        try:
            config = RigaConfig.default_for(
                instance, Family(request.config.family), **request.config.overrides()
            )
        except ValueError as exc:
            raise ApiError(400, "invalid_config", str(exc), field="config")
        session = store.create(config, instance, request.instance.model_dump())
        return _session_view(session)

    @app.get("/sessions/{session_id}", response_model=schemas.SessionOut)
    def get_session(session_id: str):
        return _session_view(store.get(session_id))

    @app.get(
        "/sessions/{session_id}/query",
        response_model=schemas.QueryOut | schemas.RecommendationPointerOut,
    )
    def get_query(session_id: str):
        session = store.get(session_id)
        state = session.snapshot.state
        if state is SessionState.FINISHED:
            return {
                "state": state.value,
                "recommendation": f"/sessions/{session.id}/recommendation",
            }
        if state is not SessionState.AWAITING_ANSWER:
            raise ApiError(409, "conflict", f"session is {state.value}; no query")
        return _query_view(session)

    @app.post("/sessions/{session_id}/answer", response_model=schemas.SessionOut)
    def post_answer(session_id: str, body: schemas.AnswerIn):
        session = store.get(session_id)
        return _session_view(store.apply_answer(session, body.choice, body.query_index))

    @app.get(
        "/sessions/{session_id}/recommendation",
        response_model=schemas.RecommendationOut,
    )
    def get_recommendation(session_id: str):
        session = store.get(session_id)
        snapshot = session.snapshot
        if snapshot.state is not SessionState.FINISHED:
            raise ApiError(
                409, "not_finished", f"session is {snapshot.state.value}, not Finished"
            )
        assert snapshot.solution is not None and snapshot.trace is not None
        return {
            "solution": {
                "encoding": list(snapshot.solution.encoding),
                "cost": list(snapshot.solution.cost.values),
            },
            "trace": snapshot.trace.to_json(),
        }

    return app


app = build_app()
