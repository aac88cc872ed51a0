"""HTTP session service.

JSON API under /api/v1 for creating sessions, posting buyer messages
(which run the full agent pipeline and return the reply plus the
decision trace), and fetching session snapshots. Sessions persist as
append-only event logs and survive restarts. When a built playground
bundle is present it is served at /.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .backend import backend_from_env
from .engine import Engine, EngineConfig
from .models import Decision, Product, generate_id, session_to_dict
from .money import format_money, from_units
from .store import SessionStore


@dataclass
class ServiceConfig:
    data_dir: str = "./data"
    engine: EngineConfig = field(default_factory=EngineConfig)
    static_dir: Optional[str] = None


class ProductPayload(BaseModel):
    title: str
    description: str = ""
    category: str = "general"
    list_price: float = Field(description="major currency units")
    bottom_price: float = Field(description="major currency units")


class CreateSessionPayload(BaseModel):
    product: ProductPayload
    rng_seed: Optional[int] = None
    config: Optional[dict[str, Any]] = None


class BuyerMessagePayload(BaseModel):
    text: str = Field(min_length=1)


def error_response(status: int, code: str, message: str, detail: Any = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: Any = None):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def trace_payload(decision: Decision) -> dict[str, Any]:
    return {
        "action": decision.action.value,
        "skill": decision.skill.value if decision.skill else None,
        "seller_price": (
            format_money(decision.seller_price)
            if decision.seller_price is not None
            else None
        ),
        "buyer_price_seen": (
            format_money(decision.buyer_price_seen)
            if decision.buyer_price_seen is not None
            else None
        ),
        "anticipated_buyer_moves": list(decision.anticipated_buyer_moves),
        "rationale": list(decision.rationale),
    }


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    store = SessionStore(config.data_dir, turn_cap=config.engine.t_max)
    planner_backend = backend_from_env()
    generator_backend = backend_from_env()
    default_engine = Engine(
        config.engine,
        planner_backend=planner_backend,
        generator_backend=generator_backend,
    )
    engines: dict[str, Engine] = {}

    app = FastAPI(title="haggle session service")

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return error_response(exc.status, exc.code, exc.message, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError) -> JSONResponse:
        return error_response(422, "malformed_request", "request body failed validation",
                              exc.errors())

    def engine_for(session_id: str) -> Engine:
        return engines.get(session_id, default_engine)

    @app.get("/api/v1/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(payload: CreateSessionPayload) -> dict[str, str]:
        p = payload.product
        try:
            product = Product(
                id=generate_id("p"),
                title=p.title,
                description=p.description,
                category=p.category,
                list_price=from_units(p.list_price),
                bottom_price=from_units(p.bottom_price),
            )
        except ValueError as exc:
            raise ApiError(400, "invalid_product", str(exc))
        seed = payload.rng_seed if payload.rng_seed is not None else random.getrandbits(63)
        session = store.create(product, rng_seed=seed)
        if payload.config:
            overrides = dict(payload.config)
            overrides.pop("t_max", None)  # turn cap is service-global (replay uses it)
            merged = {
                "planner": overrides.get("planner", {}),
                "sampler": overrides.get("sampler", {}),
                **{
                    k: v
                    for k, v in overrides.items()
                    if k in ("use_price_extractor", "max_reply_chars")
                },
            }
            try:
                engine_config = EngineConfig.from_dict(merged)
            except (TypeError, ValueError) as exc:
                raise ApiError(400, "invalid_config", str(exc))
            engines[session.id] = Engine(
                engine_config,
                planner_backend=planner_backend,
                generator_backend=generator_backend,
            )
        return {"session_id": session.id}

    @app.post("/api/v1/sessions/{session_id}/messages")
    def post_message(session_id: str, payload: BuyerMessagePayload) -> dict[str, Any]:
        with store.lock(session_id):
            session = store.get(session_id)
            if session is None:
                raise ApiError(404, "unknown_session", f"no session {session_id}")
            if session.status.value != "open":
                raise ApiError(
                    409, "terminal_session",
                    f"session is {session.status.value}",
                    {"status": session.status.value},
                )
            session = store.record_buyer(session, payload.text)
            reply = None
            trace = None
            if session.status.value == "open":
                advanced, decision, text = engine_for(session_id).agent_turn(session)
                session = store.record_agent(advanced, decision, text)
                reply = text
                trace = trace_payload(decision)
            return {
                "reply": reply,
                "decision_trace": trace,
                "status": session.status.value,
                "deal_price": (
                    format_money(session.deal_price)
                    if session.deal_price is not None
                    else None
                ),
            }

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        session = store.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"no session {session_id}")
        return session_to_dict(session)

    static_dir = config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="playground")

    return app
