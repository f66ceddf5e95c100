"""HTTP session service over the dialog engine.

Sessions live in memory and expire after an idle timeout; wish lists are
per-user and survive restarts through an append-only JSON-lines journal.
The user id is a bare ``X-User-Id`` header, which is bookkeeping, not a
security boundary.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import secrets
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from fastapi import FastAPI, Header, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .catalog import UnknownCategoryError
from .dialog import DialogManager, DialogState
from .engine import RundownEngine
from .selection import NoContentError, derive_seed, plan_to_dict

logger = logging.getLogger(__name__)

_MAX_SEED = (1 << 64) - 1
ENV_PREFIX = "TRENDCAST_"


@dataclass
class ServiceConfig:
    catalog_path: str | None = None
    trends_path: str | None = None
    templates_path: str | None = None
    listen_addr: str = "127.0.0.1:8080"
    session_timeout_minutes: float = 30.0
    journal_path: str | None = None


def load_config(
    path: str | Path | None = None, env: dict[str, str] | None = None
) -> ServiceConfig:
    """Config file first, then TRENDCAST_* environment overrides."""
    values: dict[str, Any] = {}
    if path is not None:
        data = json.loads(Path(path).read_text("utf-8"))
        if not isinstance(data, dict):
            raise ValueError("config root must be a JSON object")
        values.update(data)
    environ = os.environ if env is None else env
    for key in (
        "catalog_path",
        "trends_path",
        "templates_path",
        "listen_addr",
        "session_timeout_minutes",
        "journal_path",
    ):
        override = environ.get(ENV_PREFIX + key.upper())
        if override is not None:
            values[key] = override
    known = {f for f in ServiceConfig.__dataclass_fields__}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    config = ServiceConfig(**values)
    config.session_timeout_minutes = float(config.session_timeout_minutes)
    return config


class WishlistStore:
    """Per-user wish lists backed by an append-only journal.

    Every accepted bookmark is one JSON line, flushed and fsynced before the
    call returns, so replaying the journal after a crash reconstructs the
    exact in-memory state. A torn final line (killed mid-write) is skipped.
    """

    def __init__(self, journal_path: str | Path | None = None):
        self._path = Path(journal_path) if journal_path else None
        self._items: dict[str, list[str]] = {}
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            self._replay()

    def _replay(self) -> None:
        assert self._path is not None
        for raw in self._path.read_text("utf-8").splitlines():
            raw = raw.strip()
            if not raw:
                continue
            try:
                event = json.loads(raw)
            except json.JSONDecodeError:
                logger.warning("skipping torn journal line in %s", self._path)
                continue
            if event.get("op") == "add":
                self._apply_add(event["user"], event["product"])

    def _apply_add(self, user: str, product_id: str) -> bool:
        items = self._items.setdefault(user, [])
        if product_id in items:
            return False
        items.append(product_id)
        return True

    def add(self, user: str, product_id: str) -> bool:
        """Record a bookmark; returns False if it was already present."""
        with self._lock:
            if not self._apply_add(user, product_id):
                return False
            if self._path is not None:
                line = json.dumps({"op": "add", "user": user, "product": product_id})
                with open(self._path, "a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
                    handle.flush()
                    os.fsync(handle.fileno())
            return True

    def items(self, user: str) -> list[str]:
        with self._lock:
            return list(self._items.get(user, []))


@dataclass
class SessionRecord:
    session_id: str
    user: str
    state: DialogState
    seed: int
    created_at: float
    last_active_at: float
    turn: int = 0
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)


class SessionStore:
    """In-memory sessions with idle expiry; the clock is injectable so
    expiry is testable without sleeping."""

    def __init__(self, timeout_minutes: float, clock: Callable[[], float] = time.time):
        self._timeout = timeout_minutes * 60.0
        self._clock = clock
        self._sessions: dict[str, SessionRecord] = {}

    def create(self, user: str, state: DialogState, seed: int) -> SessionRecord:
        now = self._clock()
        record = SessionRecord(
            session_id=uuid.uuid4().hex,
            user=user,
            state=state,
            seed=seed,
            created_at=now,
            last_active_at=now,
        )
        self._sessions[record.session_id] = record
        return record

    def get(self, session_id: str) -> SessionRecord | None:
        record = self._sessions.get(session_id)
        if record is None:
            return None
        if self._clock() - record.last_active_at > self._timeout:
            del self._sessions[session_id]
            return None
        return record

    def touch(self, record: SessionRecord) -> None:
        record.last_active_at = self._clock()


class CreateSessionRequest(BaseModel):
    category: str | None = None
    seed: int | None = Field(default=None, ge=0, le=_MAX_SEED)


class CreateSessionResponse(BaseModel):
    session_id: str
    reply: str
    seed: int
    phase: str


class MessageRequest(BaseModel):
    text: str


class MessageResponse(BaseModel):
    reply: str
    phase: str
    wishlist: list[str]


class WishlistItem(BaseModel):
    product_id: str
    name: str
    price: str


class WishlistResponse(BaseModel):
    items: list[WishlistItem]


class GenerateRequest(BaseModel):
    category: str
    seed: int = Field(ge=0, le=_MAX_SEED)


class GenerateResponse(BaseModel):
    text: str
    plan: dict[str, Any]


def create_app(
    config: ServiceConfig | None = None,
    *,
    engine: RundownEngine | None = None,
    clock: Callable[[], float] = time.time,
) -> FastAPI:
    """Build the service app. An engine may be injected directly (tests);
    otherwise it is loaded from the config paths."""
    config = config or ServiceConfig()
    if engine is None and config.catalog_path and config.trends_path:
        engine = RundownEngine.from_paths(
            config.catalog_path, config.trends_path, config.templates_path
        )

    app = FastAPI(title="trendcast", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.engine = engine
    app.state.sessions = SessionStore(config.session_timeout_minutes, clock)
    app.state.wishlists = WishlistStore(config.journal_path)

    def current_manager() -> DialogManager:
        current: RundownEngine | None = app.state.engine
        if current is None:
            raise HTTPException(status_code=503, detail="catalog not loaded")
        return DialogManager(current)

    @app.get("/health")
    def health() -> dict[str, Any]:
        return {"status": "ok", "catalog_loaded": app.state.engine is not None}

    @app.get("/categories")
    def categories() -> dict[str, list[str]]:
        manager = current_manager()
        return {"categories": manager.engine.categories()}

    @app.post("/sessions", status_code=201)
    def create_session(
        body: CreateSessionRequest,
        user_id: str = Header(default="anonymous", alias="X-User-Id"),
    ) -> CreateSessionResponse:
        manager = current_manager()
        if body.category is not None and not manager.engine.catalog.has_category(body.category):
            raise HTTPException(status_code=400, detail=f"unknown category {body.category!r}")
        seed = body.seed if body.seed is not None else secrets.randbits(64)
        # Session wishlists start empty so a scripted session replays
        # identically regardless of the user's history; the persisted list
        # stays visible through GET /users/{uid}/wishlist.
        state, reply = manager.activate(body.category)
        record = app.state.sessions.create(user_id, state, seed)
        return CreateSessionResponse(
            session_id=record.session_id, reply=reply, seed=seed, phase=state.phase.value
        )

    @app.post("/sessions/{session_id}/messages")
    async def post_message(session_id: str, body: MessageRequest) -> MessageResponse:
        manager = current_manager()
        record = app.state.sessions.get(session_id)
        if record is None:
            raise HTTPException(status_code=404, detail="unknown or expired session")
        async with record.lock:
            record.turn += 1
            turn_seed = derive_seed(record.seed, record.turn)
            before = record.state.wishlist
            state, reply = manager.respond(record.state, body.text, seed=turn_seed)
            for product_id in state.wishlist:
                if product_id not in before:
                    app.state.wishlists.add(record.user, product_id)
            record.state = state
            app.state.sessions.touch(record)
            return MessageResponse(
                reply=reply, phase=state.phase.value, wishlist=list(state.wishlist)
            )

    @app.get("/users/{user_id}/wishlist")
    def get_wishlist(user_id: str) -> WishlistResponse:
        manager = current_manager()
        catalog = manager.engine.catalog
        items = [
            WishlistItem(
                product_id=pid,
                name=catalog.get_product(pid).display_name,
                price=catalog.get_product(pid).current_price.formatted(),
            )
            for pid in app.state.wishlists.items(user_id)
            if pid in catalog
        ]
        return WishlistResponse(items=items)

    @app.post("/generate")
    def generate(body: GenerateRequest) -> GenerateResponse:
        manager = current_manager()
        try:
            rundown = manager.engine.generate(body.category, body.seed)
        except UnknownCategoryError:
            raise HTTPException(status_code=400, detail=f"unknown category {body.category!r}")
        except NoContentError:
            raise HTTPException(
                status_code=422, detail=f"no trends available for {body.category!r}"
            )
        return GenerateResponse(text=rundown.text, plan=plan_to_dict(rundown.plan))

    @app.post("/admin/reload")
    def reload() -> dict[str, Any]:
        cfg: ServiceConfig = app.state.config
        if not (cfg.catalog_path and cfg.trends_path):
            raise HTTPException(status_code=409, detail="service has no file-based config")
        fresh = RundownEngine.from_paths(cfg.catalog_path, cfg.trends_path, cfg.templates_path)
        app.state.engine = fresh
        return {"reloaded": True, "problems": fresh.validate()}

    return app


def run(config: ServiceConfig) -> None:
    """Blocking uvicorn server on the configured listen address."""
    import uvicorn

    host, _, port = config.listen_addr.rpartition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port), log_level="info")
