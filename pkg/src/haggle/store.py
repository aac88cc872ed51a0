"""Append-only JSONL event persistence for live sessions.

One file per session under <data_dir>/sessions/. The log carries raw
events (creation, buyer text, agent decision + text); replaying them
through the state machine rebuilds the exact snapshot, so a restarted
process serves pre-restart sessions unchanged.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterable, Optional

from .models import (
    Decision,
    Product,
    Session,
    decision_from_dict,
    decision_to_dict,
    new_session,
    product_from_dict,
    product_to_dict,
)
from .session import AgentTurn, BuyerAbandon, BuyerMessage, advance


class SessionStore:
    def __init__(self, data_dir: str | Path, turn_cap: int = 10):
        self.root = Path(data_dir) / "sessions"
        self.root.mkdir(parents=True, exist_ok=True)
        self.turn_cap = turn_cap
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.root.glob("*.jsonl")):
            session = self._replay(path)
            if session is not None:
                self._sessions[session.id] = session

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def _replay(self, path: Path) -> Optional[Session]:
        session: Optional[Session] = None
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError:
                break  # torn trailing write; keep everything before it
            kind = event["event"]
            if kind == "created":
                session = new_session(
                    product_from_dict(event["product"]),
                    rng_seed=int(event["rng_seed"]),
                    session_id=event["id"],
                )
            elif session is None:
                return None
            elif kind == "buyer":
                session = advance(session, BuyerMessage(event["text"]), self.turn_cap)
            elif kind == "abandon":
                session = advance(session, BuyerAbandon(), self.turn_cap)
            elif kind == "agent":
                session = advance(
                    session,
                    AgentTurn(decision_from_dict(event["decision"]), event["text"]),
                    self.turn_cap,
                )
        return session

    def _append(self, session_id: str, events: Iterable[dict]) -> None:
        with open(self._path(session_id), "a", encoding="utf-8") as handle:
            for event in events:
                handle.write(json.dumps(event, sort_keys=True) + "\n")

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, product: Product, rng_seed: int) -> Session:
        session = new_session(product, rng_seed=rng_seed)
        self._append(
            session.id,
            [
                {
                    "event": "created",
                    "id": session.id,
                    "product": product_to_dict(product),
                    "rng_seed": rng_seed,
                }
            ],
        )
        self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[Session]:
        return self._sessions.get(session_id)

    def record_buyer(self, session: Session, text: str) -> Session:
        advanced = advance(session, BuyerMessage(text), self.turn_cap)
        self._append(session.id, [{"event": "buyer", "text": text}])
        self._sessions[session.id] = advanced
        return advanced

    def record_agent(self, session: Session, decision: Decision, text: str) -> Session:
        # The caller already advanced the session through the engine; we
        # persist the event and trust the snapshot it derived.
        self._append(
            session.id,
            [{"event": "agent", "decision": decision_to_dict(decision), "text": text}],
        )
        self._sessions[session.id] = session
        return session

    def ids(self) -> list[str]:
        return sorted(self._sessions)
