"""Session state machine: event application and invariant checking.

Sessions are immutable; ``advance`` returns a new snapshot with the
event appended and the status transitioned. Transition rules:

* buyer acceptance text closes the deal at the standing seller offer
  (the list price counts as the standing offer until the agent quotes one)
* an agent DEAL decision closes at the buyer's accepted offer
* a non-accepting buyer message arriving after the agent has used its
  turn budget expires the session
* buyer abandonment expires the session
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Union

from .models import (
    Action,
    AlternationViolation,
    Decision,
    Session,
    SessionStatus,
    Speaker,
    TerminalSession,
    Utterance,
)

DEFAULT_TURN_CAP = 10

_ACCEPTANCE_PATTERNS = [
    r"\bdeal\b",
    r"\bi(?:'| wi)?ll take it\b",
    r"\bsold\b",
    r"\bi accept\b",
    r"\bagreed\b",
    r"\btake my money\b",
]
_ACCEPTANCE_RE = re.compile("|".join(_ACCEPTANCE_PATTERNS), re.IGNORECASE)
_NEGATION_RE = re.compile(r"\b(?:no|not|can'?t|won'?t|never)\b[^.!?]{0,24}$")


def is_acceptance(text: str) -> bool:
    """Whether a buyer message accepts the standing offer.

    A message that states any number is treated as a fresh offer, not an
    acceptance, so "deal at 180?" goes back through the planner.
    """
    if any(ch.isdigit() for ch in text):
        return False
    match = _ACCEPTANCE_RE.search(text)
    if not match:
        return False
    return not _NEGATION_RE.search(text[: match.start()].lower())


@dataclass(frozen=True)
class BuyerMessage:
    text: str


@dataclass(frozen=True)
class BuyerAbandon:
    """Buyer walked away; the session expires without a closing utterance."""


@dataclass(frozen=True)
class AgentTurn:
    decision: Decision
    text: str


Event = Union[BuyerMessage, BuyerAbandon, AgentTurn]


def _clamp_deal_price(session: Session, raw: int) -> int:
    product = session.product
    return max(product.bottom_price, min(product.list_price, raw))


def advance(session: Session, event: Event, turn_cap: int = DEFAULT_TURN_CAP) -> Session:
    """Apply one event and return the next session snapshot."""
    if session.status is not SessionStatus.OPEN:
        raise TerminalSession(f"session {session.id} is {session.status.value}")

    if isinstance(event, (BuyerMessage, BuyerAbandon)):
        if session.last_speaker is Speaker.BUYER:
            raise AlternationViolation("two consecutive buyer events")
    elif isinstance(event, AgentTurn):
        if session.last_speaker is not Speaker.BUYER:
            raise AlternationViolation("agent may only reply to a buyer utterance")
    else:
        raise TypeError(f"unknown event type: {type(event).__name__}")

    if isinstance(event, BuyerAbandon):
        return replace(session, status=SessionStatus.EXPIRED)

    turn = len(session.utterances)
    if isinstance(event, BuyerMessage):
        utterance = Utterance(speaker=Speaker.BUYER, text=event.text, turn=turn, ts=turn)
        updated = replace(session, utterances=session.utterances + (utterance,))
        if is_acceptance(event.text):
            price = _clamp_deal_price(updated, updated.standing_offer())
            return replace(updated, status=SessionStatus.DEAL, deal_price=price)
        if session.agent_turns >= turn_cap:
            return replace(updated, status=SessionStatus.EXPIRED)
        return updated

    decision = event.decision
    utterance = Utterance(speaker=Speaker.SELLER_AGENT, text=event.text, turn=turn, ts=turn)
    seller_offers = session.seller_offers
    buyer_offers = session.buyer_offers
    if decision.buyer_price_seen is not None:
        buyer_offers = buyer_offers + (decision.buyer_price_seen,)
    if decision.seller_price is not None:
        seller_offers = seller_offers + (decision.seller_price,)
    updated = replace(
        session,
        utterances=session.utterances + (utterance,),
        decisions=session.decisions + (decision,),
        seller_offers=seller_offers,
        buyer_offers=buyer_offers,
    )
    if decision.action is Action.DEAL:
        raw = (
            decision.buyer_price_seen
            if decision.buyer_price_seen is not None
            else updated.standing_offer()
        )
        return replace(
            updated,
            status=SessionStatus.DEAL,
            deal_price=_clamp_deal_price(updated, raw),
        )
    return updated


def validate(session: Session) -> list[str]:
    """Check every session invariant; an empty list means the snapshot is sound."""
    violations: list[str] = []
    product = session.product

    if (session.status is SessionStatus.DEAL) != (session.deal_price is not None):
        violations.append("status/deal_price consistency")
    if session.deal_price is not None:
        if not product.bottom_price <= session.deal_price <= product.list_price:
            violations.append("deal_price outside [bottom_price, list_price]")

    for i, offer in enumerate(session.seller_offers):
        if offer < product.bottom_price:
            violations.append(f"seller offer below bottom price at index {i}")
        if i > 0 and offer > session.seller_offers[i - 1]:
            violations.append(f"seller offers non-increasing at index {i}")

    for i, utterance in enumerate(session.utterances):
        expected = Speaker.BUYER if i % 2 == 0 else Speaker.SELLER_AGENT
        if utterance.speaker is not expected:
            violations.append(f"speaker alternation at index {i}")
        if utterance.turn != i:
            violations.append(f"turn numbering at index {i}")

    for i, decision in enumerate(session.decisions):
        for problem in decision.check(product.bottom_price):
            violations.append(f"decision {i}: {problem}")
        if i > 0 and session.decisions[i - 1].action is Action.DEAL:
            violations.append(f"decision {i} follows a DEAL decision")

    return violations
