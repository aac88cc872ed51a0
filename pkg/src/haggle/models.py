"""Core domain types shared by every engine module.

These define WHAT the negotiation engine works with: the product under
negotiation, the seven dialogue actions, the seven language skills, the
utterance/decision records, and the session snapshot that threads
through the pipeline. State transitions live in ``haggle.session``.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional

from .money import Money


def generate_id(prefix: str = "s") -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


class Action(str, Enum):
    """The closed set of dialogue actions the agent may take."""

    DEAL = "DEAL"
    PROPOSE = "PROPOSE"
    COUNTER = "COUNTER"
    COUNTER_NOPRICE = "COUNTER-NOPRICE"
    REJECT = "REJECT"
    HELLO = "HELLO"
    ANS = "ANS"


#: Plain-language definition for each action, used verbatim in prompts.
ACTION_DEFINITIONS: dict[Action, str] = {
    Action.DEAL: "Buyer and seller reach a deal",
    Action.PROPOSE: "Initiate a price or a price range for the product.",
    Action.COUNTER: "Propose a new price or a new price range.",
    Action.COUNTER_NOPRICE: (
        "Want to propose a new price but do not specifically mention a new price."
    ),
    Action.REJECT: "There is no room for negotiation. Stick to the bottom price.",
    Action.HELLO: "Say hello or chat randomly.",
    Action.ANS: "Answer buyer questions based on the product information.",
}


class LanguageSkill(str, Enum):
    """Persuasion styles applied on top of a chosen action."""

    EMPHASIS = "EMPHASIS"
    ADDED_VALUE = "ADDED_VALUE"
    EMOTIONAL = "EMOTIONAL"
    COMPARE_MARKET = "COMPARE_MARKET"
    TRANSACTION_GUARANTEE = "TRANSACTION_GUARANTEE"
    CREATE_URGENCY = "CREATE_URGENCY"
    CHAT = "CHAT"


#: Style guidance per skill, used in prompts and template families.
SKILL_DEFINITIONS: dict[LanguageSkill, str] = {
    LanguageSkill.EMPHASIS: (
        "Highlight the cost value, quality or bottom price of the product "
        "to show the rationality of the pricing."
    ),
    LanguageSkill.ADDED_VALUE: (
        "Provide additional value beyond the product, such as gifts, "
        "free shipping, etc."
    ),
    LanguageSkill.EMOTIONAL: (
        "Use humor, expressions, complaints, and identity recognition to "
        "resonate with the other party."
    ),
    LanguageSkill.COMPARE_MARKET: (
        "Compare the product with other products on the market to highlight "
        "the advantages of its own products."
    ),
    LanguageSkill.TRANSACTION_GUARANTEE: (
        "Promise to ensure transaction security and reliability by offering "
        "good after-sales service."
    ),
    LanguageSkill.CREATE_URGENCY: (
        "Create urgency by reminding that the product may sell out soon or "
        "prices may rise shortly."
    ),
    LanguageSkill.CHAT: "Do not use techniques and simply reply to the other party.",
}


class Speaker(str, Enum):
    BUYER = "buyer"
    SELLER_AGENT = "seller_agent"


class SessionStatus(str, Enum):
    OPEN = "open"
    DEAL = "deal"
    EXPIRED = "expired"


class DomainError(Exception):
    """Base class for domain rule violations."""


class AlternationViolation(DomainError):
    pass


class TerminalSession(DomainError):
    pass


@dataclass(frozen=True)
class Product:
    """A listing under negotiation. Prices are minor units."""

    id: str
    title: str
    description: str
    category: str
    list_price: Money
    bottom_price: Money

    def __post_init__(self) -> None:
        if self.list_price <= 0:
            raise ValueError("list_price must be positive")
        if not 0 < self.bottom_price <= self.list_price:
            raise ValueError("bottom_price must be in (0, list_price]")


@dataclass(frozen=True)
class Utterance:
    speaker: Speaker
    text: str
    turn: int
    ts: int  # monotonic per-session event clock, not wall time


@dataclass(frozen=True)
class Decision:
    """One planner output: the action taken and everything behind it."""

    action: Action
    skill: Optional[LanguageSkill]
    seller_price: Optional[Money] = None
    buyer_price_seen: Optional[Money] = None
    rationale: tuple[str, ...] = ()
    anticipated_buyer_moves: tuple[str, ...] = ()

    def check(self, bottom_price: Money) -> list[str]:
        """Return invariant violations for this decision, if any."""
        problems = []
        if self.action in (Action.PROPOSE, Action.COUNTER) and self.seller_price is None:
            problems.append(f"{self.action.value} requires seller_price")
        if self.action in (Action.COUNTER_NOPRICE, Action.HELLO, Action.ANS):
            if self.seller_price is not None:
                problems.append(f"{self.action.value} must not carry seller_price")
        if self.action is Action.REJECT and self.seller_price != bottom_price:
            problems.append("REJECT must quote exactly the bottom price")
        if self.action is not Action.DEAL and self.skill is None:
            problems.append("non-DEAL decisions need a language skill")
        return problems


@dataclass(frozen=True)
class Session:
    """Immutable snapshot of one negotiation.

    ``advance`` in ``haggle.session`` returns a new snapshot; a single
    session's events must be applied serially.
    """

    id: str
    product: Product
    utterances: tuple[Utterance, ...] = ()
    decisions: tuple[Decision, ...] = ()
    seller_offers: tuple[Money, ...] = ()
    buyer_offers: tuple[Money, ...] = ()
    status: SessionStatus = SessionStatus.OPEN
    deal_price: Optional[Money] = None
    rng_seed: int = 0

    @property
    def agent_turns(self) -> int:
        return len(self.decisions)

    @property
    def last_speaker(self) -> Optional[Speaker]:
        return self.utterances[-1].speaker if self.utterances else None

    def standing_offer(self) -> Money:
        """The seller price currently on the table (list price until quoted down)."""
        return self.seller_offers[-1] if self.seller_offers else self.product.list_price


def new_session(product: Product, rng_seed: int, session_id: str | None = None) -> Session:
    return Session(id=session_id or generate_id(), product=product, rng_seed=rng_seed)


# --- transcript serialization -------------------------------------------------
# One JSON object per session: {id, product, utterances[], decisions[],
# status, deal_price, rng_seed}. Offer histories are rebuilt from the
# decision log on load.


def product_to_dict(product: Product) -> dict[str, Any]:
    return {
        "id": product.id,
        "title": product.title,
        "description": product.description,
        "category": product.category,
        "list_price": product.list_price,
        "bottom_price": product.bottom_price,
    }


def product_from_dict(data: dict[str, Any]) -> Product:
    return Product(
        id=data["id"],
        title=data["title"],
        description=data["description"],
        category=data["category"],
        list_price=int(data["list_price"]),
        bottom_price=int(data["bottom_price"]),
    )


def decision_to_dict(decision: Decision) -> dict[str, Any]:
    return {
        "action": decision.action.value,
        "skill": decision.skill.value if decision.skill else None,
        "seller_price": decision.seller_price,
        "buyer_price_seen": decision.buyer_price_seen,
        "rationale": list(decision.rationale),
        "anticipated_buyer_moves": list(decision.anticipated_buyer_moves),
    }


def decision_from_dict(data: dict[str, Any]) -> Decision:
    return Decision(
        action=Action(data["action"]),
        skill=LanguageSkill(data["skill"]) if data.get("skill") else None,
        seller_price=data.get("seller_price"),
        buyer_price_seen=data.get("buyer_price_seen"),
        rationale=tuple(data.get("rationale", ())),
        anticipated_buyer_moves=tuple(data.get("anticipated_buyer_moves", ())),
    )


def session_to_dict(session: Session) -> dict[str, Any]:
    return {
        "id": session.id,
        "product": product_to_dict(session.product),
        "utterances": [
            {"speaker": u.speaker.value, "text": u.text, "turn": u.turn, "ts": u.ts}
            for u in session.utterances
        ],
        "decisions": [decision_to_dict(d) for d in session.decisions],
        "status": session.status.value,
        "deal_price": session.deal_price,
        "rng_seed": session.rng_seed,
    }


def session_from_dict(data: dict[str, Any]) -> Session:
    decisions = tuple(decision_from_dict(d) for d in data.get("decisions", ()))
    seller_offers = tuple(d.seller_price for d in decisions if d.seller_price is not None)
    buyer_offers = tuple(
        d.buyer_price_seen for d in decisions if d.buyer_price_seen is not None
    )
    return Session(
        id=data["id"],
        product=product_from_dict(data["product"]),
        utterances=tuple(
            Utterance(
                speaker=Speaker(u["speaker"]),
                text=u["text"],
                turn=int(u["turn"]),
                ts=int(u.get("ts", u["turn"])),
            )
            for u in data.get("utterances", ())
        ),
        decisions=decisions,
        seller_offers=seller_offers,
        buyer_offers=buyer_offers,
        status=SessionStatus(data["status"]),
        deal_price=data.get("deal_price"),
        rng_seed=int(data.get("rng_seed", 0)),
    )


__all__ = [
    "Action",
    "ACTION_DEFINITIONS",
    "AlternationViolation",
    "Decision",
    "DomainError",
    "LanguageSkill",
    "Money",
    "Product",
    "Session",
    "SessionStatus",
    "SKILL_DEFINITIONS",
    "Speaker",
    "TerminalSession",
    "Utterance",
    "decision_from_dict",
    "decision_to_dict",
    "generate_id",
    "new_session",
    "product_from_dict",
    "product_to_dict",
    "replace",
    "session_from_dict",
    "session_to_dict",
]
