"""Parameterized scripted buyer for seeded self-play.

The buyer accepts once the standing seller price falls inside its
willingness, otherwise offers along a geometric schedule from its target
toward its walkaway price, phrased alternately as absolute amounts,
percent discounts, or amount-off requests so both extractor paths get
exercised. Offers are constructed so the deterministic extractor
recovers the gold value exactly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Optional

from .models import Session
from .money import Money, format_money, percent_discount

#: Chance of a non-committal stalling line on turns after the first;
#: keeps the planner's initiate-a-price branch reachable in self-play.
STALL_PROB = 0.08

BuyerTemplates = dict[str, list[str]]


@dataclass(frozen=True)
class BuyerProfile:
    target_price: Money
    walkaway_price: Money  # maximum the buyer will ever pay
    patience: int  # max buyer turns before abandoning
    concession_rate: float
    question_prob: float
    greeting_prob: float
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.target_price > self.walkaway_price:
            raise ValueError("target_price must not exceed walkaway_price")
        if self.patience <= 0:
            raise ValueError("patience must be positive")
        if not 0 < self.concession_rate < 1:
            raise ValueError("concession_rate must be in (0, 1)")


def willingness(profile: BuyerProfile, k: int) -> Money:
    """Maximum the buyer would pay at turn k; target at k=0, walkaway in the limit."""
    if k < 0:
        raise ValueError("turn index must be non-negative")
    span = profile.walkaway_price - profile.target_price
    raised = Decimal(span) * (1 - Decimal(str(profile.concession_rate)) ** k)
    return profile.target_price + int(raised)


@dataclass(frozen=True)
class BuyerStep:
    kind: str  # offer | question | greeting | stall | accept | abandon
    text: str = ""
    offer: Optional[Money] = None  # gold value for offer steps


def load_default_buyer_templates() -> BuyerTemplates:
    text = resources.files("haggle.data").joinpath("buyer_templates.json").read_text("utf-8")
    return json.loads(text)


def load_buyer_templates(path: str | Path) -> BuyerTemplates:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _floor_whole(minor: Money) -> Money:
    return (minor // 100) * 100


class BuyerSimulator:
    """Deterministic buyer: same profile and seed replay the same transcript."""

    def __init__(self, profile: BuyerProfile, templates: Optional[BuyerTemplates] = None):
        self.profile = profile
        self.templates = templates or load_default_buyer_templates()
        self.rng = random.Random(profile.rng_seed)
        self.turns_taken = 0

    def _pick(self, key: str) -> str:
        return self.rng.choice(self.templates[key])

    def step(self, session: Session) -> BuyerStep:
        profile = self.profile
        k = self.turns_taken
        standing = session.standing_offer()
        limit = max(profile.target_price, willingness(profile, k))

        if standing <= limit:
            self.turns_taken += 1
            return BuyerStep(kind="accept", text=self._pick("ACCEPT"))
        if k >= profile.patience:
            return BuyerStep(kind="abandon")

        self.turns_taken += 1
        if k == 0 and self.rng.random() < profile.greeting_prob:
            return BuyerStep(kind="greeting", text=self._pick("GREETING"))
        if k >= 1 and self.rng.random() < STALL_PROB:
            return BuyerStep(kind="stall", text=self._pick("STALL"))
        if self.rng.random() < profile.question_prob:
            return BuyerStep(kind="question", text=self._pick("QUESTION"))
        return self._offer_step(k, standing)

    def _offer_step(self, k: int, standing: Money) -> BuyerStep:
        profile = self.profile
        target = _floor_whole(willingness(profile, k))
        offer = min(max(target, 100), profile.walkaway_price)

        style = self.rng.random()
        if style < 0.3 and standing > offer:
            # percent phrasing: the spoken percent defines the gold offer
            percent = round((1 - offer / standing) * 100)
            percent = min(99, max(1, percent))
            resolved = percent_discount(standing, Decimal(percent))
            if 0 < resolved <= profile.walkaway_price:
                text = self._pick("OFFER.PERCENT").replace("{{percent}}", str(percent))
                return BuyerStep(kind="offer", text=text, offer=resolved)
        elif style < 0.5 and standing - offer >= 100:
            amount = standing - offer
            text = self._pick("OFFER.AMOUNT_OFF").replace("{{amount}}", format_money(amount))
            return BuyerStep(kind="offer", text=text, offer=offer)
        text = self._pick("OFFER.ABSOLUTE").replace("{{price}}", format_money(offer))
        return BuyerStep(kind="offer", text=text, offer=offer)
