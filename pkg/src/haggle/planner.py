"""Action and skill selection for the seller agent.

Two policies share one decision contract. The rule-based policy is the
deterministic baseline and the fallback whenever a language-model
backend fails; the LLM policy renders the action-selection prompt
(optionally extended with anticipated buyer moves) and decodes the reply
back into the closed action set. Skill choice is a seeded uniform draw
either way.

Rule policy table:

* first-turn greeting -> HELLO
* question -> ANS
* any other no-price opener on the first turn -> HELLO
* no price, no buyer offer yet, past the first turn -> PROPOSE
* no price but offers exist (buyer is stalling) -> COUNTER
* offer at/above the acceptance threshold or the standing offer -> DEAL
* offer below bottom: first lowball -> COUNTER, repeat lowball -> REJECT
* offer in range -> COUNTER, with COUNTER-NOPRICE every third concession
"""

from __future__ import annotations

import dataclasses
import random
import re
from dataclasses import dataclass
from decimal import Decimal
from statistics import median
from typing import Optional, Sequence

from .backend import Backend, BackendFailure, simple_request
from .extraction import NO_PRICE, PriceExtraction
from .models import (
    ACTION_DEFINITIONS,
    Action,
    Decision,
    LanguageSkill,
    Product,
    Session,
    SessionStatus,
    Speaker,
)
from .money import Money, format_money
from .prompts import PromptBundle, render
from .sampling import SamplerConfig, sample_price, update_bounds

ALL_SKILLS: tuple[LanguageSkill, ...] = tuple(LanguageSkill)


class UnparseableAction(Exception):
    pass


@dataclass(frozen=True)
class PlannerConfig:
    use_actions: bool = True
    use_skills: bool = True
    use_bidirectional: bool = True
    accept_threshold_ratio: float = 0.95
    skill_no_repeat: bool = True
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.accept_threshold_ratio <= 1:
            raise ValueError("accept_threshold_ratio must be in (0, 1]")


_QUESTION_WORDS = (
    "do ", "does ", "is ", "are ", "can ", "could ", "will ", "would ",
    "what", "when", "where", "which", "who ", "how ", "why ",
)
_GREETING_RE = re.compile(
    r"\b(?:hi|hello|hey|howdy|good (?:morning|afternoon|evening)|still available)\b",
    re.IGNORECASE,
)


def looks_like_question(text: str) -> bool:
    stripped = text.strip().lower()
    return "?" in stripped or stripped.startswith(_QUESTION_WORDS)


def looks_like_greeting(text: str) -> bool:
    return bool(_GREETING_RE.search(text))


def accept_threshold(product: Product, ratio: float) -> Money:
    """Minor-unit threshold above which the rule policy closes the deal."""
    return int(Decimal(str(ratio)) * product.list_price)


def choose_skill(
    available: Sequence[LanguageSkill],
    previous: Optional[LanguageSkill],
    rng: random.Random,
    no_repeat: bool = True,
) -> LanguageSkill:
    """Uniform draw, optionally excluding the previous skill."""
    if not available:
        raise ValueError("available skill set must be non-empty")
    pool = list(available)
    if no_repeat and previous in pool and len(pool) > 1:
        pool = [skill for skill in pool if skill is not previous]
    return rng.choice(pool)


def anticipate(
    product: Product,
    session: Session,
    backend: Optional[Backend] = None,
    bundle: Optional[PromptBundle] = None,
) -> tuple[str, ...]:
    """Best-effort prediction of the buyer's next moves (1-3 entries).

    The rule path extrapolates the offer trajectory; the LLM path parses
    dash-prefixed lines from the model reply and returns empty on failure.
    """
    if backend is not None and bundle is not None:
        try:
            prompt = _render_anticipation_query(bundle, product, session)
            reply = backend.complete(simple_request(
                "You predict the buyer's next moves in a bargaining chat.",
                prompt,
                temperature=0.0,
            ))
            moves = tuple(
                line.lstrip("- ").strip()
                for line in reply.text.splitlines()
                if line.strip().startswith("-")
            )[:3]
            if moves:
                return moves
        except BackendFailure:
            return ()
        return ()

    offers = session.buyer_offers
    bottom = product.bottom_price
    if not offers:
        return ("ask question or greet",)
    moves: list[str] = []
    if len(offers) >= 2:
        increments = [b - a for a, b in zip(offers, offers[1:])]
        step = int(median(increments))
        if step > 0:
            moves.append(f"counter @ {format_money(offers[-1] + step)}")
    elif offers[-1] < bottom:
        moves.append("counter higher")
    if offers[-1] >= bottom:
        moves.append("accept or walk away")
    if not moves:
        moves.append("counter higher")
    return tuple(moves[:3])


def _product_block(product: Product) -> str:
    return (
        f"Title: {product.title}\n"
        f"Category: {product.category}\n"
        f"Notes: {product.description}\n"
        f"List price: {format_money(product.list_price)}\n"
        f"Lowest acceptable price: {format_money(product.bottom_price)}"
    )


def transcript_block(session: Session) -> str:
    lines = []
    for utterance in session.utterances:
        who = "Buyer" if utterance.speaker is Speaker.BUYER else "Seller"
        lines.append(f"{who}: {utterance.text}")
    return "\n".join(lines)


def _actions_block() -> str:
    return "\n".join(
        f"{action.value}: {definition}" for action, definition in ACTION_DEFINITIONS.items()
    )


def render_action_prompt(
    bundle: PromptBundle,
    product: Product,
    session: Session,
    anticipated: Sequence[str] = (),
) -> str:
    """Compose the action-selection prompt.

    The anticipation section renders only when moves are supplied, and
    it is inserted without touching the rest, so the anticipation-off
    output is always a subsequence of the anticipation-on output.
    """
    anticipation_block = ""
    if anticipated:
        moves = "\n".join(f"- {move}" for move in anticipated)
        anticipation_block = render(
            bundle.bidirectional_prompt, {"anticipated_moves": moves}
        )
    return render(
        bundle.action_prompt,
        {
            "anticipation_block": anticipation_block,
            "product_block": _product_block(product),
            "transcript": transcript_block(session),
            "actions_block": _actions_block(),
        },
    )


def _render_anticipation_query(
    bundle: PromptBundle, product: Product, session: Session
) -> str:
    return (
        f"Product:\n{_product_block(product)}\n\n"
        f"Conversation so far:\n{transcript_block(session)}\n\n"
        "List 1-3 moves the buyer is likely to make next, one per line, "
        "each starting with '- '."
    )


_ACTION_TOKEN_RE = re.compile(
    r"\b(COUNTER[-_\s]?NOPRICE|COUNTER|DEAL|PROPOSE|REJECT|HELLO|ANS)\b",
    re.IGNORECASE,
)


def parse_action_reply(text: str) -> Action:
    """Decode the first action token in a model reply.

    COUNTER-NOPRICE is matched before COUNTER so the prefix cannot
    capture it.
    """
    match = _ACTION_TOKEN_RE.search(text)
    if not match:
        raise UnparseableAction(f"no action token in {text[:80]!r}")
    token = re.sub(r"[-_\s]", "", match.group(1).upper())
    if token == "COUNTERNOPRICE":
        return Action.COUNTER_NOPRICE
    return Action(token)


def _previous_skill(session: Session) -> Optional[LanguageSkill]:
    for decision in reversed(session.decisions):
        if decision.skill is not None:
            return decision.skill
    return None


def _lowball_already_answered(session: Session) -> bool:
    bottom = session.product.bottom_price
    if bottom in session.seller_offers:
        return True
    return any(
        d.buyer_price_seen is not None and d.buyer_price_seen < bottom
        for d in session.decisions
    )


def _concession_count(session: Session) -> int:
    return sum(
        1
        for d in session.decisions
        if d.action in (Action.COUNTER, Action.COUNTER_NOPRICE)
    )


def _rule_action(
    product: Product,
    session: Session,
    extraction: PriceExtraction,
    config: PlannerConfig,
    rationale: list[str],
) -> Action:
    last_text = session.utterances[-1].text if session.utterances else ""

    if extraction.price is None:
        if session.agent_turns == 0 and looks_like_greeting(last_text):
            rationale.append("greeting on the first turn: greet back")
            return Action.HELLO
        if looks_like_question(last_text):
            rationale.append("question detected: answer from product info")
            return Action.ANS
        if session.agent_turns == 0:
            rationale.append("no offer on the first turn: greet")
            return Action.HELLO
        if not session.buyer_offers:
            rationale.append("no buyer offer yet: initiate a price")
            return Action.PROPOSE
        rationale.append("buyer is stalling: counter to re-engage")
        return Action.COUNTER

    offer = extraction.price
    threshold = accept_threshold(product, config.accept_threshold_ratio)
    standing = session.seller_offers[-1] if session.seller_offers else None

    if offer >= threshold:
        rationale.append(
            f"offer {format_money(offer)} >= accept threshold {format_money(threshold)}"
        )
        return Action.DEAL
    if standing is not None and offer >= standing:
        rationale.append(
            f"offer {format_money(offer)} meets standing offer {format_money(standing)}"
        )
        return Action.DEAL
    if offer < product.bottom_price:
        if _lowball_already_answered(session):
            rationale.append(
                f"offer {format_money(offer)} below bottom again: hold the floor"
            )
            return Action.REJECT
        rationale.append(f"offer {format_money(offer)} below bottom: counter once")
        return Action.COUNTER
    if _concession_count(session) % 3 == 2:
        rationale.append("third concession in a row: nudge without a price")
        return Action.COUNTER_NOPRICE
    rationale.append(
        f"offer {format_money(offer)} in range [{format_money(product.bottom_price)}, "
        f"{format_money(threshold)}): concede"
    )
    return Action.COUNTER


def plan(
    product: Product,
    session: Session,
    extraction: Optional[PriceExtraction],
    config: PlannerConfig,
    backend: Optional[Backend] = None,
    *,
    rng: Optional[random.Random] = None,
    sampler_config: Optional[SamplerConfig] = None,
    bundle: Optional[PromptBundle] = None,
) -> Decision:
    """Choose the next action and skill, sampling a price where required."""
    if session.status is not SessionStatus.OPEN:
        raise ValueError("cannot plan on a terminal session")
    extraction = extraction or NO_PRICE
    rng = rng or random.Random(config.rng_seed)
    sampler_config = sampler_config or SamplerConfig()
    rationale: list[str] = []
    if extraction.has_price:
        rationale.extend(extraction.audit)

    anticipated: tuple[str, ...] = ()
    if config.use_bidirectional:
        view = session
        if extraction.has_price:
            # anticipate from a history that already includes the offer
            # being answered, not just previously recorded ones
            view = dataclasses.replace(
                session, buyer_offers=session.buyer_offers + (extraction.price,)
            )
        anticipated = anticipate(product, view, backend=backend, bundle=bundle)
        if anticipated:
            rationale.append("anticipated: " + "; ".join(anticipated))

    if not config.use_actions:
        action = Action.COUNTER_NOPRICE
        rationale.append("action planning disabled: plain reply")
    elif backend is not None and bundle is not None:
        try:
            prompt = render_action_prompt(bundle, product, session, anticipated)
            reply = backend.complete(simple_request(
                "You choose bargaining actions for the seller.", prompt, temperature=0.0
            ))
            action = parse_action_reply(reply.text)
            rationale.append(f"backend chose {action.value}")
        except (BackendFailure, UnparseableAction) as exc:
            action = _rule_action(product, session, extraction, config, rationale)
            rationale.append(f"backend fallback ({type(exc).__name__}): rule policy")
    else:
        action = _rule_action(product, session, extraction, config, rationale)

    seller_price: Optional[Money] = None
    if action in (Action.PROPOSE, Action.COUNTER):
        latest_offer = extraction.price
        if latest_offer is None and session.buyer_offers:
            latest_offer = session.buyer_offers[-1]
        bounds = update_bounds(product, session.seller_offers, latest_offer)
        seller_price = sample_price(bounds, sampler_config, rng)
        rationale.append(
            f"sampled {format_money(seller_price)} in "
            f"[{format_money(bounds.lower)}, {format_money(bounds.upper)}] "
            f"(concession {bounds.concession_index})"
        )
    elif action is Action.REJECT:
        seller_price = product.bottom_price
        rationale.append(f"holding bottom price {format_money(seller_price)}")
    elif action is Action.DEAL and extraction.has_price:
        rationale.append(f"deal at buyer offer {format_money(extraction.price)}")

    if action is Action.DEAL or not config.use_skills:
        skill = LanguageSkill.CHAT  # closing and plain replies skip persuasion
    else:
        skill = choose_skill(
            ALL_SKILLS, _previous_skill(session), rng, config.skill_no_repeat
        )

    return Decision(
        action=action,
        skill=skill,
        seller_price=seller_price,
        buyer_price_seen=extraction.price,
        rationale=tuple(rationale),
        anticipated_buyer_moves=anticipated,
    )
