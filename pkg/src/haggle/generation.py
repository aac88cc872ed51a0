"""Turn a decision into the seller's reply text.

The LLM path renders the response prompt and post-checks the reply: a
priced decision must voice the sampled price verbatim, a COUNTER-NOPRICE
reply must contain nothing the extractor's lexical pass reads as a
price, and the reply must fit the length budget. One regeneration is
attempted on violation, then the deterministic template table takes
over, so generation never fails.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .backend import Backend, BackendFailure, simple_request
from .extraction import ExpressionKind, parse_expressions
from .models import (
    ACTION_DEFINITIONS,
    Action,
    Decision,
    LanguageSkill,
    Product,
    Session,
    SKILL_DEFINITIONS,
)
from .money import format_money
from .prompts import PromptBundle, render
from .planner import transcript_block

DEFAULT_MAX_REPLY_CHARS = 280

TemplateTable = dict[str, list[str]]


@dataclass(frozen=True)
class GenerationRequest:
    product: Product
    session: Session
    decision: Decision
    prompt: str
    max_reply_chars: int = DEFAULT_MAX_REPLY_CHARS


def load_default_templates() -> TemplateTable:
    text = resources.files("haggle.data").joinpath("reply_templates.json").read_text("utf-8")
    return json.loads(text)


def load_templates(path: str | Path) -> TemplateTable:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def render_response_prompt(
    bundle: PromptBundle,
    product: Product,
    session: Session,
    decision: Decision,
    max_reply_chars: int = DEFAULT_MAX_REPLY_CHARS,
) -> str:
    skill = decision.skill or LanguageSkill.CHAT
    if decision.seller_price is not None:
        price_instruction = (
            f"State the price {format_money(decision.seller_price)} exactly.\n"
        )
    elif decision.action is Action.COUNTER_NOPRICE:
        price_instruction = "Do not mention any specific price or number.\n"
    else:
        price_instruction = ""
    return render(
        bundle.response_prompt,
        {
            "product_block": (
                f"Title: {product.title}\n"
                f"Notes: {product.description}\n"
                f"List price: {format_money(product.list_price)}"
            ),
            "transcript": transcript_block(session),
            "action": decision.action.value,
            "action_definition": ACTION_DEFINITIONS[decision.action],
            "skill": skill.value,
            "skill_definition": SKILL_DEFINITIONS[skill],
            "price_instruction": price_instruction,
            "max_chars": str(max_reply_chars),
        },
    )


def _template_key(decision: Decision) -> str:
    skill = decision.skill or LanguageSkill.CHAT
    return f"{decision.action.value}.{skill.value}"


def template_reply(
    decision: Decision,
    product: Product,
    table: Optional[TemplateTable] = None,
) -> str:
    """Deterministic reply from the per-(action, skill) template table.

    Lookup falls back to the action's CHAT family and then to a generic
    family, so every pair produces text.
    """
    table = table if table is not None else load_default_templates()
    skill = decision.skill or LanguageSkill.CHAT
    candidates = (
        f"{decision.action.value}.{skill.value}",
        f"{decision.action.value}.{LanguageSkill.CHAT.value}",
        "FALLBACK",
    )
    templates: list[str] = []
    for key in candidates:
        if table.get(key):
            templates = table[key]
            break
    if not templates:
        raise KeyError(f"template table has no entry for {candidates[0]}")
    price = format_money(decision.seller_price) if decision.seller_price is not None else ""
    text = templates[0].replace("{{title}}", product.title).replace("{{price}}", price)
    return text


def reply_violations(text: str, request: GenerationRequest) -> list[str]:
    """Post-checks a candidate reply must pass before it is accepted."""
    problems = []
    if not text.strip():
        problems.append("empty reply")
        return problems
    if len(text) > request.max_reply_chars:
        problems.append(f"reply longer than {request.max_reply_chars} chars")
    decision = request.decision
    parsed = parse_expressions(text)
    if decision.seller_price is not None:
        rendered = format_money(decision.seller_price)
        if rendered not in text:
            problems.append(f"price {rendered} not voiced")
        absolutes = {e.amount for e in parsed if e.kind is ExpressionKind.ABSOLUTE}
        relatives = [e for e in parsed if e.kind is not ExpressionKind.ABSOLUTE]
        if absolutes != {decision.seller_price} or relatives:
            problems.append("lexical pass does not recover exactly the decision price")
    elif decision.action is Action.COUNTER_NOPRICE and parsed:
        problems.append("no-price reply contains a price expression")
    return problems


def generate(
    request: GenerationRequest,
    backend: Optional[Backend] = None,
    table: Optional[TemplateTable] = None,
) -> str:
    """Produce the seller reply; total, never raises to the caller."""
    if backend is not None:
        for _ in range(2):  # one regeneration on a failed post-check
            try:
                reply = backend.complete(
                    simple_request(
                        "You write the seller's next chat message.", request.prompt
                    )
                )
            except BackendFailure:
                break
            text = reply.text.strip()
            if not reply_violations(text, request):
                return text
    fallback = template_reply(request.decision, request.product, table)
    return fallback[: request.max_reply_chars]
