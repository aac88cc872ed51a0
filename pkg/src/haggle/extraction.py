"""Recover the buyer's current offer from dialogue text.

Two-stage design: ``parse_expressions`` is a pure lexical pass that finds
every candidate price expression in an utterance (absolute amounts,
percent-discount requests, amount-off requests, plus a small lexicon of
written-out numerals). ``resolve`` then applies product context: the
resolution base for relative expressions, a plausibility filter against
the list price, and the last-expression-wins tie-break. Every arithmetic
step lands in the extraction's audit trail.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Optional, Sequence

from .models import Product, Speaker, Utterance
from .money import Money, format_money, from_units, percent_discount

#: Resolved prices outside [PLAUSIBLE_LOW_RATIO * list, PLAUSIBLE_HIGH_RATIO * list]
#: are discarded; this keeps quantities ("I need 2") from reading as offers.
PLAUSIBLE_LOW_RATIO = Decimal("0.01")
PLAUSIBLE_HIGH_RATIO = Decimal("10")


class ExpressionKind(str, Enum):
    ABSOLUTE = "absolute"
    PERCENT_DISCOUNT = "relative_percent_discount"
    AMOUNT_OFF = "relative_amount_off"
    NONE = "none"


class AmbiguousExpression(Exception):
    """Two conflicting resolved prices that the tie-break cannot order."""

    def __init__(self, first: "ResolvedCandidate", second: "ResolvedCandidate"):
        self.candidates = (first, second)
        super().__init__(
            f"ambiguous prices {format_money(first.price)} and "
            f"{format_money(second.price)} at the same span"
        )


@dataclass(frozen=True)
class RawExpression:
    """One lexical candidate: an amount or percent token with its span."""

    kind: ExpressionKind  # ABSOLUTE, PERCENT_DISCOUNT, or AMOUNT_OFF
    amount: Optional[Money]  # minor units, for absolute / amount-off
    percent: Optional[Decimal]  # for percent-discount
    span: tuple[int, int]
    text: str


@dataclass(frozen=True)
class ResolvedCandidate:
    price: Money
    kind: ExpressionKind
    base_used: Optional[Money]
    audit: tuple[str, ...]
    span: tuple[int, int]


@dataclass(frozen=True)
class PriceExtraction:
    price: Optional[Money]
    kind: ExpressionKind
    base_used: Optional[Money] = None
    audit: tuple[str, ...] = ()
    source_span: Optional[tuple[int, int]] = None

    @property
    def has_price(self) -> bool:
        return self.price is not None


NO_PRICE = PriceExtraction(price=None, kind=ExpressionKind.NONE)


_PERCENT_RE = re.compile(r"(\d[\d,]*(?:\.\d+)?)\s*(?:%|percent\b|per\s+cent\b)", re.IGNORECASE)
_AMOUNT_RE = re.compile(
    r"\$\s*\d[\d,]*(?:\.\d+)?|(?<![\w.])\d[\d,]*(?:\.\d+)?(?![\w%])(?!\.\d)"
)

#: Words that mark a percent or nearby amount as a discount request.
_DISCOUNT_CONTEXT_RE = re.compile(
    r"\b(?:discount|off|less|cheaper|cheap|reduc\w*|lower|knock|shave|drop)\b",
    re.IGNORECASE,
)
#: "off" within two words after an amount (or an adjacent "less") marks amount-off.
_TRAILING_OFF_RE = re.compile(r"^\s{0,4}(?:(?:\w+\s+){0,2}off|less)\b", re.IGNORECASE)
_LEADING_KNOCK_RE = re.compile(r"\b(?:knock|take|shave|drop)\s*$", re.IGNORECASE)

_UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_SCALES = {"hundred": 100, "thousand": 1000}
_NUMBER_WORDS = {**_UNITS, **_TENS, **_SCALES}

_WORD = "|".join(sorted(_NUMBER_WORDS, key=len, reverse=True))
_WRITTEN_RE = re.compile(
    rf"\b(?:an?[\s-]+(?=(?:hundred|thousand)\b))?"
    rf"(?:{_WORD})(?:[\s-]+(?:and[\s-]+)?(?:{_WORD}))*\b",
    re.IGNORECASE,
)


def _written_value(phrase: str) -> Optional[int]:
    total = 0
    current = 0
    for word in re.split(r"[\s-]+", phrase.lower()):
        if word in ("a", "an", "and"):
            continue
        value = _NUMBER_WORDS.get(word)
        if value is None:
            return None
        if value == 100:
            current = max(current, 1) * 100
        elif value == 1000:
            total += max(current, 1) * 1000
            current = 0
        else:
            current += value
    result = total + current
    return result if result > 0 else None


def _parse_amount(token: str) -> Optional[Money]:
    cleaned = token.lstrip("$").replace(",", "").strip()
    try:
        return from_units(Decimal(cleaned))
    except (InvalidOperation, ValueError):
        return None


def parse_expressions(text: str) -> list[RawExpression]:
    """Lexical scan for price expressions, left to right, no product context."""
    if not text:
        return []
    expressions: list[RawExpression] = []
    taken: list[tuple[int, int]] = []

    def overlaps(start: int, end: int) -> bool:
        return any(start < t_end and end > t_start for t_start, t_end in taken)

    has_discount_context = bool(_DISCOUNT_CONTEXT_RE.search(text))

    for match in _PERCENT_RE.finditer(text):
        if not has_discount_context:
            continue  # "100% cotton" is not an offer
        try:
            percent = Decimal(match.group(1).replace(",", ""))
        except InvalidOperation:
            continue
        span = match.span()
        expressions.append(
            RawExpression(
                kind=ExpressionKind.PERCENT_DISCOUNT,
                amount=None,
                percent=percent,
                span=span,
                text=match.group(0),
            )
        )
        taken.append(span)

    for match in _AMOUNT_RE.finditer(text):
        span = match.span()
        if overlaps(*span):
            continue
        amount = _parse_amount(match.group(0))
        if amount is None:
            continue
        trailing = _TRAILING_OFF_RE.match(text[span[1]:])
        leading = _LEADING_KNOCK_RE.search(text[: span[0]])
        is_amount_off = bool(trailing) or (bool(leading) and has_discount_context)
        expressions.append(
            RawExpression(
                kind=ExpressionKind.AMOUNT_OFF if is_amount_off else ExpressionKind.ABSOLUTE,
                amount=amount,
                percent=None,
                span=span,
                text=match.group(0),
            )
        )
        taken.append(span)

    for match in _WRITTEN_RE.finditer(text):
        span = match.span()
        if overlaps(*span):
            continue
        if re.match(r"\s*(?:%|percent\b|per\s+cent\b)", text[span[1]:], re.IGNORECASE):
            continue  # written-out percentages are outside the lexicon
        value = _written_value(match.group(0))
        if value is None:
            continue
        trailing = _TRAILING_OFF_RE.match(text[span[1]:])
        expressions.append(
            RawExpression(
                kind=ExpressionKind.AMOUNT_OFF if trailing else ExpressionKind.ABSOLUTE,
                amount=value * 100,
                percent=None,
                span=span,
                text=match.group(0),
            )
        )
        taken.append(span)

    expressions.sort(key=lambda e: e.span)
    return expressions


def _resolution_base(product: Product, seller_offers: Sequence[Money]) -> tuple[Money, str]:
    if seller_offers:
        return seller_offers[-1], "latest seller offer"
    return product.list_price, "list price"


def _resolve_one(
    expr: RawExpression, product: Product, seller_offers: Sequence[Money]
) -> Optional[ResolvedCandidate]:
    if expr.kind is ExpressionKind.ABSOLUTE:
        assert expr.amount is not None
        return ResolvedCandidate(
            price=expr.amount,
            kind=ExpressionKind.ABSOLUTE,
            base_used=None,
            audit=(f"absolute amount {format_money(expr.amount)} in {expr.text!r}",),
            span=expr.span,
        )
    base, base_label = _resolution_base(product, seller_offers)
    if expr.kind is ExpressionKind.PERCENT_DISCOUNT:
        assert expr.percent is not None
        price = percent_discount(base, expr.percent)
        audit = (
            f"base = {base_label} {format_money(base)}",
            f"percent discount {expr.percent}%: {format_money(base)} x "
            f"(1 - {expr.percent}/100) = {format_money(price)} (rounded half-up)",
        )
        return ResolvedCandidate(
            price=price,
            kind=ExpressionKind.PERCENT_DISCOUNT,
            base_used=base,
            audit=audit,
            span=expr.span,
        )
    if expr.kind is ExpressionKind.AMOUNT_OFF:
        assert expr.amount is not None
        price = base - expr.amount
        audit = (
            f"base = {base_label} {format_money(base)}",
            f"amount off {format_money(expr.amount)}: {format_money(base)} - "
            f"{format_money(expr.amount)} = {format_money(price)}",
        )
        return ResolvedCandidate(
            price=price,
            kind=ExpressionKind.AMOUNT_OFF,
            base_used=base,
            audit=audit,
            span=expr.span,
        )
    return None


def plausible_range(product: Product) -> tuple[Money, Money]:
    low = int(Decimal(product.list_price) * PLAUSIBLE_LOW_RATIO)
    high = int(Decimal(product.list_price) * PLAUSIBLE_HIGH_RATIO)
    return low, high


def resolve(
    expressions: Sequence[RawExpression],
    product: Product,
    seller_offers: Sequence[Money] = (),
) -> PriceExtraction:
    """Resolve lexical candidates against product context.

    Deterministic: base selection, plausibility filter, then the last
    surviving expression in text order wins. Raises AmbiguousExpression
    only when two surviving candidates occupy the same span with
    different prices, which the tie-break cannot order.
    """
    low, high = plausible_range(product)
    candidates = []
    for expr in expressions:
        resolved = _resolve_one(expr, product, seller_offers)
        if resolved is None or resolved.price <= 0:
            continue
        if not low <= resolved.price <= high:
            continue
        candidates.append(resolved)

    if not candidates:
        return NO_PRICE

    candidates.sort(key=lambda c: c.span)
    winner = candidates[-1]
    if len(candidates) > 1:
        runner_up = candidates[-2]
        if runner_up.span == winner.span and runner_up.price != winner.price:
            raise AmbiguousExpression(runner_up, winner)

    audit = winner.audit
    if len(candidates) > 1:
        audit = audit + (f"last of {len(candidates)} candidate expressions wins",)
    return PriceExtraction(
        price=winner.price,
        kind=winner.kind,
        base_used=winner.base_used,
        audit=audit,
        source_span=winner.span,
    )


def extract(
    product: Product,
    history: Sequence[Utterance],
    seller_offers: Sequence[Money] = (),
) -> PriceExtraction:
    """Extract the offer implied by the latest buyer utterance.

    Earlier offers live in the session's buyer_offers history; only the
    newest buyer message is mined here.
    """
    if not history:
        raise ValueError("history must be non-empty")
    last = history[-1]
    if last.speaker is not Speaker.BUYER:
        raise ValueError("last utterance must be the buyer's")
    return resolve(parse_expressions(last.text), product, seller_offers)


_LLM_KIND_MAP = {
    "absolute": ExpressionKind.ABSOLUTE,
    "percent_discount": ExpressionKind.PERCENT_DISCOUNT,
    "relative_percent_discount": ExpressionKind.PERCENT_DISCOUNT,
    "amount_off": ExpressionKind.AMOUNT_OFF,
    "relative_amount_off": ExpressionKind.AMOUNT_OFF,
    "none": ExpressionKind.NONE,
}


def llm_extract(
    product: Product,
    history: Sequence[Utterance],
    seller_offers: Sequence[Money],
    backend,
) -> PriceExtraction:
    """Model-backed extraction; the deterministic parser is the fallback.

    The model is asked for strict JSON with its computation steps; the
    steps land verbatim in the audit trail. Any malformed or implausible
    reply falls back to the parser, so this path never degrades below it.
    """
    import json as _json

    from .backend import BackendFailure, simple_request
    from .money import from_units

    last = history[-1] if history else None
    if last is None or last.speaker is not Speaker.BUYER:
        raise ValueError("last utterance must be the buyer's")
    base, base_label = _resolution_base(product, seller_offers)
    prompt = (
        f"List price: {format_money(product.list_price)}\n"
        f"Current seller offer: {format_money(base)} ({base_label})\n"
        f"Buyer message: {last.text!r}\n\n"
        "What price is the buyer offering? Resolve percent discounts and "
        "amount-off requests against the current seller offer, showing every "
        "arithmetic step. Reply with strict JSON only: "
        '{"price": <number or null>, "kind": "absolute" | "percent_discount" '
        '| "amount_off" | "none", "steps": ["..."]}'
    )
    try:
        reply = backend.complete(
            simple_request("You extract the buyer's current offer from chat text.",
                           prompt, temperature=0.0)
        )
        start, end = reply.text.find("{"), reply.text.rfind("}")
        data = _json.loads(reply.text[start : end + 1])
        kind = _LLM_KIND_MAP[str(data["kind"])]
        raw_price = data.get("price")
        if (kind is ExpressionKind.NONE) != (raw_price is None):
            raise ValueError("kind/price mismatch")
        if raw_price is None:
            return NO_PRICE
        price = from_units(raw_price)
        low, high = plausible_range(product)
        if not low <= price <= high:
            raise ValueError("implausible price")
        steps = tuple(str(step) for step in data.get("steps", ()))
        return PriceExtraction(
            price=price,
            kind=kind,
            base_used=base if kind is not ExpressionKind.ABSOLUTE else None,
            audit=steps or (f"model extraction: {format_money(price)}",),
            source_span=None,
        )
    except (BackendFailure, ValueError, KeyError, TypeError, _json.JSONDecodeError):
        return extract(product, history, seller_offers)
