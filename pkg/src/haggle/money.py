"""Money arithmetic in integer minor units.

All prices in the engine are integers counting minor currency units
(cents for a 2-decimal currency). Keeping money integral makes offer
comparisons, discount arithmetic, and transcript round-trips exact.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

Money = int

MINOR_PER_UNIT = 100


def from_units(units: float | int | str | Decimal) -> Money:
    """Convert a major-unit amount (e.g. 215.50) to minor units."""
    minor = (Decimal(str(units)) * MINOR_PER_UNIT).quantize(
        Decimal("1"), rounding=ROUND_HALF_UP
    )
    return int(minor)


def to_units(minor: Money) -> Decimal:
    return Decimal(minor) / MINOR_PER_UNIT


def format_money(minor: Money) -> str:
    """Render minor units the way chat text states prices.

    Whole amounts render without decimals ("215"), everything else with
    two ("215.50"), so a rendered price re-parses to the same value.
    """
    sign = "-" if minor < 0 else ""
    minor = abs(minor)
    units, cents = divmod(minor, MINOR_PER_UNIT)
    if cents == 0:
        return f"{sign}{units}"
    return f"{sign}{units}.{cents:02d}"


def parse_money(text: str) -> Money:
    """Parse a plain numeral like "1,200" or "215.50" to minor units.

    Raises ValueError on anything that is not a numeral.
    """
    cleaned = text.replace(",", "").replace("$", "").strip()
    if not cleaned:
        raise ValueError("empty money literal")
    return from_units(Decimal(cleaned))


def round_to_minor(value: Decimal) -> Money:
    """Round a major-unit Decimal to minor units, half up."""
    return int(
        (value * MINOR_PER_UNIT).quantize(Decimal("1"), rounding=ROUND_HALF_UP)
    )


def percent_discount(base: Money, percent: Decimal) -> Money:
    """base reduced by percent, rounded half-up to the minor unit."""
    return round_to_minor(to_units(base) * (Decimal(100) - percent) / Decimal(100))


def round_to_whole_units(minor: Money) -> Money:
    """Round minor units to the nearest whole currency unit, half up."""
    units = (Decimal(minor) / MINOR_PER_UNIT).quantize(
        Decimal("1"), rounding=ROUND_HALF_UP
    )
    return int(units) * MINOR_PER_UNIT
