"""Dialogue-level evaluation metrics.

AT is the mean number of dialogue rounds over successful episodes, SR
the fraction of episodes that reach a deal within the turn cap, and the
sale-to-list ratio places the deal price inside the seller's band
between bottom and list price, clamped to [0, 1].
"""

from __future__ import annotations

from .money import Money


class InvalidPrices(Exception):
    pass


def sl_ratio(deal_price: Money, seller_price: Money, seller_lowest_price: Money) -> float:
    """Clamped (deal - lowest) / (price - lowest).

    A zero-width band (lowest = price) is degenerate; by convention the
    ratio is 1.0 when the deal meets the price and 0.0 otherwise.
    """
    if seller_lowest_price > seller_price:
        raise InvalidPrices("seller_lowest_price above seller_price")
    if seller_price == seller_lowest_price:
        return 1.0 if deal_price >= seller_price else 0.0
    ratio = (deal_price - seller_lowest_price) / (seller_price - seller_lowest_price)
    return max(0.0, min(1.0, ratio))
