"""Seller counter-offer sampling.

Each priced turn draws from a normal distribution truncated to the
current bound interval. The centroid sits at a configurable fraction of
the interval and decays geometrically per concession, so early counters
anchor high and later ones concede. Truncation uses the inverse-CDF
transform: exact, rejection-free, and one RNG draw per sample, which
keeps seeded streams stable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional, Sequence

from .models import Product
from .money import Money, round_to_whole_units

_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class SamplerConfig:
    centroid_gamma0: float = 0.8  # initial centroid position within the interval
    gamma_decay: float = 0.85  # per-concession geometric decay
    gamma_min: float = 0.1
    delta_beta: float = 0.15  # std as a share of interval width
    rounding: str = "whole_unit"  # or "minor_unit"

    def __post_init__(self) -> None:
        if not 0 < self.gamma_min <= self.centroid_gamma0 <= 1:
            raise ValueError("need 0 < gamma_min <= centroid_gamma0 <= 1")
        if not 0 < self.gamma_decay <= 1:
            raise ValueError("gamma_decay must be in (0, 1]")
        if self.delta_beta <= 0:
            raise ValueError("delta_beta must be positive")
        if self.rounding not in ("whole_unit", "minor_unit"):
            raise ValueError(f"unknown rounding mode {self.rounding!r}")

    def gamma(self, concession_index: int) -> float:
        return max(self.gamma_min, self.centroid_gamma0 * self.gamma_decay**concession_index)


@dataclass(frozen=True)
class Bounds:
    lower: Money
    upper: Money
    concession_index: int = 0

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("lower bound above upper bound")
        if self.concession_index < 0:
            raise ValueError("concession_index must be non-negative")


def update_bounds(
    product: Product,
    seller_offers: Sequence[Money],
    latest_buyer_offer: Optional[Money],
) -> Bounds:
    """Compute the sampling interval for the next counter-offer.

    The upper bound pins to the previous seller offer, which is what
    makes the offer sequence monotone non-increasing; the lower bound is
    the buyer's offer floored at the bottom price. A buyer offer above
    the standing offer collapses the interval onto the standing offer.
    """
    upper = seller_offers[-1] if seller_offers else product.list_price
    lower = max(product.bottom_price, latest_buyer_offer or product.bottom_price)
    if lower > upper:
        lower = upper
    return Bounds(lower=lower, upper=upper, concession_index=len(seller_offers))


def truncated_normal(
    lower: float, upper: float, mean: float, std: float, rng: random.Random
) -> float:
    """One draw from Normal(mean, std) truncated to [lower, upper]."""
    if upper <= lower:
        return lower
    if std <= 0:
        return min(max(mean, lower), upper)
    cdf_low = _STD_NORMAL.cdf((lower - mean) / std)
    cdf_high = _STD_NORMAL.cdf((upper - mean) / std)
    if cdf_high <= cdf_low:
        # Interval mass underflowed; fall back to the nearer bound.
        return lower if mean < lower else upper
    u = rng.uniform(cdf_low, cdf_high)
    x = mean + std * _STD_NORMAL.inv_cdf(u)
    return min(max(x, lower), upper)


def sample_price(bounds: Bounds, config: SamplerConfig, rng: random.Random) -> Money:
    """Draw the next seller price from the truncated normal over the bounds."""
    if bounds.lower >= bounds.upper:
        return bounds.upper
    width = bounds.upper - bounds.lower
    mean = bounds.lower + config.gamma(bounds.concession_index) * width
    std = config.delta_beta * width
    raw = truncated_normal(float(bounds.lower), float(bounds.upper), mean, std, rng)
    price = round(raw)
    if config.rounding == "whole_unit":
        price = round_to_whole_units(price)
    return min(max(price, bounds.lower), bounds.upper)
