from __future__ import annotations

from decimal import Decimal

from hypothesis import given
from hypothesis import strategies as st

from haggle.money import (
    format_money,
    parse_money,
    percent_discount,
    round_to_whole_units,
)


def test_format_whole_amount_has_no_decimals():
    assert format_money(21500) == "215"


def test_format_fractional_amount_two_decimals():
    assert format_money(21550) == "215.50"
    assert format_money(5) == "0.05"


def test_parse_handles_commas_and_dollar_sign():
    assert parse_money("1,200") == 120000
    assert parse_money("$ 45.50") == 4550


def test_percent_discount_rounds_half_up():
    # 99 * 0.95 = 94.05 exactly; 33.33 * 0.85 = 28.3305 -> 28.33
    assert percent_discount(9900, Decimal(5)) == 9405
    assert percent_discount(3333, Decimal(15)) == 2833


def test_round_to_whole_units_half_up():
    assert round_to_whole_units(21550) == 21600
    assert round_to_whole_units(21549) == 21500


@given(st.integers(min_value=0, max_value=10**9))
def test_format_parse_round_trip(minor):
    assert parse_money(format_money(minor)) == minor
