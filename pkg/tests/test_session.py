from __future__ import annotations

import pytest

from haggle.models import (
    Action,
    AlternationViolation,
    Decision,
    LanguageSkill,
    Product,
    SessionStatus,
    TerminalSession,
    new_session,
    session_from_dict,
    session_to_dict,
)
from haggle.session import (
    AgentTurn,
    BuyerAbandon,
    BuyerMessage,
    advance,
    is_acceptance,
    validate,
)


def counter(price, seen=None):
    return Decision(
        action=Action.COUNTER,
        skill=LanguageSkill.CHAT,
        seller_price=price,
        buyer_price_seen=seen,
    )


@pytest.fixture
def session(product):
    return new_session(product, rng_seed=11, session_id="s-test")


class TestProduct:
    def test_rejects_nonpositive_list_price(self):
        with pytest.raises(ValueError):
            Product(id="x", title="t", description="", category="c",
                    list_price=0, bottom_price=0)

    def test_rejects_bottom_above_list(self):
        with pytest.raises(ValueError):
            Product(id="x", title="t", description="", category="c",
                    list_price=25000, bottom_price=30000)


class TestAcceptanceDetection:
    @pytest.mark.parametrize("text", [
        "Deal! I'll take it.",
        "ok, deal",
        "Alright, sold.",
        "I accept, thank you",
    ])
    def test_accepting_phrases(self, text):
        assert is_acceptance(text)

    @pytest.mark.parametrize("text", [
        "no deal",
        "that's not a deal I can do",
        "what's your best price?",
        "deal at 180?",  # carries a number: treated as an offer
        "I'll take it for 200",
    ])
    def test_non_accepting_phrases(self, text):
        assert not is_acceptance(text)


class TestAdvance:
    def test_buyer_then_agent_updates_offers(self, session):
        s = advance(session, BuyerMessage("Is $210 OK?"))
        s = advance(s, AgentTurn(counter(23000, seen=21000), "how about 230?"))
        assert s.seller_offers == (23000,)
        assert s.buyer_offers == (21000,)
        assert [u.speaker.value for u in s.utterances] == ["buyer", "seller_agent"]

    def test_agent_deal_closes_at_buyer_offer(self, session):
        s = advance(session, BuyerMessage("240 and it's done"))
        deal = Decision(action=Action.DEAL, skill=None, buyer_price_seen=24000)
        s = advance(s, AgentTurn(deal, "Deal!"))
        assert s.status is SessionStatus.DEAL
        assert s.deal_price == 24000

    def test_agent_deal_clamps_to_list_price(self, session):
        s = advance(session, BuyerMessage("I'll pay 260, just ship it"))
        deal = Decision(action=Action.DEAL, skill=None, buyer_price_seen=26000)
        s = advance(s, AgentTurn(deal, "Deal!"))
        assert s.deal_price == 25000  # raw 260 preserved in the decision record

    def test_buyer_acceptance_closes_at_standing_offer(self, session):
        s = advance(session, BuyerMessage("Is $210 OK?"))
        s = advance(s, AgentTurn(counter(22000, seen=21000), "how about 220?"))
        s = advance(s, BuyerMessage("Deal! I'll take it."))
        assert s.status is SessionStatus.DEAL
        assert s.deal_price == 22000

    def test_buyer_acceptance_with_no_offers_closes_at_list(self, session):
        s = advance(session, BuyerMessage("I'll take it."))
        assert s.status is SessionStatus.DEAL
        assert s.deal_price == session.product.list_price

    def test_terminal_session_rejects_events(self, session):
        s = advance(session, BuyerMessage("deal"))
        assert s.status is SessionStatus.DEAL
        with pytest.raises(TerminalSession):
            advance(s, BuyerMessage("hello?"))

    def test_alternation_enforced(self, session):
        s = advance(session, BuyerMessage("hi"))
        with pytest.raises(AlternationViolation):
            advance(s, BuyerMessage("hello again"))
        with pytest.raises(AlternationViolation):
            advance(session, AgentTurn(counter(23000), "hi"))

    def test_turn_cap_expires_on_non_accepting_message(self, session):
        s = session
        for i in range(10):
            s = advance(s, BuyerMessage(f"offer attempt"), turn_cap=10)
            s = advance(s, AgentTurn(
                Decision(action=Action.COUNTER_NOPRICE, skill=LanguageSkill.CHAT),
                "come up a bit",
            ), turn_cap=10)
        assert s.agent_turns == 10
        s = advance(s, BuyerMessage("still thinking"), turn_cap=10)
        assert s.status is SessionStatus.EXPIRED

    def test_acceptance_still_possible_at_turn_cap(self, session):
        s = session
        for _ in range(10):
            s = advance(s, BuyerMessage("hmm"), turn_cap=10)
            s = advance(s, AgentTurn(counter(24000), "how about 240?"), turn_cap=10)
        s = advance(s, BuyerMessage("deal, I'll take it"), turn_cap=10)
        assert s.status is SessionStatus.DEAL
        assert s.deal_price == 24000

    def test_abandon_expires(self, session):
        s = advance(session, BuyerAbandon())
        assert s.status is SessionStatus.EXPIRED


class TestValidate:
    def test_fresh_session_is_clean(self, session):
        assert validate(session) == []

    def test_engine_style_session_is_clean(self, session):
        s = advance(session, BuyerMessage("Is $210 OK?"))
        s = advance(s, AgentTurn(counter(23000, seen=21000), "how about 230?"))
        assert validate(s) == []

    def test_increasing_seller_offers_flagged(self, session):
        from dataclasses import replace

        bad = replace(session, seller_offers=(10000 * 2, 12000 * 2))
        problems = validate(bad)
        assert any("non-increasing" in p for p in problems)

    def test_offer_below_bottom_flagged(self, session):
        from dataclasses import replace

        bad = replace(session, seller_offers=(19000,))
        assert any("below bottom" in p for p in validate(bad))

    def test_deal_price_without_deal_status_flagged(self, session):
        from dataclasses import replace

        bad = replace(session, deal_price=21000)
        assert any("status/deal_price" in p for p in validate(bad))

    def test_decision_invariants_flagged(self, session):
        from dataclasses import replace

        bad_decision = Decision(action=Action.COUNTER, skill=LanguageSkill.CHAT)
        bad = replace(session, decisions=(bad_decision,))
        assert any("requires seller_price" in p for p in validate(bad))


class TestSerialization:
    def test_round_trip_preserves_everything(self, session):
        s = advance(session, BuyerMessage("Is $210 OK?"))
        s = advance(s, AgentTurn(counter(23000, seen=21000), "how about 230?"))
        s = advance(s, BuyerMessage("deal"))
        restored = session_from_dict(session_to_dict(s))
        assert restored == s

    def test_offer_histories_rebuilt_from_decisions(self, session):
        s = advance(session, BuyerMessage("Is $210 OK?"))
        s = advance(s, AgentTurn(counter(23000, seen=21000), "230?"))
        data = session_to_dict(s)
        assert "seller_offers" not in data  # derived, not part of the schema
        restored = session_from_dict(data)
        assert restored.seller_offers == (23000,)
        assert restored.buyer_offers == (21000,)
