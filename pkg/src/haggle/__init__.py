"""Seller-side bargaining agent engine.

Pipeline: price extraction from buyer text, action/skill planning,
truncated-normal counter-offer sampling, and reply generation, plus a
seeded buyer simulator, a self-play evaluation harness, an HTTP session
service, and a CLI.
"""

from .models import (
    Action,
    Decision,
    LanguageSkill,
    Product,
    Session,
    SessionStatus,
    Speaker,
    Utterance,
    new_session,
)
from .session import advance, validate, BuyerMessage, BuyerAbandon, AgentTurn
from .extraction import PriceExtraction, ExpressionKind, extract, parse_expressions, resolve
from .planner import PlannerConfig, plan, choose_skill, anticipate
from .sampling import SamplerConfig, Bounds, update_bounds, sample_price
from .generation import GenerationRequest, generate, template_reply
from .buyer import BuyerProfile, BuyerSimulator, willingness
from .engine import Engine, EngineConfig, ablation_config, ABLATION_LABELS
from .metrics import sl_ratio
from .harness import run_batch, synth_corpus

__version__ = "0.1.0"

__all__ = [
    "ABLATION_LABELS",
    "Action",
    "AgentTurn",
    "Bounds",
    "BuyerAbandon",
    "BuyerMessage",
    "BuyerProfile",
    "BuyerSimulator",
    "Decision",
    "Engine",
    "EngineConfig",
    "ExpressionKind",
    "GenerationRequest",
    "LanguageSkill",
    "PlannerConfig",
    "PriceExtraction",
    "Product",
    "SamplerConfig",
    "Session",
    "SessionStatus",
    "Speaker",
    "Utterance",
    "ablation_config",
    "advance",
    "anticipate",
    "choose_skill",
    "extract",
    "generate",
    "new_session",
    "parse_expressions",
    "plan",
    "resolve",
    "run_batch",
    "sample_price",
    "sl_ratio",
    "synth_corpus",
    "template_reply",
    "update_bounds",
    "validate",
    "willingness",
]
