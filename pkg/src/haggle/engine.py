"""End-to-end agent pipeline: extract, plan, sample, generate, advance.

The engine owns one session's turn loop and the per-session RNG stream;
callers may run many sessions concurrently but must apply one session's
turns serially.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Optional

from .backend import Backend
from .extraction import NO_PRICE, PriceExtraction, extract, llm_extract
from .generation import (
    DEFAULT_MAX_REPLY_CHARS,
    GenerationRequest,
    TemplateTable,
    generate,
    load_default_templates,
    load_templates,
    render_response_prompt,
)
from .models import Decision, Session
from .planner import PlannerConfig, plan
from .prompts import PromptBundle, load_default_bundle
from .sampling import SamplerConfig
from .session import DEFAULT_TURN_CAP, AgentTurn, advance


@dataclass(frozen=True)
class EngineConfig:
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    use_price_extractor: bool = True
    t_max: int = DEFAULT_TURN_CAP
    max_reply_chars: int = DEFAULT_MAX_REPLY_CHARS
    currency: str = "USD"
    prompts_path: Optional[str] = None
    templates_path: Optional[str] = None

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        planner = PlannerConfig(**data.get("planner", {}))
        sampler = SamplerConfig(**data.get("sampler", {}))
        known = {
            "use_price_extractor", "t_max", "max_reply_chars", "currency",
            "prompts_path", "templates_path",
        }
        extra = {k: v for k, v in data.items() if k in known}
        return cls(planner=planner, sampler=sampler, **extra)


#: The six ablation rows: which pipeline features each label enables.
ABLATION_LABELS = (
    "baseline",
    "price_extractor",
    "action",
    "language_skills",
    "bidirectional",
    "all",
)


def ablation_config(label: str, base: Optional[EngineConfig] = None) -> EngineConfig:
    base = base or EngineConfig()
    flags = {
        "baseline": dict(extractor=False, actions=False, skills=False, bidir=False),
        "price_extractor": dict(extractor=True, actions=False, skills=False, bidir=False),
        "action": dict(extractor=False, actions=True, skills=False, bidir=False),
        "language_skills": dict(extractor=False, actions=False, skills=True, bidir=False),
        "bidirectional": dict(extractor=False, actions=False, skills=False, bidir=True),
        "all": dict(extractor=True, actions=True, skills=True, bidir=True),
    }
    if label not in flags:
        raise ValueError(f"unknown ablation label {label!r}; expected one of {ABLATION_LABELS}")
    f = flags[label]
    planner = replace(
        base.planner,
        use_actions=f["actions"],
        use_skills=f["skills"],
        use_bidirectional=f["bidir"],
    )
    return replace(base, planner=planner, use_price_extractor=f["extractor"])


class Engine:
    """Drives the seller side of one or more sessions."""

    def __init__(
        self,
        config: Optional[EngineConfig] = None,
        bundle: Optional[PromptBundle] = None,
        templates: Optional[TemplateTable] = None,
        planner_backend: Optional[Backend] = None,
        generator_backend: Optional[Backend] = None,
        extractor_backend: Optional[Backend] = None,
    ):
        self.config = config or EngineConfig()
        if bundle is None:
            bundle = (
                PromptBundle.from_file(self.config.prompts_path)
                if self.config.prompts_path
                else load_default_bundle()
            )
        self.bundle = bundle
        if templates is None:
            templates = (
                load_templates(self.config.templates_path)
                if self.config.templates_path
                else load_default_templates()
            )
        self.templates = templates
        self.planner_backend = planner_backend
        self.generator_backend = generator_backend
        self.extractor_backend = extractor_backend

    def turn_rng(self, session: Session) -> random.Random:
        # Derived from the seed and the turn index, so a restarted service
        # resumes the same stream the original process would have used.
        return random.Random(f"{session.rng_seed}:agent:{session.agent_turns}")

    def extract_offer(self, session: Session) -> PriceExtraction:
        if not self.config.use_price_extractor:
            return NO_PRICE
        if self.extractor_backend is not None:
            return llm_extract(
                session.product,
                session.utterances,
                session.seller_offers,
                self.extractor_backend,
            )
        return extract(session.product, session.utterances, session.seller_offers)

    def agent_turn(
        self, session: Session, rng: Optional[random.Random] = None
    ) -> tuple[Session, Decision, str]:
        """Run one full agent turn; returns the advanced session, the
        decision, and the reply text."""
        rng = rng or self.turn_rng(session)
        extraction = self.extract_offer(session)
        decision = plan(
            session.product,
            session,
            extraction,
            self.config.planner,
            backend=self.planner_backend,
            rng=rng,
            sampler_config=self.config.sampler,
            bundle=self.bundle,
        )
        prompt = render_response_prompt(
            self.bundle, session.product, session, decision, self.config.max_reply_chars
        )
        request = GenerationRequest(
            product=session.product,
            session=session,
            decision=decision,
            prompt=prompt,
            max_reply_chars=self.config.max_reply_chars,
        )
        text = generate(request, backend=self.generator_backend, table=self.templates)
        advanced = advance(session, AgentTurn(decision=decision, text=text), self.config.t_max)
        return advanced, decision, text
