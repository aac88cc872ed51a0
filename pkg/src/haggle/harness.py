"""Batch self-play evaluation.

Runs seeded episodes across ablation configurations, aggregates AT, SR,
and mean sale-to-list ratio per configuration, and persists transcripts
(JSONL), reports (JSON and CSV), and a metrics figure. Episode i uses
seed base_seed + i for every configuration label, so each ablation row
faces an identical buyer.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .buyer import BuyerProfile, BuyerSimulator, BuyerStep
from .engine import ABLATION_LABELS, Engine, EngineConfig, ablation_config
from .extraction import parse_expressions, resolve
from .metrics import sl_ratio
from .models import Product, Session, SessionStatus, Speaker, new_session, session_to_dict
from .money import Money
from .session import BuyerAbandon, BuyerMessage, advance

from importlib import resources

_TITLES = (
    ("Mountain bike, barely used", "sports"),
    ("Espresso machine", "kitchen"),
    ("Noise-cancelling headphones", "electronics"),
    ("Vintage film camera", "photography"),
    ("Standing desk", "furniture"),
    ("Acoustic guitar", "music"),
    ("Robot vacuum", "appliances"),
    ("Road bike helmet", "sports"),
    ("Mechanical keyboard", "electronics"),
    ("Pixel 6, good condition", "phones"),
)
_DESCRIPTIONS = (
    "Lightly used, kept in a smoke-free home.",
    "Works perfectly, selling because of a move.",
    "Minor cosmetic wear, fully functional.",
    "Comes with the original box and accessories.",
)


def load_default_profile_distribution() -> dict[str, Any]:
    text = resources.files("haggle.data").joinpath("buyer_profiles.json").read_text("utf-8")
    return json.loads(text)


def load_profile_distribution(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sample_product(rng: random.Random, distribution: dict[str, Any], index: int) -> Product:
    ranges = distribution["product"]
    lo, hi = ranges["list_price_units"]
    list_price = rng.randint(int(lo), int(hi)) * 100
    b_lo, b_hi = ranges["bottom_ratio"]
    bottom = int(round(list_price * rng.uniform(float(b_lo), float(b_hi)) / 100)) * 100
    bottom = max(100, min(bottom, list_price))
    title, category = _TITLES[rng.randrange(len(_TITLES))]
    return Product(
        id=f"p-{index:05d}",
        title=title,
        description=rng.choice(_DESCRIPTIONS),
        category=category,
        list_price=list_price,
        bottom_price=bottom,
    )


def sample_profile(
    rng: random.Random, product: Product, distribution: dict[str, Any], rng_seed: int
) -> BuyerProfile:
    ranges = distribution["buyer"]

    def uniform(key: str) -> float:
        lo, hi = ranges[key]
        return rng.uniform(float(lo), float(hi))

    target = int(round(product.list_price * uniform("target_ratio") / 100)) * 100
    walkaway = int(round(product.list_price * uniform("walkaway_ratio") / 100)) * 100
    walkaway = max(target, walkaway)
    p_lo, p_hi = ranges["patience"]
    return BuyerProfile(
        target_price=max(100, target),
        walkaway_price=max(100, walkaway),
        patience=rng.randint(int(p_lo), int(p_hi)),
        concession_rate=uniform("concession_rate"),
        question_prob=uniform("question_prob"),
        greeting_prob=uniform("greeting_prob"),
        rng_seed=rng_seed,
    )


@dataclass(frozen=True)
class Episode:
    session: Session
    buyer_steps: tuple[BuyerStep, ...]
    error: Optional[str] = None


def run_episode(
    engine: Engine,
    product: Product,
    profile: BuyerProfile,
    seed: int,
    session_id: str,
) -> Episode:
    session = new_session(product, rng_seed=seed, session_id=session_id)
    buyer = BuyerSimulator(profile)
    steps: list[BuyerStep] = []
    try:
        while session.status is SessionStatus.OPEN:
            step = buyer.step(session)
            steps.append(step)
            if step.kind == "abandon":
                session = advance(session, BuyerAbandon(), engine.config.t_max)
                break
            session = advance(session, BuyerMessage(step.text), engine.config.t_max)
            if session.status is not SessionStatus.OPEN:
                break
            session, _, _ = engine.agent_turn(session)
    except Exception as exc:  # an episode failure must not sink the batch
        return Episode(session=session, buyer_steps=tuple(steps), error=repr(exc))
    return Episode(session=session, buyer_steps=tuple(steps))


def episode_turns(session: Session) -> int:
    # Dialogue rounds used; a buyer-accepted opener still counts as one.
    return max(1, len(session.decisions))


@dataclass(frozen=True)
class EpisodeReport:
    session_id: str
    config_label: str
    turns: int
    success: bool
    deal_price: Optional[Money]
    sl: Optional[float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "config_label": self.config_label,
            "turns": self.turns,
            "success": self.success,
            "deal_price": self.deal_price,
            "sl_ratio": self.sl,
        }


@dataclass(frozen=True)
class BatchReport:
    config_label: str
    episode_count: int
    at: Optional[float]
    at_all_episodes: float
    sr: float
    sl_mean: Optional[float]
    episodes: tuple[EpisodeReport, ...] = field(repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "config_label": self.config_label,
            "episodes": self.episode_count,
            "at": self.at,
            "at_all_episodes": self.at_all_episodes,
            "sr": self.sr,
            "sl_mean": self.sl_mean,
            "per_episode": [e.to_dict() for e in self.episodes],
        }


def episode_report(session: Session, label: str) -> EpisodeReport:
    success = session.status is SessionStatus.DEAL
    product = session.product
    return EpisodeReport(
        session_id=session.id,
        config_label=label,
        turns=episode_turns(session),
        success=success,
        deal_price=session.deal_price,
        sl=(
            sl_ratio(session.deal_price, product.list_price, product.bottom_price)
            if success
            else None
        ),
    )


def aggregate(label: str, episodes: Sequence[EpisodeReport]) -> BatchReport:
    succeeded = [e for e in episodes if e.success]
    at = sum(e.turns for e in succeeded) / len(succeeded) if succeeded else None
    at_all = sum(e.turns for e in episodes) / len(episodes) if episodes else 0.0
    sls = [e.sl for e in succeeded if e.sl is not None]
    return BatchReport(
        config_label=label,
        episode_count=len(episodes),
        at=at,
        at_all_episodes=at_all,
        sr=len(succeeded) / len(episodes) if episodes else 0.0,
        sl_mean=sum(sls) / len(sls) if sls else None,
        episodes=tuple(episodes),
    )


def run_batch(
    labels: Sequence[str] = ABLATION_LABELS,
    profiles_config: Optional[dict[str, Any]] = None,
    n_episodes: int = 100,
    base_seed: int = 1,
    out_dir: Optional[str | Path] = None,
    base_config: Optional[EngineConfig] = None,
    config_overrides: Optional[dict[str, EngineConfig]] = None,
) -> list[BatchReport]:
    """Run the paired-seed episode grid and optionally persist artifacts."""
    if n_episodes <= 0:
        raise ValueError("n_episodes must be positive")
    distribution = profiles_config or load_default_profile_distribution()
    reports: list[BatchReport] = []
    transcript_lines: list[str] = []

    for label in labels:
        if config_overrides and label in config_overrides:
            config = config_overrides[label]
        else:
            config = ablation_config(label, base_config)
        engine = Engine(config)
        episodes: list[EpisodeReport] = []
        for i in range(n_episodes):
            seed = base_seed + i
            setup_rng = random.Random(f"{base_seed}:{i}:setup")
            product = sample_product(setup_rng, distribution, i)
            profile = sample_profile(setup_rng, product, distribution, rng_seed=seed)
            episode = run_episode(engine, product, profile, seed, f"{label}-{i:05d}")
            episodes.append(episode_report(episode.session, label))
            line = {"config_label": label, **session_to_dict(episode.session)}
            transcript_lines.append(json.dumps(line, sort_keys=True))
        reports.append(aggregate(label, episodes))

    if out_dir is not None:
        write_artifacts(Path(out_dir), reports, transcript_lines, base_seed, n_episodes)
    return reports


def report_payload(
    reports: Sequence[BatchReport], base_seed: int, n_episodes: int
) -> dict[str, Any]:
    return {
        "base_seed": base_seed,
        "n_episodes": n_episodes,
        "labels": [r.config_label for r in reports],
        "batches": [r.to_dict() for r in reports],
    }


def write_artifacts(
    out_dir: Path,
    reports: Sequence[BatchReport],
    transcript_lines: Sequence[str],
    base_seed: int,
    n_episodes: int,
) -> dict[str, Path]:
    from .figures import render_report_figure  # matplotlib import stays lazy

    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "transcripts": out_dir / "transcripts.jsonl",
        "report_json": out_dir / "report.json",
        "report_csv": out_dir / "report.csv",
        "figure": out_dir / "report.png",
    }
    paths["transcripts"].write_text("\n".join(transcript_lines) + "\n", encoding="utf-8")
    payload = report_payload(reports, base_seed, n_episodes)
    paths["report_json"].write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    rows = ["config_label,episodes,AT,SR,SL_mean"]
    for r in reports:
        at = "" if r.at is None else f"{r.at:.6g}"
        sl = "" if r.sl_mean is None else f"{r.sl_mean:.6g}"
        rows.append(f"{r.config_label},{r.episode_count},{at},{r.sr:.6g},{sl}")
    paths["report_csv"].write_text("\n".join(rows) + "\n", encoding="utf-8")
    render_report_figure(reports, paths["figure"])
    return paths


def recompute_from_transcripts(path: str | Path) -> list[BatchReport]:
    """Rebuild per-label reports from a persisted transcripts.jsonl."""
    from .models import session_from_dict

    by_label: dict[str, list[EpisodeReport]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            data = json.loads(line)
            label = data["config_label"]
            session = session_from_dict(data)
            if label not in by_label:
                by_label[label] = []
                order.append(label)
            by_label[label].append(episode_report(session, label))
    return [aggregate(label, by_label[label]) for label in order]


def synth_corpus(n: int, seed: int, label: str = "all") -> list[dict[str, Any]]:
    """Generate n annotated self-play dialogues with gold action and offer labels."""
    if n <= 0:
        raise ValueError("n must be positive")
    distribution = load_default_profile_distribution()
    engine = Engine(ablation_config(label))
    dialogues = []
    for i in range(n):
        episode_seed = seed + i
        setup_rng = random.Random(f"{seed}:{i}:synth")
        product = sample_product(setup_rng, distribution, i)
        profile = sample_profile(setup_rng, product, distribution, rng_seed=episode_seed)
        episode = run_episode(engine, product, profile, episode_seed, f"synth-{i:05d}")
        buyer_lines = []
        turn = 0
        for step in episode.buyer_steps:
            if step.kind == "abandon":
                break
            buyer_lines.append({"turn": turn, "kind": step.kind, "offer": step.offer})
            turn += 2
        dialogues.append(
            {
                "config_label": label,
                "session": session_to_dict(episode.session),
                "buyer_lines": buyer_lines,
            }
        )
    return dialogues


def reextract_buyer_offers(dialogue: dict[str, Any]) -> list[Optional[Money]]:
    """Re-run the extractor over a dialogue's buyer lines, replaying the
    seller-offer context exactly as the engine saw it."""
    from .models import session_from_dict

    session = session_from_dict(dialogue["session"])
    offers: list[Optional[Money]] = []
    seller_offers: list[Money] = []
    decision_idx = 0
    for utterance in session.utterances:
        if utterance.speaker is Speaker.BUYER:
            extraction = resolve(
                parse_expressions(utterance.text), session.product, seller_offers
            )
            offers.append(extraction.price)
        else:
            decision = session.decisions[decision_idx]
            decision_idx += 1
            if decision.seller_price is not None:
                seller_offers.append(decision.seller_price)
    return offers
