"""Command-line interface.

Subcommands: simulate (seeded self-play batches), eval (recompute
metrics from persisted transcripts), extract (debug the price
extractor on one utterance), play (terminal REPL as the buyer), and
serve (run the HTTP service).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .engine import ABLATION_LABELS, Engine, EngineConfig
from .extraction import extract
from .models import Product, new_session, Speaker, Utterance
from .money import format_money, from_units
from .session import BuyerMessage, advance
from . import harness


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"error: cannot read {path}: {exc}")


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    if getattr(args, "config", None):
        try:
            config = EngineConfig.from_dict(_load_json(args.config))
        except (TypeError, ValueError) as exc:
            raise SystemExit(f"error: bad engine config {args.config}: {exc}")
    else:
        config = EngineConfig()
    if getattr(args, "prompts", None):
        from dataclasses import replace

        config = replace(config, prompts_path=args.prompts)
    return config


def cmd_simulate(args: argparse.Namespace) -> int:
    labels = list(ABLATION_LABELS)
    base_config = None
    overrides = None
    profiles = None
    if args.config:
        batch = _load_json(args.config)
        labels = batch.get("labels", labels)
        try:
            if "base" in batch:
                base_config = EngineConfig.from_dict(batch["base"])
            if "overrides" in batch:
                overrides = {
                    label: EngineConfig.from_dict(cfg)
                    for label, cfg in batch["overrides"].items()
                }
        except (TypeError, ValueError) as exc:
            raise SystemExit(f"error: bad batch config {args.config}: {exc}")
        profiles = batch.get("profiles")
        if isinstance(profiles, str):  # a path to a distribution file
            profiles = _load_json(profiles)
    if args.labels:
        labels = [label.strip() for label in args.labels.split(",") if label.strip()]
    out_dir = Path(args.out or f"runs/batch-s{args.seed}-n{args.episodes}")
    try:
        reports = harness.run_batch(
            labels=labels,
            profiles_config=profiles,
            n_episodes=args.episodes,
            base_seed=args.seed,
            out_dir=out_dir,
            base_config=base_config,
            config_overrides=overrides,
        )
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    for report in reports:
        at = "-" if report.at is None else f"{report.at:.2f}"
        sl = "-" if report.sl_mean is None else f"{report.sl_mean:.4f}"
        print(f"{report.config_label:>16}  AT={at}  SR={report.sr:.4f}  SL={sl}")
    print(f"artifacts written to {out_dir}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    transcripts = Path(args.transcripts)
    if not transcripts.is_file():
        raise SystemExit(f"error: no such transcripts file: {transcripts}")
    reports = harness.recompute_from_transcripts(transcripts)
    if not reports:
        raise SystemExit("error: transcripts file holds no sessions")
    first_line = json.loads(
        next(line for line in transcripts.read_text("utf-8").splitlines() if line.strip())
    )
    base_seed = int(first_line.get("rng_seed", 0))
    n_episodes = reports[0].episode_count
    out_dir = Path(args.out or transcripts.parent)
    lines = [
        line
        for line in transcripts.read_text("utf-8").splitlines()
        if line.strip()
    ]
    harness.write_artifacts(out_dir, reports, lines, base_seed, n_episodes)
    for report in reports:
        at = "-" if report.at is None else f"{report.at:.2f}"
        sl = "-" if report.sl_mean is None else f"{report.sl_mean:.4f}"
        print(f"{report.config_label:>16}  AT={at}  SR={report.sr:.4f}  SL={sl}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    raw = sys.stdin.read()
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: stdin is not JSON: {exc}")
    if "text" not in payload or "list_price" not in payload:
        raise SystemExit("error: payload needs at least {text, list_price}")
    list_price = from_units(payload["list_price"])
    bottom = from_units(payload.get("bottom_price", payload["list_price"]))
    product = Product(
        id="cli",
        title=payload.get("title", "item"),
        description=payload.get("description", ""),
        category=payload.get("category", "general"),
        list_price=list_price,
        bottom_price=bottom,
    )
    seller_offers = [from_units(v) for v in payload.get("seller_offers", [])]
    history = [Utterance(speaker=Speaker.BUYER, text=payload["text"], turn=0, ts=0)]
    result = extract(product, history, seller_offers)
    print(
        json.dumps(
            {
                "price": format_money(result.price) if result.price is not None else None,
                "kind": result.kind.value,
                "base_used": (
                    format_money(result.base_used) if result.base_used is not None else None
                ),
                "audit": list(result.audit),
                "source_span": list(result.source_span) if result.source_span else None,
            },
            indent=2,
        )
    )
    return 0


def cmd_play(args: argparse.Namespace) -> int:
    config = _engine_config(args)
    engine = Engine(config)
    product = Product(
        id="play",
        title=args.title,
        description=args.description,
        category="general",
        list_price=from_units(args.list_price),
        bottom_price=from_units(args.bottom_price),
    )
    seed = args.seed if args.seed is not None else random.getrandbits(31)
    session = new_session(product, rng_seed=seed)
    print(f"listing: {product.title} at {format_money(product.list_price)} "
          f"(session {session.id}, seed {seed})")
    print("type buyer messages; /quit to stop\n")
    while session.status.value == "open":
        try:
            line = input("buyer> ").strip()
        except (EOFError, KeyboardInterrupt):
            print()
            break
        if not line or line == "/quit":
            break
        session = advance(session, BuyerMessage(line), config.t_max)
        if session.status.value != "open":
            break
        session, decision, text = engine.agent_turn(session)
        print(f"agent> {text}")
        skill = decision.skill.value if decision.skill else "-"
        price = format_money(decision.seller_price) if decision.seller_price else "-"
        seen = format_money(decision.buyer_price_seen) if decision.buyer_price_seen else "-"
        print(f"       [{decision.action.value} | skill {skill} | price {price} "
              f"| buyer offer seen {seen}]")
        for move in decision.anticipated_buyer_moves:
            print(f"       anticipated: {move}")
    print(f"session ended: {session.status.value}", end="")
    if session.deal_price is not None:
        print(f" at {format_money(session.deal_price)}")
    else:
        print()
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        data_dir=args.data_dir,
        engine=_engine_config(args),
        static_dir=args.static_dir,
    )
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="haggle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run seeded self-play batches")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--labels", default=None, help="comma-separated config labels")
    p.add_argument("--config", default=None, help="batch config JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="recompute metrics from transcripts.jsonl")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("extract", help="run the price extractor on stdin JSON")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("play", help="terminal REPL: you type the buyer side")
    p.add_argument("--title", default="Second-hand item")
    p.add_argument("--description", default="")
    p.add_argument("--list-price", type=float, required=True)
    p.add_argument("--bottom-price", type=float, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="engine config JSON path")
    p.add_argument("--prompts", default=None, help="prompt bundle JSON path")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("BARGAIN_PORT", "8000")))
    p.add_argument("--data-dir", default=os.environ.get("BARGAIN_DATA_DIR", "./data"))
    p.add_argument("--static-dir", default=os.environ.get("BARGAIN_STATIC_DIR"))
    p.add_argument("--config", default=None, help="engine config JSON path")
    p.add_argument("--prompts", default=None, help="prompt bundle JSON path")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
