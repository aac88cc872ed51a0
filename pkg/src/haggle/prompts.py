"""Prompt bundle loading and placeholder rendering.

Templates use ``{{name}}`` placeholders. Rendering is strict: every
placeholder in a template must be bound, and unknown bindings are
ignored. Default templates ship as package data and can be overridden
with a JSON file of the same shape.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_PLACEHOLDER_RE = re.compile(r"\{\{(\w+)\}\}")


class MissingPlaceholder(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no binding for placeholder {{{{{name}}}}}")


def placeholders(template: str) -> set[str]:
    return set(_PLACEHOLDER_RE.findall(template))


def render(template: str, bindings: dict[str, str]) -> str:
    def substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in bindings:
            raise MissingPlaceholder(name)
        return bindings[name]

    return _PLACEHOLDER_RE.sub(substitute, template)


@dataclass(frozen=True)
class PromptBundle:
    action_prompt: str
    bidirectional_prompt: str
    response_prompt: str

    @classmethod
    def from_file(cls, path: str | Path) -> "PromptBundle":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "PromptBundle":
        missing = {"action_prompt", "bidirectional_prompt", "response_prompt"} - set(data)
        if missing:
            raise ValueError(f"prompt bundle missing keys: {sorted(missing)}")
        return cls(
            action_prompt=data["action_prompt"],
            bidirectional_prompt=data["bidirectional_prompt"],
            response_prompt=data["response_prompt"],
        )


def load_default_bundle() -> PromptBundle:
    text = resources.files("haggle.data").joinpath("prompts.json").read_text("utf-8")
    return PromptBundle.from_dict(json.loads(text))
