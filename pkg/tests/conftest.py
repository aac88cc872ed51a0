from __future__ import annotations

import json
from pathlib import Path

import pytest

from haggle.models import Product

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def product() -> Product:
    return Product(
        id="p-test",
        title="Espresso machine",
        description="Works perfectly, light wear.",
        category="kitchen",
        list_price=25000,
        bottom_price=20000,
    )


def load_corpus() -> list[dict]:
    lines = (FIXTURES / "extraction_corpus.jsonl").read_text("utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]
