from __future__ import annotations

from pathlib import Path

import pytest

from trendcast.engine import RundownEngine

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SNEAKERS_CATALOG = FIXTURES / "catalog.sneakers.json"
SNEAKERS_TRENDS = FIXTURES / "trends.sneakers.json"
FULL_CATALOG = FIXTURES / "catalog.json"
FULL_TRENDS = FIXTURES / "trends.json"
TEMPLATES = FIXTURES / "templates.json"

# The worked sneakers example, reproduced exactly by seed 0 on the fixture.
SAMPLE_RUNDOWN_SEED = 0
SAMPLE_RUNDOWN = (
    "More sneakers dropped recently including Yeezy Boost 700 and Adidas Desert Rat Black. "
    "The Adidas Desert Rat Black is the most trending Sneaker. "
    "Not just another basic black sneaker, the latest drop from Yeezy is a tonal mix of "
    "black mesh, black suede, and a black retro futuristic 1990s-inspired sole. "
    "The popularity of Adidas Desert Rat Black has increased 30 percent since last month."
)


@pytest.fixture(scope="session")
def sneakers_engine() -> RundownEngine:
    return RundownEngine.from_paths(SNEAKERS_CATALOG, SNEAKERS_TRENDS, TEMPLATES)


@pytest.fixture(scope="session")
def full_engine() -> RundownEngine:
    return RundownEngine.from_paths(FULL_CATALOG, FULL_TRENDS, TEMPLATES)
