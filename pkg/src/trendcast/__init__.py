"""Conversational shopping-trends engine.

Digests a feed of sales/search trend statistics into short spoken-style
category rundowns, and drives a small rule-based dialog around them
(capability pitch, sample rundown, drill-down, wish list). Content
selection is seeded and fully replayable.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .catalog import Catalog, CatalogError, DesignStory, Price, ProductRecord, load_catalog
from .engine import RundownEngine
from .realization import Rundown, Template, parse_template
from .selection import NoContentError, RundownPlan, SelectionRng, select_content
from .trend_model import (
    InputTrend,
    SystemTrendKind,
    TrendMatch,
    TrendScope,
    builtin_registry,
    load_trend_feed,
    match_trends,
)

__all__ = [
    "Catalog",
    "CatalogError",
    "DesignStory",
    "InputTrend",
    "NoContentError",
    "Price",
    "ProductRecord",
    "Rundown",
    "RundownEngine",
    "RundownPlan",
    "SelectionRng",
    "SystemTrendKind",
    "Template",
    "TrendMatch",
    "TrendScope",
    "builtin_registry",
    "load_catalog",
    "load_trend_feed",
    "match_trends",
    "parse_template",
    "select_content",
    "__version__",
]
