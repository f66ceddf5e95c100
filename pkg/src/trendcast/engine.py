"""The rundown engine: one object tying catalog, trend feed, and templates together."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from .catalog import Catalog, load_catalog
from .realization import (
    Rundown,
    Template,
    load_templates,
    realize_rundown,
    validate_template_for_kind,
)
from .selection import RundownPlan, select_content
from .trend_model import (
    InputTrend,
    SystemTrendKind,
    TrendMatch,
    builtin_registry,
    load_trend_feed,
    match_trends,
)

logger = logging.getLogger(__name__)


class RundownEngine:
    """Matches a trend feed against the registry once, then serves seeded,
    fully reproducible rundowns for any category on demand."""

    def __init__(
        self,
        catalog: Catalog,
        trends: Sequence[InputTrend],
        templates: dict[str, Template],
        registry: Sequence[SystemTrendKind] | None = None,
    ):
        self.catalog = catalog
        self.templates = dict(templates)
        self.registry = list(registry) if registry is not None else builtin_registry()

        result = match_trends(trends, self.registry)
        if result.dropped_count:
            logger.info("dropped %d unmatched trends from the feed", result.dropped_count)
        self.matches = [m for m in result.matches if self._grounded(m)]
        ungrounded = len(result.matches) - len(self.matches)
        if ungrounded:
            logger.info("dropped %d trends that reference unknown catalog entries", ungrounded)

    def _grounded(self, match: TrendMatch) -> bool:
        """A matched trend is usable only if the catalog can back its words."""
        trend = match.trend
        if not self.catalog.has_category(trend.category_id):
            return False
        if trend.product_id is not None:
            if trend.product_id not in self.catalog:
                return False
            if self.catalog.get_product(trend.product_id).category_id != trend.category_id:
                return False
        id_list = trend.qualifiers.get("product_id_list")
        if isinstance(id_list, tuple) and any(pid not in self.catalog for pid in id_list):
            return False
        return True

    @classmethod
    def from_paths(
        cls,
        catalog_path: str | Path,
        trends_path: str | Path,
        templates_path: str | Path | None = None,
    ) -> RundownEngine:
        catalog = load_catalog(catalog_path)
        trends = load_trend_feed(trends_path)
        if templates_path is not None:
            templates = load_templates(templates_path)
        else:
            from .realization import default_templates

            templates = default_templates()
        return cls(catalog, trends, templates)

    def categories(self) -> list[str]:
        """Catalog categories, lexicographic."""
        return sorted(self.catalog.categories)

    def categories_with_trends(self) -> list[str]:
        return sorted({m.trend.category_id for m in self.matches})

    def matches_for_category(self, category_id: str) -> list[TrendMatch]:
        return [m for m in self.matches if m.trend.category_id == category_id]

    def plan(self, category_id: str, seed: int) -> RundownPlan:
        return select_content(self.matches, self.catalog, category_id, seed)

    def generate(self, category_id: str, seed: int) -> Rundown:
        """A full rundown for a category; same seed, same text, always."""
        return realize_rundown(self.plan(category_id, seed), self.catalog, self.templates)

    def validate(self) -> list[str]:
        """Cross-check registry, templates, and catalog; returns problems found."""
        problems: list[str] = []
        for kind in self.registry:
            template = self.templates.get(kind.template_id)
            if template is None:
                problems.append(
                    f"kind {kind.kind_tag!r} points at missing template {kind.template_id!r}"
                )
                continue
            try:
                validate_template_for_kind(template, kind)
            except ValueError as exc:
                problems.append(str(exc))
        if not self.matches:
            problems.append("no usable trends: every feed entry was dropped")
        return problems
