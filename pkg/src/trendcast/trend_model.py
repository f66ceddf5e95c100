"""Trend data model: the input-trend feed, the system-trend registry, and matching."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, NamedTuple


class TrendScope(Enum):
    """Whether a trend talks about a whole category or a single product."""

    CATEGORY = "category"
    PRODUCT = "product"


#: Qualifier names a trend may carry. An entry outside this set makes the
#: trend unmatchable; the feed is external data, so we drop rather than crash.
QUALIFIER_NAMES = frozenset(
    {
        "product_id",
        "time_frame",
        "percent_change",
        "old_price",
        "new_price",
        "discount_amount",
        "rank",
        "product_id_list",
    }
)

PRICE_QUALIFIER_NAMES = frozenset({"old_price", "new_price", "discount_amount"})


class MalformedTrendFeedError(ValueError):
    """Raised when a trend feed file cannot be parsed into input trends."""

    def __init__(self, message: str, *, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"trend[{index}]: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class InputTrend:
    """One digested statistic from the sales/search feed.

    A trend is product-scoped exactly when ``product_id`` is set. The
    ``observed_at`` date is carried for bookkeeping and never interpreted;
    time semantics live in the ``time_frame`` qualifier phrase.
    """

    kind_tag: str
    category_id: str
    product_id: str | None = None
    qualifiers: dict[str, Any] = field(default_factory=dict)
    observed_at: str = "1970-01-01"

    def __post_init__(self):
        if not self.kind_tag:
            raise ValueError("kind_tag must be non-empty")
        if not self.category_id:
            raise ValueError("category_id must be non-empty")

    @property
    def is_product_scoped(self) -> bool:
        return self.product_id is not None


@dataclass(frozen=True)
class SystemTrendKind:
    """Registry entry for a trend type the engine knows how to phrase.

    ``required_qualifiers`` holds alternative requirement groups: a trend
    qualifies when at least one group is fully present. Most kinds have a
    single group; the discount kind accepts either an old/new price pair or
    a plain discount amount.
    """

    kind_tag: str
    scope: TrendScope
    required_qualifiers: tuple[frozenset[str], ...]
    template_id: str

    def accepts(self, qualifier_names: Iterable[str]) -> bool:
        names = set(qualifier_names)
        return any(group <= names for group in self.required_qualifiers)

    def qualifier_names(self) -> frozenset[str]:
        """Union of all requirement groups (names this kind may bind)."""
        out: set[str] = set()
        for group in self.required_qualifiers:
            out |= group
        return frozenset(out)


@dataclass(frozen=True)
class TrendMatch:
    """An input trend bound to the registry kind it satisfies."""

    kind: SystemTrendKind
    trend: InputTrend

    def __post_init__(self):
        if self.kind.kind_tag != self.trend.kind_tag:
            raise ValueError(
                f"kind tag mismatch: {self.kind.kind_tag!r} vs {self.trend.kind_tag!r}"
            )
        if (self.kind.scope is TrendScope.PRODUCT) != self.trend.is_product_scoped:
            raise ValueError(f"scope mismatch for {self.kind.kind_tag!r}")
        if not self.kind.accepts(self.trend.qualifiers):
            raise ValueError(f"missing required qualifiers for {self.kind.kind_tag!r}")


def builtin_registry() -> list[SystemTrendKind]:
    """The six trend kinds the engine ships with.

    Four cover the common feed statistics (new arrivals, popularity, search
    surges, discounts); CategorySalesSurge and MostSearchedProductInCategory
    round the set out so every category has at least one category-level and
    one search-side kind. The registry is plain data so deployments can
    extend it.
    """
    return [
        SystemTrendKind(
            "MostPopularProductInCategory",
            TrendScope.PRODUCT,
            (frozenset({"time_frame"}),),
            "most_popular_product",
        ),
        SystemTrendKind(
            "ProductPopularitySurge",
            TrendScope.PRODUCT,
            (frozenset({"percent_change", "time_frame"}),),
            "popularity_surge",
        ),
        SystemTrendKind(
            "ProductDiscountTrend",
            TrendScope.PRODUCT,
            (frozenset({"old_price", "new_price"}), frozenset({"discount_amount"})),
            "discount",
        ),
        SystemTrendKind(
            "NewCategoryProductsTrend",
            TrendScope.CATEGORY,
            (frozenset({"product_id_list"}),),
            "new_category_products",
        ),
        SystemTrendKind(
            "MostSearchedProductInCategory",
            TrendScope.PRODUCT,
            (frozenset({"time_frame"}),),
            "most_searched_product",
        ),
        SystemTrendKind(
            "CategorySalesSurge",
            TrendScope.CATEGORY,
            (frozenset({"percent_change", "time_frame"}),),
            "category_sales_surge",
        ),
    ]


def _is_finite_number(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    if isinstance(value, float):
        return math.isfinite(value)
    if isinstance(value, Decimal):
        return value.is_finite()
    return False


def qualifier_problems(qualifiers: dict[str, Any]) -> list[str]:
    """Validate qualifier values; returns problems (empty list = valid)."""
    problems: list[str] = []
    for name, value in qualifiers.items():
        if name not in QUALIFIER_NAMES:
            problems.append(f"unknown qualifier {name!r}")
        elif name == "percent_change":
            if not _is_finite_number(value):
                problems.append("percent_change must be a finite number")
        elif name in PRICE_QUALIFIER_NAMES:
            if not _is_finite_number(value) or value < 0:
                problems.append(f"{name} must be a non-negative amount")
        elif name == "product_id_list":
            if not isinstance(value, (list, tuple)) or not value:
                problems.append("product_id_list must be a non-empty list")
            elif not all(isinstance(v, str) and v for v in value):
                problems.append("product_id_list entries must be non-empty strings")
            elif len(set(value)) != len(value):
                problems.append("product_id_list must be duplicate-free")
        elif name == "rank":
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                problems.append("rank must be a positive integer")
        else:  # time_frame, product_id
            if not isinstance(value, str) or not value:
                problems.append(f"{name} must be a non-empty string")
    return problems


class MatchResult(NamedTuple):
    matches: list[TrendMatch]
    dropped_count: int


def match_trends(
    trends: Iterable[InputTrend], registry: Iterable[SystemTrendKind]
) -> MatchResult:
    """Bind input trends to registry kinds, silently dropping the rest.

    A trend matches when its kind tag is registered, its scope agrees with
    the kind, at least one requirement group of qualifiers is present, and
    every qualifier value it carries is valid. Input order is preserved and
    the number of dropped trends is reported for diagnostics.
    """
    by_tag = {kind.kind_tag: kind for kind in registry}
    matches: list[TrendMatch] = []
    total = 0
    for trend in trends:
        total += 1
        kind = by_tag.get(trend.kind_tag)
        if kind is None:
            continue
        if (kind.scope is TrendScope.PRODUCT) != trend.is_product_scoped:
            continue
        if not kind.accepts(trend.qualifiers):
            continue
        if qualifier_problems(trend.qualifiers):
            continue
        matches.append(TrendMatch(kind, trend))
    return MatchResult(matches, total - len(matches))


def _coerce_qualifier(name: str, value: Any) -> Any:
    """Normalize feed values: prices become Decimal, id lists become tuples.

    Values that do not coerce are kept as-is; validation drops the trend at
    match time instead of failing the whole feed.
    """
    if name in PRICE_QUALIFIER_NAMES:
        if isinstance(value, bool):
            return value
        if isinstance(value, (int, float, str)):
            try:
                return Decimal(str(value))
            except InvalidOperation:
                return value
    if name == "product_id_list" and isinstance(value, list):
        return tuple(value)
    return value


def load_trend_feed(path: str | Path) -> list[InputTrend]:
    """Read a feed file (JSON array of trend objects) into input trends."""
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise MalformedTrendFeedError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedTrendFeedError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedTrendFeedError("feed root must be a JSON array")

    trends: list[InputTrend] = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise MalformedTrendFeedError("entry is not an object", index=i)
        kind = item.get("kind")
        category = item.get("category")
        if not isinstance(kind, str) or not kind:
            raise MalformedTrendFeedError("missing or empty 'kind'", index=i)
        if not isinstance(category, str) or not category:
            raise MalformedTrendFeedError("missing or empty 'category'", index=i)
        product = item.get("product")
        if product is not None:
            if not isinstance(product, str):
                raise MalformedTrendFeedError("'product' must be a string or null", index=i)
            product = product.strip() or None
        observed_at = item.get("observed_at")
        if not isinstance(observed_at, str):
            raise MalformedTrendFeedError("missing 'observed_at'", index=i)
        try:
            datetime.fromisoformat(observed_at)
        except ValueError as exc:
            raise MalformedTrendFeedError(
                f"'observed_at' is not an ISO-8601 date: {observed_at!r}", index=i
            ) from exc
        raw_qualifiers = item.get("qualifiers") or {}
        if not isinstance(raw_qualifiers, dict):
            raise MalformedTrendFeedError("'qualifiers' must be an object", index=i)
        qualifiers = {
            name: _coerce_qualifier(name, value) for name, value in raw_qualifiers.items()
        }
        trends.append(
            InputTrend(
                kind_tag=kind,
                category_id=category,
                product_id=product,
                qualifiers=qualifiers,
                observed_at=observed_at,
            )
        )
    return trends
