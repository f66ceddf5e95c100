"""Content selection: picks which trends make up a rundown, deterministically.

All randomness flows through one named, portable generator (splitmix64) so
a plan is fully reproducible from its seed on any platform.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Sequence

from .catalog import Catalog, DesignStory, UnknownCategoryError
from .trend_model import TrendMatch, TrendScope

RNG_NAME = "splitmix64"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class SelectionRng:
    """splitmix64, the fixed generator behind every selection draw.

    Chosen for a tiny portable core (64-bit adds, shifts, xors) so other
    implementations can replay plans bit-for-bit from the same seed.
    """

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self._state = seed

    @property
    def name(self) -> str:
        return RNG_NAME

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n), by rejection. Always consumes >= 1 draw."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def pick(self, items: Sequence[Any]) -> Any:
        """Uniform choice. Consumes a draw even for a single-item sequence."""
        return items[self.below(len(items))]

    def pick_two(self, items: Sequence[Any]) -> tuple[Any, Any]:
        """Two distinct uniform choices, without replacement (two draws)."""
        if len(items) < 2:
            raise ValueError("need at least two items")
        first = self.below(len(items))
        rest = [item for i, item in enumerate(items) if i != first]
        return items[first], rest[self.below(len(rest))]


def derive_seed(seed: int, index: int) -> int:
    """A stream of per-turn seeds from one session seed."""
    return _mix64((seed + index * _GAMMA) & _MASK64)


class NoContentError(LookupError):
    """No matched trends are available for the requested category."""

    def __init__(self, category_id: str):
        self.category_id = category_id
        super().__init__(f"no trends available for category {category_id!r}")


@dataclass(frozen=True)
class RundownPlan:
    """What a rundown will say: up to one category trend, up to two product
    trends about a focus product, and optionally that product's design story.
    """

    category_trend: TrendMatch | None
    product_trend_1: TrendMatch | None
    design_story: DesignStory | None
    product_trend_2: TrendMatch | None
    focus_product_id: str | None
    seed: int

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if (
            self.category_trend is None
            and self.product_trend_1 is None
            and self.product_trend_2 is None
        ):
            raise ValueError("a plan must carry at least one trend")
        if self.product_trend_2 is not None:
            if self.product_trend_1 is None:
                raise ValueError("product_trend_2 requires product_trend_1")
            if self.product_trend_1 is self.product_trend_2:
                raise ValueError("product trends must be distinct match instances")
        if self.design_story is not None:
            if self.product_trend_1 is None:
                raise ValueError("a design story requires product_trend_1")
            if self.design_story.subject_product_id != self.product_trend_1.trend.product_id:
                raise ValueError("design story must be about the focus product")
        if self.focus_product_id is not None:
            if self.product_trend_1 is None:
                raise ValueError("a focus product requires product_trend_1")
            if self.focus_product_id != self.product_trend_1.trend.product_id:
                raise ValueError("focus product must match product_trend_1")

    def product_trends(self) -> list[TrendMatch]:
        return [t for t in (self.product_trend_1, self.product_trend_2) if t is not None]


def select_content(
    matches: Sequence[TrendMatch],
    catalog: Catalog,
    category_id: str,
    seed: int,
) -> RundownPlan:
    """Choose a rundown's content from the matched trends of one category.

    Draw order is fixed: (1) uniform pick of the category-level trend,
    (2) focus tie-break (only when tied), (3) the product-trend picks.
    The focus product is the one named by the most product-level matches;
    when it has two or more matches both product slots stay on the focus,
    otherwise the second slot falls back to some other product's trend.
    """
    if not catalog.has_category(category_id):
        raise UnknownCategoryError(category_id)
    in_category = [m for m in matches if m.trend.category_id == category_id]
    if not in_category:
        raise NoContentError(category_id)

    rng = SelectionRng(seed)
    category_level = [m for m in in_category if m.kind.scope is TrendScope.CATEGORY]
    product_level = [m for m in in_category if m.kind.scope is TrendScope.PRODUCT]

    category_trend = rng.pick(category_level) if category_level else None

    focus_id: str | None = None
    trend_1: TrendMatch | None = None
    trend_2: TrendMatch | None = None
    story: DesignStory | None = None
    if product_level:
        counts = Counter(m.trend.product_id for m in product_level)
        best = max(counts.values())
        tied = sorted(pid for pid, count in counts.items() if count == best)
        focus_id = tied[0] if len(tied) == 1 else tied[rng.below(len(tied))]

        focus_matches = [m for m in product_level if m.trend.product_id == focus_id]
        if len(focus_matches) >= 2:
            trend_1, trend_2 = rng.pick_two(focus_matches)
        else:
            trend_1 = focus_matches[0]
            others = [m for m in product_level if m.trend.product_id != focus_id]
            trend_2 = rng.pick(others) if others else None

        if focus_id in catalog:
            candidate = catalog.get_product(focus_id).design_story
            if candidate is not None and candidate.subject_product_id == focus_id:
                story = candidate

    return RundownPlan(
        category_trend=category_trend,
        product_trend_1=trend_1,
        design_story=story,
        product_trend_2=trend_2,
        focus_product_id=focus_id,
        seed=seed,
    )


def _qualifier_to_json(value: Any) -> Any:
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, tuple):
        return list(value)
    return value


def match_to_dict(match: TrendMatch | None) -> dict[str, Any] | None:
    if match is None:
        return None
    trend = match.trend
    return {
        "kind": trend.kind_tag,
        "category": trend.category_id,
        "product": trend.product_id,
        "qualifiers": {k: _qualifier_to_json(v) for k, v in trend.qualifiers.items()},
    }


def plan_to_dict(plan: RundownPlan) -> dict[str, Any]:
    """Plan as plain JSON data, with the generator name pinned alongside."""
    return {
        "category_trend": match_to_dict(plan.category_trend),
        "product_trend_1": match_to_dict(plan.product_trend_1),
        "design_story": plan.design_story.text if plan.design_story else None,
        "product_trend_2": match_to_dict(plan.product_trend_2),
        "focus_product": plan.focus_product_id,
        "seed": plan.seed,
        "rng": RNG_NAME,
    }
