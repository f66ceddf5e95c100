from __future__ import annotations

import json
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from trendcast.trend_model import (
    InputTrend,
    MalformedTrendFeedError,
    SystemTrendKind,
    TrendMatch,
    TrendScope,
    builtin_registry,
    load_trend_feed,
    match_trends,
    qualifier_problems,
)

REGISTRY = builtin_registry()
TAGS = {kind.kind_tag for kind in REGISTRY}


def kind_by_tag(tag: str) -> SystemTrendKind:
    return next(k for k in REGISTRY if k.kind_tag == tag)


class TestBuiltinRegistry:
    def test_exactly_six_kinds_with_unique_tags(self):
        assert len(REGISTRY) == 6
        assert len(TAGS) == 6

    def test_expected_tags(self):
        assert TAGS == {
            "MostPopularProductInCategory",
            "ProductPopularitySurge",
            "ProductDiscountTrend",
            "NewCategoryProductsTrend",
            "MostSearchedProductInCategory",
            "CategorySalesSurge",
        }

    def test_scopes(self):
        category_scoped = {k.kind_tag for k in REGISTRY if k.scope is TrendScope.CATEGORY}
        assert category_scoped == {"NewCategoryProductsTrend", "CategorySalesSurge"}

    def test_discount_accepts_either_qualifier_group(self):
        discount = kind_by_tag("ProductDiscountTrend")
        assert discount.accepts({"old_price", "new_price"})
        assert discount.accepts({"discount_amount"})
        assert not discount.accepts({"old_price"})
        assert not discount.accepts({"new_price", "time_frame"})

    def test_surge_requires_both_qualifiers(self):
        surge = kind_by_tag("ProductPopularitySurge")
        assert surge.accepts({"percent_change", "time_frame", "rank"})
        assert not surge.accepts({"percent_change"})


def make_trend(tag: str, *, product: str | None = "p1", qualifiers=None) -> InputTrend:
    return InputTrend(
        kind_tag=tag,
        category_id="sneakers",
        product_id=product,
        qualifiers=qualifiers if qualifiers is not None else {"time_frame": "this week"},
    )


class TestTrendMatchInvariants:
    def test_tag_mismatch_rejected(self):
        trend = make_trend("MostPopularProductInCategory")
        with pytest.raises(ValueError, match="kind tag"):
            TrendMatch(kind_by_tag("MostSearchedProductInCategory"), trend)

    def test_scope_mismatch_rejected(self):
        trend = make_trend("MostPopularProductInCategory", product=None)
        with pytest.raises(ValueError, match="scope"):
            TrendMatch(kind_by_tag("MostPopularProductInCategory"), trend)

    def test_missing_qualifiers_rejected(self):
        trend = make_trend("ProductPopularitySurge", qualifiers={"percent_change": 5})
        with pytest.raises(ValueError, match="qualifiers"):
            TrendMatch(kind_by_tag("ProductPopularitySurge"), trend)


class TestQualifierValidation:
    def test_unknown_name_is_a_problem(self):
        assert qualifier_problems({"flavor": "grape"})

    def test_negative_price_is_a_problem(self):
        assert qualifier_problems({"discount_amount": Decimal("-1")})

    def test_non_finite_percent_is_a_problem(self):
        assert qualifier_problems({"percent_change": float("nan")})
        assert qualifier_problems({"percent_change": float("inf")})

    def test_negative_percent_is_fine(self):
        assert qualifier_problems({"percent_change": -12.5}) == []

    def test_duplicate_product_list_is_a_problem(self):
        assert qualifier_problems({"product_id_list": ("a", "a")})

    def test_empty_product_list_is_a_problem(self):
        assert qualifier_problems({"product_id_list": ()})

    def test_rank_must_be_positive_int(self):
        assert qualifier_problems({"rank": 0})
        assert qualifier_problems({"rank": True})
        assert qualifier_problems({"rank": 2}) == []


class TestMatchTrends:
    def test_matches_keep_input_order_and_identity(self):
        trends = [
            make_trend("MostPopularProductInCategory"),
            make_trend("MostSearchedProductInCategory", product="p2"),
        ]
        result = match_trends(trends, REGISTRY)
        assert [m.trend for m in result.matches] == trends
        assert all(m.trend is t for m, t in zip(result.matches, trends))
        assert result.dropped_count == 0

    def test_unknown_kind_dropped_silently(self):
        result = match_trends([make_trend("FlashSale")], REGISTRY)
        assert result.matches == []
        assert result.dropped_count == 1

    def test_scope_mismatch_dropped(self):
        product_scoped_as_category = make_trend("MostPopularProductInCategory", product=None)
        category_scoped_as_product = make_trend(
            "CategorySalesSurge",
            product="p1",
            qualifiers={"percent_change": 3, "time_frame": "last week"},
        )
        result = match_trends([product_scoped_as_category, category_scoped_as_product], REGISTRY)
        assert result == ([], 2)

    def test_missing_required_qualifiers_dropped(self):
        result = match_trends(
            [make_trend("ProductDiscountTrend", qualifiers={"old_price": Decimal("5")})],
            REGISTRY,
        )
        assert result == ([], 1)

    def test_invalid_qualifier_value_dropped(self):
        result = match_trends(
            [make_trend("MostPopularProductInCategory", qualifiers={"time_frame": ""})],
            REGISTRY,
        )
        assert result == ([], 1)

    def test_unknown_qualifier_name_drops_the_trend(self):
        trend = make_trend(
            "MostPopularProductInCategory",
            qualifiers={"time_frame": "this week", "sparkle": "yes"},
        )
        assert match_trends([trend], REGISTRY) == ([], 1)


_VALID_QUALIFIERS = {
    "MostPopularProductInCategory": {"time_frame": "this week"},
    "ProductPopularitySurge": {"percent_change": 30, "time_frame": "last month"},
    "ProductDiscountTrend": {"discount_amount": Decimal("40")},
    "NewCategoryProductsTrend": {"product_id_list": ("a", "b")},
    "MostSearchedProductInCategory": {"time_frame": "today"},
    "CategorySalesSurge": {"percent_change": 8, "time_frame": "last week"},
}


@st.composite
def trend_lists(draw):
    registry_tags = sorted(TAGS)
    trends = []
    for _ in range(draw(st.integers(0, 12))):
        tag = draw(st.sampled_from(registry_tags + ["BogusTrend"]))
        valid = draw(st.booleans())
        if tag in _VALID_QUALIFIERS:
            kind = kind_by_tag(tag)
            product = "p1" if kind.scope is TrendScope.PRODUCT else None
            if not valid and draw(st.booleans()):
                product = None if product else "p1"
            qualifiers = dict(_VALID_QUALIFIERS[tag]) if valid else {}
        else:
            product, qualifiers = "p1", {}
        trends.append(
            InputTrend(kind_tag=tag, category_id="c", product_id=product, qualifiers=qualifiers)
        )
    return trends


class TestMatchProperties:
    @given(trend_lists())
    def test_matches_are_a_subset_preserving_order(self, trends):
        result = match_trends(trends, REGISTRY)
        assert len(result.matches) + result.dropped_count == len(trends)
        by_identity = {id(t): i for i, t in enumerate(trends)}
        positions = [by_identity[id(m.trend)] for m in result.matches]
        assert positions == sorted(positions)

    @given(trend_lists())
    def test_deterministic(self, trends):
        first = match_trends(trends, REGISTRY)
        second = match_trends(trends, REGISTRY)
        assert first == second

    @given(trend_lists(), trend_lists())
    def test_distributes_over_concatenation(self, left, right):
        combined = match_trends(left + right, REGISTRY)
        left_only = match_trends(left, REGISTRY)
        right_only = match_trends(right, REGISTRY)
        assert combined.matches == left_only.matches + right_only.matches
        assert combined.dropped_count == left_only.dropped_count + right_only.dropped_count


class TestLoadTrendFeed:
    def test_fixture_parses_with_coercions(self, tmp_path):
        from tests.conftest import FULL_TRENDS

        trends = load_trend_feed(FULL_TRENDS)
        assert len(trends) == 14
        discount = next(t for t in trends if "old_price" in t.qualifiers)
        assert discount.qualifiers["old_price"] == Decimal("2550")
        listed = next(t for t in trends if "product_id_list" in t.qualifiers)
        assert isinstance(listed.qualifiers["product_id_list"], tuple)

    def test_product_scoped_iff_product_present(self):
        from tests.conftest import FULL_TRENDS

        for trend in load_trend_feed(FULL_TRENDS):
            assert trend.is_product_scoped == (trend.product_id is not None)

    def test_missing_kind_reports_index(self, tmp_path):
        path = tmp_path / "feed.json"
        path.write_text(json.dumps([{"category": "x", "observed_at": "2026-01-01"}]))
        with pytest.raises(MalformedTrendFeedError, match=r"trend\[0\]"):
            load_trend_feed(path)

    def test_bad_observed_at_rejected(self, tmp_path):
        path = tmp_path / "feed.json"
        path.write_text(
            json.dumps(
                [{"kind": "K", "category": "c", "observed_at": "not-a-date", "qualifiers": {}}]
            )
        )
        with pytest.raises(MalformedTrendFeedError, match="ISO-8601"):
            load_trend_feed(path)

    def test_non_array_root_rejected(self, tmp_path):
        path = tmp_path / "feed.json"
        path.write_text("{}")
        with pytest.raises(MalformedTrendFeedError, match="array"):
            load_trend_feed(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "feed.json"
        path.write_text("[{")
        with pytest.raises(MalformedTrendFeedError):
            load_trend_feed(path)
