"""Surface realization: template grammar, formatting, and rundown assembly.

Templates are literal text with ``{slot}`` holes; ``{{`` and ``}}`` escape
literal braces. How a slot value is worded (percents, prices, lists) is
derived from the slot's name, not stored in the template.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import Any, Mapping

from .catalog import Catalog, Price
from .selection import RundownPlan
from .trend_model import SystemTrendKind, TrendMatch

_SLOT_NAME_RE = re.compile(r"[a-z_][a-z0-9_]*\Z")

#: Slot names templates may use beyond the owning kind's qualifiers; all are
#: derived from the catalog record of the trend's subject.
CATALOG_SLOT_NAMES = frozenset(
    {"product_name", "brand", "category_name", "category_name_singular", "price", "product_list"}
)


class FormatHint(Enum):
    PLAIN = "plain"
    PERCENT_WORDS = "percent_words"
    PRICE_WORDS = "price_words"
    LIST_WITH_AND = "list_with_and"


def hint_for_slot(name: str) -> FormatHint:
    if name == "percent_change":
        return FormatHint.PERCENT_WORDS
    if name in ("old_price", "new_price", "discount_amount", "price"):
        return FormatHint.PRICE_WORDS
    if name in ("product_list", "product_id_list"):
        return FormatHint.LIST_WITH_AND
    return FormatHint.PLAIN


class TemplateError(ValueError):
    """Base class for template grammar errors. ``offset`` is a byte offset
    into the UTF-8 source pointing at the offending brace."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at byte offset {offset}")


class UnterminatedSlotError(TemplateError):
    def __init__(self, offset: int):
        super().__init__("unterminated slot", offset)


class EmptySlotNameError(TemplateError):
    def __init__(self, offset: int):
        super().__init__("empty slot name", offset)


class IllegalSlotNameError(TemplateError):
    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"illegal slot name {name!r}", offset)


class StrayBraceError(TemplateError):
    def __init__(self, offset: int):
        super().__init__("unescaped '}' outside a slot", offset)


class UnknownTemplateError(KeyError):
    def __init__(self, template_id: str):
        self.template_id = template_id
        super().__init__(f"no template with id {template_id!r}")


class MissingSlotBindingError(LookupError):
    def __init__(self, slot_name: str, template_id: str):
        self.slot_name = slot_name
        self.template_id = template_id
        super().__init__(f"template {template_id!r} needs a value for slot {slot_name!r}")


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Slot:
    name: str
    format_hint: FormatHint


@dataclass(frozen=True)
class Template:
    template_id: str
    source: str
    segments: tuple[Literal | Slot, ...]

    def slot_names(self) -> frozenset[str]:
        return frozenset(seg.name for seg in self.segments if isinstance(seg, Slot))


def _byte_offset(source: str, char_index: int) -> int:
    return len(source[:char_index].encode("utf-8"))


def parse_template(source: str, template_id: str = "") -> Template:
    """Parse template source into segments.

    Grammar errors carry the byte offset of the brace that caused them:
    ``parse_template("broken {slot")`` fails with an unterminated slot at
    offset 7.
    """
    segments: list[Literal | Slot] = []
    buffer: list[str] = []

    def flush():
        if buffer:
            segments.append(Literal("".join(buffer)))
            buffer.clear()

    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "{":
            if source[i + 1 : i + 2] == "{":
                buffer.append("{")
                i += 2
                continue
            end = source.find("}", i + 1)
            if end == -1:
                raise UnterminatedSlotError(_byte_offset(source, i))
            name = source[i + 1 : end]
            if not name:
                raise EmptySlotNameError(_byte_offset(source, i))
            if not _SLOT_NAME_RE.match(name):
                raise IllegalSlotNameError(name, _byte_offset(source, i))
            flush()
            segments.append(Slot(name, hint_for_slot(name)))
            i = end + 1
        elif ch == "}":
            if source[i + 1 : i + 2] == "}":
                buffer.append("}")
                i += 2
                continue
            raise StrayBraceError(_byte_offset(source, i))
        else:
            buffer.append(ch)
            i += 1
    flush()
    return Template(template_id=template_id, source=source, segments=tuple(segments))


def template_source(template: Template) -> str:
    """Rebuild source text from segments; inverse of parse_template."""
    parts: list[str] = []
    for seg in template.segments:
        if isinstance(seg, Literal):
            parts.append(seg.text.replace("{", "{{").replace("}", "}}"))
        else:
            parts.append("{" + seg.name + "}")
    return "".join(parts)


def validate_template_for_kind(template: Template, kind: SystemTrendKind) -> None:
    """A kind's template may only use the kind's qualifiers plus catalog slots."""
    allowed = kind.qualifier_names() | CATALOG_SLOT_NAMES
    unknown = template.slot_names() - allowed
    if unknown:
        raise ValueError(
            f"template {template.template_id!r} uses slots {sorted(unknown)} "
            f"not available to kind {kind.kind_tag!r}"
        )


def _format_number(value: Any) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    if isinstance(value, Decimal):
        normalized = value.normalize()
        if normalized == normalized.to_integral_value():
            return str(int(normalized))
        return str(normalized)
    return str(value)


def format_value(value: Any, hint: FormatHint) -> str:
    """Word a slot value for speech according to its format hint."""
    if hint is FormatHint.PERCENT_WORDS:
        if isinstance(value, (int, float, Decimal)) and value < 0:
            return f"minus {_format_number(-value)} percent"
        return f"{_format_number(value)} percent"
    if hint is FormatHint.PRICE_WORDS:
        if isinstance(value, Price):
            return value.spoken()
        return str(value)
    if hint is FormatHint.LIST_WITH_AND:
        items = [str(v) for v in value]
        if not items:
            return ""
        if len(items) == 1:
            return items[0]
        if len(items) == 2:
            return f"{items[0]} and {items[1]}"
        return ", ".join(items[:-1]) + f", and {items[-1]}"
    return str(value)


def render(template: Template, bindings: Mapping[str, Any]) -> str:
    parts: list[str] = []
    for seg in template.segments:
        if isinstance(seg, Literal):
            parts.append(seg.text)
        else:
            if seg.name not in bindings:
                raise MissingSlotBindingError(seg.name, template.template_id)
            parts.append(format_value(bindings[seg.name], seg.format_hint))
    return "".join(parts)


def _price_from_decimal(amount: Decimal, currency: str) -> Price:
    minor = int((amount * 100).to_integral_value())
    return Price(minor, currency)


def trend_bindings(match: TrendMatch, catalog: Catalog) -> dict[str, Any]:
    """Slot bindings for one matched trend: its qualifiers plus catalog facts.

    Qualifier amounts arrive as plain decimals; they are stamped with the
    subject product's currency (falling back to USD) so price slots can be
    spoken. A discount amount is derived from an old/new price pair when the
    pair is consistent.
    """
    trend = match.trend
    bindings: dict[str, Any] = dict(trend.qualifiers)

    record = None
    if trend.product_id is not None and trend.product_id in catalog:
        record = catalog.get_product(trend.product_id)
    currency = record.current_price.currency if record else "USD"

    for name in ("old_price", "new_price", "discount_amount"):
        value = bindings.get(name)
        if isinstance(value, Decimal):
            bindings[name] = _price_from_decimal(value, currency)
    if "discount_amount" not in bindings:
        old, new = bindings.get("old_price"), bindings.get("new_price")
        if isinstance(old, Price) and isinstance(new, Price) and old.currency == new.currency:
            if old.minor_units >= new.minor_units:
                bindings["discount_amount"] = Price(old.minor_units - new.minor_units, old.currency)

    if record is not None:
        bindings["product_name"] = record.display_name
        bindings["brand"] = record.brand
        bindings["price"] = record.current_price
    if catalog.has_category(trend.category_id):
        bindings["category_name"] = catalog.category_display_name(trend.category_id)
        bindings["category_name_singular"] = catalog.category_singular(trend.category_id)

    id_list = trend.qualifiers.get("product_id_list")
    if isinstance(id_list, tuple) and all(pid in catalog for pid in id_list):
        bindings["product_list"] = [catalog.get_product(pid).display_name for pid in id_list]
    return bindings


def realize_trend(
    match: TrendMatch, catalog: Catalog, templates: Mapping[str, Template]
) -> str:
    """One matched trend as one finished sentence."""
    template = templates.get(match.kind.template_id)
    if template is None:
        raise UnknownTemplateError(match.kind.template_id)
    return render(template, trend_bindings(match, catalog))


class SentenceRole(Enum):
    CATEGORY_TREND = "category_trend"
    PRODUCT_TREND_1 = "product_trend_1"
    DESIGN_STORY = "design_story"
    PRODUCT_TREND_2 = "product_trend_2"


_ROLE_ORDER = tuple(SentenceRole)


@dataclass(frozen=True)
class SentenceSpan:
    role: SentenceRole
    start: int
    end: int


@dataclass(frozen=True)
class Rundown:
    """Finished rundown text, the plan it came from, and where each part
    landed in the text. Spans follow the fixed sentence order, skipping
    parts the plan does not carry."""

    text: str
    plan: RundownPlan
    sentence_spans: tuple[SentenceSpan, ...]

    def __post_init__(self):
        roles = [span.role for span in self.sentence_spans]
        in_order = [r for r in _ROLE_ORDER if r in roles]
        if roles != in_order:
            raise ValueError("sentence spans must follow the fixed rundown order")
        for span in self.sentence_spans:
            if not 0 <= span.start <= span.end <= len(self.text):
                raise ValueError("sentence span out of range")


def realize_rundown(
    plan: RundownPlan, catalog: Catalog, templates: Mapping[str, Template]
) -> Rundown:
    """The full rundown: category trend, then the focus product's trend,
    its design story, and the second product trend, joined by single spaces."""
    parts: list[tuple[SentenceRole, str]] = []
    if plan.category_trend is not None:
        parts.append(
            (SentenceRole.CATEGORY_TREND, realize_trend(plan.category_trend, catalog, templates))
        )
    if plan.product_trend_1 is not None:
        parts.append(
            (SentenceRole.PRODUCT_TREND_1, realize_trend(plan.product_trend_1, catalog, templates))
        )
    if plan.design_story is not None:
        parts.append((SentenceRole.DESIGN_STORY, plan.design_story.text))
    if plan.product_trend_2 is not None:
        parts.append(
            (SentenceRole.PRODUCT_TREND_2, realize_trend(plan.product_trend_2, catalog, templates))
        )

    spans: list[SentenceSpan] = []
    pieces: list[str] = []
    cursor = 0
    for role, sentence in parts:
        if pieces:
            cursor += 1
        spans.append(SentenceSpan(role, cursor, cursor + len(sentence)))
        pieces.append(sentence)
        cursor += len(sentence)
    return Rundown(text=" ".join(pieces), plan=plan, sentence_spans=tuple(spans))


def default_templates() -> dict[str, Template]:
    """The wording that ships with the built-in trend kinds."""
    sources = {
        "new_category_products": "More {category_name} dropped recently including {product_list}.",
        "most_popular_product": "The {product_name} is the most trending {category_name_singular}.",
        "popularity_surge": (
            "The popularity of {product_name} has increased {percent_change} since {time_frame}."
        ),
        "most_searched_product": (
            "The {product_name} was the most searched {category_name_singular} {time_frame}."
        ),
        "discount": "The {product_name} just got a discount of {discount_amount}.",
        "category_sales_surge": "Sales of {category_name} are up {percent_change} since {time_frame}.",
    }
    return {tid: parse_template(src, tid) for tid, src in sources.items()}


def load_templates(path: str | Path) -> dict[str, Template]:
    """Read a template registry file (JSON object of id -> source)."""
    data = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise ValueError("template registry must map template ids to source strings")
    return {tid: parse_template(src, tid) for tid, src in data.items()}
