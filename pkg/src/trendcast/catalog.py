"""Product catalog: records, prices, design stories, and the catalog file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

_SENTENCE_ENDINGS = (".", "!", "?")

#: Spoken currency units, keyed by ISO 4217 code: (major singular, major
#: plural, minor singular, minor plural). Unlisted codes fall back to the
#: code itself for the major unit and skip the minor part.
_CURRENCY_WORDS = {
    "USD": ("dollar", "dollars", "cent", "cents"),
    "EUR": ("euro", "euros", "cent", "cents"),
    "GBP": ("pound", "pounds", "penny", "pence"),
}

_CURRENCY_SYMBOLS = {"USD": "$", "EUR": "€", "GBP": "£"}


class CatalogError(ValueError):
    """Base class for catalog load/validation failures."""


class MalformedCatalogError(CatalogError):
    """A catalog file entry is structurally wrong.

    Carries the entry index and the offending field so the message points
    at the exact spot in the file.
    """

    def __init__(self, message: str, *, index: int | None = None, fieldname: str | None = None):
        self.index = index
        self.fieldname = fieldname
        where = ""
        if index is not None:
            where = f"product[{index}]"
            if fieldname is not None:
                where += f".{fieldname}"
            where += ": "
        super().__init__(where + message)


class DuplicateProductIdError(CatalogError):
    def __init__(self, product_id: str):
        self.product_id = product_id
        super().__init__(f"duplicate product id {product_id!r}")


class DanglingCategoryError(CatalogError):
    def __init__(self, product_id: str):
        self.product_id = product_id
        super().__init__(f"product {product_id!r} has no category")


class DanglingStorySubjectError(CatalogError):
    def __init__(self, subject_product_id: str):
        self.subject_product_id = subject_product_id
        super().__init__(f"design story subject {subject_product_id!r} is not in the catalog")


class ProductNotFoundError(KeyError):
    def __init__(self, product_id: str):
        self.product_id = product_id
        super().__init__(f"no product with id {product_id!r}")


class UnknownCategoryError(KeyError):
    def __init__(self, category_id: str):
        self.category_id = category_id
        super().__init__(f"no category with id {category_id!r}")


@dataclass(frozen=True)
class Price:
    """An amount of money in minor units (cents for USD) plus currency code.

    Integer minor units keep catalog arithmetic exact; conversion to words
    or display strings happens only at the edge.
    """

    minor_units: int
    currency: str = "USD"

    def __post_init__(self):
        if not isinstance(self.minor_units, int) or isinstance(self.minor_units, bool):
            raise ValueError("minor_units must be an integer")
        if self.minor_units < 0:
            raise ValueError("price must be non-negative")
        if len(self.currency) != 3 or not self.currency.isalpha() or not self.currency.isupper():
            raise ValueError(f"currency must be a 3-letter ISO code, got {self.currency!r}")

    @property
    def major_units(self) -> int:
        return self.minor_units // 100

    @property
    def minor_remainder(self) -> int:
        return self.minor_units % 100

    def spoken(self) -> str:
        """Voice wording: '300 dollars', '299 dollars and 99 cents'."""
        words = _CURRENCY_WORDS.get(self.currency)
        major, minor = self.major_units, self.minor_remainder
        if words is None:
            amount = f"{major}.{minor:02d}" if minor else str(major)
            return f"{amount} {self.currency}"
        major_word = words[0] if major == 1 else words[1]
        text = f"{major} {major_word}"
        if minor:
            minor_word = words[2] if minor == 1 else words[3]
            text += f" and {minor} {minor_word}"
        return text

    def formatted(self) -> str:
        """Display string: '$300', '$299.99', '42.50 SEK'."""
        major, minor = self.major_units, self.minor_remainder
        amount = f"{major}.{minor:02d}" if minor else str(major)
        symbol = _CURRENCY_SYMBOLS.get(self.currency)
        if symbol is None:
            return f"{amount} {self.currency}"
        return f"{symbol}{amount}"


@dataclass(frozen=True)
class DesignStory:
    """A sentence or two of design color for one product."""

    subject_product_id: str
    text: str

    def __post_init__(self):
        if not self.subject_product_id:
            raise ValueError("subject_product_id must be non-empty")
        if not self.text or not self.text.rstrip().endswith(_SENTENCE_ENDINGS):
            raise ValueError("story text must end with sentence punctuation")


@dataclass(frozen=True)
class ProductRecord:
    product_id: str
    display_name: str
    category_id: str
    brand: str
    current_price: Price
    metadata: dict[str, str] = field(default_factory=dict)
    design_story: DesignStory | None = None

    def __post_init__(self):
        if not self.product_id:
            raise ValueError("product_id must be non-empty")
        if not self.display_name:
            raise ValueError("display_name must be non-empty")
        if not self.category_id.strip():
            raise DanglingCategoryError(self.product_id)


def singularize(name: str) -> str:
    """Best-effort singular, title-cased: 'sneakers' -> 'Sneaker'.

    A plain trailing-s strip covers the catalog vocabulary; double-s words
    ('dress') and short words are left alone.
    """
    words = name.split()
    if words:
        last = words[-1]
        if len(last) > 3 and last.endswith("s") and not last.endswith("ss"):
            words[-1] = last[:-1]
    return " ".join(w.capitalize() for w in words)


class Catalog:
    """An indexed set of products plus the categories they belong to."""

    def __init__(self, products: list[ProductRecord]):
        self._products: dict[str, ProductRecord] = {}
        self._categories: dict[str, str] = {}
        for record in products:
            if record.product_id in self._products:
                raise DuplicateProductIdError(record.product_id)
            self._products[record.product_id] = record
            self._categories.setdefault(record.category_id, record.category_id)
        for record in products:
            story = record.design_story
            if story is not None and story.subject_product_id not in self._products:
                raise DanglingStorySubjectError(story.subject_product_id)

    @property
    def products(self) -> dict[str, ProductRecord]:
        return dict(self._products)

    @property
    def categories(self) -> dict[str, str]:
        """Category id -> display name."""
        return dict(self._categories)

    def __len__(self) -> int:
        return len(self._products)

    def __contains__(self, product_id: str) -> bool:
        return product_id in self._products

    def get_product(self, product_id: str) -> ProductRecord:
        try:
            return self._products[product_id]
        except KeyError:
            raise ProductNotFoundError(product_id) from None

    def has_category(self, category_id: str) -> bool:
        return category_id in self._categories

    def products_in_category(self, category_id: str) -> list[ProductRecord]:
        """All products of a category, in lexicographic product-id order."""
        if category_id not in self._categories:
            raise UnknownCategoryError(category_id)
        records = [r for r in self._products.values() if r.category_id == category_id]
        return sorted(records, key=lambda r: r.product_id)

    def category_display_name(self, category_id: str) -> str:
        try:
            return self._categories[category_id]
        except KeyError:
            raise UnknownCategoryError(category_id) from None

    def category_singular(self, category_id: str) -> str:
        return singularize(self.category_display_name(category_id))


def _require(item: dict, index: int, fieldname: str, kind: type, *, optional: bool = False) -> Any:
    value = item.get(fieldname)
    if value is None and optional:
        return None
    if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
        raise MalformedCatalogError(
            f"expected {kind.__name__}, got {type(value).__name__}",
            index=index,
            fieldname=fieldname,
        )
    if kind is str and not value:
        raise MalformedCatalogError("must be non-empty", index=index, fieldname=fieldname)
    return value


def load_catalog(path: str | Path) -> Catalog:
    """Read a catalog file (JSON array of product objects)."""
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise MalformedCatalogError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCatalogError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedCatalogError("catalog root must be a JSON array")

    records: list[ProductRecord] = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise MalformedCatalogError("entry is not an object", index=i)
        product_id = _require(item, i, "id", str)
        name = _require(item, i, "name", str)
        category = item.get("category")
        if not isinstance(category, str) or not category.strip():
            raise DanglingCategoryError(product_id)
        brand = _require(item, i, "brand", str)
        price_minor = _require(item, i, "price_minor", int)
        currency = _require(item, i, "currency", str)
        metadata = item.get("metadata") or {}
        if not isinstance(metadata, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
        ):
            raise MalformedCatalogError(
                "must map strings to strings", index=i, fieldname="metadata"
            )
        story_text = _require(item, i, "design_story", str, optional=True)
        try:
            price = Price(price_minor, currency)
            story = DesignStory(product_id, story_text) if story_text else None
            records.append(
                ProductRecord(
                    product_id=product_id,
                    display_name=name,
                    category_id=category,
                    brand=brand,
                    current_price=price,
                    metadata=dict(metadata),
                    design_story=story,
                )
            )
        except CatalogError:
            raise
        except ValueError as exc:
            raise MalformedCatalogError(str(exc), index=i) from exc
    return Catalog(records)


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    """Write a catalog back to its file format (inverse of load_catalog)."""
    data = []
    for record in catalog.products.values():
        data.append(
            {
                "id": record.product_id,
                "name": record.display_name,
                "category": record.category_id,
                "brand": record.brand,
                "price_minor": record.current_price.minor_units,
                "currency": record.current_price.currency,
                "metadata": record.metadata,
                "design_story": record.design_story.text if record.design_story else None,
            }
        )
    Path(path).write_text(json.dumps(data, indent=2) + "\n", "utf-8")
