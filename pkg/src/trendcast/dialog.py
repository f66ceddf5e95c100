"""Rule-based dialog: a deterministic state machine over rundown content.

The core exchange is capabilities offer, then a sample rundown. Drill-down,
bookmarking, and the wish list are extensions on top of that core flow.
Intent matching is keyword rules, not a learned model, so every transition
is reproducible in tests.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, NamedTuple

from .catalog import Catalog
from .engine import RundownEngine
from .realization import FormatHint, format_value, realize_trend
from .selection import NoContentError, RundownPlan, UnknownCategoryError, derive_seed

OPENING_REPLY = "Hi! I'm Trendcast. Do you want to learn about what I can do?"
CAPABILITIES_SENTENCE = (
    "I can give you rundowns about what people are searching for, "
    "what they are buying, and what is popular in general"
)
SAMPLE_OFFER = "Want to hear a sample rundown?"
SKIPPED_SAMPLE_OFFER = "No problem. Want to hear a sample rundown of what's trending?"
NO_CONTENT_REPLY = "I don't have any trends for that right now"
REPROMPT = (
    "Sorry, I didn't catch that. You can ask for a category rundown, "
    "say tell me more, or say bookmark that."
)
DECLINED_REPLY = "No problem. Just name a category whenever you're curious."
QUIT_REPLY = "Bye! Happy trend hunting."
ENDED_REPLY = "This session has ended. Start a new one to keep exploring."
CLARIFY_PRODUCT = "Which product do you mean?"
CLARIFY_BOOKMARK = "Which product should I bookmark?"
EMPTY_WISHLIST_REPLY = "Your wish list is empty so far."


class DialogPhase(Enum):
    IDLE = "idle"
    OFFERED_CAPABILITIES = "offered_capabilities"
    DESCRIBED_CAPABILITIES = "described_capabilities"
    OFFERED_SAMPLE = "offered_sample"
    DELIVERED_RUNDOWN = "delivered_rundown"
    DRILL_DOWN = "drill_down"
    ENDED = "ended"


@dataclass(frozen=True)
class DialogState:
    phase: DialogPhase = DialogPhase.IDLE
    active_category: str | None = None
    last_plan: RundownPlan | None = None
    wishlist: tuple[str, ...] = ()

    def __post_init__(self):
        if self.phase in (DialogPhase.DELIVERED_RUNDOWN, DialogPhase.DRILL_DOWN):
            if self.last_plan is None:
                raise ValueError(f"phase {self.phase.value} requires a last plan")
        if len(set(self.wishlist)) != len(self.wishlist):
            raise ValueError("wishlist must be duplicate-free")


class IntentKind(Enum):
    AFFIRM_YES = "affirm_yes"
    DENY_NO = "deny_no"
    REQUEST_CATEGORY = "request_category"
    TELL_ME_MORE = "tell_me_more"
    BOOKMARK = "bookmark"
    READ_WISHLIST = "read_wishlist"
    QUIT = "quit"
    UNRECOGNIZED = "unrecognized"


@dataclass(frozen=True)
class Intent:
    """A classified utterance. ``product_id`` is the resolved reference for
    TellMeMore/Bookmark; ``unresolved_mention`` marks that the user named
    something we could not pin to a unique product (so the agent must ask,
    never guess)."""

    kind: IntentKind
    category_id: str | None = None
    product_id: str | None = None
    unresolved_mention: bool = False


_TOKEN_RE = re.compile(r"[a-z0-9']+")


def _singular_token(token: str) -> str:
    if len(token) > 3 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def _tokens(text: str) -> list[str]:
    return [t.replace("'", "") for t in _TOKEN_RE.findall(text.lower())]


def _token_set(text: str) -> set[str]:
    return {_singular_token(t) for t in _tokens(text)}


def _norm_set(words: str) -> frozenset[str]:
    return frozenset(_token_set(words))


_AFFIRM_TOKENS = _norm_set(
    "yes yeah yep yup sure ok okay absolutely definitely certainly sample rundown"
)
_DENY_TOKENS = _norm_set("no nope nah not later")
_QUIT_TOKENS = _norm_set("quit exit bye goodbye stop")
_BOOKMARK_TOKENS = _norm_set("bookmark save")
_STOP_TOKENS = _norm_set(
    "the a an my me that this it one ones please those them to about more tell of on "
    "in for hear show give what whats is are trending add put read see open i want "
    "wish list wishlist you can do know shoe shoes product products"
)


def _match_product(
    mention_tokens: set[str], catalog: Catalog, active_category: str | None
) -> str | None:
    """Longest-token-overlap product lookup; None unless a unique best match."""
    if active_category is not None and catalog.has_category(active_category):
        candidates = catalog.products_in_category(active_category)
    else:
        candidates = list(catalog.products.values())
    scored: list[tuple[int, str]] = []
    for record in candidates:
        name_tokens = _token_set(f"{record.display_name} {record.brand}")
        overlap = len(name_tokens & mention_tokens)
        if overlap:
            scored.append((overlap, record.product_id))
    if not scored:
        return None
    best = max(score for score, _ in scored)
    winners = [pid for score, pid in scored if score == best]
    return winners[0] if len(winners) == 1 else None


def _match_category(token_set: set[str], catalog: Catalog) -> str | None:
    hits = []
    for category_id, display in catalog.categories.items():
        cat_tokens = _token_set(f"{category_id} {display}")
        if cat_tokens and cat_tokens <= (token_set | _STOP_TOKENS):
            if cat_tokens & token_set:
                hits.append(category_id)
    return hits[0] if len(hits) == 1 else None


def _mention_after(text: str, markers: Iterable[str]) -> str:
    """The tail of the utterance after the last trigger word, for reference
    extraction ('tell me more about the yeezys' -> 'the yeezys')."""
    lowered = text.lower()
    cut = 0
    for marker in markers:
        pos = lowered.rfind(marker)
        if pos >= 0:
            cut = max(cut, pos + len(marker))
    return lowered[cut:]


def _focus_of(state: DialogState) -> str | None:
    return state.last_plan.focus_product_id if state.last_plan else None


def classify_intent(utterance: str, state: DialogState, catalog: Catalog) -> Intent:
    """Case-insensitive keyword rules mapping raw text to an intent.

    Total by construction: anything the rules do not claim is Unrecognized.
    Product references resolve by token overlap against the active category
    (or the whole catalog when none is active); 'that' and bare references
    resolve to the focus product of the last rundown.
    """
    tokens = _token_set(utterance)
    if tokens & _QUIT_TOKENS:
        return Intent(IntentKind.QUIT)

    wishlist_mentioned = "wishlist" in tokens or {"wish", "list"} <= tokens
    if tokens & _BOOKMARK_TOKENS or ("add" in _tokens(utterance) and wishlist_mentioned):
        mention = _token_set(_mention_after(utterance, ("bookmark", "save", "add"))) - _STOP_TOKENS
        if not mention:
            return Intent(IntentKind.BOOKMARK, product_id=_focus_of(state))
        product = _match_product(mention, catalog, state.active_category)
        if product is None:
            return Intent(IntentKind.BOOKMARK, unresolved_mention=True)
        return Intent(IntentKind.BOOKMARK, product_id=product)

    if wishlist_mentioned:
        return Intent(IntentKind.READ_WISHLIST)

    raw_tokens = set(_tokens(utterance))
    if ({"tell", "more"} <= raw_tokens) or "about" in raw_tokens or "details" in raw_tokens:
        mention = tokens - _STOP_TOKENS
        category = _match_category(mention, catalog)
        if category is not None and _match_product(mention, catalog, state.active_category) is None:
            return Intent(IntentKind.REQUEST_CATEGORY, category_id=category)
        if not mention:
            focus = _focus_of(state)
            if focus is not None:
                return Intent(IntentKind.TELL_ME_MORE, product_id=focus)
            return Intent(IntentKind.TELL_ME_MORE, unresolved_mention=True)
        product = _match_product(mention, catalog, state.active_category)
        if product is None:
            return Intent(IntentKind.TELL_ME_MORE, unresolved_mention=True)
        return Intent(IntentKind.TELL_ME_MORE, product_id=product)

    category = _match_category(tokens, catalog)
    if category is not None:
        return Intent(IntentKind.REQUEST_CATEGORY, category_id=category)

    affirmed = bool(tokens & _AFFIRM_TOKENS)
    denied = bool(tokens & _DENY_TOKENS)
    if affirmed and not denied:
        return Intent(IntentKind.AFFIRM_YES)
    if denied and not affirmed:
        return Intent(IntentKind.DENY_NO)
    return Intent(IntentKind.UNRECOGNIZED)


class StepResult(NamedTuple):
    state: DialogState
    reply: str


def _list_with_and(items: list[str]) -> str:
    return format_value(items, FormatHint.LIST_WITH_AND)


def _deliver_rundown(
    state: DialogState, category_id: str | None, engine: RundownEngine, seed: int
) -> StepResult:
    """Fresh rundown for the category; on no content the state is untouched."""
    target = category_id or state.active_category
    if target is None:
        with_trends = engine.categories_with_trends()
        if not with_trends:
            return StepResult(state, NO_CONTENT_REPLY)
        target = with_trends[0]
    try:
        rundown = engine.generate(target, seed)
    except (NoContentError, UnknownCategoryError):
        return StepResult(state, NO_CONTENT_REPLY)
    new_state = dataclasses.replace(
        state,
        phase=DialogPhase.DELIVERED_RUNDOWN,
        active_category=target,
        last_plan=rundown.plan,
    )
    return StepResult(new_state, rundown.text)


def _drill_down(state: DialogState, product_id: str, engine: RundownEngine) -> StepResult:
    """Everything else we know about one product: the trends the rundown did
    not use, its design story, and its current price."""
    plan = state.last_plan
    assert plan is not None
    used = {id(m) for m in plan.product_trends()}
    remaining = [
        m
        for m in engine.matches
        if m.trend.product_id == product_id and id(m) not in used
    ]
    sentences = [realize_trend(m, engine.catalog, engine.templates) for m in remaining]
    record = engine.catalog.get_product(product_id)
    if record.design_story is not None:
        sentences.append(record.design_story.text)
    sentences.append(
        f"The {record.display_name} is currently {record.current_price.spoken()}."
    )
    new_state = dataclasses.replace(state, phase=DialogPhase.DRILL_DOWN)
    return StepResult(new_state, " ".join(sentences))


def _bookmark(state: DialogState, intent: Intent, catalog: Catalog) -> StepResult:
    if intent.product_id is None or intent.product_id not in catalog:
        return StepResult(state, CLARIFY_BOOKMARK)
    name = catalog.get_product(intent.product_id).display_name
    if intent.product_id in state.wishlist:
        return StepResult(state, f"{name} is already on your wish list.")
    new_state = dataclasses.replace(state, wishlist=state.wishlist + (intent.product_id,))
    return StepResult(new_state, f"Saved {name} to your wish list.")


def _read_wishlist(state: DialogState, catalog: Catalog) -> StepResult:
    if not state.wishlist:
        return StepResult(state, EMPTY_WISHLIST_REPLY)
    names = [catalog.get_product(pid).display_name for pid in state.wishlist]
    return StepResult(state, f"On your wish list: {_list_with_and(names)}.")


def step(state: DialogState, intent: Intent, engine: RundownEngine, seed: int) -> StepResult:
    """One dialog transition. Total: every (phase, intent) pair is defined,
    and content errors turn into replies, never exceptions.

    Beyond the core flow, RequestCategory is honored from any post-opening
    phase and TellMeMore also works from inside a drill-down; both are
    deliberate extensions for conversational flow.
    """
    if state.phase is DialogPhase.ENDED:
        return StepResult(state, ENDED_REPLY)
    if intent.kind is IntentKind.QUIT:
        return StepResult(dataclasses.replace(state, phase=DialogPhase.ENDED), QUIT_REPLY)
    if state.phase is DialogPhase.IDLE:
        return StepResult(
            dataclasses.replace(state, phase=DialogPhase.OFFERED_CAPABILITIES), OPENING_REPLY
        )
    if intent.kind is IntentKind.BOOKMARK:
        return _bookmark(state, intent, engine.catalog)
    if intent.kind is IntentKind.READ_WISHLIST:
        return _read_wishlist(state, engine.catalog)

    phase, kind = state.phase, intent.kind

    if phase is DialogPhase.OFFERED_CAPABILITIES:
        if kind is IntentKind.AFFIRM_YES:
            new_state = dataclasses.replace(state, phase=DialogPhase.DESCRIBED_CAPABILITIES)
            return StepResult(new_state, f"{CAPABILITIES_SENTENCE}. {SAMPLE_OFFER}")
        if kind is IntentKind.DENY_NO:
            new_state = dataclasses.replace(state, phase=DialogPhase.OFFERED_SAMPLE)
            return StepResult(new_state, SKIPPED_SAMPLE_OFFER)
        if kind is IntentKind.REQUEST_CATEGORY:
            return _deliver_rundown(state, intent.category_id, engine, seed)

    if phase in (DialogPhase.DESCRIBED_CAPABILITIES, DialogPhase.OFFERED_SAMPLE):
        if kind is IntentKind.AFFIRM_YES:
            return _deliver_rundown(state, None, engine, seed)
        if kind is IntentKind.REQUEST_CATEGORY:
            return _deliver_rundown(state, intent.category_id, engine, seed)
        if kind is IntentKind.DENY_NO:
            return StepResult(state, DECLINED_REPLY)

    if phase in (DialogPhase.DELIVERED_RUNDOWN, DialogPhase.DRILL_DOWN):
        if kind is IntentKind.TELL_ME_MORE:
            if intent.product_id is None or intent.product_id not in engine.catalog:
                return StepResult(state, CLARIFY_PRODUCT)
            return _drill_down(state, intent.product_id, engine)
        if kind is IntentKind.REQUEST_CATEGORY:
            return _deliver_rundown(state, intent.category_id, engine, seed)
        if kind is IntentKind.DENY_NO:
            return StepResult(state, DECLINED_REPLY)

    return StepResult(state, REPROMPT)


class DialogManager:
    """Binds the state machine to a rundown engine for session use."""

    def __init__(self, engine: RundownEngine):
        self.engine = engine

    def activate(self, category: str | None = None) -> StepResult:
        """The implicit wake-up: a fresh state already offered capabilities."""
        state = DialogState(phase=DialogPhase.OFFERED_CAPABILITIES, active_category=category)
        return StepResult(state, OPENING_REPLY)

    def respond(self, state: DialogState, utterance: str, seed: int) -> StepResult:
        intent = classify_intent(utterance, state, self.engine.catalog)
        return step(state, intent, self.engine, seed)


def run_script(
    manager: DialogManager,
    utterances: Iterable[str],
    *,
    session_id: str,
    seed: int,
    category: str | None = None,
) -> list[dict[str, Any]]:
    """Drive a scripted conversation, producing replayable transcript lines.

    Line 0 is the activation record and carries the session seed and
    category so a transcript is self-contained for replay. Per-turn seeds
    derive from the session seed and turn number.
    """
    state, opening = manager.activate(category)
    lines: list[dict[str, Any]] = [
        {
            "session": session_id,
            "turn": 0,
            "user": None,
            "agent": opening,
            "phase_after": state.phase.value,
            "seed": seed,
            "category": category,
        }
    ]
    for turn, utterance in enumerate(utterances, start=1):
        state, reply = manager.respond(state, utterance, seed=derive_seed(seed, turn))
        lines.append(
            {
                "session": session_id,
                "turn": turn,
                "user": utterance,
                "agent": reply,
                "phase_after": state.phase.value,
            }
        )
    return lines


def write_transcript(lines: Iterable[dict[str, Any]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(json.dumps(line, ensure_ascii=False) + "\n")


def read_transcript(path: str | Path) -> list[dict[str, Any]]:
    lines: list[dict[str, Any]] = []
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            raw = raw.strip()
            if raw:
                lines.append(json.loads(raw))
    return lines
