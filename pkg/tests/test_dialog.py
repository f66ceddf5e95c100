from __future__ import annotations

import itertools

import pytest

from trendcast.dialog import (
    CAPABILITIES_SENTENCE,
    CLARIFY_PRODUCT,
    NO_CONTENT_REPLY,
    OPENING_REPLY,
    REPROMPT,
    DialogManager,
    DialogPhase,
    DialogState,
    Intent,
    IntentKind,
    classify_intent,
    read_transcript,
    run_script,
    step,
    write_transcript,
)


@pytest.fixture()
def manager(full_engine) -> DialogManager:
    return DialogManager(full_engine)


def delivered_state(engine, category: str = "sneakers", seed: int = 1) -> DialogState:
    plan = engine.plan(category, seed)
    return DialogState(
        phase=DialogPhase.DELIVERED_RUNDOWN, active_category=category, last_plan=plan
    )


class TestStateInvariants:
    def test_rundown_phase_requires_plan(self):
        with pytest.raises(ValueError, match="last plan"):
            DialogState(phase=DialogPhase.DELIVERED_RUNDOWN)

    def test_wishlist_must_be_duplicate_free(self):
        with pytest.raises(ValueError, match="duplicate"):
            DialogState(wishlist=("a", "a"))


class TestClassifyIntent:
    def test_yes_variants(self, full_engine):
        for text in ("yes", "Yeah!", "sure", "OK", "yep, sounds good"):
            intent = classify_intent(text, DialogState(), full_engine.catalog)
            assert intent.kind is IntentKind.AFFIRM_YES, text

    def test_no_variants(self, full_engine):
        for text in ("no", "Nope", "nah, not now"):
            intent = classify_intent(text, DialogState(), full_engine.catalog)
            assert intent.kind is IntentKind.DENY_NO, text

    def test_tell_me_more_about_the_yeezys(self, full_engine):
        state = DialogState(active_category="sneakers")
        intent = classify_intent("tell me more about the Yeezys", state, full_engine.catalog)
        assert intent.kind is IntentKind.TELL_ME_MORE
        assert intent.product_id == "yeezy-boost-700"

    def test_bookmark_that_resolves_to_focus(self, full_engine):
        state = delivered_state(full_engine)
        assert state.last_plan.focus_product_id == "adidas-desert-rat-black"
        intent = classify_intent("bookmark that", state, full_engine.catalog)
        assert intent.kind is IntentKind.BOOKMARK
        assert intent.product_id == "adidas-desert-rat-black"

    def test_add_named_product_to_wish_list(self, full_engine):
        state = DialogState(active_category="handbags")
        intent = classify_intent(
            "add the telfar to my wish list", state, full_engine.catalog
        )
        assert intent.kind is IntentKind.BOOKMARK
        assert intent.product_id == "telfar-shopping-bag-medium"

    def test_read_wishlist(self, full_engine):
        intent = classify_intent("what's on my wish list?", DialogState(), full_engine.catalog)
        assert intent.kind is IntentKind.READ_WISHLIST

    def test_request_category(self, full_engine):
        intent = classify_intent("show me handbags", DialogState(), full_engine.catalog)
        assert intent.kind is IntentKind.REQUEST_CATEGORY
        assert intent.category_id == "handbags"

    def test_category_inside_tell_me_phrase(self, full_engine):
        intent = classify_intent("what about drones?", DialogState(), full_engine.catalog)
        assert intent.kind is IntentKind.REQUEST_CATEGORY
        assert intent.category_id == "drones"

    def test_quit(self, full_engine):
        for text in ("quit", "goodbye", "ok bye"):
            intent = classify_intent(text, DialogState(), full_engine.catalog)
            assert intent.kind is IntentKind.QUIT, text

    def test_ambiguous_mention_is_unresolved(self, full_engine):
        # Both sneaker fixtures carry the Adidas brand, so "the adidas" ties.
        state = DialogState(active_category="sneakers")
        intent = classify_intent("tell me more about the adidas", state, full_engine.catalog)
        assert intent.kind is IntentKind.TELL_ME_MORE
        assert intent.product_id is None
        assert intent.unresolved_mention

    def test_bare_tell_me_more_uses_focus(self, full_engine):
        state = delivered_state(full_engine)
        intent = classify_intent("tell me more", state, full_engine.catalog)
        assert intent.product_id == state.last_plan.focus_product_id

    def test_unrecognized(self, full_engine):
        intent = classify_intent("flibber jabber", DialogState(), full_engine.catalog)
        assert intent.kind is IntentKind.UNRECOGNIZED

    def test_total_over_arbitrary_text(self, full_engine):
        for text in ("", "   ", "!!!", "123", "ñø", "a" * 500):
            assert isinstance(
                classify_intent(text, DialogState(), full_engine.catalog), Intent
            )


class TestCoreTransitions:
    def test_activation_offers_capabilities(self, manager):
        state, reply = manager.activate("sneakers")
        assert state.phase is DialogPhase.OFFERED_CAPABILITIES
        assert reply == OPENING_REPLY
        assert "what I can do" in reply

    def test_affirm_describes_capabilities_verbatim(self, manager):
        state, _ = manager.activate("sneakers")
        state, reply = manager.respond(state, "yes", seed=1)
        assert state.phase is DialogPhase.DESCRIBED_CAPABILITIES
        assert reply.startswith(CAPABILITIES_SENTENCE)
        assert "rundowns about what people are searching for" in reply

    def test_deny_skips_to_sample_offer(self, manager):
        state, _ = manager.activate("sneakers")
        state, reply = manager.respond(state, "no", seed=1)
        assert state.phase is DialogPhase.OFFERED_SAMPLE
        assert "sample" in reply.lower()

    def test_affirm_after_description_delivers_rundown(self, manager):
        state, _ = manager.activate("sneakers")
        state, _ = manager.respond(state, "yes", seed=1)
        state, reply = manager.respond(state, "yes please", seed=7)
        assert state.phase is DialogPhase.DELIVERED_RUNDOWN
        assert state.last_plan is not None
        assert reply == manager.engine.generate("sneakers", 7).text

    def test_category_request_sets_active_category(self, manager):
        state, _ = manager.activate(None)
        state, _ = manager.respond(state, "no", seed=1)
        state, reply = manager.respond(state, "show me drones", seed=3)
        assert state.phase is DialogPhase.DELIVERED_RUNDOWN
        assert state.active_category == "drones"
        assert reply == manager.engine.generate("drones", 3).text

    def test_plain_affirm_uses_default_category_when_none_active(self, manager):
        state, _ = manager.activate(None)
        state, _ = manager.respond(state, "yes", seed=1)
        state, reply = manager.respond(state, "yes", seed=9)
        assert state.phase is DialogPhase.DELIVERED_RUNDOWN
        assert state.active_category == manager.engine.categories_with_trends()[0]

    def test_no_content_category_leaves_state_unchanged(self, manager):
        state, _ = manager.activate("sneakers")
        before, _ = manager.respond(state, "yes", seed=1)
        after, reply = manager.respond(before, "any watches trends?", seed=2)
        assert reply == NO_CONTENT_REPLY
        assert after == before

    def test_quit_from_anywhere(self, manager):
        state, _ = manager.activate("sneakers")
        state, _ = manager.respond(state, "quit", seed=1)
        assert state.phase is DialogPhase.ENDED
        state, reply = manager.respond(state, "yes", seed=2)
        assert state.phase is DialogPhase.ENDED
        assert "ended" in reply.lower()

    def test_unrecognized_reprompts_without_moving(self, manager):
        state, _ = manager.activate("sneakers")
        after, reply = manager.respond(state, "zzz gibberish", seed=1)
        assert after.phase is state.phase
        assert reply == REPROMPT


class TestDrillDown:
    def test_drill_into_secondary_product(self, manager):
        state = delivered_state(manager.engine)
        state, reply = manager.respond(state, "tell me more about the Yeezys", seed=5)
        assert state.phase is DialogPhase.DRILL_DOWN
        assert "The Yeezy Boost 700 was the most searched Sneaker this week." in reply
        assert "retro futuristic 1990s-inspired sole" in reply
        assert "The Yeezy Boost 700 is currently 300 dollars." in reply

    def test_drill_into_focus_skips_spoken_trends(self, manager):
        state = delivered_state(manager.engine)
        state, reply = manager.respond(state, "tell me more", seed=5)
        # Both focus trends were already spoken, so only story and price remain.
        assert reply == (
            "Not just another basic black sneaker, the latest drop from Yeezy is a "
            "tonal mix of black mesh, black suede, and a black retro futuristic "
            "1990s-inspired sole. The Adidas Desert Rat Black is currently 320 dollars."
        )

    def test_ambiguous_reference_asks_for_clarification(self, manager):
        state = delivered_state(manager.engine)
        after, reply = manager.respond(state, "tell me more about the adidas", seed=5)
        assert reply == CLARIFY_PRODUCT
        assert after.phase is DialogPhase.DELIVERED_RUNDOWN

    def test_tell_me_more_before_any_rundown_reprompts(self, manager):
        state, _ = manager.activate("sneakers")
        after, reply = manager.respond(state, "tell me more", seed=5)
        assert after.phase is state.phase


class TestWishlist:
    def test_bookmark_appends_and_confirms(self, manager):
        state = delivered_state(manager.engine)
        state, reply = manager.respond(state, "bookmark that", seed=1)
        assert state.wishlist == ("adidas-desert-rat-black",)
        assert "Adidas Desert Rat Black" in reply
        assert state.phase is DialogPhase.DELIVERED_RUNDOWN

    def test_bookmark_is_idempotent(self, manager):
        state = delivered_state(manager.engine)
        state, _ = manager.respond(state, "bookmark that", seed=1)
        again, reply = manager.respond(state, "bookmark that", seed=2)
        assert again.wishlist == state.wishlist
        assert "already" in reply

    def test_wishlist_keeps_bookmark_order(self, manager):
        state = delivered_state(manager.engine)
        state, _ = manager.respond(state, "save the yeezy boost", seed=1)
        state, _ = manager.respond(state, "bookmark that", seed=2)
        assert state.wishlist == ("yeezy-boost-700", "adidas-desert-rat-black")

    def test_read_wishlist_lists_names(self, manager):
        state = delivered_state(manager.engine)
        state, _ = manager.respond(state, "save the yeezy boost", seed=1)
        state, _ = manager.respond(state, "bookmark that", seed=2)
        _, reply = manager.respond(state, "what's on my wish list", seed=3)
        assert reply == "On your wish list: Yeezy Boost 700 and Adidas Desert Rat Black."

    def test_read_empty_wishlist(self, manager):
        state, _ = manager.activate("sneakers")
        _, reply = manager.respond(state, "read my wish list", seed=1)
        assert "empty" in reply

    def test_bookmark_without_referent_asks(self, manager):
        state, _ = manager.activate("sneakers")
        after, reply = manager.respond(state, "bookmark that", seed=1)
        assert after.wishlist == ()
        assert "Which product" in reply


def all_phase_states(engine) -> list[DialogState]:
    plan = engine.plan("sneakers", 1)
    return [
        DialogState(),
        DialogState(phase=DialogPhase.OFFERED_CAPABILITIES, active_category="sneakers"),
        DialogState(phase=DialogPhase.DESCRIBED_CAPABILITIES, active_category="sneakers"),
        DialogState(phase=DialogPhase.OFFERED_SAMPLE),
        DialogState(
            phase=DialogPhase.DELIVERED_RUNDOWN, active_category="sneakers", last_plan=plan
        ),
        DialogState(phase=DialogPhase.DRILL_DOWN, active_category="sneakers", last_plan=plan),
        DialogState(phase=DialogPhase.ENDED),
    ]


def all_intent_variants() -> list[Intent]:
    variants = []
    for kind in IntentKind:
        if kind is IntentKind.REQUEST_CATEGORY:
            variants.append(Intent(kind, category_id="sneakers"))
            variants.append(Intent(kind, category_id="watches"))
        elif kind in (IntentKind.TELL_ME_MORE, IntentKind.BOOKMARK):
            variants.append(Intent(kind, product_id="yeezy-boost-700"))
            variants.append(Intent(kind))
            variants.append(Intent(kind, unresolved_mention=True))
        else:
            variants.append(Intent(kind))
    return variants


class TestTotality:
    def test_every_phase_intent_pair_is_defined(self, full_engine):
        states = all_phase_states(full_engine)
        intents = all_intent_variants()
        assert {s.phase for s in states} == set(DialogPhase)
        for state, intent in itertools.product(states, intents):
            new_state, reply = step(state, intent, full_engine, seed=11)
            assert isinstance(new_state, DialogState)
            assert isinstance(reply, str) and reply


SCRIPT = [
    "yes",
    "yes",
    "tell me more about the Yeezys",
    "bookmark that",
    "what's on my wish list",
    "show me handbags",
    "quit",
]


class TestTranscripts:
    def test_run_script_is_deterministic(self, manager):
        first = run_script(manager, SCRIPT, session_id="s1", seed=42, category="sneakers")
        second = run_script(manager, SCRIPT, session_id="s1", seed=42, category="sneakers")
        assert first == second

    def test_transcript_line_shape(self, manager):
        lines = run_script(manager, SCRIPT, session_id="s1", seed=42, category="sneakers")
        assert lines[0]["turn"] == 0 and lines[0]["user"] is None
        assert lines[0]["seed"] == 42
        for line in lines[1:]:
            assert set(line) == {"session", "turn", "user", "agent", "phase_after"}
        assert [line["turn"] for line in lines] == list(range(len(SCRIPT) + 1))
        assert lines[-1]["phase_after"] == "ended"

    def test_write_read_round_trip_and_byte_stability(self, manager, tmp_path):
        lines = run_script(manager, SCRIPT, session_id="s1", seed=42, category="sneakers")
        one, two = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        write_transcript(lines, one)
        write_transcript(lines, two)
        assert one.read_bytes() == two.read_bytes()
        assert read_transcript(one) == lines

    def test_different_seed_changes_some_reply(self, manager):
        base = run_script(manager, ["yes", "yes"], session_id="s", seed=0, category="sneakers")
        other = run_script(manager, ["yes", "yes"], session_id="s", seed=1, category="sneakers")
        assert base != other  # rundown ordering depends on the seed
