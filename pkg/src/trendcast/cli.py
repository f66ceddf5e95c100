"""Command-line entry point.

Exit codes are a stable contract: 0 success, 1 error, 2 no content for the
requested category.
"""

from __future__ import annotations

import argparse
import difflib
import json
import secrets
import sys
from typing import Any

from .catalog import UnknownCategoryError
from .dialog import DialogManager, read_transcript, run_script, write_transcript
from .engine import RundownEngine
from .selection import NoContentError, derive_seed, plan_to_dict

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_CONTENT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendcast", description="Conversational shopping-trends engine."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--catalog", required=True, help="catalog JSON file")
    data.add_argument("--trends", required=True, help="trend feed JSON file")
    data.add_argument("--templates", default=None, help="template registry JSON file")

    p_generate = sub.add_parser(
        "generate", parents=[data], help="print one rundown for a category"
    )
    p_generate.add_argument("--category", required=True)
    p_generate.add_argument("--seed", type=int, default=None)
    p_generate.add_argument("--plan", action="store_true", help="also print the plan JSON")

    p_chat = sub.add_parser("chat", parents=[data], help="interactive dialog REPL")
    p_chat.add_argument("--category", default=None)
    p_chat.add_argument("--seed", type=int, default=None)
    p_chat.add_argument("--record", default=None, help="write the transcript to this file")

    sub.add_parser("validate", parents=[data], help="cross-check catalog, trends, templates")

    p_replay = sub.add_parser(
        "replay", parents=[data], help="re-run a recorded transcript and diff replies"
    )
    p_replay.add_argument("--transcript", required=True)
    p_replay.add_argument("--seed", type=int, default=None, help="override the recorded seed")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", default=None, help="service config JSON file")

    return parser


def _load_engine(args: argparse.Namespace) -> RundownEngine:
    return RundownEngine.from_paths(args.catalog, args.trends, args.templates)


def _cmd_generate(args: argparse.Namespace) -> int:
    engine = _load_engine(args)
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    try:
        rundown = engine.generate(args.category, seed)
    except NoContentError as exc:
        print(exc, file=sys.stderr)
        return EXIT_NO_CONTENT
    print(rundown.text)
    if args.plan:
        print(json.dumps(plan_to_dict(rundown.plan), indent=2))
    return EXIT_OK


def _cmd_chat(args: argparse.Namespace) -> int:
    engine = _load_engine(args)
    manager = DialogManager(engine)
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    interactive = sys.stdin.isatty()

    state, opening = manager.activate(args.category)
    lines: list[dict[str, Any]] = [
        {
            "session": "cli",
            "turn": 0,
            "user": None,
            "agent": opening,
            "phase_after": state.phase.value,
            "seed": seed,
            "category": args.category,
        }
    ]
    print(opening)
    turn = 0
    while True:
        if interactive:
            sys.stdout.write("you> ")
            sys.stdout.flush()
        raw = sys.stdin.readline()
        if not raw:
            break
        text = raw.strip()
        if not text:
            continue
        if text == "/quit":
            break
        if text.startswith("/seed"):
            parts = text.split()
            if len(parts) > 1:
                try:
                    seed = int(parts[1])
                except ValueError:
                    print("usage: /seed [integer]", file=sys.stderr)
                    continue
            print(f"seed: {seed}")
            continue
        turn += 1
        state, reply = manager.respond(state, text, seed=derive_seed(seed, turn))
        lines.append(
            {
                "session": "cli",
                "turn": turn,
                "user": text,
                "agent": reply,
                "phase_after": state.phase.value,
            }
        )
        print(reply)
    if args.record:
        write_transcript(lines, args.record)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    engine = _load_engine(args)
    problems = engine.validate()
    for problem in problems:
        print(problem, file=sys.stderr)
    if problems:
        return EXIT_ERROR
    catalog = engine.catalog
    print(
        f"ok: {len(catalog)} products, {len(catalog.categories)} categories, "
        f"{len(engine.matches)} usable trends"
    )
    return EXIT_OK


def _cmd_replay(args: argparse.Namespace) -> int:
    engine = _load_engine(args)
    manager = DialogManager(engine)
    recorded = read_transcript(args.transcript)
    if not recorded or recorded[0].get("turn") != 0:
        print("transcript must start with the turn-0 activation record", file=sys.stderr)
        return EXIT_ERROR
    head = recorded[0]
    seed = args.seed if args.seed is not None else head.get("seed")
    if seed is None:
        print("transcript has no recorded seed; pass --seed", file=sys.stderr)
        return EXIT_ERROR

    utterances = [line["user"] for line in recorded[1:]]
    replayed = run_script(
        manager,
        utterances,
        session_id=head.get("session", "replay"),
        seed=int(seed),
        category=head.get("category"),
    )
    for old, new in zip(recorded, replayed):
        if old["agent"] != new["agent"]:
            diff = difflib.unified_diff(
                old["agent"].splitlines(keepends=True),
                new["agent"].splitlines(keepends=True),
                fromfile=f"recorded turn {old['turn']}",
                tofile=f"replayed turn {new['turn']}",
            )
            sys.stderr.writelines(diff)
            sys.stderr.write("\n")
            return EXIT_ERROR
    print(f"replayed {len(replayed)} turns identically")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import load_config, run

    run(load_config(args.config))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "chat": _cmd_chat,
        "validate": _cmd_validate,
        "replay": _cmd_replay,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except UnknownCategoryError as exc:
        print(f"unknown category: {exc.category_id}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
