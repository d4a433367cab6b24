"""Batch entry points: validate, simulate, gridsearch, compare, serve.

Exit codes: 0 success, 1 domain failure (invalid story, mismatched
inputs), 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agent import AgentConfig
from .evaluate import compare_methods, export_report, grid_search
from .profiles import PlayerProfile
from .simulate import SimulationSpec, run_batch, write_batch
from .story import StoryError, load_story, validate_story
from .traces import read_trace_file

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

# flags beat --config, which beats these
BATCH_DEFAULTS = {"runs": 20, "seed": 0, "max_ticks": 300, "workers": 1}


def _resolve_batch_args(args) -> None:
    config = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    for key, fallback in BATCH_DEFAULTS.items():
        if getattr(args, key) is None:
            setattr(args, key, config.get(key, fallback))


def _load_story_or_exit(path: str):
    try:
        return load_story(path)
    except FileNotFoundError:
        print(f"error: story file not found: {path}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    except StoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_DOMAIN)


def _load_profile(path: str) -> PlayerProfile:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return PlayerProfile(f=raw["f"], gE=raw["gE"], pE=raw["pE"], p=raw["p"])


def cmd_validate(args) -> int:
    definition = _load_story_or_exit(args.story)
    report = validate_story(definition)
    print(f"story: {definition.id}")
    print(f"plot points: {len(definition.graph.plot_points)}")
    print(f"endings: {report.ending_count}")
    print(f"acyclic: {report.acyclic}")
    if report.problems:
        for problem in report.problems:
            print(f"problem: {problem}")
        return EXIT_DOMAIN
    print("ok")
    return EXIT_OK


def cmd_simulate(args) -> int:
    _resolve_batch_args(args)
    definition = _load_story_or_exit(args.story)
    if args.uninformed and args.profile:
        print("error: --uninformed and --profile are mutually exclusive", file=sys.stderr)
        return EXIT_USAGE
    if not args.uninformed and not args.profile:
        print("error: pass --profile FILE or --uninformed", file=sys.stderr)
        return EXIT_USAGE
    profile = None if args.uninformed else _load_profile(args.profile)
    spec = SimulationSpec(
        story=definition,
        agent_kind="uninformed" if args.uninformed else "informed",
        profile=profile,
        runs=args.runs,
        seed_base=args.seed,
        config=AgentConfig(max_ticks=args.max_ticks),
    )
    try:
        if args.events:
            batch = _run_batch_with_events(spec, args.events)
        else:
            batch = run_batch(spec, workers=args.workers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = Path(args.out)
    manifest = out.with_suffix(out.suffix + ".manifest.json")
    write_batch(batch, out, manifest)
    finished = sum(1 for t in batch.traces if t.finished())
    print(f"wrote {len(batch.traces)} traces to {out} ({finished} reached an ending)")
    print(f"manifest: {manifest}")
    return EXIT_OK


def _run_batch_with_events(spec: SimulationSpec, events_path) -> "SimulationBatch":
    """Sequential batch that also streams per-tick agent event records."""
    from dataclasses import replace

    from .agent import run_agent_full
    from .simulate import SimulationBatch
    from .story import validate_story as _validate

    report = _validate(spec.story)
    if not report.valid:
        raise ValueError("story failed validation: " + "; ".join(report.problems))
    seeds = tuple(spec.seed_base + i for i in range(spec.runs))
    traces = []
    with open(events_path, "w", encoding="utf-8") as fh:
        for i, seed in enumerate(seeds):
            trace, agent = run_agent_full(
                spec.story, spec.profile, replace(spec.config, seed=seed),
                log_events=True)
            traces.append(trace)
            for event in agent.event_log:
                fh.write(json.dumps({"run": i, **event}, sort_keys=True) + "\n")
    return SimulationBatch(spec=spec, traces=tuple(traces), seeds=seeds)


def _one_trace(path: str, session: str | None = None, include_unfinished: bool = False):
    traces = read_trace_file(path)
    if session is not None:
        traces = [t for t in traces if t.session_id == session]
    if not include_unfinished:
        traces = [t for t in traces if t.finished()]
    if not traces:
        raise ValueError(
            f"no traces in {path}"
            + (f" for session {session}" if session else "")
            + ("" if include_unfinished else " (abandoned games are skipped)"))
    return traces[0]


def cmd_gridsearch(args) -> int:
    _resolve_batch_args(args)
    definition = _load_story_or_exit(args.story)
    try:
        human = _one_trace(args.trace, args.session, args.include_unfinished)
        result = grid_search(
            definition, human, runs=args.runs, seed_base=args.seed,
            config=AgentConfig(max_ticks=args.max_ticks), workers=args.workers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        export_report(result, "csv", fh)
    bits = result.best_profile.as_dict()
    print(f"wrote 16 profile rows to {args.out}")
    print(
        "best profile: "
        f"f={bits['f']} gE={bits['gE']} pE={bits['pE']} p={bits['p']} "
        f"mean={result.best_mean:.4f}"
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    _resolve_batch_args(args)
    definition = _load_story_or_exit(args.story)
    try:
        traces = [t for t in read_trace_file(args.traces) if t.finished()]
        with open(args.profiles, "r", encoding="utf-8") as fh:
            profile_map = json.load(fh)
        rows = []
        for trace in traces:
            raw = profile_map.get(trace.session_id)
            if raw is None:
                raise ValueError(f"no profile for session {trace.session_id!r}")
            reported = PlayerProfile(f=raw["f"], gE=raw["gE"], pE=raw["pE"], p=raw["p"])
            rows.append(compare_methods(
                trace, reported, definition, runs=args.runs, seed_base=args.seed,
                config=AgentConfig(max_ticks=args.max_ticks), workers=args.workers))
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        export_report(rows, "csv", fh)
    flagged = sum(1 for r in rows if r.reported_equals_best)
    print(f"wrote {len(rows)} comparison rows to {args.out}")
    print(f"reported profile equals best in {flagged} of {len(rows)} cases")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        app = create_app(args.stories, args.data, static_dir=args.static)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inplayer",
        description="Plot-graph narrative engine, player-profile agents, and trace evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a story document")
    p.add_argument("--story", required=True, help="story JSON file")
    p.set_defaults(func=cmd_validate)

    def add_batch_flags(p):
        p.add_argument("--runs", type=int, default=None,
                       help="games per batch (default 20)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed base; run i uses seed+i (default 0)")
        p.add_argument("--max-ticks", type=int, default=None, dest="max_ticks",
                       help="tick budget per game (default 300)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default 1)")
        p.add_argument("--config", help="JSON file with defaults for these flags")

    p = sub.add_parser("simulate", help="run a seeded batch of agent games")
    p.add_argument("--story", required=True, help="story JSON file")
    p.add_argument("--profile", help="player profile JSON file ({f, gE, pE, p})")
    p.add_argument("--uninformed", action="store_true", help="run the baseline agent")
    add_batch_flags(p)
    p.add_argument("--events", help="also write per-tick agent events to this JSONL file")
    p.add_argument("--out", required=True, help="output trace file (JSONL)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gridsearch", help="find the best binary profile for one trace")
    p.add_argument("--story", required=True)
    p.add_argument("--trace", required=True,
                   help="trace file; the first finished trace is used")
    p.add_argument("--session", help="pick this session id from the trace file")
    p.add_argument("--include-unfinished", action="store_true", dest="include_unfinished",
                   help="also accept traces that never reached an ending")
    add_batch_flags(p)
    p.add_argument("--out", required=True, help="output CSV (16 profile rows)")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("compare", help="reported vs best vs uninformed, per trace")
    p.add_argument("--story", required=True)
    p.add_argument("--traces", required=True, help="human trace file (JSONL)")
    p.add_argument("--profiles", required=True,
                   help="JSON file mapping session id -> {f, gE, pE, p}")
    add_batch_flags(p)
    p.add_argument("--out", required=True, help="output CSV, one row per trace")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="serve the play client and session API")
    p.add_argument("--stories", required=True, help="directory of story JSON files")
    p.add_argument("--data", required=True, help="session data directory")
    p.add_argument("--static", help="directory of play-client assets to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
