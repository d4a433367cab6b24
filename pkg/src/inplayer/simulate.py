"""Seeded batches of agent games.

A batch runs one agent configuration `runs` times, run i seeded with
seed_base + i, so any batch can be reproduced from its manifest. Runs
are independent; the runner may fan them out over worker threads and
still yields bit-identical results in run-index order.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .agent import AgentConfig, run_agent
from .profiles import PlayerProfile, profile_to_json_dict
from .story import StoryDefinition, validate_story
from .traces import Trace, trace_to_line


@dataclass(frozen=True)
class SimulationSpec:
    story: StoryDefinition
    agent_kind: str                    # "uninformed" | "informed"
    profile: PlayerProfile | None = None
    runs: int = 20
    seed_base: int = 0
    config: AgentConfig = AgentConfig()

    def __post_init__(self):
        if self.agent_kind not in ("uninformed", "informed"):
            raise ValueError(f"unknown agent kind {self.agent_kind!r}")
        if self.agent_kind == "informed" and self.profile is None:
            raise ValueError("informed simulations need a profile")
        if self.agent_kind == "uninformed" and self.profile is not None:
            raise ValueError("uninformed simulations take no profile")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class SimulationBatch:
    spec: SimulationSpec
    traces: tuple[Trace, ...]
    seeds: tuple[int, ...]
    elapsed_seconds: float = 0.0


def run_batch(
    spec: SimulationSpec,
    previous_trace: Trace | None = None,
    workers: int = 1,
) -> SimulationBatch:
    """Run the whole batch; trace i buys its own agent and session and is
    seeded with seed_base + i. Output order is by run index regardless of
    completion order."""
    report = validate_story(spec.story)
    if not report.valid:
        raise ValueError("story failed validation: " + "; ".join(report.problems))

    seeds = tuple(spec.seed_base + i for i in range(spec.runs))
    started = time.perf_counter()

    def one(seed: int) -> Trace:
        config = replace(spec.config, seed=seed)
        return run_agent(spec.story, spec.profile, config, previous_trace=previous_trace)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = tuple(pool.map(one, seeds))
    else:
        traces = tuple(one(seed) for seed in seeds)
    elapsed = time.perf_counter() - started
    return SimulationBatch(spec=spec, traces=traces, seeds=seeds, elapsed_seconds=elapsed)


def batch_manifest(batch: SimulationBatch) -> dict:
    spec = batch.spec
    return {
        "schema_version": 1,
        "story_id": spec.story.id,
        "agent_kind": spec.agent_kind,
        "profile": profile_to_json_dict(spec.profile) if spec.profile else None,
        "runs": spec.runs,
        "seed_base": spec.seed_base,
        "seeds": list(batch.seeds),
        "max_ticks": spec.config.max_ticks,
        "persistence_budget": spec.config.resolved_budget(),
        "elapsed_seconds": round(batch.elapsed_seconds, 3),
        "endings_reached": sum(1 for t in batch.traces if t.finished()),
    }


def write_batch(batch: SimulationBatch, trace_path, manifest_path=None) -> None:
    with open(trace_path, "w", encoding="utf-8") as fh:
        for trace in batch.traces:
            fh.write(trace_to_line(trace) + "\n")
    if manifest_path is not None:
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(batch_manifest(batch), fh, indent=2, sort_keys=True)
            fh.write("\n")
