"""Play traces and their line-delimited JSON wire format.

One trace records one play-through: the ordered actions taken, the plot
points discovered in trigger order, and the ending reached, if any.
Human and simulated traces share this format exactly so the evaluation
pipeline consumes both uniformly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .profiles import PlayerProfile
from .story import Action

AGENT_KINDS = ("human", "uninformed", "informed")


@dataclass(frozen=True)
class Trace:
    session_id: str
    story_id: str
    agent_kind: str
    actions: tuple[tuple[int, Action], ...]
    plot_points: tuple[str, ...]
    ending: str | None = None
    profile_used: PlayerProfile | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.agent_kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.agent_kind!r}")

    def plot_point_set(self) -> frozenset[str]:
        return frozenset(self.plot_points)

    def action_keys(self) -> frozenset:
        return frozenset(a.key() for _, a in self.actions)

    def finished(self) -> bool:
        return self.ending is not None

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "story_id": self.story_id,
            "agent_kind": self.agent_kind,
            "seed": self.seed,
            "profile": self.profile_used.as_dict() if self.profile_used else None,
            "actions": [
                {"tick": tick, **action.to_dict()} for tick, action in self.actions
            ],
            "plot_points": list(self.plot_points),
            "ending": self.ending,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trace":
        profile = PlayerProfile(**d["profile"]) if d.get("profile") else None
        return cls(
            session_id=d["session_id"],
            story_id=d["story_id"],
            agent_kind=d["agent_kind"],
            actions=tuple(
                (a["tick"], Action(a["verb"], a["subject"], a.get("object")))
                for a in d["actions"]
            ),
            plot_points=tuple(d["plot_points"]),
            ending=d.get("ending"),
            profile_used=profile,
            seed=d.get("seed"),
        )


def trace_to_line(trace: Trace) -> str:
    """One trace as a canonical JSON line (sorted keys, no whitespace)."""
    return json.dumps(trace.to_dict(), sort_keys=True, separators=(",", ":"))


def trace_from_line(line: str) -> Trace:
    return Trace.from_dict(json.loads(line))


def write_trace_file(traces, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(trace_to_line(trace) + "\n")


def read_trace_file(path) -> list[Trace]:
    traces = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                traces.append(trace_from_line(line))
    return traces
