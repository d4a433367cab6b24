"""Trace similarity and the best-profile search.

Traces are compared on their plot-point sets with the Jaccard index.
A similarity report summarises one human trace against a batch of
simulated traces; the grid search runs one informed batch per binary
profile and keeps the profile whose batch matches best on mean Jaccard.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .agent import AgentConfig
from .profiles import BinaryProfile, PlayerProfile, binarize, enumerate_binary_profiles
from .simulate import SimulationBatch, SimulationSpec, run_batch
from .story import StoryDefinition
from .traces import Trace

SCHEMA_VERSION = 1


def jaccard(a, b) -> float:
    """|a & b| / |a | b|. Two empty sets count as identical (1.0)."""
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def quantile(sorted_values: list[float], q: float) -> float:
    """Quantile by linear interpolation between closest ranks."""
    if not sorted_values:
        raise ValueError("no values")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q={q} outside [0, 1]")
    pos = q * (len(sorted_values) - 1)
    lower = int(pos)
    upper = min(lower + 1, len(sorted_values) - 1)
    frac = pos - lower
    return sorted_values[lower] * (1 - frac) + sorted_values[upper] * frac


@dataclass(frozen=True)
class SimilarityReport:
    values: tuple[float, ...]
    mean: float
    min: float
    max: float
    q1: float
    median: float
    q3: float

    @classmethod
    def from_values(cls, values) -> "SimilarityReport":
        values = tuple(values)
        if not values:
            raise ValueError("cannot summarise an empty batch")
        ordered = sorted(values)
        return cls(
            values=values,
            mean=sum(values) / len(values),
            min=ordered[0],
            max=ordered[-1],
            q1=quantile(ordered, 0.25),
            median=quantile(ordered, 0.5),
            q3=quantile(ordered, 0.75),
        )

    def to_dict(self) -> dict:
        return {
            "values": list(self.values),
            "mean": self.mean,
            "min": self.min,
            "max": self.max,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
        }


def similarity_to_batch(human: Trace, batch: SimulationBatch) -> SimilarityReport:
    """Jaccard of the human trace's plot points against every trace in
    the batch."""
    if human.story_id != batch.spec.story.id:
        raise ValueError(
            f"trace story {human.story_id!r} != batch story {batch.spec.story.id!r}")
    target = human.plot_point_set()
    return SimilarityReport.from_values(
        jaccard(target, t.plot_point_set()) for t in batch.traces
    )


@dataclass(frozen=True)
class GridSearchResult:
    reports: dict[BinaryProfile, SimilarityReport]
    best_profile: BinaryProfile
    best_mean: float

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "profiles": [
                {"profile": bp.as_dict(), **report.to_dict()}
                for bp, report in self.reports.items()
            ],
            "best_profile": self.best_profile.as_dict(),
            "best_mean": self.best_mean,
        }


def grid_search(
    story: StoryDefinition,
    human: Trace,
    runs: int = 20,
    seed_base: int = 0,
    config: AgentConfig = AgentConfig(),
    workers: int = 1,
) -> GridSearchResult:
    """Evaluate all 16 binary profiles against one human trace.

    Each profile gets its own informed batch over the same seed block so
    profiles are compared on paired seeds. Best is the highest mean;
    exact ties go to the lexicographically first profile.
    """
    if human.story_id != story.id:
        raise ValueError(f"trace story {human.story_id!r} != story {story.id!r}")
    reports: dict[BinaryProfile, SimilarityReport] = {}
    for bp in enumerate_binary_profiles():
        spec = SimulationSpec(
            story=story,
            agent_kind="informed",
            profile=bp.as_profile(),
            runs=runs,
            seed_base=seed_base,
            config=config,
        )
        batch = run_batch(spec, workers=workers)
        reports[bp] = similarity_to_batch(human, batch)
    # max keeps the first maximum, so ties fall to lexicographic order
    best_profile = max(reports, key=lambda bp: reports[bp].mean)
    return GridSearchResult(
        reports=reports,
        best_profile=best_profile,
        best_mean=reports[best_profile].mean,
    )


@dataclass(frozen=True)
class ComparisonRow:
    session_id: str
    reported_profile: PlayerProfile
    reported_binary: BinaryProfile
    best_profile: BinaryProfile
    reported_equals_best: bool
    reported: SimilarityReport
    best: SimilarityReport
    uninformed: SimilarityReport

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "reported_profile": self.reported_profile.as_dict(),
            "reported_binary": self.reported_binary.as_dict(),
            "best_profile": self.best_profile.as_dict(),
            "reported_equals_best": self.reported_equals_best,
            "reported": self.reported.to_dict(),
            "best": self.best.to_dict(),
            "uninformed": self.uninformed.to_dict(),
        }


def compare_methods(
    human: Trace,
    reported_pp: PlayerProfile,
    story: StoryDefinition,
    runs: int = 20,
    seed_base: int = 0,
    config: AgentConfig = AgentConfig(),
    workers: int = 1,
) -> ComparisonRow:
    """One human trace, three ways to simulate them: informed with the
    profile they reported, informed with the grid-search best profile,
    and the uninformed baseline."""
    reported_batch = run_batch(SimulationSpec(
        story=story, agent_kind="informed", profile=reported_pp,
        runs=runs, seed_base=seed_base, config=config), workers=workers)
    grid = grid_search(story, human, runs=runs, seed_base=seed_base,
                       config=config, workers=workers)
    uninformed_batch = run_batch(SimulationSpec(
        story=story, agent_kind="uninformed", profile=None,
        runs=runs, seed_base=seed_base, config=config), workers=workers)
    reported_binary = binarize(reported_pp)
    return ComparisonRow(
        session_id=human.session_id,
        reported_profile=reported_pp,
        reported_binary=reported_binary,
        best_profile=grid.best_profile,
        reported_equals_best=reported_binary == grid.best_profile,
        reported=similarity_to_batch(human, reported_batch),
        best=grid.reports[grid.best_profile],
        uninformed=similarity_to_batch(human, uninformed_batch),
    )


# ---------------------------------------------------------------------------
# Exports

_SUMMARY_FIELDS = ("mean", "min", "q1", "median", "q3", "max")


def _report_row(report: SimilarityReport) -> dict:
    row = {field: f"{getattr(report, field):.6f}" for field in _SUMMARY_FIELDS}
    row["values"] = ";".join(f"{v:.6f}" for v in report.values)
    return row


def export_report(result, fmt: str, sink) -> None:
    """Write a SimilarityReport, GridSearchResult, or list of
    ComparisonRow to `sink` as csv or json. Column layouts are described
    in the README."""
    if fmt == "json":
        json.dump(_as_json(result), sink, indent=2, sort_keys=True)
        sink.write("\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")

    if isinstance(result, SimilarityReport):
        writer = csv.DictWriter(sink, fieldnames=list(_SUMMARY_FIELDS) + ["values"])
        writer.writeheader()
        writer.writerow(_report_row(result))
    elif isinstance(result, GridSearchResult):
        fields = ["f", "gE", "pE", "p", "best"] + list(_SUMMARY_FIELDS) + ["values"]
        writer = csv.DictWriter(sink, fieldnames=fields)
        writer.writeheader()
        for bp, report in result.reports.items():
            row = {"f": bp.f, "gE": bp.gE, "pE": bp.pE, "p": bp.p,
                   "best": int(bp == result.best_profile)}
            row.update(_report_row(report))
            writer.writerow(row)
    elif isinstance(result, list):
        fields = ["session_id", "reported_equals_best",
                  "reported_f", "reported_gE", "reported_pE", "reported_p",
                  "best_f", "best_gE", "best_pE", "best_p"]
        for prefix in ("reported", "best", "uninformed"):
            fields += [f"{prefix}_{f}" for f in _SUMMARY_FIELDS]
        writer = csv.DictWriter(sink, fieldnames=fields)
        writer.writeheader()
        for row_data in result:
            row = {
                "session_id": row_data.session_id,
                "reported_equals_best": int(row_data.reported_equals_best),
            }
            for factor, bit in row_data.reported_binary.as_dict().items():
                row[f"reported_{factor}"] = bit
            for factor, bit in row_data.best_profile.as_dict().items():
                row[f"best_{factor}"] = bit
            for prefix in ("reported", "best", "uninformed"):
                report = getattr(row_data, prefix)
                for field in _SUMMARY_FIELDS:
                    row[f"{prefix}_{field}"] = f"{getattr(report, field):.6f}"
            writer.writerow(row)
    else:
        raise TypeError(f"cannot export {type(result).__name__}")


def _as_json(result) -> dict | list:
    if isinstance(result, SimilarityReport):
        return {"schema_version": SCHEMA_VERSION, **result.to_dict()}
    if isinstance(result, GridSearchResult):
        return result.to_dict()
    if isinstance(result, list):
        return {
            "schema_version": SCHEMA_VERSION,
            "rows": [row.to_dict() for row in result],
        }
    raise TypeError(f"cannot export {type(result).__name__}")
