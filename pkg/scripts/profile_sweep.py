#!/usr/bin/env python3
"""Behavioural summary of all 16 binary profiles plus the baseline.

Runs a seeded batch per profile on the shipped story and prints plot
points discovered, ticks to finish, ending reached, and goal drops.
Useful when tuning a story or the agent's plan library.

Usage:
    python3 scripts/profile_sweep.py [--runs 50] [--seed 0]
"""

import argparse
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from inplayer.agent import AgentConfig, run_agent_full
from inplayer.profiles import enumerate_binary_profiles
from inplayer.story import load_story

STORY = Path(__file__).resolve().parent.parent / "stories" / "anchorhead-day2.json"


def summarise(definition, profile, runs, seed_base):
    points, ticks, drops = [], [], []
    endings = Counter()
    for i in range(runs):
        trace, agent = run_agent_full(definition, profile, AgentConfig(seed=seed_base + i))
        points.append(len(trace.plot_points))
        ticks.append(len(trace.actions))
        drops.append(len(agent.dropped_log))
        endings[trace.ending or "none"] += 1
    return (
        sum(points) / runs,
        sum(ticks) / runs,
        sum(drops) / runs,
        dict(endings),
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    definition = load_story(STORY)
    print(f"{'profile':>10} {'points':>7} {'ticks':>7} {'drops':>6}  endings")
    mean_pp, mean_ticks, mean_drops, endings = summarise(
        definition, None, args.runs, args.seed)
    print(f"{'baseline':>10} {mean_pp:7.1f} {mean_ticks:7.1f} {mean_drops:6.2f}  {endings}")
    for bp in enumerate_binary_profiles():
        mean_pp, mean_ticks, mean_drops, endings = summarise(
            definition, bp.as_profile(), args.runs, args.seed)
        label = "".join(str(b) for b in bp.bits())
        print(f"{label:>10} {mean_pp:7.1f} {mean_ticks:7.1f} {mean_drops:6.2f}  {endings}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
