import json
from pathlib import Path

import pytest

from inplayer.story import load_story

STORIES_DIR = Path(__file__).resolve().parent.parent / "stories"


@pytest.fixture(scope="session")
def anchorhead():
    return load_story(STORIES_DIR / "anchorhead-day2.json")


@pytest.fixture(scope="session")
def detour_vault():
    return load_story(STORIES_DIR / "detour-vault.json")


def toy_story_doc() -> dict:
    """Three plot points on a single chain; exactly one legal trace.

    The scrolls stay hidden so no generic actions exist: the only action
    ever offered is the one live read rule.
    """
    return {
        "id": "toy-chain",
        "start": "cell",
        "locations": [{"id": "cell", "description": "A bare cell.", "exits": []}],
        "items": [
            {"id": "scroll-a", "location": "cell", "hidden": True},
            {"id": "scroll-b", "location": "cell", "hidden": True},
            {"id": "scroll-c", "location": "cell", "hidden": True},
        ],
        "characters": [],
        "plot_points": [
            {"id": "a", "predecessors": []},
            {"id": "b", "predecessors": ["a"]},
            {"id": "c", "predecessors": ["b"], "is_ending": True},
        ],
        "action_rules": [
            {"verb": "read", "subject": "scroll-a", "requires": {"location": "cell"},
             "triggers": ["a"]},
            {"verb": "read", "subject": "scroll-b",
             "requires": {"location": "cell", "discovered": ["a"]}, "triggers": ["b"]},
            {"verb": "read", "subject": "scroll-c",
             "requires": {"location": "cell", "discovered": ["b"]}, "triggers": ["c"]},
        ],
    }


@pytest.fixture()
def toy_story():
    return load_story(json.dumps(toy_story_doc()))


def cyclic_story_doc() -> dict:
    doc = toy_story_doc()
    doc["id"] = "toy-cycle"
    doc["plot_points"] = [
        {"id": "a", "predecessors": ["b"]},
        {"id": "b", "predecessors": ["a"]},
        {"id": "c", "predecessors": [], "is_ending": True},
    ]
    return doc
