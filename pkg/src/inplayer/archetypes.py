"""Scripted synthetic players for the day-two story.

Each archetype is a hand-authored action sequence replayed through the
engine, standing in for a real player of that style: the speedrunner
beelines to an ending, the explorer pokes at everything on a full tour,
and the completionist clears every plot point the story has before
allowing it to end. Replaying through apply_action guarantees the
scripts stay legal and their traces precedence-sound.
"""

from __future__ import annotations

from .story import Action, StoryDefinition, apply_action, available_actions, initial_state, is_terminal
from .traces import Trace

SPEEDRUNNER = (
    ("goto", "hall"),
    ("goto", "study"),
    ("examine", "album"),
    ("take", "card"),
    ("goto", "hall"),
    ("goto", "livingroom"),
    ("goto", "street"),
    ("goto", "square"),
    ("goto", "library"),
    ("take", "library-book"),
    ("goto", "square"),
    ("goto", "street"),
    ("goto", "alley"),
    ("open", "grate"),
    ("examine", "altar"),
    ("read", "book"),
)

EXPLORER = (
    ("examine", "cracked-vase"),
    ("goto", "hall"),
    ("examine", "portrait"),
    ("examine", "umbrella"),
    ("goto", "study"),
    ("examine", "album"),
    ("examine", "painting"),
    ("examine", "safe"),
    ("take", "card"),
    ("goto", "hall"),
    ("goto", "bedroom"),
    ("examine", "pages"),
    ("read", "pages"),
    ("examine", "puzzle-box"),
    ("take", "puzzle-box"),
    ("open", "puzzle-box"),
    ("goto", "hall"),
    ("goto", "basement"),
    ("examine", "clippings"),
    ("read", "clippings"),
    ("examine", "flask"),
    ("take", "flask"),
    ("goto", "hall"),
    ("goto", "livingroom"),
    ("goto", "street"),
    ("goto", "alley"),
    ("examine", "old-boot"),
    ("examine", "grate"),
    ("talk", "bum"),
    ("give", "flask", "bum"),
    ("goto", "street"),
    ("goto", "square"),
    ("examine", "handbill"),
    ("goto", "library"),
    ("examine", "library-book"),
    ("talk", "librarian"),
    ("take", "library-book"),
    ("goto", "square"),
    ("goto", "magic-shop"),
    ("examine", "magic-ball"),
    ("talk", "shopkeeper"),
    ("buy", "magic-ball"),
    ("goto", "square"),
    ("goto", "graveyard"),
    ("examine", "crypt-gate"),
    ("examine", "amulet"),
    ("take", "amulet"),
    ("goto", "square"),
    ("goto", "street"),
    ("goto", "alley"),
    ("open", "grate"),
    ("examine", "altar"),
    ("examine", "book"),
    ("read", "book"),
)

COMPLETIONIST = (
    ("goto", "hall"),
    ("goto", "study"),
    ("examine", "album"),
    ("take", "card"),
    ("examine", "painting"),
    ("open", "safe"),
    ("take", "crypt-key"),
    ("take", "silver-locket"),
    ("goto", "hall"),
    ("goto", "bedroom"),
    ("read", "pages"),
    ("take", "puzzle-box"),
    ("open", "puzzle-box"),
    ("goto", "hall"),
    ("goto", "basement"),
    ("read", "clippings"),
    ("take", "flask"),
    ("goto", "hall"),
    ("goto", "livingroom"),
    ("goto", "street"),
    ("goto", "alley"),
    ("talk", "bum"),
    ("give", "flask", "bum"),
    ("ask", "bum", "photo"),
    ("ask", "bum", "william"),
    ("goto", "street"),
    ("goto", "livingroom"),
    ("goto", "hall"),
    ("goto", "basement"),
    ("take", "flask"),
    ("goto", "hall"),
    ("goto", "livingroom"),
    ("goto", "street"),
    ("goto", "square"),
    ("goto", "library"),
    ("take", "library-book"),
    ("goto", "square"),
    ("goto", "magic-shop"),
    ("buy", "magic-ball"),
    ("goto", "square"),
    ("goto", "graveyard"),
    ("take", "amulet"),
    ("open", "crypt-gate"),
    ("examine", "coffin"),
    ("open", "coffin"),
    ("take", "skull"),
    ("goto", "graveyard"),
    ("goto", "square"),
    ("goto", "street"),
    ("goto", "alley"),
    ("show", "skull", "bum"),
    ("give", "amulet", "bum"),
    ("open", "grate"),
    ("examine", "altar"),
    ("goto", "alley"),
    ("ask", "bum", "truth"),
)

ARCHETYPES = {
    "speedrunner": SPEEDRUNNER,
    "explorer": EXPLORER,
    "completionist": COMPLETIONIST,
}

# Questionnaire-style profiles a player of each archetype would report.
ARCHETYPE_PROFILES = {
    "speedrunner": {"f": 0.75, "gE": 0.75, "pE": 0.25, "p": 0.25},
    "explorer": {"f": 0.25, "gE": 0.5, "pE": 1.0, "p": 0.75},
    "completionist": {"f": 0.5, "gE": 1.0, "pE": 1.0, "p": 1.0},
}


def play_script(definition: StoryDefinition, script, session_id: str) -> Trace:
    """Replay a scripted action sequence and return its human-style
    trace. Raises IllegalActionError if the script ever desyncs from the
    engine."""
    state = initial_state(definition)
    recorded = []
    for step in script:
        action = Action(*step)
        available = available_actions(definition, state)
        state, _ = apply_action(definition, state, action, available=available)
        recorded.append((state.tick, action))
    return Trace(
        session_id=session_id,
        story_id=definition.id,
        agent_kind="human",
        actions=tuple(recorded),
        plot_points=tuple(state.discovered),
        ending=is_terminal(definition, state),
        profile_used=None,
        seed=None,
    )


def archetype_trace(definition: StoryDefinition, name: str) -> Trace:
    return play_script(definition, ARCHETYPES[name], session_id=f"archetype-{name}")
