"""Player profiles: questionnaire scoring, normalization, binarization.

A profile holds four factors, each in [0, 1]:

    f   familiarity with this game
    gE  gaming experience
    pE  preference to explore
    p   persistence

Factors come from a ten-item Likert questionnaire (answers 1..5,
strongly disagree = 1, strongly agree = 5). Three factors are scored
from two positively-worded items and one negatively-worded item;
familiarity has a single item and is scaled linearly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product


@dataclass(frozen=True)
class Statement:
    text: str
    factor: str          # one of "f", "gE", "pE", "p"
    polarity: str        # "positive" or "negative"


@dataclass(frozen=True)
class Questionnaire:
    statements: tuple[Statement, ...]

    def __post_init__(self):
        counts: dict[tuple[str, str], int] = {}
        for s in self.statements:
            if s.factor not in ("f", "gE", "pE", "p"):
                raise ValueError(f"unknown factor {s.factor!r}")
            if s.polarity not in ("positive", "negative"):
                raise ValueError(f"unknown polarity {s.polarity!r}")
            counts[(s.factor, s.polarity)] = counts.get((s.factor, s.polarity), 0) + 1
        expected = {
            ("f", "positive"): 1,
            ("gE", "positive"): 2, ("gE", "negative"): 1,
            ("pE", "positive"): 2, ("pE", "negative"): 1,
            ("p", "positive"): 2, ("p", "negative"): 1,
        }
        if counts != expected:
            raise ValueError(f"questionnaire shape {counts} != required {expected}")


DEFAULT_QUESTIONNAIRE = Questionnaire(statements=(
    Statement("My familiarity with the text-based game \"Anchorhead\" is", "f", "positive"),
    Statement("My gaming experience is", "gE", "positive"),
    Statement("I think about the consequences of my actions when playing", "gE", "positive"),
    Statement("I complete one quest at a time", "gE", "negative"),
    Statement("I explore all the places, elements and characters of the virtual world", "pE", "positive"),
    Statement("I complete all quests, including those that aren't necessary to finish the game", "pE", "positive"),
    Statement("I only do what is necessary to pass a level or complete a quest", "pE", "negative"),
    Statement("If I fail a quest, I repeat it until I complete it", "p", "positive"),
    Statement("I defer my other activities if I'm stuck on a task or mission while playing", "p", "positive"),
    Statement("I give up on quests if I find more appealing ones", "p", "negative"),
))

# The first two statements rate a level rather than agreement, so clients
# label their scale endpoints differently.
LEVEL_SCALE_STATEMENTS = 2


@dataclass(frozen=True)
class LikertResponse:
    answers: tuple[int, ...]

    def __post_init__(self):
        if len(self.answers) != 10:
            raise ValueError(f"expected 10 answers, got {len(self.answers)}")
        for a in self.answers:
            if a not in (1, 2, 3, 4, 5):
                raise ValueError(f"answer {a!r} outside 1..5")


@dataclass(frozen=True)
class PlayerProfile:
    f: float
    gE: float
    pE: float
    p: float

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"factor {name}={value} outside [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return {"f": self.f, "gE": self.gE, "pE": self.pE, "p": self.p}


@dataclass(frozen=True)
class BinaryProfile:
    f: int
    gE: int
    pE: int
    p: int

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if value not in (0, 1):
                raise ValueError(f"factor {name}={value} not binary")

    def as_dict(self) -> dict[str, int]:
        return {"f": self.f, "gE": self.gE, "pE": self.pE, "p": self.p}

    def as_profile(self) -> PlayerProfile:
        return PlayerProfile(float(self.f), float(self.gE), float(self.pE), float(self.p))

    def bits(self) -> tuple[int, int, int, int]:
        return (self.f, self.gE, self.pE, self.p)


def normalize_factor(p1: int, p2: int, n1: int) -> float:
    """Linear scaling of one factor's (positive, positive, negative) scores.

    The raw score p1 + p2 - n1 ranges over [-3, 9]; shifting by 3 and
    dividing by 12 maps it onto [0, 1].
    """
    for v in (p1, p2, n1):
        if not 1 <= v <= 5:
            raise ValueError(f"score {v!r} outside 1..5")
    return (p1 + p2 - n1 + 3) / 12


def build_profile(
    questionnaire: Questionnaire,
    response: LikertResponse,
    familiarity_override: bool | None = None,
) -> PlayerProfile:
    """Score a response against a questionnaire.

    gE, pE and p each use their two positive items and one negative item;
    familiarity has a single item mapped linearly from 1..5 to [0, 1].
    `familiarity_override` replaces the scored f with 0.0 or 1.0 for
    callers that collect familiarity as a yes/no answer instead.
    """
    if len(response.answers) != len(questionnaire.statements):
        raise ValueError(
            f"response length {len(response.answers)} != "
            f"questionnaire length {len(questionnaire.statements)}"
        )
    positives: dict[str, list[int]] = {"f": [], "gE": [], "pE": [], "p": []}
    negatives: dict[str, list[int]] = {"f": [], "gE": [], "pE": [], "p": []}
    for statement, answer in zip(questionnaire.statements, response.answers):
        bucket = positives if statement.polarity == "positive" else negatives
        bucket[statement.factor].append(answer)

    f = (positives["f"][0] - 1) / 4
    if familiarity_override is not None:
        f = 1.0 if familiarity_override else 0.0
    return PlayerProfile(
        f=f,
        gE=normalize_factor(positives["gE"][0], positives["gE"][1], negatives["gE"][0]),
        pE=normalize_factor(positives["pE"][0], positives["pE"][1], negatives["pE"][0]),
        p=normalize_factor(positives["p"][0], positives["p"][1], negatives["p"][0]),
    )


def binarize(profile: PlayerProfile) -> BinaryProfile:
    """Split each factor at 0.5; the boundary itself counts as low."""
    def bit(value: float) -> int:
        return 0 if value <= 0.5 else 1
    return BinaryProfile(bit(profile.f), bit(profile.gE), bit(profile.pE), bit(profile.p))


def apply_replay_rule(profile: PlayerProfile, game_index: int) -> PlayerProfile:
    """Adjust familiarity for repeat games.

    A player replaying the game knows it regardless of what they reported
    the first time, so from the second game on a familiarity below 0.5 is
    forced to 1.0. The first game and the other factors are untouched.
    """
    if game_index < 1:
        raise ValueError(f"game_index must be >= 1, got {game_index}")
    if game_index >= 2 and profile.f < 0.5:
        return PlayerProfile(1.0, profile.gE, profile.pE, profile.p)
    return profile


def enumerate_binary_profiles() -> list[BinaryProfile]:
    """All 16 binary profiles in lexicographic (f, gE, pE, p) order."""
    return [BinaryProfile(*bits) for bits in product((0, 1), repeat=4)]


def profile_to_json_dict(profile: PlayerProfile) -> dict:
    return {
        "f": profile.f,
        "gE": profile.gE,
        "pE": profile.pE,
        "p": profile.p,
        "binarized": binarize(profile).as_dict(),
    }
