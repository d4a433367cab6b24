"""World model, plot graph, and the rules that move a game forward.

A story is a set of locations, items and characters plus a plot graph:
a DAG of plot points whose edges are author-imposed precedence
constraints. Progress is the ordered set of plot points discovered.
Action rules attach plot-point triggers and state effects to concrete
player actions; a plot point fires only once all its predecessors have
already been discovered.

A loaded StoryDefinition is treated as immutable and may be shared
across concurrent sessions; all mutation goes through apply_action,
which maps an old GameState to a new one.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field, replace

GENERIC_VERBS = ("examine", "goto", "take", "talk")
RULE_VERBS = ("ask", "buy", "give", "open", "read", "show", "use")
VERBS = tuple(sorted(GENERIC_VERBS + RULE_VERBS))

# Verbs whose actions carry an indirect object ("give flask bum").
OBJECT_VERBS = ("give", "ask", "show")


class StoryError(Exception):
    """Base for story loading and play errors."""


class StoryParseError(StoryError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnresolvedReferenceError(StoryError):
    def __init__(self, missing: list[str]):
        self.missing = sorted(missing)
        super().__init__("unresolved references: " + ", ".join(self.missing))


class IllegalActionError(StoryError):
    """Raised when an action outside available_actions is applied."""


@dataclass(frozen=True)
class Action:
    verb: str
    subject: str
    object: str | None = None

    def __post_init__(self):
        if self.verb not in VERBS:
            raise ValueError(f"unknown verb {self.verb!r}")
        needs_object = self.verb in OBJECT_VERBS
        if needs_object and self.object is None:
            raise ValueError(f"verb {self.verb!r} requires an object")
        if not needs_object and self.object is not None:
            raise ValueError(f"verb {self.verb!r} takes no object")

    def key(self) -> tuple[str, str, str | None]:
        return (self.verb, self.subject, self.object)

    def sort_key(self) -> tuple[str, str, str]:
        return (self.verb, self.subject, self.object or "")

    def to_dict(self) -> dict:
        d = {"verb": self.verb, "subject": self.subject}
        if self.object is not None:
            d["object"] = self.object
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Action":
        return cls(d["verb"], d["subject"], d.get("object"))


@dataclass(frozen=True)
class PlotPoint:
    id: str
    label: str
    predecessors: frozenset[str]
    is_ending: bool = False


@dataclass(frozen=True)
class PlotGraph:
    plot_points: dict[str, PlotPoint]

    @property
    def endings(self) -> frozenset[str]:
        return frozenset(p.id for p in self.plot_points.values() if p.is_ending)

    def roots(self) -> list[str]:
        return sorted(p.id for p in self.plot_points.values() if not p.predecessors)


@dataclass(frozen=True)
class Location:
    id: str
    description: str
    exits: tuple[str, ...]
    is_indoor: bool = True


@dataclass(frozen=True)
class Item:
    id: str
    name: str
    location: str           # starting location id
    takeable: bool = False
    importance_hint: bool = False
    openable: bool = False  # containers; opening is always rule-driven
    hidden: bool = False    # invisible until a rule reveals it
    description: str = ""


@dataclass(frozen=True)
class Character:
    id: str
    name: str
    location: str
    topics: tuple[str, ...] = ()


@dataclass(frozen=True)
class Requires:
    """Conjunction of state predicates guarding a rule."""
    location: str | None = None
    has_items: tuple[str, ...] = ()
    discovered: tuple[str, ...] = ()
    flags: tuple[tuple[str, bool], ...] = ()

    def satisfied(self, location: str, inventory: frozenset[str],
                  discovered: frozenset[str], flags: dict[str, bool]) -> bool:
        if self.location is not None and location != self.location:
            return False
        for item in self.has_items:
            if item not in inventory:
                return False
        for pp in self.discovered:
            if pp not in discovered:
                return False
        for name, wanted in self.flags:
            if flags.get(name, False) != wanted:
                return False
        return True


@dataclass(frozen=True)
class Effects:
    add_items: tuple[str, ...] = ()
    remove_items: tuple[str, ...] = ()
    reveal_items: tuple[str, ...] = ()
    set_flags: tuple[tuple[str, bool], ...] = ()
    move_to: str | None = None


@dataclass(frozen=True)
class ActionRule:
    verb: str
    subject: str
    object: str | None = None
    requires: Requires = Requires()
    effects: Effects = Effects()
    triggers: tuple[str, ...] = ()

    def pattern(self) -> tuple[str, str, str | None]:
        return (self.verb, self.subject, self.object)


@dataclass(frozen=True)
class WorldModel:
    locations: dict[str, Location]
    items: dict[str, Item]
    characters: dict[str, Character]
    action_rules: tuple[ActionRule, ...]


class _ActionIndex:
    """Pre-built Action objects and rule lookup tables for one story.

    available_actions runs every tick of every simulation, so everything
    that does not depend on GameState is assembled once here.
    """

    def __init__(self, world: WorldModel):
        self.goto_actions = {
            loc.id: tuple(Action("goto", ex) for ex in loc.exits)
            for loc in world.locations.values()
        }
        self.examine_action = {i: Action("examine", i) for i in world.items}
        self.take_action = {
            i.id: Action("take", i.id) for i in world.items.values() if i.takeable
        }
        self.char_actions = {}
        for char in world.characters.values():
            acts = [Action("talk", char.id)]
            acts += [Action("ask", char.id, topic) for topic in char.topics]
            self.char_actions[char.id] = tuple(acts)
        self.items_by_location: dict[str, list[Item]] = {}
        for item in world.items.values():
            self.items_by_location.setdefault(item.location, []).append(item)
        self.chars_by_location: dict[str, list[Character]] = {}
        for char in world.characters.values():
            self.chars_by_location.setdefault(char.location, []).append(char)
        self.rule_actions = tuple(
            (rule, Action(rule.verb, rule.subject, rule.object))
            for rule in world.action_rules
        )
        self.rules_by_pattern: dict[tuple, list[ActionRule]] = {}
        for rule in world.action_rules:
            self.rules_by_pattern.setdefault(rule.pattern(), []).append(rule)


@dataclass
class StoryDefinition:
    id: str
    title: str
    start: str
    world: WorldModel
    graph: PlotGraph
    _index: _ActionIndex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._index = _ActionIndex(self.world)

    def location(self, loc_id: str) -> Location:
        return self.world.locations[loc_id]


@dataclass(frozen=True)
class GameState:
    current_location: str
    inventory: frozenset[str]
    discovered: tuple[str, ...]      # plot points in trigger order
    visited: frozenset[str]
    flags: tuple[tuple[str, bool], ...]
    tick: int

    def flag_map(self) -> dict[str, bool]:
        return dict(self.flags)


# Flag names the engine derives from reveal/remove effects.
def _revealed_flag(item_id: str) -> str:
    return f"revealed:{item_id}"


def _gone_flag(item_id: str) -> str:
    return f"gone:{item_id}"


# ---------------------------------------------------------------------------
# Loading


def _require_keys(obj: dict, keys: tuple[str, ...], context: str):
    for k in keys:
        if k not in obj:
            raise StoryParseError(f"{context}: missing key {k!r}")


def _parse_requires(raw: dict) -> Requires:
    return Requires(
        location=raw.get("location"),
        has_items=tuple(raw.get("has_items", ())),
        discovered=tuple(raw.get("discovered", ())),
        flags=tuple(sorted((k, bool(v)) for k, v in raw.get("flags", {}).items())),
    )


def _parse_effects(raw: dict) -> Effects:
    return Effects(
        add_items=tuple(raw.get("add_items", ())),
        remove_items=tuple(raw.get("remove_items", ())),
        reveal_items=tuple(raw.get("reveal_items", ())),
        set_flags=tuple(sorted((k, bool(v)) for k, v in raw.get("set_flags", {}).items())),
        move_to=raw.get("move_to"),
    )


def load_story(source) -> StoryDefinition:
    """Parse and resolve a story document.

    `source` may be a path, a byte/text stream, or raw bytes/str holding
    the JSON document described in the repository docs.
    """
    if isinstance(source, (bytes, str)) and not _looks_like_path(source):
        text = source.decode() if isinstance(source, bytes) else source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        text = data.decode() if isinstance(data, bytes) else data
    else:
        with open(source, "rb") as fh:
            text = fh.read().decode()

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoryParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc

    if not isinstance(doc, dict):
        raise StoryParseError("story document must be a JSON object")
    _require_keys(doc, ("start", "locations", "items", "characters",
                        "plot_points", "action_rules"), "story")

    plot_points: dict[str, PlotPoint] = {}
    for raw in doc["plot_points"]:
        _require_keys(raw, ("id",), "plot point")
        pp = PlotPoint(
            id=raw["id"],
            label=raw.get("label", raw["id"]),
            predecessors=frozenset(raw.get("predecessors", ())),
            is_ending=bool(raw.get("is_ending", False)),
        )
        if pp.id in plot_points:
            raise StoryParseError(f"duplicate plot point id {pp.id!r}")
        plot_points[pp.id] = pp
    if not plot_points:
        raise StoryParseError("no plot points")

    locations: dict[str, Location] = {}
    for raw in doc["locations"]:
        _require_keys(raw, ("id", "exits"), "location")
        loc = Location(
            id=raw["id"],
            description=raw.get("description", ""),
            exits=tuple(raw["exits"]),
            is_indoor=bool(raw.get("is_indoor", True)),
        )
        if loc.id in locations:
            raise StoryParseError(f"duplicate location id {loc.id!r}")
        locations[loc.id] = loc

    items: dict[str, Item] = {}
    for raw in doc["items"]:
        _require_keys(raw, ("id", "location"), "item")
        item = Item(
            id=raw["id"],
            name=raw.get("name", raw["id"].replace("-", " ")),
            location=raw["location"],
            takeable=bool(raw.get("takeable", False)),
            importance_hint=bool(raw.get("importance_hint", False)),
            openable=bool(raw.get("openable", False)),
            hidden=bool(raw.get("hidden", False)),
            description=raw.get("description", ""),
        )
        if item.id in items:
            raise StoryParseError(f"duplicate item id {item.id!r}")
        items[item.id] = item

    characters: dict[str, Character] = {}
    for raw in doc["characters"]:
        _require_keys(raw, ("id", "location"), "character")
        char = Character(
            id=raw["id"],
            name=raw.get("name", raw["id"].replace("-", " ")),
            location=raw["location"],
            topics=tuple(raw.get("topics", ())),
        )
        if char.id in characters:
            raise StoryParseError(f"duplicate character id {char.id!r}")
        characters[char.id] = char

    rules = []
    for raw in doc["action_rules"]:
        _require_keys(raw, ("verb", "subject"), "action rule")
        if raw["verb"] not in VERBS:
            raise StoryParseError(f"action rule: unknown verb {raw['verb']!r}")
        rules.append(ActionRule(
            verb=raw["verb"],
            subject=raw["subject"],
            object=raw.get("object"),
            requires=_parse_requires(raw.get("requires", {})),
            effects=_parse_effects(raw.get("effects", {})),
            triggers=tuple(raw.get("triggers", ())),
        ))

    definition = StoryDefinition(
        id=doc.get("id", "story"),
        title=doc.get("title", doc.get("id", "story")),
        start=doc["start"],
        world=WorldModel(locations, items, characters, tuple(rules)),
        graph=PlotGraph(plot_points),
    )
    missing = _unresolved_references(definition)
    if missing:
        raise UnresolvedReferenceError(missing)
    return definition


def _looks_like_path(source) -> bool:
    if isinstance(source, bytes):
        return False
    stripped = source.lstrip()
    return not (stripped.startswith("{") or stripped.startswith("["))


def _unresolved_references(d: StoryDefinition) -> list[str]:
    known_locations = set(d.world.locations)
    known_items = set(d.world.items)
    known_points = set(d.graph.plot_points)
    known_chars = set(d.world.characters)
    thing_ids = known_items | known_chars | known_locations
    missing = set()

    if d.start not in known_locations:
        missing.add(f"location:{d.start}")
    for loc in d.world.locations.values():
        for ex in loc.exits:
            if ex not in known_locations:
                missing.add(f"location:{ex}")
    for item in d.world.items.values():
        if item.location not in known_locations:
            missing.add(f"location:{item.location}")
    for char in d.world.characters.values():
        if char.location not in known_locations:
            missing.add(f"location:{char.location}")
    for pp in d.graph.plot_points.values():
        for pred in pp.predecessors:
            if pred not in known_points:
                missing.add(f"plot_point:{pred}")
    for rule in d.world.action_rules:
        if rule.verb == "goto":
            if rule.subject not in known_locations:
                missing.add(f"location:{rule.subject}")
        elif rule.verb == "ask":
            if rule.subject not in known_chars:
                missing.add(f"character:{rule.subject}")
        elif rule.subject not in thing_ids:
            missing.add(f"thing:{rule.subject}")
        if rule.verb in ("give", "show") and rule.object not in known_chars | known_items:
            missing.add(f"thing:{rule.object}")
        if rule.requires.location is not None and rule.requires.location not in known_locations:
            missing.add(f"location:{rule.requires.location}")
        for item in rule.requires.has_items:
            if item not in known_items:
                missing.add(f"item:{item}")
        for pp_id in rule.requires.discovered + rule.triggers:
            if pp_id not in known_points:
                missing.add(f"plot_point:{pp_id}")
        for item in rule.effects.add_items + rule.effects.remove_items + rule.effects.reveal_items:
            if item not in known_items:
                missing.add(f"item:{item}")
        if rule.effects.move_to is not None and rule.effects.move_to not in known_locations:
            missing.add(f"location:{rule.effects.move_to}")
    return sorted(missing)


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    acyclic: bool
    cycle: list[str] = field(default_factory=list)
    unreachable: list[str] = field(default_factory=list)
    uncovered: list[str] = field(default_factory=list)
    ending_count: int = 0
    problems: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.problems

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "acyclic": self.acyclic,
            "cycle": self.cycle,
            "unreachable": self.unreachable,
            "uncovered": self.uncovered,
            "ending_count": self.ending_count,
            "problems": self.problems,
        }


def _find_cycle(graph: PlotGraph) -> list[str]:
    """Return one precedence cycle as a list of ids, or [] if none."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {pid: WHITE for pid in graph.plot_points}
    stack: list[str] = []

    def visit(pid: str) -> list[str]:
        color[pid] = GRAY
        stack.append(pid)
        for pred in sorted(graph.plot_points[pid].predecessors):
            if color[pred] == GRAY:
                return stack[stack.index(pred):] + [pred]
            if color[pred] == WHITE:
                found = visit(pred)
                if found:
                    return found
        stack.pop()
        color[pid] = BLACK
        return []

    for pid in sorted(graph.plot_points):
        if color[pid] == WHITE:
            found = visit(pid)
            if found:
                return found
    return []


def kahn_eliminate(graph: PlotGraph) -> list[str]:
    """Ids Kahn-style elimination cannot consume (cycle members and their
    dependents); empty for a DAG."""
    remaining = {pid: set(pp.predecessors) for pid, pp in graph.plot_points.items()}
    done: set[str] = set()
    progress = True
    while progress:
        progress = False
        for pid in sorted(remaining):
            if pid not in done and remaining[pid] <= done:
                done.add(pid)
                progress = True
    return sorted(set(remaining) - done)


def validate_story(definition: StoryDefinition) -> ValidationReport:
    """Structural checks: acyclicity, reachability, trigger coverage,
    ending presence. Problems are report entries, not exceptions."""
    graph = definition.graph
    stuck = kahn_eliminate(graph)
    cycle = _find_cycle(graph) if stuck else []
    report = ValidationReport(
        acyclic=not stuck,
        cycle=cycle,
        unreachable=stuck,
        ending_count=len(graph.endings),
    )
    if stuck:
        report.problems.append(
            "precedence graph is not acyclic; cycle: " + " -> ".join(cycle))
        if set(stuck) - set(cycle):
            report.problems.append(
                "plot points unreachable from roots: " + ", ".join(report.unreachable))

    triggered = {pp for rule in definition.world.action_rules for pp in rule.triggers}
    report.uncovered = sorted(set(graph.plot_points) - triggered)
    for pid in report.uncovered:
        report.problems.append(f"plot point {pid!r} has no triggering action rule")

    if report.ending_count == 0:
        report.problems.append("story has no ending plot point")
    if not graph.roots():
        report.problems.append("no plot point with empty predecessors")
    return report


# ---------------------------------------------------------------------------
# Play


def initial_state(definition: StoryDefinition) -> GameState:
    if definition.start not in definition.world.locations:
        raise StoryError(f"start location {definition.start!r} does not exist")
    return GameState(
        current_location=definition.start,
        inventory=frozenset(),
        discovered=(),
        visited=frozenset((definition.start,)),
        flags=(),
        tick=0,
    )


def _item_visible(item: Item, location: str, inventory: frozenset[str],
                  flags: dict[str, bool]) -> bool:
    if item.id in inventory:
        return False
    if flags.get(_gone_flag(item.id), False):
        return False
    if item.hidden and not flags.get(_revealed_flag(item.id), False):
        return False
    return item.location == location


def _rule_live(rule: ActionRule, location: str, inventory: frozenset[str],
               discovered: frozenset[str], flags: dict[str, bool]) -> bool:
    """A rule offers its action while its predicates hold and, when it
    carries triggers, at least one of them is still undiscovered."""
    if rule.triggers and all(t in discovered for t in rule.triggers):
        return False
    return rule.requires.satisfied(location, inventory, discovered, flags)


def available_actions(definition: StoryDefinition, state: GameState) -> list[Action]:
    """Every action legal in `state`, sorted by (verb, subject, object).

    goto covers declared exits; examine/take/talk cover visible items and
    present characters; rule-driven actions appear while their predicates
    hold. A terminal state offers nothing.
    """
    if is_terminal(definition, state) is not None:
        return []
    index = definition._index
    loc = state.current_location
    inventory = state.inventory
    discovered = frozenset(state.discovered)
    flags = state.flag_map()
    actions: set[Action] = set(index.goto_actions.get(loc, ()))

    for item in index.items_by_location.get(loc, ()):
        if _item_visible(item, loc, inventory, flags):
            actions.add(index.examine_action[item.id])
            if item.takeable:
                actions.add(index.take_action[item.id])
    for item_id in inventory:
        actions.add(index.examine_action[item_id])

    for char in index.chars_by_location.get(loc, ()):
        actions.update(index.char_actions[char.id])

    for rule, action in index.rule_actions:
        if _rule_live(rule, loc, inventory, discovered, flags):
            actions.add(action)

    return sorted(actions, key=Action.sort_key)


def apply_action(
    definition: StoryDefinition,
    state: GameState,
    action: Action,
    available: list[Action] | None = None,
) -> tuple[GameState, list[str]]:
    """Apply one action; returns the new state and the plot points it
    triggered, in trigger order.

    Built-in verb semantics run first (goto moves, take picks up), then
    each matching live rule applies its effects and fires its triggers.
    A trigger only lands once every predecessor is already discovered.
    `available` lets callers that already computed available_actions for
    this state skip recomputing it for the legality check.
    """
    if available is None:
        available = available_actions(definition, state)
    if action not in available:
        raise IllegalActionError(
            f"{action.verb} {action.subject}"
            + (f" {action.object}" if action.object else "")
            + f" is not available at {state.current_location!r}"
        )

    flags = state.flag_map()
    pre_location = state.current_location
    pre_discovered = frozenset(state.discovered)
    location = pre_location
    inventory = set(state.inventory)
    visited = set(state.visited)
    discovered = list(state.discovered)
    triggered: list[str] = []

    if action.verb == "goto":
        location = action.subject
        visited.add(location)
    elif action.verb == "take":
        item = definition.world.items.get(action.subject)
        if item is not None and _item_visible(item, pre_location, state.inventory, flags):
            inventory.add(item.id)

    for rule in definition._index.rules_by_pattern.get(action.key(), ()):
        if not _rule_live(rule, pre_location, state.inventory, pre_discovered, state.flag_map()):
            continue
        eff = rule.effects
        for item_id in eff.add_items:
            inventory.add(item_id)
            flags.pop(_gone_flag(item_id), None)
        for item_id in eff.remove_items:
            inventory.discard(item_id)
            flags[_gone_flag(item_id)] = True
        for item_id in eff.reveal_items:
            flags[_revealed_flag(item_id)] = True
        for name, value in eff.set_flags:
            flags[name] = value
        if eff.move_to is not None:
            location = eff.move_to
            visited.add(location)
        seen = set(discovered)
        for pp_id in rule.triggers:
            point = definition.graph.plot_points[pp_id]
            if pp_id not in seen and point.predecessors <= seen:
                discovered.append(pp_id)
                seen.add(pp_id)
                triggered.append(pp_id)

    new_state = GameState(
        current_location=location,
        inventory=frozenset(inventory),
        discovered=tuple(discovered),
        visited=frozenset(visited),
        flags=tuple(sorted(flags.items())),
        tick=state.tick + 1,
    )
    return new_state, triggered


def is_terminal(definition: StoryDefinition, state: GameState) -> str | None:
    """The reached ending id, or None while the game is still open.
    If several endings were somehow discovered, the earliest one wins."""
    endings = definition.graph.endings
    for pp_id in state.discovered:
        if pp_id in endings:
            return pp_id
    return None


def check_precedence(definition: StoryDefinition, discovered) -> bool:
    """True iff the ordered plot points respect every precedence edge."""
    seen: set[str] = set()
    for pp_id in discovered:
        point = definition.graph.plot_points.get(pp_id)
        if point is None or not point.predecessors <= seen:
            return False
        seen.add(pp_id)
    return True


def describe_state(definition: StoryDefinition, state: GameState) -> dict:
    """Render-ready view of a state. Exposes the discovered count but not
    undiscovered plot point ids."""
    loc = definition.world.locations[state.current_location]
    flags = state.flag_map()
    visible_items = sorted(
        i.name for i in definition.world.items.values()
        if _item_visible(i, state.current_location, state.inventory, flags)
    )
    present = sorted(
        c.name for c in definition.world.characters.values()
        if c.location == state.current_location
    )
    ending = is_terminal(definition, state)
    view = {
        "location": loc.id,
        "description": loc.description,
        "items": visible_items,
        "characters": present,
        "inventory": sorted(definition.world.items[i].name for i in state.inventory),
        "discovered_count": len(state.discovered),
        "tick": state.tick,
        "ended": ending is not None,
    }
    if ending is not None:
        view["ending"] = ending
        view["ending_label"] = definition.graph.plot_points[ending].label
    return view


def action_label(definition: StoryDefinition, action: Action) -> str:
    """Human-readable button label for an action."""
    world = definition.world

    def name_of(thing_id: str) -> str:
        if thing_id in world.items:
            return world.items[thing_id].name
        if thing_id in world.characters:
            return world.characters[thing_id].name
        return thing_id.replace("-", " ")

    verb = action.verb
    subject = name_of(action.subject)
    if verb == "goto":
        return f"Go to the {subject}"
    if verb == "ask":
        return f"Ask the {subject} about the {action.object.replace('-', ' ')}"
    if verb in ("give", "show"):
        return f"{verb.capitalize()} the {subject} to the {name_of(action.object)}"
    if verb == "talk":
        return f"Talk to the {subject}"
    return f"{verb.capitalize()} the {subject}"
