"""A BDI player agent for plot-graph narratives.

The agent loops sense -> deliberate -> act: it perceives the engine
state into beliefs, triggers goals from belief patterns, commits to the
highest-priority goal that has an applicable plan, and emits exactly one
legal action per tick.

Plans are guarded by context conditions over the beliefs. For the
profile-conditioned goal kinds there is one plan for a low value and one
for a high value of the relevant factor, split at 0.5; an agent without
a profile (the uninformed baseline) carries only the default plan for
each goal kind, so there is never a choice to make.

Factor effects, in brief:

    pE  high explores rooms and the map exhaustively; low skips
        examining scenery and only travels with a purpose
    gE  high only picks up objects that look important; low grabs
        whatever is lying around
    f   high with a previous trace steers tie-breaks away from actions
        already in that trace
    p   low drops goals once they have soaked up a time budget and
        prefers roaming over grinding on blocked tasks
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from .profiles import BinaryProfile, PlayerProfile, binarize
from .story import (
    Action,
    GameState,
    RULE_VERBS,
    StoryDefinition,
    apply_action,
    available_actions,
    initial_state,
    is_terminal,
)
from .traces import Trace

BASE_PRIORITY = {
    "in-specific": 50,
    "decide-object": 40,
    "interact-npc": 30,
    "navigate": 20,
    "explore-room": 10,
}
# Low persistence favours wandering off over grinding on blocked tasks.
LOW_P_EXPLORE_BOOST = 45
# A high preference to explore puts exhausting the current room, the
# unvisited map, and loose objects ahead of working tasks, so explorers
# clear side content before they stumble over an ending.
HIGH_PE_EXPLORE_BOOST = 45
HIGH_PE_NAV_BOOST = 32
HIGH_PE_COLLECT_BOOST = 12
HIGH_PE_TALK_BOOST = 22
# A familiar player on a replay saves things they already did last game
# for last, steering the run towards fresh plot points and, with luck,
# the other ending.
FAMILIAR_REPEAT_PENALTY = 35

# Ticks a blocked goal may poke at its target before its plan fails, and
# how long a failed goal then stays benched. The bench doubles with every
# consecutive failure so a wall of blocked goals cannot starve
# exploration; fresh progress (a new plot point, a new object in the
# pocket) puts benched goals straight back in play.
ATTEMPT_BURST = 2
FAILURE_COOLDOWN = 6
FAILURE_COOLDOWN_CAP = 96
# A dropped goal's belief pattern may respawn a fresh goal, but not
# immediately, otherwise dropping would be a no-op.
REACQUIRE_DELAY = 40


@dataclass(frozen=True)
class AgentConfig:
    seed: int = 0
    max_ticks: int = 300
    persistence_budget: int | None = None

    def resolved_budget(self) -> int:
        budget = self.persistence_budget
        if budget is None:
            budget = math.ceil(self.max_ticks / 5)
        if not 1 <= budget <= self.max_ticks:
            raise ValueError(
                f"persistence_budget {budget} outside 1..max_ticks={self.max_ticks}")
        return budget


@dataclass
class Goal:
    id: str
    kind: str
    target: str
    priority: int
    acquired_tick: int
    attempt_ticks: int = 0
    status: str = "active"            # active | achieved | dropped
    cooldown_until: int = 0
    burst_used: int = 0
    fail_streak: int = 0
    blocked_progress: int = -1        # progress_version at last failure
    dropped_tick: int | None = None


@dataclass
class BeliefSet:
    known_locations: set[str] = field(default_factory=set)
    known_exits: dict[str, set[str]] = field(default_factory=dict)
    # movement edges learned from non-goto actions: (src, action key) -> dest
    known_passages: dict[tuple[str, tuple], str] = field(default_factory=dict)
    known_items: dict[str, str] = field(default_factory=dict)      # item -> last seen location
    known_characters: dict[str, str] = field(default_factory=dict)
    seen_special: dict[tuple, str] = field(default_factory=dict)   # action key -> location
    discovered: list[str] = field(default_factory=list)
    profile: PlayerProfile | None = None
    previous_trace: Trace | None = None
    pending_percepts: deque = field(default_factory=deque)

    # mirrors of the most recent percept
    current_location: str = ""
    inventory: set[str] = field(default_factory=set)
    visited: set[str] = field(default_factory=set)
    available_now: list[Action] = field(default_factory=list)

    # play memory
    examined: set[str] = field(default_factory=set)
    talked: set[str] = field(default_factory=set)
    performed: set[tuple] = field(default_factory=set)
    opened: set[str] = field(default_factory=set)
    declined: set[str] = field(default_factory=set)
    last_visit: dict[str, int] = field(default_factory=dict)


@dataclass
class AgentState:
    definition: StoryDefinition
    config: AgentConfig
    beliefs: BeliefSet
    rng: random.Random
    kind: str                          # uninformed | informed
    bits: BinaryProfile | None
    goals: dict[str, Goal] = field(default_factory=dict)
    pattern_index: dict[str, Goal] = field(default_factory=dict)
    pattern_drop_tick: dict[str, int] = field(default_factory=dict)
    tick: int = 0
    goal_counter: int = 0
    progress_version: int = 0
    current_intention: str | None = None
    dropped_log: list[str] = field(default_factory=list)
    event_log: list[dict] = field(default_factory=list)
    log_events: bool = False

    def persistence_budget(self) -> int:
        return self.config.resolved_budget()

    def low_persistence(self) -> bool:
        return self.bits is not None and self.bits.p == 0

    def previous_action_keys(self) -> frozenset:
        if self.beliefs.previous_trace is None:
            return frozenset()
        return self.beliefs.previous_trace.action_keys()


# ---------------------------------------------------------------------------
# Shared plan helpers


def _pick(agent: AgentState, candidates: list[Action]) -> Action:
    """Seeded random choice; with high familiarity and a previous trace,
    actions not present in that trace win ties."""
    pool = sorted(candidates, key=Action.sort_key)
    if (
        agent.bits is not None
        and agent.bits.f == 1
        and agent.beliefs.previous_trace is not None
    ):
        fresh = [a for a in pool if a.key() not in agent.previous_action_keys()]
        if fresh:
            pool = fresh
    if len(pool) == 1:
        return pool[0]
    return agent.rng.choice(pool)


def _movement_edges(agent: AgentState) -> dict[str, list[tuple[str, tuple | None]]]:
    """Known navigation graph: location -> [(dest, passage action key or None)]."""
    edges: dict[str, list[tuple[str, tuple | None]]] = {}
    for src in sorted(agent.beliefs.known_exits):
        edges[src] = [(d, None) for d in sorted(agent.beliefs.known_exits[src])]
    for (src, action_key), dest in sorted(agent.beliefs.known_passages.items()):
        edges.setdefault(src, []).append((dest, action_key))
    return edges


def _first_steps(agent: AgentState, start: str, targets: set[str]) -> list[tuple | None] | None:
    """Via-edges out of `start` that begin some shortest known route to a
    nearest target. None when no target is reachable, [] when already there."""
    if not targets:
        return None
    if start in targets:
        return []
    edges = _movement_edges(agent)
    dist = {start: 0}
    parents: dict[str, list[tuple[str, tuple | None]]] = {}
    frontier = deque([start])
    nearest: list[str] = []
    while frontier:
        loc = frontier.popleft()
        if nearest and dist[loc] >= dist[nearest[0]]:
            # everything at or past the nearest target's ring is moot
            continue
        for dest, via in edges.get(loc, ()):
            if dest not in dist:
                dist[dest] = dist[loc] + 1
                parents[dest] = [(loc, via)]
                if dest in targets and (not nearest or dist[dest] == dist[nearest[0]]):
                    nearest.append(dest)
                frontier.append(dest)
            elif dist[dest] == dist[loc] + 1:
                parents[dest].append((loc, via))
    if not nearest:
        return None
    steps: set[tuple | None] = set()
    seen: set[str] = set()
    stack = list(nearest)
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        for prev, via in parents.get(node, ()):
            if prev == start:
                steps.add(via if via is not None else ("goto", node, None))
            elif prev not in seen:
                stack.append(prev)
    return sorted(steps, key=lambda k: (k[0], k[1], k[2] or ""))


def _step_towards(
    agent: AgentState, state: GameState, actions: list[Action], targets: set[str]
) -> Action | None:
    steps = _first_steps(agent, state.current_location, targets)
    if not steps:
        return None
    available = {a.key(): a for a in actions}
    candidates = [available[k] for k in steps if k in available]
    if not candidates:
        return None
    return _pick(agent, candidates)


def _unvisited_locations(agent: AgentState) -> set[str]:
    known = set(agent.beliefs.known_locations)
    for dests in agent.beliefs.known_exits.values():
        known.update(dests)
    known.update(agent.beliefs.known_passages.values())
    return {loc for loc in known if loc not in agent.beliefs.last_visit}


def _examinables(agent: AgentState, actions: list[Action], hinted_only: bool) -> list[Action]:
    items = agent.definition.world.items
    out = []
    for a in actions:
        if a.verb != "examine" or a.subject in agent.beliefs.examined:
            continue
        if hinted_only and not items[a.subject].importance_hint:
            continue
        out.append(a)
    return out


# ---------------------------------------------------------------------------
# Plan bodies. Each takes (agent, goal, state, actions) and returns the
# next Action, or None to signal plan failure.


def _explore_default(agent, goal, state, actions):
    if state.current_location != goal.target:
        return _step_towards(agent, state, actions, {goal.target})
    todo = _examinables(agent, actions, hinted_only=False)
    return _pick(agent, todo) if todo else None


def _explore_thorough(agent, goal, state, actions):
    # high pE: exhaust everything in the room, scenery included
    return _explore_default(agent, goal, state, actions)


def _explore_skim(agent, goal, state, actions):
    # low pE: a glance around and move on; never burns a tick on scenery
    goal.status = "achieved"
    return None


def _navigate_default(agent, goal, state, actions):
    # unexplored-first: head for the nearest unvisited place, which
    # includes the goal target itself
    unvisited = _unvisited_locations(agent)
    targets = unvisited if unvisited else {goal.target}
    return _step_towards(agent, state, actions, targets)


def _navigate_frontier(agent, goal, state, actions):
    # high pE matches the exhaust-the-map baseline
    return _navigate_default(agent, goal, state, actions)


def _navigate_direct(agent, goal, state, actions):
    # low pE: straight to the target, no sightseeing
    return _step_towards(agent, state, actions, {goal.target})


def _interact_default(agent, goal, state, actions):
    talk = Action("talk", goal.target)
    if talk in actions:
        return talk
    loc = agent.beliefs.known_characters.get(goal.target)
    if loc is None:
        return None
    return _step_towards(agent, state, actions, {loc})


def _take_or_go(agent, goal, state, actions):
    take = Action("take", goal.target)
    if take in actions:
        return take
    loc = agent.beliefs.known_items.get(goal.target)
    if loc is None:
        # memory of it is gone: the object no longer exists anywhere
        agent.beliefs.declined.add(goal.target)
        goal.status = "achieved"
        return None
    if loc == state.current_location:
        return None  # here, but not takeable right now
    return _step_towards(agent, state, actions, {loc})


def _decide_default(agent, goal, state, actions):
    return _take_or_go(agent, goal, state, actions)


def _decide_selective(agent, goal, state, actions):
    # high gE: leave objects that look worthless where they are
    if not agent.definition.world.items[goal.target].importance_hint:
        agent.beliefs.declined.add(goal.target)
        goal.status = "achieved"
        return None
    return _take_or_go(agent, goal, state, actions)


def _decide_grabby(agent, goal, state, actions):
    # low gE: sometimes fiddle with the object before pocketing it
    take = Action("take", goal.target)
    examine = Action("examine", goal.target)
    if take in actions and examine in actions and goal.target not in agent.beliefs.examined:
        if agent.rng.random() < 0.25:
            return examine
    return _take_or_go(agent, goal, state, actions)


def _specific_default(agent, goal, state, actions):
    wanted = _goal_action(goal)
    if wanted in actions:
        return wanted
    target_loc = _goal_location(agent, goal)
    if target_loc is not None and target_loc != state.current_location:
        return _step_towards(agent, state, actions, {target_loc})
    # in place but the action is not (yet) possible: poke at it briefly
    if goal.burst_used < ATTEMPT_BURST:
        goal.burst_used += 1
        if wanted.subject in agent.definition.world.items:
            probe = Action("examine", wanted.subject)
            if probe in actions:
                return probe
    return None


def _goal_action(goal: Goal) -> Action:
    verb, subject, obj = goal.target.split("|")
    return Action(verb, subject, obj or None)


def _goal_location(agent: AgentState, goal: Goal) -> str | None:
    key = _goal_action(goal).key()
    loc = agent.beliefs.seen_special.get(key)
    if loc is None:
        loc = agent.beliefs.known_items.get(key[1])
    return loc


# ---------------------------------------------------------------------------
# Plan library


@dataclass(frozen=True)
class Plan:
    id: str
    goal_kind: str
    context: object                    # callable(AgentState) -> bool
    body: object                       # callable(agent, goal, state, actions) -> Action | None
    default: bool = False


def _always(agent: AgentState) -> bool:
    return True


def _bit_context(factor: str, value: int):
    def ctx(agent: AgentState) -> bool:
        return agent.bits is not None and getattr(agent.bits, factor) == value
    return ctx


PLAN_LIBRARY = (
    Plan("explore-default", "explore-room", _always, _explore_default, default=True),
    Plan("explore-thorough", "explore-room", _bit_context("pE", 1), _explore_thorough),
    Plan("explore-skim", "explore-room", _bit_context("pE", 0), _explore_skim),
    Plan("navigate-default", "navigate", _always, _navigate_default, default=True),
    Plan("navigate-frontier", "navigate", _bit_context("pE", 1), _navigate_frontier),
    Plan("navigate-direct", "navigate", _bit_context("pE", 0), _navigate_direct),
    Plan("interact-default", "interact-npc", _always, _interact_default, default=True),
    Plan("decide-default", "decide-object", _always, _decide_default, default=True),
    Plan("decide-selective", "decide-object", _bit_context("gE", 1), _decide_selective),
    Plan("decide-grabby", "decide-object", _bit_context("gE", 0), _decide_grabby),
    Plan("specific-default", "in-specific", _always, _specific_default, default=True),
)


def plans_for(agent: AgentState, kind: str) -> list[Plan]:
    plans = [p for p in PLAN_LIBRARY if p.goal_kind == kind]
    if agent.kind == "uninformed":
        return [p for p in plans if p.default]
    return plans


# ---------------------------------------------------------------------------
# Agent operations


def init_agent(
    definition: StoryDefinition,
    profile: PlayerProfile | None,
    config: AgentConfig,
    previous_trace: Trace | None = None,
    log_events: bool = False,
) -> AgentState:
    """Fresh agent: beliefs seeded with the start location only, one
    exploration goal, and the RNG primed with the config seed."""
    config.resolved_budget()
    beliefs = BeliefSet(profile=profile, previous_trace=previous_trace)
    beliefs.known_locations.add(definition.start)
    beliefs.current_location = definition.start
    agent = AgentState(
        definition=definition,
        config=config,
        beliefs=beliefs,
        rng=random.Random(config.seed),
        kind="informed" if profile is not None else "uninformed",
        bits=binarize(profile) if profile is not None else None,
        log_events=log_events,
    )
    _add_goal(agent, "explore-room", definition.start)
    return agent


def _pattern_id(kind: str, target: str) -> str:
    return f"{kind}:{target}"


def _pattern_action_key(kind: str, target: str) -> tuple | None:
    """The action a goal pattern boils down to, for matching against a
    previous trace. Exploration and travel have no single action."""
    if kind == "decide-object":
        return ("take", target, None)
    if kind == "interact-npc":
        return ("talk", target, None)
    if kind == "in-specific":
        verb, subject, obj = target.split("|")
        return (verb, subject, obj or None)
    return None


def _add_goal(agent: AgentState, kind: str, target: str) -> Goal | None:
    pattern = _pattern_id(kind, target)
    existing = agent.pattern_index.get(pattern)
    if existing is not None and existing.status in ("active", "achieved"):
        return None
    dropped_at = agent.pattern_drop_tick.get(pattern)
    if dropped_at is not None and agent.tick < dropped_at + REACQUIRE_DELAY:
        return None
    agent.goal_counter += 1
    priority = BASE_PRIORITY[kind]
    if agent.low_persistence() and kind in ("navigate", "explore-room"):
        priority += LOW_P_EXPLORE_BOOST
    if agent.bits is not None and agent.bits.pE == 1:
        if kind == "explore-room":
            priority += HIGH_PE_EXPLORE_BOOST
        elif kind == "navigate":
            priority += HIGH_PE_NAV_BOOST
        elif kind == "decide-object":
            priority += HIGH_PE_COLLECT_BOOST
        elif kind == "interact-npc":
            priority += HIGH_PE_TALK_BOOST
    if (
        agent.bits is not None
        and agent.bits.f == 1
        and agent.beliefs.previous_trace is not None
    ):
        key = _pattern_action_key(kind, target)
        if key is not None and key in agent.previous_action_keys():
            priority -= FAMILIAR_REPEAT_PENALTY
    goal = Goal(
        id=f"{pattern}#{agent.goal_counter}",
        kind=kind,
        target=target,
        priority=priority,
        acquired_tick=agent.tick,
    )
    agent.goals[goal.id] = goal
    agent.pattern_index[pattern] = goal
    return goal


def perceive(agent: AgentState, state: GameState, actions: list[Action]) -> AgentState:
    """Fold what is visible from `state` into the belief set. Idempotent
    for a fixed (state, actions) pair."""
    agent.beliefs.pending_percepts.append((state, tuple(actions)))
    while agent.beliefs.pending_percepts:
        percept_state, percept_actions = agent.beliefs.pending_percepts.popleft()
        _absorb_percept(agent, percept_state, percept_actions)
    return agent


def _absorb_percept(agent: AgentState, state: GameState, actions) -> None:
    beliefs = agent.beliefs
    here = state.current_location
    if list(state.discovered) != beliefs.discovered or set(state.inventory) != beliefs.inventory:
        agent.progress_version += 1
    beliefs.current_location = here
    beliefs.inventory = set(state.inventory)
    beliefs.visited = set(state.visited)
    beliefs.available_now = list(actions)
    beliefs.known_locations.add(here)
    beliefs.last_visit[here] = agent.tick
    exits = beliefs.known_exits.setdefault(here, set())
    offered_examines: set[str] = set()
    for action in actions:
        if action.verb == "goto":
            exits.add(action.subject)
            beliefs.known_locations.add(action.subject)
        elif action.verb in ("examine", "take"):
            offered_examines.add(action.subject)
            if action.subject in agent.definition.world.items and action.subject not in state.inventory:
                beliefs.known_items[action.subject] = here
        elif action.verb == "talk":
            beliefs.known_characters[action.subject] = here
        if action.verb in RULE_VERBS:
            beliefs.seen_special[action.key()] = here
    # objects we remembered here but which are no longer offered are gone
    for item_id, loc in list(beliefs.known_items.items()):
        if loc == here and item_id not in offered_examines:
            del beliefs.known_items[item_id]
    beliefs.discovered = list(state.discovered)


def _known_openables(agent: AgentState) -> list[str]:
    items = agent.definition.world.items
    out = set()
    for item_id in agent.beliefs.known_items:
        if items[item_id].openable and item_id not in agent.beliefs.opened:
            out.add(item_id)
    for item_id in agent.beliefs.inventory:
        if items[item_id].openable and item_id not in agent.beliefs.opened:
            out.add(item_id)
    return sorted(out)


def trigger_goals(agent: AgentState) -> list[Goal]:
    """Spawn goals for belief patterns with no matching active or
    achieved goal; deterministic given the beliefs."""
    new: list[Goal] = []

    def spawn(kind: str, target: str):
        goal = _add_goal(agent, kind, target)
        if goal is not None:
            new.append(goal)

    beliefs = agent.beliefs

    # a room with something unexamined in it invites exploration
    if any(a.verb == "examine" and a.subject not in beliefs.examined
           for a in beliefs.available_now):
        spawn("explore-room", beliefs.current_location)

    for loc in sorted(_unvisited_locations(agent)):
        spawn("navigate", loc)

    for char_id in sorted(beliefs.known_characters):
        if char_id not in beliefs.talked:
            spawn("interact-npc", char_id)

    items = agent.definition.world.items
    skip_junk = agent.bits is not None and agent.bits.gE == 1
    for item_id in sorted(beliefs.known_items):
        item = items[item_id]
        if not item.takeable or item_id in beliefs.inventory or item_id in beliefs.declined:
            continue
        if skip_junk and not item.importance_hint:
            continue
        spawn("decide-object", item_id)

    # a known closed container is an invitation to open it
    for item_id in _known_openables(agent):
        spawn("in-specific", f"open|{item_id}|")

    for key in sorted(beliefs.seen_special):
        verb, subject, obj = key
        if key in beliefs.performed:
            continue
        if verb == "open" and subject in items and items[subject].openable:
            continue  # covered by the container pattern above
        spawn("in-specific", f"{verb}|{subject}|{obj or ''}")

    _sweep_achieved(agent)
    return new


def _sweep_achieved(agent: AgentState) -> None:
    beliefs = agent.beliefs
    for goal in agent.goals.values():
        if goal.status != "active":
            continue
        done = False
        if goal.kind == "navigate":
            done = goal.target in beliefs.visited
        elif goal.kind == "interact-npc":
            done = goal.target in beliefs.talked
        elif goal.kind == "decide-object":
            done = goal.target in beliefs.inventory or goal.target in beliefs.declined
        elif goal.kind == "in-specific":
            key = _goal_action(goal).key()
            done = key in beliefs.performed or (
                key[0] == "open" and key[1] in beliefs.opened)
        elif goal.kind == "explore-room":
            if beliefs.current_location == goal.target:
                done = not any(
                    a.verb == "examine" and a.subject not in beliefs.examined
                    for a in beliefs.available_now
                )
        if done:
            goal.status = "achieved"


def _selectable(agent: AgentState, goal: Goal) -> bool:
    if goal.status != "active":
        return False
    if goal.cooldown_until <= agent.tick:
        return True
    # benched, but something changed since it last failed: try again
    return 0 <= goal.blocked_progress < agent.progress_version


def select_intention(agent: AgentState) -> tuple[Goal, Plan] | None:
    """Highest-priority selectable goal with an applicable plan. The
    goal pursued last tick keeps the intention on priority ties, so
    plans run to completion instead of ping-ponging. A profile-specific
    plan beats the default; residual ties go to the seeded RNG. None
    when every active goal is benched or planless."""
    order = -1 if agent.low_persistence() else 1
    active = [g for g in agent.goals.values() if _selectable(agent, g)]
    ranks = {g.id: (-g.priority, order * g.acquired_tick) for g in active}
    active.sort(key=lambda g: (*ranks[g.id], g.id))
    # goals ranking exactly the same are a genuine tie
    shuffled: list[Goal] = []
    i = 0
    while i < len(active):
        j = i + 1
        while j < len(active) and ranks[active[j].id] == ranks[active[i].id]:
            j += 1
        group = active[i:j]
        if len(group) > 1:
            group = agent.rng.sample(group, len(group))
        shuffled.extend(group)
        i = j
    active = shuffled
    current = agent.goals.get(agent.current_intention or "")
    if current is not None and _selectable(agent, current) and active:
        if current.priority >= active[0].priority:
            active = [current] + [g for g in active if g.id != current.id]
    for goal in active:
        applicable = [p for p in plans_for(agent, goal.kind) if p.context(agent)]
        if not applicable:
            continue
        specific = [p for p in applicable if not p.default]
        pool = specific if specific else applicable
        if len(pool) > 1:
            plan = agent.rng.choice(sorted(pool, key=lambda p: p.id))
        else:
            plan = pool[0]
        return goal, plan
    return None


def execute_step(
    agent: AgentState, goal: Goal, plan: Plan, state: GameState, actions: list[Action]
) -> Action | None:
    """Ask the plan body for the next action. None signals plan failure;
    the goal is benched and re-selection happens next tick. Either way
    the tick counts against the goal's attempt budget."""
    goal.attempt_ticks += 1
    action = plan.body(agent, goal, state, actions)
    if action is None:
        goal.fail_streak += 1
        bench = min(FAILURE_COOLDOWN * 2 ** (goal.fail_streak - 1), FAILURE_COOLDOWN_CAP)
        goal.cooldown_until = agent.tick + bench
        goal.blocked_progress = agent.progress_version
        goal.burst_used = 0
        if agent.current_intention == goal.id:
            agent.current_intention = None
        return None
    # the plan is moving again: lift the bench (the fail streak stays,
    # so a goal that keeps stalling still backs off harder each time)
    goal.cooldown_until = 0
    goal.blocked_progress = -1
    agent.current_intention = goal.id
    return action


def wander_action(agent: AgentState, state: GameState, actions: list[Action]) -> Action:
    """Fallback exploration when no goal can act: drift towards the
    stalest known place, or poke at the surroundings."""
    here = state.current_location
    moves: dict[Action, str] = {}
    for a in actions:
        if a.verb == "goto":
            moves[a] = a.subject
        else:
            dest = agent.beliefs.known_passages.get((here, a.key()))
            if dest is not None:
                moves[a] = dest
    if moves:
        staleness = {a: agent.beliefs.last_visit.get(dest, -1) for a, dest in moves.items()}
        best = min(staleness.values())
        return _pick(agent, [a for a, s in staleness.items() if s == best])
    todo = _examinables(agent, actions, hinted_only=False)
    if todo:
        return _pick(agent, todo)
    return _pick(agent, list(actions))


def enforce_persistence(agent: AgentState) -> list[str]:
    """With low persistence, drop every active goal that has used up the
    attempt budget. High persistence and the uninformed agent never
    drop."""
    if not agent.low_persistence():
        return []
    budget = agent.persistence_budget()
    dropped = []
    for goal in agent.goals.values():
        if goal.status == "active" and goal.attempt_ticks >= budget:
            goal.status = "dropped"
            goal.dropped_tick = agent.tick
            agent.pattern_drop_tick[_pattern_id(goal.kind, goal.target)] = agent.tick
            dropped.append(goal.id)
    agent.dropped_log.extend(dropped)
    return dropped


def _record_outcome(agent: AgentState, action: Action) -> None:
    beliefs = agent.beliefs
    if action.verb == "examine":
        beliefs.examined.add(action.subject)
    elif action.verb == "talk":
        beliefs.talked.add(action.subject)
    if action.verb in RULE_VERBS:
        beliefs.performed.add(action.key())
        if action.verb == "open":
            beliefs.opened.add(action.subject)


def run_agent_full(
    definition: StoryDefinition,
    profile: PlayerProfile | None,
    config: AgentConfig,
    previous_trace: Trace | None = None,
    session_id: str | None = None,
    log_events: bool = False,
) -> tuple[Trace, AgentState]:
    """Play one full game; returns the trace and the final agent state.

    Reaching max_ticks without an ending is a legal outcome and yields a
    trace with ending None.
    """
    agent = init_agent(definition, profile, config,
                       previous_trace=previous_trace, log_events=log_events)
    state = initial_state(definition)
    recorded: list[tuple[int, Action]] = []

    while state.tick < config.max_ticks and is_terminal(definition, state) is None:
        agent.tick = state.tick
        actions = available_actions(definition, state)
        if not actions:
            break
        perceive(agent, state, actions)
        trigger_goals(agent)
        selection = select_intention(agent)
        action = None
        goal_id = plan_id = None
        if selection is not None:
            goal, plan = selection
            goal_id, plan_id = goal.id, plan.id
            action = execute_step(agent, goal, plan, state, actions)
        if action is None:
            action = wander_action(agent, state, actions)
        prev_location = state.current_location
        state, triggered = apply_action(definition, state, action, available=actions)
        recorded.append((state.tick, action))
        _record_outcome(agent, action)
        if action.verb != "goto" and state.current_location != prev_location:
            agent.beliefs.known_passages[(prev_location, action.key())] = state.current_location
        drops = enforce_persistence(agent)
        if agent.log_events:
            agent.event_log.append({
                "tick": state.tick,
                "goal": goal_id,
                "plan": plan_id,
                "action": action.to_dict(),
                "triggered": triggered,
                "drops": drops,
            })

    ending = is_terminal(definition, state)
    kind = "informed" if profile is not None else "uninformed"
    if session_id is None:
        session_id = f"{kind}-{definition.id}-{config.seed}"
    trace = Trace(
        session_id=session_id,
        story_id=definition.id,
        agent_kind=kind,
        actions=tuple(recorded),
        plot_points=tuple(state.discovered),
        ending=ending,
        profile_used=profile,
        seed=config.seed,
    )
    return trace, agent


def run_agent(
    definition: StoryDefinition,
    profile: PlayerProfile | None,
    config: AgentConfig,
    previous_trace: Trace | None = None,
    session_id: str | None = None,
) -> Trace:
    trace, _ = run_agent_full(definition, profile, config,
                              previous_trace=previous_trace, session_id=session_id)
    return trace
