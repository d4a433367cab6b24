import pytest

from inplayer.agent import (
    PLAN_LIBRARY,
    AgentConfig,
    enforce_persistence,
    init_agent,
    perceive,
    plans_for,
    run_agent,
    run_agent_full,
    select_intention,
    trigger_goals,
)
from inplayer.profiles import PlayerProfile
from inplayer.story import available_actions, check_precedence, initial_state
from inplayer.traces import trace_to_line

EXPLORER = PlayerProfile(0.2, 0.8, 0.9, 0.8)
DIRECT = PlayerProfile(0.2, 0.8, 0.1, 0.8)


def test_config_budget_defaults():
    assert AgentConfig(max_ticks=300).resolved_budget() == 60
    assert AgentConfig(max_ticks=10).resolved_budget() == 2
    assert AgentConfig(max_ticks=100, persistence_budget=25).resolved_budget() == 25
    with pytest.raises(ValueError):
        AgentConfig(max_ticks=10, persistence_budget=11).resolved_budget()


def test_init_agent_seeds_beliefs_with_start_only(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=1))
    assert agent.beliefs.known_locations == {"livingroom"}
    assert agent.kind == "uninformed"
    assert [g.kind for g in agent.goals.values()] == ["explore-room"]


def test_same_seed_same_rng_stream(anchorhead):
    a = init_agent(anchorhead, None, AgentConfig(seed=42))
    b = init_agent(anchorhead, None, AgentConfig(seed=42))
    assert [a.rng.random() for _ in range(5)] == [b.rng.random() for _ in range(5)]


def test_uninformed_agent_sees_only_default_plans(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0))
    for kind in ("explore-room", "navigate", "decide-object", "interact-npc", "in-specific"):
        plans = plans_for(agent, kind)
        assert len(plans) == 1
        assert plans[0].default


def test_profile_conditioned_kinds_have_low_and_high_plans(anchorhead):
    for kind, factor in (("explore-room", "pE"), ("navigate", "pE"), ("decide-object", "gE")):
        variants = [p for p in PLAN_LIBRARY if p.goal_kind == kind and not p.default]
        assert len(variants) == 2, kind
        # exactly one variant applies for each binarized value of the factor
        for value in (0.0, 1.0):
            factors = {"f": 0.5, "gE": 0.5, "pE": 0.5, "p": 0.5, factor: value}
            agent = init_agent(anchorhead, PlayerProfile(**factors), AgentConfig(seed=0))
            applicable = [p for p in variants if p.context(agent)]
            assert len(applicable) == 1


def test_perceive_is_idempotent(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0))
    state = initial_state(anchorhead)
    actions = available_actions(anchorhead, state)
    perceive(agent, state, actions)
    first = (
        dict(agent.beliefs.known_exits),
        dict(agent.beliefs.known_items),
        set(agent.beliefs.known_locations),
    )
    perceive(agent, state, actions)
    second = (
        dict(agent.beliefs.known_exits),
        dict(agent.beliefs.known_items),
        set(agent.beliefs.known_locations),
    )
    assert first == second


def test_perceive_learns_exits_and_items(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0))
    state = initial_state(anchorhead)
    perceive(agent, state, available_actions(anchorhead, state))
    assert agent.beliefs.known_exits["livingroom"] == {"hall", "street"}
    assert agent.beliefs.known_items.get("cracked-vase") == "livingroom"


def test_trigger_goals_dedupes(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0))
    state = initial_state(anchorhead)
    actions = available_actions(anchorhead, state)
    perceive(agent, state, actions)
    trigger_goals(agent)
    count = len(agent.goals)
    trigger_goals(agent)
    assert len(agent.goals) == count


def test_known_container_spawns_open_goal(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0))
    state = initial_state(anchorhead)
    # walk the state to the study where the wall safe is visible
    from inplayer.story import Action, apply_action
    for step in (("goto", "hall"), ("goto", "study")):
        actions = available_actions(anchorhead, state)
        perceive(agent, state, actions)
        trigger_goals(agent)
        state, _ = apply_action(anchorhead, state, Action(*step), available=actions)
    actions = available_actions(anchorhead, state)
    perceive(agent, state, actions)
    trigger_goals(agent)
    targets = {g.target for g in agent.goals.values() if g.kind == "in-specific"}
    assert "open|safe|" in targets


def test_select_intention_picks_profile_plan(anchorhead):
    for profile, expected in ((EXPLORER, "navigate-frontier"), (DIRECT, "navigate-direct")):
        agent = init_agent(anchorhead, profile, AgentConfig(seed=0))
        state = initial_state(anchorhead)
        actions = available_actions(anchorhead, state)
        perceive(agent, state, actions)
        trigger_goals(agent)
        # force only navigate goals to be selectable
        for goal in agent.goals.values():
            if goal.kind != "navigate":
                goal.status = "achieved"
        selection = select_intention(agent)
        assert selection is not None
        assert selection[1].id == expected


def test_select_intention_uninformed_uses_default(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0))
    state = initial_state(anchorhead)
    actions = available_actions(anchorhead, state)
    perceive(agent, state, actions)
    trigger_goals(agent)
    for goal in agent.goals.values():
        if goal.kind != "navigate":
            goal.status = "achieved"
    selection = select_intention(agent)
    assert selection[1].id == "navigate-default"


def test_persistence_drop_boundary(anchorhead):
    low_p = PlayerProfile(0.2, 0.8, 0.8, 0.1)
    agent = init_agent(anchorhead, low_p, AgentConfig(seed=0, max_ticks=100, persistence_budget=10))
    goal = next(iter(agent.goals.values()))
    goal.attempt_ticks = 9
    assert enforce_persistence(agent) == []
    goal.attempt_ticks = 10
    assert enforce_persistence(agent) == [goal.id]
    assert goal.status == "dropped"


def test_high_persistence_never_drops(anchorhead):
    high_p = PlayerProfile(0.2, 0.8, 0.8, 0.9)
    agent = init_agent(anchorhead, high_p, AgentConfig(seed=0, max_ticks=100, persistence_budget=10))
    goal = next(iter(agent.goals.values()))
    goal.attempt_ticks = 100  # ten times the budget
    assert enforce_persistence(agent) == []
    assert goal.status == "active"


def test_uninformed_never_drops(anchorhead):
    agent = init_agent(anchorhead, None, AgentConfig(seed=0, max_ticks=100, persistence_budget=10))
    goal = next(iter(agent.goals.values()))
    goal.attempt_ticks = 1000
    assert enforce_persistence(agent) == []


def test_run_agent_deterministic(anchorhead):
    a = run_agent(anchorhead, EXPLORER, AgentConfig(seed=11))
    b = run_agent(anchorhead, EXPLORER, AgentConfig(seed=11))
    assert trace_to_line(a) == trace_to_line(b)


def test_run_agent_traces_satisfy_precedence(anchorhead):
    for seed in range(5):
        trace = run_agent(anchorhead, None, AgentConfig(seed=seed))
        assert check_precedence(anchorhead, trace.plot_points)


def test_run_agent_toy_story_single_path(toy_story):
    trace = run_agent(toy_story, None, AgentConfig(seed=3))
    assert trace.plot_points == ("a", "b", "c")
    assert trace.ending == "c"


def test_decisions_depend_only_on_binarization(anchorhead):
    # perturbing a factor inside (0.5, 1] must not change a single action
    base = run_agent(anchorhead, PlayerProfile(0.2, 0.8, 0.6, 0.8), AgentConfig(seed=5))
    moved = run_agent(anchorhead, PlayerProfile(0.2, 0.8, 0.99, 0.8), AgentConfig(seed=5))
    assert [a.key() for _, a in base.actions] == [a.key() for _, a in moved.actions]
    assert base.plot_points == moved.plot_points


def test_familiarity_lowers_similarity_to_previous_trace(anchorhead):
    from inplayer.evaluate import jaccard
    previous = run_agent(anchorhead, EXPLORER, AgentConfig(seed=999))

    def mean_similarity(profile):
        values = []
        for seed in range(50):
            trace = run_agent(anchorhead, profile, AgentConfig(seed=seed),
                              previous_trace=previous)
            values.append(jaccard(trace.plot_point_set(), previous.plot_point_set()))
        return sum(values) / len(values)

    familiar = mean_similarity(PlayerProfile(0.9, 0.8, 0.9, 0.8))
    unfamiliar = mean_similarity(PlayerProfile(0.1, 0.8, 0.9, 0.8))
    assert familiar < unfamiliar


def test_timeout_yields_unfinished_trace(anchorhead):
    trace = run_agent(anchorhead, None, AgentConfig(seed=0, max_ticks=3))
    assert trace.ending is None
    assert len(trace.actions) == 3


def test_agent_kind_recorded(anchorhead):
    assert run_agent(anchorhead, None, AgentConfig(seed=0, max_ticks=5)).agent_kind == "uninformed"
    assert run_agent(anchorhead, EXPLORER, AgentConfig(seed=0, max_ticks=5)).agent_kind == "informed"


def test_event_log_records_ticks(anchorhead):
    trace, agent = run_agent_full(anchorhead, None, AgentConfig(seed=0, max_ticks=10), log_events=True)
    assert len(agent.event_log) == len(trace.actions)
    assert [e["tick"] for e in agent.event_log] == [t for t, _ in trace.actions]
