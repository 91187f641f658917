"""HomeoGrid dynamics: reset, maps, seasons, survival, coupled control."""

import dataclasses

import pytest

from interoai.core import Action, InternalState, Tag, step_factored
from interoai.envs import (
    SeasonSchedule,
    Status,
    advance_season,
    make_coupled_variant,
    reset,
    respawn,
    season_snapshot,
    terminal_check,
    transition_maps,
)
from interoai.errors import ConfigError
from interoai.homeostat import drive
from interoai.rng import stream

from helpers import make_tiny_env


def test_reset_deterministic_and_at_set_point():
    env = make_tiny_env()
    a = reset(env, 42)
    b = reset(env, 42)
    assert a == b
    assert drive(env.drive_model, a.internal) == 0.0
    assert a.external.agent_pos == env.grid.start
    assert a.external.season == env.schedule.order[0]


def test_reset_resources_match_season_zero():
    env = make_tiny_env()
    state = reset(env, 0)
    tags, _ = season_snapshot(env, env.schedule.order[0])
    assert state.external.resource_map == tags
    placements = {(r, c): tag for r, c, tag in env.grid.seasons[0].placements}
    for (r, c), tag in placements.items():
        assert state.external.resource_map[r][c] == tag


def test_rest_on_empty_cell_drains_energy_only():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)  # start cell is Empty
    b = model.f_b(state.internal, state.external, Action.Rest)
    assert (b.flux_food, b.flux_water) == (0.0, 0.0)
    nxt_internal = model.f_i(state.internal, b, Action.Rest)
    assert nxt_internal.values[0] == pytest.approx(state.internal.values[0] - env.c_e, abs=1e-15)


def test_consume_on_food_gains_energy():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    on_food = dataclasses.replace(
        state, external=dataclasses.replace(state.external, agent_pos=(0, 0))
    )
    b = model.f_b(on_food.internal, on_food.external, Action.Consume)
    assert b.flux_food == env.e_gain
    nxt_internal = model.f_i(on_food.internal, b, Action.Consume)
    delta = nxt_internal.values[0] - on_food.internal.values[0]
    assert delta == pytest.approx(env.e_gain - env.c_e, abs=1e-15)


def test_consume_on_water_gains_hydration():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    on_water = dataclasses.replace(
        state, external=dataclasses.replace(state.external, agent_pos=(2, 2))
    )
    b = model.f_b(on_water.internal, on_water.external, Action.Consume)
    assert (b.flux_food, b.flux_water) == (0.0, env.w_gain)


def test_shade_cell_is_cooler():
    env = make_tiny_env()
    tags, field = season_snapshot(env, 0)
    assert tags[0][2] == Tag.Shade
    assert field[0][2] == env.grid.seasons[0].baseline - env.grid.shade_delta


def test_advance_season_formula():
    schedule = SeasonSchedule(period=100, order=(0, 1))
    assert advance_season(schedule, 0) == 0
    assert advance_season(schedule, 100) == 1
    assert advance_season(schedule, 250) == 0


def test_season_periodicity_of_resources():
    env = make_tiny_env()
    model = transition_maps(env)
    cycle = env.schedule.period * len(env.schedule.order)
    state = reset(env, 5)
    rng = stream(5, 0, "env")
    maps = {}
    for step in range(2 * cycle):
        if step % cycle == 7:  # same phase, consecutive cycles
            maps.setdefault("probe", []).append(state.external.resource_map)
        state = step_factored(model, state, Action.Rest, rng)
    assert maps["probe"][0] == maps["probe"][1]


def test_energy_conserved_without_decay_or_consumption():
    env = make_tiny_env(c_e=0.0)
    model = transition_maps(env)
    state = reset(env, 9)
    rng = stream(9, 0, "env")
    rng_act = stream(9, 0, "agent")
    moves = [a for a in Action if a != Action.Consume]
    for _ in range(300):
        action = moves[int(rng_act.integers(0, len(moves)))]
        state = step_factored(model, state, action, rng)
        assert state.internal.values[0] == 0.6


def test_terminal_check_rules():
    env = make_tiny_env()  # grace_steps = 5
    assert terminal_check(env, [True] * 50) is Status.Alive
    assert terminal_check(env, [True] * 10 + [False] * 6) is Status.Dead
    assert terminal_check(env, [False] * 5 + [True]) is Status.Alive
    assert terminal_check(env, [False] * 5) is Status.Alive  # exactly grace, not beyond


def test_respawn_keeps_world_clock():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    rng = stream(0, 0, "env")
    for _ in range(60):  # crosses the period-50 season switch
        state = step_factored(model, state, Action.Rest, rng)
    reborn = respawn(env, state)
    assert reborn.t == state.t
    assert reborn.external.season == state.external.season
    assert reborn.internal.values == tuple(env.drive_model.set_point)
    assert reborn.external.agent_pos == env.grid.start


def test_coupled_variant_leak_example():
    # With sensed == core_temp the relaxation term vanishes and only the
    # leak acts: 30 + 0.2 * (40 - 30) = 32.
    env = make_tiny_env()
    coupled = make_coupled_variant(env, 0.2)
    model = transition_maps(coupled)
    state = reset(coupled, 0)
    hot_field = tuple(tuple(40.0 for _ in range(3)) for _ in range(3))
    probe = dataclasses.replace(
        state,
        internal=InternalState((0.6, 0.6, 30.0)),
        boundary=dataclasses.replace(state.boundary, sensed_ambient=30.0),
        external=dataclasses.replace(state.external, ambient_field=hot_field),
    )
    nxt = step_factored(model, probe, Action.Rest, stream(0, 0, "env"))
    assert nxt.internal.values[2] == pytest.approx(32.0, abs=1e-12)


def test_coupled_variant_zero_lambda_rejected():
    env = make_tiny_env()
    with pytest.raises(ConfigError):
        make_coupled_variant(env, 0.0)
    with pytest.raises(ConfigError):
        make_coupled_variant(env, -0.5)


def test_factored_model_has_no_leak():
    env = make_tiny_env()
    assert transition_maps(env).internal_leak is None
    assert transition_maps(make_coupled_variant(env, 0.1)).internal_leak is not None


def test_invalid_specs_rejected():
    with pytest.raises(ConfigError):
        make_tiny_env(kappa=0.0)
    with pytest.raises(ConfigError):
        make_tiny_env(kappa=1.5)
    with pytest.raises(ConfigError):
        make_tiny_env(e_gain=0.0)
    with pytest.raises(ConfigError):
        make_tiny_env(c_e=-0.1)
