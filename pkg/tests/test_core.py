"""Step engine: update order, purity, determinism, and the structural blanket."""

import dataclasses

import pytest

from interoai.core import (
    Action,
    BoundaryState,
    FactoredState,
    InternalState,
    TransitionModel,
    perturb_external,
    step_factored,
)
from interoai.envs import reset, transition_maps
from interoai.errors import SchemaMismatch
from interoai.rng import stream

from helpers import all_external_states, make_tiny_env


def test_identity_model_increments_time_only():
    env = make_tiny_env()
    state = reset(env, 0)
    model = TransitionModel(
        f_b=lambda i, e, a: state.boundary, f_i=lambda i, b, a: i, f_e=lambda e, b, a, rng, t: e
    )
    nxt = step_factored(model, state, Action.Rest, stream(0, 0, "env"))
    assert nxt.internal == state.internal
    assert nxt.boundary == state.boundary
    assert nxt.external == state.external
    assert nxt.t == state.t + 1


def test_step_reads_current_boundary_not_new_one():
    # The internal update must consume b_t, so a sensed temperature planted
    # in the current boundary is what drives core_temp at t+1.
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    hot = dataclasses.replace(state, boundary=BoundaryState(40.0, 0.0, 0.0))
    nxt = step_factored(model, hot, Action.Rest, stream(0, 0, "env"))
    # kappa = 0.1, core 37, sensed 40 -> 37 + 0.1 * 3 = 37.3
    assert nxt.internal.values[2] == pytest.approx(37.3, abs=1e-12)


def test_newton_relaxation_example():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    probe = dataclasses.replace(
        state,
        internal=InternalState((0.6, 0.6, 30.0)),
        boundary=BoundaryState(40.0, 0.0, 0.0),
    )
    nxt = step_factored(model, probe, Action.Rest, stream(0, 0, "env"))
    assert nxt.internal.values[2] == 31.0


def test_determinism_bitwise():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 3)
    a = step_factored(model, state, Action.MoveE, stream(7, 0, "env"))
    b = step_factored(model, state, Action.MoveE, stream(7, 0, "env"))
    assert a == b


def test_purity_input_unmodified():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 1)
    snapshot = dataclasses.replace(state)
    step_factored(model, state, Action.MoveN, stream(0, 0, "env"))
    assert state == snapshot


def test_wall_blocks_movement():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    # Walk north twice from the center of the 3x3 grid: second move hits the wall.
    rng = stream(0, 0, "env")
    one = step_factored(model, state, Action.MoveN, rng)
    assert one.external.agent_pos == (0, 1)
    two = step_factored(model, one, Action.MoveN, rng)
    assert two.external.agent_pos == (0, 1)
    assert two.t == one.t + 1


def test_schema_mismatch_rejected():
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    bad = dataclasses.replace(state, internal=InternalState((0.5, 0.5)))
    with pytest.raises(SchemaMismatch):
        step_factored(model, bad, Action.Rest, stream(0, 0, "env"))


def test_perturb_external_swaps_only_external():
    env = make_tiny_env()
    state = reset(env, 0)
    for replacement in all_external_states(env):
        swapped = perturb_external(state, replacement)
        assert swapped.internal == state.internal
        assert swapped.boundary == state.boundary
        assert swapped.external == replacement
        assert swapped.t == state.t
    same = perturb_external(state, state.external)
    assert same == state


def test_perturb_external_rejects_out_of_bounds():
    env = make_tiny_env()
    state = reset(env, 0)
    bad = dataclasses.replace(state.external, agent_pos=(5, 5))
    with pytest.raises(SchemaMismatch):
        perturb_external(state, bad)


def test_blanket_invariance_under_external_swap():
    # Bitwise-equal internal successors for every valid external replacement.
    env = make_tiny_env()
    model = transition_maps(env)
    state = reset(env, 0)
    externals = all_external_states(env)
    for action in Action:
        references = None
        for replacement in externals:
            nxt = step_factored(model, perturb_external(state, replacement), action, stream(0, 0, "env"))
            if references is None:
                references = nxt.internal
            else:
                assert nxt.internal == references
