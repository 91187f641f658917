"""Factored state space and the one-step transition engine.

A state is split three ways: an internal part (the physiological variables
the agent must keep in range), a boundary part (what the body senses and
ingests), and an external part (the world).  The three update maps are wired
so that the internal map never receives the external state and the external
map never receives the internal state.  Decoupling is therefore a property
of call signatures, not of tuned coefficients, and can be checked bitwise.

Update order within one step, with a_t the chosen action:

    b_{t+1} = f_b(i_t, e_t, a_t)
    i_{t+1} = f_i(i_t, b_t, a_t)
    e_{t+1} = f_e(e_t, b_t, a_t, rng, t+1)

The internal update reads the boundary of the *current* state, so i_{t+1}
is a deterministic function of (i_t, b_t, a_t) alone.  That makes the
conditional independence of i_{t+1} and e_t given (i_t, b_t, a_t) exact
rather than approximate, which is what the blanket verifier tests.

Only f_e consumes randomness; f_b and f_i are deterministic.  All state
types are immutable values, so stepping never mutates its inputs and is
safe to run from many threads as long as each run owns its generator.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Callable, Optional

import numpy as np

from .errors import SchemaMismatch


class Action(IntEnum):
    """The six primitive actions."""

    MoveN = 0
    MoveS = 1
    MoveE = 2
    MoveW = 3
    Consume = 4
    Rest = 5


ACTIONS: tuple[Action, ...] = tuple(Action)


class Tag(IntEnum):
    """Cell contents."""

    Empty = 0
    Food = 1
    Water = 2
    Shade = 3


@dataclass(frozen=True, slots=True)
class InternalState:
    """Physiological variables, e.g. (energy, hydration, core_temp)."""

    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, slots=True)
class BoundaryState:
    """What crosses the body surface: sensed ambient heat and ingestion flux."""

    sensed_ambient: float
    flux_food: float
    flux_water: float


@dataclass(frozen=True, slots=True)
class ExternalState:
    """World state: agent position, per-cell resources and temperatures, season."""

    agent_pos: tuple[int, int]
    resource_map: tuple[tuple[Tag, ...], ...]
    ambient_field: tuple[tuple[float, ...], ...]
    season: int

    def tag_at(self, pos: tuple[int, int]) -> Tag:
        return self.resource_map[pos[0]][pos[1]]

    def ambient_at(self, pos: tuple[int, int]) -> float:
        return self.ambient_field[pos[0]][pos[1]]


@dataclass(frozen=True, slots=True)
class FactoredState:
    """The full simulator state at one time step."""

    internal: InternalState
    boundary: BoundaryState
    external: ExternalState
    t: int


# Update-map signatures.  f_i admits no external argument and f_e admits no
# internal argument; a leak map exists only so that a deliberately broken
# control variant can be built and then caught by the verifier.
FBoundary = Callable[[InternalState, ExternalState, Action], BoundaryState]
FInternal = Callable[[InternalState, BoundaryState, Action], InternalState]
FExternal = Callable[
    [ExternalState, BoundaryState, Action, np.random.Generator, int], ExternalState
]
FInternalLeak = Callable[
    [InternalState, BoundaryState, ExternalState, Action], InternalState
]


@dataclass(frozen=True, slots=True)
class StateSchema:
    """Dimensions a model expects of the states it is stepped with."""

    internal_dim: int
    rows: int
    cols: int


@dataclass(frozen=True)
class TransitionModel:
    """The three update maps, plus an optional blanket-violating leak.

    `internal_leak` replaces `f_i` when set.  The factored build keeps it
    None so the internal update cannot read the external state at all.
    """

    f_b: FBoundary
    f_i: FInternal
    f_e: FExternal
    internal_leak: Optional[FInternalLeak] = None
    schema: Optional[StateSchema] = None


def check_schema(schema: Optional[StateSchema], state: FactoredState) -> None:
    """Raise SchemaMismatch unless the state fits the model's schema."""
    if schema is None:
        return
    if len(state.internal) != schema.internal_dim:
        raise SchemaMismatch(
            f"internal dimension {len(state.internal)} != schema {schema.internal_dim}"
        )
    r, c = state.external.agent_pos
    if not (0 <= r < schema.rows and 0 <= c < schema.cols):
        raise SchemaMismatch(f"agent_pos {state.external.agent_pos} out of bounds")
    if len(state.external.resource_map) != schema.rows or any(
        len(row) != schema.cols for row in state.external.resource_map
    ):
        raise SchemaMismatch("resource_map shape disagrees with schema")
    if len(state.external.ambient_field) != schema.rows or any(
        len(row) != schema.cols for row in state.external.ambient_field
    ):
        raise SchemaMismatch("ambient_field shape disagrees with schema")


def internal_update(
    model: TransitionModel,
    internal: InternalState,
    boundary: BoundaryState,
    external: ExternalState,
    action: Action,
) -> InternalState:
    """Apply the internal map, routing through the leak when present."""
    if model.internal_leak is not None:
        return model.internal_leak(internal, boundary, external, action)
    return model.f_i(internal, boundary, action)


def step_factored(
    model: TransitionModel,
    state: FactoredState,
    action: Action,
    rng: np.random.Generator,
) -> FactoredState:
    """Advance one step under the fixed blanket-respecting update order."""
    check_schema(model.schema, state)
    b_next = model.f_b(state.internal, state.external, action)
    i_next = internal_update(model, state.internal, state.boundary, state.external, action)
    e_next = model.f_e(state.external, state.boundary, action, rng, state.t + 1)
    return FactoredState(internal=i_next, boundary=b_next, external=e_next, t=state.t + 1)


def perturb_external(state: FactoredState, replacement: ExternalState) -> FactoredState:
    """Return a copy of `state` with the external component swapped.

    Internal and boundary components are untouched; used to probe that the
    internal update cannot see the swap.
    """
    rows = len(replacement.resource_map)
    if rows == 0 or len(replacement.ambient_field) != rows:
        raise SchemaMismatch("replacement resource/ambient grids disagree")
    cols = len(replacement.resource_map[0])
    if any(len(row) != cols for row in replacement.resource_map) or any(
        len(row) != cols for row in replacement.ambient_field
    ):
        raise SchemaMismatch("replacement grids are ragged")
    r, c = replacement.agent_pos
    if not (0 <= r < rows and 0 <= c < cols):
        raise SchemaMismatch(f"replacement agent_pos {replacement.agent_pos} out of bounds")
    return replace(state, external=replacement)
