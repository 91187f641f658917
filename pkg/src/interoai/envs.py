"""HomeoGrid: a survival gridworld with seasons, plus a broken control twin.

The world is a small grid of cells tagged Empty, Food, Water, or Shade.
Energy and hydration decay every step and are restored by consuming on the
matching cell; core temperature relaxes toward the ambient temperature the
skin senses.  Shade cells are cooler than the season baseline, so shading is
the only lever on temperature.  Seasons swap the ambient baseline (and, if
configured, the resource layout) on a fixed period, which makes the external
dynamics non-stationary while the internal dynamics stay the same.

Internal dimension order is fixed: 0 energy, 1 hydration, 2 core_temp.

`make_coupled_variant` returns an environment whose internal temperature
update additionally reads the raw ambient value at the agent's position,
bypassing the boundary.  It exists as a negative control: the blanket
verifier must flag it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from enum import Enum
from functools import lru_cache
from typing import Iterable

import numpy as np

from .core import (
    Action,
    BoundaryState,
    ExternalState,
    FactoredState,
    InternalState,
    StateSchema,
    Tag,
    TransitionModel,
)
from .errors import ConfigError
from .homeostat import DriveModel
from .rng import stream

ENERGY, HYDRATION, CORE_TEMP = 0, 1, 2
INTERNAL_DIM = 3

_MOVES = {
    Action.MoveN: (-1, 0),
    Action.MoveS: (1, 0),
    Action.MoveE: (0, 1),
    Action.MoveW: (0, -1),
}


@dataclass(frozen=True)
class SeasonSpec:
    """Ambient baseline and resource placements for one season."""

    baseline: float
    placements: tuple[tuple[int, int, Tag], ...]


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry and per-season content.  Walls block movement."""

    rows: int
    cols: int
    start: tuple[int, int]
    seasons: tuple[SeasonSpec, ...]
    noise_std: float = 0.0
    shade_delta: float = 8.0


@dataclass(frozen=True)
class SeasonSchedule:
    """Cyclic season order; the active index flips every `period` steps."""

    period: int
    order: tuple[int, ...]


@dataclass(frozen=True)
class HomeoGridEnv:
    """A fully specified environment instance.

    `leak` is zero in the factored build; the coupled control variant sets
    it positive, which routes the raw ambient temperature straight into the
    internal update.
    """

    grid: GridSpec
    schedule: SeasonSchedule
    drive_model: DriveModel
    c_e: float
    c_h: float
    e_gain: float
    w_gain: float
    kappa: float
    leak: float = 0.0

    def __post_init__(self) -> None:
        validate_env(self)

    @property
    def schema(self) -> StateSchema:
        return StateSchema(INTERNAL_DIM, self.grid.rows, self.grid.cols)


def validate_env(env: HomeoGridEnv) -> None:
    g = env.grid
    if g.rows < 1 or g.cols < 1:
        raise ConfigError("grid must have positive dimensions")
    if not (0 <= g.start[0] < g.rows and 0 <= g.start[1] < g.cols):
        raise ConfigError(f"start cell {g.start} out of bounds")
    if not g.seasons:
        raise ConfigError("at least one season is required")
    for s_idx, season in enumerate(g.seasons):
        tags = [t for _, _, t in season.placements]
        if Tag.Food not in tags or Tag.Water not in tags:
            raise ConfigError(f"season {s_idx} needs at least one Food and one Water cell")
        for r, c, _ in season.placements:
            if not (0 <= r < g.rows and 0 <= c < g.cols):
                raise ConfigError(f"placement ({r}, {c}) out of bounds in season {s_idx}")
    if g.noise_std < 0.0:
        raise ConfigError("noise_std must be >= 0")
    if env.schedule.period < 1 or not env.schedule.order:
        raise ConfigError("schedule needs period >= 1 and a non-empty order")
    for idx in env.schedule.order:
        if not (0 <= idx < len(g.seasons)):
            raise ConfigError(f"schedule references unknown season {idx}")
    if env.c_e < 0.0 or env.c_h < 0.0:
        raise ConfigError("decay rates must be >= 0")
    if env.e_gain <= 0.0 or env.w_gain <= 0.0:
        raise ConfigError("consumption gains must be > 0")
    if not (0.0 < env.kappa <= 1.0):
        raise ConfigError("kappa must lie in (0, 1]")
    if env.leak < 0.0:
        raise ConfigError("leak must be >= 0")
    if env.drive_model.dim != INTERNAL_DIM:
        raise ConfigError("drive model must be 3-dimensional (energy, hydration, core_temp)")


@lru_cache(maxsize=None)
def _season_tags(grid: GridSpec, season: int) -> tuple[tuple[Tag, ...], ...]:
    cells = [[Tag.Empty] * grid.cols for _ in range(grid.rows)]
    for r, c, tag in grid.seasons[season].placements:
        cells[r][c] = tag
    return tuple(tuple(row) for row in cells)


@lru_cache(maxsize=None)
def _season_base_field(grid: GridSpec, season: int) -> tuple[tuple[float, ...], ...]:
    tags = _season_tags(grid, season)
    base = grid.seasons[season].baseline
    return tuple(
        tuple(base - grid.shade_delta if tags[r][c] == Tag.Shade else base for c in range(grid.cols))
        for r in range(grid.rows)
    )


def _ambient_field(
    grid: GridSpec, season: int, rng: np.random.Generator
) -> tuple[tuple[float, ...], ...]:
    base = _season_base_field(grid, season)
    if grid.noise_std == 0.0:
        return base
    noise = rng.normal(0.0, grid.noise_std, size=(grid.rows, grid.cols))
    # Clip so a pathological draw cannot push the field to +-inf downstream.
    noise = np.clip(noise, -6.0 * grid.noise_std, 6.0 * grid.noise_std)
    return tuple(
        tuple(base[r][c] + float(noise[r, c]) for c in range(grid.cols))
        for r in range(grid.rows)
    )


def advance_season(schedule: SeasonSchedule, t: int) -> int:
    """Season index active at step t."""
    return schedule.order[(t // schedule.period) % len(schedule.order)]


def season_snapshot(
    env: HomeoGridEnv, season: int
) -> tuple[tuple[tuple[Tag, ...], ...], tuple[tuple[float, ...], ...]]:
    """Resource map and noise-free ambient field of one season."""
    return _season_tags(env.grid, season), _season_base_field(env.grid, season)


def reset(env: HomeoGridEnv, seed: int) -> FactoredState:
    """Initial state: internal at the set point, agent at the start cell, season 0 phase."""
    rng = stream(seed, 0, "env-reset")
    season = advance_season(env.schedule, 0)
    field = _ambient_field(env.grid, season, rng)
    external = ExternalState(
        agent_pos=env.grid.start,
        resource_map=_season_tags(env.grid, season),
        ambient_field=field,
        season=season,
    )
    internal = InternalState(tuple(env.drive_model.set_point))
    boundary = BoundaryState(
        sensed_ambient=external.ambient_at(env.grid.start), flux_food=0.0, flux_water=0.0
    )
    return FactoredState(internal=internal, boundary=boundary, external=external, t=0)


def respawn(env: HomeoGridEnv, state: FactoredState) -> FactoredState:
    """Re-embody after death: fresh body at the start cell, world clock intact.

    Seasons keep their phase so a mid-run death cannot shift the schedule
    that later steps (and metrics windows) depend on.
    """
    internal = InternalState(tuple(env.drive_model.set_point))
    external = dc_replace(state.external, agent_pos=env.grid.start)
    boundary = BoundaryState(
        sensed_ambient=external.ambient_at(env.grid.start), flux_food=0.0, flux_water=0.0
    )
    return FactoredState(internal=internal, boundary=boundary, external=external, t=state.t)


def transition_maps(env: HomeoGridEnv) -> TransitionModel:
    """The (f_b, f_i, f_e) triple for this environment."""
    grid = env.grid
    e_gain, w_gain = env.e_gain, env.w_gain
    c_e, c_h, kappa, lam = env.c_e, env.c_h, env.kappa, env.leak
    schedule = env.schedule

    def f_b(internal: InternalState, external: ExternalState, action: Action) -> BoundaryState:
        pos = external.agent_pos
        tag = external.tag_at(pos)
        consume = action == Action.Consume
        return BoundaryState(
            sensed_ambient=external.ambient_at(pos),
            flux_food=e_gain if consume and tag == Tag.Food else 0.0,
            flux_water=w_gain if consume and tag == Tag.Water else 0.0,
        )

    def f_i(internal: InternalState, boundary: BoundaryState, action: Action) -> InternalState:
        energy, hydration, temp = internal.values
        return InternalState(
            (
                energy - c_e + boundary.flux_food,
                hydration - c_h + boundary.flux_water,
                temp + kappa * (boundary.sensed_ambient - temp),
            )
        )

    def f_i_leak(
        internal: InternalState,
        boundary: BoundaryState,
        external: ExternalState,
        action: Action,
    ) -> InternalState:
        energy, hydration, temp = internal.values
        raw = external.ambient_at(external.agent_pos)
        return InternalState(
            (
                energy - c_e + boundary.flux_food,
                hydration - c_h + boundary.flux_water,
                temp + kappa * (boundary.sensed_ambient - temp) + lam * (raw - temp),
            )
        )

    def f_e(
        external: ExternalState,
        boundary: BoundaryState,
        action: Action,
        rng: np.random.Generator,
        t_next: int,
    ) -> ExternalState:
        r, c = external.agent_pos
        move = _MOVES.get(action)
        if move is not None:
            nr, nc = r + move[0], c + move[1]
            if 0 <= nr < grid.rows and 0 <= nc < grid.cols:
                r, c = nr, nc
        season = advance_season(schedule, t_next)
        if season != external.season or grid.noise_std > 0.0:
            tags = _season_tags(grid, season)
            field = _ambient_field(grid, season, rng)
        else:
            tags = external.resource_map
            field = external.ambient_field
        return ExternalState(
            agent_pos=(r, c), resource_map=tags, ambient_field=field, season=season
        )

    return TransitionModel(
        f_b=f_b,
        f_i=f_i,
        f_e=f_e,
        internal_leak=f_i_leak if lam > 0.0 else None,
        schema=env.schema,
    )


def make_coupled_variant(env: HomeoGridEnv, lam: float) -> HomeoGridEnv:
    """The same environment with the boundary-bypassing temperature leak enabled."""
    if lam <= 0.0:
        raise ConfigError("coupling leak must be > 0")
    return dc_replace(env, leak=lam)


class Status(Enum):
    Alive = "Alive"
    Dead = "Dead"


def terminal_check(env: HomeoGridEnv, flags: Iterable[bool]) -> Status:
    """Dead iff the trailing run of out-of-zone steps exceeds the grace window."""
    streak = 0
    for ok in flags:
        streak = 0 if ok else streak + 1
    return Status.Dead if streak > env.drive_model.grace_steps else Status.Alive


class SurvivalTracker:
    """Incremental version of `terminal_check` for step loops."""

    __slots__ = ("grace", "streak")

    def __init__(self, grace_steps: int):
        self.grace = grace_steps
        self.streak = 0

    def update(self, ok: bool) -> Status:
        self.streak = 0 if ok else self.streak + 1
        return Status.Dead if self.streak > self.grace else Status.Alive

    def reset(self) -> None:
        self.streak = 0
