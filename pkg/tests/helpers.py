"""Shared builders for small test environments."""

from __future__ import annotations

from interoai.core import Tag
from interoai.envs import GridSpec, HomeoGridEnv, SeasonSchedule, SeasonSpec
from interoai.homeostat import DriveModel

TINY_DRIVE = DriveModel(
    set_point=(0.6, 0.6, 37.0),
    weights=(4.0, 4.0, 0.06),
    viability=((0.1, 1.1), (0.1, 1.1), (33.0, 41.0)),
    grace_steps=5,
)


def make_tiny_env(**overrides) -> HomeoGridEnv:
    """A 3x3 two-season world with per-season layouts and a shade cell each."""
    grid = GridSpec(
        rows=3,
        cols=3,
        start=(1, 1),
        seasons=(
            SeasonSpec(
                baseline=37.0,
                placements=((0, 0, Tag.Food), (2, 2, Tag.Water), (0, 2, Tag.Shade)),
            ),
            SeasonSpec(
                baseline=45.0,
                placements=((2, 0, Tag.Food), (0, 1, Tag.Water), (1, 2, Tag.Shade)),
            ),
        ),
        noise_std=0.0,
        shade_delta=8.0,
    )
    fields = dict(
        grid=grid,
        schedule=SeasonSchedule(period=50, order=(0, 1)),
        drive_model=TINY_DRIVE,
        c_e=0.01,
        c_h=0.012,
        e_gain=0.1,
        w_gain=0.1,
        kappa=0.1,
    )
    fields.update(overrides)
    return HomeoGridEnv(**fields)


def all_external_states(env: HomeoGridEnv):
    """Every schema-valid external state of `env`: season layouts x positions."""
    from interoai.core import ExternalState
    from interoai.envs import season_snapshot

    out = []
    for season in range(len(env.grid.seasons)):
        tags, field = season_snapshot(env, season)
        for r in range(env.grid.rows):
            for c in range(env.grid.cols):
                out.append(
                    ExternalState(
                        agent_pos=(r, c), resource_map=tags, ambient_field=field, season=season
                    )
                )
    return out
