"""Action selection and learning.

Four agent kinds share one tabular substrate:

* ``Random``          -- uniform actions, no learning; the floor baseline.
* ``ExternalRewardQ`` -- conventional baseline: Q-learning on a fixed +1 for
  consuming at any resource cell.  It observes external features only and
  has no access to the internal state.
* ``HomeostaticQ``    -- Q-learning on drive reduction with a fixed softmax
  temperature; reward comes from the internal state.
* ``Neuromod``        -- HomeostaticQ plus a neuromodulatory layer that maps
  the current drive to an exploration temperature and a TD-error gain, and
  (optionally) routes selection and updates to a per-context sub-table
  keyed by the dominant internal deficit.

The temperature mapping is monotone decreasing in drive, so a satiated
agent explores at ``tau_max`` and a needy one exploits near ``tau_min``.
The gain mapping saturates at ``1 + beta_g``.  Context gating is the
tabular analog of selecting a sub-network per contextual cue.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .core import ACTIONS, Action, FactoredState, Tag
from .errors import ConfigError, NonFiniteValue
from .homeostat import DriveModel, dominant_deficit, drive

ObsKey = tuple


@dataclass(frozen=True)
class Discretizer:
    """Maps a factored state to a hashable observation key.

    Internal values fall into half-open bins [edge_i, edge_{i+1}); a value
    sitting exactly on an edge belongs to the upper bin.  External features
    are the agent position, the cell tag under the agent, and (only when
    `season_visible`) the season index.

    Boundary features complete the key.  The two flux bits are load-bearing:
    ingestion reaches the internal state one step after the boundary
    registers it, so without them the observed process is not Markov and
    consuming can never earn credit.  The sensed-ambient bin (shared edges
    with core temperature) lets the skin tell seasons apart; turning
    `sense_ambient` off forces seasonal knowledge onto shared keys, which
    is the regime where context gating is tested.
    """

    internal_edges: tuple[tuple[float, ...], ...]
    season_visible: bool = False
    sense_ambient: bool = True

    def __post_init__(self) -> None:
        for edges in self.internal_edges:
            if any(b <= a for a, b in zip(edges, edges[1:])):
                raise ConfigError("bin edges must be strictly increasing")

    def internal_bins(self, values: tuple[float, ...]) -> tuple[int, ...]:
        if len(values) != len(self.internal_edges):
            raise ConfigError(
                f"{len(values)} internal values vs {len(self.internal_edges)} edge sets"
            )
        return tuple(bisect_right(edges, v) for edges, v in zip(self.internal_edges, values))

    def boundary_features(self, state: FactoredState) -> tuple[int, ...]:
        b = state.boundary
        bits = (0 if b.flux_food == 0.0 else 1, 0 if b.flux_water == 0.0 else 1)
        if self.sense_ambient:
            temp_edges = self.internal_edges[-1]
            return bits + (bisect_right(temp_edges, b.sensed_ambient),)
        return bits

    def external_features(self, state: FactoredState) -> tuple:
        ext = state.external
        pos = ext.agent_pos
        if self.season_visible:
            return (pos[0], pos[1], int(ext.tag_at(pos)), ext.season)
        return (pos[0], pos[1], int(ext.tag_at(pos)))

    def key(self, state: FactoredState) -> ObsKey:
        return (
            self.external_features(state)
            + self.boundary_features(state)
            + self.internal_bins(state.internal.values)
        )


def discretize(d: Discretizer, state: FactoredState) -> ObsKey:
    """Full observation key: external, boundary, and internal-bin features."""
    return d.key(state)


class QTable:
    """Sparse action-value table; unseen entries read as 0."""

    __slots__ = ("actions", "values")

    def __init__(self, actions: tuple[Action, ...] = ACTIONS):
        self.actions = tuple(actions)
        self.values: dict[tuple, float] = {}

    def get(self, obs: ObsKey, action: Action) -> float:
        return self.values.get((obs, action), 0.0)

    def set(self, obs: ObsKey, action: Action, value: float) -> None:
        self.values[(obs, action)] = value

    def row(self, obs: ObsKey) -> tuple[float, ...]:
        get = self.values.get
        return tuple(get((obs, a), 0.0) for a in self.actions)

    def max_value(self, obs: ObsKey) -> float:
        return max(self.row(obs))

    def greedy(self, obs: ObsKey) -> Action:
        row = self.row(obs)
        best = max(row)
        return self.actions[row.index(best)]  # ties break to the lowest index


def softmax_probs(qvalues: tuple[float, ...], tau: float) -> tuple[float, ...]:
    """Softmax with max-subtraction for numerical stability."""
    top = max(qvalues)
    exps = [math.exp((q - top) / tau) for q in qvalues]
    z = sum(exps)
    return tuple(e / z for e in exps)


def q_select(q: QTable, obs: ObsKey, tau: float, rng: np.random.Generator) -> Action:
    """Sample an action from softmax(Q(obs, .) / tau)."""
    if tau <= 0.0:
        raise ConfigError("softmax temperature must be > 0")
    probs = softmax_probs(q.row(obs), tau)
    u = rng.random()
    acc = 0.0
    for a, p in zip(q.actions, probs):
        acc += p
        if u < acc:
            return a
    return q.actions[-1]  # u landed in the last slot's rounding slack


def q_update(
    q: QTable,
    transition: tuple[ObsKey, Action, float, ObsKey],
    alpha: float,
    gamma: float,
    g: float,
) -> None:
    """One gain-modulated temporal-difference backup; touches a single entry."""
    obs, action, reward, obs_next = transition
    old = q.get(obs, action)
    new = old + alpha * g * (reward + gamma * q.max_value(obs_next) - old)
    if not math.isfinite(new):
        raise NonFiniteValue(f"update for {obs}/{action.name} produced {new}")
    q.set(obs, action, new)


@dataclass(frozen=True)
class ModulationSignals:
    """Per-step neuromodulator output."""

    temperature: float
    td_gain: float
    context_id: int


@dataclass(frozen=True)
class NeuromodConfig:
    tau_min: float = 0.05
    tau_max: float = 0.3
    beta_tau: float = 2.5
    beta_g: float = 1.0
    context_gating: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.tau_min < self.tau_max):
            raise ConfigError("need 0 < tau_min < tau_max")
        if self.beta_tau <= 0.0:
            raise ConfigError("beta_tau must be > 0")
        if self.beta_g < 0.0:
            raise ConfigError("beta_g must be >= 0")


def modulate(cfg: NeuromodConfig, dm: DriveModel, h) -> ModulationSignals:
    """Map the current drive to exploration temperature, TD gain, and context.

    tau falls from tau_max (satiated) toward tau_min (needy); the gain rises
    from 1 toward 1 + beta_g; the context is the dominant deficit dimension
    when gating is on, else a single shared context.
    """
    d = drive(dm, h)
    tau = cfg.tau_min + (cfg.tau_max - cfg.tau_min) * math.exp(-cfg.beta_tau * d)
    g = 1.0 + cfg.beta_g * d / (1.0 + d)
    context = dominant_deficit(dm, h) if cfg.context_gating else 0
    return ModulationSignals(temperature=tau, td_gain=g, context_id=context)


AGENT_KINDS = ("Random", "ExternalRewardQ", "HomeostaticQ", "Neuromod")


@dataclass(frozen=True)
class AgentConfig:
    kind: str = "HomeostaticQ"
    alpha: float = 0.25
    gamma: float = 0.95
    tau: float = 0.2

    def __post_init__(self) -> None:
        if self.kind not in AGENT_KINDS:
            raise ConfigError(f"unknown agent kind {self.kind!r}")
        if not (0.0 < self.alpha <= 1.0):
            raise ConfigError("alpha must lie in (0, 1]")
        if not (0.0 <= self.gamma < 1.0):
            raise ConfigError("gamma must lie in [0, 1)")
        if self.tau <= 0.0:
            raise ConfigError("tau must be > 0")


class RandomAgent:
    """Uniform action choice; never learns."""

    kind = "Random"
    last_signals: ModulationSignals | None = None

    def act(self, state: FactoredState, rng: np.random.Generator) -> Action:
        return ACTIONS[int(rng.integers(0, len(ACTIONS)))]

    def learn(self, state: FactoredState, action: Action, nxt: FactoredState) -> None:
        pass

    def policy_probs(self, state: FactoredState) -> tuple[float, ...]:
        p = 1.0 / len(ACTIONS)
        return (p,) * len(ACTIONS)

    def greedy_action(self, state: FactoredState) -> Action:
        return ACTIONS[0]


class TabularQAgent:
    """Shared machinery for the three learning agents."""

    def __init__(
        self,
        cfg: AgentConfig,
        dm: DriveModel,
        disc: Discretizer,
        neuromod: NeuromodConfig | None = None,
    ):
        self.kind = cfg.kind
        self.cfg = cfg
        self.dm = dm
        self.disc = disc
        self.neuromod = neuromod
        self.tables: dict[int, QTable] = {}
        self.last_signals: ModulationSignals | None = None
        self._sig_state: FactoredState | None = None

    # -- observation and routing ------------------------------------------

    def observe(self, state: FactoredState) -> ObsKey:
        if self.kind == "ExternalRewardQ":
            return self.disc.external_features(state)
        return self.disc.key(state)

    def signals(self, state: FactoredState) -> ModulationSignals:
        if self._sig_state is state and self.last_signals is not None:
            return self.last_signals
        if self.kind == "Neuromod":
            sig = modulate(self.neuromod, self.dm, state.internal)
        else:
            sig = ModulationSignals(temperature=self.cfg.tau, td_gain=1.0, context_id=0)
        self._sig_state = state
        self.last_signals = sig
        return sig

    def table_for(self, context_id: int) -> QTable:
        table = self.tables.get(context_id)
        if table is None:
            table = QTable()
            self.tables[context_id] = table
        return table

    # -- reward -------------------------------------------------------------

    def reward(self, state: FactoredState, action: Action, nxt: FactoredState) -> float:
        if self.kind == "ExternalRewardQ":
            tag = state.external.tag_at(state.external.agent_pos)
            return 1.0 if action == Action.Consume and tag in (Tag.Food, Tag.Water) else 0.0
        return drive(self.dm, state.internal) - drive(self.dm, nxt.internal)

    # -- the act / learn pair ------------------------------------------------

    def act(self, state: FactoredState, rng: np.random.Generator) -> Action:
        sig = self.signals(state)
        return q_select(self.table_for(sig.context_id), self.observe(state), sig.temperature, rng)

    def learn(self, state: FactoredState, action: Action, nxt: FactoredState) -> None:
        sig = self.signals(state)
        table = self.table_for(sig.context_id)
        transition = (self.observe(state), action, self.reward(state, action, nxt), self.observe(nxt))
        q_update(table, transition, self.cfg.alpha, self.cfg.gamma, sig.td_gain)

    # -- probes ---------------------------------------------------------------

    def policy_probs(self, state: FactoredState) -> tuple[float, ...]:
        sig = self.signals(state)
        table = self.table_for(sig.context_id)
        return softmax_probs(table.row(self.observe(state)), sig.temperature)

    def greedy_action(self, state: FactoredState) -> Action:
        sig = self.signals(state)
        return self.table_for(sig.context_id).greedy(self.observe(state))


def make_agent(
    cfg: AgentConfig,
    dm: DriveModel,
    disc: Discretizer,
    neuromod: NeuromodConfig | None = None,
):
    if cfg.kind == "Random":
        return RandomAgent()
    if cfg.kind == "Neuromod" and neuromod is None:
        raise ConfigError("Neuromod agent requires a neuromod config")
    return TabularQAgent(cfg, dm, disc, neuromod)
