"""Empirical checks of the internal/external decoupling.

Two independent probes of the same claim:

1. Conditional mutual information.  Collect transitions, discretize each
   component to a small alphabet, and estimate

       I( I_{t+1} ; E_t | I_t, B_t, A_t )

   with the plug-in (maximum-likelihood) estimator over the joint counts.
   Under the factored update order the next internal symbol is a function
   of the conditioning symbols alone, so the estimate is exactly zero; any
   leak from the external state shows up as positive information.

2. Jacobian zero blocks.  Central finite differences of each internal
   output with respect to each external temperature value (boundary held
   fixed), and of each external temperature output with respect to each
   internal value.  Both blocks must vanish for the factored model.

The estimator deliberately applies no bias correction: paired with the
exact-enumeration oracle in the test suite and with verdict thresholds
calibrated before being frozen in config, the plain plug-in form is simple
and exactly checkable.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .agents import Discretizer
from .core import (
    ACTIONS,
    Action,
    BoundaryState,
    ExternalState,
    FactoredState,
    InternalState,
    TransitionModel,
    internal_update,
    step_factored,
)
from .envs import CORE_TEMP, HomeoGridEnv, Status, SurvivalTracker, respawn, reset, transition_maps
from .errors import ConfigError, EmptyDataset, NonFiniteValue
from .homeostat import in_viability
from .rng import stream

Policy = Callable[[FactoredState, np.random.Generator], Action]


def uniform_random_policy(state: FactoredState, rng: np.random.Generator) -> Action:
    return ACTIONS[int(rng.integers(0, len(ACTIONS)))]


@dataclass(frozen=True)
class BlanketSymbolizer:
    """Discretizes (i, b, e) components to the alphabets the CI test uses.

    Internal values reuse the discretizer's bin edges; the sensed ambient
    temperature is binned with the core-temperature edges (same units); the
    ingestion flux takes one of two exact levels per channel, so zero versus
    non-zero captures it losslessly.
    """

    discretizer: Discretizer

    def internal_symbol(self, internal: InternalState) -> tuple[int, ...]:
        return self.discretizer.internal_bins(internal.values)

    def boundary_symbol(self, boundary: BoundaryState) -> tuple[int, int, int]:
        temp_edges = self.discretizer.internal_edges[CORE_TEMP]
        return (
            bisect_right(temp_edges, boundary.sensed_ambient),
            0 if boundary.flux_food == 0.0 else 1,
            0 if boundary.flux_water == 0.0 else 1,
        )

    def external_symbol(self, external: ExternalState) -> tuple[int, int, int, int]:
        pos = external.agent_pos
        return (pos[0], pos[1], int(external.tag_at(pos)), external.season)


@dataclass
class TransitionDataset:
    """Symbolized transitions plus the joint counts table.

    Counts are keyed (i_next, e, z) with z = (i, b, a); weights sum to the
    number of transitions.
    """

    transitions: list[tuple]
    counts: dict[tuple, float]

    def __len__(self) -> int:
        return len(self.transitions)


def collect_transitions(
    env: HomeoGridEnv,
    policy: Policy,
    steps: int,
    seed: int,
    discretizer: Discretizer,
) -> TransitionDataset:
    """Roll the policy for `steps` transitions, concatenating episodes on death."""
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    model = transition_maps(env)
    sym = BlanketSymbolizer(discretizer)
    rng_env = stream(seed, 0, "blanket-env")
    rng_policy = stream(seed, 0, "blanket-policy")
    state = reset(env, seed)
    tracker = SurvivalTracker(env.drive_model.grace_steps)
    dm = env.drive_model

    transitions: list[tuple] = []
    counts: dict[tuple, float] = {}
    for _ in range(steps):
        action = policy(state, rng_policy)
        nxt = step_factored(model, state, action, rng_env)
        record = (
            sym.internal_symbol(state.internal),
            sym.boundary_symbol(state.boundary),
            sym.external_symbol(state.external),
            int(action),
            sym.internal_symbol(nxt.internal),
        )
        transitions.append(record)
        key = (record[4], record[2], (record[0], record[1], record[3]))
        counts[key] = counts.get(key, 0.0) + 1.0
        if tracker.update(in_viability(dm, nxt.internal)) is Status.Dead:
            nxt = respawn(env, nxt)
            tracker.reset()
        state = nxt
    return TransitionDataset(transitions=transitions, counts=counts)


class CmiVerdict(Enum):
    Factored = "Factored"
    Coupled = "Coupled"
    Inconclusive = "Inconclusive"


@dataclass(frozen=True)
class CmiReport:
    cmi_nats: float
    sample_count: int
    alphabet_sizes: tuple[int, int, int]  # |I_{t+1}|, |E_t|, |conditioners|
    verdict: CmiVerdict


def cmi_from_counts(counts: Mapping[tuple, float]) -> float:
    """Plug-in I(X; Y | Z) in nats from weights keyed (x, y, z).

    Accepts arbitrary non-negative weights, so the exact joint distribution
    of an enumerated toy system can be fed in directly.
    """
    total = sum(counts.values())
    if total <= 0.0:
        raise EmptyDataset("counts table is empty")
    n_xz: dict[tuple, float] = {}
    n_yz: dict[tuple, float] = {}
    n_z: dict[tuple, float] = {}
    for (x, y, z), c in counts.items():
        n_xz[(x, z)] = n_xz.get((x, z), 0.0) + c
        n_yz[(y, z)] = n_yz.get((y, z), 0.0) + c
        n_z[z] = n_z.get(z, 0.0) + c
    acc = 0.0
    for (x, y, z), c in counts.items():
        if c <= 0.0:
            continue
        acc += c * math.log((c * n_z[z]) / (n_xz[(x, z)] * n_yz[(y, z)]))
    return max(acc / total, 0.0)


def entropy_from_counts(counts: Mapping[tuple, float], component: int) -> float:
    """Marginal entropy (nats) of one key component of the counts table."""
    total = sum(counts.values())
    marg: dict = {}
    for key, c in counts.items():
        marg[key[component]] = marg.get(key[component], 0.0) + c
    return -sum((c / total) * math.log(c / total) for c in marg.values() if c > 0.0)


def conditional_mi(
    ds: TransitionDataset, tol_lo: float = 1e-9, tol_hi: float = 0.02
) -> CmiReport:
    """Estimate I(I_{t+1}; E_t | I_t, B_t, A_t) and classify the result."""
    if len(ds) == 0:
        raise EmptyDataset("dataset holds no transitions")
    cmi = cmi_from_counts(ds.counts)
    xs = {k[0] for k in ds.counts}
    ys = {k[1] for k in ds.counts}
    zs = {k[2] for k in ds.counts}
    if cmi < tol_lo:
        verdict = CmiVerdict.Factored
    elif cmi > tol_hi:
        verdict = CmiVerdict.Coupled
    else:
        verdict = CmiVerdict.Inconclusive
    return CmiReport(
        cmi_nats=cmi,
        sample_count=len(ds),
        alphabet_sizes=(len(xs), len(ys), len(zs)),
        verdict=verdict,
    )


@dataclass(frozen=True)
class JacobianReport:
    """Finite-difference sensitivities across the forbidden blocks.

    `internal_wrt_external` maps (internal dim, cell) to the sensitivity of
    the next internal value to the ambient temperature at that cell;
    `external_wrt_internal` maps (cell, internal dim) the other way.  Both
    blocks must be zero for a factored model.
    """

    internal_wrt_external: dict[tuple[int, tuple[int, int]], float]
    external_wrt_internal: dict[tuple[tuple[int, int], int], float]
    forbidden_internal_max: float
    forbidden_external_max: float
    epsilon: float


def _with_ambient(external: ExternalState, cell: tuple[int, int], value: float) -> ExternalState:
    r, c = cell
    row = external.ambient_field[r]
    new_row = row[:c] + (value,) + row[c + 1 :]
    field = external.ambient_field[:r] + (new_row,) + external.ambient_field[r + 1 :]
    return replace(external, ambient_field=field)


def _with_internal(internal: InternalState, dim: int, value: float) -> InternalState:
    vals = internal.values
    return InternalState(vals[:dim] + (value,) + vals[dim + 1 :])


def jacobian_sparsity(
    model: TransitionModel,
    state: FactoredState,
    action: Action,
    epsilon: float,
) -> JacobianReport:
    """Central-difference check of the two forbidden Jacobian blocks."""
    if epsilon <= 0.0:
        raise ConfigError("epsilon must be > 0")
    ext = state.external
    rows = len(ext.ambient_field)
    cols = len(ext.ambient_field[0])
    k = len(state.internal)

    int_wrt_ext: dict[tuple[int, tuple[int, int]], float] = {}
    for r in range(rows):
        for c in range(cols):
            base = ext.ambient_field[r][c]
            e_plus = _with_ambient(ext, (r, c), base + epsilon)
            e_minus = _with_ambient(ext, (r, c), base - epsilon)
            i_plus = internal_update(model, state.internal, state.boundary, e_plus, action)
            i_minus = internal_update(model, state.internal, state.boundary, e_minus, action)
            for dim in range(k):
                grad = (i_plus.values[dim] - i_minus.values[dim]) / (2.0 * epsilon)
                if not math.isfinite(grad):
                    raise NonFiniteValue(f"non-finite sensitivity at cell ({r}, {c})")
                int_wrt_ext[(dim, (r, c))] = grad

    ext_wrt_int: dict[tuple[tuple[int, int], int], float] = {}
    t_next = state.t + 1

    def e_next_given(_internal: InternalState) -> ExternalState:
        # f_e has no internal parameter to thread the perturbation into;
        # differencing through this wrapper records the zero block as a
        # measurement instead of an assumption.
        return model.f_e(ext, state.boundary, action, stream(0, 0, "jacobian-probe"), t_next)

    for dim in range(k):
        base = state.internal.values[dim]
        e_plus = e_next_given(_with_internal(state.internal, dim, base + epsilon))
        e_minus = e_next_given(_with_internal(state.internal, dim, base - epsilon))
        for r in range(rows):
            for c in range(cols):
                grad = (e_plus.ambient_field[r][c] - e_minus.ambient_field[r][c]) / (2.0 * epsilon)
                if not math.isfinite(grad):
                    raise NonFiniteValue(f"non-finite sensitivity at dim {dim}")
                ext_wrt_int[((r, c), dim)] = grad

    return JacobianReport(
        internal_wrt_external=int_wrt_ext,
        external_wrt_internal=ext_wrt_int,
        forbidden_internal_max=max(abs(v) for v in int_wrt_ext.values()),
        forbidden_external_max=max(abs(v) for v in ext_wrt_int.values()),
        epsilon=epsilon,
    )
