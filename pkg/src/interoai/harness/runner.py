"""Experiment execution: single runs, seed sweeps, and blanket verification.

A run is one continuous trajectory: the agent learns online for
``train_steps`` warm-up steps, then keeps learning while the following
``eval_steps`` steps are recorded.  Death re-embodies the agent (fresh body
at the start cell) without touching the world clock, so the season schedule
stays aligned across seeds and deaths merely split the log into episodes.

Everything downstream of a (config, seed) pair is deterministic, and each
run draws from its own random streams, so sweeps may execute their runs in
any order or in parallel without changing a byte of output.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import log as ln
from pathlib import Path
from statistics import mean

from ..agents import make_agent
from ..blanket import (
    CmiReport,
    CmiVerdict,
    collect_transitions,
    conditional_mi,
    jacobian_sparsity,
    uniform_random_policy,
)
from ..core import (
    ACTIONS,
    BoundaryState,
    ExternalState,
    FactoredState,
    InternalState,
    step_factored,
)
from ..envs import (
    ENERGY,
    HYDRATION,
    HomeoGridEnv,
    Status,
    SurvivalTracker,
    make_coupled_variant,
    reset,
    respawn,
    season_snapshot,
    transition_maps,
)
from ..errors import ConfigError, RuntimeFailure
from ..homeostat import drive, in_viability
from ..rng import stream
from .config import ExperimentConfig
from .export import export
from .metrics import EpisodeLog, MetricsRow, MetricsTable, StepRecord, build_metrics_row

log = logging.getLogger("interoai")

PROBE_SAMPLES = 256


@dataclass
class RunResult:
    log: EpisodeLog
    metrics: MetricsRow
    agent: object


def execute_run(config: ExperimentConfig, seed: int) -> RunResult:
    """Train and evaluate one agent; pure function of (config, seed)."""
    env = config.env
    dm = env.drive_model
    model = transition_maps(env)
    agent = make_agent(config.agent, dm, config.discretizer, config.neuromod)
    rng_env = stream(seed, 0, "env")
    rng_agent = stream(seed, 0, "agent")

    state = reset(env, seed)
    tracker = SurvivalTracker(dm.grace_steps)
    records: list[StepRecord] = []
    episode = 0
    prev_drive = drive(dm, state.internal)
    record_from = config.run.train_steps
    total = record_from + config.run.eval_steps
    status = Status.Alive
    step = -1
    try:
        for step in range(total):
            action = agent.act(state, rng_agent)
            sig = agent.last_signals
            nxt = step_factored(model, state, action, rng_env)
            agent.learn(state, action, nxt)
            d_next = drive(dm, nxt.internal)
            ok = in_viability(dm, nxt.internal)
            status = tracker.update(ok)
            if step >= record_from:
                pos = nxt.external.agent_pos
                energy, hydration, core_temp = nxt.internal.values
                records.append(
                    StepRecord(
                        t=step,
                        episode=episode,
                        row=pos[0],
                        col=pos[1],
                        season=nxt.external.season,
                        tag=nxt.external.tag_at(pos).name,
                        energy=energy,
                        hydration=hydration,
                        core_temp=core_temp,
                        action=action.name,
                        reward=prev_drive - d_next,
                        drive=d_next,
                        in_viability=ok,
                        tau=sig.temperature if sig is not None else None,
                        context_id=sig.context_id if sig is not None else None,
                    )
                )
            if status is Status.Dead:
                episode += 1
                nxt = respawn(env, nxt)
                tracker.reset()
                d_next = drive(dm, nxt.internal)
            state = nxt
            prev_drive = d_next
    except ConfigError:
        raise
    except Exception as exc:
        raise RuntimeFailure(f"run seed={seed} failed at step {step}: {exc}") from exc

    entropies = probe_entropies(agent, env, seed)
    ent_sat = mean(e for _, e, _ in entropies) if entropies else float("nan")
    ent_def = mean(e for _, _, e in entropies) if entropies else float("nan")
    row = build_metrics_row(seed, records, env.schedule.order[0], ent_sat, ent_def)
    episode_log = EpisodeLog(
        seed=seed, agent_kind=config.agent.kind, steps=records, terminal=status.value
    )
    return RunResult(log=episode_log, metrics=row, agent=agent)


def probe_internal_states(env: HomeoGridEnv) -> tuple[InternalState, InternalState]:
    """A satiated body (at the set point) and a depleted one (floor energy/water)."""
    dm = env.drive_model
    satiated = InternalState(tuple(dm.set_point))
    lows = list(dm.set_point)
    lows[ENERGY] = dm.viability[ENERGY][0]
    lows[HYDRATION] = dm.viability[HYDRATION][0]
    return satiated, InternalState(tuple(lows))


def probe_entropies(
    agent, env: HomeoGridEnv, seed: int, samples: int = PROBE_SAMPLES
) -> list[tuple[tuple[int, int], float, float]]:
    """Empirical action entropy per grid cell, satiated versus depleted.

    The trained policy is sampled (no learning) at every cell under both
    probe bodies; sampling noise is tiny against the temperature gap the
    neuromodulator induces.
    """
    dm = env.drive_model
    if not dm.viability:
        return []
    satiated, deficit = probe_internal_states(env)
    season = env.schedule.order[0]
    tags, field = season_snapshot(env, season)
    rng = stream(seed, 0, "probe")
    out = []
    for r in range(env.grid.rows):
        for c in range(env.grid.cols):
            external = ExternalState(
                agent_pos=(r, c), resource_map=tags, ambient_field=field, season=season
            )
            boundary = BoundaryState(sensed_ambient=field[r][c], flux_food=0.0, flux_water=0.0)
            cell_entropy = []
            for internal in (satiated, deficit):
                probe = FactoredState(internal=internal, boundary=boundary, external=external, t=0)
                counts = Counter(agent.act(probe, rng) for _ in range(samples))
                cell_entropy.append(
                    -sum((n / samples) * ln(n / samples) for n in counts.values())
                )
            out.append(((r, c), cell_entropy[0], cell_entropy[1]))
    return out


def run(config: ExperimentConfig, seed: int, out_dir: str | None = None) -> EpisodeLog:
    """Execute one run and write its per-step log as CSV."""
    result = execute_run(config, seed)
    directory = Path(out_dir if out_dir is not None else config.run.out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    export(result.log, directory / f"log_seed{seed}.csv")
    log.info("run seed=%d finished: %d steps, terminal=%s", seed, len(result.log.steps), result.log.terminal)
    return result.log


def _sweep_worker(payload: tuple[ExperimentConfig, int, str]) -> MetricsRow:
    config, seed, out_dir = payload
    result = execute_run(config, seed)
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    export(result.log, directory / f"log_seed{seed}.csv")
    return result.metrics


def sweep(config: ExperimentConfig, out_dir: str | None = None, jobs: int = 1) -> MetricsTable:
    """One run per seed; logs and a metrics table written to the output directory."""
    directory = Path(out_dir if out_dir is not None else config.run.out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    seeds = sorted(config.run.seeds)
    payloads = [(config, seed, str(directory)) for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_worker, payloads))
    else:
        rows = [_sweep_worker(p) for p in payloads]
    table = MetricsTable(rows=rows)
    export(table, directory / "metrics.csv")
    return table


@dataclass
class BlanketReport:
    """Verdicts and measurements for the factored env and its coupled control."""

    factored: CmiReport
    coupled: CmiReport
    factored_jacobian_max: tuple[float, float]  # (internal<-external, external<-internal)
    coupled_jacobian_max: tuple[float, float]
    gap_ratio: float
    lam: float
    tol_lo: float
    tol_hi: float
    passed: bool

    def to_dict(self) -> dict:
        def cmi_dict(rep: CmiReport) -> dict:
            return {
                "cmi_nats": rep.cmi_nats,
                "sample_count": rep.sample_count,
                "alphabet_sizes": list(rep.alphabet_sizes),
                "verdict": rep.verdict.value,
            }

        return {
            "factored": cmi_dict(self.factored),
            "coupled": cmi_dict(self.coupled),
            "factored_jacobian_max": list(self.factored_jacobian_max),
            "coupled_jacobian_max": list(self.coupled_jacobian_max),
            "gap_ratio": self.gap_ratio,
            "lambda": self.lam,
            "tol_lo": self.tol_lo,
            "tol_hi": self.tol_hi,
            "passed": self.passed,
        }


def _jacobian_maxima(env: HomeoGridEnv, epsilon: float) -> tuple[float, float]:
    """Forbidden-block maxima over the reset state and every action."""
    model = transition_maps(env)
    state = reset(env, 0)
    int_max = 0.0
    ext_max = 0.0
    for action in ACTIONS:
        report = jacobian_sparsity(model, state, action, epsilon)
        int_max = max(int_max, report.forbidden_internal_max)
        ext_max = max(ext_max, report.forbidden_external_max)
    return int_max, ext_max


def verify_blanket(config: ExperimentConfig, out_dir: str | None = None) -> BlanketReport:
    """Run the CI estimate and the Jacobian check on both env variants."""
    settings = config.blanket
    factored_env = settings.env
    coupled_env = make_coupled_variant(factored_env, settings.lam)

    ds_factored = collect_transitions(
        factored_env, uniform_random_policy, settings.steps, settings.seed, settings.discretizer
    )
    ds_coupled = collect_transitions(
        coupled_env, uniform_random_policy, settings.steps, settings.seed, settings.discretizer
    )
    rep_factored = conditional_mi(ds_factored, settings.tol_lo, settings.tol_hi)
    rep_coupled = conditional_mi(ds_coupled, settings.tol_lo, settings.tol_hi)

    jac_factored = _jacobian_maxima(factored_env, settings.epsilon)
    jac_coupled = _jacobian_maxima(coupled_env, settings.epsilon)

    gap = rep_coupled.cmi_nats / max(rep_factored.cmi_nats, settings.tol_lo)
    passed = (
        rep_factored.verdict is CmiVerdict.Factored
        and rep_coupled.verdict is CmiVerdict.Coupled
        and jac_factored[0] == 0.0
        and jac_factored[1] == 0.0
    )
    report = BlanketReport(
        factored=rep_factored,
        coupled=rep_coupled,
        factored_jacobian_max=jac_factored,
        coupled_jacobian_max=jac_coupled,
        gap_ratio=gap,
        lam=settings.lam,
        tol_lo=settings.tol_lo,
        tol_hi=settings.tol_hi,
        passed=passed,
    )
    if out_dir is not None:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        export(report, directory / "blanket.json")
    return report
