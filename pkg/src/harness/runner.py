"""Seeded experiment execution.

Discrete environments run one job per (seed, method); every method of a seed
shares the seed's environment stream. Continuous worlds run one job per seed
in which all methods act as agents of the same world.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import Future, ProcessPoolExecutor, as_completed
from contextlib import ExitStack
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from agents import FetsAgent
from envs import World, cont_spaces, multi_agent_tick
from envs.base import Environment
from envs.continuous_maze import ACTION_NAMES, FOOD_REWARD, POISON_REWARD
from learners import save_checkpoint
from loaders import WorldLayout

from . import __version__
from .config import RunConfig, build_environment
from .records import EpisodeRecord, RecordWriter

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
SNAPSHOT_NAME = "config.json"
CHECKPOINT_DIR = "checkpoints"


@dataclass
class JobResult:
    method: str
    seed: int
    file: str
    rows: int = 0
    elapsed_sec: float = 0.0
    status: str = "ok"
    error: str | None = None


@dataclass
class RunSummary:
    out_dir: Path
    expected: int = 0
    jobs: list[JobResult] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return len(self.jobs) == self.expected and all(job.status == "ok" for job in self.jobs)


def run_id(config: RunConfig, method: str, seed: int) -> str:
    return f"{config.run.name}-{method}-s{seed}"


def csv_name(method: str, seed: int) -> str:
    return f"{method}_seed{seed}.csv"


def _streams(seed: int) -> tuple[np.random.Generator, np.random.SeedSequence]:
    env_seq, agent_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(env_seq), agent_seq


def run_discrete_job(config: RunConfig, method: str, seed: int, out_dir: Path) -> JobResult:
    """All episodes of one method on one seed, streamed to its CSV."""
    start = time.perf_counter()
    env = build_environment(config)
    assert isinstance(env, Environment)
    env_rng, agent_seq = _streams(seed)
    agent = FetsAgent(config.agent.agent_config(method), env.spaces(), env.action_count, env.reward_span, agent_seq)
    result = JobResult(method, seed, csv_name(method, seed))

    with RecordWriter(out_dir / result.file, agent.space_names) as writer:
        for episode in range(config.run.episodes):
            agent.start_episode(episode)
            state = env.reset(env_rng)
            total, steps, terminal = 0.0, 0, False
            while not terminal and steps < config.run.step_cap:
                decision = agent.act(state)
                next_state, reward, terminal = env.step(state, decision.action, env_rng)
                agent.observe(state, decision.action, reward, next_state, terminal)
                total += reward
                steps += 1
                state = next_state
            diagnostics = agent.end_episode(truncated=not terminal)
            writer.write(
                EpisodeRecord(
                    run_id(config, method, seed),
                    seed,
                    episode,
                    steps,
                    total,
                    not terminal,
                    diagnostics.space_names,
                    diagnostics.mean_free_energy,
                    diagnostics.selection_fraction,
                )
            )
            result.rows += 1
            logger.debug("%s seed=%d episode=%d steps=%d reward=%.3f", method, seed, episode, steps, total)

    result.elapsed_sec = round(time.perf_counter() - start, 3)
    return result


def run_world_seed(config: RunConfig, seed: int, out_dir: Path) -> list[JobResult]:
    """One shared world per seed; each method is one agent, reported every ``episode_steps`` ticks."""
    start = time.perf_counter()
    layout = build_environment(config)
    assert isinstance(layout, WorldLayout)
    methods = config.run.methods
    world_rng, agent_seq = _streams(seed)
    world = World.create(layout.config, layout.walls, len(methods), world_rng)
    spaces = cont_spaces(layout.config)
    agents = [
        FetsAgent(
            config.agent.agent_config(method),
            spaces,
            len(ACTION_NAMES),
            FOOD_REWARD - POISON_REWARD,
            stream,
            observation_size=layout.config.observation_size,
        )
        for method, stream in zip(methods, agent_seq.spawn(len(methods)))
    ]
    policies = [lambda obs, agent=agent: agent.act(obs).action for agent in agents]
    results = [JobResult(method, seed, csv_name(method, seed)) for method in methods]

    with ExitStack() as stack:
        writers = [stack.enter_context(RecordWriter(out_dir / r.file, a.space_names)) for r, a in zip(results, agents)]
        for block in range(config.run.episodes):
            for agent in agents:
                agent.start_episode(block)
            totals = np.zeros(len(agents))
            for _ in range(config.run.episode_steps):
                for i, (observation, action, outcome) in enumerate(multi_agent_tick(world, policies, world_rng)):
                    agents[i].observe(observation, action, outcome.reward, outcome.observation, False)
                    totals[i] += outcome.reward
            for i, (method, agent) in enumerate(zip(methods, agents)):
                diagnostics = agent.end_episode(truncated=False)
                writers[i].write(
                    EpisodeRecord(
                        run_id(config, method, seed),
                        seed,
                        block,
                        config.run.episode_steps,
                        float(totals[i]),
                        False,
                        diagnostics.space_names,
                        diagnostics.mean_free_energy,
                        diagnostics.selection_fraction,
                    )
                )
                results[i].rows += 1
            logger.debug("seed=%d block=%d rewards=%s", seed, block, np.round(totals, 3).tolist())

    checkpoints = out_dir / CHECKPOINT_DIR
    for method, agent in zip(methods, agents):
        for space, net in agent.networks().items():
            save_checkpoint(net, checkpoints / f"{method}_seed{seed}_{space}.fqn")

    elapsed = round(time.perf_counter() - start, 3)
    for result in results:
        result.elapsed_sec = elapsed
    return results


def _write_manifest(out_dir: Path, config: RunConfig, summary: RunSummary, status: str, started: float) -> None:
    manifest = {
        "name": config.run.name,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "status": status,
        "environment": config.run.environment,
        "config": SNAPSHOT_NAME,
        "elapsed_sec": round(time.perf_counter() - started, 2),
        "jobs": [asdict(job) for job in sorted(summary.jobs, key=lambda j: (j.seed, j.method))],
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, ensure_ascii=False, indent=2), encoding="utf-8")


def run(config: RunConfig, out_dir: Path, jobs: int = 1) -> RunSummary:
    """Execute every job of ``config``, writing CSVs, a config snapshot and a manifest into ``out_dir``.

    The manifest is written with status ``partial`` first and rewritten as
    ``complete`` only when every job succeeded.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs!r}")
    started = time.perf_counter()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / SNAPSHOT_NAME).write_text(json.dumps(config.snapshot(), indent=2), encoding="utf-8")
    summary = RunSummary(out_dir)
    _write_manifest(out_dir, config, summary, "partial", started)

    continuous = isinstance(build_environment(config), WorldLayout)
    if continuous:
        tasks = [(run_world_seed, (config, seed, out_dir), [(m, seed) for m in config.run.methods]) for seed in config.run.seeds]
    else:
        tasks = [
            (run_discrete_job, (config, method, seed, out_dir), [(method, seed)])
            for seed in config.run.seeds
            for method in config.run.methods
        ]
    summary.expected = sum(len(keys) for _, _, keys in tasks)

    def collect(outcome: JobResult | list[JobResult]) -> None:
        finished = outcome if isinstance(outcome, list) else [outcome]
        for job in finished:
            logger.info("finished %s seed=%d rows=%d in %.1fs", job.method, job.seed, job.rows, job.elapsed_sec)
        summary.jobs.extend(finished)

    def fail(keys: list[tuple[str, int]], error: BaseException) -> None:
        logger.error("job %s failed: %s", keys, error)
        summary.jobs.extend(
            JobResult(method, seed, csv_name(method, seed), status="failed", error=repr(error)) for method, seed in keys
        )

    try:
        if jobs == 1:
            for fn, args, keys in tasks:
                try:
                    collect(fn(*args))
                except Exception as e:
                    fail(keys, e)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures: dict[Future, list[tuple[str, int]]] = {executor.submit(fn, *args): keys for fn, args, keys in tasks}
                for future in as_completed(futures):
                    try:
                        collect(future.result())
                    except Exception as e:
                        fail(futures[future], e)
    finally:
        _write_manifest(out_dir, config, summary, "complete" if summary.complete else "partial", started)
    return summary
