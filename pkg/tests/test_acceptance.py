"""Desk-scale learning experiments; directional claims, not magnitudes."""

import numpy as np
import pytest

from agents import AgentConfig, FetsAgent
from envs import MazeEnvironment, greedy_policy, optimal_q
from harness import compare_runs, load_config, load_runs, run
from harness.config import BUILTIN_ENVIRONMENTS
from loaders import MazeLoader

pytestmark = pytest.mark.slow


def theorem_maze():
    _, path = BUILTIN_ENVIRONMENTS["maze_theorem"]
    return MazeEnvironment(MazeLoader(path).load())


@pytest.mark.parametrize("seed", range(5))
def test_convergence_maze_settles_on_main_space(seed):
    env = theorem_maze()
    config = AgentConfig(method="MB-FETS-FE", alpha=4.0, beta=7.0, epsilon=0.1, xi=1e-4)
    agent = FetsAgent(config, env.spaces(), env.action_count, env.reward_span, seed)
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[0])

    late_main = []
    for episode in range(1000):
        agent.start_episode(episode)
        state, terminal = env.reset(rng), False
        for _ in range(1000):
            decision = agent.act(state)
            next_state, reward, terminal = env.step(state, decision.action, rng)
            agent.observe(state, decision.action, reward, next_state, terminal)
            state = next_state
            if terminal:
                break
        diagnostics = agent.end_episode(truncated=not terminal)
        if episode >= 900:
            late_main.append(diagnostics.selection_fraction[0])

    assert np.mean(late_main) > 0.95

    spec = env.spec
    expected = greedy_policy(spec, optimal_q(spec, config.gamma))
    main = agent.models[0]
    learned = {s: int(np.argmax(main.learner.action_values(main.project(s)))) for s in spec.start_cells}
    assert learned == expected


def test_fets_learns_faster_early(write_config, tmp_path):
    config = load_config(
        write_config(
            run={
                "environment": "maze1",
                "methods": "MB, MB-FETS-FE, MF, MF-FETS-FE",
                "episodes": "50",
                "step_cap": "1000",
                "seeds": "0-14",
            },
            agent={"alpha": "4", "beta": "7", "epsilon": "0.1", "thompson_samples": "1024"},
        )
    )
    out = tmp_path / "maze1"
    assert run(config, out, jobs=4).complete
    for baseline in ("MB", "MF"):
        result = compare_runs(f"{out}:{baseline}-FETS-FE", f"{out}:{baseline}", window="0:50")
        assert result.seeds == 15
        assert result.p_value < 0.05, baseline


@pytest.mark.parametrize("environment, informative", [("maze7", "X"), ("maze8", "Y")])
def test_informative_subspace_is_selected(write_config, tmp_path, environment, informative):
    config = load_config(
        write_config(
            run={
                "environment": environment,
                "methods": "MB-FETS-FE",
                "episodes": "1000",
                "step_cap": "1000",
                "seeds": "0-4",
            },
            agent={"alpha": "4", "beta": "7"},
        )
    )
    out = tmp_path / environment
    assert run(config, out, jobs=4).complete
    frame = load_runs([out])

    middle = frame[(frame["episode"] >= 200) & (frame["episode"] < 1000)]
    wins = (middle[f"sel_{informative}"] > middle["sel_main"]).mean()
    assert wins >= 0.7

    late = frame[frame["episode"] >= 900]
    energies = late[[c for c in late.columns if c.startswith("F_")]].mean()
    assert energies.idxmin() == f"F_{informative}"


def test_continuous_world_smoke(write_config, tmp_path):
    config = load_config(
        write_config(
            run={
                "environment": "world1",
                "methods": "TS, TS-FE, TS-FETS-B, TS-FETS-FE",
                "episodes": "20",
                "episode_steps": "1000",
                "seeds": "0-2",
            },
            agent={
                "alpha": "3",
                "beta": "3",
                "dropout_rate": "0.1",
                "main_hidden": "50",
                "sub_hidden": "15",
            },
        )
    )
    out = tmp_path / "world1"
    assert run(config, out).complete
    frame = load_runs([out])

    selection = frame[[c for c in frame.columns if c.startswith("sel_")]].sum(axis=1, skipna=True)
    np.testing.assert_allclose(selection, 1.0, atol=1e-9)
    assert (frame["steps"] == 1000).all()

    final = frame[frame["episode"] >= 15].groupby(["method", "seed"])["acc_reward"].mean()
    ahead = sum(final[("TS-FETS-FE", seed)] >= final[("TS", seed)] for seed in range(3))
    assert ahead >= 2
