from pathlib import Path

import pytest

from harness import EpisodeRecord, RecordWriter

SMALL_AGENT = {"thompson_samples": "64"}


def _ini(sections: dict[str, dict[str, str]]) -> str:
    lines = []
    for name, values in sections.items():
        lines.append(f"[{name}]")
        lines += [f"{key} = {value}" for key, value in values.items()]
        lines.append("")
    return "\n".join(lines)


@pytest.fixture
def write_config(tmp_path):
    """Write an INI run config into ``tmp_path``; ``run`` keys override a small maze run."""

    def write(run=None, agent=None, environment=None, name="run.ini", extra=""):
        sections = {
            "run": {
                "name": "test",
                "environment": "maze_theorem",
                "methods": "MF, MB-FETS-FE",
                "episodes": "4",
                "step_cap": "30",
                "seeds": "0-1",
                **(run or {}),
            },
            "agent": {**SMALL_AGENT, **(agent or {})},
        }
        if environment:
            sections["environment"] = environment
        path = tmp_path / name
        path.write_text(_ini(sections) + extra, encoding="utf-8")
        return path

    return write


@pytest.fixture
def write_run():
    """Write ``{method}_seed{seed}.csv`` files from per-seed reward lists."""

    def write(run_dir: Path, method: str, rewards_by_seed: dict[int, list[float]], spaces=("main",)):
        run_dir.mkdir(parents=True, exist_ok=True)
        selection = tuple(1.0 if i == 0 else 0.0 for i in range(len(spaces)))
        for seed, rewards in rewards_by_seed.items():
            with RecordWriter(run_dir / f"{method}_seed{seed}.csv", tuple(spaces)) as writer:
                for episode, reward in enumerate(rewards):
                    writer.write(
                        EpisodeRecord(
                            f"t-{method}-s{seed}",
                            seed,
                            episode,
                            10,
                            float(reward),
                            False,
                            tuple(spaces),
                            tuple(float(i + 1) for i in range(len(spaces))),
                            selection,
                        )
                    )
        return run_dir

    return write
