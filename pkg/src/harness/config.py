"""Run configuration: INI sections parsed with configparser, validated with pydantic."""

from __future__ import annotations

import configparser
import os
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from agents import AgentConfig, method_spec
from envs import CombatEnvironment, MazeEnvironment, WorldConfig
from envs.base import Environment
from exceptions import ConfigError
from loaders import CombatLoader, MazeLoader, WorldLayout, WorldLoader

ASSETS_DIR = Path(__file__).resolve().parents[2] / "assets"
SEED_OFFSET_VAR = "FETS_SEED_OFFSET"
ENV_KINDS = ("maze", "combat", "world")

BUILTIN_ENVIRONMENTS: dict[str, tuple[str, Path]] = {
    **{f"maze{i}": ("maze", ASSETS_DIR / "mazes" / f"env{i}.txt") for i in range(1, 9)},
    "maze_theorem": ("maze", ASSETS_DIR / "mazes" / "theorem.txt"),
    "combat1": ("combat", ASSETS_DIR / "combat" / "one_enemy.ini"),
    "combat3": ("combat", ASSETS_DIR / "combat" / "three_enemies.ini"),
    **{f"world{i}": ("world", ASSETS_DIR / "worlds" / f"world{i}.txt") for i in range(1, 5)},
}


def parse_seeds(raw: str) -> list[int]:
    """``"0-14"`` or ``"1, 2, 7"`` (ranges and single seeds may be mixed)."""
    seeds: list[int] = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            first, last = part.split("-", 1)
            low, high = int(first), int(last)
            if high < low:
                raise ValueError(f"empty seed range {part!r}")
            seeds.extend(range(low, high + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("seed list is empty")
    if len(set(seeds)) != len(seeds):
        raise ValueError(f"duplicate seeds in {raw!r}")
    return seeds


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "run"
    environment: str
    methods: list[str] = Field(min_length=1)
    episodes: int = Field(1000, ge=1)
    step_cap: int = Field(1000, ge=1)
    seeds: list[int] = Field(min_length=1)
    output: str = "results"
    episode_steps: int = Field(1000, ge=1)

    @field_validator("methods", mode="before")
    @classmethod
    def _split_methods(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [m.strip() for m in value.split(",") if m.strip()]
        for tag in value:
            method_spec(tag)
        if len(set(value)) != len(value):
            raise ValueError(f"duplicate methods in {value!r}")
        return value

    @field_validator("seeds", mode="before")
    @classmethod
    def _parse_seeds(cls, value: Any) -> Any:
        return parse_seeds(value) if isinstance(value, str) else value

    @field_validator("environment")
    @classmethod
    def _known_environment(cls, value: str) -> str:
        if value in BUILTIN_ENVIRONMENTS:
            return value
        kind, sep, path = value.partition(":")
        if not sep or kind not in ENV_KINDS or not path:
            raise ValueError(f"expected a builtin name or kind:path with kind in {ENV_KINDS}, got {value!r}")
        return value


class AgentSection(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    alpha: float = Field(4.0, gt=0)
    beta: float = Field(7.0, ge=1)
    gamma: float = Field(0.95, ge=0, lt=1)
    epsilon: float = Field(0.1, ge=0, le=1)
    epsilon_decay_episodes: int = Field(0, ge=0)
    epsilon_min: float = Field(0.0, ge=0, le=1)
    eta: float = Field(0.1, gt=0, le=1)
    lam: float = Field(0.8, ge=0, le=1, alias="lambda")
    nu: float = Field(0.05, gt=0, lt=1)
    delta: float = Field(0.05, gt=0, lt=1)
    xi: float = Field(1e-4, gt=0)
    thompson_samples: int = Field(4096, ge=1)
    dropout_passes: int = Field(100, ge=1)
    dropout_rate: float = Field(0.1, ge=0, lt=1)
    main_hidden: int = Field(50, ge=1)
    sub_hidden: int = Field(15, ge=1)
    learning_rate: float = Field(1e-3, gt=0)
    replay_capacity: int = Field(10_000, ge=1)
    batch_size: int = Field(32, ge=1)
    warmup: int = Field(500, ge=0)
    bounds_refresh: Literal["episode", "step"] = "episode"
    shared_replay: bool = False
    dense_state_limit: int = Field(1000, ge=1)

    def agent_config(self, method: str) -> AgentConfig:
        return AgentConfig(method=method, **self.model_dump(by_alias=False))


class EnvironmentSection(BaseModel):
    """Overrides applied on top of the layout file."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    slip: float | None = Field(None, ge=0, le=1)
    hp: int | None = Field(None, ge=1)
    enemy_hp: int | None = Field(None, ge=1)
    damage: int | None = Field(None, ge=1)
    enemy_damage: int | None = Field(None, ge=0)
    theta_e: int | None = Field(None, ge=0)
    attack_range: int | None = Field(None, ge=0, alias="range")
    speed: float | None = Field(None, gt=0)
    eye_count: int | None = Field(None, ge=1)
    eye_range: float | None = Field(None, gt=0)
    fov_degrees: float | None = Field(None, gt=0)
    food: int | None = Field(None, ge=0)
    poison: int | None = Field(None, ge=0)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    run: RunSection
    agent: AgentSection = AgentSection()
    environment: EnvironmentSection = EnvironmentSection()
    base_dir: Path = Path(".")

    def output_dir(self) -> Path:
        out = Path(self.run.output)
        return out if out.is_absolute() else self.base_dir / out

    def snapshot(self) -> dict[str, Any]:
        """JSON-ready copy of every setting, ``base_dir`` excluded."""
        return self.model_dump(mode="json", by_alias=True, exclude={"base_dir"})


def resolve_environment(config: RunConfig) -> tuple[str, Path]:
    """``(kind, layout path)`` for the configured environment."""
    ref = config.run.environment
    if ref in BUILTIN_ENVIRONMENTS:
        return BUILTIN_ENVIRONMENTS[ref]
    kind, _, raw = ref.partition(":")
    path = Path(raw)
    return kind, path if path.is_absolute() else config.base_dir / path


def _overrides(section: EnvironmentSection, names: tuple[str, ...]) -> dict[str, Any]:
    values = section.model_dump(by_alias=False)
    return {name: values[name] for name in names if values[name] is not None}


def build_environment(config: RunConfig) -> Union[Environment, WorldLayout]:
    """A discrete ``Environment`` or, for ``world`` layouts, the continuous ``WorldLayout``."""
    kind, path = resolve_environment(config)
    section = config.environment
    if kind == "maze":
        spec = MazeLoader(path).load()
        return MazeEnvironment(spec) if section.slip is None else MazeEnvironment(spec, slip=section.slip)
    if kind == "combat":
        spec = CombatLoader(path).load()
        overrides = _overrides(section, ("enemy_hp", "damage", "enemy_damage", "theta_e", "attack_range"))
        if section.hp is not None:
            overrides["agent_hp"] = section.hp
        return CombatEnvironment(replace(spec, **overrides))
    layout = WorldLoader(path).load()
    names = tuple(f.name for f in fields(WorldConfig) if f.name in EnvironmentSection.model_fields)
    return replace(layout, config=replace(layout.config, **_overrides(section, names)))


def _problems(error: ValidationError) -> list[tuple[str, str]]:
    return [(".".join(str(part) for part in item["loc"]), item["msg"]) for item in error.errors()]


def seed_offset() -> int:
    raw = os.environ.get(SEED_OFFSET_VAR, "0").strip() or "0"
    try:
        return int(raw)
    except ValueError:
        raise ConfigError([(SEED_OFFSET_VAR, f"expected an integer, got {raw!r}")]) from None


def load_config(path: Path | str, apply_seed_offset: bool = True) -> RunConfig:
    """Parse and validate a run config; problems are reported with ``section.field`` paths.

    Layout files must exist at load time. ``FETS_SEED_OFFSET`` is added to every seed.
    """
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with path.open("r", encoding="utf-8") as file:
            parser.read_file(file)
    except OSError as e:
        raise ConfigError([(str(path), f"cannot read: {e.strerror or e}")]) from e
    except configparser.Error as e:
        raise ConfigError([(str(path), str(e).splitlines()[0])]) from e

    unknown = [s for s in parser.sections() if s not in ("run", "agent", "environment")]
    if unknown:
        raise ConfigError([(s, "unknown section") for s in unknown])
    raw = {section: dict(parser[section]) for section in parser.sections()}
    try:
        config = RunConfig(**raw, base_dir=path.resolve().parent)
    except ValidationError as e:
        raise ConfigError(_problems(e)) from e

    kind, layout = resolve_environment(config)
    if not layout.is_file():
        raise ConfigError([("run.environment", f"{kind} layout {layout} does not exist")])
    if kind == "world" and any(method_spec(m).learner != "TS" for m in config.run.methods):
        raise ConfigError([("run.methods", "continuous worlds need network methods (TS, TS-FE, TS-FETS-B, TS-FETS-FE)")])
    if kind != "world" and any(method_spec(m).learner == "TS" for m in config.run.methods):
        raise ConfigError([("run.methods", "network methods run only in continuous worlds")])

    if apply_seed_offset:
        offset = seed_offset()
        if offset:
            config.run.seeds = [seed + offset for seed in config.run.seeds]
    try:
        build_environment(config)
    except ValueError as e:
        raise ConfigError([("environment", str(e))]) from e
    return config
