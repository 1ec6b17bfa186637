from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

BASE_COLUMNS = ("run_id", "seed", "episode", "steps", "acc_reward", "truncated")
ENERGY_PREFIX = "F_"
SELECTION_PREFIX = "sel_"
PARTITION_TOLERANCE = 1e-9


def header(space_names: Iterable[str]) -> list[str]:
    columns = list(BASE_COLUMNS)
    for name in space_names:
        columns += [f"{ENERGY_PREFIX}{name}", f"{SELECTION_PREFIX}{name}"]
    return columns


def space_names_from_header(columns: Iterable[str]) -> tuple[str, ...]:
    return tuple(c[len(ENERGY_PREFIX) :] for c in columns if c.startswith(ENERGY_PREFIX))


@dataclass(frozen=True)
class EpisodeRecord:
    """One row of a run CSV: an episode, or a block of steps in a continuous run."""

    run_id: str
    seed: int
    episode: int
    steps: int
    acc_reward: float
    truncated: bool
    space_names: tuple[str, ...]
    free_energy: tuple[float, ...]
    selection: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps!r}")
        if not len(self.space_names) == len(self.free_energy) == len(self.selection):
            raise ValueError("need one free energy and one selection fraction per space")
        if self.space_names and abs(math.fsum(self.selection) - 1.0) > PARTITION_TOLERANCE:
            raise ValueError(f"selection fractions must sum to 1, got {math.fsum(self.selection)!r}")

    def to_row(self) -> list[str]:
        row = [self.run_id, str(self.seed), str(self.episode), str(self.steps), repr(self.acc_reward), str(int(self.truncated))]
        for energy, fraction in zip(self.free_energy, self.selection):
            row += [repr(energy), repr(fraction)]
        return row

    @classmethod
    def from_row(cls, row: dict[str, str], space_names: tuple[str, ...]) -> EpisodeRecord:
        return cls(
            run_id=row["run_id"],
            seed=int(row["seed"]),
            episode=int(row["episode"]),
            steps=int(row["steps"]),
            acc_reward=float(row["acc_reward"]),
            truncated=row["truncated"] == "1",
            space_names=space_names,
            free_energy=tuple(float(row[f"{ENERGY_PREFIX}{n}"]) for n in space_names),
            selection=tuple(float(row[f"{SELECTION_PREFIX}{n}"]) for n in space_names),
        )


class RecordWriter:
    """Streams records to a CSV, flushing after every row."""

    def __init__(self, path: Path, space_names: tuple[str, ...]) -> None:
        self.path = path
        self.space_names = space_names
        self._file: TextIO | None = None
        self._writer = None

    def __enter__(self) -> RecordWriter:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = self.path.open("w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(header(self.space_names))
        return self

    def write(self, record: EpisodeRecord) -> None:
        if self._writer is None or self._file is None:
            raise RuntimeError("RecordWriter used outside its with-block")
        if record.space_names != self.space_names:
            raise ValueError(f"record spaces {record.space_names} do not match header {self.space_names}")
        self._writer.writerow(record.to_row())
        self._file.flush()

    def __exit__(self, *exc_info: object) -> None:
        if self._file is not None:
            self._file.close()
        self._file = None
        self._writer = None


def read_records(path: Path) -> list[EpisodeRecord]:
    with path.open("r", encoding="utf-8", newline="") as file:
        reader = csv.DictReader(file)
        if reader.fieldnames is None or list(reader.fieldnames[: len(BASE_COLUMNS)]) != list(BASE_COLUMNS):
            raise ValueError(f"{path}: not a run CSV (header {reader.fieldnames})")
        names = space_names_from_header(reader.fieldnames)
        return [EpisodeRecord.from_row(row, names) for row in reader]
