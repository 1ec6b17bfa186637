from __future__ import annotations

from envs import MazeSpec

from .base import Loader


class MazeLoader(Loader[MazeSpec]):
    def load(self) -> MazeSpec:
        """Load a maze grid: one row per line, '#' barrier, '.' empty, 'G' goal.

        Comments are not allowed here since '#' is a cell; blank lines are skipped.
        """
        with self.path.open("r", encoding="utf-8") as file:
            rows = tuple(line.strip() for line in file if line.strip())
        try:
            return MazeSpec(rows, name=self.path.stem)
        except ValueError as e:
            raise ValueError(f"{self.path}: {e}") from e
