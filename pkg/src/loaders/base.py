from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

T = TypeVar("T")


class Loader(ABC, Generic[T]):
    """Reads one layout file into the spec object its environment is built from."""

    def __init__(self, path: Path | str) -> None:
        self.path = Path(path)

    @abstractmethod
    def load(self) -> T:
        raise NotImplementedError

    def _lines(self) -> list[tuple[int, str]]:
        """Non-blank lines with their 1-based numbers, ``#`` comments removed."""
        lines = []
        with self.path.open("r", encoding="utf-8") as file:
            for line_no, raw_line in enumerate(file, start=1):
                line = raw_line.split("#", 1)[0].strip()
                if line:
                    lines.append((line_no, line))
        return lines
