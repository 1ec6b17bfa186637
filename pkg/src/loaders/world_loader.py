from __future__ import annotations

from dataclasses import dataclass, replace

from envs import WorldConfig

from .base import Loader


@dataclass(frozen=True)
class WorldLayout:
    name: str
    config: WorldConfig
    walls: tuple[tuple[float, float, float, float], ...]


class WorldLoader(Loader[WorldLayout]):
    def load(self) -> WorldLayout:
        """Load 'bounds w h', 'items food N poison M' and 'wall x1 y1 x2 y2' lines."""
        config = WorldConfig()
        walls: list[tuple[float, float, float, float]] = []

        for line_no, line in self._lines():
            keyword, *fields = line.split()
            try:
                if keyword == "bounds" and len(fields) == 2:
                    config = replace(config, width=float(fields[0]), height=float(fields[1]))
                elif keyword == "items" and len(fields) == 4 and fields[0] == "food" and fields[2] == "poison":
                    config = replace(config, food=int(fields[1]), poison=int(fields[3]))
                elif keyword == "wall" and len(fields) == 4:
                    x1, y1, x2, y2 = (float(v) for v in fields)
                    walls.append((x1, y1, x2, y2))
                else:
                    raise ValueError(f"unrecognised line {line!r}")
            except ValueError as e:
                raise ValueError(f"{self.path}:{line_no}: {e}") from e

        for wall in walls:
            if not all(0 <= wall[i] <= (config.width if i % 2 == 0 else config.height) for i in range(4)):
                raise ValueError(f"{self.path}: wall {wall} leaves the {config.width}x{config.height} bounds")
        return WorldLayout(self.path.stem, config, tuple(walls))
