from __future__ import annotations

import configparser

from envs import CombatSpec

from .base import Loader

SECTION = "combat"


def _pair(raw: str) -> tuple[int, int]:
    parts = [p.strip() for p in raw.replace("x", ",").split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two integers, got {raw!r}")
    return int(parts[0]), int(parts[1])


class CombatLoader(Loader[CombatSpec]):
    def load(self) -> CombatSpec:
        """Load a ``[combat]`` block: grid, start, enemies ('x,y; x,y'), hp, damage, theta_e, range."""
        parser = configparser.ConfigParser()
        with self.path.open("r", encoding="utf-8") as file:
            parser.read_file(file)
        if not parser.has_section(SECTION):
            raise ValueError(f"{self.path}: missing [{SECTION}] section")
        block = parser[SECTION]

        try:
            width, height = _pair(block.get("grid", "16x16"))
            enemies = tuple(_pair(item) for item in block["enemies"].split(";") if item.strip())
            hp = block.getint("hp", 100)
            damage = block.getint("damage", 25)
            return CombatSpec(
                enemies=enemies,
                width=width,
                height=height,
                start=_pair(block.get("start", "0,0")),
                agent_hp=hp,
                enemy_hp=block.getint("enemy_hp", hp),
                damage=damage,
                enemy_damage=block.getint("enemy_damage", damage),
                theta_e=block.getint("theta_e", 3),
                attack_range=block.getint("range", 2),
                name=self.path.stem,
            )
        except (KeyError, ValueError) as e:
            raise ValueError(f"{self.path}: {e}") from e
