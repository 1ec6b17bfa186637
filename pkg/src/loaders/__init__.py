from .base import Loader
from .combat_loader import CombatLoader
from .maze_loader import MazeLoader
from .world_loader import WorldLayout, WorldLoader

__all__ = ["Loader", "CombatLoader", "MazeLoader", "WorldLayout", "WorldLoader"]
