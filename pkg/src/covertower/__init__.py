"""Tower of figure-8 graph covers and finite-depth checks of its dynamics."""
from ._kernels import BACKEND
from .tower import Tower, TowerConfig, VertexRef, build_tower
from .walks import SymWalk

__all__ = ["BACKEND", "SymWalk", "Tower", "TowerConfig", "VertexRef", "build_tower"]
