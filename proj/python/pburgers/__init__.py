"""Inviscid Burgers dynamics forced by a Poisson point field."""

from ._pburgers import *  # noqa: F401,F403
from ._pburgers import Error, Point

__all__ = [name for name in dir() if not name.startswith("_")]
