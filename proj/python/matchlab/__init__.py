"""Online bipartite matching under random type-graph models."""

from ._core import *  # noqa: F401,F403
from ._core import NumericError, ValidationError

__all__ = [name for name in dir() if not name.startswith("_")]
