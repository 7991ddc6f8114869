"""Track-before-detect PHD filtering on amplitude frames."""

from tbdphd._core import *  # noqa: F401,F403
from tbdphd._core import __version__  # noqa: F401
