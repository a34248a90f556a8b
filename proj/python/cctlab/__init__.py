"""Channel cycle time: simulate MAC protocols and measure short-term fairness."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
