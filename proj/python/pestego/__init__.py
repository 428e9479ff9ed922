"""PE header-slack payload hiding and patchwork-style statistical embedding."""

from ._pestego import *  # noqa: F401,F403
from ._pestego import PestegoError  # noqa: F401

__version__ = "0.1.0"
