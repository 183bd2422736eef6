"""Random regular NAE-SAT toolkit (Python bindings)."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__, version

__version__ = version()
