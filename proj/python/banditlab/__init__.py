"""Limiting values of finite-horizon bandit utilities.

Thin wrapper over the C++ core; see the class and function docstrings in
`banditlab._banditlab` for the full surface.
"""

from ._banditlab import *  # noqa: F401,F403
from ._banditlab import __version__  # noqa: F401
