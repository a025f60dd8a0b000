"""Possibilistic inference: conditioning, axiom checks, and tree propagation.

Thin re-export of the compiled core.  The native module carries the full
surface; this package exists so ``import poscop`` works from a build tree or
an installed wheel alike.
"""

from ._poscop import *  # noqa: F401,F403
from ._poscop import __version__  # noqa: F401
