"""Neural-network-guided particle swarm optimization on dynamic landscapes.

The heavy lifting lives in the compiled extension; this package re-exports
its public names.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
