"""Self-attention particle dynamics on the sphere.

Thin wrapper over the compiled core: flows, energy landscape diagnostics,
separation certificates, scalar comparison oracles, and the renormalized
staircase dynamics.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
