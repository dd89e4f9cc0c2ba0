"""Select the compiled kernels when available.

Set ``ARPLAN_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

import os

from . import _pykernels as pure

compiled = None
if not os.environ.get("ARPLAN_PURE_PYTHON"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

kernels = compiled if compiled is not None else pure
BACKEND = "compiled" if compiled is not None else "python"


def get(name: str | None = None):
    """Return a kernel module by name ("compiled", "python") or the default."""
    if name is None:
        return kernels
    if name == "python":
        return pure
    if name == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
