"""Hot-kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set ``ORDEMBED_NO_NATIVE=1`` to force the fallback (used by the benchmark and
the equivalence tests).
"""

import os

from ordembed.kernels import _fallback

try:
    from ordembed.kernels import _native
except ImportError:  # extension not built
    _native = None

if _native is not None and not os.environ.get("ORDEMBED_NO_NATIVE"):
    _impl = _native
    BACKEND = "native"
else:
    _impl = _fallback
    BACKEND = "fallback"

bfs_from_sources = _impl.bfs_from_sources
order_projection_patterns = _impl.order_projection_patterns
hinge_loss_grad = _impl.hinge_loss_grad


def available_backends():
    names = ["fallback"]
    if _native is not None:
        names.insert(0, "native")
    return names


def get_backend(name):
    """Fetch a specific kernel module by name ("native" or "fallback")."""
    if name == "fallback":
        return _fallback
    if name == "native":
        if _native is None:
            raise ValueError("native kernels are not built")
        return _native
    raise ValueError(f"unknown backend {name!r}")
