"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy ``_fallback``. Set ``POISONBENCH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

TIE_EPS = _fallback.TIE_EPS

_compiled = None
if not os.environ.get("POISONBENCH_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _fallback


def backends():
    """Available kernel modules keyed by name."""
    out = {"python": _fallback}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def best_split(X, y, w, rows, features, n_classes):
    return _impl.best_split(X, y, w, rows, features, n_classes)


def apply_tree(X, feature, threshold, left, right):
    return _impl.apply_tree(X, feature, threshold, left, right)


class using:
    """Context manager that temporarily routes kernel calls to one backend."""

    def __init__(self, name):
        self.module = backends()[name]

    def __enter__(self):
        global _impl
        self._saved, _impl = _impl, self.module
        return self.module

    def __exit__(self, *exc):
        global _impl
        _impl = self._saved
