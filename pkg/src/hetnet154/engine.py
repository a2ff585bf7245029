"""Simulation kernel selection.

The hot per-lane event loop exists twice: a compiled Cython extension
(hetnet154._lanesim) and a pure-Python fallback (hetnet154._lanesim_py)
with identical semantics.  Import picks the compiled one when present;
HETNET_ENGINE=py|c forces a choice (useful for the benchmark and for
cross-checking the two).
"""

import os

from . import _lanesim_py
from .errors import ConfigError


def load_backend(name: str | None = None):
    """Return the kernel module for `name` (default: env, then auto)."""
    name = name or os.environ.get("HETNET_ENGINE", "auto")
    name = name.lower()
    if name in ("py", "python"):
        return _lanesim_py
    if name in ("c", "compiled", "cython"):
        try:
            from . import _lanesim
        except ImportError:
            raise ConfigError(
                "compiled kernel requested but hetnet154._lanesim is not built")
        return _lanesim
    if name != "auto":
        raise ConfigError(f"unknown engine {name!r}; use auto, c or py")
    try:
        from . import _lanesim
        return _lanesim
    except ImportError:
        return _lanesim_py


def available_backends() -> list:
    names = []
    try:
        from . import _lanesim  # noqa: F401
        names.append("c")
    except ImportError:
        pass
    names.append("py")
    return names
