"""Kernel backend selection.

The compiled ``_core`` extension is used when importable; set
``MWFASRANK_PURE_PYTHON=1`` to force the pure-Python kernels.
"""

import os
from types import ModuleType

from . import _pycore

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

BACKENDS: dict[str, ModuleType] = {"python": _pycore}
if _core is not None:
    BACKENDS["compiled"] = _core

if os.environ.get("MWFASRANK_PURE_PYTHON") or _core is None:
    DEFAULT = "python"
else:
    DEFAULT = "compiled"


def get_backend(name: str | None = None) -> ModuleType:
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {sorted(BACKENDS)})") from None
