"""Backend selection for the hot SC kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy fallback. Set ``WOMPOLAR_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

__all__ = ["BACKEND", "available_backends", "get_backend", "encode_pass", "genie_pass", "genie_stats"]


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
_compiled = _load_compiled()
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str) -> ModuleType:
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})") from None


_requested = os.environ.get("WOMPOLAR_BACKEND", "").strip().lower()
if _requested:
    get_backend(_requested)
    BACKEND = _requested
else:
    BACKEND = "cython" if "cython" in _BACKENDS else "python"

_impl = _BACKENDS[BACKEND]
encode_pass = _impl.encode_pass
genie_pass = _impl.genie_pass
genie_stats = _impl.genie_stats
