"""Kernel backend selection.

The compiled extension is preferred; the numpy implementation is the
fallback. Both produce bit-identical results (same entry stream, same
accumulation order), so the choice only affects speed. Set
EASTPLUS_BACKEND=python to force the fallback, =c to require the
extension.
"""

import os

from . import _kernels_np


def _select():
    choice = os.environ.get("EASTPLUS_BACKEND", "auto").lower()
    if choice == "python":
        return _kernels_np
    try:
        from . import _kernels

        return _kernels
    except ImportError:
        if choice == "c":
            raise ImportError(
                "EASTPLUS_BACKEND=c but the compiled kernel extension is not built"
            )
        return _kernels_np


kernels = _select()
BACKEND = kernels.name


def available_backends():
    """All importable kernel modules, compiled one first."""
    out = []
    try:
        from . import _kernels

        out.append(_kernels)
    except ImportError:
        pass
    out.append(_kernels_np)
    return out
