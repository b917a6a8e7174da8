"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting
``ACTIVECLOAK_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from activecloak import _pykernels

if os.environ.get("ACTIVECLOAK_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from activecloak import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

jy_table = _impl.jy_table
multipole_sum = _impl.multipole_sum
hankel_asymptotic = _pykernels.hankel_asymptotic
