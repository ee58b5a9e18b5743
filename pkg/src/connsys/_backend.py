"""Select the compiled kernels when available, else the pure-Python twins.

Set ``CONNSYS_PURE=1`` to force the fallback.
"""

import os

if os.environ.get("CONNSYS_PURE", "") not in ("", "0"):
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND
