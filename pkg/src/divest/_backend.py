"""Pick the compiled core when importable, else the numpy fallback."""
import os

from . import _fallback

BACKEND = "numpy"
kde_sum = _fallback.kde_sum

if os.environ.get("DIVEST_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core
    except ImportError:
        pass
    else:
        kde_sum = _core.kde_sum
        BACKEND = "compiled"
