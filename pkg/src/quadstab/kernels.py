"""Grid kernels with a compiled core and a pure numpy fallback.

The compiled extension is used when it imports, unless the environment
variable ``QUADSTAB_PURE_PYTHON`` is set to ``1``. ``BACKEND`` names the
implementation in use.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("QUADSTAB_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _vec(a):
    return np.ascontiguousarray(np.atleast_1d(np.asarray(a, dtype=float)))


def two_mode_max_re(deltas, Omega, kappas):
    """Largest real part of the two-mode spectrum on a ``(delta, |kappa|)`` grid."""
    return _impl.two_mode_max_re(_vec(deltas), float(Omega), _vec(kappas))


def three_mode_max_re(Delta1, Delta2, Omega, k1, k2):
    """Largest real part of the three-mode spectrum on a ``(|kappa1|, |kappa2|)`` grid."""
    return _impl.three_mode_max_re(float(Delta1), float(Delta2), float(Omega), _vec(k1), _vec(k2))
