"""Select the compiled kernels when available, the numpy fallback otherwise.

Set AEROSHM_PURE_PYTHON=1 to force the fallback (used by the kernel
benchmark and the parity tests).
"""

import os

if os.environ.get("AEROSHM_PURE_PYTHON"):
    from aeroshm import _fallback as _impl
else:
    try:
        from aeroshm import _speedups as _impl
    except ImportError:
        from aeroshm import _fallback as _impl

BACKEND = _impl.BACKEND
rk4_lti = _impl.rk4_lti
smo_solve = _impl.smo_solve
