"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set DERANGE_KERNEL=pure to force the fallback (used by the benchmark and the
backend-agreement tests).
"""

import os

from . import pure

if os.environ.get("DERANGE_KERNEL", "").lower() == "pure":
    _impl = pure
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
point_dtype = _impl.point_dtype
perm_closure = _impl.perm_closure
subgroup_closure = _impl.subgroup_closure
fixed_counts = _impl.fixed_counts
cycle_info = _impl.cycle_info
table_closure = _impl.table_closure
