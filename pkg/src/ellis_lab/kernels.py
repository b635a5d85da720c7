"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting ``ELLIS_LAB_PURE=1``
forces the pure-Python reference implementation.
"""
from __future__ import annotations

import os

from ellis_lab import _pykernels as pure

if os.environ.get("ELLIS_LAB_PURE") == "1":
    impl = pure
    BACKEND = "python"
else:
    try:
        from ellis_lab import _kernels as impl
    except ImportError:
        impl = pure
        BACKEND = "python"
    else:
        BACKEND = "cython"

transformation_closure = impl.transformation_closure
compose_table = impl.compose_table
first_occurrence = impl.first_occurrence
min_translates = impl.min_translates
ro_join = impl.ro_join
ro_meet = impl.ro_meet
ro_complement = impl.ro_complement
ro_law_sweep = impl.ro_law_sweep
LAWS = pure.LAWS
