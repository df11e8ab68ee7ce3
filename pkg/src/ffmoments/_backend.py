"""Kernel backend selection.

The compiled extension is preferred when built; the numpy fallback keeps the
package fully functional without a toolchain.  Set FFMOMENTS_KERNELS=py (or
=c) to force a backend, e.g. for the benchmark comparing the two.
"""

from __future__ import annotations

import os

_choice = os.environ.get("FFMOMENTS_KERNELS", "auto").lower()

if _choice in ("c", "compiled"):
    from ffmoments import _ckernels as _impl

    BACKEND = "compiled"
elif _choice in ("py", "python"):
    from ffmoments import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from ffmoments import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from ffmoments import _pykernels as _impl  # type: ignore[no-redef]

        BACKEND = "python"

irreducible_indices = _impl.irreducible_indices
scale_mod_many = _impl.scale_mod_many
