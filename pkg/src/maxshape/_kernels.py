"""Kernel backend selection.

The compiled extension is used when it imports; set ``MAXSHAPE_PURE_PYTHON=1``
to force the NumPy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("MAXSHAPE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

segment_distances = _impl.segment_distances
nearest_segment = _impl.nearest_segment
points_in_polygon = _impl.points_in_polygon
disk_lengths = _impl.disk_lengths
plap_energy_grad = _impl.plap_energy_grad


def backends():
    """All importable kernel modules keyed by name (for tests and benchmarks)."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
