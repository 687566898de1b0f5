"""Kernel backend selection.

``RELAXSHOCK_NUMBA=0`` forces the pure-numpy kernels; otherwise the numba
kernels are used when numba imports. ``RELAXSHOCK_THREADS`` caps the numba
worker count.
"""
import logging
import os

from . import kernels_numpy

log = logging.getLogger(__name__)

_OFF = ("0", "false", "no", "off")


def _load_numba():
    try:
        import numba

        from . import kernels_numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        log.warning("numba unavailable, using numpy kernels")
        return None
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old; pick a layer that always exists
        numba.config.THREADING_LAYER = "workqueue"
    threads = os.environ.get("RELAXSHOCK_THREADS")
    if threads:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    return kernels_numba


def get_kernels(name=None):
    """Return the kernel module for ``name`` in {"numba", "numpy"} or the env default."""
    if name is None:
        name = "numpy" if os.environ.get("RELAXSHOCK_NUMBA", "1").lower() in _OFF else "numba"
    if name == "numpy":
        return kernels_numpy
    if name == "numba":
        mod = _load_numba()
        return mod if mod is not None else kernels_numpy
    raise ValueError(f"unknown backend {name!r}")
