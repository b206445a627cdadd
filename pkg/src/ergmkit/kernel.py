"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ERGMKIT_PURE_PYTHON=1 to force the fallback (used by the benchmark and the
cross-kernel equivalence tests).  Both kernels expose the same three calls and
produce bit-identical results; the compiled one is orders of magnitude faster.
"""

import os

import numpy as np

from . import _pykernel, _termcodes

try:
    from . import _cykernel
except ImportError:  # pragma: no cover - depends on build environment
    _cykernel = None

if _cykernel is not None:
    # Guard against the .pyx and _termcodes.py drifting apart.
    for _name, _code in _cykernel.TERM_CODES.items():
        assert getattr(_termcodes, _name) == _code, f"term code mismatch: {_name}"

if os.environ.get("ERGMKIT_PURE_PYTHON"):
    _impl = _pykernel
else:
    _impl = _cykernel if _cykernel is not None else _pykernel

KERNEL_NAME = _impl.KERNEL_NAME
HAVE_COMPILED = _cykernel is not None


def get_kernel(name=None):
    """Return a kernel module by name ("cython" | "python"); default active."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernel
    if name == "cython":
        if _cykernel is None:
            raise RuntimeError("compiled kernel is not available")
        return _cykernel
    raise ValueError(f"unknown kernel {name!r}")


def change_stats(adj, deg, attr, kinds, params, i, j, out=None, kernel=None):
    impl = get_kernel(kernel)
    if out is None:
        out = np.empty(len(kinds), dtype=np.float64)
    impl.change_stats(adj, deg, attr, kinds, params, i, j, out)
    return out


def all_change_stats(adj, deg, attr, kinds, params, out=None, kernel=None):
    impl = get_kernel(kernel)
    n = adj.shape[0]
    nd = n * (n - 1) // 2
    if out is None:
        out = np.empty((nd, len(kinds)), dtype=np.float64)
    impl.all_change_stats(adj, deg, attr, kinds, params, out)
    return out


def run_chain(
    adj,
    deg,
    edges,
    edge_pos,
    m,
    attr,
    kinds,
    params,
    theta,
    n_proposals,
    tnt,
    rng_state,
    stats,
    kernel=None,
):
    impl = get_kernel(kernel)
    return impl.run_chain(
        adj, deg, edges, edge_pos, m, attr, kinds, params, theta,
        n_proposals, tnt, rng_state, stats,
    )
