"""Hot evaluation kernels with a compiled core and a NumPy fallback.

The compiled Cython extension is preferred; set ``PULSEQFM_PURE_PYTHON=1``
(or any non-empty value) to force the NumPy implementation.  Both backends
share the same programme layout and produce the same numbers to floating
point accuracy; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_backend

if os.environ.get("PULSEQFM_PURE_PYTHON"):
    _impl = numpy_backend
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = numpy_backend

BACKEND = _impl.NAME


def available_backends():
    """Mapping of backend name to module, for benchmarks and tests."""
    backends = {numpy_backend.NAME: numpy_backend}
    try:
        from . import _core

        backends[_core.NAME] = _core
    except ImportError:
        pass
    return backends


def forward_grid_batch(mats, q0, q1, block, n_blocks, n_qubits, enc_scales, xs, obs_diag):
    return _impl.forward_grid_batch(
        np.ascontiguousarray(mats, dtype=complex),
        q0,
        q1,
        block,
        int(n_blocks),
        int(n_qubits),
        np.ascontiguousarray(enc_scales, dtype=float),
        np.ascontiguousarray(xs, dtype=float),
        np.ascontiguousarray(obs_diag, dtype=float),
    )


def forward_grid(mats, q0, q1, block, n_blocks, n_qubits, enc_scales, xs, obs_diag):
    res = forward_grid_batch(
        np.asarray(mats, dtype=complex)[None], q0, q1, block, n_blocks, n_qubits,
        enc_scales, xs, obs_diag,
    )
    return res[0]


def final_states_batch(mats, q0, q1, block, n_blocks, n_qubits, enc_scales, x):
    """``x`` may be a scalar (shared input) or one value per programme."""
    mats = np.ascontiguousarray(mats, dtype=complex)
    xs = np.asarray(x, dtype=float)
    if xs.ndim == 0:
        xs = np.full(mats.shape[0], float(xs))
    return _impl.final_states_batch(
        mats,
        q0,
        q1,
        block,
        int(n_blocks),
        int(n_qubits),
        np.ascontiguousarray(enc_scales, dtype=float),
        np.ascontiguousarray(xs),
    )


def apply_gate_kernel(state, gate, targets):
    """Gate application used by :func:`pulseqfm.linalg.apply_gate`."""
    if len(targets) == 1:
        return _impl.apply_gate(state, gate, int(targets[0]), -1)
    return _impl.apply_gate(state, gate, int(targets[0]), int(targets[1]))
