"""Pure-NumPy evaluation kernels (fallback when the compiled core is absent).

A circuit is handed over as a flat gate program: per-gate 4x4 matrices
(single-qubit gates occupy the top-left 2x2 block), qubit indices and the id
of the trainable block each gate belongs to.  Encoding layers RX(scale * x)
are applied between consecutive blocks.  Gate order is circuit order.

Qubit q maps to bit q of the state index; for two-qubit gates ``q0`` is the
more significant bit of the local 4x4 index.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def _apply_1q_last(arr: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to the state index living on the last axis.

    ``mat`` may carry leading batch axes that broadcast against ``arr``'s.
    """
    lead = arr.shape[:-1]
    hi = 1 << (n - 1 - q)
    lo = 1 << q
    v = arr.reshape(lead + (hi, 2, lo))
    m = mat.reshape(mat.shape[:-2] + (1,) * (len(lead) - (mat.ndim - 2)) + (1, 2, 2, 1))
    out = np.empty_like(v)
    out[..., 0, :] = m[..., 0, 0, :] * v[..., 0, :] + m[..., 0, 1, :] * v[..., 1, :]
    out[..., 1, :] = m[..., 1, 0, :] * v[..., 0, :] + m[..., 1, 1, :] * v[..., 1, :]
    return out.reshape(arr.shape)


def _apply_2q_last(arr: np.ndarray, mat: np.ndarray, q0: int, q1: int, n: int) -> np.ndarray:
    """Apply a 4x4 matrix (q0 = more significant local bit) to the last axis."""
    lead = arr.shape[:-1]
    nl = len(lead)
    v = arr.reshape(lead + (2,) * n)
    a0 = nl + (n - 1 - q0)
    a1 = nl + (n - 1 - q1)
    v = np.moveaxis(v, (a0, a1), (-2, -1))
    inter = v.shape[:-2]
    v = v.reshape(inter + (4,))
    if mat.ndim == 2:
        out = v @ mat.T
    else:
        # batched matrices: batch axis is the first of lead
        out = np.einsum("b...c,bdc->b...d", v, mat)
    out = out.reshape(inter + (2, 2))
    out = np.moveaxis(out, (-2, -1), (a0, a1))
    return out.reshape(arr.shape)


def _apply_program(arr, mats, q0, q1, n, sel):
    for g in sel:
        if q1[g] < 0:
            arr = _apply_1q_last(arr, mats[..., g, :2, :2], int(q0[g]), n)
        else:
            arr = _apply_2q_last(arr, mats[..., g, :, :], int(q0[g]), int(q1[g]), n)
    return arr


def _block_transposes(mats, q0, q1, block, n_blocks, n):
    """Per-block transposed unitaries, shape [B, n_blocks owned separately].

    Element [b] has U^T laid out as [state-in, state-out] so that applying a
    block is a plain right-multiplication of row states.
    """
    batch = mats.shape[0]
    dim = 1 << n
    uts = []
    for blk in range(n_blocks):
        sel = np.nonzero(block == blk)[0]
        ut = np.broadcast_to(np.eye(dim, dtype=complex), (batch, dim, dim)).copy()
        ut = _apply_program(ut, mats, q0, q1, n, sel)
        uts.append(ut)
    return uts


def _apply_encoding(states, enc_scales, xs, n):
    """RX(scale * x) on every qubit; ``states`` is [B, K, dim], xs is [K]."""
    for q in range(n):
        half = 0.5 * enc_scales[q] * xs
        c = np.cos(half)[None, :, None, None]
        s = np.sin(half)[None, :, None, None]
        hi = 1 << (n - 1 - q)
        lo = 1 << q
        v = states.reshape(states.shape[:-1] + (hi, 2, lo))
        out = np.empty_like(v)
        out[..., 0, :] = c * v[..., 0, :] - 1j * s * v[..., 1, :]
        out[..., 1, :] = -1j * s * v[..., 0, :] + c * v[..., 1, :]
        states = out.reshape(states.shape)
    return states


def forward_grid_batch(mats, q0, q1, block, n_blocks, n_qubits, enc_scales, xs, obs_diag):
    """Expectation values over an input grid for a batch of gate programs.

    Parameters
    ----------
    mats : complex [B, G, 4, 4]
    q0, q1, block : int32 [G]
        Qubits and owning trainable block per gate; ``q1 = -1`` for
        single-qubit gates.
    enc_scales : float [n_qubits]
    xs : float [K]
    obs_diag : float [2^n_qubits]

    Returns
    -------
    float array [B, K]
    """
    mats = np.asarray(mats, dtype=complex)
    xs = np.asarray(xs, dtype=float)
    uts = _block_transposes(mats, q0, q1, block, n_blocks, n_qubits)
    psi0 = uts[0][:, 0, :]
    states = np.repeat(psi0[:, None, :], xs.shape[0], axis=1)
    for blk in range(1, n_blocks):
        states = _apply_encoding(states, enc_scales, xs, n_qubits)
        states = np.einsum("bkc,bcr->bkr", states, uts[blk])
    probs = states.real**2 + states.imag**2
    return probs @ np.asarray(obs_diag, dtype=float)


def final_states_batch(mats, q0, q1, block, n_blocks, n_qubits, enc_scales, xs):
    """Final state vectors, one input value per programme, shape [B, 2^n]."""
    mats = np.asarray(mats, dtype=complex)
    xs = np.asarray(xs, dtype=float)
    uts = _block_transposes(mats, q0, q1, block, n_blocks, n_qubits)
    states = uts[0][:, 0, :]
    for blk in range(1, n_blocks):
        for q in range(n_qubits):
            half = 0.5 * enc_scales[q] * xs
            c = np.cos(half)[:, None, None]
            s = np.sin(half)[:, None, None]
            hi = 1 << (n_qubits - 1 - q)
            lo = 1 << q
            v = states.reshape(states.shape[:-1] + (hi, 2, lo))
            out = np.empty_like(v)
            out[..., 0, :] = c * v[..., 0, :] - 1j * s * v[..., 1, :]
            out[..., 1, :] = -1j * s * v[..., 0, :] + c * v[..., 1, :]
            states = out.reshape(states.shape)
        states = np.einsum("bc,bcr->br", states, uts[blk])
    return states


def apply_gate(state, gate, q0, q1):
    """Apply a 1- or 2-qubit gate to a single state vector."""
    state = np.asarray(state, dtype=complex)
    gate = np.asarray(gate, dtype=complex)
    n = int(state.shape[0]).bit_length() - 1
    if q1 < 0:
        return _apply_1q_last(state, gate, q0, n)
    return _apply_2q_last(state, gate, q0, q1, n)
