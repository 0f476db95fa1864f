"""Dense complex linear algebra on few-qubit state vectors.

Conventions used throughout the package:

* qubit 0 maps to the least-significant bit of the amplitude index, so
  ``X`` on qubit 0 sends ``|000>`` to ``|001>``;
* for a k-qubit gate matrix the first entry of ``target_qubits`` maps to the
  most significant bit of the local ``2^k`` index (a controlled gate written
  as ``diag(I, U)`` therefore has its control listed first);
* everything is dense and limited to at most ``MAX_QUBITS`` qubits.
"""

from __future__ import annotations

import math

import numpy as np

from .kernels import apply_gate_kernel

MAX_QUBITS = 5

#: Relative singular-value cutoff for real ranks: far above the noise floor
#: of shift-rule/finite-difference Jacobians, far below generic singular
#: values of trigonometric coefficient maps.
DEFAULT_RANK_RTOL = 1e-8


def zero_state(n_qubits: int) -> np.ndarray:
    """|0...0> on ``n_qubits`` qubits."""
    _check_n_qubits(n_qubits)
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def n_qubits_of(state: np.ndarray) -> int:
    n = int(round(math.log2(state.shape[0])))
    if 2**n != state.shape[0]:
        raise ValueError(f"state length {state.shape[0]} is not a power of two")
    return n


def _check_n_qubits(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n}")


def apply_gate(state: np.ndarray, gate: np.ndarray, target_qubits) -> np.ndarray:
    """Apply a 1- or 2-qubit gate to a state vector.

    Parameters
    ----------
    state : np.ndarray
        Complex amplitudes of length ``2^n``.
    gate : np.ndarray
        ``2^k x 2^k`` unitary with ``k = len(target_qubits)``.
    target_qubits : sequence of int
        Distinct qubit indices; the first one maps to the most significant
        bit of the gate's local index.

    Returns
    -------
    np.ndarray
        The new state vector; the input is not modified.
    """
    state = np.asarray(state, dtype=complex)
    gate = np.asarray(gate, dtype=complex)
    targets = tuple(int(q) for q in target_qubits)
    n = n_qubits_of(state)
    _check_n_qubits(n)
    k = len(targets)
    if gate.shape != (2**k, 2**k):
        raise ValueError(
            f"gate shape {gate.shape} does not match {k} target qubit(s)"
        )
    if len(set(targets)) != k:
        raise ValueError(f"repeated target qubits in {targets}")
    for q in targets:
        if not 0 <= q < n:
            raise ValueError(f"target qubit {q} out of range for {n} qubits")
    if k not in (1, 2):
        raise ValueError("only 1- and 2-qubit gates are supported")
    return apply_gate_kernel(state, gate, targets)


def embed_gate(gate: np.ndarray, target_qubits, n_qubits: int) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of a gate acting on the given qubits.

    Built index-by-index from the bit mapping; used as the explicit
    Kronecker-product oracle for ``apply_gate``.
    """
    gate = np.asarray(gate, dtype=complex)
    targets = tuple(int(q) for q in target_qubits)
    k = len(targets)
    dim = 2**n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        # local index: targets[0] is the most significant bit
        loc = 0
        for q in targets:
            loc = (loc << 1) | ((idx >> q) & 1)
        base = idx
        for q in targets:
            base &= ~(1 << q)
        for loc_out in range(2**k):
            amp = gate[loc_out, loc]
            if amp == 0.0:
                continue
            row = base
            for pos, q in enumerate(targets):
                if (loc_out >> (k - 1 - pos)) & 1:
                    row |= 1 << q
            out[row, idx] += amp
    return out


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Squared overlap |<a|b>|^2 of two normalised pure states."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance between two pure states.

    For pure states the general ``0.5 * ||rho_a - rho_b||_1`` reduces to
    ``sqrt(1 - F)``; the dense density-matrix evaluation is kept in the test
    suite as an oracle.
    """
    f = fidelity(a, b)
    return math.sqrt(max(0.0, 1.0 - f))


def real_rank(matrix: np.ndarray, rtol: float = DEFAULT_RANK_RTOL) -> int:
    """Number of singular values above ``rtol`` times the largest one.

    The zero matrix has rank 0; non-finite entries raise.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0
    if not np.all(np.isfinite(matrix)):
        raise ValueError("matrix contains non-finite entries")
    svals = np.linalg.svd(matrix, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.count_nonzero(svals > rtol * svals[0]))


def norm_error(state: np.ndarray) -> float:
    """|<psi|psi> - 1|, used by the unitarity invariants."""
    return abs(float(np.vdot(state, state).real) - 1.0)


def is_unitary(mat: np.ndarray, tol: float = 1e-10) -> bool:
    mat = np.asarray(mat, dtype=complex)
    eye = np.eye(mat.shape[0], dtype=complex)
    return bool(np.max(np.abs(mat.conj().T @ mat - eye)) < tol)


def max_abs_diff_up_to_phase(u: np.ndarray, v: np.ndarray) -> float:
    """Entrywise distance between matrices after aligning a global phase.

    The phase is fixed by the Hilbert-Schmidt overlap, which is the
    least-squares optimal alignment.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    overlap = np.vdot(v, u)
    if abs(overlap) < 1e-14:
        return float(np.max(np.abs(u - v)))
    phase = overlap / abs(overlap)
    return float(np.max(np.abs(u - phase * v)))
