import numpy as np
import pytest

from pulseqfm import gates, linalg

from conftest import random_state


X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_apply_identity_returns_same_state(rng):
    psi = random_state(rng, 3)
    out = linalg.apply_gate(psi, np.eye(2), (1,))
    np.testing.assert_allclose(out, psi)


def test_apply_x_on_qubit0_flips_lsb():
    psi = linalg.zero_state(3)
    out = linalg.apply_gate(psi, X, (0,))
    expected = np.zeros(8, dtype=complex)
    expected[1] = 1.0  # |001> under the LSB convention
    np.testing.assert_allclose(out, expected)


def test_cz_squared_is_identity(rng):
    # oracle: the full 8x8 matrix product really is the identity
    cz_full = linalg.embed_gate(gates.gate_unitary("CZ"), (0, 1), 3)
    np.testing.assert_allclose(cz_full @ cz_full, np.eye(8), atol=1e-14)
    psi = random_state(rng, 3)
    out = linalg.apply_gate(linalg.apply_gate(psi, gates.gate_unitary("CZ"), (0, 1)), gates.gate_unitary("CZ"), (0, 1))
    assert np.max(np.abs(out - psi)) < 1e-12


@pytest.mark.parametrize("targets", [(0,), (2,), (0, 1), (2, 0), (1, 2)])
def test_apply_gate_matches_embedded_matrix(rng, targets):
    psi = random_state(rng, 3)
    if len(targets) == 1:
        gate = gates.gate_unitary("RY", (0.7,))
    else:
        gate = gates.gate_unitary("CRX", (1.3,))
    expected = linalg.embed_gate(gate, targets, 3) @ psi
    out = linalg.apply_gate(psi, gate, targets)
    assert np.max(np.abs(out - expected)) < 1e-12


def test_norm_preserved_over_gate_sequence(rng):
    psi = random_state(rng, 3)
    for _ in range(60):
        kind = rng.choice(["RX", "RY", "RZ", "CZ", "CRX", "H"])
        spec = gates.gate_spec(kind)
        angles = tuple(rng.uniform(0, 2 * np.pi, size=spec.n_angles))
        if spec.arity == 1:
            targets = (int(rng.integers(3)),)
        else:
            a = int(rng.integers(3))
            targets = (a, (a + 1) % 3)
        psi = linalg.apply_gate(psi, gates.gate_unitary(kind, angles), targets)
    assert linalg.norm_error(psi) < 1e-10


def test_apply_gate_errors():
    psi = linalg.zero_state(2)
    with pytest.raises(ValueError):
        linalg.apply_gate(psi, np.eye(2), (0, 1))  # arity mismatch
    with pytest.raises(ValueError):
        linalg.apply_gate(psi, np.eye(4), (0, 0))  # repeated target
    with pytest.raises(ValueError):
        linalg.apply_gate(psi, np.eye(2), (5,))  # out of range


def test_fidelity_basics(rng):
    psi = random_state(rng, 2)
    assert linalg.fidelity(psi, psi) == pytest.approx(1.0)
    zero = np.array([1, 0], dtype=complex)
    one = np.array([0, 1], dtype=complex)
    assert linalg.fidelity(zero, one) == 0.0
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    assert linalg.fidelity(zero, plus) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        linalg.fidelity(zero, linalg.zero_state(2))


def test_fidelity_symmetry(rng):
    a = random_state(rng, 3)
    b = random_state(rng, 3)
    assert linalg.fidelity(a, b) == linalg.fidelity(b, a)


def _trace_distance_density_oracle(a, b):
    rho = np.outer(a, a.conj()) - np.outer(b, b.conj())
    eigs = np.linalg.eigvalsh(rho)
    return 0.5 * np.sum(np.abs(eigs))


def test_trace_distance_against_density_matrix_oracle(rng):
    zero = np.array([1, 0], dtype=complex)
    one = np.array([0, 1], dtype=complex)
    assert linalg.trace_distance(zero, zero) == 0.0
    assert linalg.trace_distance(zero, one) == pytest.approx(1.0)
    for _ in range(10):
        a = random_state(rng, 3)
        b = random_state(rng, 3)
        assert linalg.trace_distance(a, b) == pytest.approx(
            _trace_distance_density_oracle(a, b), abs=1e-10
        )


def test_trace_distance_fidelity_identity(rng):
    for _ in range(10):
        a = random_state(rng, 2)
        b = random_state(rng, 2)
        assert linalg.trace_distance(a, b) ** 2 + linalg.fidelity(a, b) == pytest.approx(
            1.0, abs=1e-10
        )


def test_real_rank():
    assert linalg.real_rank(np.zeros((3, 4))) == 0
    assert linalg.real_rank(np.eye(5)) == 5
    # proportional rows: second singular value is exactly zero
    assert linalg.real_rank(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1
    with pytest.raises(ValueError):
        linalg.real_rank(np.array([[np.nan, 1.0]]))


def test_real_rank_invariances(rng):
    mat = rng.normal(size=(6, 4)) @ rng.normal(size=(4, 8))  # rank 4
    assert linalg.real_rank(mat) == 4
    perm = rng.permutation(6)
    assert linalg.real_rank(mat[perm]) == 4
    assert linalg.real_rank(-3.7 * mat) == 4


def test_max_qubits_enforced():
    with pytest.raises(ValueError):
        linalg.zero_state(6)
