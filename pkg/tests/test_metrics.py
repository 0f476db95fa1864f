import numpy as np
import pytest

from pulseqfm import metrics, model as qfm, seeding
from pulseqfm.model import FourierModel


def test_pearson_perfect_linear_dependence(rng):
    a = rng.normal(size=200) + 1j * rng.normal(size=200)
    samples = np.column_stack([a, 2.0 * a])
    absr, degenerate = metrics.complex_pearson(samples)
    assert degenerate.size == 0
    np.testing.assert_allclose(absr, 1.0, atol=1e-12)


def test_pearson_independent_streams(rng):
    a = rng.uniform(size=10_000) + 1j * rng.uniform(size=10_000)
    b = rng.uniform(size=10_000) + 1j * rng.uniform(size=10_000)
    absr, _ = metrics.complex_pearson(np.column_stack([a, b]))
    assert absr[0, 1] < 0.05


def test_pearson_affine_invariance(rng):
    a = rng.normal(size=300) + 1j * rng.normal(size=300)
    b = rng.normal(size=300) + 1j * rng.normal(size=300)
    base, _ = metrics.complex_pearson(np.column_stack([a, b]))
    scaled, _ = metrics.complex_pearson(np.column_stack([(2.0 - 1.5j) * a + 0.7j, b]))
    assert scaled[0, 1] == pytest.approx(base[0, 1], abs=1e-12)
    assert scaled[1, 0] == scaled[0, 1]


def test_pearson_degenerate_stream_flagged(rng):
    a = rng.normal(size=50) + 1j * rng.normal(size=50)
    const = np.full(50, 0.3 + 0.1j)
    absr, degenerate = metrics.complex_pearson(np.column_stack([a, const]))
    assert list(degenerate) == [1]
    assert absr[0, 1] == 0.0 and absr[1, 1] == 0.0


def test_fcc_bounds_and_determinism():
    m = FourierModel(ansatz=qfm.ansatz_by_name("ry_cx"))
    r1 = metrics.fcc(m, 400, seeding.rng_for(0, "fcc-test"))
    r2 = metrics.fcc(m, 400, seeding.rng_for(0, "fcc-test"))
    assert 0.0 <= r1.fcc <= 1.0
    assert r1.fcc == r2.fcc
    assert r1.abs_corr.shape == (27, 27)
    np.testing.assert_allclose(r1.abs_corr, r1.abs_corr.T, atol=1e-12)


def test_fcc_distortion_invariance():
    for name in ("basis_rx", "rot_crx"):
        m = FourierModel(ansatz=qfm.ansatz_by_name(name))
        base = metrics.fcc(m, 1500, seeding.rng_for(1, f"fcc/{name}/0"), sigma2=0.0)
        distorted = metrics.fcc(m, 1500, seeding.rng_for(1, f"fcc/{name}/8"), sigma2=0.008)
        assert abs(base.fcc - distorted.fcc) < 0.1


def test_expressibility_haar_self_consistency(rng):
    states = rng.normal(size=(10_000, 8)) + 1j * rng.normal(size=(10_000, 8))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    fids = np.abs(np.sum(np.conj(states[0::2]) * states[1::2], axis=1)) ** 2
    result = metrics.expressibility_from_fidelities(fids, 75, 8)
    assert result.dkl < 0.05


def test_expressibility_point_mass_is_large():
    result = metrics.expressibility_from_fidelities(np.ones(5000), 75, 8)
    assert result.dkl > 3.0


def test_expressibility_order_invariance(rng):
    fids = rng.beta(1.0, 7.0, size=4000)
    a = metrics.expressibility_from_fidelities(fids, 75, 8)
    b = metrics.expressibility_from_fidelities(fids[::-1], 75, 8)
    assert a.dkl == b.dkl


def test_expressibility_model_and_invariance():
    m = FourierModel(ansatz=qfm.ansatz_by_name("ry_crz"))
    base = metrics.expressibility(m, 2000, 75, seeding.rng_for(2, "ex/0"), sigma2=0.0)
    distorted = metrics.expressibility(m, 2000, 75, seeding.rng_for(2, "ex/8"), sigma2=0.008)
    assert base.dkl >= 0.0
    assert abs(base.dkl - distorted.dkl) < 0.1
    assert base.histogram.sum() == pytest.approx(1.0)


def test_entangling_layers_lower_dkl():
    # trend check: the entangling library ansatz covers state space better
    # than a single-axis rotation layer
    bare = FourierModel(
        ansatz=qfm.Ansatz("rx_only", (("RX", (0,)), ("RX", (1,)), ("RX", (2,))), 3)
    )
    entangling = FourierModel(ansatz=qfm.ansatz_by_name("rot_crx"))
    d_bare = metrics.expressibility(bare, 2000, 75, seeding.rng_for(3, "bare")).dkl
    d_ent = metrics.expressibility(entangling, 2000, 75, seeding.rng_for(3, "ent")).dkl
    assert d_ent < d_bare


def test_fidelity_sweep_endpoints_and_trend():
    m = FourierModel(ansatz=qfm.ansatz_by_name("ry_crz"))
    grid = np.linspace(0.0, 0.008, 8)
    rows = metrics.fidelity_distortion_sweep(m, grid, 250, seeding.rng_for(4, "fid"))
    assert rows[0].fidelity_mean == 1.0
    assert rows[0].trace_mean == 0.0
    # pointwise pure-state identity between the two reported distances
    for row in rows:
        assert row.trace_mean >= 0.0
    ses = [2.0 * (r.fidelity_std / np.sqrt(r.n_samples)) for r in rows]
    for prev, cur, se in zip(rows, rows[1:], ses[1:]):
        assert cur.fidelity_mean <= prev.fidelity_mean + 2 * se
        assert cur.trace_mean >= prev.trace_mean - 2 * se
