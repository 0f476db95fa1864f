import numpy as np
import pytest

from pulseqfm import fourier, model as qfm, seeding, training
from pulseqfm.model import FourierModel
from pulseqfm.training import TrainConfig


def test_generate_target_properties(rng):
    spec = qfm.spectrum_of((1, 3, 9), 1)
    target = training.generate_target(spec, rng)
    # Hermitian by construction: synthesised values are real
    synth = np.exp(1j * np.outer(target.grid, spec.frequencies)) @ target.coefficients.values
    assert np.max(np.abs(synth.imag)) < 1e-12
    np.testing.assert_allclose(synth.real, target.values, atol=1e-12)
    assert np.all(np.abs(target.coefficients.values) <= 1.0 + 1e-12)
    zero_idx = spec.frequencies.index(0)
    assert target.coefficients.values[zero_idx].imag == 0.0


def test_target_disk_moments(rng):
    spec = qfm.spectrum_of((1,), 1)
    mags = []
    for _ in range(20000):
        target = training.generate_target(spec, rng)
        mags.append(abs(target.coefficients.values[-1]) ** 2)
    assert np.mean(mags) == pytest.approx(0.5, rel=0.02)


def test_mse_loss_cases(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("basis_rx")), rng)
    target = training.target_from_model(m)
    assert training.mse_loss(m, target) < 1e-20
    spec = qfm.spectrum(m)
    random_target = training.generate_target(spec, rng)
    zero_model = FourierModel(
        ansatz=qfm.ansatz_by_name("basis_rx"),
        theta=np.concatenate([[np.pi / 2], np.zeros(5)]),
    )
    # forward of that model is not identically zero, so just check the
    # analytic formula for a zero predictor directly
    expected = float(np.mean(random_target.values**2))
    zero_pred = training.TargetSeries(
        fourier.CoefficientVector(spec, np.zeros(len(spec))),
        random_target.grid,
        np.zeros_like(random_target.values),
    )
    diff = np.mean((zero_pred.values - random_target.values) ** 2)
    assert diff == pytest.approx(expected)


def test_gradient_matches_finite_differences(rng):
    for mode in qfm.MODES:
        m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("ry_cx"), mode=mode), rng)
        if mode != "gate":
            m = qfm.with_params(m, ext=rng.normal(1.0, 0.1, qfm.extension_size(m)))
        target = training.generate_target(qfm.spectrum(m), rng)
        _, dtheta, dext = training.loss_and_gradient(m, target)
        eps = 1e-5
        for i in range(qfm.theta_size(m)):
            tp, tm = m.theta.copy(), m.theta.copy()
            tp[i] += eps
            tm[i] -= eps
            fd = (
                training.mse_loss(qfm.with_params(m, theta=tp), target)
                - training.mse_loss(qfm.with_params(m, theta=tm), target)
            ) / (2 * eps)
            assert abs(fd - dtheta[i]) < 1e-6
        if dext is None:
            continue
        ext = qfm.extension(m)
        for i in range(0, dext.size, 7):
            ep, em = ext.copy(), ext.copy()
            ep[i] += eps
            em[i] -= eps
            fd = (
                training.mse_loss(qfm.with_params(m, ext=ep), target)
                - training.mse_loss(qfm.with_params(m, ext=em), target)
            ) / (2 * eps)
            assert abs(fd - dext[i]) < 1e-6


def test_zero_frequency_target_trains_out(rng):
    # rot_cz can reach a constant series (basis_rx pins c_0 to zero, so a
    # "sufficient model" is needed here)
    spec = qfm.spectrum(FourierModel(ansatz=qfm.ansatz_by_name("rot_cz")))
    values = np.zeros(len(spec), dtype=complex)
    values[spec.frequencies.index(0)] = 0.4
    coeffs = fourier.CoefficientVector(spec, values)
    grid = fourier.nyquist_grid(spec)
    target = training.TargetSeries(coeffs, grid, fourier.synthesize(coeffs, grid))
    config = TrainConfig(ansatz_name="rot_cz", mode="gate", seeds=(3,), steps=500)
    record = training.train(config, target)
    assert record.mse[0, -1] < 1e-4


def test_frozen_extension_reproduces_gate_trajectory(rng):
    base = qfm.ansatz_by_name("ry_crz")
    target = training.generate_target(
        qfm.spectrum(FourierModel(ansatz=base)), np.random.default_rng(11)
    )
    gate_cfg = TrainConfig(ansatz_name="ry_crz", mode="gate", seeds=(1,), steps=40)
    frozen_cfg = TrainConfig(
        ansatz_name="ry_crz", mode="pulse", seeds=(1,), steps=40, freeze_extensions=True
    )
    gate_rec = training.train(gate_cfg, target)
    frozen_rec = training.train(frozen_cfg, target)
    np.testing.assert_allclose(frozen_rec.mse, gate_rec.mse, atol=1e-10)
    np.testing.assert_allclose(frozen_rec.final_theta[0], gate_rec.final_theta[0], atol=1e-10)


def test_training_deterministic(rng):
    target = training.generate_target(
        qfm.spectrum(FourierModel(ansatz=qfm.ansatz_by_name("ry_cx"))),
        np.random.default_rng(5),
    )
    config = TrainConfig(ansatz_name="ry_cx", mode="pulse", seeds=(0, 1), steps=25)
    rec1 = training.train(config, target)
    rec2 = training.train(config, target)
    assert np.array_equal(rec1.mse, rec2.mse)
    for a, b in zip(rec1.final_theta, rec2.final_theta):
        assert np.array_equal(a, b)


def test_loss_nonnegative_and_parseval_throughout(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("basis_rx")), rng)
    target = training.generate_target(qfm.spectrum(m), rng)
    losses, final = training.train_single(m, target, steps=30)
    assert np.all(losses >= 0.0)
    grid_mse = training.mse_loss(final, target)
    coef_mse = fourier.coefficient_mse(fourier.extract_coefficients(final), target.coefficients)
    assert abs(grid_mse - coef_mse) < 1e-8


def test_comparison_targets_shared_between_modes():
    seeds = (0,)
    result = training.run_comparison(
        ["basis_rx"], seeds, steps=5, rank_reports=False
    )
    # both extended modes start from the same loss as gate mode: identical
    # target and identical theta initialisation per seed
    first = {mode: result.records[("basis_rx", mode)][0, 0] for mode in qfm.MODES}
    assert first["gate"] == first["decomposed"] == first["pulse"]


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(ansatz_name="basis_rx", steps=0)
    with pytest.raises(ValueError):
        TrainConfig(ansatz_name="basis_rx", learning_rate=-0.1)
    with pytest.raises(ValueError):
        TrainConfig(ansatz_name="basis_rx", mode="analog")


def test_divergence_reported():
    m = FourierModel(ansatz=qfm.ansatz_by_name("basis_rx"))
    target = training.target_from_model(m)
    bad = qfm.with_params(m, theta=np.full(qfm.theta_size(m), np.nan))
    with pytest.raises(training.TrainingDiverged) as err:
        training.train_single(bad, target, steps=3)
    assert err.value.step == 0
