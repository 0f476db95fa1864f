import numpy as np
import pytest

from pulseqfm import fourier, model as qfm
from pulseqfm.fourier import CoefficientVector
from pulseqfm.model import FourierModel


def test_nyquist_grid_sizes():
    spec = qfm.spectrum_of((1, 3, 9), 1)
    assert fourier.nyquist_grid(spec).size == 27  # 2 * 13 + 1
    spec1 = qfm.spectrum_of((1,), 1)
    grid = fourier.nyquist_grid(spec1)
    np.testing.assert_allclose(grid, [0.0, 2 * np.pi / 3, 4 * np.pi / 3])


def test_nyquist_grid_rejects_non_integer():
    spec = qfm.Spectrum((-1.5, 0.0, 1.5), (1, 2, 1))
    with pytest.raises(ValueError):
        fourier.nyquist_grid(spec)


def test_extract_single_qubit_cosine():
    # f(x) = cos(x): c_{+-1} = 0.5, c_0 = 0
    m = FourierModel(ansatz=qfm.ansatz_by_name("basis_rx", 1), enc_scales=(1,))
    coeffs = fourier.extract_coefficients(m)
    assert coeffs.spectrum.frequencies == (-1, 0, 1)
    np.testing.assert_allclose(coeffs.values, [0.5, 0.0, 0.5], atol=1e-12)


def test_extract_constant_series():
    spec = qfm.spectrum_of((1,), 1)
    values = fourier.coefficients_from_grid(spec, np.full(3, 0.37))
    np.testing.assert_allclose(values, [0.0, 0.37, 0.0], atol=1e-14)


def test_reconstruction_off_grid(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("ry_crz"), mode="pulse"), rng)
    m = qfm.with_params(m, ext=rng.normal(1.0, 0.05, qfm.extension_size(m)))
    coeffs = fourier.extract_coefficients(m)
    xs = rng.uniform(0, 2 * np.pi, size=50)
    np.testing.assert_allclose(
        fourier.synthesize(coeffs, xs), qfm.forward_grid(m, xs), atol=1e-8
    )


def test_hermitian_symmetry(rng):
    for name in ("basis_rx", "rot_crx"):
        m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name(name)), rng)
        assert fourier.hermitian_asymmetry(fourier.extract_coefficients(m)) < 1e-9


def test_c0_is_real(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("rot_cz")), rng)
    coeffs = fourier.extract_coefficients(m)
    zero_idx = coeffs.spectrum.frequencies.index(0)
    assert abs(coeffs.values[zero_idx].imag) < 1e-9


def test_spectrum_confinement_oversampled(rng):
    # 4x oversampling: the DFT bins outside the encoded set carry no energy
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("ry_cx")), rng)
    spec = qfm.spectrum(m)
    xs = fourier.nyquist_grid(spec, oversample=4)
    bins = np.fft.fft(qfm.forward_grid(m, xs)) / xs.size
    freqs = np.fft.fftfreq(xs.size, d=1.0 / xs.size).astype(int)
    outside = [abs(b) for f, b in zip(freqs, bins) if f not in spec.frequencies]
    assert max(outside) < 1e-9


def test_coefficient_mse():
    spec = qfm.spectrum_of((1,), 1)
    a = CoefficientVector(spec, np.array([0.5, 0.0, 0.5]))
    assert fourier.coefficient_mse(a, a) == 0.0
    zero = CoefficientVector(spec, np.zeros(3))
    assert fourier.coefficient_mse(zero, a) == pytest.approx(0.5)
    other = CoefficientVector(qfm.spectrum_of((1,), 2), np.zeros(5))
    with pytest.raises(ValueError):
        fourier.coefficient_mse(a, other)


def test_parseval_identity(rng):
    # grid-averaged squared error equals the coefficient-space distance
    from pulseqfm import training

    for _ in range(10):
        m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("ry_crz")), rng)
        spec = qfm.spectrum(m)
        target = training.generate_target(spec, rng)
        grid_mse = training.mse_loss(m, target)
        coef_mse = fourier.coefficient_mse(
            fourier.extract_coefficients(m), target.coefficients
        )
        assert abs(grid_mse - coef_mse) < 1e-8


def test_monomial_structure_single_parameter(rng):
    # each coefficient of a one-parameter model is a trigonometric
    # polynomial in theta of degree at most the number of occurrences
    m = FourierModel(ansatz=qfm.ansatz_by_name("basis_rx", 1), enc_scales=(1,))
    thetas = np.linspace(0, 2 * np.pi, 17, endpoint=False)
    samples = []
    for theta in thetas:
        m2 = qfm.with_params(m, theta=[theta, theta])
        samples.append(fourier.extract_coefficients(m2).values)
    samples = np.array(samples)
    # the shared parameter enters two rotations (one per block): degree <= 2
    degree = 2
    design = np.column_stack(
        [np.ones_like(thetas)]
        + [f(k * thetas) for k in range(1, degree + 1) for f in (np.cos, np.sin)]
    )
    for col in range(samples.shape[1]):
        coeffs, *_ = np.linalg.lstsq(design, samples[:, col], rcond=None)
        residual = samples[:, col] - design @ coeffs
        assert np.max(np.abs(residual)) < 1e-7


def test_variance_sweep_zero_sigma_matches_baseline():
    m = FourierModel(ansatz=qfm.ansatz_by_name("ry_crz"))
    sweep = fourier.coefficient_variance_sweep(m, [0.0, 0.0], 300, (0, 1), 5e-6)
    # identical sigma2 entries give identical statistics (no distortion draws)
    np.testing.assert_array_equal(sweep.variances[0], sweep.variances[1])
    np.testing.assert_array_equal(sweep.active_counts[0], sweep.active_counts[1])
    assert sweep.active_counts.shape == (2, 2)
    assert np.all(sweep.variances >= 0.0)
    assert np.all(sweep.active_counts <= len(sweep.frequencies))


def test_variance_sweep_activates_composite(rng):
    m = FourierModel(ansatz=qfm.ansatz_by_name("ry_crz"))
    sweep = fourier.coefficient_variance_sweep(m, [0.0, 0.008], 500, (0, 1, 2), 5e-6)
    assert sweep.mean_active()[1] >= sweep.mean_active()[0]


def test_variance_sweep_requires_samples():
    m = FourierModel(ansatz=qfm.ansatz_by_name("basis_rx"))
    with pytest.raises(ValueError):
        fourier.coefficient_variance_sweep(m, [0.0], 1, (0,), 5e-6)
