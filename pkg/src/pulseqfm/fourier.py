"""Fourier coefficient extraction and coefficient-space statistics.

The model output is bandlimited to the encoded frequency set, so sampling
on the Nyquist grid of N = 2*omega_max + 1 equispaced points makes the DFT
coefficients exact.  The coefficient-space squared distance then equals the
input-space mean squared error (Parseval).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model as qfm
from . import pulses, seeding
from .model import FourierModel, Spectrum


def nyquist_grid(spectrum: Spectrum, oversample: int = 1) -> np.ndarray:
    """Equispaced sampling grid on [0, 2pi) resolving the spectrum.

    ``oversample`` multiplies the number of points (used by the leakage
    checks); the default is the exact Nyquist count 2*omega_max + 1.
    """
    for w in spectrum.frequencies:
        if abs(w - round(w)) > 1e-9:
            raise ValueError(f"non-integer frequency {w} has no Nyquist grid")
    n_points = (2 * int(spectrum.omega_max) + 1) * int(oversample)
    return 2.0 * math.pi * np.arange(n_points) / n_points


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Complex Fourier coefficients aligned with ``spectrum.frequencies``."""

    spectrum: Spectrum
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.spectrum),):
            raise ValueError("one coefficient per frequency is required")
        object.__setattr__(self, "values", values)


def coefficients_from_grid(spectrum: Spectrum, grid_values: np.ndarray) -> np.ndarray:
    """DFT coefficients c_w = (1/N) sum_k f(x_k) exp(-i w x_k).

    ``grid_values`` may be batched along leading axes; the sampling grid must
    be the exact Nyquist grid of ``spectrum``.
    """
    grid_values = np.asarray(grid_values, dtype=float)
    n_points = grid_values.shape[-1]
    bins = np.fft.fft(grid_values, axis=-1) / n_points
    freqs = np.mod(spectrum.frequencies, n_points)
    return bins[..., freqs]


def extract_coefficients(model: FourierModel) -> CoefficientVector:
    """Coefficient vector of the model's output series."""
    spec = qfm.spectrum(model)
    xs = nyquist_grid(spec)
    values = coefficients_from_grid(spec, qfm.forward_grid(model, xs))
    return CoefficientVector(spec, values)


def synthesize(coeffs: CoefficientVector, xs) -> np.ndarray:
    """Real-valued series sum_w c_w exp(i w x) on arbitrary inputs."""
    xs = np.asarray(xs, dtype=float)
    freqs = np.asarray(coeffs.spectrum.frequencies, dtype=float)
    phases = np.exp(1j * np.outer(xs, freqs))
    return (phases @ coeffs.values).real


def coefficient_mse(c: CoefficientVector, target: CoefficientVector) -> float:
    """Coefficient-space squared distance sum_w |c_w - c*_w|^2."""
    if c.spectrum.frequencies != target.spectrum.frequencies:
        raise ValueError("coefficient vectors live on different spectra")
    return float(np.sum(np.abs(c.values - target.values) ** 2))


def hermitian_asymmetry(coeffs: CoefficientVector) -> float:
    """max_w |c_{-w} - conj(c_w)|; must stay tiny for real outputs."""
    freqs = list(coeffs.spectrum.frequencies)
    err = 0.0
    for i, w in enumerate(freqs):
        j = freqs.index(-w)
        err = max(err, abs(coeffs.values[j] - np.conj(coeffs.values[i])))
    return float(err)


def extract_batch(model: FourierModel, thetas, exts=None) -> np.ndarray:
    """Coefficient vectors [B, |spectrum|] for a batch of parameter draws."""
    spec = qfm.spectrum(model)
    xs = nyquist_grid(spec)
    values = qfm.forward_grid_many(model, thetas, exts, xs)
    return coefficients_from_grid(spec, values)


# ---------------------------------------------------------------------------
# Coefficient-variance sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VarianceSweep:
    """Per-frequency coefficient variances over a distortion-variance grid.

    ``variances`` has shape [n_sigma2, n_seeds, n_freq]; ``active_counts``
    counts frequencies with variance above the threshold, [n_sigma2,
    n_seeds].
    """

    ansatz_name: str
    sigma2_grid: tuple
    frequencies: tuple
    tau: float
    variances: np.ndarray
    active_counts: np.ndarray

    def mean_variance(self) -> np.ndarray:
        return self.variances.mean(axis=1)

    def mean_active(self) -> np.ndarray:
        return self.active_counts.mean(axis=1)

    def std_active(self) -> np.ndarray:
        return self.active_counts.std(axis=1)


def complex_variance(samples: np.ndarray) -> np.ndarray:
    """Total variance E|c|^2 - |Ec|^2 along axis 0 (basis independent)."""
    mean = samples.mean(axis=0)
    return (np.abs(samples) ** 2).mean(axis=0) - np.abs(mean) ** 2


def coefficient_variance_sweep(
    base_model: FourierModel,
    sigma2_grid,
    n_param_samples: int,
    seeds,
    tau: float,
    master_seed: int = 0,
) -> VarianceSweep:
    """Coefficient variances under random parameters and pulse distortion.

    For every (sigma2, seed): draw ``n_param_samples`` theta vectors uniform
    on [0, 2pi), one unit-mean normal scaling per rotation leaf with
    variance sigma2, extract all coefficient vectors and take per-frequency
    total variances.  Counts of variances above ``tau`` are reported per
    seed so the caller can average and spread them.
    """
    if n_param_samples < 2:
        raise ValueError("variance needs at least two parameter samples")
    work = base_model if base_model.mode == "pulse" else FourierModel(
        ansatz=base_model.ansatz,
        n_blocks=base_model.n_blocks,
        mode="pulse",
        enc_scales=base_model.enc_scales,
        observable_qubit=base_model.observable_qubit,
    )
    spec = qfm.spectrum(work)
    n_theta = qfm.theta_size(work)
    n_ext = qfm.extension_size(work)
    sigma2_grid = tuple(float(s) for s in sigma2_grid)
    seeds = tuple(int(s) for s in seeds)
    variances = np.empty((len(sigma2_grid), len(seeds), len(spec)))
    counts = np.empty((len(sigma2_grid), len(seeds)))
    for i, sigma2 in enumerate(sigma2_grid):
        for j, seed in enumerate(seeds):
            label = f"variance-sweep/{work.ansatz.name}/seed={seed}/sigma2={sigma2!r}"
            rng = seeding.rng_for(master_seed, label)
            thetas = rng.uniform(0.0, 2.0 * math.pi, size=(n_param_samples, n_theta))
            lams = pulses.sample_lambda_distortion(
                rng, sigma2, n_param_samples * max(n_ext, 1)
            ).reshape(n_param_samples, max(n_ext, 1))[:, :n_ext]
            coeff = extract_batch(work, thetas, lams)
            var = complex_variance(coeff)
            variances[i, j] = var
            counts[i, j] = int(np.count_nonzero(var > tau))
    return VarianceSweep(
        ansatz_name=base_model.ansatz.name,
        sigma2_grid=sigma2_grid,
        frequencies=spec.frequencies,
        tau=float(tau),
        variances=variances,
        active_counts=counts,
    )
