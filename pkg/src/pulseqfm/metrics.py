"""Global ansatz diagnostics: coefficient correlations, expressibility and
the gate-versus-pulse state distortion sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fourier, model as qfm, pulses
from .model import FourierModel

#: coefficients of a bounded series satisfy |c| <= 1, so stream variances at
#: or below double-precision noise (~1e-32) mark structurally suppressed
#: coefficients; correlations of that roundoff noise are meaningless
_DEGENERATE_VAR_FLOOR = 1e-24


@dataclass(frozen=True, eq=False)
class FccResult:
    """Pairwise coefficient correlation magnitudes and their average."""

    frequencies: tuple
    abs_corr: np.ndarray
    fcc: float
    degenerate: tuple  # frequencies whose coefficient never varies


def complex_pearson(samples: np.ndarray):
    """|r| matrix of the Hermitian Pearson correlation between columns.

    ``samples`` is [draws, streams] complex.  Zero-variance streams have no
    defined correlation; their rows and columns are set to 0 and their
    indices returned separately.
    """
    centered = samples - samples.mean(axis=0)
    gram = centered.T @ np.conj(centered)
    power = np.real(np.diag(gram)).copy()
    degenerate = np.nonzero(power <= _DEGENERATE_VAR_FLOOR * samples.shape[0])[0]
    power[degenerate] = 1.0
    denom = np.sqrt(np.outer(power, power))
    absr = np.abs(gram) / denom
    absr[degenerate, :] = 0.0
    absr[:, degenerate] = 0.0
    return absr, degenerate


def fcc(
    base_model: FourierModel,
    n_param_samples: int,
    rng: np.random.Generator,
    sigma2: float = 0.0,
) -> FccResult:
    """Mean |Pearson| over all ordered frequency pairs.

    Parameters are sampled uniformly on [0, 2pi); with ``sigma2 > 0`` every
    rotation leaf additionally receives a unit-mean normal pulse scaling.
    The average runs over all |Omega|^2 ordered pairs so the result stays
    in [0, 1].
    """
    if n_param_samples < 3:
        raise ValueError("need at least three parameter samples")
    work = _distorted_view(base_model, sigma2)
    thetas = rng.uniform(0.0, 2.0 * math.pi, size=(n_param_samples, qfm.theta_size(work)))
    exts = _draw_extensions(work, rng, sigma2, n_param_samples)
    coeffs = fourier.extract_batch(work, thetas, exts)
    absr, degenerate = complex_pearson(coeffs)
    spec = qfm.spectrum(work)
    return FccResult(
        frequencies=spec.frequencies,
        abs_corr=absr,
        fcc=float(absr.mean()),
        degenerate=tuple(spec.frequencies[i] for i in degenerate),
    )


def _distorted_view(base_model: FourierModel, sigma2: float) -> FourierModel:
    if sigma2 > 0.0 and base_model.mode == "gate":
        return FourierModel(
            ansatz=base_model.ansatz,
            n_blocks=base_model.n_blocks,
            mode="pulse",
            enc_scales=base_model.enc_scales,
            observable_qubit=base_model.observable_qubit,
        )
    return base_model


def _draw_extensions(model: FourierModel, rng, sigma2: float, count: int):
    n_ext = qfm.extension_size(model)
    if model.mode == "gate" or n_ext == 0:
        return None
    draws = pulses.sample_lambda_distortion(rng, sigma2, count * n_ext)
    return draws.reshape(count, n_ext)


# ---------------------------------------------------------------------------
# Expressibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExpressibilityResult:
    histogram: np.ndarray  # normalised fidelity-bin probabilities
    bin_edges: np.ndarray
    dkl: float


def haar_bin_masses(n_bins: int, dim: int) -> np.ndarray:
    """Haar fidelity probability per uniform bin on [0, 1].

    The Haar density (N-1)(1-F)^(N-2) integrates on [a, b] to
    (1-a)^(N-1) - (1-b)^(N-1).
    """
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    upper = (1.0 - edges) ** (dim - 1)
    return upper[:-1] - upper[1:]


def expressibility_from_fidelities(
    fidelities: np.ndarray, n_bins: int, dim: int, smoothing: float = 1e-9
) -> ExpressibilityResult:
    """KL divergence of a fidelity sample against the Haar distribution."""
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(np.clip(fidelities, 0.0, 1.0), bins=edges)
    p = counts.astype(float) + smoothing
    p /= p.sum()
    q = haar_bin_masses(n_bins, dim)
    dkl = float(np.sum(p * np.log(p / q)))
    return ExpressibilityResult(histogram=p, bin_edges=edges, dkl=dkl)


def expressibility(
    base_model: FourierModel,
    n_pairs: int,
    n_bins: int,
    rng: np.random.Generator,
    sigma2: float = 0.0,
    x=None,
) -> ExpressibilityResult:
    """Haar-likeness of the family's output states.

    Samples ``n_pairs`` independent parameter pairs, computes their state
    fidelities and compares the histogram against the analytic Haar
    distribution.  Zero means exactly Haar distributed.  Inputs are sampled
    uniformly per state by default (pinning x instead can trap special
    ansaetze on artificial submanifolds, e.g. all-real circuits at x = 0);
    pass a number to fix the input value.
    """
    if n_pairs < 100:
        raise ValueError("need at least 100 fidelity pairs")
    work = _distorted_view(base_model, sigma2)
    count = 2 * n_pairs
    thetas = rng.uniform(0.0, 2.0 * math.pi, size=(count, qfm.theta_size(work)))
    exts = _draw_extensions(work, rng, sigma2, count)
    xs = rng.uniform(0.0, 2.0 * math.pi, size=count) if x is None else float(x)
    states = qfm.final_states_many(work, thetas, exts, xs)
    overlaps = np.sum(np.conj(states[0::2]) * states[1::2], axis=1)
    fids = np.abs(overlaps) ** 2
    dim = 2**work.ansatz.n_qubits
    return expressibility_from_fidelities(fids, n_bins, dim)


# ---------------------------------------------------------------------------
# Fidelity / trace-distance distortion sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistortionRow:
    sigma2: float
    fidelity_mean: float
    fidelity_std: float
    trace_mean: float
    trace_std: float
    n_samples: int


def fidelity_distortion_sweep(
    base_model: FourierModel,
    sigma2_grid,
    n_samples: int,
    rng: np.random.Generator,
) -> list[DistortionRow]:
    """Mean state distortion between nominal and pulse-distorted circuits.

    For each variance: random (theta, x) draws, one unit-mean scaling per
    rotation leaf, and the fidelity / trace distance between the final
    states of the nominal and the distorted realisation of the same
    circuit.  At zero variance both states coincide exactly.
    """
    work = _distorted_view(base_model, 1.0)  # pulse view regardless of sigma2
    n_theta = qfm.theta_size(work)
    n_ext = qfm.extension_size(work)
    rows = []
    for sigma2 in sigma2_grid:
        sigma2 = float(sigma2)
        thetas = rng.uniform(0.0, 2.0 * math.pi, size=(n_samples, n_theta))
        xs = rng.uniform(0.0, 2.0 * math.pi, size=n_samples)
        lams = pulses.sample_lambda_distortion(rng, sigma2, n_samples * n_ext).reshape(
            n_samples, n_ext
        )
        # one batch holding the nominal and the distorted circuit per draw
        pair_thetas = np.repeat(thetas, 2, axis=0)
        pair_exts = np.empty((2 * n_samples, n_ext))
        pair_exts[0::2] = 1.0
        pair_exts[1::2] = lams
        states = qfm.final_states_many(work, pair_thetas, pair_exts, np.repeat(xs, 2))
        overlaps = np.sum(np.conj(states[0::2]) * states[1::2], axis=1)
        fids = np.abs(overlaps) ** 2
        # undistorted circuits give bitwise identical states: exact values
        identical = np.all(states[0::2] == states[1::2], axis=1)
        fids[identical] = 1.0
        traces = np.sqrt(np.maximum(0.0, 1.0 - fids))
        rows.append(
            DistortionRow(
                sigma2=sigma2,
                fidelity_mean=float(fids.mean()),
                fidelity_std=float(fids.std()),
                trace_mean=float(traces.mean()),
                trace_std=float(traces.std()),
                n_samples=int(n_samples),
            )
        )
    return rows
