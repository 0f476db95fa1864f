"""Fourier-series targets, the MSE loss and the Adam training experiment.

Targets are drawn on the model's own frequency set with coefficients from
the unit disk, so the loss is exactly the squared coefficient-space distance
and a perfect fit is representable whenever the coefficient map is onto.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fourier, model as qfm, seeding
from .fourier import CoefficientVector
from .model import FourierModel, Spectrum


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; carries the offending step index."""

    def __init__(self, step: int):
        super().__init__(f"training diverged at step {step}")
        self.step = step


@dataclass(frozen=True, eq=False)
class TargetSeries:
    """Target coefficients with their Nyquist-grid samples."""

    coefficients: CoefficientVector
    grid: np.ndarray
    values: np.ndarray


def generate_target(spectrum: Spectrum, rng: np.random.Generator) -> TargetSeries:
    """Random Hermitian coefficient vector, each |c_w| <= 1.

    Positive frequencies are uniform on the closed unit disk (radius
    sqrt(u), uniform angle), negative ones their conjugates and c_0 is real
    uniform on [-1, 1].
    """
    freqs = spectrum.frequencies
    values = np.zeros(len(freqs), dtype=complex)
    by_freq = {w: i for i, w in enumerate(freqs)}
    for w in freqs:
        if w < 0:
            continue
        if w == 0:
            values[by_freq[w]] = rng.uniform(-1.0, 1.0)
            continue
        radius = math.sqrt(rng.uniform(0.0, 1.0))
        angle = rng.uniform(0.0, 2.0 * math.pi)
        c = radius * np.exp(1j * angle)
        values[by_freq[w]] = c
        values[by_freq[-w]] = np.conj(c)
    coeffs = CoefficientVector(spectrum, values)
    grid = fourier.nyquist_grid(spectrum)
    return TargetSeries(coeffs, grid, fourier.synthesize(coeffs, grid))


def target_from_model(model: FourierModel) -> TargetSeries:
    """Target generated by the model itself (zero-residual fixture)."""
    coeffs = fourier.extract_coefficients(model)
    grid = fourier.nyquist_grid(coeffs.spectrum)
    return TargetSeries(coeffs, grid, fourier.synthesize(coeffs, grid))


def mse_loss(model: FourierModel, target: TargetSeries) -> float:
    """Mean squared error over the Nyquist grid.

    Equals the coefficient-space distance sum_w |c_w - c*_w|^2 to floating
    point accuracy (Parseval; checked in the test suite).
    """
    values = qfm.forward_grid(model, target.grid)
    return float(np.mean((values - target.values) ** 2))


def loss_and_gradient(model: FourierModel, target: TargetSeries):
    """Loss plus its exact shift-rule gradient w.r.t. the trainable set."""
    f0, dfdang, act = qfm.grid_with_leaf_shifts(model, target.grid)
    residual = f0 - target.values
    loss = float(np.mean(residual**2))
    dldang = (2.0 / residual.size) * (dfdang @ residual)
    dtheta, dext = qfm.chain_to_parameters(model, dldang, act)
    return loss, dtheta, dext


@dataclass(frozen=True)
class TrainConfig:
    ansatz_name: str
    mode: str = "gate"
    seeds: tuple = (0,)
    steps: int = 500
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    n_qubits: int = 3
    n_blocks: int = 2
    master_seed: int = 0
    freeze_extensions: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.learning_rate <= 0.0:
            raise ValueError("learning rate must be positive")
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("Adam betas must lie in (0, 1)")
        if self.mode not in qfm.MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True, eq=False)
class TrainRecord:
    """Loss trace and final parameters, one row of ``mse`` per seed.

    ``mse[s, t]`` is the loss before step t, with the converged loss
    appended at index ``steps``.
    """

    config: TrainConfig
    seeds: tuple
    mse: np.ndarray
    final_theta: tuple
    final_ext: tuple


class AdamState:
    """Plain Adam with bias correction."""

    def __init__(self, size: int, lr: float, beta1: float, beta2: float, eps: float):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def update(self, params: np.ndarray, grad: np.ndarray, lr=None) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad**2
        mhat = self.m / (1.0 - self.beta1**self.t)
        vhat = self.v / (1.0 - self.beta2**self.t)
        step = (self.lr if lr is None else lr) * mhat / (np.sqrt(vhat) + self.eps)
        return params - step


def _base_model(config: TrainConfig) -> FourierModel:
    ansatz = qfm.ansatz_by_name(config.ansatz_name, config.n_qubits)
    return FourierModel(ansatz=ansatz, n_blocks=config.n_blocks, mode=config.mode)


def _split(model: FourierModel, packed: np.ndarray, trainable_ext: bool) -> FourierModel:
    n_theta = qfm.theta_size(model)
    if trainable_ext:
        return qfm.with_params(model, theta=packed[:n_theta], ext=packed[n_theta:])
    return qfm.with_params(model, theta=packed[:n_theta])


def train_single(
    model: FourierModel,
    target: TargetSeries,
    steps: int,
    learning_rate: float = 0.05,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    freeze_extensions: bool = False,
):
    """Adam on one model instance; returns (per-step losses, final model)."""
    trainable_ext = model.mode != "gate" and not freeze_extensions
    packed = np.array(model.theta, dtype=float)
    if trainable_ext:
        packed = np.concatenate([packed, qfm.extension(model)])
    adam = AdamState(packed.size, learning_rate, beta1, beta2, eps)
    losses = np.empty(steps + 1)
    current = _split(model, packed, trainable_ext)
    for step in range(steps):
        loss, dtheta, dext = loss_and_gradient(current, target)
        if not math.isfinite(loss):
            raise TrainingDiverged(step)
        losses[step] = loss
        grad = dtheta if not trainable_ext else np.concatenate([dtheta, dext])
        packed = adam.update(packed, grad)
        current = _split(current, packed, trainable_ext)
    final = mse_loss(current, target)
    if not math.isfinite(final):
        raise TrainingDiverged(steps)
    losses[steps] = final
    return losses, current


def train(config: TrainConfig, target: TargetSeries) -> TrainRecord:
    """Seeded Adam runs of one (ansatz, mode) against a fixed target."""
    base = _base_model(config)
    mse = np.empty((len(config.seeds), config.steps + 1))
    thetas = []
    exts = []
    for row, seed in enumerate(config.seeds):
        label = f"train/{config.ansatz_name}/seed={seed}/theta0"
        init = qfm.initialised(base, seeding.rng_for(config.master_seed, label))
        losses, final = train_single(
            init,
            target,
            config.steps,
            config.learning_rate,
            config.beta1,
            config.beta2,
            config.eps,
            config.freeze_extensions,
        )
        mse[row] = losses
        thetas.append(final.theta)
        exts.append(qfm.extension(final))
    return TrainRecord(config, tuple(config.seeds), mse, tuple(thetas), tuple(exts))


@dataclass(frozen=True, eq=False)
class ComparisonRow:
    ansatz_name: str
    mode: str
    seed: int
    final_mse: float


@dataclass(frozen=True, eq=False)
class ComparisonResult:
    """Per-(ansatz, mode, seed) final losses plus initial-point ranks."""

    rows: tuple
    ranks: tuple  # (ansatz, seed, rank_theta, rank_ext, rank_gain)
    records: dict  # (ansatz, mode) -> np.ndarray [n_seeds, steps + 1]

    def final_mse(self, ansatz_name: str, mode: str) -> np.ndarray:
        return np.array(
            [r.final_mse for r in self.rows if r.ansatz_name == ansatz_name and r.mode == mode]
        )

    def median_final(self, ansatz_name: str, mode: str) -> float:
        return float(np.median(self.final_mse(ansatz_name, mode)))


def run_comparison(
    ansatz_names,
    seeds,
    steps: int = 500,
    learning_rate: float = 0.05,
    n_qubits: int = 3,
    n_blocks: int = 2,
    master_seed: int = 0,
    modes=qfm.MODES,
    rank_reports: bool = True,
) -> ComparisonResult:
    """Gate vs decomposed vs pulse training with shared per-seed targets."""
    from . import tangent  # local import; tangent builds on the trainer

    rows = []
    ranks = []
    records = {}
    for name in ansatz_names:
        ansatz = qfm.ansatz_by_name(name, n_qubits)
        spec = qfm.spectrum(FourierModel(ansatz=ansatz, n_blocks=n_blocks))
        for seed in seeds:
            target = generate_target(
                spec, seeding.rng_for(master_seed, f"target/{name}/seed={seed}")
            )
            for mode in modes:
                config = TrainConfig(
                    ansatz_name=name,
                    mode=mode,
                    seeds=(seed,),
                    steps=steps,
                    learning_rate=learning_rate,
                    n_qubits=n_qubits,
                    n_blocks=n_blocks,
                    master_seed=master_seed,
                )
                record = train(config, target)
                key = (name, mode)
                records.setdefault(key, []).append(record.mse[0])
                rows.append(ComparisonRow(name, mode, seed, float(record.mse[0, -1])))
            if rank_reports:
                label = f"train/{name}/seed={seed}/theta0"
                probe = FourierModel(ansatz=ansatz, n_blocks=n_blocks, mode="pulse")
                probe = qfm.initialised(probe, seeding.rng_for(master_seed, label))
                report = tangent.rank_report(probe)
                ranks.append((name, seed, report.rank_theta, report.rank_ext, report.rank_gain))
    records = {k: np.stack(v) for k, v in records.items()}
    return ComparisonResult(tuple(rows), tuple(ranks), records)
