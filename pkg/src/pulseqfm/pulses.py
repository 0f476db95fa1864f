"""Pulse envelopes and the effective pulse-area model.

A resonant fixed-axis drive in the rotating frame implements
``exp(-i * theta * area * H)`` where ``area`` is the envelope integral over
the gate window.  Areas are reported in calibrated units: the provider
nominal pulse has scaling 1, so a scaling of exactly 1 reproduces the
gate-level unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf

from . import gates

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class PulseParams:
    """Envelope parameters of a single control pulse.

    ``amplitude`` and ``width`` are the trainable pair; ``center`` and
    ``window`` locate the pulse inside the gate window [0, window].
    """

    amplitude: float
    width: float
    center: float
    window: float
    kind: str = "gaussian"

    def __post_init__(self):
        if self.kind not in ("gaussian", "rectangular"):
            raise ValueError(f"unknown envelope kind {self.kind!r}")
        if self.amplitude <= 0.0 or self.width <= 0.0 or self.window <= 0.0:
            raise ValueError("amplitude, width and window must be positive")
        if not 0.0 <= self.center <= self.window:
            raise ValueError("pulse center must lie inside the window")


def canonical_pulse(amplitude: float = 1.0, width: float = 1.0) -> PulseParams:
    """Centered Gaussian in a window of 8 widths.

    With this window the closed-form area deviates from the infinite-window
    value ``A * width * sqrt(2*pi)`` by less than 1e-4 relative.
    """
    return PulseParams(amplitude, width, 4.0 * width, 8.0 * width, "gaussian")


#: Provider-nominal pulse defining the unit of the calibrated scaling.
NOMINAL_PULSE = canonical_pulse()


def envelope(p: PulseParams, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if p.kind == "rectangular":
        return np.where((t >= 0.0) & (t <= p.window), p.amplitude, 0.0)
    z = (t - p.center) / p.width
    return p.amplitude * np.exp(-0.5 * z * z)


def pulse_area(p: PulseParams) -> float:
    """Raw envelope integral over the gate window.

    Gaussian pulses have the closed form
    ``A * s * sqrt(pi/2) * (erf((w - c)/(sqrt(2) s)) + erf(c/(sqrt(2) s)))``;
    rectangular pulses integrate to ``A * w``.
    """
    if p.kind == "rectangular":
        return p.amplitude * p.window
    root2s = math.sqrt(2.0) * p.width
    return (
        p.amplitude
        * p.width
        * SQRT_HALF_PI
        * (erf((p.window - p.center) / root2s) + erf(p.center / root2s))
    )


def effective_scaling(p: PulseParams, nominal: PulseParams = NOMINAL_PULSE) -> float:
    """Calibrated pulse-area factor; equals 1 for the nominal pulse."""
    return pulse_area(p) / pulse_area(nominal)


def gaussian_params_for_scaling(
    lam: float, width: float = 1.0, nominal: PulseParams = NOMINAL_PULSE
) -> PulseParams:
    """Canonical-window Gaussian whose calibrated scaling equals ``lam``.

    Inverts the closed-form area for the amplitude at the requested width,
    which parameterises the (amplitude, width) level set of a fixed scaling.
    """
    probe = canonical_pulse(1.0, width)
    amplitude = lam * pulse_area(nominal) / pulse_area(probe)
    return replace(probe, amplitude=amplitude)


def scaled_gate_unitary(kind: str, theta: float, lam: float) -> np.ndarray:
    """Pulse-scaled single-axis rotation ``R(theta * lam)``.

    Only meaningful for the basis rotations, where the pulse enters solely
    through the effective angle; composite gates need
    :func:`pulse_realised_composite`.
    """
    if kind not in ("RX", "RY", "RZ"):
        raise ValueError(
            f"{kind} is not a single-axis basis rotation; "
            "use pulse_realised_composite for composite gates"
        )
    return gates.gate_unitary(kind, (theta * lam,))


def pulse_realised_composite(kind: str, angles, lambdas) -> np.ndarray:
    """Composite gate with one scaling slot per basis-gate leaf.

    ``lambdas`` must have one entry per leaf of the full decomposition of
    ``kind`` (circuit order).  Rotation leaves have their angle multiplied
    by their slot; entangling CZ leaves carry a slot whose value has no
    effect (the scalar area model does not deform them).
    """
    if np.isscalar(angles):
        angles = (float(angles),)
    return gates.assemble(kind, angles, lambdas)


def time_sliced_propagator(
    p: PulseParams, theta: float, generator: np.ndarray, steps: int
) -> np.ndarray:
    """Ordered product of short-time propagators under the drive envelope.

    Each slice contributes ``exp(-i * theta * E(t_mid) * generator * dt)``
    with midpoint sampling.  For the fixed-axis (commuting) effective
    Hamiltonian this converges at second order in the step size to
    ``exp(-i * theta * pulse_area(p) * generator)``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    generator = np.asarray(generator, dtype=complex)
    evals, evecs = np.linalg.eigh(generator)
    dt = p.window / steps
    t_mid = (np.arange(steps) + 0.5) * dt
    amps = envelope(p, t_mid)
    dim = generator.shape[0]
    unitary = np.eye(dim, dtype=complex)
    for amp in amps:
        phase = np.exp(-1j * theta * amp * dt * evals)
        factor = (evecs * phase) @ evecs.conj().T
        unitary = factor @ unitary
    return unitary


def sample_lambda_distortion(rng: np.random.Generator, sigma2: float, count: int) -> np.ndarray:
    """Unit-mean normal scaling factors with variance ``sigma2``.

    ``sigma2 = 0`` returns exact ones (no draws are consumed in that case
    either, so a zero-variance sweep point is bitwise reproducible).
    """
    if sigma2 < 0.0:
        raise ValueError("variance must be non-negative")
    if count < 1:
        raise ValueError("count must be positive")
    if sigma2 == 0.0:
        return np.ones(count)
    return rng.normal(1.0, math.sqrt(sigma2), size=count)
