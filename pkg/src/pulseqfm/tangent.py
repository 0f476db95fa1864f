"""Coefficient-map Jacobians, real-rank diagnostics and escape directions.

The coefficient map sends trainable parameters to the complex Fourier
coefficient vector; ranks are taken over the reals after stacking real and
imaginary parts.  Extending a gate-parameter point with per-leaf pulse
scalings (all at their nominal value 1) appends columns to the Jacobian, so
the rank can only grow; the growth counts genuinely new local search
directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import fourier, gates, linalg, model as qfm, training
from .model import Ansatz, FourierModel
from .training import TargetSeries


class GateOptimisationError(RuntimeError):
    """The supplied gate-parameter point is not a converged critical point."""


def _pulse_view(model: FourierModel) -> FourierModel:
    """The same circuit with every rotation leaf carrying a nominal scaling."""
    if model.mode == "pulse":
        return model
    return FourierModel(
        ansatz=model.ansatz,
        n_blocks=model.n_blocks,
        mode="pulse",
        theta=model.theta,
        enc_scales=model.enc_scales,
        observable_qubit=model.observable_qubit,
    )


def _coefficient_leaf_derivatives(model: FourierModel):
    """(c0, dc/dtheta, dc/dext) as complex arrays over the spectrum."""
    spec = qfm.spectrum(model)
    xs = fourier.nyquist_grid(spec)
    f0, dfdang, act = qfm.grid_with_leaf_shifts(model, xs)
    c0 = fourier.coefficients_from_grid(spec, f0)
    dcdang = fourier.coefficients_from_grid(spec, dfdang)
    dtheta, dext = qfm.chain_to_parameters(model, dcdang, act)
    return c0, dtheta, dext


def _stack_real(dc: np.ndarray) -> np.ndarray:
    # dc: [params, freqs] complex -> [2 freqs, params] real
    return np.concatenate([dc.T.real, dc.T.imag], axis=0)


def coefficient_jacobian(model: FourierModel, wrt: str = "theta") -> np.ndarray:
    """Real Jacobian of the coefficient map, rows (Re c_w; Im c_w).

    ``wrt`` selects the columns: ``"theta"`` for the logical angles only,
    ``"theta_and_lambda"`` to append one pulse-scaling column per rotation
    leaf (evaluated at the model's current scalings, nominal by default).
    Derivatives are exact shift-rule derivatives of the effective leaf
    angles, chained with the scaling (for theta columns) or the base
    sub-angle (for scaling columns).
    """
    if wrt not in ("theta", "theta_and_lambda"):
        raise ValueError(f"unknown Jacobian selection {wrt!r}")
    work = _pulse_view(model)
    _, dtheta, dext = _coefficient_leaf_derivatives(work)
    j_theta = _stack_real(dtheta)
    if wrt == "theta":
        return j_theta
    return np.concatenate([j_theta, _stack_real(dext)], axis=1)


@dataclass(frozen=True, eq=False)
class JacobianReport:
    j_theta: np.ndarray
    j_ext: np.ndarray
    rank_theta: int
    rank_ext: int

    @property
    def rank_gain(self) -> int:
        return self.rank_ext - self.rank_theta


def rank_report(model: FourierModel, rtol: float = linalg.DEFAULT_RANK_RTOL) -> JacobianReport:
    """Real ranks of the gate-level and pulse-extended Jacobians."""
    j_ext = coefficient_jacobian(model, "theta_and_lambda")
    n_theta = qfm.theta_size(model)
    j_theta = j_ext[:, :n_theta]
    return JacobianReport(
        j_theta=j_theta,
        j_ext=j_ext,
        rank_theta=linalg.real_rank(j_theta, rtol),
        rank_ext=linalg.real_rank(j_ext, rtol),
    )


@dataclass(frozen=True)
class EscapeResult:
    grad_theta_norm: float
    grad_lambda_norm: float
    residual_norm: float


def escape_direction_test(
    model: FourierModel,
    target: TargetSeries,
    gate_optimum,
    grad_tol: float = 1e-5,
) -> EscapeResult:
    """Gradient norms of the extended loss at a gate-converged point.

    ``gate_optimum`` must be a critical point of the gate-level loss
    (gradient norm below ``grad_tol``), otherwise the precondition failure
    is raised rather than silently producing meaningless norms.  The
    scaling gradient is evaluated at nominal scalings via
    2 Re sum_w r_w^* dc_w/dlambda with r the coefficient residual.
    """
    work = qfm.with_params(_pulse_view(model), theta=np.asarray(gate_optimum, dtype=float))
    c0, dtheta, dext = _coefficient_leaf_derivatives(work)
    residual = c0 - target.coefficients.values
    grad_theta = 2.0 * np.real(dtheta @ np.conj(residual))
    grad_lambda = 2.0 * np.real(dext @ np.conj(residual))
    theta_norm = float(np.linalg.norm(grad_theta))
    if theta_norm >= grad_tol:
        raise GateOptimisationError(
            f"gate gradient norm {theta_norm:.3e} exceeds the convergence "
            f"tolerance {grad_tol:.1e}; optimise further before testing"
        )
    return EscapeResult(
        grad_theta_norm=theta_norm,
        grad_lambda_norm=float(np.linalg.norm(grad_lambda)),
        residual_norm=float(np.linalg.norm(residual)),
    )


@dataclass(frozen=True, eq=False)
class GateOptimum:
    theta: np.ndarray
    grad_norm: float
    loss: float
    converged: bool


def find_gate_optimum(
    model: FourierModel,
    target: TargetSeries,
    adam_steps: int = 1500,
    learning_rate: float = 0.05,
    decay: float = 0.997,
    grad_tol: float = 1e-5,
) -> GateOptimum:
    """Drive the gate-level loss to a critical point.

    Adam with exponentially decayed learning rate finds the basin; a
    quasi-Newton polish with the same exact gradients then pushes the
    gradient norm below ``grad_tol`` (plain Adam stalls around the
    oscillation floor set by its final learning rate).
    """
    if model.mode != "gate":
        model = FourierModel(
            ansatz=model.ansatz,
            n_blocks=model.n_blocks,
            mode="gate",
            theta=model.theta,
            enc_scales=model.enc_scales,
            observable_qubit=model.observable_qubit,
        )
    theta = np.array(model.theta, dtype=float)
    adam = training.AdamState(theta.size, learning_rate, 0.9, 0.999, 1e-8)
    current = qfm.with_params(model, theta=theta)
    for step in range(adam_steps):
        _, dtheta, _ = training.loss_and_gradient(current, target)
        theta = adam.update(theta, dtheta, lr=learning_rate * decay**step)
        current = qfm.with_params(current, theta=theta)

    def objective(vec):
        m = qfm.with_params(model, theta=vec)
        loss, dtheta, _ = training.loss_and_gradient(m, target)
        return loss, dtheta

    result = optimize.minimize(
        objective,
        theta,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 2000, "ftol": 1e-18, "gtol": 1e-9},
    )
    theta = np.asarray(result.x, dtype=float)
    loss, dtheta, _ = training.loss_and_gradient(qfm.with_params(model, theta=theta), target)
    grad_norm = float(np.linalg.norm(dtheta))
    return GateOptimum(theta, grad_norm, float(loss), grad_norm < grad_tol)


# ---------------------------------------------------------------------------
# Two-sub-rotation toy model (single logical angle driving RX and RY)
# ---------------------------------------------------------------------------


def xy_pair_gate(a: float = 1.0, b: float = 2.0) -> str:
    """Register a 1-qubit composite RX(a*theta) RY(b*theta) (matrix order).

    The logical angle drives both sub-rotations with fixed ratios, so the
    gate-level coefficient map of an encode-then-rotate circuit has rank 1
    while independent leaf scalings unlock a second direction.
    """
    name = f"XYPAIR[{a:g},{b:g}]"
    if name not in gates.gate_names():
        gates.register_composite(
            name,
            arity=1,
            n_angles=1,
            sub_gates=(
                gates.SubGate("RY", gates.AngleExpr(b, 0, 0.0), "target"),
                gates.SubGate("RX", gates.AngleExpr(a, 0, 0.0), "target"),
            ),
            unitary=lambda angles: gates.gate_unitary("RX", (a * angles[0],))
            @ gates.gate_unitary("RY", (b * angles[0],)),
        )
    return name


def xy_pair_model(theta: float, a: float = 1.0, b: float = 2.0, mode: str = "gate") -> FourierModel:
    """1-qubit encode-then-rotate circuit around the registered toy gate."""
    kind = xy_pair_gate(a, b)
    ansatz = Ansatz(
        name=f"xy_pair[{a:g},{b:g}]",
        layer_template=((kind, (0,)),),
        n_qubits=1,
        block_templates=((), ((kind, (0,)),)),
    )
    return FourierModel(
        ansatz=ansatz,
        n_blocks=2,
        mode=mode,
        theta=np.array([theta]),
        enc_scales=(1,),
    )
