import numpy as np
import pytest

from pulseqfm import fourier, model as qfm, tangent, training
from pulseqfm.model import FourierModel


def _fd_jacobian(model, target_len, eps=1e-5):
    """Central finite differences of the stacked real coefficient map."""
    def coeff_vec(m):
        c = fourier.extract_coefficients(m).values
        return np.concatenate([c.real, c.imag])

    cols = []
    for i in range(qfm.theta_size(model)):
        tp, tm = model.theta.copy(), model.theta.copy()
        tp[i] += eps
        tm[i] -= eps
        cols.append(
            (coeff_vec(qfm.with_params(model, theta=tp)) - coeff_vec(qfm.with_params(model, theta=tm)))
            / (2 * eps)
        )
    ext = qfm.extension(model)
    if ext is not None:
        for i in range(ext.size):
            ep, em = ext.copy(), ext.copy()
            ep[i] += eps
            em[i] -= eps
            cols.append(
                (coeff_vec(qfm.with_params(model, ext=ep)) - coeff_vec(qfm.with_params(model, ext=em)))
                / (2 * eps)
            )
    return np.column_stack(cols)


def test_jacobian_matches_finite_differences(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("ry_cx"), mode="pulse"), rng)
    m = qfm.with_params(m, ext=rng.normal(1.0, 0.1, qfm.extension_size(m)))
    j = tangent.coefficient_jacobian(m, "theta_and_lambda")
    fd = _fd_jacobian(m, j.shape[0])
    assert np.max(np.abs(j - fd)) < 1e-6


def test_jacobian_rows_are_stacked_real_imag():
    m = tangent.xy_pair_model(0.9)
    j = tangent.coefficient_jacobian(m, "theta")
    spec = qfm.spectrum(m)
    assert j.shape == (2 * len(spec), 1)


def test_lambda_column_is_theta_scaled_theta_column(rng):
    # chain rule at nominal scaling: for a basis gate the scaling column
    # equals theta times the theta column (both differentiate theta*lambda)
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("basis_rx"), mode="pulse"), rng)
    j = tangent.coefficient_jacobian(m, "theta_and_lambda")
    n = qfm.theta_size(m)
    template = qfm.circuit_template(m)
    rot = np.nonzero(template.ext_idx >= 0)[0]
    for leaf in rot:
        t_idx = template.theta_idx[leaf]
        e_idx = template.ext_idx[leaf]
        np.testing.assert_allclose(
            j[:, n + e_idx], m.theta[t_idx] * j[:, t_idx], atol=1e-10
        )


def test_zero_theta_kills_lambda_directions():
    # theta_k = 0 removes the first-order pulse direction of that gate
    m = FourierModel(ansatz=qfm.ansatz_by_name("basis_rx"), mode="pulse")
    j = tangent.coefficient_jacobian(m, "theta_and_lambda")
    n = qfm.theta_size(m)
    np.testing.assert_allclose(j[:, n:], 0.0, atol=1e-12)


def test_example_two_sub_rotation_ranks(rng):
    for theta in (0.7, 1.9, 5.1):
        report = tangent.rank_report(tangent.xy_pair_model(theta))
        assert report.rank_theta == 1
        assert report.rank_ext == 2
        assert report.rank_gain == 1


def test_rank_gain_zero_for_basis_only(rng):
    for _ in range(20):
        m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("basis_rx"), mode="pulse"), rng)
        report = tangent.rank_report(m)
        assert report.rank_gain == 0


def test_rank_gain_positive_for_composite(rng):
    hits = 0
    for _ in range(20):
        m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("rot_crx"), mode="pulse"), rng)
        report = tangent.rank_report(m)
        assert report.rank_ext >= report.rank_theta
        q = qfm.extension_size(m)
        assert report.rank_gain <= min(q, report.j_ext.shape[0] - report.rank_theta)
        if report.rank_gain >= 1:
            hits += 1
    assert hits >= 18


def test_common_rescaling_stays_in_gate_tangent_space(rng):
    # scaling all sub-rotations of one composite gate together only rescales
    # the logical angle when every sub-angle is proportional to theta (CRY,
    # CRZ); the joint direction then lies inside the theta column span
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("ry_crz"), mode="pulse"), rng)
    template = qfm.circuit_template(m)
    j = tangent.coefficient_jacobian(m, "theta_and_lambda")
    n = qfm.theta_size(m)
    j_theta, j_lam = j[:, :n], j[:, n:]
    basis, *_ = np.linalg.svd(j_theta, full_matrices=False)
    # one joint direction per theta-bearing composite gate (CRZ): sum the
    # lambda columns of the leaves whose angle depends on that theta index
    for t_idx in range(n):
        leaves = np.nonzero((template.theta_idx >= 0) & (template.theta_idx == t_idx))[0]
        if leaves.size < 2:
            continue  # not a composite spreading one angle over sub-gates
        joint = np.zeros(j.shape[0])
        for leaf in leaves:
            joint += j_lam[:, template.ext_idx[leaf]]
        residual = joint - basis @ (basis.T @ joint)
        assert np.linalg.norm(residual) < 1e-8 * max(np.linalg.norm(joint), 1.0)


def test_escape_zero_residual(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("rot_crx")), rng)
    target = training.target_from_model(m)
    # the generating point is a global minimum: both gradients vanish
    result = tangent.escape_direction_test(m, target, m.theta)
    assert result.residual_norm < 1e-10
    assert result.grad_lambda_norm < 1e-8


def test_escape_rejects_unconverged_points(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("rot_crx")), rng)
    target = training.generate_target(qfm.spectrum(m), rng)
    with pytest.raises(tangent.GateOptimisationError):
        tangent.escape_direction_test(m, target, m.theta)


def test_escape_direction_at_converged_point(rng):
    m = qfm.initialised(FourierModel(ansatz=qfm.ansatz_by_name("rot_crx")), np.random.default_rng(2))
    target = training.generate_target(qfm.spectrum(m), np.random.default_rng(3))
    optimum = tangent.find_gate_optimum(m, target, adam_steps=600)
    assert optimum.converged
    result = tangent.escape_direction_test(m, target, optimum.theta)
    assert result.residual_norm > 1e-3
    assert result.grad_lambda_norm > 10 * result.grad_theta_norm
