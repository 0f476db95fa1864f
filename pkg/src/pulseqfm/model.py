"""Quantum Fourier model assembly and evaluation.

A model is a stack of trainable blocks with the ternary feature map applied
between consecutive blocks; its output is the Z expectation on one qubit,
which is a real truncated Fourier series in the input.  Three parameter
modes share one circuit realisation at basis-gate level:

* ``gate``: only the logical angles are trainable;
* ``decomposed``: every rotation leaf of the decomposed circuit also carries
  a trainable multiplicative scale (initialised to 1);
* ``pulse``: as ``decomposed``, with the scale interpreted as the calibrated
  pulse-area factor of the leaf's drive pulse.

Derivatives are exact two-point shift-rule derivatives of the individual
leaf angles, chained into the logical angles and the scalings.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from . import gates, kernels, linalg

MODES = ("gate", "decomposed", "pulse")

_KIND_CODES = {"RX": 0, "RY": 1, "RZ": 2, "CZ": 3}


@dataclass(frozen=True)
class Ansatz:
    """One trainable block: an ordered list of (gate kind, qubits).

    ``block_templates`` optionally overrides the per-block gate lists (used
    by diagnostics circuits whose first block is empty); normally every
    block repeats ``layer_template``.
    """

    name: str
    layer_template: tuple
    n_qubits: int
    block_templates: Optional[tuple] = None

    def blocks(self, n_blocks: int) -> tuple:
        if self.block_templates is not None:
            return self.block_templates
        return (self.layer_template,) * n_blocks


def _ring(n_qubits: int):
    if n_qubits < 2:
        return ()
    return tuple((i, (i + 1) % n_qubits) for i in range(n_qubits))


def ansatz_library(n_qubits: int = 3) -> list[Ansatz]:
    """The six library ansaetze, ordered by pulse-parameter count per block."""
    singles = tuple(range(n_qubits))
    ring = _ring(n_qubits)

    def build(name, single_kind, pair_kind):
        template = tuple((single_kind, (q,)) for q in singles)
        template += tuple((pair_kind, pair) for pair in ring)
        return Ansatz(name, template, n_qubits)

    return [
        build("basis_rx", "RX", "CZ"),
        build("rot_cz", "Rot", "CZ"),
        build("ry_cx", "RY", "CX"),
        build("ry_crz", "RY", "CRZ"),
        build("rot_cry", "Rot", "CRY"),
        build("rot_crx", "Rot", "CRX"),
    ]


def ansatz_by_name(name: str, n_qubits: int = 3) -> Ansatz:
    for ansatz in ansatz_library(n_qubits):
        if ansatz.name == name:
            return ansatz
    raise KeyError(f"unknown ansatz {name!r}")


def block_theta_count(template) -> int:
    return sum(gates.gate_spec(kind).n_angles for kind, _ in template)


def block_rotation_leaf_count(template) -> int:
    return sum(gates.rotation_leaf_count(kind) for kind, _ in template)


def block_pulse_param_count(template) -> int:
    return sum(gates.gate_spec(kind).pulse_param_count for kind, _ in template)


def ternary_scalings(n_qubits: int) -> tuple:
    """Per-qubit encoding prefactors 3^m producing a gap-free spectrum."""
    return tuple(3**m for m in range(n_qubits))


@dataclass(frozen=True, eq=False)
class FourierModel:
    """Ansatz layout plus the current parameter vectors of one mode."""

    ansatz: Ansatz
    n_blocks: int = 2
    mode: str = "gate"
    theta: np.ndarray = None
    lam: np.ndarray = None
    scales: np.ndarray = None
    enc_scales: tuple = None
    observable_qubit: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n_blocks < 1:
            raise ValueError("n_blocks must be >= 1")
        if self.enc_scales is None:
            object.__setattr__(self, "enc_scales", ternary_scalings(self.ansatz.n_qubits))
        if len(self.enc_scales) != self.ansatz.n_qubits:
            raise ValueError("one encoding scaling per qubit is required")
        n_theta = theta_size(self)
        if self.theta is None:
            object.__setattr__(self, "theta", np.zeros(n_theta))
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != (n_theta,):
            raise ValueError(f"theta must have length {n_theta}, got {theta.shape}")
        object.__setattr__(self, "theta", theta)
        n_ext = extension_size(self)
        for field, owner in (("lam", "pulse"), ("scales", "decomposed")):
            value = getattr(self, field)
            if self.mode != owner:
                if value is not None:
                    raise ValueError(f"{field} is only used in {owner} mode")
                continue
            if value is None:
                value = np.ones(n_ext)
            value = np.asarray(value, dtype=float)
            if value.shape != (n_ext,):
                raise ValueError(f"{field} must have length {n_ext}, got {value.shape}")
            object.__setattr__(self, field, value)


def theta_size(model: FourierModel) -> int:
    return sum(block_theta_count(t) for t in model.ansatz.blocks(model.n_blocks))


def extension_size(model: FourierModel) -> int:
    """Number of rotation leaves, i.e. of per-leaf scalings in either
    extended mode (CZ leaves are pinned to their nominal pulse)."""
    return sum(block_rotation_leaf_count(t) for t in model.ansatz.blocks(model.n_blocks))


def pulse_param_count(model: FourierModel) -> int:
    return sum(block_pulse_param_count(t) for t in model.ansatz.blocks(model.n_blocks))


def extension(model: FourierModel):
    if model.mode == "pulse":
        return model.lam
    if model.mode == "decomposed":
        return model.scales
    return None


def with_params(model: FourierModel, theta=None, ext=None) -> FourierModel:
    kwargs = {}
    if theta is not None:
        kwargs["theta"] = np.asarray(theta, dtype=float)
    if ext is not None:
        if model.mode == "pulse":
            kwargs["lam"] = np.asarray(ext, dtype=float)
        elif model.mode == "decomposed":
            kwargs["scales"] = np.asarray(ext, dtype=float)
        else:
            raise ValueError("gate mode has no extension parameters")
    return replace(model, **kwargs)


def initialised(model: FourierModel, rng: np.random.Generator) -> FourierModel:
    """Fresh parameter draw: theta uniform on [0, 2pi), scalings nominal."""
    theta = rng.uniform(0.0, 2.0 * math.pi, size=theta_size(model))
    ext = np.ones(extension_size(model)) if model.mode != "gate" else None
    return with_params(model, theta=theta, ext=ext)


# ---------------------------------------------------------------------------
# Circuit template compilation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CircuitTemplate:
    """Flattened leaf-level circuit with affine angle bookkeeping.

    Leaf g realises angle ``(coeff[g] * theta[theta_idx[g]] + const[g]) *
    ext[ext_idx[g]]`` with -1 indices marking "no dependence".
    """

    kind_code: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    block: np.ndarray
    theta_idx: np.ndarray
    coeff: np.ndarray
    const: np.ndarray
    ext_idx: np.ndarray
    n_blocks: int
    n_qubits: int
    theta_len: int
    ext_len: int
    enc_scales: np.ndarray
    obs_diag: np.ndarray


def _observable_diag(n_qubits: int, qubit: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    return np.where((idx >> qubit) & 1, -1.0, 1.0)


@lru_cache(maxsize=256)
def _compile(ansatz: Ansatz, n_blocks: int, enc_scales: tuple, observable_qubit: int):
    n = ansatz.n_qubits
    if not 1 <= n <= linalg.MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {linalg.MAX_QUBITS}]")
    rows = []
    theta_off = 0
    ext_off = 0
    for blk, template in enumerate(ansatz.blocks(n_blocks)):
        for kind, qubits in template:
            spec = gates.gate_spec(kind)
            if len(qubits) != spec.arity:
                raise ValueError(f"{kind} acts on {spec.arity} qubit(s), got {qubits}")
            for q in qubits:
                if not 0 <= q < n:
                    raise ValueError(f"qubit {q} out of range")
            for leaf in gates.leaf_sequence(kind):
                if leaf.kind == "CZ":
                    rows.append((3, qubits[0], qubits[1], blk, -1, 0.0, 0.0, -1))
                    continue
                q = qubits[1] if (spec.arity == 2 and leaf.role == "target") else qubits[0]
                expr = leaf.angle
                tidx = theta_off + expr.index if expr.index >= 0 else -1
                rows.append(
                    (_KIND_CODES[leaf.kind], q, -1, blk, tidx, expr.coeff, expr.const, ext_off)
                )
                ext_off += 1
            theta_off += spec.n_angles
    cols = list(zip(*rows)) if rows else [[] for _ in range(8)]
    return CircuitTemplate(
        kind_code=np.asarray(cols[0], dtype=np.int8),
        q0=np.asarray(cols[1], dtype=np.int32),
        q1=np.asarray(cols[2], dtype=np.int32),
        block=np.asarray(cols[3], dtype=np.int32),
        theta_idx=np.asarray(cols[4], dtype=np.int32),
        coeff=np.asarray(cols[5], dtype=float),
        const=np.asarray(cols[6], dtype=float),
        ext_idx=np.asarray(cols[7], dtype=np.int32),
        n_blocks=n_blocks,
        n_qubits=n,
        theta_len=theta_off,
        ext_len=ext_off,
        enc_scales=np.asarray(enc_scales, dtype=float),
        obs_diag=_observable_diag(n, observable_qubit),
    )


def circuit_template(model: FourierModel) -> CircuitTemplate:
    return _compile(
        model.ansatz, model.n_blocks, tuple(model.enc_scales), model.observable_qubit
    )


def leaf_angles(template: CircuitTemplate, theta, ext=None) -> np.ndarray:
    """Effective leaf angles for (batched) parameter vectors."""
    theta = np.asarray(theta, dtype=float)
    pad = np.zeros(theta.shape[:-1] + (1,))
    th = np.concatenate([theta, pad], axis=-1)
    ang = template.coeff * th[..., template.theta_idx] + template.const
    if ext is not None:
        ext = np.asarray(ext, dtype=float)
        epad = np.ones(ext.shape[:-1] + (1,))
        ev = np.concatenate([ext, epad], axis=-1)
        ang = ang * ev[..., template.ext_idx]
    return ang


def leaf_matrices(template: CircuitTemplate, ang: np.ndarray) -> np.ndarray:
    """4x4 gate matrices for every leaf; vectorised over leading axes."""
    half = 0.5 * ang
    c = np.cos(half)
    s = np.sin(half)
    mats = np.zeros(ang.shape + (4, 4), dtype=complex)
    kc = template.kind_code
    ix = np.nonzero(kc == 0)[0]
    mats[..., ix, 0, 0] = c[..., ix]
    mats[..., ix, 1, 1] = c[..., ix]
    mats[..., ix, 0, 1] = -1j * s[..., ix]
    mats[..., ix, 1, 0] = -1j * s[..., ix]
    iy = np.nonzero(kc == 1)[0]
    mats[..., iy, 0, 0] = c[..., iy]
    mats[..., iy, 1, 1] = c[..., iy]
    mats[..., iy, 0, 1] = -s[..., iy]
    mats[..., iy, 1, 0] = s[..., iy]
    iz = np.nonzero(kc == 2)[0]
    mats[..., iz, 0, 0] = c[..., iz] - 1j * s[..., iz]
    mats[..., iz, 1, 1] = c[..., iz] + 1j * s[..., iz]
    icz = np.nonzero(kc == 3)[0]
    for d, v in enumerate((1.0, 1.0, 1.0, -1.0)):
        mats[..., icz, d, d] = v
    return mats


def _kernel_args(template: CircuitTemplate):
    return (
        template.q0,
        template.q1,
        template.block,
        template.n_blocks,
        template.n_qubits,
        template.enc_scales,
    )


def forward_grid(model: FourierModel, xs) -> np.ndarray:
    """Model output f(x) on a grid of inputs."""
    template = circuit_template(model)
    ang = leaf_angles(template, model.theta, extension(model))
    mats = leaf_matrices(template, ang)
    return kernels.forward_grid(mats, *_kernel_args(template), xs, template.obs_diag)


def forward(model: FourierModel, x: float) -> float:
    return float(forward_grid(model, np.array([float(x)]))[0])


def forward_grid_many(model: FourierModel, thetas, exts, xs) -> np.ndarray:
    """Batched forward over parameter draws; exts may be None (nominal)."""
    template = circuit_template(model)
    ang = leaf_angles(template, thetas, exts)
    mats = leaf_matrices(template, ang)
    return kernels.forward_grid_batch(mats, *_kernel_args(template), xs, template.obs_diag)


def final_state(model: FourierModel, x: float) -> np.ndarray:
    template = circuit_template(model)
    ang = leaf_angles(template, model.theta, extension(model))
    mats = leaf_matrices(template, ang)
    return kernels.final_states_batch(mats[None], *_kernel_args(template), float(x))[0]


def final_states_many(model: FourierModel, thetas, exts, x) -> np.ndarray:
    """Batched final states; ``x`` is shared or one value per draw."""
    template = circuit_template(model)
    ang = leaf_angles(template, thetas, exts)
    mats = leaf_matrices(template, ang)
    return kernels.final_states_batch(mats, *_kernel_args(template), x)


def ternary_feature_map(x: float, n_qubits: int) -> np.ndarray:
    """Full encoding unitary: RX(3^m * x) on qubit m (tensor product)."""
    out = np.array([[1.0 + 0.0j]])
    for scale in reversed(ternary_scalings(n_qubits)):
        out = np.kron(out, gates.gate_unitary("RX", (scale * x,)))
    return out


def circuit_unitary(model: FourierModel, x: float) -> np.ndarray:
    """Whole-circuit unitary built from logical gate matrices.

    Independent of the leaf-level kernel path (gate mode only); serves as
    the oracle for the mode-consistency checks.
    """
    if model.mode != "gate":
        raise ValueError("logical-unitary construction is defined for gate mode")
    n = model.ansatz.n_qubits
    dim = 2**n
    enc = np.array([[1.0 + 0.0j]])
    for scale in reversed(model.enc_scales):
        enc = np.kron(enc, gates.gate_unitary("RX", (scale * x,)))
    unitary = np.eye(dim, dtype=complex)
    offset = 0
    for blk, template in enumerate(model.ansatz.blocks(model.n_blocks)):
        if blk > 0:
            unitary = enc @ unitary
        for kind, qubits in template:
            spec = gates.gate_spec(kind)
            angles = tuple(model.theta[offset : offset + spec.n_angles])
            offset += spec.n_angles
            mat = gates.gate_unitary(kind, angles)
            unitary = linalg.embed_gate(mat, qubits, n) @ unitary
    return unitary


# ---------------------------------------------------------------------------
# Frequency spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    """Encoded frequency set with per-frequency generator multiplicities."""

    frequencies: tuple
    redundancies: tuple

    @property
    def omega_max(self) -> int:
        return max(abs(w) for w in self.frequencies)

    def redundancy(self, omega: int) -> int:
        return self.redundancies[self.frequencies.index(omega)]

    def __len__(self) -> int:
        return len(self.frequencies)


def spectrum_of(enc_scales, n_layers: int) -> Spectrum:
    """Frequencies reachable by eigenvalue gaps of the encoding generators.

    Every occurrence of an encoding rotation contributes a gap from
    {-s, 0, +s}; the redundancy counts how many distinct gap combinations
    produce a frequency.
    """
    slots = [(-float(s), 0.0, float(s)) for s in enc_scales for _ in range(n_layers)]
    if 3 ** len(slots) > 2_000_000:
        raise ValueError("spectrum enumeration too large")
    counts = Counter()
    if not slots:
        counts[0.0] = 1
    else:
        for combo in itertools.product(*slots):
            counts[round(sum(combo), 9)] += 1
    freqs = sorted(counts)
    as_int = [int(round(w)) for w in freqs]
    if all(abs(w - i) < 1e-9 for w, i in zip(freqs, as_int)):
        freqs = as_int
    return Spectrum(tuple(freqs), tuple(counts[w] for w in sorted(counts)))


def spectrum(model: FourierModel) -> Spectrum:
    return spectrum_of(model.enc_scales, model.n_blocks - 1)


# ---------------------------------------------------------------------------
# Shift-rule derivatives of the leaf angles
# ---------------------------------------------------------------------------


def active_leaves(template: CircuitTemplate, mode: str) -> np.ndarray:
    """Leaves whose angle derivative feeds at least one trainable parameter."""
    rot = template.ext_idx >= 0
    if mode == "gate":
        rot = rot & (template.theta_idx >= 0)
    return np.nonzero(rot)[0]


def grid_with_leaf_shifts(model: FourierModel, xs):
    """Forward values and exact per-leaf angle derivatives on a grid.

    Returns ``(f0, dfdang, active)`` with ``f0`` of shape [K], ``dfdang`` of
    shape [R, K] and ``active`` the R leaf indices.  Uses the two-point
    shift rule f'(a) = (f(a + pi/2) - f(a - pi/2)) / 2, exact because every
    leaf is a Pauli-generated rotation appearing once in the circuit.
    """
    template = circuit_template(model)
    ang0 = leaf_angles(template, model.theta, extension(model))
    act = active_leaves(template, model.mode)
    r = act.size
    batch = np.tile(ang0, (2 * r + 1, 1))
    rows = 1 + np.arange(r)
    batch[rows, act] += 0.5 * math.pi
    batch[rows + r, act] -= 0.5 * math.pi
    mats = leaf_matrices(template, batch)
    vals = kernels.forward_grid_batch(mats, *_kernel_args(template), xs, template.obs_diag)
    f0 = vals[0]
    dfdang = 0.5 * (vals[1 : r + 1] - vals[r + 1 :])
    return f0, dfdang, act


def chain_to_parameters(model: FourierModel, dvals: np.ndarray, act: np.ndarray):
    """Chain per-leaf derivatives into (d/dtheta, d/dext).

    ``dvals`` holds d(quantity)/d(leaf angle) for the active leaves along
    axis 0; trailing axes are carried through.  The extension derivative is
    None in gate mode.
    """
    template = circuit_template(model)
    ext = extension(model)
    tail = dvals.shape[1:]
    ext_pad = np.ones(template.ext_len + 1) if ext is None else np.concatenate([ext, [1.0]])
    lam_act = ext_pad[template.ext_idx[act]]
    expand = (...,) + (None,) * len(tail)
    dtheta = np.zeros((template.theta_len,) + tail, dtype=dvals.dtype)
    tmask = template.theta_idx[act] >= 0
    np.add.at(
        dtheta,
        template.theta_idx[act][tmask],
        (template.coeff[act][tmask] * lam_act[tmask])[expand] * dvals[tmask],
    )
    if model.mode == "gate":
        return dtheta, None
    theta_pad = np.concatenate([model.theta, [0.0]])
    base_angle = template.coeff[act] * theta_pad[template.theta_idx[act]] + template.const[act]
    dext = np.zeros((template.ext_len,) + tail, dtype=dvals.dtype)
    dext[template.ext_idx[act]] = base_angle[expand] * dvals
    return dtheta, dext
