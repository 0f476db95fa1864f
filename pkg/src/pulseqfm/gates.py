"""Logical gate registry: unitaries, basis-gate decompositions and pulse-parameter accounting.

The hardware-native basis set is {RX, RY, RZ, CZ}.  Every other gate carries a
decomposition into basis gates, stored in circuit order (the first factor is
applied to the state first).  Sub-gate angles are affine functions of the
logical gate angles, so a decomposition can be re-assembled for any angle and
any per-sub-gate scaling.

Rotations use the half-angle convention R_P(a) = exp(-i a P / 2).  For
controlled gates the first listed qubit is the control and maps to the more
significant bit of the 4x4 matrix index, i.e. CU = diag(I, U).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

BASIS_GATES = ("RX", "RY", "RZ", "CZ")

#: Table of pulse-parameter counts per gate (amplitude/width/time bookkeeping
#: of the hardware realisation): RZ and CZ need 1, RX and RY need 3, composite
#: gates sum their sub-gates.
PULSE_PARAM_COUNTS = {
    "RZ": 1,
    "CZ": 1,
    "RX": 3,
    "RY": 3,
    "H": 4,
    "Rot": 5,
    "CX": 9,
    "CY": 11,
    "CRZ": 20,
    "CRY": 24,
    "CRX": 26,
}

HALF_PI = math.pi / 2


class UnknownGateError(KeyError):
    """Raised when a gate name is not present in the registry."""


@dataclass(frozen=True)
class AngleExpr:
    """Affine sub-gate angle ``coeff * angles[index] + const``.

    ``index < 0`` marks a fixed angle that does not depend on the logical
    parameters (``coeff`` is ignored in that case).
    """

    coeff: float = 0.0
    index: int = -1
    const: float = 0.0

    def __call__(self, angles=()) -> float:
        if self.index >= 0:
            return self.coeff * angles[self.index] + self.const
        return self.const

    @property
    def is_fixed(self) -> bool:
        return self.index < 0


@dataclass(frozen=True)
class SubGate:
    """One factor of a decomposition.

    ``role`` says which qubits of the parent gate the factor acts on:
    ``"target"`` for single-qubit factors (the parent's only qubit, or the
    target of a controlled parent) and ``"pair"`` for two-qubit factors
    acting on (control, target).  ``angle`` is None for angle-free factors
    (CZ, CX, H appearing inside another decomposition).
    """

    kind: str
    angle: Optional[AngleExpr] = None
    role: str = "target"


@dataclass(frozen=True)
class DecompositionRule:
    """Basis-gate realisation of a logical gate, in circuit order."""

    gate: str
    sub_gates: tuple[SubGate, ...]
    pulse_param_count: int


@dataclass(frozen=True)
class GateSpec:
    name: str
    arity: int
    n_angles: int
    is_basis: bool
    pulse_param_count: int
    sub_gates: tuple[SubGate, ...]


def _self_rule(name: str) -> tuple[SubGate, ...]:
    # basis gates decompose into themselves
    if name in ("RX", "RY", "RZ"):
        return (SubGate(name, AngleExpr(1.0, 0, 0.0), "target"),)
    return (SubGate(name, None, "pair"),)


_REGISTRY: dict[str, GateSpec] = {}


def _register(spec: GateSpec) -> GateSpec:
    _REGISTRY[spec.name] = spec
    return spec


def register_composite(
    name: str,
    arity: int,
    n_angles: int,
    sub_gates: tuple[SubGate, ...],
    unitary: Optional[Callable] = None,
) -> GateSpec:
    """Register a custom composite gate (used by diagnostics and tests).

    The pulse-parameter count is derived from the sub-gate kinds.  When
    ``unitary`` is given it is stored for exact-matrix lookups, otherwise the
    unitary is the re-assembled decomposition product.
    """
    count = sum(PULSE_PARAM_COUNTS[sg.kind] for sg in sub_gates)
    spec = GateSpec(name, arity, n_angles, False, count, sub_gates)
    _register(spec)
    if unitary is not None:
        _CUSTOM_UNITARIES[name] = unitary
    return spec


_CUSTOM_UNITARIES: dict[str, Callable] = {}


for _name, _arity, _n_angles in (
    ("RX", 1, 1),
    ("RY", 1, 1),
    ("RZ", 1, 1),
    ("CZ", 2, 0),
):
    _register(
        GateSpec(_name, _arity, _n_angles, True, PULSE_PARAM_COUNTS[_name], _self_rule(_name))
    )

# Composite gates, Table-I factor sequences in circuit order.  H and CY carry
# fixed angles chosen so the re-assembled product reproduces the gate up to a
# global phase (verified by the round-trip tests).
_register(
    GateSpec(
        "H",
        1,
        0,
        False,
        PULSE_PARAM_COUNTS["H"],
        (
            SubGate("RZ", AngleExpr(const=math.pi), "target"),
            SubGate("RY", AngleExpr(const=HALF_PI), "target"),
        ),
    )
)
_register(
    GateSpec(
        "Rot",
        1,
        3,
        False,
        PULSE_PARAM_COUNTS["Rot"],
        (
            SubGate("RZ", AngleExpr(1.0, 0, 0.0), "target"),
            SubGate("RY", AngleExpr(1.0, 1, 0.0), "target"),
            SubGate("RZ", AngleExpr(1.0, 2, 0.0), "target"),
        ),
    )
)
_register(
    GateSpec(
        "CX",
        2,
        0,
        False,
        PULSE_PARAM_COUNTS["CX"],
        (
            SubGate("H", None, "target"),
            SubGate("CZ", None, "pair"),
            SubGate("H", None, "target"),
        ),
    )
)
_register(
    GateSpec(
        "CY",
        2,
        0,
        False,
        PULSE_PARAM_COUNTS["CY"],
        (
            SubGate("RZ", AngleExpr(const=-HALF_PI), "target"),
            SubGate("CX", None, "pair"),
            SubGate("RZ", AngleExpr(const=HALF_PI), "target"),
        ),
    )
)
_register(
    GateSpec(
        "CRZ",
        2,
        1,
        False,
        PULSE_PARAM_COUNTS["CRZ"],
        (
            SubGate("RZ", AngleExpr(0.5, 0, 0.0), "target"),
            SubGate("CX", None, "pair"),
            SubGate("RZ", AngleExpr(-0.5, 0, 0.0), "target"),
            SubGate("CX", None, "pair"),
        ),
    )
)
_register(
    GateSpec(
        "CRY",
        2,
        1,
        False,
        PULSE_PARAM_COUNTS["CRY"],
        (
            SubGate("RY", AngleExpr(0.5, 0, 0.0), "target"),
            SubGate("CX", None, "pair"),
            SubGate("RY", AngleExpr(-0.5, 0, 0.0), "target"),
            SubGate("CX", None, "pair"),
        ),
    )
)
_register(
    GateSpec(
        "CRX",
        2,
        1,
        False,
        PULSE_PARAM_COUNTS["CRX"],
        (
            SubGate("RZ", AngleExpr(const=HALF_PI), "target"),
            SubGate("RY", AngleExpr(0.5, 0, 0.0), "target"),
            SubGate("CX", None, "pair"),
            SubGate("RY", AngleExpr(-0.5, 0, 0.0), "target"),
            SubGate("CX", None, "pair"),
            SubGate("RZ", AngleExpr(const=-HALF_PI), "target"),
        ),
    )
)


def gate_spec(kind: str) -> GateSpec:
    try:
        return _REGISTRY[kind]
    except KeyError:
        raise UnknownGateError(f"unknown gate kind {kind!r}") from None


def gate_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


# ---------------------------------------------------------------------------
# Exact unitaries
# ---------------------------------------------------------------------------


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]], dtype=complex
    )


_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def _controlled(u: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


def gate_unitary(kind: str, angles=()) -> np.ndarray:
    """Exact unitary of a logical gate.

    Parameters
    ----------
    kind : str
        Registered gate name.
    angles : sequence of float
        Logical angles in radians; the length must match the gate
        (0 for H/CZ/CX/CY, 1 for the rotations, 3 for Rot).

    Returns
    -------
    np.ndarray
        ``2^arity x 2^arity`` complex matrix.  Controlled gates are block
        diagonal, acting as the identity on the |0> control branch.
    """
    spec = gate_spec(kind)
    angles = tuple(np.atleast_1d(np.asarray(angles, dtype=float)).ravel())
    if len(angles) != spec.n_angles:
        raise ValueError(
            f"{kind} takes {spec.n_angles} angle(s), got {len(angles)}"
        )
    if kind == "RX":
        return _rx(angles[0])
    if kind == "RY":
        return _ry(angles[0])
    if kind == "RZ":
        return _rz(angles[0])
    if kind == "H":
        return _HADAMARD.copy()
    if kind == "Rot":
        phi, theta, omega = angles
        return _rz(omega) @ _ry(theta) @ _rz(phi)
    if kind == "CZ":
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    if kind == "CX":
        return _controlled(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
    if kind == "CY":
        return _controlled(np.array([[0.0, -1j], [1j, 0.0]], dtype=complex))
    if kind == "CRX":
        return _controlled(_rx(angles[0]))
    if kind == "CRY":
        return _controlled(_ry(angles[0]))
    if kind == "CRZ":
        return _controlled(_rz(angles[0]))
    if kind in _CUSTOM_UNITARIES:
        return _CUSTOM_UNITARIES[kind](angles)
    # custom composite without an explicit unitary: reassemble from leaves
    return assemble(kind, angles)


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------


def decompose(kind: str) -> DecompositionRule:
    """Table-I decomposition of ``kind`` (basis gates yield themselves)."""
    spec = gate_spec(kind)
    return DecompositionRule(spec.name, spec.sub_gates, spec.pulse_param_count)


def sub_angle_vector(kind: str, *angles: float):
    """Per-sub-gate angles (g_1, ..., g_M) of the decomposition of ``kind``.

    Angle-free slots (CZ, and composite factors such as the CX inside a
    controlled rotation) are reported as None.
    """
    spec = gate_spec(kind)
    if len(angles) != spec.n_angles:
        raise ValueError(f"{kind} takes {spec.n_angles} angle(s), got {len(angles)}")
    return tuple(sg.angle(angles) if sg.angle is not None else None for sg in spec.sub_gates)


@dataclass(frozen=True)
class Leaf:
    """Basis-gate factor of the fully expanded decomposition.

    ``angle`` is None exactly for CZ leaves.  ``role`` follows SubGate.
    """

    kind: str
    angle: Optional[AngleExpr]
    role: str


def _compose_role(outer: str, inner: str) -> str:
    # single-qubit factors of a nested composite act on that composite's
    # target, which is the target of the parent as well; two-qubit factors
    # only occur inside "pair"-role composites and keep acting on the pair
    if inner == "pair":
        if outer != "pair":
            raise ValueError("two-qubit factor inside a single-qubit sub-gate")
        return "pair"
    return "target"


def leaf_sequence(kind: str) -> tuple[Leaf, ...]:
    """Recursive expansion of ``kind`` into basis-gate leaves, circuit order."""
    spec = gate_spec(kind)
    if spec.is_basis:
        sg = spec.sub_gates[0]
        return (Leaf(sg.kind, sg.angle, sg.role),)
    leaves: list[Leaf] = []
    for sg in spec.sub_gates:
        if sg.kind in BASIS_GATES:
            leaves.append(Leaf(sg.kind, sg.angle, sg.role))
            continue
        # nested composites in Table I (H, CX) carry no logical angle, so
        # their leaves keep their fixed angle expressions
        inner_spec = gate_spec(sg.kind)
        if inner_spec.n_angles != 0:
            raise ValueError(
                f"nested parameterised composite {sg.kind!r} in {kind!r} is unsupported"
            )
        for leaf in leaf_sequence(sg.kind):
            leaves.append(Leaf(leaf.kind, leaf.angle, _compose_role(sg.role, leaf.role)))
    return tuple(leaves)


def rotation_leaf_count(kind: str) -> int:
    """Number of single-axis rotation leaves (the CZ leaves are excluded)."""
    return sum(1 for leaf in leaf_sequence(kind) if leaf.kind != "CZ")


def leaf_pulse_param_count(kind: str) -> int:
    """Pulse parameters implied by the leaf expansion (must match Table I)."""
    return sum(PULSE_PARAM_COUNTS[leaf.kind] for leaf in leaf_sequence(kind))


def assemble(kind: str, angles=(), lambdas=None) -> np.ndarray:
    """Re-assembled unitary of the leaf expansion of ``kind``.

    Each rotation leaf angle g_m(angles) is multiplied by the matching entry
    of ``lambdas`` (one slot per leaf, CZ slots inert).  The result equals
    ``gate_unitary`` up to a global phase when all scalings are 1.
    """
    spec = gate_spec(kind)
    angles = tuple(np.atleast_1d(np.asarray(angles, dtype=float)).ravel())
    leaves = leaf_sequence(kind)
    if lambdas is None:
        lambdas = np.ones(len(leaves))
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (len(leaves),):
        raise ValueError(
            f"{kind} expands into {len(leaves)} leaves, got {lambdas.size} scalings"
        )
    dim = 2 ** spec.arity
    out = np.eye(dim, dtype=complex)
    for leaf, lam in zip(leaves, lambdas):
        if leaf.kind == "CZ":
            mat = gate_unitary("CZ")
        else:
            mat = gate_unitary(leaf.kind, (leaf.angle(angles) * lam,))
            if spec.arity == 2 and leaf.role == "target":
                mat = np.kron(np.eye(2, dtype=complex), mat)
        out = mat @ out
    return out
