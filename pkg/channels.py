# channels.py
"""Quantum operations on V-configuration qutrits.

Amplitude damping, the null-result weak measurement, its reversal and the
trit-flip, together with the bookkeeping for applying them to one- and
two-qutrit density matrices.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from linalg import (
    HERMITIAN_TOL,
    DegenerateOutcomeError,
    InvalidInputError,
    as_matrix,
    dagger,
    eigenvalues_hermitian,
    hermitian_part,
    is_hermitian,
    kron,
    max_norm,
    trace,
)

logger = logging.getLogger(__name__)

DEGENERATE_PROBABILITY = 1e-12
PROBABILITY_SLACK = 1e-9


def unit_interval(name, value, allow_one):
    if isinstance(value, bool):
        raise InvalidInputError(f"{name} must be a real number, got {value!r}")
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a real number, got {value!r}") from None
    upper_ok = value <= 1.0 if allow_one else value < 1.0
    if not (value >= 0.0 and upper_ok):
        bound = "[0, 1]" if allow_one else "[0, 1)"
        raise InvalidInputError(f"{name} must lie in {bound}, got {value}")
    return value


@dataclass(frozen=True)
class DampingParams:
    """Decay probabilities of the two upper levels of one qutrit.

    g1 drives |1> -> |0>, g2 drives |2> -> |0>.
    """

    g1: float
    g2: float

    def __post_init__(self):
        object.__setattr__(self, "g1", unit_interval("g1", self.g1, allow_one=True))
        object.__setattr__(self, "g2", unit_interval("g2", self.g2, allow_one=True))

    @classmethod
    def symmetric(cls, decay):
        return cls(decay, decay)

    def scaled(self, factor):
        """Both rates multiplied by ``factor`` and clipped to [0, 1]."""
        return DampingParams(min(max(self.g1 * factor, 0.0), 1.0), min(max(self.g2 * factor, 0.0), 1.0))


@dataclass(frozen=True)
class WeakMeasurementParams:
    """Strengths of the null-result weak measurement (strength 1 is a projective collapse)."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", unit_interval("p", self.p, allow_one=False))
        object.__setattr__(self, "q", unit_interval("q", self.q, allow_one=False))

    @classmethod
    def symmetric(cls, strength):
        return cls(strength, strength)


@dataclass(frozen=True)
class ReversalParams:
    pr: float
    qr: float

    def __post_init__(self):
        object.__setattr__(self, "pr", unit_interval("pr", self.pr, allow_one=False))
        object.__setattr__(self, "qr", unit_interval("qr", self.qr, allow_one=False))

    @classmethod
    def symmetric(cls, strength):
        return cls(strength, strength)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite 3x3 or 9x9 matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape not in ((3, 3), (9, 9)):
            raise InvalidInputError(f"Density matrix must be 3x3 or 9x9, got {m.shape}")
        if not is_hermitian(m, HERMITIAN_TOL):
            raise InvalidInputError("Density matrix is not Hermitian")
        tr = trace(m)
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise InvalidInputError(f"Density matrix trace is {tr.real:.12g}, expected 1")
        smallest = float(eigenvalues_hermitian(m)[0])
        if smallest < -HERMITIAN_TOL:
            raise InvalidInputError(f"Density matrix is not positive semidefinite (min eigenvalue {smallest:.3e})")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, m):
        """Re-symmetrize then validate."""
        return cls(hermitian_part(m))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def populations(self):
        return np.real(np.diag(self.matrix)).copy()

    def partial_trace(self, keep):
        """Reduced state of qutrit ``keep`` (0 = A, 1 = B) of a two-qutrit state."""
        if self.dim != 9:
            raise InvalidInputError("Partial trace needs a two-qutrit (9x9) state")
        blocks = self.matrix.reshape(3, 3, 3, 3)
        if keep == 0:
            reduced = np.einsum("jkmk->jm", blocks)
        elif keep == 1:
            reduced = np.einsum("jkjm->km", blocks)
        else:
            raise InvalidInputError(f"keep must be 0 or 1, got {keep!r}")
        return DensityMatrix.from_matrix(reduced)

    def allclose(self, other, atol=1e-12):
        return max_norm(self.matrix - other.matrix) <= atol


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Ordered Kraus operators of a trace-preserving completely positive map."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(op) for op in self.operators)
        if not ops:
            raise InvalidInputError("A channel needs at least one Kraus operator")
        shape = ops[0].shape
        if shape[0] != shape[1] or any(op.shape != shape for op in ops):
            raise InvalidInputError("Kraus operators must share one square shape")
        if self.completeness_error(ops) > HERMITIAN_TOL:
            raise InvalidInputError("Kraus operators do not satisfy sum E^dagger E = I")
        object.__setattr__(self, "operators", ops)

    @staticmethod
    def completeness_error(ops):
        total = sum(dagger(op) @ op for op in ops)
        return max_norm(total - np.eye(ops[0].shape[0]))

    @property
    def dim(self):
        return self.operators[0].shape[0]


@dataclass(frozen=True, eq=False)
class SelectiveOperation:
    """A single kept measurement branch; its operator norm may not exceed 1."""

    operator: np.ndarray

    def __post_init__(self):
        op = as_matrix(self.operator)
        if op.shape[0] != op.shape[1]:
            raise InvalidInputError(f"Measurement operator must be square, got {op.shape}")
        if self.norm_of(op) > 1.0 + PROBABILITY_SLACK:
            raise InvalidInputError("Measurement operator has a singular value above 1")
        object.__setattr__(self, "operator", op)

    @staticmethod
    def norm_of(op):
        return float(np.linalg.norm(op, 2))

    def rescaled(self):
        """Same state update, largest singular value pushed to 1 (highest success probability)."""
        norm = self.norm_of(self.operator)
        if norm <= 0.0:
            raise DegenerateOutcomeError("Cannot rescale a zero measurement operator")
        return SelectiveOperation(np.asarray(self.operator) / norm)


@dataclass(frozen=True, eq=False)
class SelectiveOutcome:
    state: DensityMatrix
    probability: float


def amplitude_damping_kraus(params):
    """Three-operator damping channel for the V-configuration qutrit.

    The two decay paths emit into distinguishable modes, so |1> and |2>
    lose population independently with no interference between them.
    """
    if not isinstance(params, DampingParams):
        raise InvalidInputError("amplitude_damping_kraus expects DampingParams")
    e0 = np.diag([1.0, math.sqrt(1.0 - params.g1), math.sqrt(1.0 - params.g2)])
    e1 = np.zeros((3, 3))
    e1[0, 1] = math.sqrt(params.g1)
    e2 = np.zeros((3, 3))
    e2[0, 2] = math.sqrt(params.g2)
    return KrausChannel((e0, e1, e2))


def weak_measurement_operator(params):
    """Null-result branch M3 = diag(1, sqrt(1-p), sqrt(1-q)); click branches are discarded."""
    if not isinstance(params, WeakMeasurementParams):
        raise InvalidInputError("weak_measurement_operator expects WeakMeasurementParams")
    return SelectiveOperation(np.diag([1.0, math.sqrt(1.0 - params.p), math.sqrt(1.0 - params.q)]))


def reversal_operator(params):
    if not isinstance(params, ReversalParams):
        raise InvalidInputError("reversal_operator expects ReversalParams")
    pr, qr = params.pr, params.qr
    return SelectiveOperation(np.diag([math.sqrt((1.0 - pr) * (1.0 - qr)), math.sqrt(1.0 - qr), math.sqrt(1.0 - pr)]))


def trit_flip():
    """Cyclic shift F|0> = |1>, F|1> = |2>, F|2> = |0>."""
    return as_matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])


def inverse_weak_measurement(params):
    m3 = weak_measurement_operator(params).operator
    return as_matrix(np.diag(1.0 / np.real(np.diag(m3))))


def reversal_via_trit_flip(params):
    """Reversal realised as the sequence F, M3, F, M3, F of the same strengths."""
    f = trit_flip()
    m3 = weak_measurement_operator(params).operator
    return SelectiveOperation(f @ m3 @ f @ m3 @ f)


def _require_two_qutrit(rho):
    if not isinstance(rho, DensityMatrix) or rho.dim != 9:
        raise InvalidInputError("Expected a two-qutrit (9x9) DensityMatrix")


def _require_single_qutrit_ops(*ops):
    for op in ops:
        if op.shape != (3, 3):
            raise InvalidInputError(f"Single-qutrit operators must be 3x3, got {op.shape}")


def apply_channel(rho, channel):
    """Kraus sum on a one-qutrit state."""
    if not isinstance(rho, DensityMatrix) or rho.dim != channel.dim:
        raise InvalidInputError("Channel and state dimensions differ")
    m = rho.matrix
    out = sum(e @ m @ e.conj().T for e in channel.operators)
    return DensityMatrix.from_matrix(out)


def apply_channel_both(rho, channel_a, channel_b):
    """Independent local channels on each qutrit: sum_jk (E_j x F_k) rho (E_j x F_k)^dagger."""
    _require_two_qutrit(rho)
    _require_single_qutrit_ops(*channel_a.operators, *channel_b.operators)
    m = rho.matrix
    out = np.zeros((9, 9), dtype=np.complex128)
    for ea in channel_a.operators:
        for eb in channel_b.operators:
            k = kron(ea, eb)
            out += k @ m @ k.conj().T
    return DensityMatrix.from_matrix(out)


def _select(rho, op):
    unnormalized = op @ rho.matrix @ op.conj().T
    probability = trace(unnormalized).real
    if probability <= DEGENERATE_PROBABILITY:
        raise DegenerateOutcomeError(f"Selective outcome probability {probability:.3e} is degenerate")
    state = DensityMatrix.from_matrix(unnormalized / probability)
    return SelectiveOutcome(state, min(max(probability, 0.0), 1.0))


def apply_selective(rho, operation):
    if not isinstance(rho, DensityMatrix) or rho.dim != operation.operator.shape[0]:
        raise InvalidInputError("Measurement and state dimensions differ")
    return _select(rho, operation.operator)


def apply_selective_both(rho, operation_a, operation_b):
    """Post-select on M = M_A x M_B; returns the renormalized state and its probability."""
    _require_two_qutrit(rho)
    _require_single_qutrit_ops(operation_a.operator, operation_b.operator)
    outcome = _select(rho, kron(operation_a.operator, operation_b.operator))
    logger.debug("Selective outcome probability %.6g", outcome.probability)
    return outcome


def outcome_probability(rho, operation_a, operation_b):
    """tr(M^dagger M rho), the branch probability without forming the post-state."""
    _require_two_qutrit(rho)
    m = kron(operation_a.operator, operation_b.operator)
    return float(trace(m.conj().T @ m @ rho.matrix).real)
