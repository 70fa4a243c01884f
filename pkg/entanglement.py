# entanglement.py
import logging
import math
from dataclasses import dataclass

import numpy as np

from channels import DensityMatrix
from linalg import InvalidInputError, hermitian_eigen, partial_transpose_b

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-12
NEGATIVE_EIGENVALUE_TOL = 1e-10


def _amplitude(name, value):
    if isinstance(value, bool):
        raise InvalidInputError(f"{name} must be a number, got {value!r}")
    try:
        value = complex(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a number, got {value!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidInputError(f"{name} must be finite")
    return value


@dataclass(frozen=True)
class PureState:
    """alpha|00> + beta|11> + gamma|22>"""

    alpha: complex
    beta: complex
    gamma: complex

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, _amplitude(name, getattr(self, name)))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2 + abs(self.gamma) ** 2
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise InvalidInputError(f"Amplitudes are not normalized: |a|^2+|b|^2+|c|^2 = {norm:.15g}")

    @classmethod
    def from_amplitudes(cls, alpha, beta, gamma):
        """Validated constructor; unnormalized amplitudes are rejected, never rescaled."""
        return cls(alpha, beta, gamma)

    @classmethod
    def maximally_entangled(cls):
        a = 1.0 / math.sqrt(3.0)
        return cls(a, a, a)

    @classmethod
    def esd_prone(cls):
        """sqrt(3/8)|00> + sqrt(5/8)|11>, which suffers sudden death under damping."""
        return cls(math.sqrt(3.0 / 8.0), math.sqrt(5.0 / 8.0), 0.0)

    @property
    def excited_weight(self):
        """|beta|^2 + |gamma|^2"""
        return abs(self.beta) ** 2 + abs(self.gamma) ** 2

    def ket(self):
        psi = np.zeros(9, dtype=np.complex128)
        psi[0], psi[4], psi[8] = self.alpha, self.beta, self.gamma
        return psi

    def density_matrix(self):
        psi = self.ket()
        return DensityMatrix.from_matrix(np.outer(psi, psi.conj()))


def make_state(alpha, beta, gamma):
    """|Psi><Psi| with amplitudes at composite indices 0, 4 and 8."""
    return PureState(alpha, beta, gamma).density_matrix()


def partial_transpose_spectrum(rho, method="lapack"):
    if not isinstance(rho, DensityMatrix) or rho.dim != 9:
        raise InvalidInputError("Negativity is defined here for two-qutrit (9x9) states")
    return hermitian_eigen(partial_transpose_b(rho.matrix), method=method).eigenvalues


def negativity(rho, method="lapack"):
    """(||rho^T_B||_1 - 1) / 2, the summed magnitude of negative PT eigenvalues.

    Eigenvalues in (-1e-10, 0) count as zero.
    """
    values = partial_transpose_spectrum(rho, method=method)
    negative = values[values <= -NEGATIVE_EIGENVALUE_TOL]
    return float(-negative.sum()) if negative.size else 0.0


def log_negativity(rho):
    return math.log2(2.0 * negativity(rho) + 1.0)


def is_entangled(rho):
    """PPT test: a negative partial-transpose eigenvalue certifies entanglement."""
    return negativity(rho) > 0.0


def negativity_ratio(n_protected, n_initial):
    if n_initial <= 0:
        raise InvalidInputError("Ratio is undefined for a separable initial state (n_initial <= 0)")
    return n_protected / n_initial
