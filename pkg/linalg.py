# linalg.py
"""Dense complex matrix helpers sized for one- and two-qutrit problems.

Two-qutrit operators use the 0-based composite index ``3*j + k`` for the
product basis ket |j,k>, i.e. the 1-based label |3j+k+1> shifted down by one.
Every matrix handed out by this module is a read-only complex128 array.
"""
import logging
from typing import NamedTuple

import numpy as np

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
QUTRIT_DIMS = (3, 3)


class QutritSimError(Exception):
    """Base class for every error raised by the simulator."""


class InvalidInputError(QutritSimError, ValueError):
    """An argument violates a documented precondition."""


class NumericalFailureError(QutritSimError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy answer."""


class DegenerateOutcomeError(QutritSimError):
    """A post-selected branch has (numerically) zero probability."""


class HermitianEigenResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _freeze(arr):
    arr.flags.writeable = False
    return arr


def as_matrix(data, rows=None, cols=None):
    """Copy ``data`` into a frozen complex matrix, checking its shape."""
    try:
        arr = np.array(data, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"Cannot build a complex matrix: {e}") from e
    if arr.ndim != 2 or 0 in arr.shape:
        raise InvalidInputError(f"Expected a non-empty 2-D matrix, got shape {arr.shape}")
    if rows is not None and arr.shape[0] != rows:
        raise InvalidInputError(f"Expected {rows} rows, got {arr.shape[0]}")
    if cols is not None and arr.shape[1] != cols:
        raise InvalidInputError(f"Expected {cols} columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("Matrix entries must be finite")
    return _freeze(arr)


def from_entries(rows, cols, entries):
    """Build a matrix from a row-major sequence of ``rows*cols`` entries."""
    if rows <= 0 or cols <= 0:
        raise InvalidInputError("Matrix dimensions must be positive")
    entries = list(entries)
    if len(entries) != rows * cols:
        raise InvalidInputError(
            f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
        )
    return as_matrix(np.reshape(entries, (rows, cols)))


def identity(n):
    return _freeze(np.eye(n, dtype=np.complex128))


def _require_square(a, what="matrix"):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{what} must be square, got shape {a.shape}")


def max_norm(a):
    """Largest absolute entry."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def matmul(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise InvalidInputError(f"Cannot multiply shapes {a.shape} and {b.shape}")
    return _freeze(a @ b)


def dagger(a):
    return _freeze(np.conj(np.asarray(a, dtype=np.complex128)).T.copy())


def kron(a, b):
    """Kronecker product; block (j, k) of the result is ``a[j, k] * b``."""
    return _freeze(np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128)))


def trace(a):
    a = np.asarray(a)
    _require_square(a)
    return complex(np.trace(a))


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and max_norm(a - a.conj().T) <= tol


def hermitian_part(a):
    """(A + A^dagger) / 2, used to wash out round-off drift."""
    a = np.asarray(a, dtype=np.complex128)
    return _freeze((a + a.conj().T) / 2)


def partial_transpose_b(rho, dims=QUTRIT_DIMS):
    """Transpose on the second subsystem.

    out[(j,k),(j',k')] = rho[(j,k'),(j',k)]
    """
    rho = np.asarray(rho, dtype=np.complex128)
    da, db = dims
    n = da * db
    if rho.shape != (n, n):
        raise InvalidInputError(f"Partial transpose expects a {n}x{n} matrix, got {rho.shape}")
    blocks = rho.reshape(da, db, da, db)
    return _freeze(blocks.transpose(0, 3, 2, 1).reshape(n, n).copy())


def _jacobi_eigen(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    # cyclic sweeps of complex Givens rotations G = diag(1, e^{-i phi}) . R(theta)
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(a)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            logger.debug("Jacobi converged after %d sweeps", sweep)
            return np.real(np.diag(a)).copy(), v
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    raise NumericalFailureError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def hermitian_eigen(a, method="lapack"):
    """Full spectrum of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` defers to ``numpy.linalg.eigh``; ``method="jacobi"``
    runs cyclic complex Jacobi rotations until the off-diagonal Frobenius
    norm drops to 1e-12 of the matrix norm (at most 100 sweeps).
    """
    a = np.asarray(a, dtype=np.complex128)
    _require_square(a)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("Matrix entries must be finite")
    if not is_hermitian(a):
        raise InvalidInputError(
            f"Matrix is not Hermitian (max |A - A^dagger| = {max_norm(a - a.conj().T):.3e})"
        )
    a = np.asarray(hermitian_part(a))

    if method == "lapack":
        try:
            values, vectors = np.linalg.eigh(a)
        except np.linalg.LinAlgError as e:
            raise NumericalFailureError(f"eigh failed: {e}") from e
    elif method == "jacobi":
        values, vectors = _jacobi_eigen(a)
    else:
        raise InvalidInputError(f"Unknown eigensolver method: {method!r}")

    order = np.argsort(values, kind="stable")
    values = np.asarray(values[order], dtype=np.float64)
    vectors = np.asarray(vectors[:, order], dtype=np.complex128)
    return HermitianEigenResult(_freeze(values), _freeze(vectors))


def eigenvalues_hermitian(a):
    """Eigenvalues only; skips the eigenvector bookkeeping."""
    a = np.asarray(a, dtype=np.complex128)
    _require_square(a)
    if not is_hermitian(a):
        raise InvalidInputError("Matrix is not Hermitian")
    try:
        return _freeze(np.linalg.eigvalsh(np.asarray(hermitian_part(a))))
    except np.linalg.LinAlgError as e:
        raise NumericalFailureError(f"eigvalsh failed: {e}") from e
