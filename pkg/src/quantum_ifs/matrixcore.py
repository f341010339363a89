"""Dense complex matrices, density-matrix validation, metrics and partial trace.

Matrices are plain ``complex128`` numpy arrays. :class:`DensityMatrix` and
:class:`PureState` are thin immutable wrappers produced by the validating
constructors :func:`validate_density` and :func:`pure_state`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, NotHermitian, NotNormalized, NotPositive, TraceNotOne,
                     ValidationError)

TOL_PSD = 1e-9


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    """Coerce ``m`` to a finite, square ``complex128`` array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries", invariant="finite")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitize(m) -> np.ndarray:
    """Return ``(m + m*) / 2``."""
    a = as_matrix(m)
    return (a + a.conj().T) / 2


def real_trace(m: np.ndarray) -> float:
    return float(np.trace(m).real)


def sandwich(x: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``x rho x*``."""
    return x @ rho @ x.conj().T


def sandwich_trace(x: np.ndarray, rho: np.ndarray) -> float:
    """``tr(x rho x*)`` without forming the product twice."""
    return float(np.einsum("ij,jk,ik->", x, rho, x.conj()).real)


def eigvalsh(m: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(m))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state: Hermitian, positive semidefinite, unit trace.

    Build it with :func:`validate_density`; the raw constructor trusts its input.
    """

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.matrix, precision=6)})"

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex, copy=True).ravel()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def pure_state(amplitudes, tol: float = TOL_PSD) -> PureState:
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm_sq = float(np.vdot(psi, psi).real)
    if abs(norm_sq - 1) > tol:
        raise NotNormalized(norm_sq)
    return PureState(psi)


def validate_density(m, tol: float = TOL_PSD) -> DensityMatrix:
    """Check the three state invariants within ``tol`` and wrap the hermitized matrix.

    Raises
    ------
    NotHermitian, NotPositive, TraceNotOne
        Whichever invariant is violated first, in that order.
    """
    if isinstance(m, DensityMatrix):
        m = m.matrix
    a = as_matrix(m)
    deviation = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if deviation > tol:
        raise NotHermitian(deviation, tol)
    h = (a + a.conj().T) / 2
    lowest = float(np.linalg.eigvalsh(h)[0])
    if lowest < -tol:
        raise NotPositive(lowest, tol)
    tr = np.trace(h)
    if abs(tr - 1) > tol:
        raise TraceNotOne(complex(tr), tol)
    return DensityMatrix(h)


def as_density(rho, tol: float = TOL_PSD) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else validate_density(rho, tol)


def maximally_mixed(n: int) -> DensityMatrix:
    return DensityMatrix(np.eye(n, dtype=complex) / n)


def projector(psi: PureState | np.ndarray, tol: float = TOL_PSD) -> DensityMatrix:
    """Rank-one state ``|psi><psi|``."""
    if not isinstance(psi, PureState):
        psi = pure_state(psi, tol)
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()))


def basis_state(n: int, i: int) -> DensityMatrix:
    m = np.zeros((n, n), dtype=complex)
    m[i, i] = 1
    return DensityMatrix(m)


def diag_state(values) -> DensityMatrix:
    return validate_density(np.diag(np.asarray(values, dtype=complex)))


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    x = a.matrix if isinstance(a, DensityMatrix) else as_matrix(a)
    y = b.matrix if isinstance(b, DensityMatrix) else as_matrix(b)
    if x.shape != y.shape:
        raise DimensionMismatch(f"dimensions differ: {x.shape[0]} vs {y.shape[0]}")
    return x, y


def hs_distance(a, b) -> float:
    """Hilbert-Schmidt distance ``sqrt(tr[(a - b)^2])``."""
    x, y = _pair(a, b)
    return float(np.linalg.norm(x - y))


def trace_distance(a, b) -> float:
    """``tr sqrt((a - b)^2)``, the sum of absolute eigenvalues of ``a - b``."""
    x, y = _pair(a, b)
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(x - y)))))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues below zero are clamped first."""
    w, u = np.linalg.eigh(hermitize(m))
    w = np.clip(w, 0.0, None)
    return (u * np.sqrt(w)) @ u.conj().T


def fidelity_root(a, b) -> float:
    """``tr[(a^1/2 b a^1/2)^1/2]``."""
    x, y = _pair(a, b)
    s = psd_sqrt(x)
    w = np.linalg.eigvalsh(hermitize(s @ y @ s))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def bures_distance(a, b) -> float:
    f = min(fidelity_root(a, b), 1.0)
    return float(np.sqrt(max(2.0 * (1.0 - f), 0.0)))


def partial_trace_b(m, dim_a: int, dim_b: int) -> np.ndarray:
    """Trace out the second factor of ``C^dim_a (x) C^dim_b``.

    Index ``(i, k)`` of the composite space maps to row ``i * dim_b + k``.
    """
    a = m.matrix if isinstance(m, DensityMatrix) else as_matrix(m)
    if a.shape[0] != dim_a * dim_b:
        raise DimensionMismatch(f"matrix of size {a.shape[0]} is not {dim_a} x {dim_b}")
    return np.einsum("ikjk->ij", a.reshape(dim_a, dim_b, dim_a, dim_b))


def von_neumann_entropy(rho, tol: float = TOL_PSD) -> float:
    """``-tr(rho log rho)`` in nats; eigenvalues below ``tol`` count as zero."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    w = np.linalg.eigvalsh(hermitize(r))
    w = w[w > tol]
    return float(-np.sum(w * np.log(w)))


def matrix_unit(n: int, i: int, j: int, scale: complex = 1.0) -> np.ndarray:
    """``scale * |i><j|``."""
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = scale
    return e


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    n = u.shape[0]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(n)))) <= tol
