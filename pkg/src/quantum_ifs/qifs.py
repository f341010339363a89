"""Quantum iterated function systems on density matrices.

A system holds ``k`` branches. Branch ``i`` carries the dynamics operator
``V_i`` (state map ``F_i(rho) = V_i rho V_i* / tr(V_i rho V_i*)``), an optional
weight operator ``W_i`` (``p_i(rho) = tr(W_i rho W_i*)``) and an optional
potential operator ``H_i`` used by the non-normalized Ruelle operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import (DegenerateBranch, DimensionMismatch, MissingPotential, MissingWeights,
                     NoConvergence, NotTracePreserving, ValidationError)
from .matrixcore import (TOL_PSD, DensityMatrix, as_density, as_matrix, hs_distance,
                         maximally_mixed, sandwich, sandwich_trace, validate_density, _frozen)

TOL_BRANCH = 1e-12
TOL_NORM = 1e-9
# mass allowed on a branch whose image is undefined before it counts as a modelling error
DEGENERATE_WEIGHT = 1e-9

OPERATOR_NORMALIZED = "operator-normalized"
CONSTANT_WEIGHTS = "constant-weights"


@dataclass(frozen=True, eq=False)
class Branch:
    v: np.ndarray
    w: np.ndarray | None = None
    h: np.ndarray | None = None

    def __post_init__(self):
        for name in ("v", "w", "h"):
            m = getattr(self, name)
            if m is not None:
                object.__setattr__(self, name, _frozen(as_matrix(m)))


@dataclass(frozen=True, eq=False)
class QifsSystem:
    """An immutable QIFS.

    ``normalization_mode`` is inferred: operator-normalized when every branch
    has ``w``, constant-weights when ``constant_weights`` is given, and
    ``None`` for systems that only carry dynamics and potentials (enough for
    the Ruelle eigenproblem, not for the normalized map).
    """

    branches: tuple[Branch, ...]
    constant_weights: tuple[float, ...] | None = None
    tol_norm: float = TOL_NORM
    normalization_mode: str | None = field(init=False, default=None)

    def __post_init__(self):
        branches = tuple(b if isinstance(b, Branch) else Branch(**b) for b in self.branches)
        object.__setattr__(self, "branches", branches)
        if not branches:
            raise ValidationError("a system needs at least one branch", invariant="k>=1")
        n = branches[0].v.shape[0]
        for i, b in enumerate(branches):
            for name in ("v", "w", "h"):
                m = getattr(b, name)
                if m is not None and m.shape != (n, n):
                    raise DimensionMismatch(f"branch {i}: {name} has shape {m.shape}, system dimension is {n}")
        has_w = [b.w is not None for b in branches]
        if self.constant_weights is not None:
            if any(has_w):
                raise ValidationError("give either weight operators or constant weights, not both",
                                      invariant="weights")
            p = tuple(float(x) for x in self.constant_weights)
            if len(p) != len(branches):
                raise DimensionMismatch(f"{len(p)} constant weights for {len(branches)} branches")
            if min(p) < 0 or abs(sum(p) - 1) > self.tol_norm:
                raise ValidationError(f"constant weights must be a probability vector, got {p}",
                                      invariant="normalization")
            object.__setattr__(self, "constant_weights", p)
            object.__setattr__(self, "normalization_mode", CONSTANT_WEIGHTS)
        elif all(has_w):
            dev = normalization_deviation([b.w for b in branches])
            if dev > self.tol_norm:
                raise ValidationError(f"sum W_i* W_i deviates from I by {dev:.3e}", invariant="normalization")
            object.__setattr__(self, "normalization_mode", OPERATOR_NORMALIZED)
        elif any(has_w):
            raise ValidationError("weight operators must be given for all branches or none", invariant="weights")

    @property
    def dim(self) -> int:
        return self.branches[0].v.shape[0]

    @property
    def k(self) -> int:
        return len(self.branches)

    @property
    def v_ops(self) -> list[np.ndarray]:
        return [b.v for b in self.branches]

    @property
    def has_potential(self) -> bool:
        return all(b.h is not None for b in self.branches)

    def weight_ops(self) -> list[np.ndarray]:
        """The ``W_i``; constant weights are realised as ``sqrt(p_i) I``."""
        if self.normalization_mode == OPERATOR_NORMALIZED:
            return [b.w for b in self.branches]
        if self.normalization_mode == CONSTANT_WEIGHTS:
            eye = np.eye(self.dim, dtype=complex)
            return [np.sqrt(p) * eye for p in self.constant_weights]
        raise MissingWeights()

    def potential_ops(self) -> list[np.ndarray]:
        if not self.has_potential:
            raise MissingPotential()
        return [b.h for b in self.branches]

    def with_weights(self, w_ops: Sequence[np.ndarray]) -> "QifsSystem":
        return QifsSystem(tuple(Branch(b.v, w, b.h) for b, w in zip(self.branches, w_ops)),
                          tol_norm=self.tol_norm)

    def with_potentials(self, h_ops: Sequence[np.ndarray]) -> "QifsSystem":
        return QifsSystem(tuple(Branch(b.v, b.w, h) for b, h in zip(self.branches, h_ops)),
                          constant_weights=self.constant_weights, tol_norm=self.tol_norm)

    def is_homogeneous(self, tol: float = 0.0) -> bool:
        if self.normalization_mode != OPERATOR_NORMALIZED:
            return False
        return all(np.max(np.abs(b.v - b.w)) <= tol for b in self.branches)


def make_system(v_ops, w_ops=None, h_ops=None, constant_weights=None, tol_norm: float = TOL_NORM) -> QifsSystem:
    k = len(v_ops)
    w_ops = list(w_ops) if w_ops is not None else [None] * k
    h_ops = list(h_ops) if h_ops is not None else [None] * k
    if len(w_ops) != k or len(h_ops) != k:
        raise DimensionMismatch("operator families must all have k members")
    return QifsSystem(tuple(Branch(v, w, h) for v, w, h in zip(v_ops, w_ops, h_ops)),
                      constant_weights=constant_weights, tol_norm=tol_norm)


def homogeneous_system(v_ops, h_ops=None, tol_norm: float = TOL_NORM) -> QifsSystem:
    """``W_i = V_i``; requires ``sum V_i* V_i = I``."""
    return make_system(v_ops, v_ops, h_ops, tol_norm=tol_norm)


def normalization_deviation(ops: Sequence[np.ndarray]) -> float:
    n = ops[0].shape[0]
    s = sum(o.conj().T @ o for o in ops)
    return float(np.max(np.abs(s - np.eye(n))))


def _rho(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else as_density(rho).matrix


def _weights(sys: QifsSystem, r: np.ndarray) -> np.ndarray:
    if sys.normalization_mode == CONSTANT_WEIGHTS:
        return np.asarray(sys.constant_weights)
    return np.clip([sandwich_trace(w, r) for w in sys.weight_ops()], 0.0, 1.0)


def branch_prob(sys: QifsSystem, i: int, rho) -> float:
    """``p_i(rho) = tr(W_i rho W_i*)`` clamped to ``[0, 1]``, or the stored constant."""
    if sys.normalization_mode == CONSTANT_WEIGHTS:
        return sys.constant_weights[i]
    w = sys.weight_ops()[i]
    return float(min(max(sandwich_trace(w, _rho(rho)), 0.0), 1.0))


def branch_probs(sys: QifsSystem, rho) -> np.ndarray:
    return _weights(sys, _rho(rho))


def branch_map(sys: QifsSystem, i: int, rho, tol_branch: float = TOL_BRANCH,
               tol: float = TOL_PSD) -> DensityMatrix:
    r = _rho(rho)
    s = sandwich(sys.branches[i].v, r)
    t = float(np.trace(s).real)
    if t <= tol_branch:
        raise DegenerateBranch(i, t, branch_prob(sys, i, r) if sys.normalization_mode else float("nan"))
    return validate_density(s / t, tol)


def _lambda_raw(sys: QifsSystem, r: np.ndarray, tol_branch: float) -> np.ndarray:
    p = _weights(sys, r)
    out = np.zeros_like(r)
    mass = 0.0
    for i, b in enumerate(sys.branches):
        if p[i] <= tol_branch:
            continue
        s = sandwich(b.v, r)
        t = float(np.trace(s).real)
        if t <= tol_branch:
            if p[i] > DEGENERATE_WEIGHT:
                raise DegenerateBranch(i, t, float(p[i]))
            continue
        out += (p[i] / t) * s
        mass += p[i]
    if mass <= 0:
        raise DegenerateBranch(-1, 0.0, 0.0)
    out /= mass
    return (out + out.conj().T) / 2


def lambda_map(sys: QifsSystem, rho, tol_branch: float = TOL_BRANCH, tol: float = TOL_PSD) -> DensityMatrix:
    """The normalized map ``Lambda(rho) = sum_i p_i(rho) F_i(rho)``.

    Branches with ``p_i(rho) <= tol_branch`` are skipped. A branch whose image
    is undefined but whose weight exceeds ``1e-9`` raises
    :class:`DegenerateBranch`.
    """
    return validate_density(_lambda_raw(sys, _rho(rho), tol_branch), tol)


def ruelle_apply(sys: QifsSystem, rho, potential: Literal["h", "w"] = "h") -> np.ndarray:
    """``sum_i tr(X_i rho X_i*) V_i rho V_i*`` with ``X = H`` or ``X = W``."""
    r = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho, sys.dim)
    xs = sys.potential_ops() if potential == "h" else sys.weight_ops()
    out = np.zeros((sys.dim, sys.dim), dtype=complex)
    for x, b in zip(xs, sys.branches):
        out += sandwich_trace(x, r) * sandwich(b.v, r)
    return (out + out.conj().T) / 2


@dataclass(frozen=True)
class FixedPointResult:
    rho: DensityMatrix
    iterations: int
    residual: float


def fixed_point(sys: QifsSystem, rho0=None, tol: float = 1e-12, max_iter: int = 100_000,
                tol_branch: float = TOL_BRANCH, tol_psd: float = TOL_PSD) -> FixedPointResult:
    """Picard iteration ``rho <- Lambda(rho)`` from ``rho0`` (default ``I/N``).

    Stops when the Hilbert-Schmidt step falls below ``tol``. The limit depends
    on ``rho0`` whenever the system has several invariant states.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    r = (maximally_mixed(sys.dim) if rho0 is None else as_density(rho0, tol_psd)).matrix
    residual = float("inf")
    for n in range(1, max_iter + 1):
        nxt = _lambda_raw(sys, r, tol_branch)
        residual = float(np.linalg.norm(nxt - r))
        r = nxt
        if residual < tol:
            return FixedPointResult(validate_density(r, tol_psd), n, residual)
    raise NoConvergence(f"no fixed point within {max_iter} iterations (last step {residual:.3e})",
                        best=validate_density(r, tol_psd), iterations=max_iter, residual=residual)


def kraus_deviation(sys: QifsSystem) -> float:
    return normalization_deviation(sys.v_ops)


def iterate_cptp(sys: QifsSystem, rho, n: int, tol_norm: float | None = None) -> DensityMatrix:
    """``n``-fold application of the Kraus map ``rho -> sum_i V_i rho V_i*``."""
    tol_norm = sys.tol_norm if tol_norm is None else tol_norm
    dev = kraus_deviation(sys)
    if dev > tol_norm:
        raise NotTracePreserving(dev)
    r = _rho(rho)
    for _ in range(n):
        r = sum(sandwich(v, r) for v in sys.v_ops)
        r = (r + r.conj().T) / 2
    return validate_density(r)


def is_fixed(sys: QifsSystem, rho, tol: float = 1e-10) -> bool:
    return hs_distance(lambda_map(sys, rho), rho) < tol
