"""Eigenpairs ``L_H(rho) = beta rho`` of the non-normalized Ruelle operator.

Also holds the closed-form solver for the diagonal 2x2 template and the
constructors that embed a column-stochastic matrix into QIFS form.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (DegenerateSystem, DominanceWarning, NoConvergence, NotStochastic, ValidationError,
                     ZeroEntry, ZeroImage)
from .matrixcore import (TOL_PSD, DensityMatrix, as_density, matrix_unit, maximally_mixed,
                         validate_density)
from .qifs import TOL_BRANCH, TOL_NORM, QifsSystem, homogeneous_system, make_system, ruelle_apply

log = logging.getLogger(__name__)

# consecutive iterations showing a period-2 pattern before giving up
PERIOD2_WINDOW = 50


@dataclass(frozen=True)
class EigenPair:
    beta: float
    rho_beta: DensityMatrix
    residual: float
    iterations: int = 0
    unique: bool | None = None


def eigen_residual(sys: QifsSystem, beta: float, rho, potential: str = "h") -> float:
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return float(np.linalg.norm(ruelle_apply(sys, r, potential) - beta * r))


def _power(sys, r, tol, max_iter, tol_branch, potential):
    prev2 = None
    streak = 0
    step = float("inf")
    for n in range(1, max_iter + 1):
        img = ruelle_apply(sys, r, potential)
        t = float(np.trace(img).real)
        if t <= tol_branch:
            raise ZeroImage(t)
        nxt = img / t
        step = float(np.linalg.norm(nxt - r))
        if step < tol:
            return nxt, t, n, step
        # returning to the state of two steps back while still moving: a 2-cycle
        if prev2 is not None and step > 100 * tol and np.linalg.norm(nxt - prev2) < tol:
            streak += 1
            if streak >= PERIOD2_WINDOW:
                raise NoConvergence(f"power iteration oscillates with period 2 (step {step:.3e})",
                                    best=validate_density(nxt), iterations=n, residual=step,
                                    dominance_warning=True)
        else:
            streak = 0
        prev2, r = r, nxt
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations (step {step:.3e})",
                        best=validate_density(r), iterations=max_iter, residual=step)


def power_eigenpair(sys: QifsSystem, rho0=None, tol: float = 1e-12, max_iter: int = 100_000,
                    tol_branch: float = TOL_BRANCH, potential: Literal["h", "w"] = "h",
                    check_unique: bool = False) -> EigenPair:
    """Trace-normalized power iteration ``sigma <- L(sigma) / tr L(sigma)``.

    ``beta`` is the trace of the last image, so ``L(rho) = beta rho`` holds
    with ``tr(rho) = 1`` at the limit. With ``check_unique`` the iteration is
    repeated from a pure start state; a different limit emits a
    :class:`DominanceWarning` and sets ``unique=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    start = maximally_mixed(sys.dim) if rho0 is None else as_density(rho0)
    r, beta, n, _ = _power(sys, start.matrix, tol, max_iter, tol_branch, potential)
    rho = validate_density(r)
    unique = None
    if check_unique:
        alt = np.zeros((sys.dim, sys.dim), dtype=complex)
        alt[0, 0] = 1.0
        alt = 0.5 * alt + 0.5 * start.matrix
        try:
            r2, beta2, _, _ = _power(sys, alt, tol, max_iter, tol_branch, potential)
            unique = bool(np.linalg.norm(r2 - r) < 1e3 * tol and abs(beta2 - beta) < 1e3 * tol * max(1, beta))
        except (NoConvergence, ZeroImage):
            unique = False
        if not unique:
            warnings.warn("eigenpair depends on the start state; reported pair may not be dominant",
                          DominanceWarning, stacklevel=2)
    return EigenPair(beta, rho, eigen_residual(sys, beta, rho, potential), n, unique)


@dataclass(frozen=True)
class ClosedForm2x2:
    """Both roots of the diagonal 2x2 eigenproblem, ``plus`` first."""

    eigenvalues: tuple[float, float]
    states: tuple[DensityMatrix, DensityMatrix]
    zeta: float

    @property
    def beta(self) -> float:
        return self.eigenvalues[0]

    @property
    def rho_beta(self) -> DensityMatrix:
        return self.states[0]


def closed_form_2x2(a: float, b: float, c: float, d: float) -> ClosedForm2x2:
    """Solve ``a x + b y = lam x``, ``c x + d y = lam y`` on ``x + y = 1``.

    ``lam = (a + d)/2 +- zeta/2`` with ``zeta = sqrt((d - a)^2 + 4 b c)``.
    The ``c``-normalized eigenstate is used when ``c > 0``; otherwise the
    ``b``-form, and for ``b = c = 0`` the basis states.
    """
    if min(a, b, c, d) < 0:
        raise ValidationError("closed form needs nonnegative coefficients", invariant="nonnegative")
    zeta = float(np.sqrt((d - a) ** 2 + 4 * b * c))
    lams = ((a + d) / 2 + zeta / 2, (a + d) / 2 - zeta / 2)
    states = []
    if b == 0 and c == 0:
        if a == d:
            raise DegenerateSystem()
        big, small = (np.array([1.0, 0.0]), np.array([0.0, 1.0])) if a > d else \
            (np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        states = [big, small]
    else:
        for sign in (1.0, -1.0):
            if c > 0:
                num = a - d + sign * zeta
                den = num + 2 * c
                x, y = (num / den, 2 * c / den) if den != 0 else (np.nan, np.nan)
            else:
                # b-form; the minus root pairs with the + branch here
                den = a - 2 * b - d - sign * zeta
                x, y = (-2 * b / den, (a - d - sign * zeta) / den) if den != 0 else (np.nan, np.nan)
            states.append(np.array([x, y]))
    out = []
    for s in states:
        if np.all(np.isfinite(s)) and np.all(s >= -TOL_PSD):
            out.append(DensityMatrix(np.diag(s.astype(complex))))
        else:
            # the subdominant root of a positive system has a sign-changing eigenvector
            out.append(None)
    return ClosedForm2x2((lams[0], lams[1]), (out[0], out[1]), zeta)


def diagonal_template(sys: QifsSystem, tol: float = 1e-12) -> tuple[float, float, float, float] | None:
    """Coefficients ``(a, b, c, d)`` when ``sys`` matches the diagonal 2x2 template.

    The template: N=2, k=4, each ``V_i`` a scaled matrix unit with all four
    positions present, and each ``H_i* H_i`` with equal diagonal entries so
    that ``tr(H_i rho H_i*)`` is constant on diagonal states.
    """
    if sys.dim != 2 or sys.k != 4 or not sys.has_potential:
        return None
    coeff = {}
    for b in sys.branches:
        nz = np.argwhere(np.abs(b.v) > tol)
        if len(nz) != 1:
            return None
        i, j = map(int, nz[0])
        g = b.h.conj().T @ b.h
        if abs(g[0, 0] - g[1, 1]) > tol:
            return None
        coeff[(i, j)] = coeff.get((i, j), 0.0) + float(g[0, 0].real) * abs(b.v[i, j]) ** 2
    if len(coeff) != 4:
        return None
    return coeff[(0, 0)], coeff[(0, 1)], coeff[(1, 0)], coeff[(1, 1)]


def check_column_stochastic(p, tol: float = TOL_NORM) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise NotStochastic(f"expected a square matrix, got shape {p.shape}")
    if np.any(p < -tol):
        raise NotStochastic("stochastic matrix has negative entries")
    dev = float(np.max(np.abs(p.sum(axis=0) - 1)))
    if dev > tol:
        raise NotStochastic(f"columns sum to 1 only within {dev:.3e}")
    return np.clip(p, 0.0, None)


@dataclass(frozen=True, eq=False)
class StochasticEmbedding:
    """A column-stochastic ``P`` realised as ``L(rho) = sum q_ij V_ij rho V_ij*``.

    ``v_family[n]`` and ``q_choices[n]`` belong to the matrix position
    ``positions[n] = (i, j)``. With ``sqrt_entries`` the ``V_ij`` carry
    ``sqrt(p_ij)`` (the Kraus variant), otherwise ``p_ij``.
    """

    p_matrix: np.ndarray
    v_family: tuple[np.ndarray, ...]
    q_choices: tuple[float, ...]
    positions: tuple[tuple[int, int], ...]
    sqrt_entries: bool = False

    def to_system(self) -> QifsSystem:
        """QIFS whose potential ``H_ij = sqrt(q_ij) I`` reproduces the scalar weights."""
        n = self.p_matrix.shape[0]
        eye = np.eye(n, dtype=complex)
        return make_system(list(self.v_family), h_ops=[np.sqrt(q) * eye for q in self.q_choices])

    def apply(self, rho) -> np.ndarray:
        r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        return sum(q * (v @ r @ v.conj().T) for q, v in zip(self.q_choices, self.v_family))

    def fixed_state(self, tol: float = 1e-13, max_iter: int = 100_000) -> EigenPair:
        return power_eigenpair(self.to_system(), tol=tol, max_iter=max_iter)


def embed_perron(p, q=None, tol: float = TOL_NORM) -> StochasticEmbedding:
    """Matrix units scaled by ``p_ij`` with reciprocal weights ``q_ij = 1/p_ij``.

    Then ``L(diag(x)) = diag(P x)`` and the eigenstate at ``beta = 1`` has the
    stationary vector of ``P`` on its diagonal. A custom ``q`` (same shape as
    ``p``) replaces the reciprocal choice.
    """
    p = check_column_stochastic(p, tol)
    n = p.shape[0]
    if q is None:
        for i in range(n):
            for j in range(n):
                if p[i, j] <= 0:
                    raise ZeroEntry(i, j)
        q = 1.0 / p
    q = np.asarray(q, dtype=float)
    positions = tuple((i, j) for i in range(n) for j in range(n))
    v = tuple(matrix_unit(n, i, j, p[i, j]) for i, j in positions)
    return StochasticEmbedding(p, v, tuple(float(q[i, j]) for i, j in positions), positions)


def perron_alternative_q(p, q00: float = 1.0, q10: float = 1.0) -> np.ndarray:
    """Another 2x2 weight family with the same fixed-state diagonal.

    Free parameters sit on positions (0,0) and (1,0); (0,1) and (1,1) are
    solved from the fixed-point constraint.
    """
    p = check_column_stochastic(p)
    if p.shape != (2, 2):
        raise ValidationError("the alternative family is defined for 2x2 matrices", invariant="dimension")
    q01 = (1 - q00 * p[0, 0] ** 2) / (p[0, 1] * p[1, 0])
    q11 = (1 - q10 * p[1, 0] * p[0, 1]) / p[1, 1] ** 2
    return np.array([[q00, q01], [q10, q11]])


def kraus_family(p, tol: float = TOL_NORM) -> list[np.ndarray]:
    p = check_column_stochastic(p, tol)
    n = p.shape[0]
    return [matrix_unit(n, i, j, np.sqrt(p[i, j])) for i in range(n) for j in range(n)]


def embed_markov_kraus(p, tol: float = TOL_NORM) -> QifsSystem:
    """Homogeneous system with branches ``V_ij = W_ij = sqrt(p_ij) |i><j|``."""
    return homogeneous_system(kraus_family(p, tol))
