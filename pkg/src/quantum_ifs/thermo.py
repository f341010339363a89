"""Stationary entropy, pressure inequalities and the capacity-cost function.

Every logarithm is natural. Conditional weights below ``1e-15`` contribute
exactly zero to entropies.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .errors import (CoordinateUnusable, DegenerateBranch, EmptyFeasibleSet, LogOfZero, NotIrreducible,
                     NotStochastic, NotUnitary, ValidationError, ZeroPotentialTrace)
from .matrixcore import DensityMatrix, is_unitary, matrix_unit, sandwich, sandwich_trace
from .qifs import (DEGENERATE_WEIGHT, TOL_BRANCH, TOL_NORM, QifsSystem, fixed_point, make_system)
from .spectral import EigenPair, check_column_stochastic

ENTROPY_CUTOFF = 1e-15
LOG_FLOOR = 1e-300


def _xlogx(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    out = np.zeros_like(q)
    mask = q > ENTROPY_CUTOFF
    out[mask] = q[mask] * np.log(q[mask])
    return out


@dataclass(frozen=True)
class _Transitions:
    p: np.ndarray        # p_i(rho_W)
    tau: np.ndarray      # tr(V_i rho_W V_i*)
    joint: np.ndarray    # [i, j] = tr(W_j V_i rho_W V_i* W_j*)
    active: np.ndarray   # branches i with a defined image and positive weight

    @property
    def cond(self) -> np.ndarray:
        """``q[i, j] = joint[i, j] / tau[i]`` on active rows, zero elsewhere."""
        q = np.zeros_like(self.joint)
        q[self.active] = self.joint[self.active] / self.tau[self.active, None]
        return q


def _transitions(sys: QifsSystem, rho_w, tol_branch: float = TOL_BRANCH) -> _Transitions:
    r = rho_w.matrix if isinstance(rho_w, DensityMatrix) else np.asarray(rho_w, dtype=complex)
    w_ops = sys.weight_ops()
    k = sys.k
    p = np.array([sandwich_trace(w, r) for w in w_ops])
    tau = np.zeros(k)
    joint = np.zeros((k, k))
    active = np.zeros(k, dtype=bool)
    for i, b in enumerate(sys.branches):
        s = sandwich(b.v, r)
        tau[i] = float(np.trace(s).real)
        if p[i] <= ENTROPY_CUTOFF:
            continue
        if tau[i] <= tol_branch:
            if p[i] > DEGENERATE_WEIGHT:
                raise DegenerateBranch(i, tau[i], p[i])
            continue
        active[i] = True
        joint[i] = [sandwich_trace(w, s) for w in w_ops]
    return _Transitions(p, tau, joint, active)


def stationary_entropy(sys: QifsSystem, rho_w, tol_branch: float = TOL_BRANCH) -> float:
    """``h_V(W) = -sum_i p_i(rho_W) sum_j q_ij log q_ij``.

    ``q_ij = tr(W_j F_i(rho_W) W_j*)`` is the weight of branch ``j`` after
    branch ``i``. ``rho_w`` must be a fixed state of the normalized map.
    """
    tr = _transitions(sys, rho_w, tol_branch)
    q = tr.cond
    return float(-(tr.p[tr.active] * _xlogx(q[tr.active]).sum(axis=1)).sum()) + 0.0


def stationary_entropy_alt(sys: QifsSystem, rho_w, tol_branch: float = TOL_BRANCH) -> float:
    """Factored form: ``-sum_i p_i/tau_i sum_j J_ij log(J_ij / tau_i)``."""
    tr = _transitions(sys, rho_w, tol_branch)
    total = 0.0
    for i in np.flatnonzero(tr.active):
        inner = 0.0
        for j in range(sys.k):
            jij = tr.joint[i, j]
            if jij / tr.tau[i] > ENTROPY_CUTOFF:
                inner += jij * np.log(jij / tr.tau[i])
        total += tr.p[i] / tr.tau[i] * inner
    return float(-total) + 0.0


def transition_matrix(sys: QifsSystem, rho_w) -> np.ndarray:
    return _transitions(sys, rho_w).cond


def is_irreducible(p) -> bool:
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    m = np.linalg.matrix_power(np.eye(n) + (p > 0), max(n - 1, 1))
    return bool(np.all(m > 0))


def stationary_vector(p, tol: float = 1e-13, max_iter: int = 1_000_000) -> np.ndarray:
    """Power iteration on the lazy chain ``(I + P)/2`` (same fixed vector, aperiodic)."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    lazy = (np.eye(n) + p) / 2
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = lazy @ x
        y /= y.sum()
        if np.max(np.abs(y - x)) < tol:
            return y
        x = y
    return x


def markov_entropy(p, check_irreducible: bool = True, tol: float = TOL_NORM) -> float:
    """``H(P) = -sum_j pi_j sum_i p_ij log p_ij`` for column-stochastic ``P``."""
    try:
        p = check_column_stochastic(p, tol)
    except NotStochastic:
        raise
    if check_irreducible and not is_irreducible(p):
        raise NotIrreducible()
    pi = stationary_vector(p)
    return float(-(pi * _xlogx(p).sum(axis=0)).sum()) + 0.0


@dataclass(frozen=True)
class PressureReport:
    """Terms of ``entropy + potential <= log beta``.

    ``form`` is ``"trace"`` for the inequality with
    ``log(tr(H_j rho_b H_j*) tr(V_j rho_b V_j*))`` and ``"reduced"`` for the
    variant logging ``tr(H_j rho_b H_j*)`` alone.
    """

    entropy_term: float
    potential_term: float
    pressure: float
    bound: float
    gap: float
    equality_residual: float
    beta: float
    form: str = "trace"
    r: tuple[float, ...] = ()


@dataclass(frozen=True)
class CoordinatePressureReport:
    entropy_term: float
    potential_h_term: float
    potential_ratio_term: float
    pressure: float
    bound: float
    gap: float
    equality_residual: float
    beta: float
    coordinate_pair: tuple[int, int]
    ratios: tuple[float, ...] = ()

    @property
    def potential_term(self) -> float:
        return self.potential_h_term + self.potential_ratio_term


def _h_traces(sys: QifsSystem, rho_b: np.ndarray) -> np.ndarray:
    return np.array([sandwich_trace(h, rho_b) for h in sys.potential_ops()])


def _safe_log(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    logs = np.zeros_like(values)
    for j, (x, w) in enumerate(zip(values, weights)):
        if w <= ENTROPY_CUTOFF:
            continue
        if x <= LOG_FLOOR:
            raise LogOfZero(j, float(x))
        logs[j] = np.log(x)
    return logs


def _report(sys, rho_w, eigen, r_terms, form):
    tr = _transitions(sys, rho_w)
    entropy = float(-(tr.p[tr.active] * _xlogx(tr.cond[tr.active]).sum(axis=1)).sum())
    weights = np.clip(tr.p, 0.0, None)
    potential = float(weights @ _safe_log(eigen.beta * r_terms, weights))
    pressure = entropy + potential
    bound = float(np.log(eigen.beta))
    resid = _equality_residual(tr, r_terms)
    return PressureReport(entropy, potential, pressure, bound, bound - pressure, resid, eigen.beta, form,
                          tuple(float(x) for x in r_terms))


def _equality_residual(tr: _Transitions, r_terms: np.ndarray) -> float:
    if not tr.active.any():
        return 0.0
    return float(np.max(np.abs(tr.cond[tr.active] - r_terms[None, :])))


def basic_inequality(sys: QifsSystem, rho_w, eigen: EigenPair) -> PressureReport:
    """Trace form of the pressure inequality with its equality residual.

    The residual is ``max_ij |r_j - q_ij|`` where
    ``r_j = tr(H_j rho_b H_j*) tr(V_j rho_b V_j*) / beta``.
    """
    rb = eigen.rho_beta.matrix
    t_h = _h_traces(sys, rb)
    t_v = np.array([sandwich_trace(v, rb) for v in sys.v_ops])
    return _report(sys, rho_w, eigen, t_h * t_v / eigen.beta, "trace")


def reduced_basic_inequality(sys: QifsSystem, rho_w, eigen: EigenPair) -> PressureReport:
    """``h_V(W) + sum_j p_j(rho_W) log tr(H_j rho_b H_j*) <= log beta``.

    Coincides with :func:`basic_inequality` for unitary dynamics, and with
    the classic matrix inequality for :func:`build_basic_from_classic`.
    Outside those cases the bound is not guaranteed.
    """
    t_h = _h_traces(sys, eigen.rho_beta.matrix)
    return _report(sys, rho_w, eigen, t_h / eigen.beta, "reduced")


def coordinate_ratios(sys: QifsSystem, eigen: EigenPair, l: int, m: int) -> np.ndarray:
    rb = eigen.rho_beta.matrix
    denom = rb[l, m]
    if abs(denom) <= TOL_BRANCH:
        raise CoordinateUnusable(l, m, f"(rho_beta)_{{{l}{m}}} = {abs(denom):.3e} vanishes")
    return np.array([(sandwich(v, rb)[l, m]) / denom for v in sys.v_ops])


def basic_inequality_coords(sys: QifsSystem, rho_w, eigen: EigenPair, l: int, m: int,
                            imag_tol: float = 1e-12) -> CoordinatePressureReport:
    """Coordinate form at the (0-based) entry ``(l, m)`` of the eigen equation.

    Every branch carrying weight needs a real positive ratio
    ``(V_j rho_b V_j*)_lm / (rho_b)_lm``; otherwise the pair is rejected with
    :class:`CoordinateUnusable`.
    """
    ratios = coordinate_ratios(sys, eigen, l, m)
    tr = _transitions(sys, rho_w)
    weights = np.clip(tr.p, 0.0, None)
    for j, (x, w) in enumerate(zip(ratios, weights)):
        if w <= ENTROPY_CUTOFF:
            continue
        if abs(x.imag) > imag_tol or x.real <= LOG_FLOOR:
            raise CoordinateUnusable(l, m, branch=j, ratio=complex(x))
    ratios = ratios.real
    t_h = _h_traces(sys, eigen.rho_beta.matrix)
    entropy = float(-(tr.p[tr.active] * _xlogx(tr.cond[tr.active]).sum(axis=1)).sum())
    pot_h = float(weights @ _safe_log(t_h, weights))
    pot_ratio = float(weights @ _safe_log(ratios, weights))
    pressure = entropy + pot_h + pot_ratio
    bound = float(np.log(eigen.beta))
    resid = _equality_residual(tr, t_h * ratios / eigen.beta)
    return CoordinatePressureReport(entropy, pot_h, pot_ratio, pressure, bound, bound - pressure, resid,
                                    eigen.beta, (l, m), tuple(float(x) for x in ratios))


def admissible_coordinates(sys: QifsSystem, rho_w, eigen: EigenPair) -> list[CoordinatePressureReport]:
    """Reports for every coordinate pair that passes the admissibility checks."""
    out = []
    for l, m in product(range(sys.dim), repeat=2):
        try:
            out.append(basic_inequality_coords(sys, rho_w, eigen, l, m))
        except (CoordinateUnusable, LogOfZero):
            continue
    return out


def perron_left(m, tol: float = 1e-15, max_iter: int = 1_000_000) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and positive left eigenvector of a positive matrix."""
    m = np.asarray(m, dtype=float)
    v = np.full(m.shape[0], 1.0 / m.shape[0])
    beta = 0.0
    for _ in range(max_iter):
        u = v @ m
        beta = float(u.sum())
        u /= beta
        if np.max(np.abs(u - v)) < tol:
            return beta, u
        v = u
    return beta, v


@dataclass(frozen=True)
class ClassicReport:
    entropy_term: float
    potential_term: float
    lhs: float
    bound: float
    gap: float
    beta: float
    pi: tuple[float, ...] = field(default=())


def classic_inequality(a_matrix, q_matrix) -> ClassicReport:
    """``-sum_j pi_j sum_i q_ij log q_ij + sum_j pi_j sum_i q_ij a_ij <= log beta``.

    ``beta`` is the Perron root of the entrywise exponential of ``A`` and
    ``pi`` the stationary vector of the column-stochastic ``Q``.
    """
    a = np.asarray(a_matrix, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValidationError("A must have finite entries", invariant="finite")
    q = check_column_stochastic(q_matrix)
    if np.any(q <= 0):
        raise NotStochastic("Q must have positive entries")
    beta, _ = perron_left(np.exp(a))
    pi = stationary_vector(q)
    entropy = float(-(pi * _xlogx(q).sum(axis=0)).sum())
    potential = float((pi * (q * a).sum(axis=0)).sum())
    lhs = entropy + potential
    bound = float(np.log(beta))
    return ClassicReport(entropy, potential, lhs, bound, bound - lhs, beta, tuple(pi))


def classic_maximizer(a_matrix) -> np.ndarray:
    """``q_ij = e^{a_ij} v_i / (beta v_j)``, the stochastic matrix attaining equality."""
    e = np.exp(np.asarray(a_matrix, dtype=float))
    beta, v = perron_left(e)
    return e * v[:, None] / (beta * v[None, :])


CLASSIC_POSITIONS = ((0, 0), (0, 1), (1, 0), (1, 1))


def build_basic_from_classic(a, q) -> QifsSystem:
    """Four-branch 2x2 system whose pressure terms reproduce the classic inequality.

    Branch ``(i, j)`` gets ``V = |i><j|``, ``W = sqrt(q_ij) |i><j|`` and
    ``H = sqrt(e^{a_ij}) |i>(<0| + <1|)``.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (2, 2) or not np.all(np.isfinite(a)):
        raise ValidationError("A must be a finite 2x2 matrix", invariant="dimension")
    q = check_column_stochastic(q)
    if q.shape != (2, 2):
        raise NotStochastic("Q must be 2x2")
    v_ops, w_ops, h_ops = [], [], []
    for i, j in CLASSIC_POSITIONS:
        v_ops.append(matrix_unit(2, i, j))
        w_ops.append(matrix_unit(2, i, j, np.sqrt(q[i, j])))
        h = np.zeros((2, 2), dtype=complex)
        h[i, :] = np.sqrt(np.exp(a[i, j]))
        h_ops.append(h)
    return make_system(v_ops, w_ops, h_ops)


def maximizer_unitary(sys: QifsSystem, eigen: EigenPair, tol_norm: float = TOL_NORM):
    """Weights attaining equality for unitary dynamics.

    ``W_i = sqrt(tr(H_i rho_b H_i*) / beta) I``, rescaled by ``sqrt(alpha)``
    with ``alpha = beta / sum_i tr(H_i rho_b H_i*)`` so that
    ``sum W_i* W_i = I`` exactly. Returns ``(w_family, alpha)``.
    """
    for i, v in enumerate(sys.v_ops):
        if not is_unitary(v, tol_norm):
            raise NotUnitary(i, float(np.max(np.abs(v.conj().T @ v - np.eye(sys.dim)))))
    t_h = _h_traces(sys, eigen.rho_beta.matrix)
    for i, t in enumerate(t_h):
        if t <= TOL_BRANCH:
            raise ZeroPotentialTrace(i)
    alpha = eigen.beta / float(t_h.sum())
    eye = np.eye(sys.dim, dtype=complex)
    w = [np.sqrt(alpha * t / eigen.beta) * eye for t in t_h]
    return w, alpha


def simplex_grid(k: int, points_per_edge: int = 21) -> list[tuple[float, ...]]:
    """All ``t`` with ``t_i = n_i / (points_per_edge - 1)`` summing to one, lexicographic in ``n``."""
    if points_per_edge < 2:
        raise ValueError("need at least two points per edge")
    d = points_per_edge - 1
    out = []

    def rec(prefix, left):
        if len(prefix) == k - 1:
            out.append(tuple(x / d for x in prefix + [left]))
            return
        for x in range(left, -1, -1):
            rec(prefix + [x], left - x)

    rec([], d)
    return out


@dataclass(frozen=True, eq=False)
class WeightGrid:
    """Candidate families ``W_i = sqrt(t_i) U_i`` over a simplex grid for fixed dynamics."""

    v_ops: tuple[np.ndarray, ...]
    points_per_edge: int = 21
    unitaries: tuple[np.ndarray, ...] | None = None

    @property
    def k(self) -> int:
        return len(self.v_ops)

    def points(self) -> list[tuple[float, ...]]:
        return simplex_grid(self.k, self.points_per_edge)

    def family(self, t: Sequence[float]) -> list[np.ndarray]:
        n = self.v_ops[0].shape[0]
        us = self.unitaries or tuple(np.eye(n, dtype=complex) for _ in self.v_ops)
        return [np.sqrt(ti) * u for ti, u in zip(t, us)]

    def system(self, t: Sequence[float]) -> QifsSystem:
        return make_system(list(self.v_ops), self.family(t))


@dataclass(frozen=True)
class GridRow:
    index: int
    t: tuple[float, ...]
    entropy: float
    cost: float


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QIFS_THREADS", "1")))
    except ValueError:
        return 1


def evaluate_grid(grid: WeightGrid, h_op, rho0=None, tol: float = 1e-13, max_iter: int = 100_000,
                  workers: int | None = None) -> list[GridRow]:
    """Fixed state, entropy and cost ``tr(H rho_W)`` for every grid candidate, in grid order."""
    h_op = np.asarray(h_op, dtype=complex)
    if np.max(np.abs(h_op - h_op.conj().T)) > 1e-12:
        raise ValidationError("cost operator must be Hermitian", invariant="hermitian")
    pts = grid.points()

    def one(item):
        idx, t = item
        s = grid.system(t)
        fp = fixed_point(s, rho0, tol=tol, max_iter=max_iter)
        return GridRow(idx, t, stationary_entropy(s, fp.rho), float(np.trace(h_op @ fp.rho.matrix).real))

    workers = workers or _threads()
    if workers == 1:
        return [one(x) for x in enumerate(pts)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        rows = list(ex.map(one, enumerate(pts)))
    return sorted(rows, key=lambda r: r.index)


def capacity_from_rows(rows: Sequence[GridRow], a: float) -> GridRow:
    feasible = [r for r in rows if r.cost <= a]
    if not feasible:
        raise EmptyFeasibleSet(a, min(r.cost for r in rows))
    best = feasible[0]
    for r in feasible[1:]:
        if r.entropy > best.entropy:
            best = r
    return best


def lagrangian_from_rows(rows: Sequence[GridRow], lam: float) -> tuple[float, GridRow]:
    best = rows[0]
    best_val = best.entropy - lam * best.cost
    for r in rows[1:]:
        val = r.entropy - lam * r.cost
        if val > best_val:
            best, best_val = r, val
    return float(best_val), best


def capacity_cost(grid: WeightGrid, h_op, a: float, **kw):
    """``C(a) = max { h_V(W) : tr(H rho_W) <= a }`` over the grid.

    Returns ``(capacity, argmax_w, cost_at_max)``; ties go to the lowest grid index.
    """
    row = capacity_from_rows(evaluate_grid(grid, h_op, **kw), a)
    return row.entropy, grid.family(row.t), row.cost


def lagrangian_f(grid: WeightGrid, h_op, lam: float, **kw):
    """``F(lambda) = max { h_V(W) - lambda tr(H rho_W) }``; returns ``(value, argmax_w)``."""
    val, row = lagrangian_from_rows(evaluate_grid(grid, h_op, **kw), lam)
    return val, grid.family(row.t)
