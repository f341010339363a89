"""Exception and warning types shared by every module.

Each error carries an ``exit_code`` so the command line front end can map
failures onto its stable status contract (2 parse/validation, 3 numerical
non-convergence, 4 infeasible/degenerate).
"""

from __future__ import annotations


class QifsError(Exception):
    exit_code = 1


class ValidationError(QifsError):
    """A value violates a named invariant."""

    exit_code = 2

    def __init__(self, message: str, invariant: str | None = None):
        super().__init__(message)
        self.invariant = invariant


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(f"at {path}")
        full = f"{message} ({'; '.join(where)})" if where else message
        super().__init__(full, invariant="parse")
        self.line = line
        self.column = column
        self.path = path


class DimensionMismatch(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, invariant="dimension")


class NotHermitian(ValidationError):
    def __init__(self, deviation: float, tol: float):
        super().__init__(f"matrix is not Hermitian: max |m_ij - conj(m_ji)| = {deviation:.3e} > {tol:.1e}",
                         invariant="hermitian")
        self.deviation = deviation


class NotPositive(ValidationError):
    def __init__(self, min_eigenvalue: float, tol: float):
        super().__init__(f"matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.6g} < -{tol:.1e}",
                         invariant="positive")
        self.min_eigenvalue = min_eigenvalue


class TraceNotOne(ValidationError):
    def __init__(self, trace: complex, tol: float):
        super().__init__(f"trace is {trace:.12g}, expected 1 within {tol:.1e}", invariant="unit-trace")
        self.trace = trace


class NotNormalized(ValidationError):
    def __init__(self, norm_sq: float):
        super().__init__(f"state vector has <psi|psi> = {norm_sq:.12g}, expected 1", invariant="normalized")
        self.norm_sq = norm_sq


class NotStochastic(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, invariant="column-stochastic")


class NotIrreducible(ValidationError):
    def __init__(self, message: str = "stochastic matrix is not irreducible"):
        super().__init__(message, invariant="irreducible")


class NotTracePreserving(ValidationError):
    def __init__(self, deviation: float):
        super().__init__(f"sum V_i* V_i deviates from I by {deviation:.3e}", invariant="trace-preserving")
        self.deviation = deviation


class NotUnitary(ValidationError):
    def __init__(self, index: int, deviation: float):
        super().__init__(f"V_{index} is not unitary (deviation {deviation:.3e})", invariant="unitary")
        self.index = index
        self.deviation = deviation


class MissingWeights(ValidationError):
    def __init__(self, message: str = "system has neither weight operators W_i nor constant weights"):
        super().__init__(message, invariant="weights")


class MissingPotential(ValidationError):
    def __init__(self, message: str = "system has no potential operators H_i"):
        super().__init__(message, invariant="potential")


class ZeroEntry(ValidationError):
    def __init__(self, i: int, j: int):
        super().__init__(f"entry ({i}, {j}) is zero; the reciprocal weight choice needs positive entries",
                         invariant="positive-entries")
        self.index = (i, j)


class NoConvergence(QifsError):
    """Iteration budget exhausted; ``best`` holds the last iterate."""

    exit_code = 3

    def __init__(self, message: str, best=None, iterations: int = 0, residual: float = float("nan"),
                 dominance_warning: bool = False):
        super().__init__(message)
        self.best = best
        self.iterations = iterations
        self.residual = residual
        self.dominance_warning = dominance_warning


class InfeasibleError(QifsError):
    exit_code = 4


class DegenerateBranch(InfeasibleError):
    def __init__(self, index: int, trace: float, weight: float):
        super().__init__(f"branch {index} is degenerate: tr(V rho V*) = {trace:.3e} while its weight is {weight:.3e}")
        self.index = index
        self.trace = trace
        self.weight = weight


class ZeroImage(InfeasibleError):
    def __init__(self, trace: float):
        super().__init__(f"potential annihilates the iterate: tr(L(rho)) = {trace:.3e}")
        self.trace = trace


class DegenerateSystem(InfeasibleError):
    def __init__(self, message: str = "b = c = 0 and a = d: every diagonal state is an eigenstate"):
        super().__init__(message)


class MassLoss(InfeasibleError):
    def __init__(self, lost: float):
        super().__init__(f"degenerate branches carried mass {lost:.3e}")
        self.lost = lost


class CapExceeded(InfeasibleError):
    def __init__(self, words: int, cap: int):
        super().__init__(f"word enumeration needs {words} words, cap is {cap}")
        self.words = words
        self.cap = cap


class LogOfZero(InfeasibleError):
    def __init__(self, index: int, value: float):
        super().__init__(f"logged term for branch {index} is not positive ({value:.3e})")
        self.index = index
        self.value = value


class CoordinateUnusable(InfeasibleError):
    def __init__(self, l: int, m: int, reason: str = "", branch: int | None = None, ratio: complex | None = None):
        if branch is not None:
            reason = f"ratio for branch {branch} is {complex(ratio):.6g}"
        super().__init__(f"coordinate pair ({l}, {m}) is not admissible: {reason}")
        self.pair = (l, m)
        self.branch = branch
        self.ratio = ratio


class ZeroPotentialTrace(InfeasibleError):
    def __init__(self, index: int):
        super().__init__(f"tr(H_{index} rho_beta H_{index}*) vanishes")
        self.index = index


class EmptyFeasibleSet(InfeasibleError):
    def __init__(self, a: float, min_cost: float):
        super().__init__(f"no candidate has cost <= {a:.6g} (cheapest candidate costs {min_cost:.6g})")
        self.a = a
        self.min_cost = min_cost


class DominanceWarning(UserWarning):
    """The reported eigenpair may not be the unique attracting one."""
