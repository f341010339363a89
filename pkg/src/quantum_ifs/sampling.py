"""Random instances for property checks and experiments.

Every sampler takes a :class:`numpy.random.Generator` so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, NoConvergence
from .matrixcore import DensityMatrix, hermitize, matrix_unit
from .qifs import QifsSystem, fixed_point, make_system
from .spectral import EigenPair, power_eigenpair
from .thermo import stationary_entropy


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """QR of a Ginibre matrix with the phases of ``R`` divided out."""
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(rng: np.random.Generator, n: int, rank: int | None = None) -> DensityMatrix:
    g = ginibre(rng, n, rank or n)
    m = g @ g.conj().T
    return DensityMatrix(hermitize(m / np.trace(m).real))


def inverse_sqrt(s: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(hermitize(s))
    return (u / np.sqrt(w)) @ u.conj().T


def normalize_family(ops) -> list[np.ndarray]:
    """Rescale ``X_i -> X_i S^{-1/2}`` with ``S = sum X_i* X_i`` so that ``sum W_i* W_i = I``."""
    s = sum(x.conj().T @ x for x in ops)
    t = inverse_sqrt(s)
    return [x @ t for x in ops]


def random_weights(rng: np.random.Generator, n: int, k: int) -> list[np.ndarray]:
    return normalize_family([ginibre(rng, n) for _ in range(k)])


def random_matrix_units(rng: np.random.Generator, n: int, k: int) -> list[np.ndarray]:
    """``k`` scaled matrix units at random positions with complex scales."""
    out = []
    for _ in range(k):
        i, j = rng.integers(0, n, size=2)
        out.append(matrix_unit(n, int(i), int(j), complex(ginibre(rng, 1)[0, 0]) + 0.1))
    return out


def random_stochastic(rng: np.random.Generator, n: int, low: float = 0.05, high: float = 0.95) -> np.ndarray:
    """Column-stochastic matrix with entries bounded away from zero.

    For ``n = 2`` the diagonal entries are drawn uniformly in ``[low, high]``;
    larger sizes normalize uniform columns.
    """
    if n == 2:
        a, b = rng.uniform(low, high, size=2)
        return np.array([[a, 1 - b], [1 - a, b]])
    p = rng.uniform(low, high, size=(n, n))
    return p / p.sum(axis=0, keepdims=True)


def random_system(rng: np.random.Generator, n: int, k: int, family: str = "general",
                  with_potential: bool = True) -> QifsSystem:
    """Operator-normalized system with dynamics drawn from ``family``.

    ``family`` is ``"unitary"``, ``"matrix-unit"`` or ``"general"``.
    """
    if family == "unitary":
        v = [haar_unitary(rng, n) for _ in range(k)]
    elif family == "matrix-unit":
        v = random_matrix_units(rng, n, k)
    elif family == "general":
        v = [ginibre(rng, n) for _ in range(k)]
    else:
        raise ValueError(f"unknown dynamics family {family!r}")
    h = [ginibre(rng, n) for _ in range(k)] if with_potential else None
    return make_system(v, random_weights(rng, n, k), h)


FAMILIES = ("unitary", "matrix-unit", "general")


@dataclass(frozen=True)
class PressureCase:
    system: QifsSystem
    rho_w: DensityMatrix
    eigen: EigenPair


def pressure_case(rng: np.random.Generator, n: int, k: int, family: str = "general",
                  tol: float = 1e-13) -> PressureCase | None:
    """Random system with its fixed state and eigenpair, or ``None`` if either is unavailable.

    Rejected draws are those whose iteration does not settle (periodic
    dynamics) or that hit a weighted branch with no image.
    """
    s = random_system(rng, n, k, family)
    try:
        rho_w = fixed_point(s, tol=tol).rho
        eigen = power_eigenpair(s, tol=tol)
        stationary_entropy(s, rho_w)
    except (NoConvergence, InfeasibleError):
        return None
    return PressureCase(s, rho_w, eigen)
