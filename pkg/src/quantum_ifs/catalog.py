"""Small named systems with known closed-form answers."""

from __future__ import annotations

import numpy as np

from .matrixcore import DensityMatrix, diag_state, matrix_unit
from .measures import AtomicMeasure
from .qifs import QifsSystem, make_system
from .spectral import embed_markov_kraus, check_column_stochastic

_UNITS = ((0, 0), (0, 1), (1, 0), (1, 1))

BETA_FOUR_BRANCH = (5 + np.sqrt(17)) / 2
RHO_FOUR_BRANCH = (4 / (7 + np.sqrt(17))) * np.array([(3 + np.sqrt(17)) / 4, 1.0])


def three_branch(p) -> QifsSystem:
    """Identity plus two rank-one collapses with constant weights ``p``.

    The fixed state is ``diag(p2, p3) / (1 - p1)`` for every start.
    """
    v1 = np.eye(2, dtype=complex)
    v2 = np.array([[1, 1], [0, 0]], dtype=complex)
    v3 = np.array([[0, 0], [1, 1]], dtype=complex)
    return make_system([v1, v2, v3], constant_weights=tuple(p))


def three_branch_fixed(p) -> np.ndarray:
    p1, p2, p3 = p
    return np.diag([p2 / (1 - p1), p3 / (1 - p1)]).astype(complex)


def reflection_pair() -> QifsSystem:
    """Two branches sharing the fixed state ``diag(1/3, 2/3)`` with scalar weights 1/4 and 3/4."""
    r = 3 * np.sqrt(2) / 4
    v1 = np.diag([-1.0, 1.0]).astype(complex)
    v2 = np.array([[0, -r], [-2 * r, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return make_system([v1, v2], [eye / 2, np.sqrt(3) / 2 * eye])


REFLECTION_PAIR_FIXED = np.diag([1 / 3, 2 / 3]).astype(complex)


def phase_pair(p: float, phase1: float = 0.3, phase2: float = -1.1) -> QifsSystem:
    """Homogeneous diagonal system fixing every diagonal state."""
    s = np.diag([1.0, -1.0]).astype(complex)
    v1 = np.exp(1j * phase1) * np.sqrt(p) * s
    v2 = np.exp(1j * phase2) * np.sqrt(1 - p) * s
    return make_system([v1, v2], [v1, v2])


def four_branch_potential() -> QifsSystem:
    """Matrix-unit dynamics with potential traces 4, 1, 2, 1 on diagonal states.

    The dominant eigenpair is ``beta = (5 + sqrt 17)/2`` with diagonal
    :data:`RHO_FOUR_BRANCH`.
    """
    v = [matrix_unit(2, i, j) for i, j in _UNITS]
    row = np.array([[1, 1], [0, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    h = [2j * row, eye, 1j * np.sqrt(2) * row, eye]
    return make_system(v, h_ops=h)


def four_branch_potential_unitary() -> QifsSystem:
    """Same potentials with every dynamics operator replaced by the identity (``beta = 8``)."""
    base = four_branch_potential()
    eye = np.eye(2, dtype=complex)
    return make_system([eye] * 4, h_ops=base.potential_ops())


def markov_measure(p) -> tuple[QifsSystem, AtomicMeasure]:
    """Kraus embedding of ``P`` with the invariant two-atom measure on the basis states."""
    p = check_column_stochastic(p)
    if p.shape != (2, 2):
        raise ValueError("the two-atom measure is defined for 2x2 chains")
    pi = stationary_2x2(p)
    atoms = [(pi[0], diag_state([1, 0])), (pi[1], diag_state([0, 1]))]
    return embed_markov_kraus(p), AtomicMeasure.from_atoms(atoms)


def stationary_2x2(p) -> np.ndarray:
    """Closed form ``pi = (p01, 1 - p00) / (1 - p00 + p01)``."""
    p = np.asarray(p, dtype=float)
    d = 1 - p[0, 0] + p[0, 1]
    return np.array([p[0, 1] / d, (1 - p[0, 0]) / d])


def uniform_unitary(unitaries) -> QifsSystem:
    """Equal weights ``I / sqrt k`` on unitary dynamics."""
    k = len(unitaries)
    n = unitaries[0].shape[0]
    return make_system(list(unitaries), [np.eye(n, dtype=complex) / np.sqrt(k)] * k)


def as_state(m) -> DensityMatrix:
    return DensityMatrix(np.asarray(m, dtype=complex))
