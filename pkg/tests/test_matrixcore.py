import numpy as np
import pytest
from hypothesis import given, strategies as st

from quantum_ifs.errors import DimensionMismatch, NotHermitian, NotNormalized, NotPositive, TraceNotOne
from quantum_ifs.matrixcore import (basis_state, bures_distance, diag_state, hermitize, hs_distance,
                                    maximally_mixed, partial_trace_b, projector, pure_state, trace_distance,
                                    validate_density, von_neumann_entropy)
from quantum_ifs.sampling import ginibre, random_density

seeds = st.integers(0, 2**32 - 1)


def test_hermitize_examples():
    np.testing.assert_array_equal(hermitize(np.eye(2)), np.eye(2))
    out = hermitize([[1, 1j], [0, 1]])
    np.testing.assert_allclose(out, [[1, 0.5j], [-0.5j, 1]], atol=0)


@given(seeds)
def test_hermitize_fixes_hermitian(seed):
    g = ginibre(np.random.default_rng(seed), 3)
    h = g + g.conj().T
    assert np.max(np.abs(hermitize(h) - h)) < 1e-15


@pytest.mark.parametrize("m, exc", [
    (np.diag([1.2, -0.2]), NotPositive),
    (np.array([[0.5, 1], [0, 0.5]]), NotHermitian),
    (np.diag([0.5, 0.6]), TraceNotOne),
])
def test_validate_density_rejects(m, exc):
    with pytest.raises(exc):
        validate_density(m)


def test_validate_density_reports_smallest_eigenvalue():
    with pytest.raises(NotPositive) as info:
        validate_density(np.diag([1.2, -0.2]))
    assert info.value.min_eigenvalue == pytest.approx(-0.2)
    assert info.value.invariant == "positive"


def test_validate_density_accepts():
    for m in (np.diag([0.5, 0.5]), np.diag([1 / 3, 2 / 3])):
        np.testing.assert_allclose(validate_density(m).matrix, m)


def test_validate_density_tolerance_is_configurable():
    m = np.diag([1 + 1e-7, -1e-7])
    with pytest.raises(NotPositive):
        validate_density(m)
    validate_density(m, tol=1e-6)


@given(seeds)
def test_validate_after_hermitize_is_idempotent(seed):
    rho = random_density(np.random.default_rng(seed), 3)
    once = validate_density(hermitize(rho.matrix))
    twice = validate_density(hermitize(once.matrix))
    np.testing.assert_array_equal(once.matrix, twice.matrix)


def test_projector_examples():
    np.testing.assert_allclose(projector([1, 0]).matrix, np.diag([1, 0]))
    np.testing.assert_allclose(projector([1 / np.sqrt(2), 1 / np.sqrt(2)]).matrix, np.full((2, 2), 0.5))
    np.testing.assert_allclose(projector([0, 1]).matrix, np.diag([0, 1]))
    with pytest.raises(NotNormalized):
        projector([1, 1])


@given(seeds)
def test_projector_is_a_state(seed):
    v = ginibre(np.random.default_rng(seed), 4, 1).ravel()
    psi = pure_state(v / np.linalg.norm(v))
    validate_density(projector(psi).matrix, tol=1e-12)


def test_distance_examples():
    e0, e1, mix = basis_state(2, 0), basis_state(2, 1), maximally_mixed(2)
    assert hs_distance(e0, e0) == 0
    assert hs_distance(e0, e1) == pytest.approx(np.sqrt(2))
    assert hs_distance(e0, mix) == pytest.approx(np.sqrt(0.5))
    assert trace_distance(e0, e0) == pytest.approx(0, abs=1e-15)
    assert trace_distance(e0, e1) == pytest.approx(2)
    assert trace_distance(e0, mix) == pytest.approx(1)
    assert bures_distance(e0, e0) == pytest.approx(0, abs=1e-7)
    assert bures_distance(e0, e1) == pytest.approx(np.sqrt(2))
    assert bures_distance(e0, mix) == pytest.approx(np.sqrt(2 - np.sqrt(2)))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hs_distance(maximally_mixed(2), maximally_mixed(3))


def test_norm_equivalence_on_500_pairs(rng):
    for _ in range(500):
        n = int(rng.integers(2, 5))
        a, b = random_density(rng, n), random_density(rng, n)
        hs, tr = hs_distance(a, b), trace_distance(a, b)
        assert hs <= tr + 1e-12
        assert tr <= np.sqrt(n) * hs + 1e-12


@pytest.mark.parametrize("metric", [hs_distance, trace_distance, bures_distance])
def test_metric_axioms(metric, rng):
    for _ in range(100):
        a, b, c = (random_density(rng, 3) for _ in range(3))
        assert abs(metric(a, b) - metric(b, a)) < 1e-10
        assert metric(a, c) <= metric(a, b) + metric(b, c) + 1e-10


def test_partial_trace_examples(rng):
    e0, e1 = np.diag([1, 0]), np.diag([0, 1])
    np.testing.assert_allclose(partial_trace_b(np.kron(e0, e1), 2, 2), e0)
    np.testing.assert_allclose(partial_trace_b(np.eye(4) / 4, 2, 2), np.eye(2) / 2)
    rho_a = random_density(rng, 3).matrix
    np.testing.assert_allclose(partial_trace_b(np.kron(rho_a, np.eye(2) / 2), 3, 2), rho_a, atol=1e-15)
    with pytest.raises(DimensionMismatch):
        partial_trace_b(np.eye(4), 3, 2)


def test_partial_trace_keeps_trace(rng):
    for _ in range(100):
        m = ginibre(rng, 6)
        assert abs(np.trace(partial_trace_b(m, 2, 3)) - np.trace(m)) < 1e-12


def test_partial_trace_nonsymmetric_factor():
    # |0><1| (x) |1><1| traces to |0><1| and respects the (i, k) -> i*dim_b + k ordering
    a = np.array([[0, 1], [0, 0]])
    b = np.diag([0, 0, 1])
    np.testing.assert_array_equal(partial_trace_b(np.kron(a, b), 2, 3), a)


def test_von_neumann_examples():
    assert von_neumann_entropy(diag_state([1, 0])) == 0
    assert von_neumann_entropy(maximally_mixed(2)) == pytest.approx(np.log(2))
    assert von_neumann_entropy(diag_state([1 / 3, 2 / 3])) == pytest.approx(np.log(3) - 2 / 3 * np.log(2))


def test_density_matrix_is_read_only():
    rho = maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1
