import numpy as np
import pytest
from hypothesis import given, strategies as st

from quantum_ifs import catalog
from quantum_ifs.errors import (DegenerateBranch, MissingPotential, MissingWeights, NoConvergence,
                                NotTracePreserving, ValidationError)
from quantum_ifs.matrixcore import diag_state, hs_distance, matrix_unit, maximally_mixed, validate_density
from quantum_ifs.qifs import (branch_map, branch_prob, branch_probs, fixed_point, homogeneous_system,
                              iterate_cptp, lambda_map, make_system, ruelle_apply)
from quantum_ifs.sampling import haar_unitary, random_density, random_stochastic, random_system
from quantum_ifs.spectral import embed_markov_kraus

seeds = st.integers(0, 2**32 - 1)
EYE = np.eye(2, dtype=complex)


def test_normalization_is_enforced():
    with pytest.raises(ValidationError) as info:
        make_system([EYE], [1.05 * EYE])
    assert info.value.invariant == "normalization"
    with pytest.raises(ValidationError):
        make_system([EYE, EYE], constant_weights=(0.5, 0.6))


def test_branch_map_examples(rng):
    rho = random_density(rng, 2)
    s = make_system([EYE], [EYE])
    np.testing.assert_allclose(branch_map(s, 0, rho).matrix, rho.matrix)
    collapse = catalog.three_branch((0.5, 0.25, 0.25))
    np.testing.assert_allclose(branch_map(collapse, 1, rho).matrix, np.diag([1, 0]), atol=1e-15)
    u = haar_unitary(rng, 2)
    np.testing.assert_allclose(branch_map(make_system([u], [EYE]), 0, maximally_mixed(2)).matrix, EYE / 2,
                               atol=1e-15)


def test_branch_map_degenerate():
    s = make_system([matrix_unit(2, 0, 0)], [EYE])
    with pytest.raises(DegenerateBranch) as info:
        branch_map(s, 0, diag_state([0, 1]))
    assert info.value.index == 0


def test_branch_prob_examples(rng):
    s = catalog.reflection_pair()
    assert branch_prob(s, 0, random_density(rng, 2)) == pytest.approx(0.25)
    w = [matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)]
    s = make_system([EYE, EYE], w)
    assert branch_prob(s, 0, diag_state([0.3, 0.7])) == pytest.approx(0.3)
    with pytest.raises(MissingWeights):
        branch_prob(make_system([EYE]), 0, maximally_mixed(2))


@given(seeds)
def test_weights_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    s = random_system(rng, 3, int(rng.integers(1, 5)))
    assert abs(branch_probs(s, random_density(rng, 3)).sum() - 1) < 1e-12


@pytest.mark.parametrize("p", [(0.5, 0.25, 0.25), (0.2, 0.7, 0.1), (0.9, 0.05, 0.05)])
def test_three_branch_fixed_point(p):
    s = catalog.three_branch(p)
    res = fixed_point(s, tol=1e-13)
    assert hs_distance(res.rho, catalog.three_branch_fixed(p)) < 1e-10
    assert hs_distance(lambda_map(s, res.rho), res.rho) < 10 * 1e-13


def test_three_branch_fixed_point_from_pure_start():
    s = catalog.three_branch((0.5, 0.25, 0.25))
    start = np.full((2, 2), 0.5)
    res = fixed_point(s, start, tol=1e-13)
    np.testing.assert_allclose(res.rho.matrix, EYE / 2, atol=1e-11)


def test_unitary_branches_fix_maximally_mixed(rng):
    s = make_system([haar_unitary(rng, 3) for _ in range(3)],
                    [np.sqrt(t) * np.eye(3) for t in (0.2, 0.3, 0.5)])
    np.testing.assert_allclose(lambda_map(s, maximally_mixed(3)).matrix, np.eye(3) / 3, atol=1e-15)


def test_reflection_pair_fixed_state():
    s = catalog.reflection_pair()
    rho0 = catalog.REFLECTION_PAIR_FIXED
    np.testing.assert_allclose(lambda_map(s, rho0).matrix, rho0, atol=1e-15)
    for i in range(2):
        np.testing.assert_allclose(branch_map(s, i, rho0).matrix, rho0, atol=1e-15)
    assert hs_distance(fixed_point(s, tol=1e-13).rho, rho0) < 1e-11


@pytest.mark.parametrize("q", [0.1, 0.5, 0.83])
def test_phase_pair_fixes_diagonal_states(q):
    res = fixed_point(catalog.phase_pair(0.3), diag_state([q, 1 - q]))
    assert res.iterations == 1
    np.testing.assert_allclose(res.rho.matrix, np.diag([q, 1 - q]), atol=1e-15)


def test_markov_kraus_fixed_point_closed_form(rng):
    for _ in range(20):
        p = random_stochastic(rng, 2)
        res = fixed_point(embed_markov_kraus(p), tol=1e-14)
        d = 1 - p[0, 0] + p[0, 1]
        np.testing.assert_allclose(res.rho.diagonal(), [p[0, 1] / d, (1 - p[0, 0]) / d], atol=1e-12)


def test_fixed_point_no_convergence():
    s = make_system([matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0)], [EYE])
    with pytest.raises(NoConvergence) as info:
        fixed_point(s, diag_state([0.9, 0.1]), max_iter=50)
    assert info.value.best is not None
    assert info.value.iterations == 50


def test_ruelle_examples():
    s = catalog.four_branch_potential()
    for x in (0.2, 0.7):
        out = ruelle_apply(s, diag_state([x, 1 - x]))
        np.testing.assert_allclose(out, np.diag([4 * x + (1 - x), 2 * x + (1 - x)]), atol=1e-14)
    zero = make_system([EYE, EYE], h_ops=[0 * EYE, 0 * EYE])
    np.testing.assert_array_equal(ruelle_apply(zero, maximally_mixed(2)), np.zeros((2, 2)))
    with pytest.raises(MissingPotential):
        ruelle_apply(make_system([EYE], [EYE]), maximally_mixed(2))


def test_ruelle_trace_on_kraus_embedding(rng):
    p = random_stochastic(rng, 2)
    s = embed_markov_kraus(p)
    out = ruelle_apply(s, maximally_mixed(2), potential="w")
    # tr(W rho W*) = p_ij / 2 and tr(V rho V*) = p_ij / 2 for every unit
    assert np.trace(out).real == pytest.approx(float((p ** 2).sum()) / 4)


def test_lambda_properties_on_500_systems(rng):
    for n in range(500):
        dim = 2 + n % 2
        s = random_system(rng, dim, int(rng.integers(1, 5)), with_potential=False)
        out = lambda_map(s, random_density(rng, dim))
        assert abs(np.trace(out.matrix) - 1) < 1e-12
        validate_density(out.matrix, tol=1e-9)


def test_homogeneous_consistency(rng):
    for _ in range(50):
        p = random_stochastic(rng, 3)
        s = embed_markov_kraus(p)
        rho = random_density(rng, 3)
        direct = sum(v @ rho.matrix @ v.conj().T for v in s.v_ops)
        np.testing.assert_allclose(lambda_map(s, rho).matrix, direct, atol=1e-12)


def test_iterate_cptp_matches_matrix_power(rng):
    for _ in range(30):
        p = random_stochastic(rng, 2)
        rho = random_density(rng, 2)
        for n in range(7):
            lhs = iterate_cptp(embed_markov_kraus(p), rho, n).matrix
            rhs = iterate_cptp(embed_markov_kraus(np.linalg.matrix_power(p, n)), rho, 1).matrix if n else rho.matrix
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_iterate_cptp_converges_to_stationary_columns(rng):
    p = random_stochastic(rng, 2)
    rho = random_density(rng, 2)
    pi = catalog.stationary_2x2(p)
    limit = iterate_cptp(embed_markov_kraus(np.column_stack([pi, pi])), rho, 1)
    np.testing.assert_allclose(iterate_cptp(embed_markov_kraus(p), rho, 400).matrix, limit.matrix, atol=1e-12)


def test_iterate_cptp_requires_trace_preservation():
    s = make_system([0.5 * EYE], [EYE])
    with pytest.raises(NotTracePreserving):
        iterate_cptp(s, maximally_mixed(2), 3)


def test_zero_weight_branch_is_skipped():
    # branch 0 annihilates |1><1| but carries no weight there
    s = make_system([matrix_unit(2, 0, 0), EYE], [matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)])
    np.testing.assert_allclose(lambda_map(s, diag_state([0, 1])).matrix, np.diag([0, 1]))


def test_identity_chain_fixes_every_diagonal_state():
    s = homogeneous_system([matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)])
    for q in (0.0, 0.4, 1.0):
        np.testing.assert_allclose(lambda_map(s, diag_state([q, 1 - q])).matrix, np.diag([q, 1 - q]))
