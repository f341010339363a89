import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quantum_ifs import catalog
from quantum_ifs.errors import (CoordinateUnusable, EmptyFeasibleSet, LogOfZero, NotIrreducible, NotUnitary,
                                ValidationError, ZeroPotentialTrace)
from quantum_ifs.matrixcore import maximally_mixed
from quantum_ifs.measures import shannon
from quantum_ifs.qifs import fixed_point, make_system
from quantum_ifs.sampling import (FAMILIES, haar_unitary, pressure_case, random_stochastic, random_system,
                                  random_weights)
from quantum_ifs.spectral import embed_markov_kraus, power_eigenpair
from quantum_ifs.thermo import (WeightGrid, admissible_coordinates, basic_inequality, basic_inequality_coords,
                                build_basic_from_classic, capacity_cost, coordinate_ratios, capacity_from_rows, classic_inequality,
                                classic_maximizer, evaluate_grid, is_irreducible, lagrangian_f,
                                lagrangian_from_rows, markov_entropy, maximizer_unitary,
                                reduced_basic_inequality, simplex_grid, stationary_entropy,
                                stationary_entropy_alt, stationary_vector, transition_matrix)

EYE = np.eye(2, dtype=complex)
COLLAPSE = (EYE, np.array([[1, 1], [0, 0]], dtype=complex), np.array([[0, 0], [1, 1]], dtype=complex))
COST_EXCITED = np.diag([0.0, 1.0])


def cases(rng, count, dim=2):
    out, n = [], 0
    while len(out) < count:
        c = pressure_case(rng, dim, 1 + n % 4, FAMILIES[n % 3])
        n += 1
        if c is not None:
            out.append(c)
    return out


# stationary entropy

def test_entropy_bounds_on_random_systems(rng):
    for n in range(200):
        k = 1 + n % 4
        s = random_system(rng, 2, k, with_potential=False)
        try:
            rho = fixed_point(s, tol=1e-12).rho
        except Exception:
            continue
        h = stationary_entropy(s, rho)
        assert -1e-12 <= h <= np.log(k) + 1e-12


def test_entropy_forms_agree_on_500_systems(rng):
    for c in cases(rng, 500):
        assert abs(stationary_entropy(c.system, c.rho_w) - stationary_entropy_alt(c.system, c.rho_w)) < 1e-12


def test_transition_rows_are_distributions(rng):
    for c in cases(rng, 30):
        q = transition_matrix(c.system, c.rho_w)
        np.testing.assert_allclose(q.sum(axis=1), 1, atol=1e-12)


def test_constant_weights_entropy_is_shannon():
    s = catalog.three_branch((0.5, 0.25, 0.25))
    assert stationary_entropy(s, maximally_mixed(2)) == pytest.approx(shannon((0.5, 0.25, 0.25)))


def test_entropy_vanishes_for_one_branch(rng):
    s = make_system([haar_unitary(rng, 2)], [EYE])
    assert stationary_entropy(s, maximally_mixed(2)) == 0


def test_uniform_unitary_entropy_is_log_k(rng):
    us = [haar_unitary(rng, 3) for _ in range(4)]
    s = catalog.uniform_unitary(us)
    assert stationary_entropy(s, np.eye(3) / 3) == pytest.approx(np.log(4))


def test_markov_embedding_entropy_equals_chain_entropy(rng):
    for _ in range(100):
        p = random_stochastic(rng, 2)
        s = embed_markov_kraus(p)
        rho = fixed_point(s, tol=1e-14).rho
        assert abs(stationary_entropy(s, rho) - markov_entropy(p)) < 1e-10


def test_markov_entropy_examples():
    assert markov_entropy(np.full((2, 2), 0.5)) == pytest.approx(np.log(2))
    assert markov_entropy(np.array([[0.0, 1.0], [1.0, 0.0]])) == 0
    p = np.array([[0.8, 0.4], [0.2, 0.6]])
    expected = -(2 / 3) * (0.8 * np.log(0.8) + 0.2 * np.log(0.2)) - (1 / 3) * (0.4 * np.log(0.4) + 0.6 * np.log(0.6))
    assert markov_entropy(p) == pytest.approx(expected, abs=1e-13)


def test_reducible_chain_is_rejected():
    p = np.array([[1.0, 0.3], [0.0, 0.7]])
    assert not is_irreducible(p)
    with pytest.raises(NotIrreducible):
        markov_entropy(p)
    markov_entropy(p, check_irreducible=False)


def test_stationary_vector_periodic_chain():
    np.testing.assert_allclose(stationary_vector(np.array([[0.0, 1.0], [1.0, 0.0]])), [0.5, 0.5])


# pressure inequality

def test_basic_inequality_on_random_systems(rng):
    worst = min(basic_inequality(c.system, c.rho_w, c.eigen).gap for c in cases(rng, 300))
    assert worst >= -1e-9


def test_basic_inequality_report_is_consistent(rng):
    c = cases(rng, 1)[0]
    r = basic_inequality(c.system, c.rho_w, c.eigen)
    assert r.pressure == pytest.approx(r.entropy_term + r.potential_term)
    assert r.bound == pytest.approx(np.log(c.eigen.beta))
    assert r.gap == pytest.approx(r.bound - r.pressure)
    assert r.form == "trace"


def test_random_weights_leave_a_strict_gap(rng):
    gaps = []
    for _ in range(30):
        us = [haar_unitary(rng, 2) for _ in range(3)]
        h = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3)]
        s = make_system(us, random_weights(rng, 2, 3), h)
        rho = fixed_point(s, tol=1e-13).rho
        eigen = power_eigenpair(s, tol=1e-13)
        gaps.append(basic_inequality(s, rho, eigen).gap)
    assert min(gaps) > 1e-6


def test_basic_inequality_log_of_zero():
    s = make_system([EYE, EYE], [EYE / np.sqrt(2)] * 2, [EYE, 0 * EYE])
    eigen = power_eigenpair(s)
    with pytest.raises(LogOfZero) as info:
        basic_inequality(s, maximally_mixed(2), eigen)
    assert info.value.index == 1


def bridge():
    return build_basic_from_classic(np.log([[4.0, 1.0], [2.0, 1.0]]), np.array([[0.7, 0.45], [0.3, 0.55]]))


def test_coordinates_off_diagonal_are_unusable():
    s = bridge()
    eigen = power_eigenpair(s, tol=1e-14)
    rho = fixed_point(s, tol=1e-14).rho
    with pytest.raises(CoordinateUnusable) as info:
        basic_inequality_coords(s, rho, eigen, 0, 1)
    assert info.value.pair == (0, 1)


def test_coordinate_ratios_on_matrix_units():
    s = bridge()
    eigen = power_eigenpair(s, tol=1e-14)
    x, y = eigen.rho_beta.diagonal()
    np.testing.assert_allclose(coordinate_ratios(s, eigen, 0, 0), [1, y / x, 0, 0], atol=1e-12)
    rho = fixed_point(s, tol=1e-14).rho
    # the matrix-unit branches that map into |1> get a zero ratio in either diagonal coordinate
    assert admissible_coordinates(s, rho, eigen) == []


def test_coordinate_form_matches_trace_form_for_unitary_dynamics(rng):
    for _ in range(20):
        v = [haar_unitary(rng, 2) for _ in range(2)]
        w = [np.sqrt(t) * EYE for t in (0.3, 0.7)]
        h = [np.sqrt(c) * EYE for c in rng.uniform(0.2, 2, size=2)]
        s = make_system(v, w, h)
        eigen = power_eigenpair(s, tol=1e-14)
        rho = maximally_mixed(2)
        trace = basic_inequality(s, rho, eigen)
        coord = basic_inequality_coords(s, rho, eigen, 0, 0)
        assert coord.pressure == pytest.approx(trace.pressure, abs=1e-10)
        assert coord.potential_term == pytest.approx(trace.potential_term, abs=1e-10)


def test_reduced_equals_trace_form_for_unitary_dynamics(rng):
    for c in cases(rng, 60):
        if not all(np.allclose(v.conj().T @ v, np.eye(2)) for v in c.system.v_ops):
            continue
        a = basic_inequality(c.system, c.rho_w, c.eigen)
        b = reduced_basic_inequality(c.system, c.rho_w, c.eigen)
        assert a.pressure == pytest.approx(b.pressure, abs=1e-12)


# classic inequality

def test_classic_zero_potential():
    rep = classic_inequality(np.zeros((2, 2)), np.full((2, 2), 0.5))
    assert rep.bound == pytest.approx(np.log(2))
    assert rep.gap == pytest.approx(0, abs=1e-13)


def test_classic_reference_pair():
    a = np.log([[4.0, 1.0], [2.0, 1.0]])
    rep = classic_inequality(a, np.array([[0.7, 0.45], [0.3, 0.55]]))
    assert rep.beta == pytest.approx(catalog.BETA_FOUR_BRANCH)
    assert rep.gap > 0


def test_classic_inequality_on_500_instances(rng):
    for _ in range(500):
        a = rng.normal(size=(2, 2))
        q = random_stochastic(rng, 2)
        assert classic_inequality(a, q).gap >= -1e-12


def test_classic_maximizer_attains_the_bound(rng):
    for _ in range(50):
        a = rng.normal(size=(2, 2))
        q = classic_maximizer(a)
        np.testing.assert_allclose(q.sum(axis=0), 1, atol=1e-12)
        assert abs(classic_inequality(a, q).gap) < 1e-9


def test_classic_requires_positive_q():
    with pytest.raises(ValidationError):
        classic_inequality(np.zeros((2, 2)), np.array([[1.0, 0.5], [0.0, 0.5]]))


def test_classic_bridge(rng):
    for _ in range(50):
        a = rng.normal(size=(2, 2))
        q = random_stochastic(rng, 2)
        s = build_basic_from_classic(a, q)
        rho = fixed_point(s, tol=1e-14).rho
        eigen = power_eigenpair(s, tol=1e-14)
        classic = classic_inequality(a, q)
        reduced = reduced_basic_inequality(s, rho, eigen)
        assert eigen.beta == pytest.approx(classic.beta, rel=1e-10)
        assert reduced.entropy_term == pytest.approx(classic.entropy_term, abs=1e-9)
        assert reduced.pressure == pytest.approx(classic.lhs, abs=1e-9)
        with pytest.raises(CoordinateUnusable):
            basic_inequality_coords(s, rho, eigen, 0, 0)


def test_classic_bridge_fixed_state_is_stationary(rng):
    q = random_stochastic(rng, 2)
    s = build_basic_from_classic(np.zeros((2, 2)), q)
    rho = fixed_point(s, tol=1e-14).rho
    np.testing.assert_allclose(rho.diagonal(), stationary_vector(q), atol=1e-11)


# maximizer for unitary dynamics

@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.1, 1.0, 7.0]))
def test_potential_scaling_leaves_pressure_gap(seed, alpha):
    rng = np.random.default_rng(seed)
    s = random_system(rng, 2, 3, "unitary")
    e1 = power_eigenpair(s, tol=1e-14)
    e2 = power_eigenpair(s.with_potentials([np.sqrt(alpha) * h for h in s.potential_ops()]), tol=1e-14)
    rho = maximally_mixed(2)
    g1 = basic_inequality(s, rho, e1).gap
    g2 = basic_inequality(s.with_potentials([np.sqrt(alpha) * h for h in s.potential_ops()]), rho, e2).gap
    assert abs(g1 - g2) < 1e-9


def test_maximizer_closes_the_gap(rng):
    for _ in range(50):
        s = random_system(rng, 2, 3, "unitary")
        eigen = power_eigenpair(s, tol=1e-14)
        w, alpha = maximizer_unitary(s, eigen)
        assert alpha == pytest.approx(1, abs=1e-10)
        best = s.with_weights(w)
        rep = basic_inequality(best, maximally_mixed(2), eigen)
        assert abs(rep.gap) < 1e-8
        assert rep.equality_residual < 1e-8


def test_maximizer_for_identity_dynamics():
    s = catalog.four_branch_potential_unitary()
    eigen = power_eigenpair(s, tol=1e-14)
    assert eigen.beta == pytest.approx(8)
    w, alpha = maximizer_unitary(s, eigen)
    assert alpha == pytest.approx(1)
    np.testing.assert_allclose([x[0, 0].real for x in w], np.array([2, 1, np.sqrt(2), 1]) / np.sqrt(8))


def test_maximizer_single_branch(rng):
    s = make_system([haar_unitary(rng, 2)], [EYE], [2 * EYE])
    w, alpha = maximizer_unitary(s, power_eigenpair(s))
    np.testing.assert_allclose(w[0], EYE)
    assert alpha == pytest.approx(1)


def test_maximizer_rejects_non_unitary():
    s = catalog.four_branch_potential()
    with pytest.raises(NotUnitary) as info:
        maximizer_unitary(s, power_eigenpair(s))
    assert info.value.index == 0


def test_maximizer_rejects_zero_potential_trace():
    s = make_system([EYE, EYE], [EYE / np.sqrt(2)] * 2, [EYE, 0 * EYE])
    with pytest.raises(ZeroPotentialTrace):
        maximizer_unitary(s, power_eigenpair(s))


# capacity-cost

def test_simplex_grid_shape():
    pts = simplex_grid(3, 21)
    assert len(pts) == 231
    assert pts[0] == (1.0, 0.0, 0.0)
    assert all(abs(sum(t) - 1) < 1e-12 for t in pts)
    assert simplex_grid(2, 3) == [(1.0, 0.0), (0.5, 0.5), (0.0, 1.0)]


@pytest.fixture(scope="module")
def collapse_rows():
    return evaluate_grid(WeightGrid(COLLAPSE, 11), COST_EXCITED)


def test_capacity_is_monotone_in_the_budget(collapse_rows):
    values = [capacity_from_rows(collapse_rows, a).entropy for a in np.linspace(0.05, 0.6, 12)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_capacity_empty_feasible_set(collapse_rows):
    with pytest.raises(EmptyFeasibleSet):
        capacity_from_rows(collapse_rows, -0.1)


def test_capacity_grid_identity_dynamics():
    grid = WeightGrid((EYE, EYE, EYE), 4)
    cap, family, cost = capacity_cost(grid, COST_EXCITED, 0.5)
    assert cap == pytest.approx(np.log(3), abs=1e-12)
    assert cost == pytest.approx(0.5)
    assert len(family) == 3


def test_lagrangian_dual_with_nonnegative_multiplier(collapse_rows):
    # for a lambda >= 0 maximizer, its cost is a budget where the capacity is reached by that same point
    for lam in (0.0, 0.5, 1.0, 2.0):
        val, row = lagrangian_from_rows(collapse_rows, lam)
        cap = capacity_from_rows(collapse_rows, row.cost)
        assert cap.entropy == pytest.approx(row.entropy, abs=1e-12)
        assert cap.entropy >= max(r.entropy for r in collapse_rows if r.cost <= row.cost) - 1e-12


def test_lagrangian_maximizer_cost_drifts_down_with_lambda(collapse_rows):
    costs = [lagrangian_from_rows(collapse_rows, lam)[1].cost for lam in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))


def test_lagrangian_f_value_formula():
    grid = WeightGrid(COLLAPSE, 6)
    val, family = lagrangian_f(grid, COST_EXCITED, 1.0)
    rows = evaluate_grid(grid, COST_EXCITED)
    assert val == pytest.approx(max(r.entropy - r.cost for r in rows))


def test_cost_operator_must_be_hermitian():
    with pytest.raises(ValidationError):
        evaluate_grid(WeightGrid(COLLAPSE, 3), np.array([[0, 1], [0, 0]]))


def test_threaded_grid_is_deterministic(monkeypatch):
    grid = WeightGrid(COLLAPSE, 8)
    serial = evaluate_grid(grid, COST_EXCITED, workers=1)
    monkeypatch.setenv("QIFS_THREADS", "4")
    threaded = evaluate_grid(grid, COST_EXCITED)
    assert serial == threaded


def test_grid_with_unitaries(rng):
    us = tuple(haar_unitary(rng, 2) for _ in range(3))
    grid = WeightGrid(COLLAPSE, 4, us)
    t = grid.points()[3]
    for w, u, ti in zip(grid.family(t), us, t):
        np.testing.assert_allclose(w, np.sqrt(ti) * u)
    # same weight probabilities as the plain grid, so the same entropies
    plain = evaluate_grid(WeightGrid(COLLAPSE, 4), COST_EXCITED)
    rotated = evaluate_grid(grid, COST_EXCITED)
    np.testing.assert_allclose([r.entropy for r in plain], [r.entropy for r in rotated], atol=1e-9)

