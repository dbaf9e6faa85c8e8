
import numpy as np
import pytest

from mqms import (
    DiscreteChannelModel,
    UtilitySpec,
    build_region,
    build_vhat,
    fw_gap,
    membership_margin,
    solve_fairness,
    support_function,
    support_vertex,
)
from conftest import random_bernoulli

SYM = DiscreteChannelModel.bernoulli([[0.5], [0.5]])


def vertex_pool(model):
    """All support vertices over canonical directions with both tie rules."""
    pts = []
    for alpha in build_vhat(model.M, model.N):
        for rule in ("lowest_index", "highest_index"):
            pts.append(support_vertex(model, alpha, tie_rule=rule))
    return pts


# -- utility specs -----------------------------------------------------------


def test_linear_weights_must_be_nonnegative():
    with pytest.raises(ValueError):
        UtilitySpec.weighted_linear([1.0, -0.5])


def test_log_epsilon_must_be_positive():
    with pytest.raises(ValueError):
        UtilitySpec.log_shifted(2, epsilon=0.0)


def test_alpha_fair_excludes_one():
    with pytest.raises(ValueError):
        UtilitySpec.alpha_fair(2, a=1.0)


def test_caps_fold_into_objective():
    spec = UtilitySpec.weighted_linear([1.0, 1.0], caps=[0.2, 10.0])
    assert spec.value([0.5, 0.5]) == pytest.approx(0.7)
    grad = spec.gradient([0.5, 0.5])
    assert grad.tolist() == [0.0, 1.0]  # capped coordinate stops pushing


def test_gradient_matches_finite_differences(rng):
    specs = [
        UtilitySpec.weighted_linear([0.5, 2.0]),
        UtilitySpec.log_shifted(2, epsilon=1e-6),
        UtilitySpec.alpha_fair(2, a=2.0),
        UtilitySpec.alpha_fair(2, a=0.5),
    ]
    pool = vertex_pool(SYM)
    h = 1e-6
    checked = 0
    while checked < 100:
        w = rng.random(len(pool))
        r = 0.9 * np.average(pool, axis=0, weights=w) + 0.02
        for spec in specs:
            grad = spec.gradient(r)
            for n in range(2):
                e = np.zeros(2)
                e[n] = h
                fd = (spec.value(r + e) - spec.value(r - e)) / (2 * h)
                assert abs(grad[n] - fd) <= 1e-4 * max(1.0, abs(fd))
        checked += 1


# -- solve_fairness ------------------------------------------------------------


def test_cap_binds_inside_capacity():
    model = DiscreteChannelModel.bernoulli([[0.5]])
    spec = UtilitySpec.weighted_linear([1.0], caps=[0.3])
    sol = solve_fairness(model, spec, tol=1e-9)
    assert sol.r_star[0] == pytest.approx(0.3, abs=1e-9)
    assert sol.objective == pytest.approx(0.3, abs=1e-9)


def test_symmetric_log_utility_splits_the_facet():
    spec = UtilitySpec.log_shifted(2, epsilon=1e-6)
    sol = solve_fairness(SYM, spec, tol=1e-6, max_iters=10_000, step_rule="line_search")
    assert np.allclose(sol.r_star, [0.375, 0.375], atol=1e-3)
    assert sol.gap <= 1e-6
    assert sol.iterations <= 10_000
    assert (1, 1) in sol.binding


def test_single_weight_rides_to_the_vertex():
    spec = UtilitySpec.weighted_linear([1.0, 0.0])
    sol = solve_fairness(SYM, spec, tol=1e-9)
    assert np.allclose(sol.r_star, [0.5, 0.0], atol=1e-9)
    assert sol.objective == pytest.approx(0.5, abs=1e-9)


def test_linear_matches_vertex_enumeration(rng):
    models = [SYM, random_bernoulli(rng, 2, 2)]
    for model in models:
        pool = vertex_pool(model)
        for _ in range(6):
            w = rng.random(model.N) * 2
            spec = UtilitySpec.weighted_linear(w)
            sol = solve_fairness(model, spec, tol=1e-9)
            best = max(float(np.dot(w, v)) for v in pool)
            assert sol.objective == pytest.approx(best, abs=1e-6)


def test_objective_is_monotone_with_line_search():
    spec = UtilitySpec.log_shifted(2, epsilon=1e-6)
    sol = solve_fairness(SYM, spec, tol=1e-9, step_rule="line_search", keep_trace=True)
    values = [v for _, v, _ in sol.trajectory]
    for a, b in zip(values, values[1:]):
        assert b >= a - 1e-12


def test_iterates_stay_inside_region():
    region = build_region(SYM)
    spec = UtilitySpec.log_shifted(2, epsilon=1e-6)
    for rule in ("open_loop", "line_search"):
        sol = solve_fairness(SYM, spec, tol=1e-8, max_iters=300, step_rule=rule, keep_trace=True)
        for r, _, _ in sol.trajectory:
            assert membership_margin(region, r) >= -1e-9


def test_solution_respects_caps_and_region():
    spec = UtilitySpec.log_shifted(2, epsilon=1e-6, caps=[0.2, 0.6])
    sol = solve_fairness(SYM, spec, tol=1e-8, step_rule="line_search")
    assert (sol.r_star <= np.array([0.2, 0.6]) + 1e-9).all()
    assert membership_margin(build_region(SYM), sol.r_star) >= -1e-7


def test_open_loop_converges_at_coarser_tolerance():
    spec = UtilitySpec.log_shifted(2, epsilon=1e-6)
    sol = solve_fairness(SYM, spec, tol=1e-3, max_iters=10_000)
    assert sol.gap <= 1e-3
    assert np.allclose(sol.r_star, [0.375, 0.375], atol=0.02)


# -- fw_gap -----------------------------------------------------------------------


def test_gap_zero_after_convergence():
    spec = UtilitySpec.log_shifted(2, epsilon=1e-6)
    sol = solve_fairness(SYM, spec, tol=1e-8, step_rule="line_search")
    assert fw_gap(SYM, sol.r_star, spec) <= 1e-6


def test_gap_at_origin_equals_support_value():
    spec = UtilitySpec.weighted_linear([1.0, 1.0])
    assert fw_gap(SYM, [0.0, 0.0], spec) == pytest.approx(support_function(SYM, (1, 1)))


def test_gap_vanishes_on_optimal_face():
    spec = UtilitySpec.weighted_linear([1.0, 0.0])
    assert fw_gap(SYM, [0.5, 0.0], spec) <= 1e-9


def test_gap_rejects_outside_points():
    spec = UtilitySpec.log_shifted(2)
    with pytest.raises(ValueError, match="outside"):
        fw_gap(SYM, [0.6, 0.6], spec)
