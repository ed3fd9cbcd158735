"""Exact simplex against hand values, the vertex oracle, and the float twin."""

import random
from fractions import Fraction

import pytest

from helpers import random_lp
from mcmrcap.errors import SolverError
from mcmrcap.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LpModel,
    solve_lp,
    verify_ray,
    verify_solution,
    vertex_enumeration_optimum,
)

F = Fraction


def _two_var_model():
    model = LpModel()
    model.add_var("x", F(1))
    model.add_var("y", F(1))
    model.add_le("r1", {"x": F(1), "y": F(2)}, F(4))
    model.add_le("r2", {"x": F(3), "y": F(1)}, F(6))
    return model


def test_known_optimum():
    sol = solve_lp(_two_var_model())
    assert sol.status == OPTIMAL
    assert sol.value == F(14, 5)
    assert sol.assignment == {"x": F(8, 5), "y": F(6, 5)}
    assert verify_solution(_two_var_model(), sol)


def test_float_backend_agrees():
    sol = solve_lp(_two_var_model(), backend="float")
    assert sol.status == OPTIMAL
    assert abs(sol.value - 2.8) < 1e-9


def test_equality_constraint():
    model = LpModel()
    model.add_var("x", F(1))
    model.add_var("y", F(0))
    model.add_eq("pin", {"x": F(1), "y": F(1)}, F(2))
    sol = solve_lp(model)
    assert sol.status == OPTIMAL and sol.value == F(2)


def test_infeasible_detected():
    model = LpModel()
    model.add_var("x", F(1))
    model.add_eq("pin", {"x": F(1)}, F(-3))
    assert solve_lp(model).status == INFEASIBLE


def test_unbounded_detected_with_ray():
    model = LpModel()
    model.add_var("x", F(1))
    model.add_var("y", F(0))
    model.add_le("r1", {"y": F(1)}, F(5))
    sol = solve_lp(model)
    assert sol.status == UNBOUNDED
    assert verify_ray(model, sol)


def test_duplicate_variable_rejected():
    model = LpModel()
    model.add_var("x")
    with pytest.raises(SolverError):
        model.add_var("x")


def test_deterministic_resolve():
    model = _two_var_model()
    first = solve_lp(model)
    second = solve_lp(model)
    assert first.assignment == second.assignment
    assert first.pivots == second.pivots


def test_verifier_rejects_tampered_solutions():
    model = _two_var_model()
    sol = solve_lp(model)
    sol.assignment["x"] += F(1, 7)
    assert not verify_solution(model, sol)
    fresh = solve_lp(model)
    fresh.value += F(1, 9)
    assert not verify_solution(model, fresh)


def test_simplex_matches_vertex_enumeration():
    rng = random.Random(404)
    optimal = infeasible = unbounded = 0
    while optimal < 200:
        model = random_lp(rng)
        sol = solve_lp(model)
        if sol.status == OPTIMAL:
            oracle = vertex_enumeration_optimum(model)
            assert oracle.status == OPTIMAL
            assert sol.value == oracle.value
            assert verify_solution(model, sol)
            optimal += 1
        elif sol.status == INFEASIBLE:
            assert vertex_enumeration_optimum(model).status == INFEASIBLE
            infeasible += 1
        else:
            assert verify_ray(model, sol)
            unbounded += 1
    # the generator must keep exercising all three outcomes
    assert infeasible > 0 and unbounded > 0


def test_float_tracks_exact_on_random_models():
    rng = random.Random(77)
    compared = 0
    while compared < 60:
        model = random_lp(rng)
        exact = solve_lp(model)
        if exact.status != OPTIMAL:
            continue
        approx = solve_lp(model, backend="float")
        assert approx.status == OPTIMAL
        assert abs(approx.value - float(exact.value)) <= 1e-6 * max(1.0, abs(float(exact.value)))
        compared += 1
