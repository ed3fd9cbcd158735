"""Acceptance checks for the whole toolkit.

Every criterion is one function: exact-arithmetic checks compare rationals
with zero tolerance, geometric float checks allow 1e-9. Collected by pytest
like any other module; running the file directly prints one PASS/FAIL line
per criterion.
"""

import functools
import math
import random
import sys
import time
from fractions import Fraction

from helpers import load_flows, load_network, load_placement, random_lp
from mcmrcap.capacity import (
    MIN_THROUGHPUT,
    MULTI_CHANNEL,
    SINGLE_CHANNEL,
    TOTAL_THROUGHPUT,
    TRANSPORT,
    Objective,
    audit_result,
    compare_routing,
    conditional_capacity,
    decompose_flow,
    expected_capacity,
    projected_capacity_sum,
)
from mcmrcap.lp import INFEASIBLE, OPTIMAL, solve_lp, verify_ray, verify_solution, vertex_enumeration_optimum
from mcmrcap.placement import candidate_points, grid_strategy, optimize_over_placements
from mcmrcap.scenarios import run_scenario

F = Fraction
MS_SCALED = Objective(MIN_THROUGHPUT, scale_by_n=True)
MS_RAW = Objective(MIN_THROUGHPUT)
AS = Objective(TOTAL_THROUGHPUT)
TR = Objective(TRANSPORT)
GEOMETRIC_EPS = 1e-9
TOTAL_BUDGET_SECONDS = 600.0

CRITERIA = []
DURATIONS = {}


def criterion(label):
    def register(fn):
        @functools.wraps(fn)
        def timed(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                return fn(*args, **kwargs)
            finally:
                DURATIONS[label] = time.perf_counter() - t0
        CRITERIA.append((label, timed))
        return timed
    return register


@criterion("ring network, scaled minimum throughput: conditionals, projections, expectation")
def test_ring_min_throughput_criterion():
    net = load_network("ring4_network.json")
    assert projected_capacity_sum(net, MS_SCALED).total == F(4)
    one_hop_forward = load_flows("ring4_flows_alpha.json")
    one_hop_backward = load_flows("ring4_flows_beta.json")
    two_hop_routes = load_flows("ring4_flows_gamma.json")
    assert conditional_capacity(net, one_hop_forward, MULTI_CHANNEL, MS_SCALED).value == F(4)
    assert conditional_capacity(net, one_hop_backward, MULTI_CHANNEL, MS_SCALED).value == F(4)
    assert conditional_capacity(net, two_hop_routes, MULTI_CHANNEL, MS_SCALED).value == F(2)
    t0 = time.perf_counter()
    expectation = expected_capacity(net, MULTI_CHANNEL, MS_SCALED)
    elapsed = time.perf_counter() - t0
    assert len(expectation.per_config) == 81
    assert expectation.mean < F(4)
    assert expectation.mean == F(190, 81)
    assert elapsed < 10.0, f"expectation over 81 configurations took {elapsed:.1f}s"


@criterion("ring network, total throughput: pinned routes, projections, expectation")
def test_ring_total_throughput_criterion():
    net = load_network("ring4_network.json")
    two_hop_routes = load_flows("ring4_flows_delta.json")
    assert conditional_capacity(net, two_hop_routes, MULTI_CHANNEL, AS).value == F(2)
    assert projected_capacity_sum(net, AS).total == F(4)
    expectation = expected_capacity(net, MULTI_CHANNEL, AS)
    assert expectation.mean < F(4)
    assert expectation.mean == F(202, 81)


@criterion("chain network, raw minimum throughput: routing split across all configurations")
def test_chain_min_throughput_criterion():
    net = load_network("chain3_network.json")
    single = expected_capacity(net, SINGLE_CHANNEL, MS_RAW)
    nonzero = [(cfg, val) for cfg, val in single.per_config if val != 0]
    assert len(nonzero) == 2
    assert all(val == F(1, 2) for _, val in nonzero)
    assert single.mean == F(1, 8)
    multi = expected_capacity(net, MULTI_CHANNEL, MS_RAW)
    assert multi.mean > F(1, 8)
    relay_forward = next(
        val for cfg, val in multi.per_config
        if cfg.dest == {"A": "B", "B": "C", "C": "A"}
    )
    assert relay_forward == F(1, 2)


@criterion("lopsided rates, total throughput: routing gap with audited optima")
def test_lopsided_total_throughput_criterion():
    net = load_network("lopsided_network.json")
    flows = load_flows("lopsided_flows.json")
    comparison = compare_routing(net, AS, flows)
    assert comparison.multi_value >= F(8)
    assert comparison.single_value <= F(2)
    assert comparison.multi_value > comparison.single_value
    assert comparison.multi_value == F(8) and comparison.single_value == F(1)
    assert audit_result(net, flows, comparison.multi_detail) == []
    assert audit_result(net, flows, comparison.single_detail) == []


@criterion("unit square, transport: placement search strictly under projected sum")
def test_square_transport_criterion():
    t0 = time.perf_counter()
    net = load_network("square4_network.json")
    strategy = grid_strategy(4)
    points = set(candidate_points(net.region, strategy))
    corners = {(F(0), F(0)), (F(0), F(1)), (F(1), F(0)), (F(1), F(1))}
    assert corners <= points
    assert net.interference.delta == F(1, 2)
    search = optimize_over_placements(
        net, strategy, MULTI_CHANNEL, TR, backend="float", fold_symmetry=True,
    )
    projected = projected_capacity_sum(net, TR, MULTI_CHANNEL, backend="float", strategy=strategy)
    assert search.value < projected.total
    root2 = math.sqrt(2)
    assert abs(projected.per_channel[2] - root2) <= GEOMETRIC_EPS
    assert abs(projected.per_channel[3] - root2) <= GEOMETRIC_EPS
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300.0, f"square search took {elapsed:.1f}s"


@criterion("clustered disk, transport: cross-channel relay beats single-channel routing")
def test_cluster_transport_criterion():
    net = load_network("cluster5_network.json")
    placement = load_placement("cluster5_placement.json")
    flows = load_flows("cluster5_flows.json")
    comparison = compare_routing(net, TR, flows, placement=placement)
    assert comparison.multi_value > comparison.single_value
    paths = decompose_flow(comparison.multi_detail.link_flows["E>A"], "E", "A", F(0))
    hops = [[(l.channel, l.src, l.dst) for l in path] for path, _ in paths]
    assert hops == [[(5, "E", "D"), (6, "D", "A")]]
    assert paths[0][1] == comparison.delta == F(1)


@criterion("uniform interface assignment: separability and routing equality on 50 instances")
def test_uniform_assignment_property_criterion():
    report = run_scenario("thm5_sep_mc_eq_property")
    assert [check.actual for check in report.checks] == ["50/50"] * 4
    assert report.passed


@criterion("replay: partition, duration bounds, replication on 100 random logs")
def test_replay_property_criterion():
    report = run_scenario("thm2_replay_bounds")
    tallies = [check.actual for check in report.checks[:4]]
    assert tallies == ["100/100"] * 4
    assert report.passed


@criterion("solver: simplex equals vertex enumeration on 200 LPs, capacity audits clean")
def test_solver_oracle_criterion():
    rng = random.Random(1209)
    optimal = 0
    while optimal < 200:
        model = random_lp(rng)
        sol = solve_lp(model)
        if sol.status == OPTIMAL:
            oracle = vertex_enumeration_optimum(model)
            assert oracle.status == OPTIMAL and sol.value == oracle.value
            assert verify_solution(model, sol)
            optimal += 1
        elif sol.status == INFEASIBLE:
            assert vertex_enumeration_optimum(model).status == INFEASIBLE
        else:
            assert verify_ray(model, sol)

    ring = load_network("ring4_network.json")
    lopsided = load_network("lopsided_network.json")
    cluster = load_network("cluster5_network.json")
    spots = load_placement("cluster5_placement.json")
    cluster_flows = load_flows("cluster5_flows.json")
    cases = [
        (ring, load_flows("ring4_flows_alpha.json"), MULTI_CHANNEL, MS_SCALED, None),
        (ring, load_flows("ring4_flows_delta.json"), MULTI_CHANNEL, AS, None),
        (lopsided, load_flows("lopsided_flows.json"), MULTI_CHANNEL, AS, None),
        (lopsided, load_flows("lopsided_flows.json"), SINGLE_CHANNEL, AS, None),
        (cluster, cluster_flows, MULTI_CHANNEL, TR, spots),
        (cluster, cluster_flows, SINGLE_CHANNEL, TR, spots),
    ]
    for net, flows, routing, objective, placement in cases:
        result = conditional_capacity(net, flows, routing, objective, placement=placement)
        assert audit_result(net, flows, result, placement=placement) == []


@criterion("global properties: routing dominance and rate homogeneity on 100 instances")
def test_global_properties_criterion():
    t0 = time.perf_counter()
    dominance = run_scenario("routing_dominance_property")
    assert [check.actual for check in dominance.checks] == ["100/100"] * 3
    assert dominance.passed
    scaling = run_scenario("scaling_property")
    assert [check.actual for check in scaling.checks] == ["100/100"] * 3
    assert scaling.passed
    total = sum(DURATIONS.values()) + (time.perf_counter() - t0)
    assert total <= TOTAL_BUDGET_SECONDS, f"acceptance run took {total:.0f}s"


def main() -> int:
    failures = 0
    for label, check in CRITERIA:
        try:
            check()
        except AssertionError as exc:
            failures += 1
            detail = f": {exc}" if str(exc) else ""
            print(f"FAIL  {label}  [{DURATIONS[label]:.1f}s]{detail}")
        else:
            print(f"PASS  {label}  [{DURATIONS[label]:.1f}s]")
    print(f"{len(CRITERIA) - failures}/{len(CRITERIA)} acceptance criteria passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
