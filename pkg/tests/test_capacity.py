"""Capacity programs against independently frozen values."""

from collections import Counter
from fractions import Fraction

import pytest

from helpers import load_flows, load_network, load_placement
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
    separability_report,
)
from mcmrcap.errors import InvalidInputError
from mcmrcap.interference import SingleCollisionDomain
from mcmrcap.model import Channel, Node, abstract_region, build_network, make_flow_config

F = Fraction
MS_RAW = Objective(MIN_THROUGHPUT)
MS_SCALED = Objective(MIN_THROUGHPUT, scale_by_n=True)
AS = Objective(TOTAL_THROUGHPUT)


@pytest.fixture(scope="module")
def ring():
    return load_network("ring4_network.json")


@pytest.fixture(scope="module")
def chain():
    return load_network("chain3_network.json")


def test_ring_one_hop_configurations_reach_the_projected_sum(ring):
    forward = load_flows("ring4_flows_alpha.json")
    backward = load_flows("ring4_flows_beta.json")
    assert conditional_capacity(ring, forward, MULTI_CHANNEL, MS_SCALED).value == F(4)
    assert conditional_capacity(ring, backward, MULTI_CHANNEL, MS_SCALED).value == F(4)


def test_ring_pinned_two_hop_routes_halve_the_capacity(ring):
    relayed = load_flows("ring4_flows_gamma.json")
    assert conditional_capacity(ring, relayed, MULTI_CHANNEL, MS_SCALED).value == F(2)
    # free routing on the same destinations does better on channels, worse on hops
    free = make_flow_config(relayed.dest)
    assert conditional_capacity(ring, free, MULTI_CHANNEL, MS_SCALED).value == F(8, 3)
    assert conditional_capacity(ring, free, SINGLE_CHANNEL, MS_SCALED).value == F(0)


def test_ring_min_throughput_expectation(ring):
    expectation = expected_capacity(ring, MULTI_CHANNEL, MS_SCALED)
    assert len(expectation.per_config) == 81
    assert expectation.mean == F(190, 81)
    histogram = Counter(val for _, val in expectation.per_config)
    assert histogram == {F(2): 43, F(8, 3): 36, F(4): 2}


def test_ring_total_throughput_expectation(ring):
    relayed = load_flows("ring4_flows_delta.json")
    assert conditional_capacity(ring, relayed, MULTI_CHANNEL, AS).value == F(2)
    expectation = expected_capacity(ring, MULTI_CHANNEL, AS)
    assert expectation.mean == F(202, 81)
    histogram = Counter(val for _, val in expectation.per_config)
    assert histogram == {F(2): 43, F(3): 36, F(4): 2}


def test_ring_projections_give_one_per_channel(ring):
    for objective in (MS_SCALED, AS):
        projected = projected_capacity_sum(ring, objective)
        assert projected.total == F(4)
        assert projected.per_channel == {1: F(1), 2: F(1), 3: F(1), 4: F(1)}


def test_ring_diagonal_configuration(ring):
    diagonal = make_flow_config({"A": "C", "B": "D", "C": "A", "D": "B"})
    assert conditional_capacity(ring, diagonal, MULTI_CHANNEL, MS_SCALED).value == F(2)


def test_chain_single_channel_distribution(chain):
    expectation = expected_capacity(chain, SINGLE_CHANNEL, MS_RAW)
    values = [val for _, val in expectation.per_config]
    assert values == [0, F(1, 2), 0, F(1, 2), 0, 0, 0, 0]
    nonzero = {tuple(sorted(cfg.dests)) for cfg, val in expectation.per_config if val}
    assert nonzero == {
        (("A", "B"), ("B", "A"), ("C", "B")),
        (("A", "B"), ("B", "C"), ("C", "B")),
    }
    assert expectation.mean == F(1, 8)


def test_chain_multi_channel_distribution(chain):
    expectation = expected_capacity(chain, MULTI_CHANNEL, MS_RAW)
    values = [val for _, val in expectation.per_config]
    assert values == [F(1, 3), F(1, 2), F(1, 2), F(1, 2), F(1, 3), F(1, 2), F(1, 3), F(1, 3)]
    assert expectation.mean == F(5, 12)
    assert expectation.mean > F(1, 8)


def test_lopsided_routing_split():
    net = load_network("lopsided_network.json")
    flows = load_flows("lopsided_flows.json")
    comparison = compare_routing(net, AS, flows)
    assert comparison.multi_value == F(8)
    assert comparison.single_value == F(1)
    assert comparison.delta == F(7)


def test_cluster_transport_and_relay_path():
    net = load_network("cluster5_network.json")
    placement = load_placement("cluster5_placement.json")
    flows = load_flows("cluster5_flows.json")
    comparison = compare_routing(net, Objective(TRANSPORT), flows, placement=placement)
    assert comparison.multi_value == F(9)
    assert comparison.single_value == F(8)
    paths = decompose_flow(comparison.multi_detail.link_flows["E>A"], "E", "A", F(0))
    assert [([(l.channel, l.src, l.dst) for l in path], weight) for path, weight in paths] == [
        ([(5, "E", "D"), (6, "D", "A")], F(1)),
    ]


def test_audit_passes_solver_results(ring):
    flows = load_flows("ring4_flows_alpha.json")
    result = conditional_capacity(ring, flows, MULTI_CHANNEL, MS_SCALED)
    assert audit_result(ring, flows, result) == []


def test_audit_catches_inflated_rates(ring):
    flows = load_flows("ring4_flows_alpha.json")
    result = conditional_capacity(ring, flows, MULTI_CHANNEL, MS_SCALED)
    key = next(iter(result.flow_rates))
    result.flow_rates[key] += F(1, 2)
    assert audit_result(ring, flows, result)


def test_float_backend_matches_exact(ring):
    flows = load_flows("ring4_flows_alpha.json")
    exact = conditional_capacity(ring, flows, MULTI_CHANNEL, MS_SCALED)
    approx = conditional_capacity(ring, flows, MULTI_CHANNEL, MS_SCALED, backend="float")
    assert abs(approx.value - float(exact.value)) <= 1e-9


def test_two_node_transport_is_the_shared_channel_rate():
    net = build_network(
        [Node("A", (1,)), Node("B", (1,))],
        [Channel(1, F(3, 2))], abstract_region(), SingleCollisionDomain(),
    )
    result = conditional_capacity(net, None, MULTI_CHANNEL, Objective(TRANSPORT))
    assert result.value == F(3, 2)


def test_unroutable_forced_route_scores_zero(chain):
    # A cannot reach C directly: no channel joins them
    flows = make_flow_config({"A": "C", "B": "A", "C": "B"}, routes={"A": ("A", "C")})
    assert conditional_capacity(chain, flows, MULTI_CHANNEL, MS_RAW).value == 0


def test_route_must_join_source_and_destination(chain):
    flows = make_flow_config({"A": "C", "B": "A", "C": "B"}, routes={"A": ("A", "B")})
    with pytest.raises(InvalidInputError) as err:
        conditional_capacity(chain, flows, MULTI_CHANNEL, MS_RAW)
    assert err.value.code == "bad_route"


def test_throughput_objectives_need_flows(ring):
    with pytest.raises(InvalidInputError) as err:
        conditional_capacity(ring, None, MULTI_CHANNEL, MS_RAW)
    assert err.value.code == "flows_required"


def test_scaling_flag_limited_to_min_throughput():
    with pytest.raises(InvalidInputError):
        Objective(TOTAL_THROUGHPUT, scale_by_n=True)


def test_expectation_requires_abstract_region():
    net = load_network("square4_network.json")
    with pytest.raises(InvalidInputError) as err:
        expected_capacity(net, MULTI_CHANNEL, AS)
    assert err.value.code == "expectation_needs_abstract_region"


def test_geometric_separability_searches_both_sides():
    # on a corners-only grid every channel stretches the same diagonal,
    # so the projections promise exactly what the whole network delivers
    net = load_network("square4_network.json")
    report = separability_report(
        net, Objective(TRANSPORT), MULTI_CHANNEL, backend="float", strategy="grid:2",
    )
    root2 = 2 ** 0.5
    assert abs(report.capacity - 3 * root2) < 1e-9
    assert report.per_channel.keys() == {1, 2, 3}
    assert all(abs(value - root2) < 1e-9 for value in report.per_channel.values())
    assert report.sign == 0


def test_geometric_separability_needs_a_strategy():
    net = load_network("square4_network.json")
    with pytest.raises(InvalidInputError) as err:
        separability_report(net, Objective(TRANSPORT), MULTI_CHANNEL, backend="float")
    assert err.value.code == "strategy_required"
