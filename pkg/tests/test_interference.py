"""Interference feasibility and maximal activation-set enumeration."""

import itertools
import random
from fractions import Fraction

import pytest

from helpers import load_network
from mcmrcap.errors import EnumerationCapError
from mcmrcap.interference import (
    RECEIVER_GUARD,
    ProtocolInterference,
    SingleCollisionDomain,
    activation_feasible,
    channel_maximal_sets,
    enumerate_maximal_activation_sets,
    protocol_feasible,
)
from mcmrcap.model import Channel, Link, Node, build_network, derive_links, square_region

F = Fraction


def _line_network(delta=F(1, 2), guard=None, side=10):
    spec = ProtocolInterference(delta) if guard is None else ProtocolInterference(delta, guard)
    nodes = [Node(name, (1,)) for name in "ABCD"]
    return build_network(nodes, [Channel(1, F(1))], square_region(side), spec)


def test_single_collision_domain_one_link_per_channel():
    net = load_network("ring4_network.json")
    sets = channel_maximal_sets(net, 2)
    assert sorted(sets, key=lambda s: [l.key() for l in s]) == [
        (Link("A", "B", 2),), (Link("B", "A", 2),),
    ]


def test_shared_endpoint_always_conflicts():
    net = _line_network()
    coords = {"A": (F(0), F(0)), "B": (F(1), F(0)), "C": (F(9), F(0)), "D": (F(8), F(0))}
    # far apart, but B cannot transmit and receive at once
    assert not activation_feasible([Link("A", "B", 1), Link("B", "C", 1)], net, coords)
    assert activation_feasible([Link("A", "B", 1), Link("C", "D", 1)], net, coords)


def test_transmitter_guard_threshold_is_exact():
    net = _line_network(F(1, 2))
    at_limit = {"A": (F(0), F(0)), "B": (F(1), F(0)), "C": (F(3, 2), F(0)), "D": (F(5, 2), F(0))}
    # |C-A| = 3/2 = (1+delta)|A-B| and |A-C| = 3/2 = (1+delta)|C-D|
    assert protocol_feasible([Link("A", "B", 1), Link("C", "D", 1)], at_limit, F(1, 2))
    inside = dict(at_limit, C=(F(149, 100), F(0)), D=(F(249, 100), F(0)))
    assert not protocol_feasible([Link("A", "B", 1), Link("C", "D", 1)], inside, F(1, 2))


def test_receiver_guard_measures_to_the_receiver():
    coords = {"A": (F(2), F(0)), "B": (F(0), F(0)), "C": (F(3), F(0)), "D": (F(4), F(0))}
    links = [Link("B", "A", 1), Link("C", "D", 1)]
    # C is 3 away from transmitter B but only 1 from receiver A
    assert protocol_feasible(links, coords, F(1, 2))
    assert not protocol_feasible(links, coords, F(1, 2), guard=RECEIVER_GUARD)
    far = dict(coords, C=(F(6), F(0)), D=(F(7), F(0)))
    assert protocol_feasible(links, far, F(1, 2), guard=RECEIVER_GUARD)


def test_maximal_sets_against_exhaustive_search():
    net = load_network("ring4_network.json")
    links = derive_links(net)
    feasible = [
        frozenset(combo)
        for size in range(1, len(links) + 1)
        for combo in itertools.combinations(links, size)
        if activation_feasible(combo, net)
    ]
    maximal = {s for s in feasible if not any(s < t for t in feasible)}
    assert set(enumerate_maximal_activation_sets(net)) == maximal
    assert len(maximal) == 16


def test_feasibility_closed_under_subsets():
    net = _line_network(F(1, 4))
    rng = random.Random(5)
    coords = {
        name: (F(rng.randint(0, 40), 4), F(rng.randint(0, 40), 4)) for name in "ABCD"
    }
    links = derive_links(net)
    for _ in range(200):
        sample = rng.sample(links, rng.randint(2, 4))
        if activation_feasible(sample, net, coords):
            for size in range(1, len(sample)):
                for sub in itertools.combinations(sample, size):
                    assert activation_feasible(sub, net, coords)


def test_larger_guard_zone_only_removes_activations():
    rng = random.Random(11)
    for _ in range(20):
        coords = {
            name: (F(rng.randint(0, 40), 4), F(rng.randint(0, 40), 4)) for name in "ABCD"
        }
        if len(set(coords.values())) < 4:
            continue
        tight = _line_network(F(2))
        loose = _line_network(F(1, 4))
        for links in itertools.combinations(derive_links(tight), 2):
            if activation_feasible(links, tight, coords):
                assert activation_feasible(links, loose, coords)


def test_enumeration_cap_triggers():
    nodes = [Node(name, (1,)) for name in "ABCDEF"]
    net = build_network(nodes, [Channel(1, F(1))], square_region(100), ProtocolInterference(F(1, 100)))
    coords = {name: (F(i * 16), F((i * i) % 7)) for i, name in enumerate("ABCDEF")}
    with pytest.raises(EnumerationCapError):
        channel_maximal_sets(net, 1, coords, cap=2)


def test_single_collision_domain_has_no_parameters():
    spec = SingleCollisionDomain()
    net = load_network("chain3_network.json")
    assert net.interference == spec
