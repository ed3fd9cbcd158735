"""Log partitioning, per-channel replay, and replication verification."""

import random
from collections import Counter
from fractions import Fraction

import pytest

from mcmrcap.errors import InvalidInputError
from mcmrcap.interference import SingleCollisionDomain
from mcmrcap.model import Channel, Link, Node, abstract_region, build_network
from mcmrcap.replay import (
    LogEntry,
    StsLog,
    build_replay_schedule,
    partition_interval,
    periodic_full_log,
    random_full_log,
    require_full,
    run_replay,
    segment_starts,
    sts_counts,
    tick_grid,
    tick_length,
    validate_log,
    verify_replication,
)

F = Fraction


def _net(rates):
    channels = [Channel(i + 1, F(rate)) for i, rate in enumerate(rates)]
    nodes = [Node("A", tuple(range(1, len(rates) + 1))), Node("B", tuple(range(1, len(rates) + 1)))]
    return build_network(nodes, channels, abstract_region(), SingleCollisionDomain())


def test_partition_proportional_to_rates():
    net = _net((2, 1))
    assert partition_interval(F(3), net.channels) == [F(2), F(1)]
    assert segment_starts(F(3), net.channels) == [F(0), F(2)]
    assert tick_length(net.channel(1)) == F(1, 2)


def test_tick_counts_round_partial_ticks_up():
    net = _net((2, 1))
    assert sts_counts(F(2), net.channels) == {1: 4, 2: 2}
    assert sts_counts(F(1), net.channels) == {1: 2, 2: 1}
    assert sts_counts(F(7, 3), net.channels) == {1: 5, 2: 3}


def test_tick_grids_of_the_worked_example():
    net = _net((2, 1))
    assert tick_grid(F(3), net.channels, 1, 1) == (F(1, 2), F(1), F(3, 2), F(2))
    assert tick_grid(F(3), net.channels, 2, 1) == (F(1), F(2))
    assert tick_grid(F(3), net.channels, 1, 2) == (F(5, 2), F(3))
    assert tick_grid(F(3), net.channels, 2, 2) == (F(3),)


def test_tick_grids_stay_disjoint_across_segments():
    rng = random.Random(31)
    for _ in range(40):
        rates = [F(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(rng.randint(1, 4))]
        net = _net(rates)
        horizon = F(rng.randint(1, 60), rng.randint(1, 3))
        for ticker in net.channels:
            grids = [
                tick_grid(horizon, net.channels, ticker.id, seg.id) for seg in net.channels
            ]
            merged = [t for grid in grids for t in grid]
            assert len(set(merged)) == len(merged)
            assert merged == sorted(merged)


def test_replay_of_the_worked_example():
    net = _net((2, 1))
    link = Link("A", "B", 1)
    outcome = run_replay(net, periodic_full_log(net, 3, {1: [(link,)]}))
    assert outcome.durations == (F(3), F(3))
    assert outcome.longest == F(3) and outcome.bounds_hold
    first = outcome.schedules[0]
    assert [i.sort_key() for i in first.items] == sorted(i.sort_key() for i in first.items)
    # segment one interleaves four fast ticks with two slow ones
    assert [(i.time, i.channel) for i in first.items] == [
        (F(1, 2), 1), (F(1), 1), (F(1), 2), (F(3, 2), 1), (F(2), 1), (F(2), 2),
    ]


def test_equal_rates_sit_strictly_inside_the_bound():
    net = _net((1, 1, 1))
    outcome = run_replay(net, periodic_full_log(net, F(7, 3), {}))
    assert outcome.durations == (F(3), F(3), F(3))
    assert all(F(7, 3) <= d < F(7, 3) + 3 * 1 for d in outcome.durations)


def test_replay_duration_formula():
    net = _net((3, 2))
    log = periodic_full_log(net, F(5), {})
    outcome = run_replay(net, log)
    for schedule, duration in zip(outcome.schedules, outcome.durations):
        ticks = sum(
            sts_counts(length, net.channels)[schedule.target_channel]
            for length in partition_interval(F(5), net.channels)
        )
        assert duration == tick_length(net.channel(schedule.target_channel)) * ticks


def test_full_log_validation_rejects_gaps_and_noise():
    net = _net((2, 1))
    log = periodic_full_log(net, 3, {})
    require_full(net, log)

    gappy = StsLog(log.horizon, log.entries[1:])
    with pytest.raises(InvalidInputError) as err:
        require_full(net, gappy)
    assert err.value.code == "incomplete_log"

    doubled = StsLog(log.horizon, log.entries + (log.entries[0],))
    with pytest.raises(InvalidInputError) as err:
        validate_log(net, doubled)
    assert err.value.code == "duplicate_tick"

    offgrid = StsLog(log.horizon, log.entries + (LogEntry(F(1, 7), 1, ()),))
    with pytest.raises(InvalidInputError) as err:
        validate_log(net, offgrid)
    assert err.value.code == "tick_misaligned"

    foreign = StsLog(log.horizon, (LogEntry(F(1, 2), 1, (Link("A", "Z", 1),)),) + log.entries[1:])
    with pytest.raises(InvalidInputError) as err:
        validate_log(net, foreign)
    assert err.value.code == "unknown_link"

    with pytest.raises(InvalidInputError) as err:
        validate_log(net, StsLog(F(0), ()))
    assert err.value.code == "bad_horizon"


def test_shared_domain_rejects_double_activation():
    channels = [Channel(1, F(1))]
    nodes = [Node(n, (1,)) for n in "ABCD"]
    net = build_network(nodes, channels, abstract_region(), SingleCollisionDomain())
    entry = LogEntry(F(1), 1, (Link("A", "B", 1), Link("C", "D", 1)))
    with pytest.raises(InvalidInputError) as err:
        validate_log(net, StsLog(F(2), (entry,)))
    assert err.value.code == "infeasible_sts"


def test_random_logs_replicate_exactly():
    rng = random.Random(9)
    for _ in range(15):
        rates = [F(rng.randint(1, 3), rng.randint(1, 2)) for _ in range(rng.randint(1, 4))]
        net = _net(rates)
        horizon = F(rng.randint(1, 40), rng.randint(1, 3))
        log = random_full_log(net, horizon, rng)
        outcome = run_replay(net, log)
        assert outcome.bounds_hold
        assert Counter(i for s in outcome.schedules for i in s.items) == Counter(log.entries)
        assert verify_replication(log, outcome.schedules).ok


def test_replication_check_spots_tampering():
    net = _net((2, 1))
    link = Link("A", "B", 1)
    log = periodic_full_log(net, 3, {1: [(link,)]})
    outcome = run_replay(net, log)
    truncated = outcome.schedules[0].__class__(
        target_channel=1,
        items=outcome.schedules[0].items[:-1],
        duration=outcome.schedules[0].duration,
        segment_start=outcome.schedules[0].segment_start,
        segment_end=outcome.schedules[0].segment_end,
    )
    check = verify_replication(log, (truncated, outcome.schedules[1]))
    assert not check.ok and check.problems


def test_bit_threading_must_follow_hops():
    net = build_network(
        [Node("A", (1,)), Node("B", (1, 2)), Node("C", (2,))],
        [Channel(1, F(1)), Channel(2, F(1))],
        abstract_region(), SingleCollisionDomain(),
    )
    hop1 = Link("A", "B", 1)
    hop2 = Link("B", "C", 2)
    good = StsLog(F(2), (
        LogEntry(F(1), 1, (hop1,), ("bit",)),
        LogEntry(F(2), 1, ()),
        LogEntry(F(2), 2, (hop2,), ("bit",)),
        LogEntry(F(1), 2, ()),
    ))
    require_full(net, good)
    assert verify_replication(good, run_replay(net, good).schedules).ok

    backwards = StsLog(F(2), (
        LogEntry(F(1), 2, (hop2,), ("bit",)),
        LogEntry(F(2), 2, ()),
        LogEntry(F(2), 1, (hop1,), ("bit",)),
        LogEntry(F(1), 1, ()),
    ))
    check = verify_replication(backwards, run_replay(net, backwards).schedules)
    assert not check.ok


def test_bit_id_arity_must_match_links():
    net = _net((1,))
    entry = LogEntry(F(1), 1, (Link("A", "B", 1),), ("b0", "b1"))
    with pytest.raises(InvalidInputError) as err:
        validate_log(net, StsLog(F(1), (entry,)))
    assert err.value.code == "bad_bit_ids"


def test_single_schedule_request():
    net = _net((2, 1))
    log = periodic_full_log(net, 3, {})
    schedule = build_replay_schedule(net, log, 2)
    assert schedule.target_channel == 2
    assert schedule.duration == F(3)
    with pytest.raises(InvalidInputError):
        build_replay_schedule(net, log, 9)
