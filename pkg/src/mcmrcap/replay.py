"""Replaying a multi-channel schedule log on single-channel networks.

The horizon splits into one segment per channel, sized proportionally to
channel rate. Each channel's single-channel network then replays, back to
back and in completion order, every logged transmission set whose time
falls in its segment, taking one own-rate tick per set. The replay
durations land within an additive constant of the horizon, which is what
lets single-channel capacities bound the multi-channel network.

A log is "full" when every channel logs every tick of every segment, idle
ticks included as empty entries; replay durations are then exact tick
counts times the target channel's tick length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections import Counter
from fractions import Fraction
from typing import Optional

from .errors import InvalidInputError
from .interference import activation_feasible
from .model import Channel, Link, Network

Entryish = tuple  # (time, channel, links[, bit_ids])


def tick_length(channel: Channel) -> Fraction:
    """Time to push one bit across a link of this channel."""
    return Fraction(1) / channel.rate


@dataclass(frozen=True)
class LogEntry:
    """One tick of one channel: the link set that completed a bit, with
    optional per-link payload ids for threading multi-hop bits."""

    time: Fraction
    channel: int
    links: tuple[Link, ...]
    bit_ids: Optional[tuple[str, ...]] = None

    def sort_key(self) -> tuple:
        return (self.time, self.channel)


@dataclass(frozen=True)
class StsLog:
    horizon: Fraction
    entries: tuple[LogEntry, ...]


@dataclass(frozen=True)
class ReplaySchedule:
    """Segment contents replayed on one channel, in completion order."""

    target_channel: int
    items: tuple[LogEntry, ...]
    duration: Fraction
    segment_start: Fraction
    segment_end: Fraction


@dataclass(frozen=True)
class ReplayResult:
    schedules: tuple[ReplaySchedule, ...]
    durations: tuple[Fraction, ...]
    longest: Fraction
    bounds_hold: bool


@dataclass(frozen=True)
class ReplicationCheck:
    ok: bool
    problems: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def partition_interval(horizon: Fraction, channels) -> list[Fraction]:
    """Split the horizon into per-channel segments proportional to rate.

    Returned in channel id order; the segment lengths sum back to the
    horizon exactly.
    """
    horizon = Fraction(horizon)
    if horizon <= 0:
        raise InvalidInputError("bad_horizon", "the schedule horizon must be positive")
    channels = sorted(channels, key=lambda ch: ch.id)
    total = sum(ch.rate for ch in channels)
    return [horizon * ch.rate / total for ch in channels]


def sts_counts(segment_length: Fraction, channels) -> dict[int, int]:
    """Ticks each channel fits into a segment of the given length, counting
    a final partial tick as a whole one."""
    segment_length = Fraction(segment_length)
    if segment_length <= 0:
        raise InvalidInputError("bad_segment", "segment length must be positive")
    return {ch.id: math.ceil(segment_length * ch.rate) for ch in channels}


def segment_starts(horizon: Fraction, channels) -> list[Fraction]:
    starts = [Fraction(0)]
    for length in partition_interval(horizon, channels)[:-1]:
        starts.append(starts[-1] + length)
    return starts


def tick_grid(horizon: Fraction, channels, channel_id: int, segment_channel_id: int) -> tuple[Fraction, ...]:
    """The times at which `channel_id` ticks within the segment owned by
    `segment_channel_id`: the segment start plus whole own-channel ticks,
    as many as the segment length rounds up to."""
    channels = sorted(channels, key=lambda ch: ch.id)
    ids = [ch.id for ch in channels]
    lengths = partition_interval(horizon, channels)
    starts = segment_starts(horizon, channels)
    j = ids.index(segment_channel_id)
    ticker = channels[ids.index(channel_id)]
    tau = tick_length(ticker)
    count = math.ceil(lengths[j] * ticker.rate)
    return tuple(starts[j] + k * tau for k in range(1, count + 1))


def _tick_index(net: Network, horizon: Fraction) -> dict[tuple[int, Fraction], int]:
    """Map every (channel, tick time) to the segment owning that tick.

    Segment grids of one channel never overlap: a segment's last tick
    overshoots its boundary by less than one tick, which still lands before
    the next segment's first tick.
    """
    index: dict[tuple[int, Fraction], int] = {}
    for ticker in net.channels:
        for segment in net.channels:
            for t in tick_grid(horizon, net.channels, ticker.id, segment.id):
                index[(ticker.id, t)] = segment.id
    return index


def validate_log(net: Network, log: StsLog) -> None:
    """Reject logs whose entries are off-grid, duplicated, reference unknown
    links, or activate an infeasible same-channel link set."""
    if log.horizon <= 0:
        raise InvalidInputError("bad_horizon", "the log horizon must be positive")
    known = {ch.id: ch for ch in net.channels}
    index = _tick_index(net, log.horizon)
    seen: set[tuple] = set()
    for idx, entry in enumerate(log.entries):
        where = f"entries[{idx}]"
        if entry.channel not in known:
            raise InvalidInputError("unknown_channel", f"entry {idx} uses channel {entry.channel}", where)
        owners = net.interfaces_on(entry.channel)
        for link in entry.links:
            if link.channel != entry.channel:
                raise InvalidInputError("channel_mismatch", f"entry {idx} logs a link of channel {link.channel}", where)
            if link.src not in owners or link.dst not in owners or link.src == link.dst:
                raise InvalidInputError("unknown_link", f"entry {idx} logs a link {link.src}>{link.dst} the network lacks", where)
        if entry.bit_ids is not None and len(entry.bit_ids) != len(entry.links):
            raise InvalidInputError("bad_bit_ids", f"entry {idx} has {len(entry.bit_ids)} payload ids for {len(entry.links)} links", where)
        if not activation_feasible(entry.links, net):
            raise InvalidInputError("infeasible_sts", f"entry {idx} activates a conflicting link set", where)
        if (entry.time, entry.channel) in seen:
            raise InvalidInputError("duplicate_tick", f"entry {idx} repeats a tick of channel {entry.channel}", where)
        seen.add((entry.time, entry.channel))
        if (entry.channel, entry.time) not in index:
            raise InvalidInputError("tick_misaligned", f"entry {idx} at time {entry.time} is off channel {entry.channel}'s tick grid", where)


def _assign_segments(net: Network, log: StsLog) -> dict[int, list[LogEntry]]:
    index = _tick_index(net, log.horizon)
    bins: dict[int, list[LogEntry]] = {ch.id: [] for ch in net.channels}
    for entry in log.entries:
        bins[index[(entry.channel, entry.time)]].append(entry)
    for items in bins.values():
        items.sort(key=LogEntry.sort_key)
    return bins


def _make_schedule(net: Network, log: StsLog, bins, target_channel: int) -> ReplaySchedule:
    ordered = sorted(net.channels, key=lambda ch: ch.id)
    ids = [ch.id for ch in ordered]
    j = ids.index(target_channel)
    starts = segment_starts(log.horizon, ordered)
    lengths = partition_interval(log.horizon, ordered)
    items = tuple(bins[target_channel])
    return ReplaySchedule(
        target_channel=target_channel, items=items,
        duration=tick_length(ordered[j]) * len(items),
        segment_start=starts[j], segment_end=starts[j] + lengths[j],
    )


def build_replay_schedule(net: Network, log: StsLog, target_channel: int) -> ReplaySchedule:
    """Collect the target channel's segment, ordered by original completion
    time (ties by channel id), each item taking one target-channel tick."""
    validate_log(net, log)
    if target_channel not in {ch.id for ch in net.channels}:
        raise InvalidInputError("unknown_channel", f"no channel {target_channel}")
    return _make_schedule(net, log, _assign_segments(net, log), target_channel)


def require_full(net: Network, log: StsLog) -> None:
    """A full log ticks every channel through every segment: for each
    channel pair (ticker, segment) the logged times must be exactly the
    segment's tick grid, idle ticks logged as empty entries."""
    validate_log(net, log)
    by_pair: dict[tuple[int, int], list[Fraction]] = {}
    index = _tick_index(net, log.horizon)
    for entry in log.entries:
        j = index[(entry.channel, entry.time)]
        by_pair.setdefault((entry.channel, j), []).append(entry.time)
    for ticker in net.channels:
        for segment in net.channels:
            expected = tick_grid(log.horizon, net.channels, ticker.id, segment.id)
            got = sorted(by_pair.get((ticker.id, segment.id), []))
            if got != list(expected):
                raise InvalidInputError(
                    "incomplete_log",
                    f"channel {ticker.id} logs {len(got)} of {len(expected)} ticks in segment {segment.id}; "
                    "idle ticks must appear as empty entries",
                )


def run_replay(net: Network, log: StsLog) -> ReplayResult:
    """Replay a full log on every channel's single-channel network.

    Each duration is the target tick length times its segment's total tick
    count, so it lands in [horizon, horizon + c ticks); the longest replay
    obeys the same bound with the largest tick length.
    """
    require_full(net, log)
    bins = _assign_segments(net, log)
    schedules = tuple(
        _make_schedule(net, log, bins, ch.id)
        for ch in sorted(net.channels, key=lambda ch: ch.id)
    )
    durations = tuple(s.duration for s in schedules)
    longest = max(durations)
    c = net.c
    ok = all(
        log.horizon <= s.duration < log.horizon + c * tick_length(net.channel(s.target_channel))
        for s in schedules
    )
    return ReplayResult(schedules=schedules, durations=durations, longest=longest, bounds_hold=ok)


def _bit_sequences(entries) -> dict[str, list[tuple[LogEntry, Link]]]:
    hops: dict[str, list[tuple[LogEntry, Link]]] = {}
    for entry in sorted(entries, key=LogEntry.sort_key):
        if entry.bit_ids is None:
            continue
        for link, bit in zip(entry.links, entry.bit_ids):
            hops.setdefault(bit, []).append((entry, link))
    return hops


def verify_replication(log: StsLog, schedules) -> ReplicationCheck:
    """Check that the replays deliver exactly the logged transmissions.

    Verifies the multiset of replayed items equals the log, every schedule
    runs in nondecreasing original time (ties by channel id), and each
    payload id threads through consecutive links at increasing times with
    hop order preserved inside every schedule.
    """
    problems = []
    replayed = Counter(item for s in schedules for item in s.items)
    logged = Counter(log.entries)
    if replayed != logged:
        missing = logged - replayed
        extra = replayed - logged
        for entry in list(missing)[:3]:
            problems.append(f"entry at {entry.time} on channel {entry.channel} never replays")
        for entry in list(extra)[:3]:
            problems.append(f"entry at {entry.time} on channel {entry.channel} replays without being logged")
        if not missing and not extra:
            problems.append("replayed multiplicities differ from the log")
    for schedule in schedules:
        keys = [item.sort_key() for item in schedule.items]
        if keys != sorted(keys):
            problems.append(f"channel {schedule.target_channel} replays out of completion order")
    position = {}
    for schedule in schedules:
        for rank, item in enumerate(schedule.items):
            position[(item.time, item.channel)] = (schedule.target_channel, rank)
    for bit, hops in _bit_sequences(log.entries).items():
        for (prev_entry, prev_link), (next_entry, next_link) in zip(hops, hops[1:]):
            if prev_link.dst != next_link.src:
                problems.append(f"bit {bit!r} jumps from {prev_link.dst} to {next_link.src}")
            if prev_entry.time >= next_entry.time:
                problems.append(f"bit {bit!r} hops at {next_entry.time} without advancing in time")
            prev_pos = position.get((prev_entry.time, prev_entry.channel))
            next_pos = position.get((next_entry.time, next_entry.channel))
            if prev_pos and next_pos and prev_pos[0] == next_pos[0] and prev_pos[1] >= next_pos[1]:
                problems.append(f"bit {bit!r} replays hop order backwards on channel {prev_pos[0]}")
    return ReplicationCheck(ok=not problems, problems=tuple(problems))


def random_full_log(net: Network, horizon: Fraction, rng, idle_weight: float = 0.3) -> StsLog:
    """A full log with uniformly chosen feasible transmission sets.

    Each tick independently idles with probability `idle_weight` or logs a
    nonempty subset of one maximal activation of its channel.
    """
    from .interference import channel_maximal_sets

    horizon = Fraction(horizon)
    entries = []
    for ticker in net.channels:
        maximal = [s for s in channel_maximal_sets(net, ticker.id) if s]
        for segment in net.channels:
            for t in tick_grid(horizon, net.channels, ticker.id, segment.id):
                links: tuple[Link, ...] = ()
                if maximal and rng.random() >= idle_weight:
                    base = maximal[rng.randrange(len(maximal))]
                    keep = rng.randint(1, len(base))
                    links = tuple(sorted(rng.sample(list(base), keep), key=Link.key))
                entries.append(LogEntry(time=t, channel=ticker.id, links=links))
    entries.sort(key=LogEntry.sort_key)
    return StsLog(horizon=horizon, entries=tuple(entries))


def periodic_full_log(net: Network, horizon: Fraction, patterns: dict[int, list[tuple[Link, ...]]]) -> StsLog:
    """A full log where each channel cycles a fixed list of link sets over
    its ticks in time order. Used to study long-horizon replay overhead."""
    horizon = Fraction(horizon)
    entries = []
    for ticker in net.channels:
        pattern = patterns.get(ticker.id) or [()]
        ticks = []
        for segment in net.channels:
            ticks.extend(tick_grid(horizon, net.channels, ticker.id, segment.id))
        ticks.sort()
        for k, t in enumerate(ticks):
            entries.append(LogEntry(time=t, channel=ticker.id, links=tuple(pattern[k % len(pattern)])))
    entries.sort(key=LogEntry.sort_key)
    return StsLog(horizon=horizon, entries=tuple(entries))
