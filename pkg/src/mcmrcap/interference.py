"""Interference models and enumeration of feasible concurrent link sets.

Two media models are supported. `SingleCollisionDomain` admits at most one
active link per channel anywhere in the network; it is the default for
abstract regions. `ProtocolInterference` is the guard-zone model over exact
coordinates: a transmission src -> dst on some channel succeeds when every
other node k transmitting on that channel keeps

    |X_k - X_ref| >= (1 + delta) * |X_src - X_dst|

where X_ref is the transmitter (default guard) or the receiver. Both sides
are compared as squared distances over rationals, so the test is exact.

Concurrent feasibility is pairwise in both models, which makes the maximal
feasible sets of a channel exactly the maximal independent sets of its link
conflict graph. Channels never conflict with each other, so network-wide
maximal activation sets are products of per-channel ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, TYPE_CHECKING, Union

from .errors import EnumerationCapError, InvalidInputError

if TYPE_CHECKING:
    from .model import Coord, Link, Network

TRANSMITTER_GUARD = "transmitter"
RECEIVER_GUARD = "receiver"

DEFAULT_ENUMERATION_CAP = 10**6

ActivationSet = frozenset


@dataclass(frozen=True)
class ProtocolInterference:
    delta: Fraction
    guard: str = TRANSMITTER_GUARD

    def __post_init__(self):
        if self.guard not in (TRANSMITTER_GUARD, RECEIVER_GUARD):
            raise InvalidInputError("bad_guard", f"unknown guard point {self.guard!r}")
        if self.delta < 0:
            raise InvalidInputError("bad_delta", "delta must be nonnegative")


@dataclass(frozen=True)
class SingleCollisionDomain:
    pass


InterferenceSpec = Union[ProtocolInterference, SingleCollisionDomain]


def squared_distance(p: "Coord", q: "Coord") -> Fraction:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def _coord(placement: dict, node_id: str) -> "Coord":
    try:
        return placement[node_id]
    except KeyError:
        raise InvalidInputError("missing_coordinate", f"no coordinate for node {node_id!r}")


def _guard_ok(tx: "Link", other_tx: str, placement: dict, delta: Fraction, guard: str) -> bool:
    # Squaring both sides keeps the comparison in the rationals.
    ref = tx.src if guard == TRANSMITTER_GUARD else tx.dst
    lhs = squared_distance(_coord(placement, other_tx), _coord(placement, ref))
    scale = (1 + delta) * (1 + delta)
    rhs = scale * squared_distance(_coord(placement, tx.src), _coord(placement, tx.dst))
    return lhs >= rhs


def protocol_feasible(
    links: Iterable["Link"],
    placement: dict,
    delta: Fraction,
    guard: str = TRANSMITTER_GUARD,
) -> bool:
    """Can these same-channel transmissions run concurrently under the
    protocol model? Pure guard-zone test; interface limits are checked by
    activation_feasible."""
    links = list(links)
    channels = {l.channel for l in links}
    if len(channels) > 1:
        raise InvalidInputError("mixed_channels", "protocol_feasible takes links of a single channel")
    for tx in links:
        for other in links:
            if other is tx:
                continue
            if not _guard_ok(tx, other.src, placement, delta, guard):
                return False
    return True


def links_conflict(a: "Link", b: "Link", spec: InterferenceSpec, placement: Optional[dict]) -> bool:
    """Whether two distinct links can never be active together."""
    if a.channel != b.channel:
        return False
    if {a.src, a.dst} & {b.src, b.dst}:
        return True  # a node has one interface per channel
    if isinstance(spec, SingleCollisionDomain):
        return True
    if placement is None:
        raise InvalidInputError("missing_placement", "the protocol model needs coordinates")
    return not (
        _guard_ok(a, b.src, placement, spec.delta, spec.guard)
        and _guard_ok(b, a.src, placement, spec.delta, spec.guard)
    )


def activation_feasible(links: Iterable["Link"], net: "Network", placement: Optional[dict] = None) -> bool:
    """Whether a cross-channel set of links can be active in one slot.

    Checks the one-interface-per-(node, channel) rule plus the per-channel
    interference model. Feasibility is closed under subsets.
    """
    links = list(links)
    if len(set(links)) != len(links):
        return False
    if placement is None:
        placement = net.locations() or None
    used = set()
    for link in links:
        for endpoint in (link.src, link.dst):
            slot = (endpoint, link.channel)
            if slot in used:
                return False
            used.add(slot)
    by_channel: dict[int, list] = {}
    for link in links:
        by_channel.setdefault(link.channel, []).append(link)
    for members in by_channel.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if links_conflict(a, b, net.interference, placement):
                    return False
    return True


def _maximal_independent_sets(count: int, conflict_masks: list[int], cap: int) -> list[int]:
    """All maximal independent sets of a conflict graph on `count` vertices,
    as bitmasks, via Bron-Kerbosch with pivoting on the complement graph."""
    full = (1 << count) - 1
    compat = [full & ~conflict_masks[v] & ~(1 << v) for v in range(count)]
    out: list[int] = []

    def expand(clique: int, candidates: int, excluded: int):
        if candidates == 0 and excluded == 0:
            out.append(clique)
            if len(out) > cap:
                raise EnumerationCapError(f"more than {cap} maximal activation sets")
            return
        pool = candidates | excluded
        pivot = -1
        best = -1
        probe = pool
        while probe:
            v = (probe & -probe).bit_length() - 1
            probe &= probe - 1
            degree = bin(candidates & compat[v]).count("1")
            if degree > best:
                best = degree
                pivot = v
        rest = candidates & ~compat[pivot]
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            bit = 1 << v
            expand(clique | bit, candidates & compat[v], excluded & compat[v])
            candidates &= ~bit
            excluded |= bit
    expand(0, full, 0)
    return out


def channel_maximal_sets(
    net: "Network",
    channel_id: int,
    placement: Optional[dict] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[tuple]:
    """Maximal feasible concurrent link sets of one channel, canonically
    ordered. A channel without links yields just the empty set."""
    from .model import derive_links

    if placement is None:
        placement = net.locations() or None
    links = [l for l in derive_links(net) if l.channel == channel_id]
    if not links:
        return [()]
    masks = [0] * len(links)
    for i, a in enumerate(links):
        for j in range(i + 1, len(links)):
            if links_conflict(a, links[j], net.interference, placement):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    sets = _maximal_independent_sets(len(links), masks, cap)
    decoded = []
    for mask in sets:
        members = tuple(links[v] for v in range(len(links)) if mask >> v & 1)
        decoded.append(tuple(sorted(members, key=lambda l: l.key())))
    decoded.sort(key=lambda ls: tuple(l.key() for l in ls))
    return decoded


def enumerate_maximal_activation_sets(
    net: "Network",
    placement: Optional[dict] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[ActivationSet]:
    """All maximal activation sets of the network.

    Channels do not interact, so these are exactly the unions of one maximal
    set per channel that has links. Raises EnumerationCapError before
    materializing more than `cap` sets.
    """
    import itertools

    per_channel = []
    total = 1
    for ch in net.channels:
        sets = channel_maximal_sets(net, ch.id, placement, cap)
        if sets == [()]:
            continue
        per_channel.append(sets)
        total *= len(sets)
        if total > cap:
            raise EnumerationCapError(f"more than {cap} maximal activation sets")
    if not per_channel:
        return [frozenset()]
    out = []
    for combo in itertools.product(*per_channel):
        out.append(frozenset(l for part in combo for l in part))
    return out
