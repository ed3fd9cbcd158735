"""Network model: channels, nodes, regions, links, and flow configurations.

A network is a set of named nodes, each equipped with one radio interface per
listed channel, deployed either in a geometric region (unit square or disk,
with exact rational coordinates) or in an abstract region with no geometry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, TYPE_CHECKING

from .errors import InvalidInputError

if TYPE_CHECKING:
    from .interference import InterferenceSpec

Coord = tuple[Fraction, Fraction]

SQUARE = "square"
DISK = "disk"
ABSTRACT = "abstract"


@dataclass(frozen=True)
class Channel:
    """A frequency channel with a fixed data rate in bits per second."""

    id: int
    rate: Fraction


@dataclass(frozen=True)
class Node:
    """A node with one interface per channel id in `channels`."""

    id: str
    channels: tuple[int, ...]
    location: Optional[Coord] = None


@dataclass(frozen=True)
class Region:
    """Deployment region: a square of side `size`, a disk of diameter `size`,
    or an abstract region with no geometry (size is None)."""

    kind: str
    size: Optional[Fraction] = None

    @property
    def is_geometric(self) -> bool:
        return self.kind in (SQUARE, DISK)

    def contains(self, point: Coord) -> bool:
        x, y = point
        if self.kind == SQUARE:
            return 0 <= x <= self.size and 0 <= y <= self.size
        if self.kind == DISK:
            r = Fraction(self.size, 2)
            return x * x + y * y <= r * r
        return True


def square_region(side) -> Region:
    return Region(SQUARE, Fraction(side))


def disk_region(diameter) -> Region:
    """Disk centered at the origin with the given diameter."""
    return Region(DISK, Fraction(diameter))


def abstract_region() -> Region:
    return Region(ABSTRACT)


@dataclass(frozen=True)
class Link:
    """A directed transmission opportunity on one channel."""

    src: str
    dst: str
    channel: int

    def key(self) -> tuple:
        return (self.channel, self.src, self.dst)


@dataclass(frozen=True)
class Network:
    nodes: tuple[Node, ...]
    channels: tuple[Channel, ...]
    region: Region
    interference: "InterferenceSpec"

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def c(self) -> int:
        return len(self.channels)

    @property
    def m(self) -> int:
        return max(len(node.channels) for node in self.nodes)

    def node(self, node_id: str) -> Node:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def channel(self, channel_id: int) -> Channel:
        for ch in self.channels:
            if ch.id == channel_id:
                return ch
        raise KeyError(channel_id)

    def interfaces_on(self, channel_id: int) -> tuple[str, ...]:
        """Ids of nodes holding an interface on the channel, sorted."""
        return tuple(sorted(n.id for n in self.nodes if channel_id in n.channels))

    def locations(self) -> dict[str, Coord]:
        return {n.id: n.location for n in self.nodes if n.location is not None}


@dataclass(frozen=True)
class SubNetwork:
    """The single-channel projection: interfaces of one channel viewed as
    free-standing single-radio nodes."""

    channel: Channel
    owners: tuple[str, ...]


@dataclass(frozen=True)
class FlowConfig:
    """One flow per source node, each with a single destination.

    `routes` optionally pins a flow to an explicit node path (source first,
    destination last); unrouted flows may use any path the LP likes.
    """

    dests: tuple[tuple[str, str], ...]
    routes: tuple[tuple[str, tuple[str, ...]], ...] = field(default=())

    @property
    def dest(self) -> dict[str, str]:
        return dict(self.dests)

    def route_of(self, src: str) -> Optional[tuple[str, ...]]:
        for flow_src, path in self.routes:
            if flow_src == src:
                return path
        return None

    def sources(self) -> tuple[str, ...]:
        return tuple(src for src, _ in self.dests)


def make_flow_config(dest: dict[str, str], routes: dict[str, tuple[str, ...]] | None = None) -> FlowConfig:
    pairs = tuple(sorted(dest.items()))
    route_pairs = tuple(sorted((src, tuple(path)) for src, path in (routes or {}).items()))
    return FlowConfig(pairs, route_pairs)


def build_network(nodes, channels, region: Region, interference) -> Network:
    """Validate and assemble a Network.

    Channel ids must be unique and contiguous from 1, rates positive. Every
    node needs at least one interface and at most one per channel. Locations
    are allowed only in geometric regions, where they are optional: a network
    built without them describes a topology whose coordinates are chosen
    later, one placement at a time.
    """
    channels = tuple(channels)
    nodes = tuple(nodes)
    if not channels:
        raise InvalidInputError("no_channels", "at least one channel is required")
    ids = [ch.id for ch in channels]
    if sorted(ids) != list(range(1, len(channels) + 1)):
        raise InvalidInputError("bad_channel_ids", f"channel ids must be 1..{len(channels)}, got {sorted(ids)}")
    for ch in channels:
        if ch.rate <= 0:
            raise InvalidInputError("bad_rate", f"channel {ch.id} rate must be positive", f"channels[{ch.id}]")
    if not nodes:
        raise InvalidInputError("no_nodes", "at least one node is required")
    seen = set()
    known = set(ids)
    for node in nodes:
        if not node.id:
            raise InvalidInputError("bad_node_id", "node ids must be non-empty")
        if node.id in seen:
            raise InvalidInputError("duplicate_node", f"node id {node.id!r} appears twice", f"nodes[{node.id}]")
        seen.add(node.id)
        if not node.channels:
            raise InvalidInputError("no_interfaces", f"node {node.id!r} has no interfaces", f"nodes[{node.id}]")
        if len(set(node.channels)) != len(node.channels):
            raise InvalidInputError(
                "duplicate_channel_interface",
                f"node {node.id!r} lists a channel twice; one interface per channel",
                f"nodes[{node.id}].channels",
            )
        for cid in node.channels:
            if cid not in known:
                raise InvalidInputError("unknown_channel", f"node {node.id!r} references channel {cid}", f"nodes[{node.id}].channels")
        if region.is_geometric:
            # Locations may be omitted here and supplied later as a placement.
            if node.location is not None and not region.contains(node.location):
                raise InvalidInputError("outside_region", f"node {node.id!r} lies outside the region", f"nodes[{node.id}].location")
        elif node.location is not None:
            raise InvalidInputError("location_in_abstract_region", f"node {node.id!r} has a location but the region is abstract", f"nodes[{node.id}]")
    m = max(len(node.channels) for node in nodes)
    if m > len(channels):
        raise InvalidInputError("too_many_interfaces", f"a node has {m} interfaces but only {len(channels)} channels exist")
    from .interference import ProtocolInterference

    if isinstance(interference, ProtocolInterference) and not region.is_geometric:
        raise InvalidInputError("protocol_requires_geometry", "the protocol interference model needs node coordinates")
    ordered = tuple(sorted(channels, key=lambda ch: ch.id))
    return Network(nodes=nodes, channels=ordered, region=region, interference=interference)


def derive_links(net: Network) -> tuple[Link, ...]:
    """All directed links: one per ordered co-channel node pair, per channel.

    Distance plays no role here; feasibility of using a link concurrently
    with others is the interference module's concern.
    """
    links = []
    for ch in net.channels:
        members = net.interfaces_on(ch.id)
        for src, dst in itertools.permutations(members, 2):
            links.append(Link(src, dst, ch.id))
    return tuple(sorted(links, key=Link.key))


def project_single_channel(net: Network, channel_id: int) -> SubNetwork:
    """Interfaces of one channel as a free-standing single-radio network."""
    return SubNetwork(channel=net.channel(channel_id), owners=net.interfaces_on(channel_id))


def subnetwork_as_network(net: Network, sub: SubNetwork) -> Network:
    """Materialize a projection as a standalone Network (channel renumbered
    to 1, owner locations carried over)."""
    nodes = tuple(
        Node(id=owner, channels=(1,), location=net.node(owner).location)
        for owner in sub.owners
    )
    channels = (Channel(1, sub.channel.rate),)
    return build_network(nodes, channels, net.region, net.interference)


def enumerate_flow_configs(net_or_ids) -> list[FlowConfig]:
    """Every assignment of one destination per node, in lexicographic order
    of (node id, destination id). There are (n-1)^n of them."""
    if isinstance(net_or_ids, Network):
        ids = sorted(node.id for node in net_or_ids.nodes)
    else:
        ids = sorted(net_or_ids)
    if len(ids) < 2:
        raise InvalidInputError("too_few_nodes", "flow configurations need at least two nodes")
    choices = [[d for d in ids if d != src] for src in ids]
    configs = []
    for combo in itertools.product(*choices):
        configs.append(FlowConfig(tuple(zip(ids, combo))))
    return configs
