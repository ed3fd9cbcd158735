"""JSON file formats for networks, flows, placements, and schedule logs.

All files carry "format_version": 1. Rational values are accepted as plain
integers or "p/q" strings and always serialize back to the string form, so
parse and serialize round-trip exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .errors import InvalidInputError
from .interference import (
    RECEIVER_GUARD,
    TRANSMITTER_GUARD,
    ProtocolInterference,
    SingleCollisionDomain,
)
from .model import (
    ABSTRACT,
    DISK,
    SQUARE,
    Channel,
    Coord,
    FlowConfig,
    Link,
    Network,
    Node,
    Region,
    abstract_region,
    build_network,
    disk_region,
    make_flow_config,
    square_region,
)
from .rationals import parse_rational, rational_str
from .replay import LogEntry, StsLog

FORMAT_VERSION = 1


def _decode(data, what: str) -> dict:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidInputError("bad_json", f"{what} file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidInputError("bad_schema", f"{what} file must hold a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise InvalidInputError(
            "bad_format_version",
            f"{what} file needs format_version {FORMAT_VERSION}, got {version!r}",
            path="format_version",
        )
    return data


def _rational(value, path: str) -> Fraction:
    try:
        return parse_rational(value)
    except (InvalidInputError, TypeError, ValueError):
        raise InvalidInputError("bad_rational", f"{value!r} is not a rational", path=path) from None


def _coord(value, path: str) -> Coord:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InvalidInputError("bad_coordinate", "a coordinate is a [x, y] pair", path=path)
    return (_rational(value[0], f"{path}[0]"), _rational(value[1], f"{path}[1]"))


# ------------------------------------------------------------- networks ---


def parse_network(data) -> Network:
    doc = _decode(data, "network")
    region_doc = doc.get("region")
    if not isinstance(region_doc, dict) or "kind" not in region_doc:
        raise InvalidInputError("bad_region", "network needs a region with a kind", path="region")
    kind = region_doc["kind"]
    if kind == SQUARE:
        region = square_region(_rational(region_doc.get("side_m", 1), "region.side_m"))
    elif kind == DISK:
        region = disk_region(_rational(region_doc.get("diameter_m", 1), "region.diameter_m"))
    elif kind == ABSTRACT:
        region = abstract_region()
    else:
        raise InvalidInputError("bad_region", f"unknown region kind {kind!r}", path="region.kind")

    interference_doc = doc.get("interference")
    if interference_doc is None:
        if region.is_geometric:
            raise InvalidInputError(
                "missing_interference", "geometric regions need an interference model", path="interference"
            )
        interference = SingleCollisionDomain()
    elif not isinstance(interference_doc, dict) or "kind" not in interference_doc:
        raise InvalidInputError("bad_interference", "interference needs a kind", path="interference")
    elif interference_doc["kind"] == "protocol":
        guard = interference_doc.get("guard", TRANSMITTER_GUARD)
        if guard not in (TRANSMITTER_GUARD, RECEIVER_GUARD):
            raise InvalidInputError("bad_guard", f"unknown guard {guard!r}", path="interference.guard")
        interference = ProtocolInterference(
            delta=_rational(interference_doc.get("delta", 0), "interference.delta"), guard=guard
        )
    elif interference_doc["kind"] == "single_collision_domain":
        interference = SingleCollisionDomain()
    else:
        raise InvalidInputError(
            "bad_interference", f"unknown interference kind {interference_doc['kind']!r}",
            path="interference.kind",
        )

    channels = []
    for i, ch in enumerate(doc.get("channels") or []):
        if not isinstance(ch, dict) or "id" not in ch or "rate" not in ch:
            raise InvalidInputError("bad_channel", "each channel needs an id and a rate", path=f"channels[{i}]")
        if not isinstance(ch["id"], int):
            raise InvalidInputError("bad_channel", "channel ids are integers", path=f"channels[{i}].id")
        channels.append(Channel(id=ch["id"], rate=_rational(ch["rate"], f"channels[{i}].rate")))

    nodes = []
    for i, node in enumerate(doc.get("nodes") or []):
        if not isinstance(node, dict) or "id" not in node or "channels" not in node:
            raise InvalidInputError("bad_node", "each node needs an id and a channel list", path=f"nodes[{i}]")
        if not isinstance(node["id"], str):
            raise InvalidInputError("bad_node", "node ids are strings", path=f"nodes[{i}].id")
        listed = node["channels"]
        if not isinstance(listed, list) or not all(isinstance(x, int) for x in listed):
            raise InvalidInputError("bad_node", "node channels are integer lists", path=f"nodes[{i}].channels")
        location = None
        if node.get("location") is not None:
            location = _coord(node["location"], f"nodes[{i}].location")
        nodes.append(Node(id=node["id"], channels=tuple(listed), location=location))

    return build_network(nodes, channels, region, interference)


def serialize_network(net: Network) -> dict:
    region: dict = {"kind": net.region.kind}
    if net.region.kind == SQUARE:
        region["side_m"] = rational_str(net.region.size)
    elif net.region.kind == DISK:
        region["diameter_m"] = rational_str(net.region.size)
    if isinstance(net.interference, ProtocolInterference):
        interference = {
            "kind": "protocol",
            "delta": rational_str(net.interference.delta),
            "guard": net.interference.guard,
        }
    else:
        interference = {"kind": "single_collision_domain"}
    nodes = []
    for node in net.nodes:
        entry: dict = {"id": node.id, "channels": list(node.channels)}
        if node.location is not None:
            entry["location"] = [rational_str(node.location[0]), rational_str(node.location[1])]
        nodes.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "region": region,
        "interference": interference,
        "channels": [{"id": ch.id, "rate": rational_str(ch.rate)} for ch in net.channels],
        "nodes": nodes,
    }


# ---------------------------------------------------------------- flows ---


def parse_flows(data) -> FlowConfig:
    """Flow files map each source to its destination, or to the hop list
    walked to the destination when the route is pinned."""
    doc = _decode(data, "flows")
    flows = doc.get("flows")
    if not isinstance(flows, dict) or not flows:
        raise InvalidInputError("bad_flows", "flows file needs a non-empty flows object", path="flows")
    dests = {}
    routes = {}
    for src, spec in flows.items():
        if isinstance(spec, str):
            dests[src] = spec
        elif isinstance(spec, list) and spec and all(isinstance(h, str) for h in spec):
            dests[src] = spec[-1]
            routes[src] = (src, *spec)
        else:
            raise InvalidInputError(
                "bad_flows", "each flow is a destination or a non-empty hop list", path=f"flows[{src}]"
            )
    return make_flow_config(dests, routes or None)


def serialize_flows(flows: FlowConfig) -> dict:
    body = {}
    for src, dst in flows.dests:
        route = flows.route_of(src)
        body[src] = list(route[1:]) if route else dst
    return {"format_version": FORMAT_VERSION, "flows": body}


# ------------------------------------------------------------ placements ---


def parse_placement(data) -> dict[str, Coord]:
    doc = _decode(data, "placement")
    coords = doc.get("coords")
    if not isinstance(coords, dict) or not coords:
        raise InvalidInputError("bad_placement", "placement file needs a non-empty coords object", path="coords")
    return {node: _coord(point, f"coords[{node}]") for node, point in coords.items()}


def serialize_placement(placement: dict[str, Coord]) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "coords": {
            node: [rational_str(x), rational_str(y)]
            for node, (x, y) in sorted(placement.items())
        },
    }


# ------------------------------------------------------------- STS logs ---


def parse_sts_log(data) -> StsLog:
    doc = _decode(data, "schedule log")
    if "horizon" not in doc:
        raise InvalidInputError("bad_log", "schedule log needs a horizon", path="horizon")
    horizon = _rational(doc["horizon"], "horizon")
    entries = []
    for i, entry in enumerate(doc.get("entries") or []):
        where = f"entries[{i}]"
        if not isinstance(entry, dict) or "t" not in entry or "channel" not in entry:
            raise InvalidInputError("bad_log", "each entry needs a time and a channel", path=where)
        if not isinstance(entry["channel"], int):
            raise InvalidInputError("bad_log", "entry channels are integers", path=f"{where}.channel")
        links = []
        for k, pair in enumerate(entry.get("links") or []):
            if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(p, str) for p in pair):
                raise InvalidInputError("bad_log", "links are [src, dst] pairs", path=f"{where}.links[{k}]")
            links.append(Link(src=pair[0], dst=pair[1], channel=entry["channel"]))
        bit_ids: Optional[tuple[str, ...]] = None
        if entry.get("bit_ids") is not None:
            raw = entry["bit_ids"]
            if not isinstance(raw, list) or not all(isinstance(b, str) for b in raw):
                raise InvalidInputError("bad_log", "bit_ids are string lists", path=f"{where}.bit_ids")
            bit_ids = tuple(raw)
        entries.append(LogEntry(
            time=_rational(entry["t"], f"{where}.t"), channel=entry["channel"],
            links=tuple(links), bit_ids=bit_ids,
        ))
    return StsLog(horizon=horizon, entries=tuple(entries))


def serialize_sts_log(log: StsLog) -> dict:
    entries = []
    for entry in log.entries:
        body: dict = {
            "t": rational_str(entry.time),
            "channel": entry.channel,
            "links": [[link.src, link.dst] for link in entry.links],
        }
        if entry.bit_ids is not None:
            body["bit_ids"] = list(entry.bit_ids)
        entries.append(body)
    return {"format_version": FORMAT_VERSION, "horizon": rational_str(log.horizon), "entries": entries}


def dump(document: dict) -> str:
    """Canonical byte-stable JSON rendering of a serialized document."""
    return json.dumps(document, indent=2) + "\n"


def load_path(path: str) -> bytes:
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except OSError as exc:
        raise InvalidInputError("unreadable_file", f"cannot read {path}: {exc}") from None
