"""Capacity optimization for multi-channel multi-radio networks.

Capacity questions are posed as steady-state linear programs. Time-sharing
over concurrent transmission sets is modeled per channel: each channel
divides its airtime among its maximal feasible link sets, and a link's
usable rate is its channel rate times the airtime covering it. Flow
variables then route traffic subject to conservation, under one of two
disciplines:

* multi-channel routing: a bit may hop across channels at relays, so each
  flow keeps one rate variable and one conservation system over all links;
* single-channel routing: every bit rides exactly one channel end to end,
  so a flow splits into channel-pure subflows, one conservation system per
  channel the endpoints share.

Objectives: `transport` weighs each flow by the straight-line displacement
from source to destination (abstract networks use the unit-hop convention,
one meter-equivalent per delivered bit); `min_throughput` maximizes the
worst per-flow rate, optionally scaled by the node count; and
`total_throughput` maximizes the sum of flow rates.

Every solved result carries its activation shares, flow rates, and link
flows, so `audit_result` can re-check feasibility without trusting the
solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import EnumerationCapError, ExactBackendError, InvalidInputError, SolverError
from .interference import (
    DEFAULT_ENUMERATION_CAP,
    activation_feasible,
    channel_maximal_sets,
    squared_distance,
)
from .lp import OPTIMAL, LpModel, solve_lp, verify_solution
from .model import (
    FlowConfig,
    Link,
    Network,
    derive_links,
    enumerate_flow_configs,
    project_single_channel,
    subnetwork_as_network,
)
from .rationals import exact_sqrt

SINGLE_CHANNEL = "single_channel"
MULTI_CHANNEL = "multi_channel"
ROUTINGS = (SINGLE_CHANNEL, MULTI_CHANNEL)

TRANSPORT = "transport"
MIN_THROUGHPUT = "min_throughput"
TOTAL_THROUGHPUT = "total_throughput"
OBJECTIVE_KINDS = (TRANSPORT, MIN_THROUGHPUT, TOTAL_THROUGHPUT)

EXPECTATION = "expectation"

_FLOAT_CUTOFF = 1e-12


@dataclass(frozen=True)
class Objective:
    kind: str
    scale_by_n: bool = False

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise InvalidInputError("bad_objective", f"unknown objective kind {self.kind!r}")
        if self.scale_by_n and self.kind != MIN_THROUGHPUT:
            raise InvalidInputError(
                "bad_objective", "scale_by_n applies only to min_throughput"
            )


@dataclass
class CapacityResult:
    """A solved capacity LP in auditable form."""

    value: object
    units: str
    flow_rates: dict[str, object]
    link_flows: dict[str, dict[Link, object]]
    activation_shares: dict[frozenset, object]
    per_channel_transport: Optional[dict[int, object]]
    channel_rates: Optional[dict[str, dict[int, object]]]
    objective: Objective
    routing: str
    backend: str
    lp_vars: int = 0
    lp_rows: int = 0
    pivots: int = 0


@dataclass
class ExpectationResult:
    mean: object
    per_config: list[tuple[FlowConfig, object]]
    routing: str
    objective: Objective
    backend: str


@dataclass
class ProjectedSum:
    """Sum of single-channel projection capacities, with per-channel terms."""

    total: object
    per_channel: dict[int, object]
    objective: Objective
    backend: str


@dataclass
class SeparabilityReport:
    capacity: object
    projected_sum: object
    gap: object
    sign: int
    per_channel: dict[int, object]
    objective: Objective
    routing: str


@dataclass
class RoutingComparison:
    multi_value: object
    single_value: object
    delta: object
    multi_detail: object = None
    single_detail: object = None


@dataclass(frozen=True)
class _Flow:
    key: str
    src: str
    dst: str
    route: Optional[tuple[str, ...]]
    dist: object


@dataclass
class _Layout:
    flows: list[_Flow]
    gamma_vars: dict[int, list[str]]
    channel_sets: dict[int, list[tuple[Link, ...]]]
    x_vars: dict[str, dict[Link, str]]
    rate_vars: dict[str, list[tuple[int, str]]]


def flow_key(src: str, dst: str) -> str:
    return f"{src}>{dst}"


# ------------------------------------------------------------- distances ---


def flow_distance(net: Network, placement: Optional[dict], src: str, dst: str, backend: str):
    """Displacement credited per delivered bit of a flow.

    Geometric regions use the Euclidean source-destination distance;
    abstract regions credit one unit per bit (the unit-hop convention).
    """
    if not net.region.is_geometric:
        return Fraction(1)
    d2 = squared_distance(placement[src], placement[dst])
    if backend == "exact":
        try:
            return exact_sqrt(d2)
        except ExactBackendError:
            raise ExactBackendError(
                f"distance between {src!r} and {dst!r} is irrational; "
                "use the float backend for this geometry"
            )
    return math.sqrt(d2)


def _resolve_placement(net: Network, placement: Optional[dict]) -> Optional[dict]:
    if not net.region.is_geometric:
        return None
    if placement is None:
        placement = net.locations()
    missing = [node.id for node in net.nodes if node.id not in placement]
    if missing:
        raise InvalidInputError(
            "placement_required", f"no coordinates for nodes {missing}", path="placement"
        )
    return placement


# ----------------------------------------------------------- LP assembly ---


def _validate_flows(net: Network, flows: FlowConfig) -> list[_Flow]:
    ids = {node.id for node in net.nodes}
    out = []
    for src, dst in flows.dests:
        if src not in ids or dst not in ids:
            raise InvalidInputError("unknown_flow_node", f"flow {src!r} -> {dst!r} references unknown node")
        if src == dst:
            raise InvalidInputError("bad_flow", f"flow source and destination coincide at {src!r}")
        route = flows.route_of(src)
        if route is not None:
            if route[0] != src or route[-1] != dst:
                raise InvalidInputError("bad_route", f"route for {src!r} must run source to destination")
            if len(route) < 2 or any(a == b for a, b in zip(route, route[1:])):
                raise InvalidInputError("bad_route", f"route for {src!r} repeats a node consecutively")
            if any(v not in ids for v in route):
                raise InvalidInputError("bad_route", f"route for {src!r} references unknown node")
        out.append(_Flow(flow_key(src, dst), src, dst, route, None))
    if not out:
        raise InvalidInputError("no_flows", "at least one flow is required")
    return out


def _all_pairs_flows(net: Network) -> list[_Flow]:
    ids = sorted(node.id for node in net.nodes)
    return [
        _Flow(flow_key(u, v), u, v, None, None)
        for u in ids
        for v in ids
        if u != v
    ]


def _allowed_links(flow: _Flow, links_by_pair: dict[tuple[str, str], list[Link]], routing: str,
                   endpoint_channels: Optional[set[int]]) -> list[Link]:
    """Links a flow may load, honoring a forced route and channel purity."""
    if flow.route is None:
        allowed = [l for links in links_by_pair.values() for l in links]
    else:
        hops = list(zip(flow.route, flow.route[1:]))
        allowed = [l for hop in hops for l in links_by_pair.get(hop, [])]
    if routing == SINGLE_CHANNEL:
        allowed = [l for l in allowed if l.channel in endpoint_channels]
    return sorted(allowed, key=Link.key)


def _single_channel_options(net: Network, flow: _Flow) -> set[int]:
    """Channels on which a channel-pure path for the flow could exist."""
    src_ch = set(net.node(flow.src).channels)
    dst_ch = set(net.node(flow.dst).channels)
    shared = src_ch & dst_ch
    if flow.route is not None:
        for v in flow.route:
            shared &= set(net.node(v).channels)
    return shared


def _build(net: Network, flows, routing: str, objective: Objective,
           placement: Optional[dict], backend: str,
           enumeration_cap: int) -> tuple[LpModel, _Layout]:
    if routing not in ROUTINGS:
        raise InvalidInputError("bad_routing", f"unknown routing scheme {routing!r}")
    placement = _resolve_placement(net, placement)

    if flows is None:
        if objective.kind != TRANSPORT:
            raise InvalidInputError("flows_required", "throughput objectives need an explicit flow configuration")
        flow_list = _all_pairs_flows(net)
    else:
        flow_list = _validate_flows(net, flows)
    if objective.kind == TRANSPORT:
        flow_list = [
            _Flow(f.key, f.src, f.dst, f.route, flow_distance(net, placement, f.src, f.dst, backend))
            for f in flow_list
        ]

    links = derive_links(net)
    links_by_pair: dict[tuple[str, str], list[Link]] = {}
    for link in links:
        links_by_pair.setdefault((link.src, link.dst), []).append(link)

    model = LpModel()
    gamma_vars: dict[int, list[str]] = {}
    channel_sets: dict[int, list[tuple[Link, ...]]] = {}
    for ch in net.channels:
        sets = channel_maximal_sets(net, ch.id, placement, enumeration_cap)
        if sets == [()]:
            continue
        channel_sets[ch.id] = sets
        names = [model.add_var(f"share[{ch.id}.{k}]") for k in range(len(sets))]
        gamma_vars[ch.id] = names

    x_vars: dict[str, dict[Link, str]] = {}
    rate_vars: dict[str, list[tuple[int, str]]] = {}
    rates = {ch.id: ch.rate for ch in net.channels}
    n_scale = net.n if objective.scale_by_n else 1

    for flow in flow_list:
        if routing == SINGLE_CHANNEL:
            options = _single_channel_options(net, flow)
            allowed = _allowed_links(flow, links_by_pair, routing, options)
            present = sorted({l.channel for l in allowed})
            rv = []
            for ch_id in present:
                var = model.add_var(f"rate[{flow.key}][{ch_id}]")
                if objective.kind == TRANSPORT:
                    model.objective[var] = flow.dist
                elif objective.kind == TOTAL_THROUGHPUT:
                    model.objective[var] = Fraction(1)
                rv.append((ch_id, var))
            rate_vars[flow.key] = rv
        else:
            allowed = _allowed_links(flow, links_by_pair, routing, None)
            var = model.add_var(f"rate[{flow.key}]")
            if objective.kind == TRANSPORT:
                model.objective[var] = flow.dist
            elif objective.kind == TOTAL_THROUGHPUT:
                model.objective[var] = Fraction(1)
            rate_vars[flow.key] = [(0, var)]
        x_vars[flow.key] = {
            link: model.add_var(f"x[{flow.key}][{link.channel}:{link.src}>{link.dst}]")
            for link in allowed
        }

    floor_var = None
    if objective.kind == MIN_THROUGHPUT:
        floor_var = model.add_var("min_rate", obj=Fraction(n_scale))

    for ch_id, names in gamma_vars.items():
        model.add_le(f"time[{ch_id}]", {name: Fraction(1) for name in names}, Fraction(1))

    for flow in flow_list:
        if routing == SINGLE_CHANNEL:
            per_channel: dict[int, list[Link]] = {}
            for link in x_vars[flow.key]:
                per_channel.setdefault(link.channel, []).append(link)
            for ch_id, var in rate_vars[flow.key]:
                _conservation_rows(
                    model, f"bal[{flow.key}][{ch_id}]", flow,
                    per_channel.get(ch_id, []), x_vars[flow.key], var,
                )
        else:
            (_, var), = rate_vars[flow.key]
            _conservation_rows(
                model, f"bal[{flow.key}]", flow, list(x_vars[flow.key]), x_vars[flow.key], var
            )

    for link in links:
        terms: dict[str, Fraction] = {}
        for flow in flow_list:
            var = x_vars[flow.key].get(link)
            if var is not None:
                terms[var] = Fraction(1)
        if not terms:
            continue
        rate = rates[link.channel]
        for k, act in enumerate(channel_sets[link.channel]):
            if link in act:
                terms[gamma_vars[link.channel][k]] = -rate
        model.add_le(f"cap[{link.channel}:{link.src}>{link.dst}]", terms, Fraction(0))

    if floor_var is not None:
        for flow in flow_list:
            terms = {floor_var: Fraction(1)}
            for _, var in rate_vars[flow.key]:
                terms[var] = Fraction(-1)
            model.add_le(f"floor[{flow.key}]", terms, Fraction(0))

    layout = _Layout(flow_list, gamma_vars, channel_sets, x_vars, rate_vars)
    return model, layout


def _conservation_rows(model: LpModel, prefix: str, flow: _Flow, links: list[Link],
                       var_of: dict[Link, str], rate_var: str) -> None:
    incident: dict[str, dict[str, Fraction]] = {}
    for link in links:
        var = var_of[link]
        incident.setdefault(link.dst, {})[var] = Fraction(1)
        incident.setdefault(link.src, {})[var] = Fraction(-1)
    nodes = set(incident) | {flow.src, flow.dst}
    for v in sorted(nodes):
        terms = dict(incident.get(v, {}))
        if v == flow.src:
            terms[rate_var] = terms.get(rate_var, Fraction(0)) + Fraction(1)
        if v == flow.dst:
            terms[rate_var] = terms.get(rate_var, Fraction(0)) - Fraction(1)
        if not terms:
            continue  # a relay the flow cannot touch
        model.add_eq(f"{prefix}[{v}]", terms, Fraction(0))


def build_capacity_lp(net: Network, flows, routing: str, objective: Objective,
                      placement: Optional[dict] = None, backend: str = "exact",
                      enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> LpModel:
    """The LP whose optimum is the conditional capacity. Flow variables are
    named `x[src>dst][channel:u>v]`, rates `rate[src>dst]` (with a channel
    suffix under single-channel routing), airtime shares `share[ch.k]`."""
    model, _ = _build(net, flows, routing, objective, placement, backend, enumeration_cap)
    return model


# ------------------------------------------------------------- solutions ---


def _merge_activation_shares(per_channel_pieces: list[list[tuple[frozenset, object]]], one):
    """Stack per-channel airtime splits into global activation shares.

    Each channel's pieces are laid on [0, 1] in order (padded with an idle
    piece); sweeping the union of breakpoints yields cross-channel sets
    whose shares sum to at most 1 and cover each link exactly as much as
    its own channel's shares did.
    """
    zero = one - one
    lanes = []
    for pieces in per_channel_pieces:
        total = zero
        lane = []
        for act, share in pieces:
            if share > zero:
                lane.append((total, total + share, act))
                total = total + share
        if total < one:
            lane.append((total, one, frozenset()))
        lanes.append(lane)
    cuts = sorted({zero, one} | {edge for lane in lanes for lo, hi, _ in lane for edge in (lo, hi)})
    merged: dict[frozenset, object] = {}
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        combined = set()
        for lane in lanes:
            for a, b, act in lane:
                if a <= lo < b:
                    combined |= act
                    break
        if combined:
            key = frozenset(combined)
            merged[key] = merged.get(key, zero) + (hi - lo)
    return merged


def _strip(value, backend: str):
    if backend == "float":
        return value if abs(value) > _FLOAT_CUTOFF else 0.0
    return value


def conditional_capacity(net: Network, flows, routing: str, objective: Objective,
                         placement: Optional[dict] = None, backend: str = "exact",
                         enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> CapacityResult:
    """Capacity conditioned on placement, flows, and routing discipline.

    `flows=None` (transport objective only) optimizes over arbitrary traffic
    patterns by giving every ordered node pair its own flow.
    """
    placement = _resolve_placement(net, placement)
    model, layout = _build(net, flows, routing, objective, placement, backend, enumeration_cap)
    sol = solve_lp(model, backend=backend)
    if sol.status != OPTIMAL:
        raise SolverError(f"capacity LP ended {sol.status}; it should always be bounded and feasible")
    eps = 0 if backend == "exact" else 1e-7
    if not verify_solution(model, sol, eps=eps):
        raise SolverError("capacity LP solution failed its optimality certificate")

    zero = Fraction(0) if backend == "exact" else 0.0
    one = Fraction(1) if backend == "exact" else 1.0

    flow_rates = {}
    channel_rates: Optional[dict] = {} if routing == SINGLE_CHANNEL else None
    for flow in layout.flows:
        parts = {ch: _strip(sol[var], backend) for ch, var in layout.rate_vars[flow.key]}
        flow_rates[flow.key] = sum(parts.values(), zero)
        if channel_rates is not None:
            channel_rates[flow.key] = parts

    link_flows = {}
    for flow in layout.flows:
        loads = {}
        for link, var in layout.x_vars[flow.key].items():
            val = _strip(sol[var], backend)
            if val > zero:
                loads[link] = val
        link_flows[flow.key] = loads

    pieces = []
    for ch_id in sorted(layout.gamma_vars):
        lane = []
        for k, var in enumerate(layout.gamma_vars[ch_id]):
            share = _strip(sol[var], backend)
            if share > zero:
                lane.append((frozenset(layout.channel_sets[ch_id][k]), share))
        pieces.append(lane)
    shares = _merge_activation_shares(pieces, one)

    per_channel_transport = None
    if objective.kind == TRANSPORT:
        per_channel_transport = _transport_by_channel(net, layout, link_flows, placement, backend, zero)

    units = "bit-meters/s" if objective.kind == TRANSPORT and net.region.is_geometric else "bits/s"
    return CapacityResult(
        value=sol.value,
        units=units,
        flow_rates=flow_rates,
        link_flows=link_flows,
        activation_shares=shares,
        per_channel_transport=per_channel_transport,
        channel_rates=channel_rates,
        objective=objective,
        routing=routing,
        backend=backend,
        lp_vars=len(model.variables),
        lp_rows=len(model.constraints),
        pivots=sol.pivots,
    )


def _transport_by_channel(net: Network, layout: _Layout, link_flows, placement, backend, zero):
    """Split the transport value into per-channel contributions.

    Geometric regions project each loaded link's displacement onto the
    flow's source-destination direction (telescoping makes the projections
    of any path sum to the flow distance, and cycles cancel). Abstract
    regions credit each delivered unit to the channel of its final hop.
    """
    contrib = {ch.id: zero for ch in net.channels}
    if net.region.is_geometric:
        for flow in layout.flows:
            if not flow.dist or flow.dist == zero:
                continue
            px, py = placement[flow.src]
            qx, qy = placement[flow.dst]
            dx, dy = qx - px, qy - py
            if backend == "float":
                dx, dy = float(dx), float(dy)
            for link, val in link_flows[flow.key].items():
                ax, ay = placement[link.src]
                bx, by = placement[link.dst]
                sx, sy = bx - ax, by - ay
                if backend == "float":
                    sx, sy = float(sx), float(sy)
                contrib[link.channel] += val * (sx * dx + sy * dy) / flow.dist
    else:
        for flow in layout.flows:
            for path, weight in decompose_flow(link_flows[flow.key], flow.src, flow.dst, zero):
                contrib[path[-1].channel] += weight
    return contrib


def decompose_flow(loads: dict[Link, object], src: str, dst: str, zero) -> list[tuple[tuple[Link, ...], object]]:
    """Greedy path decomposition of one flow's link loads.

    Returns source-to-destination paths with weights; circulation left over
    after the source's outflow is exhausted is dropped (it moves no traffic).
    Deterministic: the walk always follows the smallest-keyed loaded link,
    and any cycle met along the way is drained before continuing.
    """
    residual = {link: val for link, val in loads.items() if val > zero}
    out: dict[str, list[Link]] = {}
    for link in sorted(residual, key=Link.key):
        out.setdefault(link.src, []).append(link)

    def next_link(v):
        for link in out.get(v, []):
            if residual.get(link, zero) > zero:
                return link
        return None

    paths = []
    while True:
        first = next_link(src)
        if first is None:
            break
        path = [first]
        seen = {src: 0, first.dst: 1}
        while path[-1].dst != dst:
            step = next_link(path[-1].dst)
            if step is None:
                # Dead end off a degenerate solution: drain the last hop.
                residual[path[-1]] = zero
                break
            if step.dst in seen:
                cycle = path[seen[step.dst]:] + [step]
                drain = min(residual[l] for l in cycle)
                for l in cycle:
                    residual[l] -= drain
                path = path[:seen[step.dst]]
                if not path:
                    break
                seen = {src: 0}
                for idx, l in enumerate(path):
                    seen[l.dst] = idx + 1
                continue
            path.append(step)
            seen[step.dst] = len(path)
        else:
            weight = min(residual[l] for l in path)
            paths.append((tuple(path), weight))
            for l in path:
                residual[l] -= weight
    return paths


# ----------------------------------------------------------------- audit ---


def audit_result(net: Network, flows, result: CapacityResult,
                 placement: Optional[dict] = None, eps: float = 0) -> list[str]:
    """Re-check a capacity result from first principles, without the solver.

    Verifies activation-share feasibility, link-capacity coverage, flow
    conservation, channel purity under single-channel routing, and that the
    reported value matches the reported rates. Returns human-readable
    problem descriptions; an empty list means the result checks out.
    """
    problems = []
    placement = _resolve_placement(net, placement)
    tol = eps

    total_share = 0
    for act, share in result.activation_shares.items():
        if share < -tol:
            problems.append(f"negative activation share {share}")
        total_share += share
        if act and not activation_feasible(act, net, placement):
            labels = ",".join(f"{l.channel}:{l.src}>{l.dst}" for l in sorted(act, key=Link.key))
            problems.append(f"activation set {{{labels}}} is not feasible")
    if total_share > 1 + tol:
        problems.append(f"activation shares sum to {total_share} > 1")

    coverage: dict[Link, object] = {}
    for act, share in result.activation_shares.items():
        for link in act:
            coverage[link] = coverage.get(link, 0) + share
    load: dict[Link, object] = {}
    for loads in result.link_flows.values():
        for link, val in loads.items():
            if val < -tol:
                problems.append(f"negative flow on {link.channel}:{link.src}>{link.dst}")
            load[link] = load.get(link, 0) + val
    rates = {ch.id: ch.rate for ch in net.channels}
    for link, val in sorted(load.items(), key=lambda kv: kv[0].key()):
        limit = rates[link.channel] * coverage.get(link, 0)
        if val > limit + tol * max(1, float(rates[link.channel])):
            problems.append(
                f"link {link.channel}:{link.src}>{link.dst} carries {val} over airtime budget {limit}"
            )

    flow_list = _all_pairs_flows(net) if flows is None else _validate_flows(net, flows)
    for flow in flow_list:
        loads = result.link_flows.get(flow.key, {})
        rate = result.flow_rates.get(flow.key, 0)
        if rate < -tol:
            problems.append(f"flow {flow.key} has negative rate {rate}")
        if result.routing == SINGLE_CHANNEL:
            parts = result.channel_rates.get(flow.key, {}) if result.channel_rates else {}
            if abs(sum(parts.values(), 0) - rate) > tol:
                problems.append(f"flow {flow.key} rate differs from its channel split")
            by_channel: dict[int, dict[Link, object]] = {}
            for link, val in loads.items():
                by_channel.setdefault(link.channel, {})[link] = val
            for ch_id in sorted(set(by_channel) | {c for c, v in parts.items() if v}):
                problems += _conservation_errors(
                    f"flow {flow.key} channel {ch_id}", by_channel.get(ch_id, {}),
                    flow, parts.get(ch_id, 0), tol,
                )
        else:
            problems += _conservation_errors(f"flow {flow.key}", loads, flow, rate, tol)

    value = _objective_value(net, flow_list, result, placement)
    if abs(value - result.value) > tol * max(1.0, abs(float(result.value))):
        problems.append(f"reported value {result.value} differs from recomputed {value}")
    if result.per_channel_transport is not None:
        spread = sum(result.per_channel_transport.values(), 0)
        if abs(spread - result.value) > tol * max(1.0, abs(float(result.value))):
            problems.append(f"per-channel transport sums to {spread}, not {result.value}")
    return problems


def _conservation_errors(label: str, loads: dict[Link, object], flow: _Flow, rate, tol) -> list[str]:
    balance: dict[str, object] = {}
    for link, val in loads.items():
        balance[link.dst] = balance.get(link.dst, 0) + val
        balance[link.src] = balance.get(link.src, 0) - val
    balance[flow.src] = balance.get(flow.src, 0) + rate
    balance[flow.dst] = balance.get(flow.dst, 0) - rate
    return [
        f"{label}: node {v} imbalance {residual}"
        for v, residual in sorted(balance.items())
        if abs(residual) > tol
    ]


def _objective_value(net: Network, flow_list: list[_Flow], result: CapacityResult, placement):
    kind = result.objective.kind
    if kind == TOTAL_THROUGHPUT:
        return sum(result.flow_rates.values(), 0)
    if kind == MIN_THROUGHPUT:
        worst = min((result.flow_rates.get(f.key, 0) for f in flow_list), default=0)
        return (net.n if result.objective.scale_by_n else 1) * worst
    total = 0
    for f in flow_list:
        dist = flow_distance(net, placement, f.src, f.dst, result.backend)
        total += dist * result.flow_rates.get(f.key, 0)
    return total


# ------------------------------------------------------------ aggregates ---


def expected_capacity(net: Network, routing: str, objective: Objective,
                      backend: str = "exact", max_configs: int = 4096) -> ExpectationResult:
    """Mean conditional capacity over every flow configuration (one
    destination per node), enumerated in lexicographic order."""
    if net.region.is_geometric:
        raise InvalidInputError(
            "expectation_needs_abstract_region",
            "expectation over flow configurations is defined for abstract networks",
        )
    configs = enumerate_flow_configs(net)
    if len(configs) > max_configs:
        raise EnumerationCapError(f"{len(configs)} flow configurations exceed the cap {max_configs}")
    per_config = []
    total = Fraction(0) if backend == "exact" else 0.0
    for config in configs:
        value = conditional_capacity(net, config, routing, objective, backend=backend).value
        per_config.append((config, value))
        total += value
    return ExpectationResult(total / len(configs), per_config, routing, objective, backend)


def projected_capacity_sum(net: Network, objective: Objective, routing: str = MULTI_CHANNEL,
                           backend: str = "exact", strategy=None, budget: Optional[int] = None) -> ProjectedSum:
    """Sum over channels of the capacity each channel's interfaces achieve
    as a free-standing single-channel network.

    Throughput objectives average over the projection's own flow
    configurations. The transport objective optimizes the projection's
    interface placements over `strategy` candidates when the region is
    geometric, and otherwise scores every ordered pair at unit hop
    distance. Channels with fewer than two interfaces contribute zero.
    """
    per_channel = {}
    total = Fraction(0) if backend == "exact" else 0.0
    for ch in net.channels:
        sub = project_single_channel(net, ch.id)
        if len(sub.owners) < 2:
            per_channel[ch.id] = Fraction(0) if backend == "exact" else 0.0
            total += per_channel[ch.id]
            continue
        subnet = subnetwork_as_network(net, sub)
        if objective.kind == TRANSPORT:
            if net.region.is_geometric:
                if strategy is None:
                    raise InvalidInputError(
                        "strategy_required",
                        "projected transport capacity needs a placement search strategy",
                    )
                from .placement import optimize_over_placements

                best = optimize_over_placements(
                    subnet, strategy, routing=MULTI_CHANNEL, objective=objective,
                    flow_handling="all_pairs", backend=backend, budget=budget,
                )
                per_channel[ch.id] = best.value
            else:
                per_channel[ch.id] = conditional_capacity(
                    subnet, None, MULTI_CHANNEL, objective, backend=backend,
                ).value
        else:
            per_channel[ch.id] = expected_capacity(subnet, MULTI_CHANNEL, objective, backend=backend).mean
        total += per_channel[ch.id]
    return ProjectedSum(total, per_channel, objective, backend)


def separability_report(net: Network, objective: Objective, routing: str,
                        backend: str = "exact", strategy=None,
                        budget: Optional[int] = None) -> SeparabilityReport:
    """Whole-network capacity against the sum of its single-channel
    projections, with the gap's sign (positive: projections promise more
    than the network delivers).

    Abstract networks score the whole network as an expectation over flow
    configurations (all-pairs traffic under the transport objective).
    Geometric networks need `strategy`: both sides then search interface
    placements over the same candidates, and `budget` caps each search
    independently.
    """
    if objective.kind == TRANSPORT and net.region.is_geometric:
        if strategy is None:
            raise InvalidInputError(
                "strategy_required",
                "whole-network transport capacity on a geometric region needs "
                "a placement search strategy",
            )
        from .placement import optimize_over_placements

        capacity = optimize_over_placements(
            net, strategy, routing=routing, objective=objective,
            backend=backend, budget=budget, fold_symmetry=True,
        ).value
    elif objective.kind == TRANSPORT:
        capacity = conditional_capacity(net, None, routing, objective, backend=backend).value
    else:
        capacity = expected_capacity(net, routing, objective, backend=backend).mean
    projected = projected_capacity_sum(net, objective, routing, backend=backend,
                                       strategy=strategy, budget=budget)
    gap = projected.total - capacity
    sign = (gap > 0) - (gap < 0)
    return SeparabilityReport(capacity, projected.total, gap, sign, projected.per_channel, objective, routing)


def compare_routing(net: Network, objective: Objective, conditioning,
                    placement: Optional[dict] = None, backend: str = "exact") -> RoutingComparison:
    """Multi-channel versus single-channel routing under one conditioning:
    a FlowConfig, or "expectation" for the mean over all configurations."""
    if conditioning == EXPECTATION:
        multi = expected_capacity(net, MULTI_CHANNEL, objective, backend=backend)
        single = expected_capacity(net, SINGLE_CHANNEL, objective, backend=backend)
        return RoutingComparison(multi.mean, single.mean, multi.mean - single.mean, multi, single)
    multi = conditional_capacity(net, conditioning, MULTI_CHANNEL, objective, placement, backend)
    single = conditional_capacity(net, conditioning, SINGLE_CHANNEL, objective, placement, backend)
    return RoutingComparison(multi.value, single.value, multi.value - single.value, multi, single)
