"""Placement search over candidate coordinate sets.

A placement assigns every node an exact rational coordinate inside the
region. Strategies name finite candidate point sets (grid, corners and
midpoints, diameter endpoints, or an explicit list of placements); the
search evaluates conditional capacity at every assignment of nodes to
candidate points and keeps the best, with an optional symmetry fold and a
cheap physical upper bound to skip placements that cannot win.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .capacity import (
    MULTI_CHANNEL,
    TRANSPORT,
    CapacityResult,
    Objective,
    conditional_capacity,
    flow_distance,
)
from .errors import BudgetExceededError, InvalidInputError
from .interference import DEFAULT_ENUMERATION_CAP, channel_maximal_sets
from .model import (
    DISK,
    SQUARE,
    Coord,
    FlowConfig,
    Network,
    Region,
    enumerate_flow_configs,
)

GRID = "grid"
CORNERS_AND_MIDPOINTS = "corners_and_midpoints"
DIAMETER_ENDPOINTS = "diameter_endpoints"
EXPLICIT = "explicit"

# How the search conditions on traffic at each candidate placement.
ALL_PAIRS = "all_pairs"
FIXED_FLOWS = "fixed"
ENUMERATE_FLOWS = "enumerate"
FLOW_HANDLING = (ALL_PAIRS, FIXED_FLOWS, ENUMERATE_FLOWS)


@dataclass(frozen=True)
class CandidateStrategy:
    """A named recipe for the finite set of placements to try."""

    kind: str
    points_per_axis: int = 0
    placements: tuple = ()


def grid_strategy(points_per_axis: int) -> CandidateStrategy:
    """Evenly spaced k-by-k rational lattice over the region's bounding box."""
    if points_per_axis < 2:
        raise InvalidInputError("bad_grid", "a grid needs at least two points per axis")
    return CandidateStrategy(GRID, points_per_axis=points_per_axis)


def corners_strategy() -> CandidateStrategy:
    """Square corners, edge midpoints, and center: nine points."""
    return CandidateStrategy(CORNERS_AND_MIDPOINTS)


def diameter_strategy() -> CandidateStrategy:
    """Both ends of the disk's horizontal diameter plus the center."""
    return CandidateStrategy(DIAMETER_ENDPOINTS)


def explicit_strategy(placements) -> CandidateStrategy:
    """A literal list of placements, each mapping every node to a coordinate."""
    frozen = []
    for placement in placements:
        items = tuple(sorted((node, (Fraction(x), Fraction(y))) for node, (x, y) in placement.items()))
        frozen.append(items)
    if not frozen:
        raise InvalidInputError("bad_placement_list", "an explicit strategy needs at least one placement")
    return CandidateStrategy(EXPLICIT, placements=tuple(frozen))


def parse_strategy(text: str) -> CandidateStrategy:
    """Parse the command-line strategy spelling: grid:K, corners, or diameter."""
    if text == "corners":
        return corners_strategy()
    if text == "diameter":
        return diameter_strategy()
    if text.startswith("grid:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise InvalidInputError("bad_strategy", f"grid size in {text!r} is not an integer") from None
        return grid_strategy(k)
    raise InvalidInputError("bad_strategy", f"unknown placement search strategy {text!r}")


def candidate_points(region: Region, strategy: CandidateStrategy) -> tuple[Coord, ...]:
    """The strategy's candidate coordinates, sorted lexicographically."""
    if not region.is_geometric:
        raise InvalidInputError("strategy_needs_geometry", "placement search needs a geometric region")
    if strategy.kind == GRID:
        k = strategy.points_per_axis
        if region.kind == SQUARE:
            lo, hi = Fraction(0), region.size
        else:
            r = Fraction(region.size, 2)
            lo, hi = -r, r
        axis = [lo + Fraction(i, k - 1) * (hi - lo) for i in range(k)]
        points = [(x, y) for x in axis for y in axis if region.contains((x, y))]
        return tuple(points)
    if strategy.kind == CORNERS_AND_MIDPOINTS:
        if region.kind != SQUARE:
            raise InvalidInputError("strategy_region_mismatch", "corners-and-midpoints applies to square regions")
        s = region.size
        half = Fraction(s, 2)
        points = {
            (Fraction(0), Fraction(0)), (Fraction(0), s), (s, Fraction(0)), (s, s),
            (half, Fraction(0)), (Fraction(0), half), (s, half), (half, s),
            (half, half),
        }
        return tuple(sorted(points))
    if strategy.kind == DIAMETER_ENDPOINTS:
        if region.kind != DISK:
            raise InvalidInputError("strategy_region_mismatch", "diameter endpoints apply to disk regions")
        r = Fraction(region.size, 2)
        return ((-r, Fraction(0)), (Fraction(0), Fraction(0)), (r, Fraction(0)))
    raise InvalidInputError("bad_strategy", f"strategy {strategy.kind!r} has no point set")


def count_candidates(region: Region, node_ids, strategy: CandidateStrategy) -> int:
    if strategy.kind == EXPLICIT:
        return len(strategy.placements)
    return len(candidate_points(region, strategy)) ** len(list(node_ids))


def generate_candidates(region: Region, node_ids, strategy: CandidateStrategy) -> Iterator[dict[str, Coord]]:
    """Yield placements in deterministic lexicographic order.

    Point-set strategies yield every assignment of nodes (in the given
    order) to candidate points; explicit strategies yield their list after
    validating node coverage and region membership.
    """
    node_ids = list(node_ids)
    if strategy.kind == EXPLICIT:
        expected = set(node_ids)
        for idx, items in enumerate(strategy.placements):
            placement = dict(items)
            if set(placement) != expected:
                raise InvalidInputError(
                    "bad_placement", f"placement {idx} does not cover exactly the network's nodes",
                    path=f"placements[{idx}]",
                )
            for node, point in items:
                if not region.contains(point):
                    raise InvalidInputError(
                        "outside_region", f"placement {idx} puts node {node!r} outside the region",
                        path=f"placements[{idx}][{node}]",
                    )
            yield placement
        return
    points = candidate_points(region, strategy)
    for combo in itertools.product(points, repeat=len(node_ids)):
        yield dict(zip(node_ids, combo))


def _orbit_key(region: Region, coords: tuple[Coord, ...]) -> tuple:
    """Canonical form of a placement under the region's eight reflections
    and rotations. Placements with equal keys have equal capacity."""
    if region.kind == SQUARE:
        s = region.size

        def images(point):
            x, y = point
            return (
                (x, y), (s - x, y), (x, s - y), (s - x, s - y),
                (y, x), (s - y, x), (y, s - x), (s - y, s - x),
            )
    else:
        def images(point):
            x, y = point
            return (
                (x, y), (-x, y), (x, -y), (-x, -y),
                (y, x), (-y, x), (y, -x), (-y, -x),
            )

    per_node = [images(point) for point in coords]
    return min(tuple(images_[i] for images_ in per_node) for i in range(8))


def _capacity_upper_bound(net: Network, objective: Objective, placement, backend):
    """A bound no schedule can beat, used to skip hopeless placements.

    Transport: per channel, the best simultaneous activation's total link
    length times the channel rate; each in-flight bit advances toward its
    destination no faster than its hop carries it. Throughput: the sum of
    channel rates, since every delivered bit occupies some channel.
    """
    zero = Fraction(0) if backend == "exact" else 0.0
    if objective.kind == TRANSPORT:
        total = zero
        for ch in net.channels:
            best = zero
            for links in channel_maximal_sets(net, ch.id, placement=placement):
                covered = zero
                for link in links:
                    covered += flow_distance(net, placement, link.src, link.dst, backend)
                if covered > best:
                    best = covered
            total += ch.rate * best
        return total
    scale = net.n if objective.scale_by_n else 1
    total = scale * sum((ch.rate for ch in net.channels), Fraction(0))
    return float(total) if backend == "float" else total


@dataclass(frozen=True)
class SearchResult:
    """Best placement found, with the traffic it was scored under."""

    value: object
    placement: dict[str, Coord]
    flows: Optional[FlowConfig]
    detail: CapacityResult
    candidates: int
    evaluated: int
    skipped_symmetry: int
    skipped_bound: int


def optimize_over_placements(
    net: Network,
    strategy: CandidateStrategy | str,
    routing: str = MULTI_CHANNEL,
    objective: Objective = Objective(TRANSPORT),
    flow_handling: str = ALL_PAIRS,
    flows: Optional[FlowConfig] = None,
    backend: str = "exact",
    budget: Optional[int] = None,
    fold_symmetry: bool = False,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> SearchResult:
    """Maximize conditional capacity over a strategy's candidate placements.

    Flow handling picks the traffic scored at each placement: "all_pairs"
    solves the transport program over every ordered node pair, "fixed"
    scores the given flow configuration, and "enumerate" maximizes over all
    flow configurations jointly with the placement. Ties keep the first
    placement found. `budget` caps the number of capacity evaluations the
    search may need before it starts; `fold_symmetry` skips placements
    equivalent to an already-seen one under the region's symmetries.
    """
    if isinstance(strategy, str):
        strategy = parse_strategy(strategy)
    if flow_handling not in FLOW_HANDLING:
        raise InvalidInputError("bad_flow_handling", f"unknown flow handling {flow_handling!r}")
    if flow_handling == FIXED_FLOWS and flows is None:
        raise InvalidInputError("flows_required", "fixed flow handling needs a flow configuration")
    if flow_handling != FIXED_FLOWS and flows is not None:
        raise InvalidInputError("bad_flow_handling", f"{flow_handling} flow handling does not take flows")

    node_ids = [node.id for node in net.nodes]
    configs = [None]
    if flow_handling == ENUMERATE_FLOWS:
        configs = enumerate_flow_configs(net)
    elif flow_handling == FIXED_FLOWS:
        configs = [flows]
    n_candidates = count_candidates(net.region, node_ids, strategy)
    work = n_candidates * len(configs)
    if budget is not None and work > budget:
        raise BudgetExceededError(
            f"placement search needs {work} capacity evaluations; budget is {budget}"
        )

    best = None  # (value, placement, flows, detail)
    evaluated = 0
    skipped_symmetry = 0
    skipped_bound = 0
    seen_orbits: set = set()
    for placement in generate_candidates(net.region, node_ids, strategy):
        if fold_symmetry:
            key = _orbit_key(net.region, tuple(placement[v] for v in node_ids))
            if key in seen_orbits:
                skipped_symmetry += 1
                continue
            seen_orbits.add(key)
        if best is not None:
            bound = _capacity_upper_bound(net, objective, placement, backend)
            if bound <= best[0]:
                skipped_bound += 1
                continue
        for config in configs:
            result = conditional_capacity(
                net, config, routing, objective,
                placement=placement, backend=backend, enumeration_cap=enumeration_cap,
            )
            evaluated += 1
            if best is None or result.value > best[0]:
                best = (result.value, dict(placement), config, result)
    if best is None:
        raise InvalidInputError("no_candidates", "the strategy produced no placements inside the region")
    value, placement, best_flows, detail = best
    return SearchResult(
        value=value, placement=placement, flows=best_flows, detail=detail,
        candidates=n_candidates, evaluated=evaluated,
        skipped_symmetry=skipped_symmetry, skipped_bound=skipped_bound,
    )
