"""Rendering results as aligned text tables or deterministic JSON.

Exact values print as "p/q" strings (integers plain), floats at full
round-trip precision, so identical inputs always render identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .capacity import (
    CapacityResult,
    ExpectationResult,
    ProjectedSum,
    RoutingComparison,
    SeparabilityReport,
)
from .formats import dump
from .model import FlowConfig, Link
from .placement import SearchResult
from .rationals import rational_str
from .replay import ReplayResult, ReplicationCheck

TABLE = "table"
JSON = "json"
OUTPUT_KINDS = (TABLE, JSON)


@dataclass(frozen=True)
class ScenarioCheck:
    """One expected-versus-actual comparison inside a scenario."""

    description: str
    expected: str
    actual: str
    passed: bool
    provenance: str  # reference | derived | direct


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    checks: tuple[ScenarioCheck, ...]
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def render_value(value) -> object:
    """JSON form of a result value: rationals as strings, floats as-is."""
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, float):
        return value
    return value


def text_value(value) -> str:
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def link_label(link: Link) -> str:
    return f"{link.channel}:{link.src}>{link.dst}"


def _flows_body(flows: FlowConfig) -> dict:
    body = {}
    for src, dst in flows.dests:
        route = flows.route_of(src)
        body[src] = list(route[1:]) if route else dst
    return body


def _objective_body(objective) -> dict:
    return {"kind": objective.kind, "scale_by_n": objective.scale_by_n}


def to_document(result) -> dict:
    """Machine-readable dict for any result object this package produces."""
    if isinstance(result, CapacityResult):
        shares = sorted(
            ((tuple(sorted(link_label(l) for l in links)), share)
             for links, share in result.activation_shares.items()),
            key=lambda pair: pair[0],
        )
        doc = {
            "kind": "capacity",
            "value": render_value(result.value),
            "units": result.units,
            "objective": _objective_body(result.objective),
            "routing": result.routing,
            "backend": result.backend,
            "flow_rates": {key: render_value(v) for key, v in sorted(result.flow_rates.items())},
            "link_flows": {
                key: {link_label(l): render_value(v) for l, v in sorted(loads.items(), key=lambda kv: kv[0].key())}
                for key, loads in sorted(result.link_flows.items())
            },
            "activation_shares": [
                {"links": list(links), "share": render_value(share)} for links, share in shares
            ],
            "lp": {"variables": result.lp_vars, "rows": result.lp_rows, "pivots": result.pivots},
        }
        if result.channel_rates is not None:
            doc["channel_rates"] = {
                key: {str(ch): render_value(v) for ch, v in sorted(rates.items())}
                for key, rates in sorted(result.channel_rates.items())
            }
        if result.per_channel_transport is not None:
            doc["per_channel_transport"] = {
                str(ch): render_value(v) for ch, v in sorted(result.per_channel_transport.items())
            }
        return doc
    if isinstance(result, ExpectationResult):
        return {
            "kind": "expectation",
            "mean": render_value(result.mean),
            "objective": _objective_body(result.objective),
            "routing": result.routing,
            "backend": result.backend,
            "configurations": [
                {"flows": dict(config.dests), "value": render_value(value)}
                for config, value in result.per_config
            ],
        }
    if isinstance(result, ProjectedSum):
        return {
            "kind": "projected_sum",
            "total": render_value(result.total),
            "objective": _objective_body(result.objective),
            "backend": result.backend,
            "per_channel": {str(ch): render_value(v) for ch, v in sorted(result.per_channel.items())},
        }
    if isinstance(result, SeparabilityReport):
        return {
            "kind": "separability",
            "capacity": render_value(result.capacity),
            "projected_sum": render_value(result.projected_sum),
            "gap": render_value(result.gap),
            "sign": result.sign,
            "objective": _objective_body(result.objective),
            "routing": result.routing,
            "per_channel": {str(ch): render_value(v) for ch, v in sorted(result.per_channel.items())},
        }
    if isinstance(result, RoutingComparison):
        doc = {
            "kind": "routing_comparison",
            "multi_channel": render_value(result.multi_value),
            "single_channel": render_value(result.single_value),
            "advantage": render_value(result.delta),
        }
        if result.multi_detail is not None:
            doc["multi_detail"] = to_document(result.multi_detail)
        if result.single_detail is not None:
            doc["single_detail"] = to_document(result.single_detail)
        return doc
    if isinstance(result, SearchResult):
        doc = {
            "kind": "placement_search",
            "value": render_value(result.value),
            "placement": {
                node: [render_value(x), render_value(y)]
                for node, (x, y) in sorted(result.placement.items())
            },
            "candidates": result.candidates,
            "evaluated": result.evaluated,
            "skipped_symmetry": result.skipped_symmetry,
            "skipped_bound": result.skipped_bound,
            "detail": to_document(result.detail),
        }
        if result.flows is not None:
            doc["flows"] = _flows_body(result.flows)
        return doc
    if isinstance(result, ReplayResult):
        return {
            "kind": "replay",
            "bounds_hold": result.bounds_hold,
            "longest": render_value(result.longest),
            "schedules": [
                {
                    "channel": s.target_channel,
                    "segment": [render_value(s.segment_start), render_value(s.segment_end)],
                    "ticks": len(s.items),
                    "duration": render_value(s.duration),
                    "items": [
                        {
                            "t": render_value(item.time),
                            "channel": item.channel,
                            "links": [[l.src, l.dst] for l in item.links],
                        }
                        for item in s.items
                    ],
                }
                for s in result.schedules
            ],
        }
    if isinstance(result, ReplicationCheck):
        return {"kind": "replication", "ok": result.ok, "problems": list(result.problems)}
    if isinstance(result, ScenarioReport):
        return {
            "kind": "scenario",
            "scenario": result.scenario,
            "passed": result.passed,
            "notes": list(result.notes),
            "checks": [
                {
                    "description": c.description,
                    "expected": c.expected,
                    "actual": c.actual,
                    "passed": c.passed,
                    "provenance": c.provenance,
                }
                for c in result.checks
            ],
        }
    raise TypeError(f"no document form for {type(result).__name__}")


def _rows_to_table(rows: list[tuple[str, str]]) -> str:
    width = max((len(label) for label, _ in rows), default=0)
    return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows) + "\n"


def to_table(result) -> str:
    """Aligned human-readable rendering."""
    if isinstance(result, CapacityResult):
        rows = [
            ("value", f"{text_value(result.value)} {result.units}"),
            ("objective", result.objective.kind + (" (scaled by n)" if result.objective.scale_by_n else "")),
            ("routing", result.routing),
            ("backend", result.backend),
        ]
        for key, rate in sorted(result.flow_rates.items()):
            rows.append((f"flow {key}", text_value(rate)))
        shares = sorted(
            ((tuple(sorted(link_label(l) for l in links)), share)
             for links, share in result.activation_shares.items()),
            key=lambda pair: pair[0],
        )
        for links, share in shares:
            rows.append((f"active {{{', '.join(links)}}}", text_value(share)))
        return _rows_to_table(rows)
    if isinstance(result, ExpectationResult):
        rows = [
            ("expected value", text_value(result.mean)),
            ("objective", result.objective.kind + (" (scaled by n)" if result.objective.scale_by_n else "")),
            ("routing", result.routing),
            ("backend", result.backend),
            ("configurations", str(len(result.per_config))),
        ]
        for config, value in result.per_config:
            label = ", ".join(f"{s}>{d}" for s, d in config.dests)
            rows.append((f"config {label}", text_value(value)))
        return _rows_to_table(rows)
    if isinstance(result, ProjectedSum):
        rows = [("projected sum", text_value(result.total))]
        for ch, value in sorted(result.per_channel.items()):
            rows.append((f"channel {ch}", text_value(value)))
        return _rows_to_table(rows)
    if isinstance(result, SeparabilityReport):
        sign = {1: "projections exceed the network", -1: "network exceeds the projections", 0: "separable"}
        rows = [
            ("capacity", text_value(result.capacity)),
            ("projected sum", text_value(result.projected_sum)),
            ("gap", text_value(result.gap)),
            ("verdict", sign[result.sign]),
        ]
        for ch, value in sorted(result.per_channel.items()):
            rows.append((f"channel {ch}", text_value(value)))
        return _rows_to_table(rows)
    if isinstance(result, RoutingComparison):
        return _rows_to_table([
            ("multi-channel routing", text_value(result.multi_value)),
            ("single-channel routing", text_value(result.single_value)),
            ("advantage", text_value(result.delta)),
        ])
    if isinstance(result, SearchResult):
        rows = [
            ("best value", text_value(result.value)),
            ("candidates", str(result.candidates)),
            ("evaluated", str(result.evaluated)),
            ("skipped by symmetry", str(result.skipped_symmetry)),
            ("skipped by bound", str(result.skipped_bound)),
        ]
        for node, (x, y) in sorted(result.placement.items()):
            rows.append((f"place {node}", f"({text_value(x)}, {text_value(y)})"))
        return _rows_to_table(rows)
    if isinstance(result, ReplayResult):
        rows = [
            ("bounds hold", "yes" if result.bounds_hold else "no"),
            ("longest replay", text_value(result.longest)),
        ]
        for s in result.schedules:
            rows.append((
                f"channel {s.target_channel}",
                f"{len(s.items)} ticks over [{text_value(s.segment_start)}, {text_value(s.segment_end)}]"
                f" replay in {text_value(s.duration)}",
            ))
        return _rows_to_table(rows)
    if isinstance(result, ReplicationCheck):
        rows = [("replication", "ok" if result.ok else "FAILED")]
        rows.extend(("problem", p) for p in result.problems)
        return _rows_to_table(rows)
    if isinstance(result, ScenarioReport):
        lines = [f"scenario {result.scenario}: {'PASS' if result.passed else 'FAIL'}"]
        for note in result.notes:
            lines.append(f"note: {note}")
        if result.checks:
            dwidth = max(len(c.description) for c in result.checks)
            ewidth = max(len(c.expected) for c in result.checks)
            pwidth = max(len(c.provenance) for c in result.checks)
            for c in result.checks:
                status = "pass" if c.passed else "FAIL"
                lines.append(
                    f"  [{status}] {c.provenance.ljust(pwidth)}  {c.description.ljust(dwidth)}"
                    f"  expected {c.expected.ljust(ewidth)}  actual {c.actual}"
                )
        return "\n".join(lines) + "\n"
    raise TypeError(f"no table form for {type(result).__name__}")


def emit(result, output: str = TABLE) -> str:
    if output == JSON:
        return dump(to_document(result))
    if output == TABLE:
        return to_table(result)
    raise ValueError(f"unknown output format {output!r}")
