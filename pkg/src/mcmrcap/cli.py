"""Command-line interface.

Exit codes: 0 on success, 1 on an internal computation failure, 2 on
invalid input (including budgets and enumeration caps), 3 when a scenario
check fails under --strict. Identical invocations on identical files emit
byte-identical output.
"""

from __future__ import annotations

import functools
import sys

import click

from .capacity import (
    EXPECTATION,
    MIN_THROUGHPUT,
    MULTI_CHANNEL,
    SINGLE_CHANNEL,
    TOTAL_THROUGHPUT,
    TRANSPORT,
    Objective,
    compare_routing,
    conditional_capacity,
    expected_capacity,
    separability_report,
)
from .errors import (
    BudgetExceededError,
    EnumerationCapError,
    ExactBackendError,
    InvalidInputError,
    McmrError,
)
from .formats import dump, load_path, parse_flows, parse_network, parse_placement, parse_sts_log
from .interference import enumerate_maximal_activation_sets
from .model import enumerate_flow_configs
from .placement import ALL_PAIRS, FIXED_FLOWS, optimize_over_placements, parse_strategy
from .replay import run_replay, verify_replication
from .reporting import emit, link_label, to_document, to_table
from .scenarios import SCENARIO_IDS, run_scenario

ROUTING_NAMES = {"mr": MULTI_CHANNEL, "sr": SINGLE_CHANNEL}
OBJECTIVE_NAMES = {"transport": TRANSPORT, "ms": MIN_THROUGHPUT, "as": TOTAL_THROUGHPUT}


def _guarded(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            command(*args, **kwargs)
        except (InvalidInputError, BudgetExceededError, EnumerationCapError, ExactBackendError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except McmrError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _objective(name: str, scale_n: bool) -> Objective:
    return Objective(OBJECTIVE_NAMES[name], scale_by_n=scale_n)


network_option = click.option("--network", "network_path", required=True, metavar="FILE",
                              help="Network description file.")
flows_option = click.option("--flows", "flows_path", metavar="FILE", help="Flow configuration file.")
placement_option = click.option("--placement", "placement_path", metavar="FILE",
                                help="Coordinate file for the nodes.")
search_option = click.option("--search", "search_spec", metavar="STRATEGY",
                             help="Candidate placement search: grid:K, corners, or diameter.")
routing_option = click.option("--routing", type=click.Choice(sorted(ROUTING_NAMES)), default="mr",
                              show_default=True, help="Bits may switch channels (mr) or not (sr).")
objective_option = click.option("--objective", type=click.Choice(("transport", "ms", "as")),
                                default="transport", show_default=True,
                                help="Transport, minimum throughput, or total throughput.")
scale_option = click.option("--scale-n", "scale_n", is_flag=True,
                            help="Scale the minimum-throughput objective by the node count.")
backend_option = click.option("--backend", type=click.Choice(("exact", "float")), default="exact",
                              show_default=True, help="Rational or floating-point arithmetic.")
output_option = click.option("--output", type=click.Choice(("table", "json")), default="table",
                             show_default=True, help="Report format.")
budget_option = click.option("--budget", type=int, default=None, metavar="N",
                             help="Cap on placement-search capacity evaluations.")


@click.group()
@click.version_option(package_name="mcmrcap")
def main():
    """Exact capacity analysis for multi-channel multi-radio networks."""


@main.command()
@network_option
@flows_option
@placement_option
@search_option
@routing_option
@objective_option
@scale_option
@backend_option
@output_option
@budget_option
@_guarded
def capacity(network_path, flows_path, placement_path, search_spec, routing,
             objective, scale_n, backend, output, budget):
    """Conditional capacity of one network, optionally searching placements."""
    net = parse_network(load_path(network_path))
    flows = parse_flows(load_path(flows_path)) if flows_path else None
    if placement_path and search_spec:
        raise InvalidInputError("bad_arguments", "--placement and --search are mutually exclusive")
    if search_spec:
        result = optimize_over_placements(
            net, parse_strategy(search_spec), ROUTING_NAMES[routing],
            _objective(objective, scale_n),
            flow_handling=FIXED_FLOWS if flows else ALL_PAIRS, flows=flows,
            backend=backend, budget=budget,
        )
    else:
        placement = parse_placement(load_path(placement_path)) if placement_path else None
        result = conditional_capacity(
            net, flows, ROUTING_NAMES[routing], _objective(objective, scale_n),
            placement=placement, backend=backend,
        )
    click.echo(emit(result, output), nl=False)


@main.command()
@network_option
@routing_option
@objective_option
@scale_option
@backend_option
@output_option
@_guarded
def expected(network_path, routing, objective, scale_n, backend, output):
    """Capacity averaged over every flow configuration."""
    net = parse_network(load_path(network_path))
    result = expected_capacity(net, ROUTING_NAMES[routing], _objective(objective, scale_n), backend=backend)
    click.echo(emit(result, output), nl=False)


@main.command()
@network_option
@routing_option
@objective_option
@scale_option
@backend_option
@output_option
@search_option
@budget_option
@_guarded
def separability(network_path, routing, objective, scale_n, backend, output, search_spec, budget):
    """Whole-network capacity against the sum of its per-channel projections."""
    net = parse_network(load_path(network_path))
    strategy = parse_strategy(search_spec) if search_spec else None
    result = separability_report(
        net, _objective(objective, scale_n), ROUTING_NAMES[routing],
        backend=backend, strategy=strategy, budget=budget,
    )
    click.echo(emit(result, output), nl=False)


@main.command("compare-routing")
@network_option
@flows_option
@placement_option
@objective_option
@scale_option
@backend_option
@output_option
@_guarded
def compare_routing_command(network_path, flows_path, placement_path, objective, scale_n, backend, output):
    """Multi-channel against single-channel routing, for one flow
    configuration or in expectation."""
    net = parse_network(load_path(network_path))
    conditioning = parse_flows(load_path(flows_path)) if flows_path else EXPECTATION
    placement = parse_placement(load_path(placement_path)) if placement_path else None
    result = compare_routing(net, _objective(objective, scale_n), conditioning,
                             placement=placement, backend=backend)
    click.echo(emit(result, output), nl=False)


@main.command()
@network_option
@click.option("--log", "log_path", required=True, metavar="FILE", help="Schedule log file.")
@output_option
@_guarded
def replay(network_path, log_path, output):
    """Replay a full schedule log per channel and verify the replication."""
    net = parse_network(load_path(network_path))
    log = parse_sts_log(load_path(log_path))
    result = run_replay(net, log)
    check = verify_replication(log, result.schedules)
    if output == "json":
        doc = to_document(result)
        doc["replication"] = to_document(check)
        click.echo(dump(doc), nl=False)
    else:
        click.echo(to_table(result) + to_table(check), nl=False)


@main.command(help="Run a built-in verification scenario.\n\nKnown scenarios: "
                   + ", ".join(SCENARIO_IDS) + ".")
@click.argument("scenario_id", metavar="SCENARIO")
@output_option
@click.option("--strict", is_flag=True, help="Exit with status 3 if any check fails.")
@budget_option
@_guarded
def scenario(scenario_id, output, strict, budget):
    report = run_scenario(scenario_id, budget=budget)
    click.echo(emit(report, output), nl=False)
    if strict and not report.passed:
        sys.exit(3)


@main.command("enumerate")
@network_option
@click.option("--kind", type=click.Choice(("activations", "flows")), default="activations",
              show_default=True, help="What to enumerate.")
@placement_option
@output_option
@_guarded
def enumerate_command(network_path, kind, placement_path, output):
    """List a network's maximal activation sets or flow configurations."""
    net = parse_network(load_path(network_path))
    if kind == "activations":
        placement = parse_placement(load_path(placement_path)) if placement_path else None
        sets = enumerate_maximal_activation_sets(net, placement=placement)
        labeled = sorted(tuple(sorted(link_label(l) for l in s)) for s in sets)
        if output == "json":
            click.echo(dump({"kind": "activation_sets", "count": len(labeled),
                             "sets": [list(s) for s in labeled]}), nl=False)
        else:
            lines = [f"{len(labeled)} maximal activation sets"]
            lines.extend("  {" + ", ".join(s) + "}" for s in labeled)
            click.echo("\n".join(lines))
    else:
        configs = enumerate_flow_configs(net)
        if output == "json":
            click.echo(dump({"kind": "flow_configs", "count": len(configs),
                             "configs": [dict(c.dests) for c in configs]}), nl=False)
        else:
            lines = [f"{len(configs)} flow configurations"]
            lines.extend("  " + ", ".join(f"{s}>{d}" for s, d in c.dests) for c in configs)
            click.echo("\n".join(lines))


if __name__ == "__main__":
    main()
