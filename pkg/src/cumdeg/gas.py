"""Steady-state gas transmission coordination scenario.

Nodes are refineries, compressor stations, consumers and control valves.
Pressures are consensus states: consumers are anchored to their requested
pressure with strength ``beta`` (biased consensus), everyone else mixes with
directed-consensus weights driven by cumulative-degree scores. No hydraulics
are modelled.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .consensus import (
    ConsensusTrace,
    Scheme,
    WeightMatrix,
    directed_consensus_weights,
    run_consensus,
)
from .cumulative import CumulativeParams, Mode, cd_vector_all
from .graph import Graph, connected_components

__all__ = [
    "Role",
    "PipeMode",
    "CompressorMode",
    "ValveMode",
    "GasNetwork",
    "Scenario",
    "CoordinationResult",
    "ScenarioError",
    "CoordinationError",
    "build_gas_network",
    "load_scenario",
    "default_scenario",
    "effective_graph",
    "run_coordination",
    "inject_fault",
    "parse_fault",
    "supply_demand_gap",
    "DEFAULT_BETA",
    "LEAK_PENALTY",
]

DEFAULT_BETA = 20.0
LEAK_PENALTY = 0.5
DECISION_PARAMS = CumulativeParams(3, Mode.WALK, lazy=True)


class ScenarioError(ValueError):
    """Malformed scenario config or fault specification."""


class CoordinationError(RuntimeError):
    """The coordination run cannot proceed or did not converge."""


class Role(str, enum.Enum):
    REFINERY = "refinery"
    COMPRESSOR = "compressor"
    CONSUMER = "consumer"
    VALVE = "valve"


class PipeMode(str, enum.Enum):
    OPERATING = "operating"
    BREAK = "break"
    LEAK = "leak"


class CompressorMode(str, enum.Enum):
    OPERATION = "operation"
    RECYCLING = "recycling"
    SHUTDOWN = "shutdown"


class ValveMode(str, enum.Enum):
    OPEN = "open"
    CLOSE = "close"
    FAIL = "fail"


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class GasNetwork:
    graph: Graph
    names: tuple[str, ...]
    roles: tuple[Role, ...]
    pipe_modes: Mapping[tuple[int, int], PipeMode]
    compressor_modes: Mapping[int, CompressorMode]
    valve_modes: Mapping[int, ValveMode]
    capacities: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def index(self, name: str | int) -> int:
        if isinstance(name, int) or (isinstance(name, str) and name.isdigit()):
            i = int(name)
            if 0 <= i < len(self.names):
                return i
        try:
            return self.names.index(str(name))
        except ValueError:
            raise ScenarioError(f"unknown node {name!r}") from None

    def nodes_with_role(self, role: Role) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r is role]

    @property
    def uncontrolled_valves(self) -> list[str]:
        return [self.names[v] for v, m in sorted(self.valve_modes.items()) if m is ValveMode.FAIL]


@dataclass(frozen=True)
class Scenario:
    network: GasNetwork
    desired: Mapping[str, float]
    beta: float = DEFAULT_BETA
    seed: int = 0


@dataclass
class CoordinationResult:
    achieved: dict[str, float]
    desired: dict[str, float]
    decision_power: dict[str, float]
    trace: ConsensusTrace
    gap: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["unit", "desired_psi", "achieved_psi", "decision_power"])
        for name in self.desired:
            out.writerow(
                [
                    name,
                    repr(float(self.desired[name])),
                    repr(float(self.achieved[name])),
                    repr(float(self.decision_power[name])),
                ]
            )
        out.writerow(["gap", "", repr(float(self.gap)), ""])
        return buf.getvalue()


def _parse_role(value: str) -> Role:
    try:
        return Role(str(value).lower())
    except ValueError:
        raise ScenarioError(f"unknown role {value!r}") from None


def build_gas_network(config: Mapping[str, Any]) -> GasNetwork:
    """Network from a parsed scenario config (``nodes``, ``edges``, ``modes``)."""
    nodes = config.get("nodes") or []
    if not nodes:
        raise ScenarioError("scenario has no nodes")
    names: list[str] = []
    roles: list[Role] = []
    for entry in nodes:
        name = str(entry["id"])
        if name in names:
            raise ScenarioError(f"duplicate node {name!r}")
        if "-" in name or "=" in name or ":" in name:
            raise ScenarioError(f"node id {name!r} may not contain '-', '=' or ':'")
        names.append(name)
        roles.append(_parse_role(entry.get("role", "")))
    index = {n: i for i, n in enumerate(names)}
    edges = []
    capacities = {}
    for entry in config.get("edges") or []:
        u, v = str(entry["u"]), str(entry["v"])
        if u not in index or v not in index:
            raise ScenarioError(f"edge {u}-{v} references an unknown node")
        if u == v:
            raise ScenarioError(f"edge {u}-{v} is a self-loop")
        e = _key(index[u], index[v])
        edges.append(e)
        cap = float(entry.get("capacity", 1.0))
        if cap <= 0:
            raise ScenarioError(f"edge {u}-{v} has non-positive capacity")
        capacities[e] = cap
    graph = Graph.from_edges(len(names), edges, labels=tuple(names))
    net = GasNetwork(
        graph,
        tuple(names),
        tuple(roles),
        {e: PipeMode.OPERATING for e in graph.edges()},
        {i: CompressorMode.OPERATION for i, r in enumerate(roles) if r is Role.COMPRESSOR},
        {i: ValveMode.OPEN for i, r in enumerate(roles) if r is Role.VALVE},
        capacities,
    )
    for element, mode in (config.get("modes") or {}).items():
        net = inject_fault(net, element, mode)
    return net


def load_scenario(source: str | Path | Mapping[str, Any] | None = None) -> Scenario:
    """Scenario from a JSON path, a parsed dict, or the bundled default."""
    if source is None:
        text = resources.files("cumdeg.data").joinpath("gas_default.json").read_text()
        config = json.loads(text)
    elif isinstance(source, Mapping):
        config = source
    else:
        try:
            config = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{source}: {exc}") from None
    if not isinstance(config, Mapping) or not config:
        raise ScenarioError("empty scenario config")
    net = build_gas_network(config)
    desired = {}
    for name, p in (config.get("desired_pressures") or {}).items():
        i = net.index(name)
        if net.roles[i] is not Role.CONSUMER:
            raise ScenarioError(f"desired pressure given for non-consumer {name!r}")
        desired[net.names[i]] = float(p)
    return Scenario(
        net,
        desired,
        float(config.get("beta", DEFAULT_BETA)),
        int(config.get("seed", 0)),
    )


def default_scenario() -> Scenario:
    return load_scenario(None)


_PIPE = re.compile(r"^pipe:([^-=:]+)-([^-=:]+)$")


def inject_fault(net: GasNetwork, element: str, mode: str) -> GasNetwork:
    """Copy of ``net`` with one element switched to ``mode``.

    ``element`` is ``pipe:u-v`` or ``compressor:x`` / ``valve:x`` (bare node
    ids are accepted for compressors and valves). Node references may be
    names or integer indices.
    """
    element = element.strip()
    mode = str(mode).strip().lower()
    m = _PIPE.match(element)
    if m:
        u, v = net.index(m.group(1)), net.index(m.group(2))
        e = _key(u, v)
        if e not in net.pipe_modes:
            raise ScenarioError(f"no pipe between {m.group(1)} and {m.group(2)}")
        try:
            new = PipeMode(mode)
        except ValueError:
            raise ScenarioError(f"invalid pipe mode {mode!r}") from None
        return replace(net, pipe_modes={**net.pipe_modes, e: new})
    kind, _, ref = element.rpartition(":")
    i = net.index(ref)
    role = net.roles[i]
    if kind and kind != role.value:
        raise ScenarioError(f"{ref} is a {role.value}, not a {kind}")
    if role is Role.COMPRESSOR:
        try:
            new_c = CompressorMode(mode)
        except ValueError:
            raise ScenarioError(f"invalid compressor mode {mode!r}") from None
        return replace(net, compressor_modes={**net.compressor_modes, i: new_c})
    if role is Role.VALVE:
        try:
            new_v = ValveMode(mode)
        except ValueError:
            raise ScenarioError(f"invalid valve mode {mode!r}") from None
        return replace(net, valve_modes={**net.valve_modes, i: new_v})
    raise ScenarioError(f"{role.value} {ref!r} has no operating modes")


def parse_fault(spec: str) -> tuple[str, str]:
    """Split ``element=mode`` (e.g. ``pipe:3-7=break``)."""
    element, sep, mode = spec.partition("=")
    if not sep or not element or not mode or ":" not in element:
        raise ScenarioError(f"malformed fault spec {spec!r}; expected kind:element=mode")
    return element, mode


def effective_graph(net: GasNetwork, leak_penalty: float = LEAK_PENALTY) -> Graph:
    """Topology after dropping broken pipes, closed valves and shut-down compressors.

    Leaking pipes stay, with their weight multiplied by ``leak_penalty``.
    The result is unweighted when every surviving pipe has weight 1.
    """
    if not 0 < leak_penalty < 1:
        raise ScenarioError("leak_penalty must lie in (0, 1)")
    dead = {i for i, m in net.valve_modes.items() if m is ValveMode.CLOSE}
    dead |= {i for i, m in net.compressor_modes.items() if m is CompressorMode.SHUTDOWN}
    removed = [
        e
        for e, m in net.pipe_modes.items()
        if m is PipeMode.BREAK or e[0] in dead or e[1] in dead
    ]
    g = net.graph.without_edges(removed)
    weights = {}
    for e in g.edges():
        w = net.capacities.get(e, 1.0)
        if net.pipe_modes[e] is PipeMode.LEAK:
            w *= leak_penalty
        weights[e] = w
    if all(w == 1.0 for w in weights.values()):
        return Graph.from_edges(g.n, g.edges(), labels=g.labels)
    return g.with_weights(weights)


def _biased_weights(w: WeightMatrix, anchored: list[int], beta: float) -> WeightMatrix:
    # one extra absorbing node per anchored consumer holds its demand
    k, a = w.n, len(anchored)
    big = np.zeros((k + a, k + a))
    big[:k, :k] = w.entries
    for slot, i in enumerate(anchored):
        big[i, :k] /= 1 + beta
        big[i, k + slot] = beta / (1 + beta)
    big[k:, k:] = np.eye(a)
    return WeightMatrix(big, Scheme.DIRECTED)


def run_coordination(
    scenario: Scenario | GasNetwork,
    desired: Mapping[str, float] | None = None,
    seed: int | None = None,
    tol: float = 1e-6,
    max_iter: int = 100_000,
    beta: float | None = None,
    leak_penalty: float = LEAK_PENALTY,
) -> CoordinationResult:
    """Coordinate consumer pressures by biased directed consensus.

    Consumers start at their demand, every other node at a seeded uniform
    draw within the demand range. Each round a consumer keeps
    ``beta / (1 + beta)`` of its demand and takes the rest from the
    directed-consensus mix of its neighbors. The run stops when no state
    moves by ``tol`` or more in one round.
    """
    if isinstance(scenario, Scenario):
        net = scenario.network
        desired = scenario.desired if desired is None else desired
        seed = scenario.seed if seed is None else seed
        beta = scenario.beta if beta is None else beta
    else:
        net = scenario
    beta = DEFAULT_BETA if beta is None else float(beta)
    seed = 0 if seed is None else seed
    if not desired:
        raise CoordinationError("no desired pressures given")
    if beta < 0:
        raise CoordinationError("beta must be non-negative")
    anchored_ids = [net.index(name) for name in desired]
    for i in anchored_ids:
        if net.roles[i] is not Role.CONSUMER:
            raise CoordinationError(f"{net.names[i]} is not a consumer")

    eff = effective_graph(net, leak_penalty)
    consumers = net.nodes_with_role(Role.CONSUMER)
    groups = [c for c in connected_components(eff) if any(i in c for i in consumers)]
    if len(groups) > 1:
        split = [[net.names[i] for i in c if i in consumers] for c in groups]
        raise CoordinationError(f"consumers split across disconnected parts: {split}")
    comp = groups[0]
    if not any(net.roles[i] is Role.REFINERY for i in comp):
        raise CoordinationError("no refinery reaches the consumers")
    sub, members = eff.subgraph(comp)
    local = {old: new for new, old in enumerate(members)}

    scores = cd_vector_all(sub, DECISION_PARAMS)
    w = directed_consensus_weights(sub, scores, use_edge_weights=True)
    anchored = [local[i] for i in anchored_ids]
    big = _biased_weights(w, anchored, beta)

    demand = np.array([float(desired[net.names[i]]) for i in anchored_ids])
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(demand.min(), demand.max(), size=sub.n)
    x0[anchored] = demand
    trace = run_consensus(
        big, np.concatenate([x0, demand]), tol, max_iter, criterion="step", thin=max_iter
    )
    if not trace.converged:
        raise CoordinationError(f"coordination did not settle within {max_iter} rounds")
    trace.states = [x[: sub.n] for x in trace.states]

    final = trace.final
    names = [net.names[i] for i in anchored_ids]
    achieved = {n: float(final[j]) for n, j in zip(names, anchored)}
    d = scores.scores[anchored]
    power = {n: float(v) for n, v in zip(names, d / d.sum())}
    result = CoordinationResult(
        achieved,
        {n: float(desired[n]) for n in names},
        power,
        trace,
        0.0,
        {
            "beta": beta,
            "seed": seed,
            "iterations": trace.iterations,
            "nodes": [net.names[i] for i in members],
            "uncontrolled_valves": net.uncontrolled_valves,
            "decision_power_normalization": "sum over anchored consumers = 1",
        },
    )
    result.gap = supply_demand_gap(result)
    return result


def supply_demand_gap(result: CoordinationResult) -> float:
    """Total absolute pressure shortfall/excess over consumers (psi)."""
    return float(sum(abs(result.achieved[n] - result.desired[n]) for n in result.desired))
