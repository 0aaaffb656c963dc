"""Heat-flow computation and submodel-level graph aggregation.

Conductor flows use the standard thermal-network equations: q = G * dT
for linear conductors and q = sigma * Gr * (Ta^4 - Tb^4) for radiative
ones. Flows are aggregated onto submodels (or groups of submodels) as a
directed multigraph with at most one net edge per unordered pair and
kind; the three view-tuning operations (selection, grouping, radiant
threshold) and the transient series extractors live here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DatasetValidationError, NameLookupError, StructuralError
from .model import ConductorKind, ConductorRecord
from .parser import SubmodelIndex, TemperatureSlice

STEFAN_BOLTZMANN = 5.670374419e-8  # W m^-2 K^-4

KELVIN_OFFSET = 273.15


class LoadClass(Enum):
    NEUTRAL = "neutral"
    EXCESS_OUTGOING = "excess_outgoing"
    EXCESS_INCOMING = "excess_incoming"


@dataclass(frozen=True)
class HeatFlow:
    conductor: ConductorRecord
    q_watts: float  # positive = flow from node_a to node_b


@dataclass(frozen=True)
class SubmodelNodeView:
    name: str
    avg_temp: float  # Kelvin, mean over member nodes
    net_load: float  # W, incoming minus outgoing over boundary conductors
    load_class: LoadClass
    member_submodels: tuple[str, ...]


@dataclass(frozen=True)
class SubmodelEdge:
    from_name: str
    to_name: str
    kind: ConductorKind
    q_watts: float  # > 0, direction normalized onto from -> to
    g_total: float | None  # W/K summed over member conductors; linear only
    conductor_count: int


@dataclass
class SubmodelGraph:
    nodes: list[SubmodelNodeView]
    edges: list[SubmodelEdge]
    timestep: int = 0

    def node_names(self) -> list[str]:
        return [n.name for n in self.nodes]


def classify_load(net_load: float) -> LoadClass:
    """1 W band: strict interior is neutral, +-1 belongs to the excess classes."""
    if abs(net_load) < 1.0:
        return LoadClass.NEUTRAL
    return LoadClass.EXCESS_OUTGOING if net_load < 0 else LoadClass.EXCESS_INCOMING


def compute_node_flows(
    conductors: list[ConductorRecord], temps_at_t: np.ndarray
) -> list[HeatFlow]:
    """Signed heat flow per conductor at one timestep."""
    temps = np.asarray(temps_at_t, dtype=np.float64)
    flows: list[HeatFlow] = []
    for c in conductors:
        if c.node_a >= len(temps) or c.node_b >= len(temps):
            raise NameLookupError(
                f"conductor references node outside temperature row "
                f"({c.node_a}, {c.node_b})"
            )
        ta = float(temps[c.node_a])
        tb = float(temps[c.node_b])
        if ta <= 0 or tb <= 0:
            raise DatasetValidationError("temperatures must be > 0 K")
        if c.kind is ConductorKind.LINEAR:
            q = c.conductance * (ta - tb)
        else:
            q = STEFAN_BOLTZMANN * c.conductance * (ta**4 - tb**4)
        flows.append(HeatFlow(c, q))
    return flows


def _aggregate(
    index: SubmodelIndex,
    flows: list[HeatFlow],
    temps_at_t: np.ndarray,
    partition: dict[str, tuple[str, ...]],
    timestep: int = 0,
) -> SubmodelGraph:
    """Aggregate node flows onto a partition of the submodels.

    `partition` maps partition name -> member submodel names (in block
    order of first member). Flows internal to a partition cell are
    excluded from both edges and net loads; boundary flows are summed
    signed per (unordered cell pair, kind), then direction-normalized.
    """
    submodel_of_node = index.node_owner()
    submodel_names = index.names
    part_names = list(partition.keys())
    part_of_submodel = {}
    for pname, members in partition.items():
        for m in members:
            part_of_submodel[m] = pname

    temps = np.asarray(temps_at_t, dtype=np.float64)
    n_nodes = index.num_nodes
    if len(temps) != n_nodes:
        raise StructuralError(
            f"temperature row has {len(temps)} values, index covers {n_nodes}"
        )

    net_load: dict[str, float] = {p: 0.0 for p in part_names}
    pair_q: dict[tuple[str, str, ConductorKind], float] = {}
    pair_g: dict[tuple[str, str, ConductorKind], float] = {}
    pair_count: dict[tuple[str, str, ConductorKind], int] = {}

    for flow in flows:
        c = flow.conductor
        if not (0 <= c.node_a < n_nodes and 0 <= c.node_b < n_nodes):
            raise StructuralError(
                f"flow references node outside indexed ranges "
                f"({c.node_a}, {c.node_b})"
            )
        pa = part_of_submodel[submodel_names[submodel_of_node[c.node_a]]]
        pb = part_of_submodel[submodel_names[submodel_of_node[c.node_b]]]
        if pa == pb:
            continue  # internal flow cancels within the cell
        net_load[pa] -= flow.q_watts
        net_load[pb] += flow.q_watts
        lo, hi = (pa, pb) if pa < pb else (pb, pa)
        sign = 1.0 if pa == lo else -1.0  # canonical orientation lo -> hi
        key = (lo, hi, c.kind)
        pair_q[key] = pair_q.get(key, 0.0) + sign * flow.q_watts
        pair_count[key] = pair_count.get(key, 0) + 1
        if c.kind is ConductorKind.LINEAR:
            pair_g[key] = pair_g.get(key, 0.0) + c.conductance

    nodes: list[SubmodelNodeView] = []
    for pname in part_names:
        member_ranges = [index.range_of(m) for m in partition[pname]]
        member_temps = np.concatenate(
            [temps[s:e] for s, e in member_ranges]
        ) if member_ranges else np.empty(0)
        avg = float(member_temps.mean()) if member_temps.size else 0.0
        load = net_load[pname]
        nodes.append(
            SubmodelNodeView(
                name=pname,
                avg_temp=avg,
                net_load=load,
                load_class=classify_load(load),
                member_submodels=tuple(partition[pname]),
            )
        )

    edges: list[SubmodelEdge] = []
    for (lo, hi, kind), q in sorted(
        pair_q.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value)
    ):
        if q == 0.0:
            continue  # opposing flows net to nothing: no edge drawn
        frm, to = (lo, hi) if q > 0 else (hi, lo)
        edges.append(
            SubmodelEdge(
                from_name=frm,
                to_name=to,
                kind=kind,
                q_watts=abs(q),
                g_total=pair_g.get((lo, hi, kind)) if kind is ConductorKind.LINEAR else None,
                conductor_count=pair_count[(lo, hi, kind)],
            )
        )
    return SubmodelGraph(nodes=nodes, edges=edges, timestep=timestep)


def aggregate_to_submodels(
    index: SubmodelIndex,
    flows: list[HeatFlow],
    temps_at_t: np.ndarray,
    timestep: int = 0,
) -> SubmodelGraph:
    """Submodel-level graph: every submodel is its own partition cell."""
    partition = {name: (name,) for name in index.names}
    return _aggregate(index, flows, temps_at_t, partition, timestep)


def apply_grouping(
    index: SubmodelIndex,
    flows: list[HeatFlow],
    temps_at_t: np.ndarray,
    groups: dict[str, list[str]],
    timestep: int = 0,
) -> SubmodelGraph:
    """Merge submodels into named groups; ungrouped submodels pass through.

    Group temperature is the node-weighted mean over all member nodes;
    flows and loads are summed. Flows fully inside a group vanish from
    both edges and the group's net load.
    """
    known = set(index.names)
    seen: set[str] = set()
    for gname, members in groups.items():
        if not members:
            raise DatasetValidationError(f"group {gname!r} has no members")
        for m in members:
            if m not in known:
                raise NameLookupError(f"unknown submodel {m!r} in group {gname!r}")
            if m in seen:
                raise DatasetValidationError(
                    f"submodel {m!r} appears in more than one group"
                )
            seen.add(m)

    partition: dict[str, tuple[str, ...]] = {}
    grouped_first: dict[str, str] = {}  # first member -> group name, for ordering
    for gname, members in groups.items():
        ordered = tuple(m for m in index.names if m in set(members))
        grouped_first[ordered[0]] = gname
        partition_key = gname
        partition[partition_key] = ordered
    # Rebuild in block order of each cell's first member.
    ordered_partition: dict[str, tuple[str, ...]] = {}
    for name in index.names:
        if name in seen:
            gname = grouped_first.get(name)
            if gname is not None:
                ordered_partition[gname] = partition[gname]
        else:
            ordered_partition[name] = (name,)
    return _aggregate(index, flows, temps_at_t, ordered_partition, timestep)


def apply_selection(graph: SubmodelGraph, include: set[str]) -> SubmodelGraph:
    """Restrict the view to `include`; annotations keep full-model values."""
    names = set(graph.node_names())
    unknown = include - names
    if unknown:
        raise NameLookupError(f"unknown submodel(s): {sorted(unknown)}")
    nodes = [n for n in graph.nodes if n.name in include]
    edges = [
        e for e in graph.edges if e.from_name in include and e.to_name in include
    ]
    return SubmodelGraph(nodes=nodes, edges=edges, timestep=graph.timestep)


def apply_radiant_threshold(graph: SubmodelGraph, tau: float) -> SubmodelGraph:
    """Drop radiative edges with q below tau; linear edges are exempt."""
    if tau < 0:
        raise DatasetValidationError("radiant threshold must be >= 0")
    edges = [
        e
        for e in graph.edges
        if e.kind is ConductorKind.LINEAR or e.q_watts >= tau
    ]
    return SubmodelGraph(nodes=list(graph.nodes), edges=edges, timestep=graph.timestep)


def submodel_temperature_series(
    index: SubmodelIndex, temps: TemperatureSlice, names: list[str]
) -> dict[str, np.ndarray]:
    """Mean member-node temperature per timestep for each named submodel."""
    out: dict[str, np.ndarray] = {}
    for name in names:
        start, end = index.range_of(name)
        block = temps.values[:, start:end]
        out[name] = block.mean(axis=1) if end > start else np.zeros(len(temps.timestamps))
    return out


@dataclass
class PairFlowSeries:
    from_name: str
    to_name: str
    timestamps: np.ndarray
    linear_watts: np.ndarray  # signed, positive = from -> to
    radiative_watts: np.ndarray


def pair_flow_series(
    index: SubmodelIndex,
    conductors: list[ConductorRecord],
    temps: TemperatureSlice,
    from_name: str,
    to_name: str,
) -> PairFlowSeries:
    """Signed aggregate flow from `from_name` to `to_name` per timestep, per kind."""
    a_range = index.range_of(from_name)
    b_range = index.range_of(to_name)

    def side(node: int) -> int:
        if a_range[0] <= node < a_range[1]:
            return 0
        if b_range[0] <= node < b_range[1]:
            return 1
        return -1

    num_t = len(temps.timestamps)
    linear = np.zeros(num_t)
    radiative = np.zeros(num_t)
    for c in conductors:
        sa, sb = side(c.node_a), side(c.node_b)
        if {sa, sb} != {0, 1}:
            continue
        sign = 1.0 if sa == 0 else -1.0
        ta = temps.values[:, c.node_a]
        tb = temps.values[:, c.node_b]
        if c.kind is ConductorKind.LINEAR:
            q = c.conductance * (ta - tb)
            linear += sign * q
        else:
            q = STEFAN_BOLTZMANN * c.conductance * (ta**4 - tb**4)
            radiative += sign * q
    return PairFlowSeries(from_name, to_name, temps.timestamps, linear, radiative)


def kelvin_to_display(values: np.ndarray | float, unit: str):
    """Convert Kelvin to the display unit ('K' or 'C')."""
    if unit == "K":
        return values
    if unit == "C":
        return values - KELVIN_OFFSET
    raise DatasetValidationError(f"unknown temperature unit {unit!r}")
