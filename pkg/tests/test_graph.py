import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hfv.errors import DatasetValidationError, NameLookupError
from hfv.graph import (
    STEFAN_BOLTZMANN,
    LoadClass,
    aggregate_to_submodels,
    apply_grouping,
    apply_radiant_threshold,
    apply_selection,
    classify_load,
    compute_node_flows,
    pair_flow_series,
    submodel_temperature_series,
)
from hfv.model import (
    ConductorKind,
    ConductorRecord,
    SubmodelBlock,
    SyntheticSpec,
    ThermalDataset,
    generate_synthetic,
)
from hfv.parser import SubmodelIndex, TemperatureSlice

LIN = ConductorKind.LINEAR
RAD = ConductorKind.RADIATIVE


def index_of(dataset: ThermalDataset) -> SubmodelIndex:
    entries = []
    start = 0
    for b in dataset.submodels:
        entries.append((b.name, (start, start + b.node_count)))
        start += b.node_count
    return SubmodelIndex(tuple(entries))


def single_node_index(names):
    return SubmodelIndex(tuple((n, (i, i + 1)) for i, n in enumerate(names)))


# --- compute_node_flows ---


def test_linear_flow_hand_value():
    flows = compute_node_flows(
        [ConductorRecord(LIN, 0, 1, 2.0)], np.array([300.0, 290.0])
    )
    assert flows[0].q_watts == pytest.approx(20.0)


def test_equal_temperatures_zero_flow():
    conductors = [ConductorRecord(LIN, 0, 1, 3.0), ConductorRecord(RAD, 0, 1, 1.0)]
    flows = compute_node_flows(conductors, np.array([300.0, 300.0]))
    assert all(f.q_watts == 0.0 for f in flows)


def test_radiative_flow_formula():
    flows = compute_node_flows(
        [ConductorRecord(RAD, 0, 1, 1.5)], np.array([300.0, 250.0])
    )
    expected = STEFAN_BOLTZMANN * 1.5 * (300.0**4 - 250.0**4)
    assert flows[0].q_watts == pytest.approx(expected, rel=1e-12)


def test_nonpositive_temperature_rejected():
    with pytest.raises(DatasetValidationError):
        compute_node_flows([ConductorRecord(RAD, 0, 1, 1.0)], np.array([300.0, 0.0]))


def test_missing_temperature_rejected():
    with pytest.raises(NameLookupError):
        compute_node_flows([ConductorRecord(LIN, 0, 5, 1.0)], np.array([300.0, 290.0]))


# --- aggregate_to_submodels ---


def test_aggregate_two_submodels_one_conductor():
    index = single_node_index(["A", "B"])
    temps = np.array([300.0, 290.0])
    flows = compute_node_flows([ConductorRecord(LIN, 0, 1, 2.0)], temps)
    graph = aggregate_to_submodels(index, flows, temps)
    [edge] = graph.edges
    assert (edge.from_name, edge.to_name) == ("A", "B")
    assert edge.q_watts == pytest.approx(20.0)
    assert edge.g_total == pytest.approx(2.0)
    loads = {n.name: n.net_load for n in graph.nodes}
    assert loads == {"A": pytest.approx(-20.0), "B": pytest.approx(20.0)}


def test_opposing_flows_cancel():
    # Two 2-node submodels with equal and opposite linear flows.
    index = SubmodelIndex((("A", (0, 2)), ("B", (2, 4))))
    temps = np.array([300.0, 290.0, 290.0, 300.0])
    conductors = [
        ConductorRecord(LIN, 0, 2, 1.0),  # +10 W A->B
        ConductorRecord(LIN, 3, 1, 1.0),  # +10 W B->A
    ]
    flows = compute_node_flows(conductors, temps)
    graph = aggregate_to_submodels(index, flows, temps)
    assert graph.edges == []
    assert all(n.net_load == pytest.approx(0.0) for n in graph.nodes)


def test_internal_conductors_excluded():
    index = SubmodelIndex((("A", (0, 2)), ("B", (2, 3))))
    temps = np.array([300.0, 280.0, 290.0])
    conductors = [ConductorRecord(LIN, 0, 1, 5.0)]  # inside A
    flows = compute_node_flows(conductors, temps)
    graph = aggregate_to_submodels(index, flows, temps)
    assert graph.edges == []
    assert {n.name: n.net_load for n in graph.nodes} == {"A": 0.0, "B": 0.0}


def test_chain_conservation():
    index = single_node_index(["A", "B", "C"])
    temps = np.array([310.0, 300.0, 280.0])
    conductors = [ConductorRecord(LIN, 0, 1, 1.0), ConductorRecord(LIN, 1, 2, 2.0)]
    flows = compute_node_flows(conductors, temps)
    graph = aggregate_to_submodels(index, flows, temps)
    assert sum(n.net_load for n in graph.nodes) == pytest.approx(0.0, abs=1e-12)


def test_avg_temp_is_member_mean():
    index = SubmodelIndex((("A", (0, 2)),))
    temps = np.array([290.0, 310.0])
    graph = aggregate_to_submodels(index, [], temps)
    assert graph.nodes[0].avg_temp == pytest.approx(300.0)


# --- classify_load ---


@pytest.mark.parametrize(
    "net,expected",
    [
        (0.5, LoadClass.NEUTRAL),
        (-1.0, LoadClass.EXCESS_OUTGOING),
        (1.0, LoadClass.EXCESS_INCOMING),
        (-0.999, LoadClass.NEUTRAL),
        (37.2, LoadClass.EXCESS_INCOMING),
        (0.0, LoadClass.NEUTRAL),
    ],
)
def test_classify_load(net, expected):
    assert classify_load(net) is expected


# --- apply_selection ---


def chain_graph():
    index = single_node_index(["A", "B", "C"])
    temps = np.array([310.0, 300.0, 280.0])
    conductors = [ConductorRecord(LIN, 0, 1, 1.0), ConductorRecord(LIN, 1, 2, 2.0)]
    flows = compute_node_flows(conductors, temps)
    return aggregate_to_submodels(index, flows, temps)


def test_selection_identity():
    graph = chain_graph()
    selected = apply_selection(graph, {"A", "B", "C"})
    assert selected.nodes == graph.nodes
    assert selected.edges == graph.edges


def test_selection_single_node():
    selected = apply_selection(chain_graph(), {"A"})
    assert selected.node_names() == ["A"]
    assert selected.edges == []


def test_selection_drops_edges_without_both_endpoints():
    selected = apply_selection(chain_graph(), {"A", "C"})
    assert selected.node_names() == ["A", "C"]
    assert selected.edges == []


def test_selection_keeps_full_model_annotations():
    graph = chain_graph()
    full_loads = {n.name: n.net_load for n in graph.nodes}
    selected = apply_selection(graph, {"B"})
    assert selected.nodes[0].net_load == full_loads["B"]


def test_selection_unknown_name():
    with pytest.raises(NameLookupError):
        apply_selection(chain_graph(), {"A", "ZZZ"})


# --- apply_grouping ---


def test_grouping_singletons_is_identity():
    index = single_node_index(["A", "B", "C"])
    temps = np.array([310.0, 300.0, 280.0])
    conductors = [ConductorRecord(LIN, 0, 1, 1.0), ConductorRecord(LIN, 1, 2, 2.0)]
    flows = compute_node_flows(conductors, temps)
    plain = aggregate_to_submodels(index, flows, temps)
    grouped = apply_grouping(
        index, flows, temps, {"A": ["A"], "B": ["B"], "C": ["C"]}
    )
    assert grouped.nodes == plain.nodes
    assert grouped.edges == plain.edges


def test_grouping_internalizes_member_flows():
    index = single_node_index(["A", "B"])
    temps = np.array([300.0, 290.0])
    flows = compute_node_flows([ConductorRecord(LIN, 0, 1, 2.0)], temps)
    grouped = apply_grouping(index, flows, temps, {"G": ["A", "B"]})
    assert grouped.node_names() == ["G"]
    assert grouped.edges == []
    assert grouped.nodes[0].net_load == pytest.approx(0.0)
    assert grouped.nodes[0].member_submodels == ("A", "B")


def test_grouping_sums_boundary_flows():
    # A->C 3 W and B->C 4 W; group {A,B} -> edge G->C of 7 W.
    index = single_node_index(["A", "B", "C"])
    temps = np.array([303.0, 304.0, 300.0])
    conductors = [ConductorRecord(LIN, 0, 2, 1.0), ConductorRecord(LIN, 1, 2, 1.0)]
    flows = compute_node_flows(conductors, temps)
    grouped = apply_grouping(index, flows, temps, {"G": ["A", "B"]})
    [edge] = grouped.edges
    assert (edge.from_name, edge.to_name) == ("G", "C")
    assert edge.q_watts == pytest.approx(7.0)


def test_grouping_node_weighted_mean_temperature():
    index = SubmodelIndex((("A", (0, 2)), ("B", (2, 3))))
    temps = np.array([300.0, 310.0, 280.0])
    grouped = apply_grouping(index, [], temps, {"G": ["A", "B"]})
    # Mean over all three member nodes, not mean of submodel means.
    assert grouped.nodes[0].avg_temp == pytest.approx((300 + 310 + 280) / 3)


def test_grouping_overlap_rejected():
    index = single_node_index(["A", "B"])
    temps = np.array([300.0, 290.0])
    with pytest.raises(DatasetValidationError):
        apply_grouping(index, [], temps, {"G": ["A"], "H": ["A", "B"]})


def test_grouping_unknown_member_rejected():
    index = single_node_index(["A"])
    with pytest.raises(NameLookupError):
        apply_grouping(index, [], np.array([300.0]), {"G": ["NOPE"]})


# --- apply_radiant_threshold ---


def radiative_graph():
    index = single_node_index(["A", "B", "C", "D"])
    temps = np.array([300.0, 299.9, 301.0, 310.0])
    conductors = [
        ConductorRecord(RAD, 0, 1, 0.033),  # ~0.2 W
        ConductorRecord(RAD, 0, 2, 0.245),  # ~1.5 W
        ConductorRecord(RAD, 0, 3, 0.126),  # ~8 W
        ConductorRecord(LIN, 1, 2, 0.01),  # ~0.011 W linear
    ]
    flows = compute_node_flows(conductors, temps)
    return aggregate_to_submodels(index, flows, temps)


def test_threshold_zero_is_identity():
    graph = radiative_graph()
    assert apply_radiant_threshold(graph, 0.0).edges == graph.edges


def test_threshold_filters_radiative_edges():
    graph = radiative_graph()
    filtered = apply_radiant_threshold(graph, 1.0)
    radiative_q = sorted(
        e.q_watts for e in filtered.edges if e.kind is RAD
    )
    assert len(radiative_q) == 2
    assert all(q >= 1.0 for q in radiative_q)


def test_threshold_exempts_linear_edges():
    graph = radiative_graph()
    filtered = apply_radiant_threshold(graph, 100.0)
    kinds = {e.kind for e in filtered.edges}
    assert kinds == {LIN}


def test_threshold_keeps_node_annotations():
    graph = radiative_graph()
    filtered = apply_radiant_threshold(graph, 100.0)
    assert filtered.nodes == graph.nodes


def test_negative_threshold_rejected():
    with pytest.raises(DatasetValidationError):
        apply_radiant_threshold(radiative_graph(), -1.0)


# --- transient series ---


def test_temperature_series_constant_dataset():
    index = SubmodelIndex((("A", (0, 2)),))
    temps = TemperatureSlice(
        np.array([0.0, 60.0, 120.0]), np.full((3, 2), 300.0)
    )
    series = submodel_temperature_series(index, temps, ["A"])
    assert np.allclose(series["A"], 300.0)
    assert len(series["A"]) == 3


def test_temperature_series_single_node_equals_row():
    index = SubmodelIndex((("A", (0, 1)),))
    values = np.array([[300.0], [305.0]])
    temps = TemperatureSlice(np.array([0.0, 60.0]), values)
    series = submodel_temperature_series(index, temps, ["A"])
    assert np.array_equal(series["A"], values[:, 0])


def test_temperature_series_two_node_average():
    index = SubmodelIndex((("A", (0, 2)),))
    temps = TemperatureSlice(np.array([0.0]), np.array([[290.0, 310.0]]))
    series = submodel_temperature_series(index, temps, ["A"])
    assert series["A"][0] == pytest.approx(300.0)


def test_pair_flow_series_no_conductors():
    index = single_node_index(["A", "B"])
    temps = TemperatureSlice(np.array([0.0, 60.0]), np.full((2, 2), 300.0))
    series = pair_flow_series(index, [], temps, "A", "B")
    assert np.all(series.linear_watts == 0.0)
    assert np.all(series.radiative_watts == 0.0)


def test_pair_flow_series_constant_linear():
    index = single_node_index(["A", "B"])
    temps = TemperatureSlice(
        np.array([0.0, 60.0, 120.0]),
        np.array([[300.0, 290.0], [305.0, 295.0], [280.0, 270.0]]),
    )
    series = pair_flow_series(
        index, [ConductorRecord(LIN, 0, 1, 1.0)], temps, "A", "B"
    )
    assert np.allclose(series.linear_watts, 10.0)


def test_pair_flow_series_antisymmetric():
    index = single_node_index(["A", "B"])
    temps = TemperatureSlice(
        np.array([0.0, 60.0]), np.array([[300.0, 290.0], [280.0, 295.0]])
    )
    conductors = [
        ConductorRecord(LIN, 0, 1, 1.5),
        ConductorRecord(RAD, 1, 0, 0.3),
    ]
    ab = pair_flow_series(index, conductors, temps, "A", "B")
    ba = pair_flow_series(index, conductors, temps, "B", "A")
    assert np.array_equal(ab.linear_watts, -ba.linear_watts)
    assert np.array_equal(ab.radiative_watts, -ba.radiative_watts)


def test_pair_flow_series_unknown_name():
    index = single_node_index(["A", "B"])
    temps = TemperatureSlice(np.array([0.0]), np.array([[300.0, 290.0]]))
    with pytest.raises(NameLookupError):
        pair_flow_series(index, [], temps, "A", "Z")


# --- property tests over random synthetic models ---


def random_model_graph(num_submodels, nodes_per, seed):
    spec = SyntheticSpec(
        num_submodels=num_submodels,
        nodes_per_submodel=nodes_per,
        num_timesteps=1,
        linear_density=1.0,
        radiative_density=0.5,
        seed=seed,
    )
    dataset = generate_synthetic(spec)
    index = index_of(dataset)
    temps = dataset.temperatures[0]
    flows = compute_node_flows(dataset.conductors, temps)
    return index, flows, temps, aggregate_to_submodels(index, flows, temps)


@settings(max_examples=100, deadline=None)
@given(
    num_submodels=st.integers(2, 10),
    nodes_per=st.integers(1, 6),
    seed=st.integers(0, 2**32),
)
def test_conservation_property(num_submodels, nodes_per, seed):
    _, flows, _, graph = random_model_graph(num_submodels, nodes_per, seed)
    total_abs = sum(abs(f.q_watts) for f in flows)
    assert abs(sum(n.net_load for n in graph.nodes)) <= 1e-9 * max(total_abs, 1.0)


@settings(max_examples=100, deadline=None)
@given(
    num_submodels=st.integers(2, 10),
    nodes_per=st.integers(1, 6),
    seed=st.integers(0, 2**32),
    tau1=st.floats(0, 5),
    tau2=st.floats(0, 5),
)
def test_threshold_monotonicity_property(num_submodels, nodes_per, seed, tau1, tau2):
    lo, hi = sorted([tau1, tau2])
    _, _, _, graph = random_model_graph(num_submodels, nodes_per, seed)
    edges_lo = set(map(repr, apply_radiant_threshold(graph, lo).edges))
    edges_hi = set(map(repr, apply_radiant_threshold(graph, hi).edges))
    assert edges_hi <= edges_lo


@settings(max_examples=100, deadline=None)
@given(
    num_submodels=st.integers(2, 8),
    nodes_per=st.integers(1, 5),
    seed=st.integers(0, 2**32),
    tau=st.floats(0, 5),
    data=st.data(),
)
def test_selection_threshold_commute_property(
    num_submodels, nodes_per, seed, tau, data
):
    _, _, _, graph = random_model_graph(num_submodels, nodes_per, seed)
    names = graph.node_names()
    include = set(
        data.draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
    )
    a = apply_radiant_threshold(apply_selection(graph, include), tau)
    b = apply_selection(apply_radiant_threshold(graph, tau), include)
    assert a.nodes == b.nodes
    assert a.edges == b.edges


@settings(max_examples=100, deadline=None)
@given(
    num_submodels=st.integers(2, 8),
    nodes_per=st.integers(1, 5),
    seed=st.integers(0, 2**32),
)
def test_grouping_identity_property(num_submodels, nodes_per, seed):
    index, flows, temps, graph = random_model_graph(num_submodels, nodes_per, seed)
    grouped = apply_grouping(
        index, flows, temps, {name: [name] for name in index.names}
    )
    assert grouped.nodes == graph.nodes
    assert grouped.edges == graph.edges


@settings(max_examples=100, deadline=None)
@given(
    num_submodels=st.integers(3, 8),
    nodes_per=st.integers(1, 4),
    seed=st.integers(0, 2**32),
    split=st.integers(1, 7),
)
def test_grouping_conserves_total_load_property(num_submodels, nodes_per, seed, split):
    index, flows, temps, _ = random_model_graph(num_submodels, nodes_per, seed)
    names = index.names
    cut = min(split, len(names) - 1)
    grouped = apply_grouping(index, flows, temps, {"G": names[:cut]})
    total_abs = sum(abs(f.q_watts) for f in flows)
    assert abs(sum(n.net_load for n in grouped.nodes)) <= 1e-9 * max(total_abs, 1.0)
