import struct

import numpy as np
import pytest

from hfv.errors import DatasetValidationError
from hfv.model import (
    ConductorKind,
    ConductorRecord,
    SubmodelBlock,
    SyntheticSpec,
    ThermalDataset,
    generate_synthetic,
    validate_dataset,
    write_dataset,
)
from hfv.parser import load_conductors, load_temperatures, parse_node_tree_full, read_sizes


def parse_full_dataset(dataset_dir) -> ThermalDataset:
    """Independent full parse used as the round-trip oracle."""
    index = parse_node_tree_full(dataset_dir)
    temps = load_temperatures(dataset_dir)
    conductors = load_conductors(dataset_dir)
    blocks = [SubmodelBlock(name, end - start) for name, (start, end) in index.entries]
    return ThermalDataset(blocks, conductors, temps.timestamps, temps.values)


def test_single_submodel_sizes_layout(tmp_path):
    dataset = ThermalDataset(
        submodels=[SubmodelBlock("A", 1)],
        conductors=[],
        timestamps=np.array([0.0]),
        temperatures=np.array([[300.0]]),
    )
    write_dataset(dataset, tmp_path)
    raw = (tmp_path / "SIZES").read_bytes()
    assert raw[:8] == struct.pack("<q", 1)
    assert len(raw) == 40


def test_empty_dataset_round_trips(tmp_path):
    dataset = ThermalDataset(
        submodels=[SubmodelBlock("A", 0)],
        conductors=[],
        timestamps=np.empty(0),
        temperatures=np.empty((0, 0)),
    )
    write_dataset(dataset, tmp_path)
    assert (tmp_path / "TEMPS").read_bytes() == b""
    assert validate_dataset(tmp_path).ok
    assert read_sizes(tmp_path).num_nodes == 0


def test_round_trip_through_full_parser(small_dataset):
    dataset_dir, dataset = small_dataset
    assert parse_full_dataset(dataset_dir) == dataset


def test_invalid_dataset_rejected_before_write(tmp_path):
    bad = ThermalDataset(
        submodels=[SubmodelBlock("A", 2)],
        conductors=[ConductorRecord(ConductorKind.LINEAR, 0, 0, 1.0)],
        timestamps=np.array([0.0]),
        temperatures=np.array([[300.0, 300.0]]),
    )
    with pytest.raises(DatasetValidationError):
        write_dataset(bad, tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_generate_synthetic_deterministic():
    spec = SyntheticSpec(num_submodels=4, nodes_per_submodel=3, num_timesteps=3, seed=7)
    assert generate_synthetic(spec) == generate_synthetic(spec)


def test_generate_synthetic_contiguous_bodies(tmp_path):
    spec = SyntheticSpec(num_submodels=2, nodes_per_submodel=3, num_timesteps=1, seed=1)
    write_dataset(generate_synthetic(spec), tmp_path)
    index = parse_node_tree_full(tmp_path)
    assert index.entries == (("S000", (0, 3)), ("S001", (3, 6)))


def test_generate_synthetic_zero_densities():
    spec = SyntheticSpec(
        num_submodels=3,
        nodes_per_submodel=2,
        num_timesteps=1,
        linear_density=0.0,
        radiative_density=0.0,
        seed=3,
    )
    dataset = generate_synthetic(spec)
    assert dataset.conductors == []


def test_generate_synthetic_zero_submodels_rejected():
    with pytest.raises(DatasetValidationError):
        generate_synthetic(SyntheticSpec(num_submodels=0))


def test_generate_synthetic_connects_submodels():
    spec = SyntheticSpec(
        num_submodels=5, nodes_per_submodel=2, num_timesteps=1,
        linear_density=0.5, radiative_density=0.0, seed=11,
    )
    dataset = generate_synthetic(spec)
    # Union-find over submodel ids touched by conductors.
    parent = list(range(5))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for c in dataset.conductors:
        a, b = find(c.node_a // 2), find(c.node_b // 2)
        parent[a] = b
    assert len({find(i) for i in range(5)}) == 1


def test_validate_well_formed(small_dataset):
    dataset_dir, _ = small_dataset
    assert validate_dataset(dataset_dir).ok


def test_validate_non_sequential_body(tmp_path):
    (tmp_path / "SIZES").write_bytes(struct.pack("<5q", 1, 3, 0, 0, 0))
    name = b"X"
    body = struct.pack("<3q", 0, 2, 1)
    (tmp_path / "NODTRE").write_bytes(
        struct.pack("<I", len(name)) + name + struct.pack("<qq", 3, 0) + body
    )
    (tmp_path / "TEMPS").write_bytes(b"")
    (tmp_path / "CONDUCTORS").write_bytes(b"")
    report = validate_dataset(tmp_path)
    assert "non_sequential_body" in report.codes()
    [violation] = [v for v in report.violations if v.code == "non_sequential_body"]
    assert "'X'" in violation.message


def test_validate_count_mismatch(tmp_path, small_dataset):
    dataset_dir, _ = small_dataset
    raw = bytearray((dataset_dir / "SIZES").read_bytes())
    raw[8:16] = struct.pack("<q", 99)  # num_nodes
    (dataset_dir / "SIZES").write_bytes(bytes(raw))
    report = validate_dataset(dataset_dir)
    assert "count_mismatch" in report.codes()


def test_validate_missing_file_is_reported_not_raised(tmp_path):
    report = validate_dataset(tmp_path)
    assert not report.ok
    assert "missing_file" in report.codes()


def test_validate_truncated_nodtre(small_dataset):
    dataset_dir, _ = small_dataset
    raw = (dataset_dir / "NODTRE").read_bytes()
    (dataset_dir / "NODTRE").write_bytes(raw[:-4])
    report = validate_dataset(dataset_dir)
    assert "truncated_file" in report.codes()
