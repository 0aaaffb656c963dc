"""On-disk dataset format: types, writer, synthetic generator, validator.

A dataset directory holds four binary files (all integers little-endian,
all floats IEEE-754 binary64):

- ``SIZES``: five int64 -- num_submodels, num_nodes, num_linear,
  num_radiative, num_timesteps.
- ``NODTRE``: one block per submodel. Head: uint32 name length, UTF-8
  name, int64 node count, int64 reserved metadata (written as zero).
  Body: node_count int64 global node indices.
- ``TEMPS``: num_timesteps float64 timestamps, then one row of
  num_nodes float64 Kelvin values per timestep, timestep-major.
- ``CONDUCTORS``: 32-byte records -- uint8 kind (0 linear, 1 radiative),
  7 zero bytes, int64 node_a, int64 node_b, float64 conductance.
  Linear records precede radiative records.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DatasetValidationError, WriteError

SIZES_FILE = "SIZES"
NODTRE_FILE = "NODTRE"
TEMPS_FILE = "TEMPS"
CONDUCTORS_FILE = "CONDUCTORS"

CONDUCTOR_RECORD_SIZE = 32

_CONDUCTOR_DTYPE = np.dtype(
    {
        "names": ["kind", "node_a", "node_b", "conductance"],
        "formats": ["u1", "<i8", "<i8", "<f8"],
        "offsets": [0, 8, 16, 24],
        "itemsize": CONDUCTOR_RECORD_SIZE,
    }
)


class ConductorKind(Enum):
    LINEAR = 0
    RADIATIVE = 1


@dataclass(frozen=True)
class Sizes:
    num_submodels: int
    num_nodes: int
    num_linear: int
    num_radiative: int
    num_timesteps: int


@dataclass(frozen=True)
class SubmodelBlock:
    """One NODTRE block: submodel name plus its node count."""

    name: str
    node_count: int
    reserved_meta: int = 0


@dataclass(frozen=True)
class ConductorRecord:
    kind: ConductorKind
    node_a: int
    node_b: int
    conductance: float  # W/K for linear, m^2 (script-F * area) for radiative


@dataclass
class ThermalDataset:
    """In-memory model: submodel blocks, conductors, temperature history."""

    submodels: list[SubmodelBlock]
    conductors: list[ConductorRecord]
    timestamps: np.ndarray  # (T,) seconds, strictly increasing
    temperatures: np.ndarray  # (T, N) Kelvin, timestep-major

    @property
    def num_nodes(self) -> int:
        return sum(b.node_count for b in self.submodels)

    @property
    def num_timesteps(self) -> int:
        return len(self.timestamps)

    def sizes(self) -> Sizes:
        num_linear = sum(1 for c in self.conductors if c.kind is ConductorKind.LINEAR)
        return Sizes(
            num_submodels=len(self.submodels),
            num_nodes=self.num_nodes,
            num_linear=num_linear,
            num_radiative=len(self.conductors) - num_linear,
            num_timesteps=self.num_timesteps,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThermalDataset):
            return NotImplemented
        return (
            self.submodels == other.submodels
            and self.conductors == other.conductors
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.temperatures, other.temperatures)
        )

    def validate(self) -> None:
        """Raise DatasetValidationError on the first violated invariant."""
        if len(self.submodels) < 1 and self.num_nodes >= 1:
            raise DatasetValidationError("num_submodels must be >= 1 when nodes exist")
        names = [b.name for b in self.submodels]
        if len(set(names)) != len(names):
            raise DatasetValidationError("submodel names must be unique")
        for b in self.submodels:
            if not b.name:
                raise DatasetValidationError("submodel name must be nonempty")
            if b.node_count < 0:
                raise DatasetValidationError(f"negative node count in block {b.name!r}")
        n = self.num_nodes
        num_linear = sum(1 for c in self.conductors if c.kind is ConductorKind.LINEAR)
        for i, c in enumerate(self.conductors):
            if c.node_a == c.node_b:
                raise DatasetValidationError(f"conductor {i}: node_a == node_b")
            if not (0 <= c.node_a < n and 0 <= c.node_b < n):
                raise DatasetValidationError(f"conductor {i}: node index out of range")
            if not c.conductance > 0:
                raise DatasetValidationError(f"conductor {i}: conductance must be > 0")
            expected = ConductorKind.LINEAR if i < num_linear else ConductorKind.RADIATIVE
            if c.kind is not expected:
                raise DatasetValidationError("linear conductors must precede radiative")
        t = np.asarray(self.timestamps, dtype=np.float64)
        if t.ndim != 1:
            raise DatasetValidationError("timestamps must be one-dimensional")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise DatasetValidationError("timestamps must be strictly increasing")
        temps = np.asarray(self.temperatures, dtype=np.float64)
        if temps.shape != (len(t), n):
            raise DatasetValidationError(
                f"temperature matrix shape {temps.shape} != ({len(t)}, {n})"
            )
        if temps.size and not np.all(temps > 0):
            raise DatasetValidationError("temperatures must be > 0 K")


@dataclass(frozen=True)
class SyntheticSpec:
    """Deterministic recipe for a synthetic dataset."""

    num_submodels: int
    nodes_per_submodel: int | tuple[int, ...] = 4
    num_timesteps: int = 1
    linear_density: float = 1.0  # conductors per node
    radiative_density: float = 0.5
    temp_range: tuple[float, float] = (250.0, 350.0)
    seed: int = 0

    def node_counts(self) -> list[int]:
        if isinstance(self.nodes_per_submodel, int):
            return [self.nodes_per_submodel] * self.num_submodels
        counts = list(self.nodes_per_submodel)
        if len(counts) != self.num_submodels:
            raise DatasetValidationError(
                "nodes_per_submodel list length must equal num_submodels"
            )
        return counts


def generate_synthetic(spec: SyntheticSpec) -> ThermalDataset:
    """Build a deterministic dataset; same spec (incl. seed) -> identical output.

    Node indices are contiguous per submodel in block order. When either
    density is positive the submodel adjacency graph is connected via a
    chain of conductors through consecutive submodels.
    """
    if spec.num_submodels < 1:
        raise DatasetValidationError("num_submodels must be >= 1")
    if spec.linear_density < 0 or spec.radiative_density < 0:
        raise DatasetValidationError("densities must be >= 0")
    k_min, k_max = spec.temp_range
    if not k_min > 0 or k_max < k_min:
        raise DatasetValidationError("temp_range must satisfy 0 < K_min <= K_max")

    counts = spec.node_counts()
    num_nodes = sum(counts)
    blocks = [
        SubmodelBlock(name=f"S{i:03d}", node_count=c) for i, c in enumerate(counts)
    ]
    starts = np.concatenate(([0], np.cumsum(counts)))  # len S+1

    rng = np.random.default_rng(spec.seed)

    num_linear = int(round(spec.linear_density * num_nodes))
    num_radiative = int(round(spec.radiative_density * num_nodes))
    if num_nodes < 2:
        # Conductors need two distinct endpoints.
        num_linear = num_radiative = 0

    def draw_pair() -> tuple[int, int]:
        a = int(rng.integers(0, num_nodes))
        b = int(rng.integers(0, num_nodes - 1))
        if b >= a:
            b += 1
        return a, b

    # Chain consecutive nonempty submodels first so the submodel graph is
    # connected; remaining endpoints are uniform over distinct node pairs.
    chain_pairs: list[tuple[int, int]] = []
    nonempty = [i for i, c in enumerate(counts) if c > 0]
    if num_linear + num_radiative > 0 and num_nodes >= 2:
        for i, j in zip(nonempty, nonempty[1:]):
            a = int(starts[i] + rng.integers(0, counts[i]))
            b = int(starts[j] + rng.integers(0, counts[j]))
            chain_pairs.append((a, b))

    conductors: list[ConductorRecord] = []
    budget = iter(chain_pairs)
    for kind, total, lo, hi in (
        (ConductorKind.LINEAR, num_linear, 0.1, 10.0),
        (ConductorKind.RADIATIVE, num_radiative, 0.01, 1.0),
    ):
        for _ in range(total):
            pair = next(budget, None)
            if pair is None:
                pair = draw_pair()
            g = float(rng.uniform(lo, hi))
            conductors.append(ConductorRecord(kind, pair[0], pair[1], g))

    timestamps = 60.0 * np.arange(spec.num_timesteps, dtype=np.float64)
    temperatures = rng.uniform(k_min, k_max, size=(spec.num_timesteps, num_nodes))

    ds = ThermalDataset(blocks, conductors, timestamps, temperatures)
    ds.validate()
    return ds


def write_dataset(dataset: ThermalDataset, dir: str | Path) -> None:
    """Write the four dataset files; validates the dataset first."""
    dataset.validate()
    out = Path(dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise WriteError(f"cannot create dataset directory {out}: {e}") from e

    sizes = dataset.sizes()

    def _write(name: str, payload: bytes) -> None:
        try:
            (out / name).write_bytes(payload)
        except OSError as e:
            raise WriteError(f"write failed for {name}: {e}") from e

    _write(
        SIZES_FILE,
        struct.pack(
            "<5q",
            sizes.num_submodels,
            sizes.num_nodes,
            sizes.num_linear,
            sizes.num_radiative,
            sizes.num_timesteps,
        ),
    )

    parts: list[bytes] = []
    next_index = 0
    for b in dataset.submodels:
        name_bytes = b.name.encode("utf-8")
        parts.append(struct.pack("<I", len(name_bytes)))
        parts.append(name_bytes)
        parts.append(struct.pack("<qq", b.node_count, b.reserved_meta))
        body = np.arange(next_index, next_index + b.node_count, dtype="<i8")
        parts.append(body.tobytes())
        next_index += b.node_count
    _write(NODTRE_FILE, b"".join(parts))

    temps = np.ascontiguousarray(dataset.temperatures, dtype="<f8")
    ts = np.ascontiguousarray(dataset.timestamps, dtype="<f8")
    _write(TEMPS_FILE, ts.tobytes() + temps.tobytes())

    records = np.zeros(len(dataset.conductors), dtype=_CONDUCTOR_DTYPE)
    for i, c in enumerate(dataset.conductors):
        records[i] = (c.kind.value, c.node_a, c.node_b, c.conductance)
    _write(CONDUCTORS_FILE, records.tobytes())


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


def validate_dataset(dir: str | Path) -> ValidationReport:
    """Structural check of an on-disk dataset.

    Never raises on malformed input: every problem (including missing or
    truncated files) becomes a report entry. An empty report means the
    dataset is well-formed, in particular that every NODTRE body is the
    sequential-ascending run its head implies (the fast parser's
    precondition).
    """
    root = Path(dir)
    report = ValidationReport()

    sizes_path = root / SIZES_FILE
    if not sizes_path.is_file():
        report.add("missing_file", f"{SIZES_FILE} missing")
        return report
    raw = sizes_path.read_bytes()
    if len(raw) < 40:
        report.add("truncated_file", f"{SIZES_FILE} is {len(raw)} bytes, expected 40")
        return report
    num_submodels, num_nodes, num_linear, num_radiative, num_timesteps = struct.unpack(
        "<5q", raw[:40]
    )
    for label, value in (
        ("num_submodels", num_submodels),
        ("num_nodes", num_nodes),
        ("num_linear", num_linear),
        ("num_radiative", num_radiative),
        ("num_timesteps", num_timesteps),
    ):
        if value < 0:
            report.add("negative_count", f"SIZES {label} = {value}")
    if not report.ok:
        return report
    if num_nodes >= 1 and num_submodels < 1:
        report.add("count_mismatch", "nodes present but no submodels declared")

    # NODTRE: walk all blocks, reading bodies to check sequential order.
    nodtre_path = root / NODTRE_FILE
    if not nodtre_path.is_file():
        report.add("missing_file", f"{NODTRE_FILE} missing")
        return report
    data = nodtre_path.read_bytes()
    offset = 0
    next_index = 0
    names: set[str] = set()
    for k in range(num_submodels):
        if offset + 4 > len(data):
            report.add("truncated_file", f"NODTRE block {k}: head truncated")
            return report
        (name_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if offset + name_len + 16 > len(data):
            report.add("truncated_file", f"NODTRE block {k}: head truncated")
            return report
        try:
            name = data[offset : offset + name_len].decode("utf-8")
        except UnicodeDecodeError:
            report.add("bad_name", f"NODTRE block {k}: name is not valid UTF-8")
            name = f"<block {k}>"
        offset += name_len
        node_count, _meta = struct.unpack_from("<qq", data, offset)
        offset += 16
        if not name:
            report.add("bad_name", f"NODTRE block {k}: empty name")
        if name in names:
            report.add("duplicate_name", f"NODTRE block {k}: duplicate name {name!r}")
        names.add(name)
        if node_count < 0:
            report.add("negative_count", f"NODTRE block {k} ({name!r}): count {node_count}")
            return report
        if offset + 8 * node_count > len(data):
            report.add("truncated_file", f"NODTRE block {k} ({name!r}): body truncated")
            return report
        body = np.frombuffer(data, dtype="<i8", count=node_count, offset=offset)
        offset += 8 * node_count
        expected = np.arange(next_index, next_index + node_count, dtype=np.int64)
        if not np.array_equal(body, expected):
            first_bad = int(np.argmax(body != expected))
            report.add(
                "non_sequential_body",
                f"NODTRE block {k} ({name!r}): non-sequential body at position "
                f"{first_bad} (found {int(body[first_bad])}, "
                f"expected {int(expected[first_bad])})",
            )
        next_index += node_count
    if offset != len(data):
        report.add("trailing_bytes", f"NODTRE has {len(data) - offset} trailing bytes")
    if next_index != num_nodes:
        report.add(
            "count_mismatch",
            f"SIZES num_nodes = {num_nodes} but NODTRE bodies cover {next_index}",
        )

    temps_path = root / TEMPS_FILE
    if not temps_path.is_file():
        report.add("missing_file", f"{TEMPS_FILE} missing")
    else:
        expected_bytes = 8 * num_timesteps * (1 + num_nodes)
        actual = temps_path.stat().st_size
        if actual != expected_bytes:
            report.add(
                "truncated_file",
                f"TEMPS is {actual} bytes, expected {expected_bytes}",
            )
        else:
            ts = np.fromfile(temps_path, dtype="<f8", count=num_timesteps)
            if len(ts) > 1 and not np.all(np.diff(ts) > 0):
                report.add("bad_timestamps", "timestamps not strictly increasing")

    cond_path = root / CONDUCTORS_FILE
    if not cond_path.is_file():
        report.add("missing_file", f"{CONDUCTORS_FILE} missing")
    else:
        expected_bytes = CONDUCTOR_RECORD_SIZE * (num_linear + num_radiative)
        actual = cond_path.stat().st_size
        if actual != expected_bytes:
            report.add(
                "truncated_file",
                f"CONDUCTORS is {actual} bytes, expected {expected_bytes}",
            )
        else:
            records = np.fromfile(cond_path, dtype=_CONDUCTOR_DTYPE)
            for i, rec in enumerate(records):
                kind = int(rec["kind"])
                expected_kind = 0 if i < num_linear else 1
                if kind != expected_kind:
                    report.add(
                        "kind_order",
                        f"conductor {i}: kind {kind}, expected {expected_kind}",
                    )
                    break
            a = records["node_a"]
            b = records["node_b"]
            if np.any(a == b):
                i = int(np.argmax(a == b))
                report.add("self_conductor", f"conductor {i}: node_a == node_b")
            if records.size and (
                np.any(a < 0) or np.any(a >= num_nodes) or np.any(b < 0) or np.any(b >= num_nodes)
            ):
                report.add("index_out_of_range", "conductor endpoint outside node range")
            if np.any(records["conductance"] <= 0):
                i = int(np.argmax(records["conductance"] <= 0))
                report.add("bad_conductance", f"conductor {i}: conductance <= 0")

    return report
