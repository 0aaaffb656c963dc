"""Dataset readers: head-skipping fast parser, full-parse oracle, the
deliberately redundant baseline, and the benchmark harness comparing them.

Every reader can be handed a ByteCounter so tests can assert exact byte
budgets (the fast NODTRE parse reads only block heads; the baseline
re-reads the whole NODTRE file once per requested submodel).
"""

from __future__ import annotations

import json
import struct
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BoundsError, NameLookupError, StructuralError, TruncationError
from .model import (
    CONDUCTOR_RECORD_SIZE,
    CONDUCTORS_FILE,
    NODTRE_FILE,
    SIZES_FILE,
    TEMPS_FILE,
    _CONDUCTOR_DTYPE,
    ConductorKind,
    ConductorRecord,
    Sizes,
)


class ByteCounter:
    """Tallies bytes actually read, per file name."""

    def __init__(self) -> None:
        self.by_file: Counter[str] = Counter()

    def add(self, name: str, n: int) -> None:
        self.by_file[name] += n

    def total(self) -> int:
        return sum(self.by_file.values())

    def __getitem__(self, name: str) -> int:
        return self.by_file.get(name, 0)


class _CountedFile:
    """Thin wrapper over a binary file that reports read sizes."""

    def __init__(self, path: Path, counter: ByteCounter | None):
        self._f = open(path, "rb")
        self._name = path.name
        self._counter = counter

    def read(self, n: int = -1) -> bytes:
        data = self._f.read(n)
        if self._counter is not None:
            self._counter.add(self._name, len(data))
        return data

    def seek(self, offset: int, whence: int = 0) -> int:
        return self._f.seek(offset, whence)

    def tell(self) -> int:
        return self._f.tell()

    def size(self) -> int:
        pos = self._f.tell()
        end = self._f.seek(0, 2)
        self._f.seek(pos)
        return end

    def __enter__(self) -> "_CountedFile":
        return self

    def __exit__(self, *exc) -> None:
        self._f.close()


@dataclass(frozen=True)
class SubmodelIndex:
    """Ordered submodel name -> half-open global node range, in block order."""

    entries: tuple[tuple[str, tuple[int, int]], ...]

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.entries]

    def range_of(self, name: str) -> tuple[int, int]:
        for n, r in self.entries:
            if n == name:
                return r
        raise NameLookupError(f"unknown submodel {name!r}")

    @property
    def num_nodes(self) -> int:
        return self.entries[-1][1][1] if self.entries else 0

    def node_owner(self) -> np.ndarray:
        """Array mapping global node index -> submodel ordinal."""
        owner = np.empty(self.num_nodes, dtype=np.int64)
        for i, (_, (start, end)) in enumerate(self.entries):
            owner[start:end] = i
        return owner


def read_sizes(dir: str | Path, counter: ByteCounter | None = None) -> Sizes:
    """Read the five SIZES counts; exactly 40 bytes."""
    path = Path(dir) / SIZES_FILE
    with _CountedFile(path, counter) as f:
        raw = f.read(40)
    if len(raw) < 40:
        raise TruncationError(f"SIZES is {len(raw)} bytes, expected 40")
    return Sizes(*struct.unpack("<5q", raw))


def parse_node_tree_fast(
    dir: str | Path,
    counter: ByteCounter | None = None,
    sizes: Sizes | None = None,
) -> SubmodelIndex:
    """Read only NODTRE block heads, seeking past every body.

    Node ranges are inferred from cumulative head counts; bodies are never
    read, so total NODTRE bytes read is sum(20 + name_len) over blocks.
    Assumes the dataset passes validate_dataset (sequential bodies); on a
    violating file the result simply matches the heads.
    """
    if sizes is None:
        sizes = read_sizes(dir, counter)
    path = Path(dir) / NODTRE_FILE
    entries: list[tuple[str, tuple[int, int]]] = []
    next_index = 0
    with _CountedFile(path, counter) as f:
        file_size = f.size()
        for k in range(sizes.num_submodels):
            raw = f.read(4)
            if len(raw) < 4:
                raise TruncationError(f"NODTRE block {k}: head truncated")
            (name_len,) = struct.unpack("<I", raw)
            head = f.read(name_len + 16)
            if len(head) < name_len + 16:
                raise TruncationError(f"NODTRE block {k}: head truncated")
            name = head[:name_len].decode("utf-8")
            node_count, _meta = struct.unpack_from("<qq", head, name_len)
            if node_count < 0:
                raise StructuralError(f"NODTRE block {k}: negative node count")
            body_end = f.tell() + 8 * node_count
            if body_end > file_size:
                raise StructuralError(f"NODTRE block {k}: body seeks past EOF")
            f.seek(body_end)
            entries.append((name, (next_index, next_index + node_count)))
            next_index += node_count
    return SubmodelIndex(tuple(entries))


def parse_node_tree_full(
    dir: str | Path, counter: ByteCounter | None = None
) -> SubmodelIndex:
    """Read every NODTRE body and verify it against its head.

    The correctness oracle for the fast parser: each body must be exactly
    the ascending index run its head implies, otherwise a StructuralError
    names the block and the first offending position.
    """
    sizes = read_sizes(dir, counter)
    path = Path(dir) / NODTRE_FILE
    entries: list[tuple[str, tuple[int, int]]] = []
    next_index = 0
    with _CountedFile(path, counter) as f:
        for k in range(sizes.num_submodels):
            raw = f.read(4)
            if len(raw) < 4:
                raise TruncationError(f"NODTRE block {k}: head truncated")
            (name_len,) = struct.unpack("<I", raw)
            head = f.read(name_len + 16)
            if len(head) < name_len + 16:
                raise TruncationError(f"NODTRE block {k}: head truncated")
            name = head[:name_len].decode("utf-8")
            node_count, _meta = struct.unpack_from("<qq", head, name_len)
            if node_count < 0:
                raise StructuralError(f"NODTRE block {k}: negative node count")
            body_raw = f.read(8 * node_count)
            if len(body_raw) < 8 * node_count:
                raise TruncationError(f"NODTRE block {k} ({name!r}): body truncated")
            body = np.frombuffer(body_raw, dtype="<i8")
            expected = np.arange(next_index, next_index + node_count, dtype=np.int64)
            if not np.array_equal(body, expected):
                pos = int(np.argmax(body != expected))
                raise StructuralError(
                    f"NODTRE block {k} ({name!r}): non-sequential body at "
                    f"position {pos} (found {int(body[pos])})"
                )
            entries.append((name, (next_index, next_index + node_count)))
            next_index += node_count
    return SubmodelIndex(tuple(entries))


@dataclass
class TemperatureSlice:
    timestamps: np.ndarray  # (T,) seconds
    values: np.ndarray  # (T, N) Kelvin


def load_temperatures(
    dir: str | Path,
    timesteps: range | None = None,
    nodes: range | None = None,
    counter: ByteCounter | None = None,
    sizes: Sizes | None = None,
) -> TemperatureSlice:
    """Read a contiguous sub-matrix of TEMPS.

    None means the full extent along that axis. Full-row requests do one
    sequential read per timestep row; no row outside the requested
    timestep range is touched.
    """
    if sizes is None:
        sizes = read_sizes(dir, counter)
    t_range = timesteps if timesteps is not None else range(sizes.num_timesteps)
    n_range = nodes if nodes is not None else range(sizes.num_nodes)
    for label, r, limit in (
        ("timestep", t_range, sizes.num_timesteps),
        ("node", n_range, sizes.num_nodes),
    ):
        if r.step != 1:
            raise BoundsError(f"{label} range must have step 1")
        if len(r) and (r.start < 0 or r.stop > limit):
            raise BoundsError(f"{label} range {r} outside [0, {limit})")

    n_nodes = sizes.num_nodes
    row_bytes = 8 * n_nodes
    header_bytes = 8 * sizes.num_timesteps
    path = Path(dir) / TEMPS_FILE
    values = np.empty((len(t_range), len(n_range)), dtype=np.float64)
    with _CountedFile(path, counter) as f:
        if len(t_range):
            f.seek(8 * t_range.start)
            ts_raw = f.read(8 * len(t_range))
            if len(ts_raw) < 8 * len(t_range):
                raise TruncationError("TEMPS: timestamp section truncated")
            timestamps = np.frombuffer(ts_raw, dtype="<f8").copy()
        else:
            timestamps = np.empty(0, dtype=np.float64)
        if len(n_range) == n_nodes and len(t_range):
            # Full rows over a contiguous timestep span: one read.
            f.seek(header_bytes + t_range.start * row_bytes)
            raw = f.read(len(t_range) * row_bytes)
            if len(raw) < len(t_range) * row_bytes:
                raise TruncationError("TEMPS: row section truncated")
            values[:] = np.frombuffer(raw, dtype="<f8").reshape(len(t_range), n_nodes)
        else:
            for out_row, t in enumerate(t_range):
                f.seek(header_bytes + t * row_bytes + 8 * n_range.start)
                raw = f.read(8 * len(n_range))
                if len(raw) < 8 * len(n_range):
                    raise TruncationError(f"TEMPS: row {t} truncated")
                values[out_row] = np.frombuffer(raw, dtype="<f8")
    return TemperatureSlice(timestamps, values)


def load_conductors(
    dir: str | Path, counter: ByteCounter | None = None
) -> list[ConductorRecord]:
    """Read all conductor records, in file order."""
    sizes = read_sizes(dir, counter)
    path = Path(dir) / CONDUCTORS_FILE
    with _CountedFile(path, counter) as f:
        raw = f.read()
    expected = CONDUCTOR_RECORD_SIZE * (sizes.num_linear + sizes.num_radiative)
    if len(raw) != expected:
        raise StructuralError(
            f"CONDUCTORS is {len(raw)} bytes, SIZES implies {expected}"
        )
    records = np.frombuffer(raw, dtype=_CONDUCTOR_DTYPE)
    out: list[ConductorRecord] = []
    for i, rec in enumerate(records):
        kind = int(rec["kind"])
        expected_kind = 0 if i < sizes.num_linear else 1
        if kind != expected_kind:
            raise StructuralError(
                f"conductor {i}: kind {kind} out of linear-then-radiative order"
            )
        a, b = int(rec["node_a"]), int(rec["node_b"])
        if a == b:
            raise StructuralError(f"conductor {i}: node_a == node_b == {a}")
        if not (0 <= a < sizes.num_nodes and 0 <= b < sizes.num_nodes):
            raise StructuralError(f"conductor {i}: endpoint outside node range")
        out.append(ConductorRecord(ConductorKind(kind), a, b, float(rec["conductance"])))
    return out


def baseline_load_like_opentd(
    dir: str | Path,
    submodels: list[str],
    counter: ByteCounter | None = None,
) -> dict[str, TemperatureSlice]:
    """Per-submodel temperature loading with the documented redundancy.

    For EACH requested submodel the entire NODTRE file is re-scanned
    (heads and bodies) and the entire TEMPS file, every full row, is
    re-read before that submodel's columns are extracted, so total work
    is Theta(S * file size) for S submodels. Values match the fast path
    bitwise.
    """
    sizes = read_sizes(dir, counter)
    nodtre_path = Path(dir) / NODTRE_FILE
    temps_path = Path(dir) / TEMPS_FILE
    header_bytes = 8 * sizes.num_timesteps
    row_bytes = 8 * sizes.num_nodes
    result: dict[str, TemperatureSlice] = {}
    with _CountedFile(nodtre_path, counter) as nf, _CountedFile(temps_path, counter) as tf:
        for wanted in submodels:
            # Full NODTRE re-scan, heads and bodies, for this one submodel.
            nf.seek(0)
            data = nf.read()
            offset = 0
            next_index = 0
            found: tuple[int, int] | None = None
            for k in range(sizes.num_submodels):
                (name_len,) = struct.unpack_from("<I", data, offset)
                offset += 4
                name = data[offset : offset + name_len].decode("utf-8")
                offset += name_len
                node_count, _meta = struct.unpack_from("<qq", data, offset)
                offset += 16 + 8 * node_count  # body bytes are in `data` already
                if name == wanted:
                    found = (next_index, next_index + node_count)
                next_index += node_count
            if found is None:
                raise NameLookupError(f"unknown submodel {wanted!r}")
            start, end = found
            tf.seek(0)
            raw = tf.read(header_bytes + sizes.num_timesteps * row_bytes)
            if len(raw) < header_bytes + sizes.num_timesteps * row_bytes:
                raise TruncationError("TEMPS shorter than SIZES promises")
            timestamps = np.frombuffer(raw, dtype="<f8", count=sizes.num_timesteps).copy()
            rows = np.frombuffer(raw, dtype="<f8", offset=header_bytes).reshape(
                sizes.num_timesteps, sizes.num_nodes
            )
            result[wanted] = TemperatureSlice(timestamps, rows[:, start:end].copy())
    return result


@dataclass
class BenchRecord:
    n: int  # nodes * timesteps
    fast_seconds: float
    baseline_seconds: float
    bytes_read_fast: int
    bytes_read_baseline: int


@dataclass
class BenchReport:
    runs: int
    records: list[BenchRecord] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "runs": self.runs,
                "records": [
                    {
                        "n": r.n,
                        "fast_seconds": r.fast_seconds,
                        "baseline_seconds": r.baseline_seconds,
                        "bytes_read_fast": r.bytes_read_fast,
                        "bytes_read_baseline": r.bytes_read_baseline,
                    }
                    for r in self.records
                ],
            },
            indent=2,
        )


def bench_compare(dir: str | Path, runs: int = 5) -> BenchReport:
    """Time fast-path vs baseline loading of all submodels' temperatures.

    Wall-clock (monotonic) spans averaged over `runs`; cold-cache behavior
    is not controlled. n = num_nodes * num_timesteps.
    """
    if runs < 1:
        raise BoundsError("runs must be >= 1")
    sizes = read_sizes(dir)
    n = sizes.num_nodes * sizes.num_timesteps
    names = parse_node_tree_fast(dir).names

    fast_counter = ByteCounter()
    baseline_counter = ByteCounter()
    fast_total = 0.0
    baseline_total = 0.0
    for run in range(runs):
        fc = fast_counter if run == 0 else None
        t0 = time.perf_counter()
        run_sizes = read_sizes(dir, fc)
        index = parse_node_tree_fast(dir, fc, run_sizes)
        load_temperatures(dir, counter=fc, sizes=run_sizes)
        fast_total += time.perf_counter() - t0
        del index
        bc = baseline_counter if run == 0 else None
        t0 = time.perf_counter()
        baseline_load_like_opentd(dir, names, bc)
        baseline_total += time.perf_counter() - t0

    record = BenchRecord(
        n=n,
        fast_seconds=fast_total / runs,
        baseline_seconds=baseline_total / runs,
        bytes_read_fast=fast_counter.total(),
        bytes_read_baseline=baseline_counter.total(),
    )
    report = BenchReport(runs=runs)
    report.records.append(record)
    return report
