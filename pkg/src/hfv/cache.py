"""Append-only project cache for parsed results.

A project directory holds `manifest.json` (ledger of cached timesteps
plus a dataset fingerprint), `index.bin` (the serialized submodel
index), one `temps_<t>.bin` per cached timestep, and an advisory `lock`
taken while a write is in flight. Caching a new timestep never rewrites
existing files; manifest updates are atomic (write-temp-then-rename).
"""

from __future__ import annotations

import json
import os
import struct
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BoundsError,
    CacheRefusalError,
    CorruptCacheError,
    StaleCacheError,
    WriteError,
)
from .model import NODTRE_FILE, SIZES_FILE
from .parser import ByteCounter, SubmodelIndex, parse_node_tree_fast, read_sizes

MANIFEST_FILE = "manifest.json"
INDEX_FILE = "index.bin"
LOCK_FILE = "lock"
SCHEMA_VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes, h: int = _FNV_OFFSET) -> int:
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def dataset_fingerprint(dataset_dir: str | Path) -> int:
    """FNV-1a 64 over SIZES bytes plus all NODTRE head bytes."""
    root = Path(dataset_dir)
    h = fnv1a64((root / SIZES_FILE).read_bytes()[:40])
    data = (root / NODTRE_FILE).read_bytes()
    sizes = read_sizes(root)
    offset = 0
    for _ in range(sizes.num_submodels):
        (name_len,) = struct.unpack_from("<I", data, offset)
        head_len = 4 + name_len + 16
        h = fnv1a64(data[offset : offset + head_len], h)
        (node_count,) = struct.unpack_from("<q", data, offset + 4 + name_len)
        offset += head_len + 8 * node_count
    return h


@dataclass
class CacheManifest:
    dataset_fingerprint: int
    cached_timesteps: list[int]
    created: float
    updated: float
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "dataset_fingerprint": f"{self.dataset_fingerprint:016x}",
            "cached_timesteps": sorted(self.cached_timesteps),
            "created": self.created,
            "updated": self.updated,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CacheManifest":
        return cls(
            dataset_fingerprint=int(data["dataset_fingerprint"], 16),
            cached_timesteps=list(data["cached_timesteps"]),
            created=data["created"],
            updated=data["updated"],
            schema_version=data.get("schema_version", SCHEMA_VERSION),
        )


def _write_index(path: Path, index: SubmodelIndex) -> None:
    parts = [struct.pack("<q", len(index.entries))]
    for name, (start, end) in index.entries:
        name_bytes = name.encode("utf-8")
        parts.append(struct.pack("<I", len(name_bytes)))
        parts.append(name_bytes)
        parts.append(struct.pack("<qq", start, end))
    path.write_bytes(b"".join(parts))


def _read_index(path: Path) -> SubmodelIndex:
    data = path.read_bytes()
    (count,) = struct.unpack_from("<q", data, 0)
    offset = 8
    entries = []
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        name = data[offset : offset + name_len].decode("utf-8")
        offset += name_len
        start, end = struct.unpack_from("<qq", data, offset)
        offset += 16
        entries.append((name, (start, end)))
    return SubmodelIndex(tuple(entries))


@dataclass
class ProjectHandle:
    project_dir: Path
    dataset_dir: Path
    manifest: CacheManifest
    index: SubmodelIndex
    num_nodes: int
    num_timesteps: int


class _CacheMiss:
    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "MISS"


MISS = _CacheMiss()


def init_project(
    project_dir: str | Path,
    dataset_dir: str | Path,
    counter: ByteCounter | None = None,
) -> ProjectHandle:
    """Open or create a project bound to a dataset.

    Creates the manifest and submodel index on first use; on reopen the
    dataset fingerprint must still match or a StaleCacheError is raised
    (the caller decides whether to clear).
    """
    project = Path(project_dir)
    dataset = Path(dataset_dir)
    sizes = read_sizes(dataset, counter)
    fingerprint = dataset_fingerprint(dataset)
    manifest_path = project / MANIFEST_FILE
    if manifest_path.is_file():
        manifest = CacheManifest.from_dict(json.loads(manifest_path.read_text()))
        if manifest.dataset_fingerprint != fingerprint:
            raise StaleCacheError(
                f"project {project} was built against a different dataset "
                f"(fingerprint {manifest.dataset_fingerprint:016x} != "
                f"{fingerprint:016x})"
            )
        index = _read_index(project / INDEX_FILE)
    else:
        project.mkdir(parents=True, exist_ok=True)
        index = parse_node_tree_fast(dataset, counter)
        _write_index(project / INDEX_FILE, index)
        now = time.time()
        manifest = CacheManifest(
            dataset_fingerprint=fingerprint,
            cached_timesteps=[],
            created=now,
            updated=now,
        )
        _atomic_write_manifest(project, manifest)
    return ProjectHandle(
        project_dir=project,
        dataset_dir=dataset,
        manifest=manifest,
        index=index,
        num_nodes=sizes.num_nodes,
        num_timesteps=sizes.num_timesteps,
    )


def _atomic_write_manifest(project: Path, manifest: CacheManifest) -> None:
    tmp = project / (MANIFEST_FILE + ".tmp")
    tmp.write_text(json.dumps(manifest.to_dict(), indent=2))
    os.replace(tmp, project / MANIFEST_FILE)


class _WriterLock:
    def __init__(self, project: Path):
        self._path = project / LOCK_FILE

    def __enter__(self) -> "_WriterLock":
        deadline = time.monotonic() + 10.0
        while True:
            try:
                fd = os.open(self._path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.close(fd)
                return self
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise WriteError(f"writer lock busy: {self._path}")
                time.sleep(0.01)

    def __exit__(self, *exc) -> None:
        try:
            os.unlink(self._path)
        except FileNotFoundError:
            pass


def cache_timestep(handle: ProjectHandle, t: int, temps_row: np.ndarray) -> None:
    """Persist one timestep's temperature row; idempotent, append-only."""
    if not (0 <= t < handle.num_timesteps):
        raise BoundsError(f"timestep {t} outside [0, {handle.num_timesteps})")
    if t in handle.manifest.cached_timesteps:
        return
    row = np.ascontiguousarray(temps_row, dtype="<f8")
    if row.shape != (handle.num_nodes,):
        raise BoundsError(
            f"temperature row has shape {row.shape}, expected ({handle.num_nodes},)"
        )
    with _WriterLock(handle.project_dir):
        path = handle.project_dir / f"temps_{t}.bin"
        try:
            path.write_bytes(row.tobytes())
        except OSError as e:
            raise WriteError(f"write failed for {path.name}: {e}") from e
        manifest = handle.manifest
        manifest.cached_timesteps = sorted(set(manifest.cached_timesteps) | {t})
        manifest.updated = time.time()
        _atomic_write_manifest(handle.project_dir, manifest)


def load_cached(handle: ProjectHandle, t: int):
    """Return the cached temperature row for t, or MISS.

    A hit reads only from the project directory and is bitwise equal to
    the original parse; a wrong-length file raises CorruptCacheError
    (distinct from a miss).
    """
    manifest_path = handle.project_dir / MANIFEST_FILE
    if manifest_path.is_file():
        handle.manifest = CacheManifest.from_dict(json.loads(manifest_path.read_text()))
    else:
        return MISS
    if t not in handle.manifest.cached_timesteps:
        return MISS
    path = handle.project_dir / f"temps_{t}.bin"
    if not path.is_file():
        raise CorruptCacheError(f"manifest lists timestep {t} but {path.name} is missing")
    data = path.read_bytes()
    if len(data) != 8 * handle.num_nodes:
        raise CorruptCacheError(
            f"{path.name} is {len(data)} bytes, expected {8 * handle.num_nodes}"
        )
    return np.frombuffer(data, dtype="<f8").copy()


def clear_project(project_dir: str | Path) -> None:
    """Delete all cache files; refuses directories without a manifest."""
    project = Path(project_dir)
    if not (project / MANIFEST_FILE).is_file():
        raise CacheRefusalError(
            f"{project} has no {MANIFEST_FILE}; refusing to delete anything"
        )
    for entry in project.iterdir():
        if (
            entry.name in (MANIFEST_FILE, INDEX_FILE, LOCK_FILE)
            or (entry.name.startswith("temps_") and entry.name.endswith(".bin"))
        ):
            entry.unlink()
