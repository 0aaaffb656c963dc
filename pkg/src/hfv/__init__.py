"""Heat-flow post-processing toolkit.

Reads a block-structured binary thermal-results layout with a head-only
fast parser, aggregates conductor heat flows into submodel-level
directed graphs with selection/grouping/threshold tuning, lays them out
and renders them to SVG/JSON, caches parsed results in append-only
project files, and serves the whole pipeline over HTTP for the
companion browser UI.
"""

from .errors import (
    BoundsError,
    CacheRefusalError,
    CorruptCacheError,
    DatasetValidationError,
    HfvError,
    NameLookupError,
    StaleCacheError,
    StructuralError,
    TruncationError,
    WriteError,
)
from .model import (
    ConductorKind,
    ConductorRecord,
    Sizes,
    SubmodelBlock,
    SyntheticSpec,
    ThermalDataset,
    generate_synthetic,
    validate_dataset,
    write_dataset,
)
from .parser import (
    BenchReport,
    ByteCounter,
    SubmodelIndex,
    baseline_load_like_opentd,
    bench_compare,
    load_conductors,
    load_temperatures,
    parse_node_tree_fast,
    parse_node_tree_full,
    read_sizes,
)

__all__ = [
    "BenchReport",
    "BoundsError",
    "ByteCounter",
    "CacheRefusalError",
    "ConductorKind",
    "ConductorRecord",
    "CorruptCacheError",
    "DatasetValidationError",
    "HfvError",
    "NameLookupError",
    "Sizes",
    "StaleCacheError",
    "StructuralError",
    "SubmodelBlock",
    "SubmodelIndex",
    "SyntheticSpec",
    "ThermalDataset",
    "TruncationError",
    "WriteError",
    "baseline_load_like_opentd",
    "bench_compare",
    "generate_synthetic",
    "load_conductors",
    "load_temperatures",
    "parse_node_tree_fast",
    "parse_node_tree_full",
    "read_sizes",
    "validate_dataset",
    "write_dataset",
]

__version__ = "0.1.0"
