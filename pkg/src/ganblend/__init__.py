"""Band-wise interpolation toolkit for style-based generator checkpoints."""

from .blend import (
    ChannelTable,
    LinearLog,
    MappingPolicy,
    Smoothstep,
    Swap,
    Table,
    alpha_at,
    blend_checkpoints,
    describe_schedule,
    schedule_from_json,
    schedule_to_json,
    validate_schedule,
)
from .checkpoint import (
    Checkpoint,
    GeneratorConfig,
    ModelRegistry,
    load,
    load_bytes,
    save,
    save_bytes,
    validate_checkpoint,
)
from .errors import (
    BadMagicError,
    ConfigError,
    FormatError,
    GanblendError,
    GrammarError,
    ManifestError,
    NotFoundError,
    NumericsError,
    ProjectionError,
    ScheduleError,
    ShapeError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from .generator import (
    NoiseSpec,
    activations,
    forward,
    forward_w,
    init_random,
    manifest,
    mapping_forward,
    synth_transfer,
)
from .png_io import decode_png, decode_png_bytes, encode_png, encode_png_bytes
from .projector import (
    ProjectionConfig,
    ProjectionResult,
    project,
    toonify,
    toonify_with_result,
)
from .sampling import render_cell, render_grid, sample_z
from .topology import BandPartition, LayerKey, Role, Stage, classify, partition

__version__ = "0.1.0"

__all__ = [
    "BadMagicError",
    "BandPartition",
    "ChannelTable",
    "Checkpoint",
    "ConfigError",
    "FormatError",
    "GanblendError",
    "GeneratorConfig",
    "GrammarError",
    "LayerKey",
    "LinearLog",
    "ManifestError",
    "MappingPolicy",
    "ModelRegistry",
    "NoiseSpec",
    "NotFoundError",
    "NumericsError",
    "ProjectionConfig",
    "ProjectionError",
    "ProjectionResult",
    "Role",
    "ScheduleError",
    "ShapeError",
    "Smoothstep",
    "Stage",
    "Swap",
    "Table",
    "TruncatedFileError",
    "UnsupportedVersionError",
    "activations",
    "alpha_at",
    "blend_checkpoints",
    "classify",
    "decode_png",
    "decode_png_bytes",
    "describe_schedule",
    "encode_png",
    "encode_png_bytes",
    "forward",
    "forward_w",
    "init_random",
    "load",
    "load_bytes",
    "manifest",
    "mapping_forward",
    "partition",
    "project",
    "render_cell",
    "render_grid",
    "sample_z",
    "save",
    "save_bytes",
    "schedule_from_json",
    "schedule_to_json",
    "synth_transfer",
    "toonify",
    "toonify_with_result",
    "validate_checkpoint",
    "validate_schedule",
    "__version__",
]
