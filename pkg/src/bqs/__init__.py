"""Streaming trajectory compression toolkit.

Bounded-quadrant compressors (buffered, fast, progressive), an amnesic
fixed-storage ageing framework, reference baselines, evaluation metrics,
and deterministic synthetic trajectory generators.
"""

from .amnesic import (AgedPoint, AmnesicStore, IndexEntry, SinkEvent,
                      abqs_insert, amnesic_sinking, compress_generation,
                      dump_store, export_store, load_dump, storyboard_stream,
                      update_index)
from .baselines import (BufferConfig, bdp_compress, bgd_compress,
                        dead_reckoning, dp_compress)
from .core import (CompressedTrajectory, CompressorState, Mode, Stats,
                   StepDecision, bqs_compress, bqs_step, compress_with_stats,
                   fbqs_compress, fbqs_step, pbqs_compress)
from .errors import (DegenerateAngle, EmptyInput, NeedsVelocity,
                     NoSuchGeneration, OutOfRange, StorageExhausted,
                     TimeOrder, ToleranceOrder, TrajectoryError, UnknownShape)
from .fastpath import fast_key_indices, warm_up
from .geometry import (GeoPoint, Point, SegmentLine,
                       point_to_segment_distance, polar_angle, project,
                       rotate_about, segment_distances)
from .metrics import (MetricReport, compression_rate, decayed_error,
                      evaluate, max_deviation_error, pruning_power,
                      reconstruct, smooth, time_sync_error)
from .quadrants import BoundPair, LinePosition, QuadrantBounds, widen_bounds
from .synth import (SHAPE_KINDS, WalkConfig, correlated_walk, shape,
                    von_mises_angle)

__all__ = [
    "AgedPoint",
    "AmnesicStore",
    "BoundPair",
    "BufferConfig",
    "CompressedTrajectory",
    "CompressorState",
    "DegenerateAngle",
    "EmptyInput",
    "GeoPoint",
    "IndexEntry",
    "LinePosition",
    "MetricReport",
    "Mode",
    "NeedsVelocity",
    "NoSuchGeneration",
    "OutOfRange",
    "Point",
    "QuadrantBounds",
    "SHAPE_KINDS",
    "SegmentLine",
    "SinkEvent",
    "Stats",
    "StepDecision",
    "StorageExhausted",
    "TimeOrder",
    "ToleranceOrder",
    "TrajectoryError",
    "UnknownShape",
    "WalkConfig",
    "abqs_insert",
    "amnesic_sinking",
    "bdp_compress",
    "bgd_compress",
    "bqs_compress",
    "bqs_step",
    "compress_generation",
    "compress_with_stats",
    "compression_rate",
    "correlated_walk",
    "dead_reckoning",
    "decayed_error",
    "dp_compress",
    "dump_store",
    "evaluate",
    "export_store",
    "fast_key_indices",
    "fbqs_compress",
    "fbqs_step",
    "load_dump",
    "max_deviation_error",
    "pbqs_compress",
    "point_to_segment_distance",
    "polar_angle",
    "project",
    "pruning_power",
    "reconstruct",
    "rotate_about",
    "segment_distances",
    "shape",
    "smooth",
    "storyboard_stream",
    "time_sync_error",
    "update_index",
    "von_mises_angle",
    "warm_up",
    "widen_bounds",
]

__version__ = "0.1.0"
