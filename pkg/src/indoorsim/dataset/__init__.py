from .trajfiles import (
    StampedPose,
    TrajectoryFormatError,
    export_trajectory,
    import_trajectory,
)
from .splits import SplitAssignment, assign_splits
from .sequence import (
    ManifestError,
    SequenceManifest,
    depth_to_mm,
    read_events_txt,
    read_imu_csv,
    read_manifest,
    read_u16_png,
    sha256_file,
    srgb_decode,
    srgb_encode,
    verify_sequence,
    write_events_txt,
    write_frame_assets,
    write_imu_csv,
    write_rgb_png,
    write_sequence,
    write_u16_png,
)

__all__ = [
    "ManifestError",
    "SequenceManifest",
    "SplitAssignment",
    "StampedPose",
    "TrajectoryFormatError",
    "assign_splits",
    "depth_to_mm",
    "export_trajectory",
    "import_trajectory",
    "read_events_txt",
    "read_imu_csv",
    "read_manifest",
    "read_u16_png",
    "sha256_file",
    "srgb_decode",
    "srgb_encode",
    "verify_sequence",
    "write_events_txt",
    "write_frame_assets",
    "write_imu_csv",
    "write_rgb_png",
    "write_sequence",
    "write_u16_png",
]
