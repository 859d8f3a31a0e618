"""faceroi: face-region channel extraction for IR recordings.

Finds the face on the average frame, tiles its interior with small square
regions labelled by facial area, and writes per-region mean-intensity
traces in the waveform-recovery toolkit's text formats.
"""

from .extract import InputError, extract_channels, load_frames, region_means
from .landmarks import LandmarkSet, NoFaceError, average_frame, detect_landmarks
from .mesh import FACIAL_AREAS, MeshError, build_mesh, write_mesh

__version__ = "0.1.0"

__all__ = [
    "FACIAL_AREAS",
    "InputError",
    "LandmarkSet",
    "MeshError",
    "NoFaceError",
    "average_frame",
    "build_mesh",
    "detect_landmarks",
    "extract_channels",
    "load_frames",
    "region_means",
    "write_mesh",
    "__version__",
]
