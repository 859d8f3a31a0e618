"""Core domain types: acquisition metadata, channel matrices, meshes, iHR series."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# Upper edge of the widest bandpass we ever apply (300 bpm = 5 Hz); the
# sampling rate must leave this below Nyquist.
MAX_PASSBAND_HZ = 5.0


@dataclass(frozen=True)
class AcquisitionMeta:
    """Sampling metadata for a recording: rate, duration and frame count."""

    sample_rate_hz: float
    duration_s: float
    frame_count: int
    source_label: str = ""

    def __post_init__(self):
        if not (self.sample_rate_hz > 0 and np.isfinite(self.sample_rate_hz)):
            raise ValidationError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if self.sample_rate_hz <= 2 * MAX_PASSBAND_HZ:
            raise ValidationError(
                f"sample_rate_hz {self.sample_rate_hz} too low: Nyquist must admit "
                f"{MAX_PASSBAND_HZ} Hz"
            )
        if not (self.duration_s > 0 and np.isfinite(self.duration_s)):
            raise ValidationError(f"duration_s must be positive, got {self.duration_s}")
        expected = int(np.floor(self.duration_s * self.sample_rate_hz))
        if abs(self.frame_count - expected) > 1:
            raise ValidationError(
                f"frame_count {self.frame_count} inconsistent with "
                f"duration {self.duration_s} s at {self.sample_rate_hz} Hz "
                f"(expected ~{expected})"
            )

    @classmethod
    def from_rate_and_count(cls, sample_rate_hz, frame_count, source_label=""):
        return cls(
            sample_rate_hz=sample_rate_hz,
            duration_s=frame_count / sample_rate_hz,
            frame_count=frame_count,
            source_label=source_label,
        )


@dataclass(frozen=True)
class RegionMesh:
    """Disjoint pixel regions tiling the inside of a face, with area group labels.

    ``regions`` maps region_id -> (k, 2) integer array of (row, col) pixel
    coordinates.  ``group_labels`` maps region_id -> one of the five major
    facial-area labels.
    """

    regions: dict
    group_labels: dict
    frame_dims: tuple

    def __post_init__(self):
        h, w = self.frame_dims
        seen = set()
        for rid, coords in self.regions.items():
            coords = np.asarray(coords)
            if coords.ndim != 2 or coords.shape[1] != 2 or coords.shape[0] == 0:
                raise ValidationError(f"region {rid}: coordinates must be a non-empty (k,2) array")
            if coords.min() < 0 or coords[:, 0].max() >= h or coords[:, 1].max() >= w:
                raise ValidationError(f"region {rid}: pixel outside frame dims {self.frame_dims}")
            pix = set(map(tuple, coords.tolist()))
            if len(pix) != len(coords):
                raise ValidationError(f"region {rid}: duplicate pixels within region")
            if seen & pix:
                raise ValidationError(f"region {rid}: overlaps a previous region")
            seen |= pix

    @property
    def n_regions(self):
        return len(self.regions)

    def region_ids(self):
        return list(self.regions.keys())


@dataclass(frozen=True)
class ChannelMatrix:
    """n_r x n_t matrix of per-region mean intensities plus sampling metadata.

    ``filtered`` distinguishes the raw region means from the bandpassed
    matrix fed to the decomposition stage.
    """

    values: np.ndarray
    meta: AcquisitionMeta
    mesh_ref: str | None = None
    filtered: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValidationError(f"channel matrix must be 2-D, got shape {values.shape}")
        bad = ~np.isfinite(values)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise ValidationError(f"non-finite entry at row {r}, column {c}")
        if values.shape[1] != self.meta.frame_count:
            raise ValidationError(
                f"matrix has {values.shape[1]} columns but metadata declares "
                f"{self.meta.frame_count} frames"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_regions(self):
        return self.values.shape[0]

    @property
    def n_frames(self):
        return self.values.shape[1]

    def times_s(self):
        """Sample timestamps in seconds."""
        return np.arange(self.n_frames) / self.meta.sample_rate_hz

    def with_values(self, values, filtered=None):
        return ChannelMatrix(
            values=values,
            meta=self.meta,
            mesh_ref=self.mesh_ref,
            filtered=self.filtered if filtered is None else filtered,
        )


@dataclass(frozen=True)
class IhrSeries:
    """Time-stamped instantaneous heart rate in bpm."""

    timestamps_s: np.ndarray
    bpm: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.timestamps_s, dtype=np.float64)
        b = np.asarray(self.bpm, dtype=np.float64)
        if t.ndim != 1 or b.ndim != 1 or len(t) != len(b):
            raise ValidationError("timestamps and bpm must be 1-D and the same length")
        if len(t) == 0:
            raise ValidationError("iHR series must be non-empty")
        if not np.all(np.diff(t) > 0):
            raise ValidationError("timestamps must be strictly increasing")
        if not (np.all(np.isfinite(b)) and np.all(b > 0) and np.all(b <= 300)):
            raise ValidationError("bpm values must be finite and in (0, 300]")
        t.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "timestamps_s", t)
        object.__setattr__(self, "bpm", b)

    def __len__(self):
        return len(self.timestamps_s)


def rpeaks_to_ihr(peaks, grid):
    """Convert R-peak timestamps to an iHR series sampled on ``grid``.

    Each interbeat interval RR is assigned to the interval midpoint; RR is
    linearly interpolated between midpoints and converted to 60/RR bpm.
    Outside the midpoint span the nearest interval's rate is held.
    """
    peaks = np.asarray(peaks, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if len(peaks) < 2:
        raise ValidationError("need at least 2 R-peaks to compute a rate")
    if not np.all(np.diff(peaks) > 0):
        raise ValidationError("R-peak times must be strictly increasing")
    if grid.min() < peaks[0] or grid.max() > peaks[-1]:
        raise ValidationError(
            f"grid [{grid.min()}, {grid.max()}] outside peak support "
            f"[{peaks[0]}, {peaks[-1]}]"
        )
    rr = np.diff(peaks)
    mids = (peaks[:-1] + peaks[1:]) / 2.0
    rr_on_grid = np.interp(grid, mids, rr)
    return IhrSeries(timestamps_s=grid, bpm=60.0 / rr_on_grid)


FACIAL_AREAS = ("forehead", "left-cheek", "right-cheek", "nose", "chin")


def select_rows_by_group(channels: ChannelMatrix, mesh: RegionMesh, group: str) -> ChannelMatrix:
    """Restrict a channel matrix to the rows whose mesh region carries ``group``.

    Row order in ``channels`` must follow the mesh's region_id order.
    """
    if group not in FACIAL_AREAS:
        raise ValidationError(f"unknown facial area {group!r}; expected one of {FACIAL_AREAS}")
    ids = mesh.region_ids()
    if len(ids) != channels.n_regions:
        raise ValidationError(
            f"mesh has {len(ids)} regions but matrix has {channels.n_regions} rows"
        )
    keep = [i for i, rid in enumerate(ids) if mesh.group_labels.get(rid) == group]
    if not keep:
        raise ValidationError(f"no regions labelled {group!r}")
    return channels.with_values(channels.values[keep])
