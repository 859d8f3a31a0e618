"""Readers and writers for the plain-text exchange formats.

Channel matrix: one whitespace-separated row of decimal values per region,
with a key-value sidecar at ``<path>.meta`` holding the sampling metadata.
Floats are written with ``repr`` so the round trip is bit exact.
"""

import os

import numpy as np

from .errors import FormatError
from .model import AcquisitionMeta, ChannelMatrix, IhrSeries, RegionMesh


def _fmt(x):
    return repr(float(x))


def sidecar_path(path):
    return str(path) + ".meta"


def write_channel_matrix(cm: ChannelMatrix, path, extra_meta=None):
    """Write the matrix file and its ``.meta`` sidecar."""
    with open(path, "w") as f:
        for row in cm.values:
            f.write(" ".join(_fmt(v) for v in row))
            f.write("\n")
    lines = {
        "sample_rate_hz": _fmt(cm.meta.sample_rate_hz),
        "duration_s": _fmt(cm.meta.duration_s),
        "frame_count": str(cm.meta.frame_count),
        "source_label": cm.meta.source_label,
        "filtered": "true" if cm.filtered else "false",
    }
    if cm.mesh_ref:
        lines["mesh"] = cm.mesh_ref
    if extra_meta:
        lines.update({k: str(v) for k, v in extra_meta.items()})
    with open(sidecar_path(path), "w") as f:
        for k, v in lines.items():
            f.write(f"{k} = {v}\n")


def _parse_sidecar(path):
    meta = {}
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{ln}: expected 'key = value'")
            k, _, v = line.partition("=")
            meta[k.strip()] = v.strip()
    return meta


def read_channel_matrix(path) -> ChannelMatrix:
    """Read a channel matrix plus its sidecar, enforcing all invariants."""
    side = sidecar_path(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"channel matrix file not found: {path}")
    if not os.path.exists(side):
        raise FileNotFoundError(f"missing sidecar: {side}")
    meta = _parse_sidecar(side)
    for key in ("sample_rate_hz", "frame_count"):
        if key not in meta:
            raise FormatError(f"{side}: missing required key {key!r}")
    try:
        fs = float(meta["sample_rate_hz"])
        n_t = int(meta["frame_count"])
        duration = float(meta.get("duration_s", n_t / fs))
    except ValueError as e:
        raise FormatError(f"{side}: malformed numeric value ({e})") from e

    rows = []
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            try:
                row = np.array([float(p) for p in parts], dtype=np.float64)
            except ValueError:
                bad = next(i for i, p in enumerate(parts) if not _is_float(p))
                raise FormatError(f"{path}: unparseable value at row {ln}, column {bad + 1}")
            if len(row) != n_t:
                raise FormatError(
                    f"{path}: row {ln} has {len(row)} entries, sidecar declares {n_t}"
                )
            bad = np.flatnonzero(~np.isfinite(row))
            if bad.size:
                raise FormatError(f"{path}: non-finite value at row {ln}, column {bad[0] + 1}")
            rows.append(row)
    if not rows:
        raise FormatError(f"{path}: no data rows")
    acq = AcquisitionMeta(
        sample_rate_hz=fs,
        duration_s=duration,
        frame_count=n_t,
        source_label=meta.get("source_label", ""),
    )
    return ChannelMatrix(
        values=np.vstack(rows),
        meta=acq,
        mesh_ref=meta.get("mesh"),
        filtered=meta.get("filtered", "false").lower() == "true",
    )


def _is_float(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def read_rpeaks(path):
    """Read R-peak timestamps, one decimal seconds value per line."""
    peaks = []
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                peaks.append(float(line))
            except ValueError:
                raise FormatError(f"{path}:{ln}: unparseable peak time {line!r}")
    if len(peaks) < 2:
        raise FormatError(f"{path}: need at least 2 R-peaks, found {len(peaks)}")
    peaks = np.asarray(peaks)
    if not np.all(np.diff(peaks) > 0):
        ln = int(np.flatnonzero(np.diff(peaks) <= 0)[0]) + 2
        raise FormatError(f"{path}:{ln}: peak times not strictly increasing")
    return peaks


def write_rpeaks(peaks, path):
    with open(path, "w") as f:
        for p in peaks:
            f.write(_fmt(p) + "\n")


def write_ihr(series: IhrSeries, path):
    with open(path, "w") as f:
        f.write("time_s,bpm\n")
        for t, b in zip(series.timestamps_s, series.bpm):
            f.write(f"{_fmt(t)},{_fmt(b)}\n")


def read_ihr(path) -> IhrSeries:
    with open(path) as f:
        header = f.readline().strip()
        if header != "time_s,bpm":
            raise FormatError(f"{path}: expected header 'time_s,bpm', got {header!r}")
        t, b = [], []
        for ln, line in enumerate(f, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise FormatError(f"{path}:{ln}: expected two comma-separated values")
            try:
                t.append(float(parts[0]))
                b.append(float(parts[1]))
            except ValueError:
                raise FormatError(f"{path}:{ln}: unparseable value")
    try:
        return IhrSeries(timestamps_s=np.asarray(t), bpm=np.asarray(b))
    except Exception as e:
        raise FormatError(f"{path}: {e}") from e


def write_mesh(mesh: RegionMesh, path):
    """Write a mesh: frame dims then one 'region <id> <group> r,c r,c ...' line each."""
    with open(path, "w") as f:
        f.write(f"frame_dims {mesh.frame_dims[0]} {mesh.frame_dims[1]}\n")
        for rid, coords in mesh.regions.items():
            group = mesh.group_labels.get(rid, "unlabelled")
            pix = " ".join(f"{int(r)},{int(c)}" for r, c in np.asarray(coords))
            f.write(f"region {rid} {group} {pix}\n")


def read_mesh(path) -> RegionMesh:
    regions, groups, dims = {}, {}, None
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "frame_dims":
                dims = (int(parts[1]), int(parts[2]))
            elif parts[0] == "region":
                rid = int(parts[1])
                groups[rid] = parts[2]
                try:
                    coords = np.array(
                        [[int(a) for a in p.split(",")] for p in parts[3:]], dtype=int
                    )
                except ValueError:
                    raise FormatError(f"{path}:{ln}: malformed pixel coordinate")
                regions[rid] = coords
            else:
                raise FormatError(f"{path}:{ln}: unknown record {parts[0]!r}")
    if dims is None:
        raise FormatError(f"{path}: missing frame_dims record")
    return RegionMesh(regions=regions, group_labels=groups, frame_dims=dims)
