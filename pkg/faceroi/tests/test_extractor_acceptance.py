"""Extractor acceptance: one test per criterion, each printing a PASS line.

Requires the waveform-recovery package (irpulse) to be installed so the
extractor's files can be validated with the downstream reader.
"""

import os
import warnings

import numpy as np

from faceroi import extract_channels

DATA = os.path.join(os.path.dirname(__file__), "data")
CLIP = os.path.join(DATA, "sample_clip")
CLIP_FPS = 12.0


def report(name, ok, detail=""):
    print(f"{name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} failed: {detail}"


def test_ac10_extractor_consistency(tmp_path):
    import irpulse.io as iio
    from irpulse.model import select_rows_by_group

    # part 1: committed 5 s clip -> files that validate under the reader
    out = str(tmp_path / "channels.txt")
    values, regions, labels = extract_channels(CLIP, out, fps=CLIP_FPS)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cm = iio.read_channel_matrix(out)
        mesh = iio.read_mesh(out + ".mesh")
    clip_ok = (
        np.array_equal(cm.values, values)
        and mesh.n_regions == cm.n_regions
        and cm.meta.sample_rate_hz == CLIP_FPS
        and abs(cm.meta.duration_s - 5.0) < 1e-9
        and all(select_rows_by_group(cm, mesh, g).n_regions > 0
                for g in set(labels.values()))
    )

    # part 2: constant-value frames -> channels exactly equal to that value
    h = w = 96
    yy, xx = np.mgrid[0:h, 0:w]
    inside = ((xx - 48) / 26.0) ** 2 + ((yy - 46) / 34.0) ** 2 <= 1.0
    frame = np.where(inside, 200.0, 30.0).astype(np.uint8)
    const_dir = tmp_path / "const"
    const_dir.mkdir()
    for i in range(60):
        with open(const_dir / f"f_{i:03d}.pgm", "wb") as f:
            f.write(f"P5\n{w} {h}\n255\n".encode())
            f.write(frame.tobytes())
    cvals, cregions, _ = extract_channels(str(const_dir), str(tmp_path / "c.txt"),
                                          fps=CLIP_FPS)
    const_ok = np.array_equal(cvals, np.full_like(cvals, 200.0))

    report(
        "AC-10 extractor consistency",
        clip_ok and const_ok,
        f"(clip: {cm.n_regions} regions x {cm.n_frames} frames round-trip "
        f"bit-exact; constant frames -> constant 200.0 channels: {const_ok})",
    )
