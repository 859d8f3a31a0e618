"""Regenerate the committed sample clip: 60 PGM frames, 96x96, 12 fps (5 s).

A bright face-like ellipse on a dark background, with a small 1.2 Hz
intensity modulation so the extracted channels are not constant.  Run from
this directory:  python3 make_sample_clip.py
"""

import os

import numpy as np


def make_clip(out_dir="sample_clip", n_frames=60, fps=12.0, seed=123):
    os.makedirs(out_dir, exist_ok=True)
    h = w = 96
    cy, cx = 46.0, 48.0
    b, a = 34.0, 26.0          # semi-axes: taller than wide
    yy, xx = np.mgrid[0:h, 0:w]
    inside = ((xx - cx) / a) ** 2 + ((yy - cy) / b) ** 2 <= 1.0
    eyes = np.zeros((h, w), dtype=bool)
    for ex in (cx - 10, cx + 10):
        eyes |= ((xx - ex) ** 2 + (yy - (cy - 9)) ** 2) <= 9.0

    rng = np.random.default_rng(seed)
    for i in range(n_frames):
        t = i / fps
        pulse = 4.0 * np.sin(2 * np.pi * 1.2 * t)
        frame = np.full((h, w), 40.0)
        frame[inside] = 180.0 + pulse
        frame[eyes & inside] = 150.0 + pulse
        frame += rng.normal(0.0, 1.5, size=(h, w))
        frame = np.clip(np.round(frame), 0, 255).astype(np.uint8)
        path = os.path.join(out_dir, f"frame_{i:04d}.pgm")
        with open(path, "wb") as f:
            f.write(f"P5\n{w} {h}\n255\n".encode())
            f.write(frame.tobytes())
    print(f"wrote {n_frames} frames to {out_dir}/")


if __name__ == "__main__":
    make_clip()
