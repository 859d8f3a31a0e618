"""Command-line entry point: faceroi INPUT -o channels.txt --fps 30"""

import argparse
import sys
from collections import Counter

from .extract import InputError, extract_channels
from .landmarks import NoFaceError
from .mesh import MeshError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


def build_parser():
    p = argparse.ArgumentParser(
        prog="faceroi",
        description="Extract per-region face intensities into a channel-matrix file.",
    )
    p.add_argument("input", help="directory of image frames, or a video file")
    p.add_argument("-o", "--out", required=True,
                   help="output channel-matrix path (mesh and sidecar written next to it)")
    p.add_argument("--fps", type=float, required=True,
                   help="frame rate of the recording in Hz")
    p.add_argument("--cell-px", type=int, default=5,
                   help="mesh cell side length in pixels (default 5)")
    p.add_argument("-q", "--quiet", action="store_true",
                   help="suppress the extraction summary")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        values, regions, labels = extract_channels(
            args.input, args.out, fps=args.fps, cell_px=args.cell_px
        )
    except FileNotFoundError as e:
        print(f"faceroi: error: {e}", file=sys.stderr)
        return EXIT_IO
    except (InputError, NoFaceError, MeshError) as e:
        print(f"faceroi: error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if not args.quiet:
        counts = Counter(labels.values())
        by_area = ", ".join(f"{k}={counts[k]}" for k in sorted(counts))
        print(f"wrote {args.out}: {values.shape[0]} regions x "
              f"{values.shape[1]} frames ({by_area})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
