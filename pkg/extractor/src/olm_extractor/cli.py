"""extract: images in, .olmf feature files plus a JSON manifest out."""

import argparse
import sys
from pathlib import Path

from .extract import run_extraction, write_manifest

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="extract",
        description="extract relu5/pool5 VGG-16 feature maps to .olmf files",
    )
    ap.add_argument("--images", required=True,
                    help="directory of images, or a text file listing image paths")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--resolution", choices=("native", "448"), default="448",
                    help="resize to 448x448 or keep original size")
    ap.add_argument("--weights",
                    help="path to a VGG-16 checkpoint; omitted = seeded random init")
    ap.add_argument("--seed", type=int, default=0,
                    help="initialization seed when no weights are given")
    ap.add_argument("--manifest", default="manifest.json",
                    help="manifest filename inside --out")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        manifest = run_extraction(
            images=args.images,
            out_dir=args.out,
            resolution=args.resolution,
            weights=args.weights,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"extract: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RuntimeError) as exc:
        print(f"extract: {exc}", file=sys.stderr)
        return EXIT_DATA
    write_manifest(manifest, str(Path(args.out) / args.manifest))
    print(f"extracted {len(manifest.images)} images, "
          f"skipped {len(manifest.skipped)}")
    return EXIT_OK


def entry() -> None:
    sys.exit(main())
