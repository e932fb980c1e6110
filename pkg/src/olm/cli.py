"""Command-line front end.

    olm localize --features img.olmf [--out boxes.json]
    olm saliency --features img.olmf --out map.pgm
    olm parts    --features img.olmf [--out parts.json]
    olm eval     --mode corloc --pred pred.json --gt gt.json
    olm eval     --mode saliency --pred maps/ --gt masks/
    olm mine     transactions.txt --alpha 0.1

--features may name one .olmf file or a directory of them; with a
directory, --out is a directory and every input becomes one output file,
optionally in parallel with --jobs. JSON goes to stdout when --out is
omitted (saliency always needs --out, its payload is binary).

Exit codes: 0 success; 2 bad usage; 3 unreadable or malformed data,
including an object region too small to split into parts; 4 only with
--strict, when any input yields no object region.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import (
    PARTS_ALPHA,
    PipelineConfig,
    parse_config_file,
    parse_layers,
    parse_size,
    resolve_config,
)
from .errors import NoObjectFoundError, OlmError, ValidationError
from .localization import BoundingBox
from .metrics import EvalRecord, corloc, is_localized, mae, max_f_measure
from .mining import load_transaction_file, mine_frequent
from .pgm import read_pgm, write_pgm
from .pipeline import (
    localization_record,
    parts_record,
    run_localization,
    run_parts,
    saliency_map,
)
from .tensors import read_olmf

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NO_OBJECT = 4

GT_MASK_THRESHOLD = 127  # PGM pixels above this count as object


def _dump_json(record) -> str:
    return json.dumps(record, sort_keys=True, indent=2) + "\n"


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, record) -> None:
    _write_atomic(path, _dump_json(record).encode("utf-8"))


def _write_pgm_atomic(path: Path, values) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        write_pgm(values, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", required=True, help=".olmf file or directory of them")
    p.add_argument("--out", help="output file, or directory in batch mode")
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--alpha", type=float, help="support threshold in (0, 1]")
    p.add_argument("--connectivity", type=int, choices=(4, 8))
    p.add_argument("--keep", choices=("largest", "all"))
    p.add_argument("--max-boxes", type=int, dest="max_boxes")
    p.add_argument("--k", type=int, help="number of parts")
    p.add_argument("--lambda", type=float, dest="lam", help="part side fraction")
    p.add_argument("--seed", type=int)
    p.add_argument("--size", help="output resolution, WIDTHxHEIGHT")
    p.add_argument("--layers", help="comma-separated layer names, first sets the grid")
    p.add_argument("--strict", action="store_true", help="exit 4 when no object is found")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers in batch mode")
    p.add_argument("--manifest", help="write a batch summary JSON here")


def _resolve_cfg(args, base: PipelineConfig | None = None) -> PipelineConfig:
    file_overrides = parse_config_file(args.config) if args.config else None
    flags = {}
    for field in ("alpha", "connectivity", "keep", "max_boxes", "k", "lam", "seed"):
        value = getattr(args, field)
        if value is not None:
            flags[field] = value
    if args.size is not None:
        flags["img_w"], flags["img_h"] = parse_size(args.size)
    if args.layers is not None:
        flags["layers"] = parse_layers(args.layers)
    return resolve_config(file_overrides, flags, base)


def _feature_inputs(features: str) -> tuple[list[Path], bool]:
    p = Path(features)
    if p.is_dir():
        files = sorted(p.glob("*.olmf"))
        if not files:
            raise ValidationError(f"no .olmf files in directory {p}")
        return files, True
    return [p], False


def _run_batch(files: list[Path], jobs: int, worker):
    if jobs < 1:
        raise ValueError(f"--jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(files) == 1:
        return [worker(f) for f in files]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, files))


def _write_manifest(args, command: str, entries: list[dict]) -> None:
    if args.manifest:
        record = {"command": command, "n_images": len(entries), "outputs": entries}
        _write_json(Path(args.manifest), record)


def _strict_exit(args, any_missing: bool) -> int:
    return EXIT_NO_OBJECT if (args.strict and any_missing) else EXIT_OK


def cmd_localize(args) -> int:
    cfg = _resolve_cfg(args)
    files, batch = _feature_inputs(args.features)
    if batch and not args.out:
        raise ValueError("--out directory is required with a --features directory")
    if args.save_map and not (batch or args.out):
        raise ValueError("--save-map needs --out to name the map file")

    def worker(path: Path):
        result = run_localization(read_olmf(str(path)), cfg, image=path.stem)
        record = localization_record(result)
        if batch:
            out = Path(args.out) / f"{path.stem}.json"
            _write_json(out, record)
            entry = {"image": path.stem, "output": str(out),
                     "no_object_found": result.no_object_found}
            if args.save_map:
                map_path = Path(args.out) / f"{path.stem}.pgm"
                _write_pgm_atomic(map_path, saliency_map(result))
                entry["saliency"] = str(map_path)
            return entry, record, result
        return None, record, result

    outcomes = _run_batch(files, args.jobs, worker)
    if not batch:
        _, record, result = outcomes[0]
        if args.out:
            _write_json(Path(args.out), record)
        else:
            sys.stdout.write(_dump_json(record))
        if args.save_map:
            map_path = Path(args.out).with_suffix(".pgm")
            _write_pgm_atomic(map_path, saliency_map(result))
        entries = [{"image": files[0].stem, "no_object_found": result.no_object_found}]
    else:
        entries = [e for e, _, _ in outcomes]
    _write_manifest(args, "localize", entries)
    return _strict_exit(args, any(e["no_object_found"] for e in entries))


def cmd_saliency(args) -> int:
    cfg = _resolve_cfg(args)
    files, batch = _feature_inputs(args.features)
    if not args.out:
        raise ValueError("--out is required: saliency output is a binary PGM")

    def worker(path: Path):
        result = run_localization(read_olmf(str(path)), cfg, image=path.stem)
        out = Path(args.out) / f"{path.stem}.pgm" if batch else Path(args.out)
        _write_pgm_atomic(out, saliency_map(result))
        return {"image": path.stem, "output": str(out),
                "no_object_found": result.no_object_found}

    entries = _run_batch(files, args.jobs, worker)
    _write_manifest(args, "saliency", entries)
    return _strict_exit(args, any(e["no_object_found"] for e in entries))


def cmd_parts(args) -> int:
    cfg = _resolve_cfg(args, base=PipelineConfig(alpha=PARTS_ALPHA))
    files, batch = _feature_inputs(args.features)
    if batch and not args.out:
        raise ValueError("--out directory is required with a --features directory")

    def worker(path: Path):
        stacks = read_olmf(str(path))
        try:
            record = parts_record(run_parts(stacks, cfg, image=path.stem))
        except NoObjectFoundError:
            record = {"image": path.stem, "no_object_found": True, "object_box": None,
                      "side": None, "parts": [], "config": cfg.to_dict()}
        if batch:
            out = Path(args.out) / f"{path.stem}.json"
            _write_json(out, record)
            return {"image": path.stem, "output": str(out),
                    "no_object_found": record["no_object_found"]}, record
        return None, record

    outcomes = _run_batch(files, args.jobs, worker)
    if not batch:
        _, record = outcomes[0]
        if args.out:
            _write_json(Path(args.out), record)
        else:
            sys.stdout.write(_dump_json(record))
        entries = [{"image": files[0].stem, "no_object_found": record["no_object_found"]}]
    else:
        entries = [e for e, _ in outcomes]
    _write_manifest(args, "parts", entries)
    return _strict_exit(args, any(e["no_object_found"] for e in entries))


def _load_box_records(path: Path) -> dict[str, list[BoundingBox]]:
    """image -> boxes from a JSON array file or a directory of per-image
    records shaped like the localize output."""
    if path.is_dir():
        records = []
        for p in sorted(path.glob("*.json")):
            with open(p, "r", encoding="utf-8") as fh:
                records.append(json.load(fh))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            records = json.load(fh)
        if not isinstance(records, list):
            records = [records]
    out: dict[str, list[BoundingBox]] = {}
    for rec in records:
        try:
            image = rec["image"]
            boxes = [BoundingBox.from_dict(b) for b in rec["boxes"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{path}: record missing field {exc}") from exc
        if image in out:
            raise ValidationError(f"{path}: duplicate entry for image {image!r}")
        out[image] = boxes
    return out


def _paired_images(pred: dict, gt: dict, what: str) -> list[str]:
    missing = sorted(set(pred) - set(gt))
    extra = sorted(set(gt) - set(pred))
    if missing or extra:
        raise ValidationError(
            f"{what} sets differ: missing from reference {missing}, "
            f"unmatched reference entries {extra}"
        )
    return sorted(pred)


def _eval_corloc(args) -> dict:
    pred = _load_box_records(Path(args.pred))
    gt = _load_box_records(Path(args.gt))
    images = _paired_images(pred, gt, "box record")
    records = [
        EvalRecord(image=i, predicted=tuple(pred[i]), actual=tuple(gt[i]))
        for i in images
    ]
    per_image = {r.image: is_localized(r.predicted, r.actual) for r in records}
    return {
        "mode": "corloc",
        "n_images": len(records),
        "corloc": corloc(records),
        "per_image": per_image,
    }


def _pgm_set(path: Path) -> dict[str, Path]:
    if path.is_dir():
        files = sorted(path.glob("*.pgm"))
        if not files:
            raise ValidationError(f"no .pgm files in directory {path}")
        return {p.stem: p for p in files}
    return {path.stem: path}


def _eval_saliency(args) -> dict:
    pred = _pgm_set(Path(args.pred))
    gt = _pgm_set(Path(args.gt))
    images = _paired_images(pred, gt, "saliency map")
    per_image = {}
    mae_sum = 0.0
    f_sum = 0.0
    for name in images:
        sal = read_pgm(str(pred[name]))
        mask = read_pgm(str(gt[name])) > GT_MASK_THRESHOLD
        err = mae(sal, mask)
        best_f, threshold = max_f_measure(sal, mask)
        per_image[name] = {"mae": err, "max_f": best_f, "threshold": threshold}
        mae_sum += err
        f_sum += best_f
    return {
        "mode": "saliency",
        "n_images": len(images),
        "mae_mean": mae_sum / len(images),
        "max_f_mean": f_sum / len(images),
        "per_image": per_image,
    }


def cmd_eval(args) -> int:
    record = _eval_corloc(args) if args.mode == "corloc" else _eval_saliency(args)
    if args.out:
        _write_json(Path(args.out), record)
    else:
        sys.stdout.write(_dump_json(record))
    return EXIT_OK


def cmd_mine(args) -> int:
    db = load_transaction_file(args.transactions)
    itemsets = mine_frequent(db, args.alpha, max_len=args.max_len)
    record = {
        "n_transactions": db.n,
        "alpha": args.alpha,
        "itemsets": [
            {"items": list(s.items), "count": s.support_count, "ratio": s.support_ratio}
            for s in itemsets
        ],
    }
    if args.out:
        _write_json(Path(args.out), record)
    else:
        sys.stdout.write(_dump_json(record))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olm", description="Object localization from stored feature maps."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("localize", help="emit object bounding boxes as JSON")
    _add_pipeline_args(p)
    p.add_argument("--save-map", action="store_true", dest="save_map",
                   help="also write the support map as PGM")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("saliency", help="emit the support map as a PGM image")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_saliency)

    p = sub.add_parser("parts", help="emit part locations as JSON")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_parts)

    p = sub.add_parser("eval", help="score predictions against references")
    p.add_argument("--mode", required=True, choices=("corloc", "saliency"))
    p.add_argument("--pred", required=True, help="prediction file or directory")
    p.add_argument("--gt", required=True, help="reference file or directory")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mine", help="mine frequent itemsets from a transaction file")
    p.add_argument("transactions", help="text file, one transaction per line")
    p.add_argument("--alpha", type=float, required=True, help="support threshold")
    p.add_argument("--max-len", type=int, dest="max_len", help="largest itemset size")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_mine)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except NoObjectFoundError as exc:
        print(f"olm: {exc}", file=sys.stderr)
        return EXIT_NO_OBJECT
    except ValueError as exc:
        print(f"olm: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OlmError, OSError) as exc:
        print(f"olm: {exc}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())
