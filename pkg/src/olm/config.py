"""Pipeline settings with a fixed precedence chain.

Settings resolve as: command-line flags over config-file entries over
built-in defaults. The config file is flat ``key = value`` lines with
``#`` comments; keys match the long CLI flag names (``lambda``, ``size``,
``layers``, ...). All validation errors are ValueError so the CLI can
map them onto its usage exit code.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

DEFAULT_ALPHA = 0.06
PARTS_ALPHA = 0.07
DEFAULT_CONNECTIVITY = 8
DEFAULT_KEEP = "largest"
DEFAULT_K = 4
DEFAULT_LAMBDA = 0.25
DEFAULT_SEED = 0
DEFAULT_IMAGE_W = 448
DEFAULT_IMAGE_H = 448
DEFAULT_LAYERS = ("relu5", "pool5")


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = DEFAULT_ALPHA
    connectivity: int = DEFAULT_CONNECTIVITY
    keep: str = DEFAULT_KEEP
    max_boxes: int | None = None
    k: int = DEFAULT_K
    lam: float = DEFAULT_LAMBDA
    seed: int = DEFAULT_SEED
    img_w: int = DEFAULT_IMAGE_W
    img_h: int = DEFAULT_IMAGE_H
    layers: tuple[str, ...] = DEFAULT_LAYERS

    def validated(self) -> "PipelineConfig":
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if self.keep not in ("largest", "all"):
            raise ValueError(f"keep must be 'largest' or 'all', got {self.keep!r}")
        if self.max_boxes is not None and self.max_boxes < 1:
            raise ValueError(f"max-boxes must be >= 1, got {self.max_boxes}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.lam <= 0.0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.img_w < 1 or self.img_h < 1:
            raise ValueError(f"image size must be positive, got {self.img_w}x{self.img_h}")
        if not self.layers:
            raise ValueError("at least one layer name is required")
        if len(set(self.layers)) != len(self.layers):
            raise ValueError(f"duplicate layer names in {self.layers}")
        return self

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "connectivity": self.connectivity,
            "keep": self.keep,
            "max_boxes": self.max_boxes,
            "k": self.k,
            "lambda": self.lam,
            "seed": self.seed,
            "size": f"{self.img_w}x{self.img_h}",
            "layers": list(self.layers),
        }


def parse_size(text: str) -> tuple[int, int]:
    """Image size written WIDTHxHEIGHT, e.g. 448x448."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"size must look like 448x448, got {text!r}")
    try:
        w, h = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"size must look like 448x448, got {text!r}") from None
    return w, h


def parse_layers(text: str) -> tuple[str, ...]:
    names = tuple(p.strip() for p in text.split(",") if p.strip())
    if not names:
        raise ValueError(f"layers must be a comma-separated list, got {text!r}")
    return names


# config-file key -> (dataclass field(s), converter)
_FILE_KEYS = {
    "alpha": ("alpha", float),
    "connectivity": ("connectivity", int),
    "keep": ("keep", str),
    "max_boxes": ("max_boxes", int),
    "k": ("k", int),
    "lambda": ("lam", float),
    "seed": ("seed", int),
    "size": ("size", parse_size),
    "layers": ("layers", parse_layers),
}


def parse_config_file(path: str) -> dict:
    """Field-level overrides from a flat key = value file."""
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _FILE_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown setting {key!r}")
            field_name, convert = _FILE_KEYS[key]
            try:
                converted = convert(value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if field_name == "size":
                out["img_w"], out["img_h"] = converted
            else:
                out[field_name] = converted
    return out


def resolve_config(
    file_overrides: dict | None = None,
    flag_overrides: dict | None = None,
    base: PipelineConfig | None = None,
) -> PipelineConfig:
    """Merge overrides onto the defaults, flags winning over the file."""
    cfg = base if base is not None else PipelineConfig()
    valid = {f.name for f in fields(PipelineConfig)}
    for layer in (file_overrides, flag_overrides):
        if not layer:
            continue
        unknown = set(layer) - valid
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        cfg = replace(cfg, **layer)
    return cfg.validated()
