"""Multi-channel image container, RAW/PNM ingestion and color census."""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FCI_THRESHOLD = 0.999

RAW_DTYPES = {"u8": np.uint8, "u16": np.uint16, "u32": np.uint32, "f64": np.float64}
RAW_LAYOUT = "row-major-channel-last"


class FormatError(ValueError):
    """Raised for malformed headers or payloads that do not match them."""


@dataclass(frozen=True, eq=False)
class ImageCube:
    """Immutable Hgt x W x C grid of non-negative finite samples.

    ``samples`` is indexed ``[line, column, channel]``.  Reduced cascade
    levels may shrink to 1x1; ingestion enforces the 2x2 minimum.
    """

    samples: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        a = np.array(self.samples, dtype=np.float64, copy=True)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3:
            raise ValueError(f"samples must be 2-D or 3-D, got shape {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1 or a.shape[2] < 1:
            raise ValueError(f"empty image shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("samples must be finite")
        if np.any(a < 0):
            raise ValueError("samples must be non-negative")
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def dynamics(self) -> float:
        """max(samples) + 1."""
        return float(self.samples.max()) + 1.0

    @property
    def k_max(self) -> int:
        """Largest dynamics divisor, floor(max) + 1; it maps the cube to zero."""
        return int(np.floor(self.samples.max())) + 1

    @property
    def is_integral(self) -> bool:
        return bool(np.all(self.samples == np.floor(self.samples)))

    def crop(self, x: int, y: int, w: int, h: int) -> "ImageCube":
        if x < 0 or y < 0 or w < 1 or h < 1 or x + w > self.width or y + h > self.height:
            raise ValueError(
                f"crop ({x},{y},{w},{h}) outside {self.width}x{self.height} image"
            )
        return ImageCube(self.samples[y : y + h, x : x + w], self.provenance)

    def crop_square(self) -> "ImageCube":
        """Top-left square crop of side min(W, Hgt)."""
        n = min(self.width, self.height)
        return self.crop(0, 0, n, n)

    def __repr__(self):
        return (
            f"ImageCube({self.width}x{self.height}x{self.channels}, "
            f"dynamics={self.dynamics:g}, provenance={self.provenance!r})"
        )


@dataclass
class ColorCensus:
    total_pixels: int
    distinct_colors: int
    histogram: Counter = field(repr=False)
    threshold: float = FCI_THRESHOLD

    @property
    def fraction(self) -> float:
        return self.distinct_colors / self.total_pixels

    @property
    def is_fci(self) -> bool:
        return self.fraction >= self.threshold

    def to_dict(self) -> dict:
        return {
            "total_pixels": self.total_pixels,
            "distinct_colors": self.distinct_colors,
            "fraction": self.fraction,
            "threshold": self.threshold,
            "is_fci": self.is_fci,
        }


def color_labels(samples: np.ndarray) -> np.ndarray:
    """Integer label per pixel such that equal labels <=> equal color tuples.

    Integer-valued data is packed into a mixed-radix int64 key when it fits;
    otherwise rows are labelled through ``np.unique``.  Output shape is the
    spatial shape of ``samples``.
    """
    spatial = samples.shape[:2]
    flat = samples.reshape(-1, samples.shape[-1])
    if flat.shape[1] == 1 and np.all(flat == np.floor(flat)):
        return flat[:, 0].astype(np.int64).reshape(spatial)
    maxes = flat.max(axis=0)
    span = 1
    for m in maxes:
        span *= int(m) + 1
    if span < 2**62 and np.all(flat == np.floor(flat)):
        q = flat.astype(np.int64)
        key = q[:, 0].copy()
        for c in range(1, q.shape[1]):
            key *= int(maxes[c]) + 1
            key += q[:, c]
        return key.reshape(spatial)
    _, inverse = np.unique(flat, axis=0, return_inverse=True)
    return inverse.reshape(spatial).astype(np.int64)


def color_census(cube: ImageCube, threshold: float = FCI_THRESHOLD) -> ColorCensus:
    flat = cube.samples.reshape(-1, cube.channels)
    rows, counts = np.unique(flat, axis=0, return_counts=True)
    hist = Counter({tuple(r.tolist()): int(c) for r, c in zip(rows, counts)})
    return ColorCensus(
        total_pixels=flat.shape[0],
        distinct_colors=len(rows),
        histogram=hist,
        threshold=threshold,
    )


# ---------------------------------------------------------------- file I/O


def _sidecar_paths(path: Path) -> tuple[Path, Path]:
    path = Path(path)
    if path.suffix in (".json", ".bin"):
        stem = path.with_suffix("")
    else:
        stem = path
    return stem.with_suffix(".bin"), stem.with_suffix(".json")


def _guess_format(path: Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        return "pnm"
    if suffix in (".bin", ".json"):
        return "raw"
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic in (b"P5", b"P6"):
        return "pnm"
    raise FormatError(f"cannot infer image format of {path}")


def load_image(path, format: str | None = None, crop=None) -> ImageCube:
    """Read a RAW+sidecar or binary PNM (P5/P6) file.

    ``crop`` is an optional ``(x, y, w, h)`` window; the default keeps the
    whole image.
    """
    path = Path(path)
    fmt = format or _guess_format(path)
    if fmt == "raw":
        cube = _load_raw(path)
    elif fmt == "pnm":
        cube = _load_pnm(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if crop is not None:
        cube = cube.crop(*crop)
    if cube.width < 2 or cube.height < 2:
        raise FormatError(f"image {cube.width}x{cube.height} is smaller than 2x2")
    return cube


def read_sidecar(path) -> dict:
    _, meta_path = _sidecar_paths(path)
    with open(meta_path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{meta_path}: invalid JSON ({exc})") from exc


def _load_raw(path: Path) -> ImageCube:
    bin_path, meta_path = _sidecar_paths(path)
    meta = read_sidecar(path)
    try:
        w, h, c = int(meta["width"]), int(meta["height"]), int(meta["channels"])
        dtype_name = meta["dtype"]
        endian = meta.get("endianness", "little")
        layout = meta.get("layout", RAW_LAYOUT)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{meta_path}: bad sidecar header ({exc})") from exc
    if dtype_name not in RAW_DTYPES:
        raise FormatError(f"{meta_path}: unsupported dtype {dtype_name!r}")
    if endian not in ("little", "big"):
        raise FormatError(f"{meta_path}: bad endianness {endian!r}")
    if layout != RAW_LAYOUT:
        raise FormatError(f"{meta_path}: unsupported layout {layout!r}")
    if w < 1 or h < 1 or c < 1:
        raise FormatError(f"{meta_path}: non-positive dimensions")
    dt = np.dtype(RAW_DTYPES[dtype_name]).newbyteorder("<" if endian == "little" else ">")
    payload = bin_path.read_bytes()
    expected = w * h * c * dt.itemsize
    if len(payload) != expected:
        raise FormatError(
            f"{bin_path}: payload is {len(payload)} bytes, header declares "
            f"{w}x{h}x{c} {dtype_name} = {expected} bytes"
        )
    data = np.frombuffer(payload, dtype=dt).reshape(h, w, c)
    prov = meta.get("provenance") or str(bin_path)
    if isinstance(prov, dict):
        prov = json.dumps(prov, sort_keys=True)
    return ImageCube(data.astype(np.float64), prov)


def _pnm_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    i = 2
    n = len(buf)
    while len(tokens) < count:
        while i < n and buf[i : i + 1].isspace():
            i += 1
        if i < n and buf[i : i + 1] == b"#":
            while i < n and buf[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not buf[i : i + 1].isspace() and buf[i : i + 1] != b"#":
            i += 1
        if start == i:
            raise FormatError("truncated PNM header")
        tokens.append(buf[start:i])
    # exactly one whitespace byte separates header and raster
    return tokens, i + 1


def _load_pnm(path: Path) -> ImageCube:
    buf = Path(path).read_bytes()
    magic = buf[:2]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"{path}: not a binary PGM/PPM (magic {magic!r})")
    channels = 1 if magic == b"P5" else 3
    tokens, offset = _pnm_tokens(buf, 3)
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FormatError(f"{path}: bad PNM header") from exc
    if w < 1 or h < 1 or not 0 < maxval <= 65535:
        raise FormatError(f"{path}: bad PNM header values {w} {h} {maxval}")
    dt = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    expected = w * h * channels * dt.itemsize
    payload = buf[offset : offset + expected]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: raster is {len(payload)} bytes, header declares {expected}"
        )
    data = np.frombuffer(payload, dtype=dt).reshape(h, w, channels)
    return ImageCube(data.astype(np.float64), str(path))


def _pick_dtype(cube: ImageCube) -> str:
    if not cube.is_integral:
        return "f64"
    top = cube.samples.max()
    for name in ("u8", "u16", "u32"):
        if top <= np.iinfo(RAW_DTYPES[name]).max:
            return name
    return "f64"


def save_image(cube: ImageCube, path, dtype: str | None = None,
               endianness: str = "little", extra: dict | None = None) -> Path:
    """Write ``cube`` as ``<stem>.bin`` + ``<stem>.json``.

    Integer dtypes refuse non-integral or out-of-range samples.  Returns the
    payload path.
    """
    bin_path, meta_path = _sidecar_paths(Path(path))
    dtype = dtype or _pick_dtype(cube)
    if dtype not in RAW_DTYPES:
        raise ValueError(f"unsupported dtype {dtype!r}")
    if endianness not in ("little", "big"):
        raise ValueError(f"bad endianness {endianness!r}")
    np_dtype = np.dtype(RAW_DTYPES[dtype])
    if np_dtype.kind == "u":
        if not cube.is_integral:
            raise ValueError(f"cannot write fractional samples as {dtype}")
        if cube.samples.max() > np.iinfo(np_dtype).max:
            raise ValueError(f"samples exceed the {dtype} range")
    out = cube.samples.astype(np_dtype.newbyteorder("<" if endianness == "little" else ">"))
    meta = {
        "width": cube.width,
        "height": cube.height,
        "channels": cube.channels,
        "dtype": dtype,
        "endianness": endianness,
        "layout": RAW_LAYOUT,
        "dynamics": cube.dynamics,
        "provenance": cube.provenance,
    }
    if extra:
        meta.update(extra)
    bin_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = bin_path.with_name(bin_path.name + ".tmp")
    tmp.write_bytes(out.tobytes(order="C"))
    os.replace(tmp, bin_path)
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return bin_path


def save_pnm(cube: ImageCube, path) -> None:
    """Write a 1- or 3-channel integral cube as binary PGM/PPM."""
    if cube.channels not in (1, 3):
        raise ValueError("PNM holds 1 or 3 channels")
    if not cube.is_integral or cube.samples.max() > 65535:
        raise ValueError("PNM needs integral samples <= 65535")
    maxval = max(int(cube.samples.max()), 1)
    dt = np.uint8 if maxval < 256 else np.dtype(">u2")
    magic = b"P5" if cube.channels == 1 else b"P6"
    header = magic + f"\n{cube.width} {cube.height}\n{maxval}\n".encode()
    Path(path).write_bytes(header + cube.samples.astype(dt).tobytes())
