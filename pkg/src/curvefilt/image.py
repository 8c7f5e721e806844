"""Image container and grayscale file I/O for 2D images and 3D volumes.

Supported formats:
  2D: PGM (P5, 8/16-bit), PNG grayscale (8/16-bit), raw + header sidecar
  3D: NRRD (attached or detached, raw or gzip), raw + header sidecar

All pixel data is held in double precision internally; file bit depth is a
conversion concern only.
"""

from __future__ import annotations

import gzip
import json
import os
import re
from dataclasses import dataclass, field

import numpy as np
from PIL import Image as PILImage


class ImageIOError(Exception):
    """Unreadable, unwritable, or malformed image file."""


@dataclass(frozen=True)
class Image:
    """N-dimensional scalar field (2D or 3D) with spacing metadata.

    data is row-major float64; spacing is the physical size per axis;
    intensity_range records the min/max of the source data before any
    conversion to float.
    """

    data: np.ndarray
    spacing: tuple = ()
    intensity_range: tuple = ()

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64))
        if arr.ndim not in (2, 3):
            raise ValueError(f"image rank must be 2 or 3, got {arr.ndim}")
        object.__setattr__(self, "data", arr)
        spacing = self.spacing or (1.0,) * arr.ndim
        if len(spacing) != arr.ndim:
            raise ValueError("spacing length must match image rank")
        object.__setattr__(self, "spacing", tuple(float(s) for s in spacing))
        rng = self.intensity_range or (float(arr.min()), float(arr.max()))
        object.__setattr__(self, "intensity_range", (float(rng[0]), float(rng[1])))

    @property
    def dims(self) -> tuple:
        return self.data.shape

    @property
    def rank(self) -> int:
        return self.data.ndim


def normalize(img: Image) -> Image:
    """Affine map of intensities to [0, 1]; a constant image maps to zeros."""
    lo = float(img.data.min())
    hi = float(img.data.max())
    if hi == lo:
        out = np.zeros_like(img.data)
    else:
        out = (img.data - lo) / (hi - lo)
    return Image(out, spacing=img.spacing, intensity_range=img.intensity_range)


# ---------------------------------------------------------------------------
# PGM (P5 binary)


def _read_pgm(path):
    with open(path, "rb") as f:
        raw = f.read()
    if not raw.startswith(b"P5"):
        raise ImageIOError(f"{path}: not a binary PGM (P5) file")
    # header tokens: magic, width, height, maxval; comments start with '#'
    tokens = []
    pos = 2
    while len(tokens) < 3:
        m = re.match(rb"(\s*(#[^\n]*\n|\s)*)([0-9]+)", raw[pos:])
        if m is None:
            raise ImageIOError(f"{path}: malformed PGM header")
        tokens.append(int(m.group(3)))
        pos += m.end()
    width, height, maxval = tokens
    pos += 1  # single whitespace after maxval
    if maxval < 256:
        dtype, nbytes = np.dtype(">u1"), 1
    elif maxval < 65536:
        dtype, nbytes = np.dtype(">u2"), 2  # PGM 16-bit is big-endian
    else:
        raise ImageIOError(f"{path}: unsupported PGM maxval {maxval}")
    payload = raw[pos : pos + width * height * nbytes]
    if len(payload) != width * height * nbytes:
        raise ImageIOError(f"{path}: PGM payload truncated")
    data = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return data.astype(np.float64)


def _to_codes(data, maxval):
    # Data in [0,1] is rescaled to the full code range; data already in code
    # range (max > 1, e.g. loaded from file) is written back verbatim so that
    # save∘load is the identity on the representable lattice.
    if data.size and data.max() > 1.0:
        return np.rint(np.clip(data, 0, maxval))
    return np.rint(np.clip(data, 0.0, 1.0) * maxval)


def _write_pgm(path, data, maxval=65535):
    codes = _to_codes(data, maxval).astype(np.uint16 if maxval > 255 else np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n%d\n" % (data.shape[1], data.shape[0], maxval))
        if maxval > 255:
            f.write(codes.astype(">u2").tobytes())
        else:
            f.write(codes.tobytes())


# ---------------------------------------------------------------------------
# PNG grayscale via Pillow


def _read_png(path):
    with PILImage.open(path) as im:
        if im.mode == "L":
            arr = np.asarray(im, dtype=np.uint8)
        elif im.mode in ("I;16", "I;16B", "I"):
            arr = np.asarray(im, dtype=np.uint32)
            if arr.max() > 65535:
                raise ImageIOError(f"{path}: unsupported PNG bit depth")
        else:
            raise ImageIOError(f"{path}: only grayscale PNG accepted, got mode {im.mode}")
    return arr.astype(np.float64)


def _write_png(path, data):
    codes = _to_codes(data, 65535).astype(np.uint16)
    PILImage.fromarray(codes).save(path)  # uint16 -> 16-bit grayscale PNG


# ---------------------------------------------------------------------------
# NRRD (minimal subset: raw/gzip encodings, attached or detached data)

_NRRD_DTYPES = {
    "uchar": np.uint8, "unsigned char": np.uint8, "uint8": np.uint8,
    "ushort": np.uint16, "unsigned short": np.uint16, "uint16": np.uint16,
    "float": np.float32, "float32": np.float32,
    "double": np.float64, "float64": np.float64,
}


def _read_nrrd(path):
    with open(path, "rb") as f:
        raw = f.read()
    if not raw.startswith(b"NRRD"):
        raise ImageIOError(f"{path}: not an NRRD file")
    header_end = raw.find(b"\n\n")
    detached = False
    if header_end < 0:
        header_bytes, payload = raw, b""
        detached = True
    else:
        header_bytes = raw[:header_end]
        payload = raw[header_end + 2 :]
    fields = {}
    for line in header_bytes.decode("ascii", "replace").splitlines()[1:]:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        fields[key.strip().lower()] = value.lstrip("= ").strip()
    try:
        sizes = tuple(int(s) for s in fields["sizes"].split())
        dtype = _NRRD_DTYPES[fields["type"]]
    except KeyError as e:
        raise ImageIOError(f"{path}: NRRD header missing field {e}") from e
    encoding = fields.get("encoding", "raw")
    endian = fields.get("endian", "little")
    datafile = fields.get("data file") or fields.get("datafile")
    if datafile is not None:
        detached = True
        with open(os.path.join(os.path.dirname(path) or ".", datafile), "rb") as f:
            payload = f.read()
    elif detached:
        raise ImageIOError(f"{path}: NRRD header has no data section and no data file")
    if encoding in ("gzip", "gz"):
        payload = gzip.decompress(payload)
    elif encoding != "raw":
        raise ImageIOError(f"{path}: unsupported NRRD encoding {encoding}")
    dt = np.dtype(dtype)
    if dt.itemsize > 1:
        dt = dt.newbyteorder("<" if endian == "little" else ">")
    n_expected = int(np.prod(sizes))
    data = np.frombuffer(payload, dtype=dt)
    if data.size != n_expected:
        raise ImageIOError(
            f"{path}: NRRD sizes {sizes} expect {n_expected} elements, payload has {data.size}"
        )
    # NRRD sizes list the fastest axis first; numpy shape is slowest-first.
    arr = data.reshape(sizes[::-1]).astype(np.float64)
    spacings = fields.get("spacings")
    spacing = tuple(float(s) for s in spacings.split())[::-1] if spacings else ()
    return arr, spacing


def _write_nrrd(path, data, spacing, gzip_encode=False):
    arr = np.ascontiguousarray(data, dtype="<f4")
    sizes = " ".join(str(s) for s in data.shape[::-1])
    spacings = " ".join(repr(s) for s in spacing[::-1])
    header = (
        "NRRD0004\n"
        "type: float32\n"
        f"dimension: {data.ndim}\n"
        f"sizes: {sizes}\n"
        f"spacings: {spacings}\n"
        "endian: little\n"
        f"encoding: {'gzip' if gzip_encode else 'raw'}\n"
        "\n"
    )
    payload = arr.tobytes()
    if gzip_encode:
        payload = gzip.compress(payload)
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(payload)


# ---------------------------------------------------------------------------
# raw + header sidecar (JSON key:value, little-endian fixed)

_RAW_DTYPES = {
    "uint8": "<u1", "uint16": "<u2", "float32": "<f4", "float64": "<f8",
}


def _header_path(path):
    return os.path.splitext(path)[0] + ".hdr.json"


def _read_raw(path):
    hdr_path = _header_path(path)
    if not os.path.exists(hdr_path):
        raise ImageIOError(f"{path}: missing header sidecar {hdr_path}")
    with open(hdr_path) as f:
        hdr = json.load(f)
    if hdr.get("endian", "little") != "little":
        raise ImageIOError(f"{path}: only little-endian raw supported")
    dims = tuple(int(d) for d in hdr["dims"])
    dtype = _RAW_DTYPES.get(hdr.get("dtype", "float64"))
    if dtype is None:
        raise ImageIOError(f"{path}: unsupported raw dtype {hdr.get('dtype')}")
    with open(path, "rb") as f:
        data = np.frombuffer(f.read(), dtype=dtype)
    if data.size != int(np.prod(dims)):
        raise ImageIOError(f"{path}: raw payload does not match dims {dims}")
    spacing = tuple(float(s) for s in hdr.get("spacing", ()))
    return data.reshape(dims).astype(np.float64), spacing


def _write_raw(path, data, spacing):
    hdr = {
        "dims": list(data.shape),
        "spacing": list(spacing),
        "dtype": "float64",
        "endian": "little",
    }
    with open(_header_path(path), "w") as f:
        json.dump(hdr, f, indent=1)
    with open(path, "wb") as f:
        f.write(np.ascontiguousarray(data, dtype="<f8").tobytes())


# ---------------------------------------------------------------------------


def load_image(path, format_hint=None) -> Image:
    """Read a grayscale 2D image or 3D volume into an Image.

    The format is taken from format_hint when given, otherwise from the
    file extension. Color inputs are rejected.
    """
    if not os.path.exists(path):
        raise ImageIOError(f"{path}: file not found")
    fmt = (format_hint or os.path.splitext(path)[1].lstrip(".")).lower()
    if fmt == "pgm":
        return Image(_read_pgm(path))
    if fmt == "png":
        return Image(_read_png(path))
    if fmt == "nrrd":
        data, spacing = _read_nrrd(path)
        return Image(data, spacing=spacing)
    if fmt == "raw":
        data, spacing = _read_raw(path)
        return Image(data, spacing=spacing)
    raise ImageIOError(f"{path}: unsupported format '{fmt}'")


def save_image(img: Image, path, format_hint=None) -> None:
    """Write an Image to disk; the format follows the extension.

    2D values are assumed in [0, 1] for the 16-bit PNG/PGM paths (they are
    clipped and rescaled to the full code range); NRRD and raw paths store
    floating point unscaled.
    """
    fmt = (format_hint or os.path.splitext(path)[1].lstrip(".")).lower()
    if fmt in ("pgm", "png") and img.rank != 2:
        raise ImageIOError(f"{path}: {fmt} supports 2D images only")
    if fmt == "pgm":
        _write_pgm(path, img.data)
    elif fmt == "png":
        _write_png(path, img.data)
    elif fmt == "nrrd":
        _write_nrrd(path, img.data, img.spacing)
    elif fmt == "raw":
        _write_raw(path, img.data, img.spacing)
    else:
        raise ImageIOError(f"{path}: unsupported format '{fmt}'")
