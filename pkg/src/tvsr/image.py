"""Image containers, file I/O, and color conversion.

Conventions used throughout the package:

  * luma plane  -- float64 array of shape (H, W), values in [0, 1]
  * chroma planes -- float64 arrays of shape (H, W) in [0, 1], neutral at 0.5
  * RGB image   -- uint8 array of shape (H, W, 3)

All arithmetic is double precision; quantization to 8 bits happens only when
writing files or assembling an RGB image. Functions return new arrays and
never mutate their inputs, so values are safe to share across threads.

Supported file formats: PNG (8-bit gray / palette / RGB, via Pillow) and
binary PGM (P5) / PPM (P6) with maxval 255.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptDataError, UnsupportedFormatError

# BT.601 luma weights (full range) and the matching chroma scale factors.
_KR, _KG, _KB = 0.299, 0.587, 0.114
_CB_DEN = 1.772  # 2 * (1 - Kb)
_CR_DEN = 1.402  # 2 * (1 - Kr)


def load_image(path) -> np.ndarray:
    """Read a PNG/PGM/PPM file into a uint8 (H, W, 3) RGB array.

    Grayscale sources are replicated across the three channels. The format is
    detected from the file's magic bytes, not its extension.

    Raises FileNotFoundError, UnsupportedFormatError, or CorruptDataError,
    each carrying the offending path.
    """
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            head = fh.read(2)
            fh.seek(0)
            data = fh.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"image file not found: {path}") from None

    if head in (b"P5", b"P6"):
        return _decode_pnm(data, path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _decode_png(path)
    raise UnsupportedFormatError(f"{path}: not a PNG, PGM (P5), or PPM (P6) file")


def _decode_png(path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode == "P":
                im = im.convert("RGB")
                mode = "RGB"
            if mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
                return np.repeat(arr[:, :, None], 3, axis=2)
            if mode == "RGB":
                return np.asarray(im, dtype=np.uint8).copy()
            raise UnsupportedFormatError(f"{path}: unsupported PNG mode {mode!r}")
    except UnidentifiedImageError:
        raise CorruptDataError(f"{path}: undecodable PNG data") from None
    except OSError as exc:
        raise CorruptDataError(f"{path}: corrupt PNG ({exc})") from None


def _decode_pnm(data: bytes, path) -> np.ndarray:
    """Binary PGM/PPM decoder; header tokens may be separated by comments."""
    magic = data[:2]
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptDataError(f"{path}: truncated PNM header")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace byte after the maxval token
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptDataError(f"{path}: non-numeric PNM header tokens") from None
    if width <= 0 or height <= 0:
        raise CorruptDataError(f"{path}: bad PNM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"{path}: only maxval 255 supported, got {maxval}")

    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    raster = data[pos : pos + need]
    if len(raster) != need:
        raise CorruptDataError(
            f"{path}: expected {need} raster bytes, found {len(raster)}"
        )
    arr = np.frombuffer(raster, dtype=np.uint8)
    if channels == 1:
        gray = arr.reshape(height, width)
        return np.repeat(gray[:, :, None], 3, axis=2)
    return arr.reshape(height, width, 3).copy()


def save_image(img: np.ndarray, path) -> None:
    """Write a uint8 RGB array as PNG, PPM (P6), or PGM (P5) by extension.

    PNM output uses maxval 255, no comments, and a single newline after each
    header line. Saving to .pgm requires all three channels to be identical.
    """
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) uint8 image, got shape {img.shape}")
    path = os.fspath(path)
    ext = os.path.splitext(path)[1].lower()
    h, w = img.shape[:2]
    if ext == ".png":
        Image.fromarray(img, mode="RGB").save(path, format="PNG")
    elif ext == ".ppm":
        with open(path, "wb") as fh:
            fh.write(b"P6\n%d %d\n255\n" % (w, h))
            fh.write(img.tobytes())
    elif ext == ".pgm":
        if not (np.array_equal(img[:, :, 0], img[:, :, 1])
                and np.array_equal(img[:, :, 0], img[:, :, 2])):
            raise UnsupportedFormatError("PGM output requires a grayscale image")
        with open(path, "wb") as fh:
            fh.write(b"P5\n%d %d\n255\n" % (w, h))
            fh.write(img[:, :, 0].tobytes())
    else:
        raise UnsupportedFormatError(f"unsupported output extension {ext!r}")


def rgb_to_luma(img: np.ndarray):
    """Split an RGB image into (luma, Cb, Cr) float planes, full-range BT.601.

    Y = 0.299 R + 0.587 G + 0.114 B on channels normalized to [0, 1]; the
    chroma planes keep full precision so the round trip through luma_to_rgb
    reproduces every 8-bit channel value.
    """
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got shape {img.shape}")
    rgb = img.astype(np.float64)
    # weighting the 8-bit values first keeps the anchors exact
    # (pure white -> 1.0, pure red -> 0.299)
    y = (_KR * rgb[:, :, 0] + _KG * rgb[:, :, 1] + _KB * rgb[:, :, 2]) / 255.0
    b = rgb[:, :, 2] / 255.0
    r = rgb[:, :, 0] / 255.0
    cb = 0.5 + (b - y) / _CB_DEN
    cr = 0.5 + (r - y) / _CR_DEN
    return np.clip(y, 0.0, 1.0), cb, cr


def luma_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_luma; channels clamped and rounded half away from zero."""
    if y.shape != cb.shape or y.shape != cr.shape:
        raise ValueError(
            f"plane dimensions differ: {y.shape} vs {cb.shape} vs {cr.shape}"
        )
    r = y + _CR_DEN * (cr - 0.5)
    b = y + _CB_DEN * (cb - 0.5)
    g = (y - _KR * r - _KB * b) / _KG
    out = np.empty(y.shape + (3,), dtype=np.uint8)
    for ch, plane in enumerate((r, g, b)):
        scaled = np.clip(plane * 255.0, 0.0, 255.0)
        out[:, :, ch] = np.floor(scaled + 0.5).astype(np.uint8)
    return out


def crop_border(img: np.ndarray, border: int) -> np.ndarray:
    """Central region after removing `border` pixels from every side."""
    if border < 0:
        raise ValueError("border must be non-negative")
    h, w = img.shape[:2]
    if 2 * border >= min(h, w):
        raise ValueError(f"border {border} too large for {h}x{w} image")
    if border == 0:
        return img.copy()
    return img[border : h - border, border : w - border].copy()


def center_crop_to_multiple(img: np.ndarray, scale: int) -> np.ndarray:
    """Center-crop so both spatial dimensions are divisible by `scale`."""
    if scale < 1:
        raise ValueError("scale must be >= 1")
    h, w = img.shape[:2]
    nh, nw = h - h % scale, w - w % scale
    if nh == 0 or nw == 0:
        raise ValueError(f"image {h}x{w} smaller than scale {scale}")
    top, left = (h - nh) // 2, (w - nw) // 2
    return img[top : top + nh, left : left + nw].copy()
