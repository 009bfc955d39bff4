"""
Binary P6 images. Row 0 is the top row of the picture.
"""

import os
from pathlib import Path

import numpy as np


def write(file_path: os.PathLike, rgb: np.ndarray) -> None:
    """
    Writes an (height, width, 3) uint8 array as binary PPM (P6, maxval 255).

    Args:
        file_path (os.PathLike): Destination path; parent directories are created.
        rgb (np.ndarray): Pixel data, row-major from the top-left corner.
    """
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) array, got shape {rgb.shape}")
    if rgb.dtype != np.uint8:
        raise TypeError(f"expected uint8 pixels, got {rgb.dtype}")
    height, width, _ = rgb.shape
    write_path = Path(file_path)
    write_path.parent.mkdir(parents=True, exist_ok=True)
    with open(write_path, "wb") as file:
        file.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        file.write(np.ascontiguousarray(rgb).tobytes())


def _tokens(data: bytes, count: int):
    """The first ``count`` header tokens and the offset just after them."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            # 注释行
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PPM header")
        tokens.append(data[start:pos])
    return tokens, pos + 1


def read(file_path: os.PathLike) -> np.ndarray:
    """
    Reads a binary P6 PPM with maxval 255.

    Args:
        file_path (os.PathLike): The path to the image.
    Returns:
        np.ndarray: (height, width, 3) uint8 pixels.
    """
    with open(file_path, "rb") as file:
        data = file.read()
    tokens, offset = _tokens(data, 4)
    if tokens[0] != b"P6":
        raise ValueError(f"not a binary PPM file: magic {tokens[0]!r}")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height * 3, offset=offset)
    return pixels.reshape(height, width, 3).copy()
