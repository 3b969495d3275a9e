"""File formats: 8-bit portable graymaps (P2/P5) and plain-text edge lists."""
from __future__ import annotations

from pathlib import Path

import numpy as np


def _read_pgm_tokens(data: bytes, count: int, pos: int) -> tuple[list[int], int]:
    """Read whitespace-separated integer header tokens, skipping # comments."""
    tokens: list[int] = []
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        tokens.append(int(data[start:pos]))
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Load an 8-bit grayscale PGM (ascii P2 or binary P5) as a float array."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a P2/P5 graymap")
    magic = data[:2]
    (width, height, maxval), pos = _read_pgm_tokens(data, 3, 2)
    if maxval <= 0 or maxval > 255:
        raise ValueError(f"{path}: only 8-bit graymaps are supported (maxval={maxval})")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    else:
        raster = np.array(data[pos:].split()[:width * height], dtype=np.int64)
        if raster.size != width * height:
            raise ValueError(f"{path}: truncated raster")
    return raster.reshape(height, width).astype(np.float64)


def write_pgm(path, image: np.ndarray, binary: bool = True) -> None:
    """Write a float array (values 0..255) as an 8-bit PGM."""
    img = np.clip(np.round(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    height, width = img.shape
    if binary:
        header = f"P5\n{width} {height}\n255\n".encode()
        Path(path).write_bytes(header + img.tobytes())
    else:
        lines = "\n".join(" ".join(str(v) for v in row) for row in img)
        Path(path).write_text(f"P2\n{width} {height}\n255\n{lines}\n")


def read_edge_list(path) -> list[tuple[int, int]]:
    """Edges from plain text: one `u v` pair per line, 0-indexed, # comments."""
    edges: list[tuple[int, int]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected `u v`, got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return edges


def write_edge_list(path, edges) -> None:
    lines = [f"{int(u)} {int(v)}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n")
