"""Binary coefficient-tensor files and image/history exports.

Tensor layout: magic (4 bytes), version u32, then two u32 dimension fields
and little-endian complex64 payload in row-major order.

- "ESPC": dims (L, N), payload L*N*N, the (l, k, m) tensor of an
  enveloped-sinusoid frame.
- "STFC": dims (1, total), payload the flattened (frame_count,
  window_length) STFT matrix; reshape with the window length in hand.
"""

from __future__ import annotations

import struct

import numpy as np
from PIL import Image

from .frame import MipImage

__all__ = [
    "ESP_MAGIC",
    "STFT_MAGIC",
    "write_esp_coeffs",
    "write_stft_coeffs",
    "read_coeff_tensor",
    "read_stft_coeffs",
    "write_mip_csv",
    "write_mip_png",
    "write_history_csv",
]

ESP_MAGIC = b"ESPC"
STFT_MAGIC = b"STFC"
VERSION = 1

_HEADER = struct.Struct("<4sIII")


def _write(path, magic, dim0, dim1, payload):
    payload = np.ascontiguousarray(payload, dtype="<c8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, VERSION, dim0, dim1))
        fh.write(payload.tobytes())


def write_esp_coeffs(path, c) -> None:
    """Write an (L, N, N) tensor; values are stored as complex64."""
    c = np.asarray(c)
    if c.ndim != 3 or c.shape[1] != c.shape[2]:
        raise ValueError(f"expected an (L, N, N) tensor, got shape {c.shape}")
    _write(path, ESP_MAGIC, c.shape[0], c.shape[1], c)


def write_stft_coeffs(path, c) -> None:
    """Write a (frame_count, window_length) matrix, flattened."""
    c = np.asarray(c)
    if c.ndim != 2:
        raise ValueError(f"expected a 2-D STFT matrix, got shape {c.shape}")
    _write(path, STFT_MAGIC, 1, c.size, c.ravel())


def read_coeff_tensor(path) -> tuple:
    """Read a tensor file; returns (data, magic string).

    ESPC data comes back shaped (L, N, N); STFC comes back flat.
    """
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, dim0, dim1 = _HEADER.unpack(header)
        if magic not in (ESP_MAGIC, STFT_MAGIC):
            raise ValueError(f"{path}: unknown magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        count = dim0 * dim1 * (dim1 if magic == ESP_MAGIC else 1)
        data = np.frombuffer(fh.read(), dtype="<c8")
        if data.size != count:
            raise ValueError(f"{path}: expected {count} values, found {data.size}")
    if magic == ESP_MAGIC:
        data = data.reshape(dim0, dim1, dim1)
    return data.copy(), magic.decode("ascii")


def read_stft_coeffs(path, window_length: int = 128) -> np.ndarray:
    """Read an STFC file back into its (frame_count, window_length) shape."""
    data, magic = read_coeff_tensor(path)
    if magic != STFT_MAGIC.decode("ascii"):
        raise ValueError(f"{path}: not an STFT coefficient file")
    if data.size % int(window_length):
        raise ValueError(
            f"{path}: {data.size} values do not factor over window length {window_length}"
        )
    return data.reshape(-1, int(window_length))


def write_mip_csv(path, image: MipImage) -> None:
    """dB matrix as CSV, 4 decimal places, one envelope per row."""
    with open(path, "w", newline="") as fh:
        for row in np.atleast_2d(image.values):
            fh.write(",".join(f"{v:.4f}" for v in row) + "\n")


def write_mip_png(path, image: MipImage) -> None:
    """8-bit grayscale PNG: floor_db maps to 0, 0 dB maps to 255."""
    values = np.atleast_2d(image.values)
    scaled = (values - image.floor_db) / (0.0 - image.floor_db)
    pixels = np.round(255.0 * np.clip(scaled, 0.0, 1.0)).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path, format="PNG")


def write_history_csv(path, result) -> None:
    """Solve histories as CSV: iteration, residual, objective."""
    residuals = np.asarray(result.residual_history, dtype=float)
    objectives = np.asarray(result.objective_history, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write("iteration,residual,objective\n")
        for i, (r, o) in enumerate(zip(residuals, objectives), 1):
            fh.write(f"{i},{r:.17g},{o:.17g}\n")
