"""Encoders of the integer within-route index: APE, SIN, RoPE, DACT CPE, CycleFormer."""

from __future__ import annotations

import numpy as np

from .layout import stream

GRAY_BITS = 16


def geometric_freqs(dim: int, lam: float = 10000.0) -> np.ndarray:
    """omega_k = lam ** (-2k / dim) for k = 0 .. dim/2 - 1."""
    k = np.arange(dim // 2)
    return lam ** (-2.0 * k / dim)


def _interleave(angles: np.ndarray) -> np.ndarray:
    """(..., K) angles -> (..., 2K) with channels [sin, cos] per band."""
    out = np.empty(angles.shape[:-1] + (2 * angles.shape[-1],))
    out[..., 0::2] = np.sin(angles)
    out[..., 1::2] = np.cos(angles)
    return out


def encode_sin(i, dim: int, lam: float = 10000.0) -> np.ndarray:
    i = np.asarray(i, dtype=float)
    return _interleave(i[..., None] * geometric_freqs(dim, lam))


def ape_table(rows: int, dim: int, seed: int) -> np.ndarray:
    """Untrained lookup table with unit-variance normal entries.

    Rows are drawn sequentially, so row ``i`` does not depend on ``rows``.
    """
    return stream(seed, None, "ape").standard_normal((rows, dim))


def encode_ape(i, dim: int, seed: int) -> np.ndarray:
    i = np.asarray(i, dtype=np.int64)
    table = ape_table(int(i.max()) + 1 if i.size else 1, dim, seed)
    return table[i]


def rope_reference(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / np.sqrt(dim))


def encode_rope(i, dim: int, lam: float = 10000.0, ref: np.ndarray | None = None) -> np.ndarray:
    """Rotate a fixed reference query pair-wise by theta = i * omega_k."""
    q = rope_reference(dim) if ref is None else np.asarray(ref, dtype=float)
    i = np.asarray(i, dtype=float)
    theta = i[..., None] * geometric_freqs(dim, lam)
    c, s = np.cos(theta), np.sin(theta)
    x, y = q[0::2], q[1::2]
    out = np.empty(theta.shape[:-1] + (dim,))
    out[..., 0::2] = x * c - y * s
    out[..., 1::2] = x * s + y * c
    return out


def gray(i):
    """Reflected binary Gray code."""
    i = np.asarray(i, dtype=np.int64)
    return i ^ (i >> 1)


def gray_bits(i, L, bits: int = GRAY_BITS) -> np.ndarray:
    """Bits (as +-1) of Gray(i mod L), least significant first."""
    g = gray(np.asarray(i, dtype=np.int64) % np.asarray(L, dtype=np.int64))
    b = (g[..., None] >> np.arange(bits)) & 1
    return 2.0 * b - 1.0


def dact_projection(dim: int, seed: int, bits: int = GRAY_BITS) -> np.ndarray:
    return stream(seed, None, "dact").standard_normal((bits, dim))


def encode_dact_cpe(i, L, dim: int, seed: int) -> np.ndarray:
    return gray_bits(i, L) @ dact_projection(dim, seed)


def encode_cycleformer(i, L, dim: int, lam: float = 10000.0) -> np.ndarray:
    """sin/cos(2 pi (i mod L) / L * omega_k) with the SIN frequency schedule."""
    i = np.asarray(i, dtype=np.int64)
    L = np.asarray(L, dtype=np.int64)
    phase = 2.0 * np.pi * (i % L) / L
    return _interleave(phase[..., None] * geometric_freqs(dim, lam))
