"""Distance-indexed in-route encoding (IPE) and depot-angle cross-route encoding (XPE)."""

from __future__ import annotations

import numpy as np

from ..core import Instance, Solution, cumulative_distances, depot_angles
from ..errors import DegenerateRouteError
from .config import PEConfig
from .layout import solution_layout, stream


def ipe_frequencies(cfg: PEConfig) -> np.ndarray:
    """Angular frequencies of the active IPE bands.

    ``integer_harmonic``: 2^k for the sine-cosine bands (aware) or twice as
    many cosine bands (invariant). ``paper_geometric``: lam^(-2k/D) over D/2
    bands (aware) or lam^(-k/D) over D cosine bands (invariant).
    """
    D = cfg.dim
    if cfg.freq_mode == "integer_harmonic":
        n = cfg.ipe_bands if cfg.direction == "aware" else 2 * cfg.ipe_bands
        return 2.0 ** np.arange(n)
    if cfg.direction == "aware":
        return cfg.lam ** (-2.0 * np.arange(D // 2) / D)
    return cfg.lam ** (-1.0 * np.arange(D) / D)


def ipe_from_fraction(frac: np.ndarray, cfg: PEConfig) -> np.ndarray:
    """IPE rows for route fractions ``d_i / d_L`` in [0, 1]."""
    frac = np.asarray(frac, dtype=float)
    omega = ipe_frequencies(cfg)
    if cfg.freq_mode == "integer_harmonic":
        # omega is a power of two, so omega * frac is exact and the period
        # can be removed before scaling by 2 pi: the endpoints match exactly
        angle = 2.0 * np.pi * np.mod(frac[:, None] * omega, 1.0)
    else:
        angle = 2.0 * np.pi * frac[:, None] * omega
    out = np.zeros((len(frac), cfg.dim))
    if cfg.direction == "aware":
        k = len(omega)
        out[:, 0:2 * k:2] = np.sin(angle)
        out[:, 1:2 * k:2] = np.cos(angle)
    else:
        out[:, :len(omega)] = np.cos(angle)
    return out


def encode_ipe(inst: Instance, route, cfg: PEConfig) -> np.ndarray:
    """IPE rows for every position of ``route`` (both depot endpoints included)."""
    d = cumulative_distances(inst, route)
    total = d[-1]
    if not total > 0:
        raise DegenerateRouteError(f"route {list(route)} has zero length")
    frac = d / total
    frac[-1] = 1.0
    return ipe_from_fraction(frac, cfg)


def xpe_from_angles(theta: np.ndarray, cfg: PEConfig, degenerate: np.ndarray | None = None) -> np.ndarray:
    K = cfg.bands
    ang = np.asarray(theta, dtype=float)[:, None] * (2.0 ** np.arange(K))
    out = np.zeros((len(ang), cfg.dim))
    out[:, 0:2 * K:2] = np.sin(ang)
    out[:, 1:2 * K:2] = np.cos(ang)
    if degenerate is not None:
        out[degenerate] = 0.0
    return out


def encode_xpe(inst: Instance, cfg: PEConfig) -> np.ndarray:
    """XPE row per node; the depot (and any customer on it) is zero."""
    theta, degenerate = depot_angles(inst)
    return xpe_from_angles(theta, cfg, degenerate)


def ipe_rows(inst: Instance, sol: Solution, cfg: PEConfig) -> np.ndarray:
    """IPE row per node id; depot carries the phase-0 row, unserved nodes zero."""
    out = np.zeros((inst.n_nodes, cfg.dim))
    out[0] = ipe_from_fraction(np.zeros(1), cfg)[0]
    for r in sol.routes:
        if len(r) <= 2:
            continue
        rows = encode_ipe(inst, r, cfg)
        out[r[1:-1]] = rows[1:-1]
    return out


def concat_pe(inst: Instance, sol: Solution, cfg: PEConfig, project_to: int | None = None) -> np.ndarray:
    """Per node ``[x_v | IPE | XPE]``; optional seeded random linear projection."""
    layout = solution_layout(inst, sol)
    feats = np.hstack([inst.coords, ipe_rows(inst, sol, cfg), encode_xpe(inst, cfg)])
    feats[~layout.active, 2:] = 0.0
    if project_to is None:
        return feats
    W = stream(cfg.seed, None, "concat").standard_normal((feats.shape[1], project_to))
    return feats @ W / np.sqrt(feats.shape[1])
