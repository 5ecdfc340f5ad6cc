"""Positional encodings of routing solutions.

``encode`` dispatches on ``PEConfig.method`` and returns one row per node id
(row 0 = depot). Bias-type methods (RPE, ALiBi, SPD) also return the bias
matrix and use its rows as their vectors.
"""

from __future__ import annotations

import numpy as np

from ..core import Instance, Solution
from ..errors import ConfigError
from . import bias as _bias
from . import geometric, graph, index
from .config import BIAS_METHODS, Embedding, Method, PEConfig
from .geometric import concat_pe, encode_ipe, encode_xpe, ipe_rows
from .index import encode_ape, encode_cycleformer, encode_dact_cpe, encode_rope, encode_sin, gray
from .layout import solution_layout, stream

ALL_METHODS = tuple(Method)

__all__ = ["ALL_METHODS", "BIAS_METHODS", "Embedding", "Method", "PEConfig", "concat_pe", "encode",
           "encode_ape", "encode_cycleformer", "encode_dact_cpe", "encode_ipe", "encode_rope",
           "encode_sin", "encode_xpe", "gray"]


def encode(inst: Instance, sol: Solution, cfg: PEConfig) -> Embedding:
    method = Method.parse(cfg.method)
    lay = solution_layout(inst, sol)
    D = cfg.dim
    i, L = lay.index, np.maximum(lay.length, 1)
    bias = None
    meta: dict = {}

    if method is Method.NOPE:
        vec = np.zeros((inst.n_nodes, D))
    elif method is Method.APE:
        vec = encode_ape(i, D, cfg.seed)
    elif method is Method.SIN:
        vec = encode_sin(i, D, cfg.lam)
    elif method is Method.ROPE:
        vec = encode_rope(i, D, cfg.lam)
    elif method is Method.DACT:
        vec = encode_dact_cpe(i, L, D, cfg.seed)
    elif method is Method.CYCLEFORMER:
        vec = encode_cycleformer(i, L, D, cfg.lam)
    elif method is Method.RPE:
        bias = _bias.bias_rpe(i, cfg.rpe_window, cfg.seed)
    elif method is Method.ALIBI:
        bias = _bias.bias_alibi(i, cfg.heads)
    elif method is Method.SPD:
        bias = _bias.bias_spd(inst, sol, cfg.seed)
    elif method is Method.LAPLACIAN:
        signs = stream(cfg.seed, inst, "laplacian").choice([-1.0, 1.0], size=cfg.bands)
        meta["sign_flips"] = signs.tolist()
        lap = graph.laplacian_pe(graph.route_adjacency(inst, sol), cfg.bands, signs, inst.name)
        vec = _pad(lap, D)
    elif method is Method.RWSE:
        vec = _pad(graph.rwse(graph.route_adjacency(inst, sol), cfg.bands), D)
    elif method is Method.IPE:
        vec = ipe_rows(inst, sol, cfg)
    elif method is Method.XPE:
        vec = encode_xpe(inst, cfg)
    elif method is Method.IPE_XPE:
        vec = np.hstack([ipe_rows(inst, sol, cfg), encode_xpe(inst, cfg)])
    else:  # pragma: no cover - Method.parse rejects unknown tags
        raise ConfigError(f"unsupported method {method}")

    if bias is not None:
        inactive = ~lay.active
        bias[inactive, :] = 0.0
        bias[:, inactive] = 0.0
        vec = bias.copy()
    vec = np.array(vec, dtype=float)
    vec[~lay.active] = 0.0
    return Embedding(vec, bias, lay.active.copy(), method.value, cfg.to_dict(), meta)


def _pad(a: np.ndarray, width: int) -> np.ndarray:
    if a.shape[1] >= width:
        return a[:, :width]
    return np.hstack([a, np.zeros((a.shape[0], width - a.shape[1]))])
