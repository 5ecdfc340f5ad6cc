from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConfigError


class Method(str, enum.Enum):
    NOPE = "nope"
    APE = "ape"
    SIN = "sin"
    ROPE = "rope"
    RPE = "rpe"
    ALIBI = "alibi"
    LAPLACIAN = "laplacian"
    RWSE = "rwse"
    SPD = "spd"
    DACT = "dact_cpe"
    CYCLEFORMER = "cycleformer"
    IPE = "ipe"
    XPE = "xpe"
    IPE_XPE = "ipe+xpe"

    @classmethod
    def parse(cls, value: "str | Method") -> "Method":
        if isinstance(value, Method):
            return value
        key = str(value).strip().lower()
        aliases = {"dact": "dact_cpe", "dactcpe": "dact_cpe", "lap": "laplacian",
                   "ipeplusxpe": "ipe+xpe", "ipe_xpe": "ipe+xpe", "no_pe": "nope", "none": "nope"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ConfigError(f"unknown PE method {value!r}") from None


BIAS_METHODS = frozenset({Method.RPE, Method.ALIBI, Method.SPD})

_DEFAULT_BANDS = {Method.XPE: 4, Method.IPE_XPE: 4, Method.LAPLACIAN: 8, Method.RWSE: 8}


@dataclass(frozen=True)
class PEConfig:
    """Encoding settings.

    ``bands`` is the XPE band count for xpe / ipe+xpe and the eigenvector or
    walk-length count for laplacian / rwse; ``ipe_bands`` is the number of
    sine-cosine bands IPE uses in ``integer_harmonic`` mode.
    """

    method: Method | str = Method.IPE
    dim: int = 128
    direction: str = "invariant"
    freq_mode: str = "integer_harmonic"
    bands: int | None = None
    ipe_bands: int = 2
    lam: float = 10000.0
    rpe_window: int = 16
    heads: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if self.dim <= 0 or self.dim % 2:
            raise ConfigError("dim must be a positive even integer")
        if self.direction not in ("aware", "invariant"):
            raise ConfigError(f"direction must be 'aware' or 'invariant', got {self.direction!r}")
        mode = {"integer": "integer_harmonic", "geometric": "paper_geometric"}.get(self.freq_mode, self.freq_mode)
        if mode not in ("integer_harmonic", "paper_geometric"):
            raise ConfigError(f"unknown freq_mode {self.freq_mode!r}")
        object.__setattr__(self, "freq_mode", mode)
        if self.bands is None:
            object.__setattr__(self, "bands", _DEFAULT_BANDS.get(self.method, 4))
        if self.bands < 1 or self.ipe_bands < 1:
            raise ConfigError("band counts must be positive")
        if self.method in (Method.XPE, Method.IPE_XPE) and 2 * self.bands > self.dim:
            raise ConfigError("XPE needs 2 * bands <= dim")
        if 2 * self.ipe_bands > self.dim:
            raise ConfigError("IPE needs 2 * ipe_bands <= dim")
        if self.rpe_window < 0 or self.heads < 1:
            raise ConfigError("rpe_window must be >= 0 and heads >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        return d


@dataclass
class Embedding:
    """Per-node vectors (row = node id, row 0 = depot) and an optional bias.

    ``active`` marks nodes present in the encoded solution; inactive rows
    (unserved PCVRP customers) are zero.
    """

    vectors: np.ndarray
    bias: np.ndarray | None = None
    active: np.ndarray | None = None
    method: str = ""
    config: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("embedding contains non-finite values")
        if self.active is None:
            self.active = np.ones(len(self.vectors), dtype=bool)
