"""Cautionary data-mining experiment: how large the maximum spurious
correlation gets in a pure-noise pseudo ensemble.

Filling a members x outputs matrix with independent standard Normals and
scanning for the largest absolute column correlation routinely turns up
values far above any plausible screening threshold, which is the argument
against mining ensembles for constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["MiningConfig", "MiningResult", "correlation_mining_demo"]

HIST_BINS = 80
_BLOCK = 512


@dataclass(frozen=True)
class MiningConfig:
    members: int = 43
    outputs: int = 10000
    mode: str = "one_vs_rest"
    seed: int = 0
    inject_duplicate: bool = False

    def __post_init__(self):
        if self.members < 3:
            raise DomainError(f"members must be >= 3, got {self.members}")
        if self.outputs < 2:
            raise DomainError(f"outputs must be >= 2, got {self.outputs}")
        if self.mode not in ("one_vs_rest", "all_pairs"):
            raise DomainError(
                f"mode must be one_vs_rest|all_pairs, got {self.mode!r}")


@dataclass(frozen=True)
class MiningResult:
    max_abs_corr: float
    argmax: tuple[int, int]
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray
    mode: str

    def to_json_dict(self) -> dict:
        return {
            "max_abs_corr": self.max_abs_corr,
            "argmax": list(self.argmax),
            "histogram": {"edges": [float(v) for v in self.histogram_edges],
                          "counts": [int(v) for v in self.histogram_counts]},
            "mode": self.mode,
        }


def _matrix(cfg: MiningConfig) -> np.ndarray:
    gen = np.random.default_rng(cfg.seed)
    data = gen.standard_normal((cfg.members, cfg.outputs))
    if cfg.inject_duplicate:
        data[:, 1] = data[:, 0]
    return data


def _standardize(data: np.ndarray) -> np.ndarray:
    centered = data - data.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    if np.any(norms == 0.0):
        raise DomainError("a generated column is constant; increase members")
    return centered / norms


def _refined_corr(data: np.ndarray, i: int, j: int) -> float:
    """Recompute one correlation carefully; exact duplicates give exactly 1.

    The blocked BLAS scan locates the argmax with float noise; columns that
    are elementwise identical (or opposite) must still report a correlation
    of exactly +-1, so the winning pair is re-evaluated.
    """
    a = data[:, i] - data[:, i].mean()
    b = data[:, j] - data[:, j].mean()
    if np.array_equal(a, b) or np.array_equal(a, -b):
        return 1.0
    val = abs(float(a @ b) / math.sqrt(float(a @ a) * float(b @ b)))
    return min(val, 1.0)


def correlation_mining_demo(cfg: MiningConfig) -> MiningResult:
    """Maximum absolute column correlation in a pure-noise matrix.

    ``one_vs_rest`` treats column 0 as the response and scans the rest;
    ``all_pairs`` scans every column pair, blocked so memory stays bounded
    and the Gram products go through BLAS.
    """
    data = _matrix(cfg)
    z = _standardize(data)
    edges = np.linspace(-1.0, 1.0, HIST_BINS + 1)
    counts = np.zeros(HIST_BINS, dtype=np.int64)

    if cfg.mode == "one_vs_rest":
        corr = z[:, 1:].T @ z[:, 0]
        counts += np.histogram(np.clip(corr, -1.0, 1.0), bins=edges)[0]
        j = 1 + int(np.argmax(np.abs(corr)))
        return MiningResult(_refined_corr(data, 0, j), (0, j), edges, counts,
                            cfg.mode)

    best = -1.0
    best_pair = (0, 1)
    p = cfg.outputs
    for start in range(0, p, _BLOCK):
        stop = min(start + _BLOCK, p)
        gram = z[:, start:stop].T @ z[:, start:]  # rows i in [start,stop), cols j>=start
        # keep strictly upper-triangular pairs (j > i)
        for local_i in range(stop - start):
            gram[local_i, :local_i + 1] = np.nan
        flat = gram[np.isfinite(gram)]
        counts += np.histogram(np.clip(flat, -1.0, 1.0), bins=edges)[0]
        a = np.abs(gram)
        a[~np.isfinite(a)] = -1.0
        local = np.unravel_index(np.argmax(a), a.shape)
        val = float(a[local])
        if val > best:
            best = val
            best_pair = (start + int(local[0]), start + int(local[1]))
    return MiningResult(_refined_corr(data, *best_pair), best_pair, edges,
                        counts, cfg.mode)
