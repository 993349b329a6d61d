"""NumPy implementation of the per-replication statistics kernel.

Computes, from an (n, d) matrix of ranks, the four discrepancies of the
order-m sample copula against the independence reference: total variation,
Hellinger, Kullback-Leibler (densities vs the uniform density) and the
supremum distance (grid maximum of |T - product|, exact by per-box
multilinearity).  Semantics must match ``_ckernels`` exactly; keep the two
in sync.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def backend_name() -> str:
    return "python"


@lru_cache(maxsize=32)
def _product_grid_flat(m: int, d: int) -> np.ndarray:
    axis = np.arange(m + 1) / m
    t = axis
    for _ in range(d - 1):
        t = np.multiply.outer(t, axis)
    t = t.reshape(-1)
    t.flags.writeable = False
    return t


def _box_counts(ranks: np.ndarray, m: int) -> np.ndarray:
    n, d = ranks.shape
    boxes = (ranks * m + (n - 1)) // n - 1
    flat = boxes[:, 0]
    for j in range(1, d):
        flat = flat * m + boxes[:, j]
    return np.bincount(flat, minlength=m**d)


def stats_for_order(ranks: np.ndarray, m: int) -> tuple[float, float, float, float]:
    """(tv, hellinger, kl, sup) of the order-m sample copula vs independence."""
    ranks = np.ascontiguousarray(ranks, dtype=np.int64)
    n, d = ranks.shape
    counts = _box_counts(ranks, m)
    md = float(m**d)
    f = counts * (md / n)
    tv = 0.5 * np.abs(f - 1.0).sum() / md
    hel = np.sqrt(0.5 * ((np.sqrt(f) - 1.0) ** 2).sum() / md)
    pos = f[f > 0]
    kl = float((pos * np.log(pos)).sum() / md)
    cum = counts.reshape((m,) * d)
    for axis in range(d):
        cum = np.cumsum(cum, axis=axis)
    cum = np.pad(cum, [(1, 0)] * d)
    sup = float(np.abs(cum.reshape(-1) / n - _product_grid_flat(m, d)).max())
    return float(tv), float(hel), kl, sup


def eta_profile(ranks: np.ndarray) -> np.ndarray:
    """[tv, hellinger, kl, sup] at order 2 then order 3, as a length-8 array."""
    ranks = np.ascontiguousarray(ranks, dtype=np.int64)
    out = np.empty(8)
    out[:4] = stats_for_order(ranks, 2)
    out[4:] = stats_for_order(ranks, 3)
    return out
