"""Shared test helpers."""

from functools import lru_cache

import numpy as np
import pytest


def _interp_weights(axis: np.ndarray, m: int) -> np.ndarray:
    """(len(axis), m+1) matrix of 1-D linear interpolation weights."""
    scaled = axis * m
    cell = np.minimum(scaled.astype(np.int64), m - 1)
    frac = scaled - cell
    w = np.zeros((axis.size, m + 1))
    rows = np.arange(axis.size)
    w[rows, cell] = 1.0 - frac
    w[rows, cell + 1] += frac
    return w


def dense_sup_search(grid) -> float:
    """Brute-force sup of |multilinear extension - product| over a dense grid.

    Axis points are the 1/200 lattice united with the partition nodes, so the
    box vertices are visited; interpolation is done by separable tensor
    contractions, an evaluation route independent of the vertex-enumeration
    shortcut under test.  The max is invariant under the axis permutations
    the contraction order introduces because all axes share one point set.
    """
    m, d = grid.m, grid.d
    axis, w, product = _dense_grid_pieces(m, d)
    values = np.asarray(grid.t)
    for _ in range(d):
        values = np.tensordot(w, values, axes=(1, values.ndim - 1))
    return float(np.abs(values - product).max())


@lru_cache(maxsize=8)
def _dense_grid_pieces(m: int, d: int):
    axis = np.union1d(np.linspace(0.0, 1.0, 201), np.arange(m + 1) / m)
    w = _interp_weights(axis, m)
    product = axis
    for _ in range(d - 1):
        product = np.multiply.outer(product, axis)
    return axis, w, product


def random_count_grid(rng: np.random.Generator, m: int, d: int, n: int):
    """SubcopulaGrid of a random frequency tensor built from permutations."""
    from checkerdep import frequency_tensor, subcopula_grid
    from checkerdep.estimator import PseudoSample

    ranks = np.column_stack([rng.permutation(n) + 1 for _ in range(d)])
    return subcopula_grid(frequency_tensor(PseudoSample(ranks), m))


@pytest.fixture
def sup_oracle():
    return dense_sup_search


@pytest.fixture
def grid_factory():
    return random_count_grid
