"""Subset-lattice primitives shared by every module.

Points of {0,1}^n are encoded as integers in [0, 2^n); bit i (least
significant first) carries coordinate x_i.  A point is identified with the
subset of [n] it supports, so the same integer encoding indexes truth
tables, Fourier coefficients and subset sums.

All O(n*2^n) operators here are per-coordinate 2x2 kernels applied stage by
stage ("butterflies").  A stage pairs up the two points that differ only in
coordinate i; for tables with leading batch axes the kernel is applied along
the last axis.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def coordinate_pairs(values: np.ndarray, i: int) -> np.ndarray:
    """View of ``values`` with shape (..., blocks, 2, 2**i); axis -2 is bit i."""
    return values.reshape(values.shape[:-1] + (-1, 2, 1 << i))


def working_copy(table) -> np.ndarray:
    """Contiguous floating copy of a table for in-place kernel passes.

    float64 by default; an extended-precision input keeps its dtype, so
    ill-conditioned compositions (the inverse noise kernel at small
    retention has norm (2/rho - 1)^n) can be driven at higher precision
    through the same code path.
    """
    arr = np.asarray(table)
    if arr.dtype.kind == "f" and arr.dtype.itemsize >= 8:
        return np.array(arr)
    return np.array(arr, dtype=np.float64)


def apply_kernel(values: np.ndarray, n: int, kernel: np.ndarray,
                 coords=None) -> np.ndarray:
    """Apply a 2x2 kernel along each coordinate of the last axis, in place.

    kernel = [[k00, k01], [k10, k11]] maps the pair (a, b) = (value at
    x_i = 0, value at x_i = 1) to (k00*a + k01*b, k10*a + k11*b).
    """
    k00, k01 = kernel[0]
    k10, k11 = kernel[1]
    for i in range(n) if coords is None else coords:
        w = coordinate_pairs(values, i)
        a = w[..., 0, :]
        b = w[..., 1, :]
        if k00 == 1.0 and k01 == 0.0:
            # lower row leaves a untouched; update b from the live view
            w[..., 1, :] = k10 * a + k11 * b
        else:
            a0 = a.copy()
            w[..., 0, :] = k00 * a0 + k01 * b
            w[..., 1, :] = k10 * a0 + k11 * b
    return values


def zeta_subsets(values: np.ndarray, n: int) -> np.ndarray:
    """In place: out(S) = sum over A a subset of S of in(A)."""
    return apply_kernel(values, n, np.array([[1.0, 0.0], [1.0, 1.0]]))


def mobius_subsets(values: np.ndarray, n: int) -> np.ndarray:
    """In place inverse of :func:`zeta_subsets`: alternating subset sums."""
    return apply_kernel(values, n, np.array([[1.0, 0.0], [-1.0, 1.0]]))


def zeta_supersets(values: np.ndarray, n: int) -> np.ndarray:
    """In place: out(S) = sum over B a superset of S of in(B)."""
    return apply_kernel(values, n, np.array([[1.0, 1.0], [0.0, 1.0]]))


@lru_cache(maxsize=32)
def popcounts(n: int) -> np.ndarray:
    """Hamming weight of every point index, as a read-only uint8 array."""
    pc = np.zeros(1 << n, dtype=np.uint8)
    for i in range(n):
        pc[1 << i: 1 << (i + 1)] = pc[: 1 << i] + 1
    pc.flags.writeable = False
    return pc


def measure_weights(n: int, p: float) -> np.ndarray:
    """Product-measure weights: weight(x) = p^|x| * (1-p)^(n-|x|)."""
    k = np.arange(n + 1, dtype=np.float64)
    by_weight = p ** k * (1.0 - p) ** (n - k)
    return by_weight[popcounts(n)]


def index_bits(n: int, codes: np.ndarray | None = None) -> np.ndarray:
    """Coordinate matrix: bit i of each code, shape (len(codes), n), uint8."""
    if codes is None:
        codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)[None, :]) & 1).astype(np.uint8)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Inverse of :func:`index_bits`: rows of coordinates to integer codes."""
    n = bits.shape[-1]
    return bits.astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))


def subset_mask(n: int, coords) -> int:
    mask = 0
    for i in coords:
        if not 0 <= i < n:
            raise ValueError(f"coordinate {i} outside [0, {n})")
        mask |= 1 << i
    return mask
