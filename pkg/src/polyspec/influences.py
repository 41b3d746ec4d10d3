"""Influence measures, sensitivity, degree, shifting and junta projection.

Conventions.  The influence of coordinate i is the mu_p mean of the squared
change under flipping x_i; the negative influence is the mu_p mean of
max(0, f at x_i = 0 minus f at x_i = 1).  In both the integrand does not
depend on x_i itself, so the weight of an i-edge is the product measure of
the remaining n-1 coordinates (the value on the resampled coordinate is
immaterial; this pins down the convention left implicit by the definition
in terms of a full-point expectation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import AnyFunction, BooleanFunction, BoundedFunction
from .fourier import transform_table
from .lattice import measure_weights, popcounts


def _edge_slices(table: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    t = table.reshape(-1, 2, 1 << i)
    return t[:, 0, :].reshape(-1), t[:, 1, :].reshape(-1)


def influence(f: AnyFunction, i: int, p: float) -> float:
    """Mean squared change of f when coordinate i is flipped, under mu_p."""
    if not 0 <= i < f.n:
        raise ValueError(f"coordinate {i} outside [0, {f.n})")
    lo, hi = _edge_slices(f.table.astype(np.float64), i)
    w = measure_weights(f.n - 1, p)
    return float(w @ (hi - lo) ** 2)


def negative_influence(f: AnyFunction, i: int, p: float) -> float:
    """Mean positive part of the drop when coordinate i goes from 0 to 1."""
    if not 0 <= i < f.n:
        raise ValueError(f"coordinate {i} outside [0, {f.n})")
    lo, hi = _edge_slices(f.table.astype(np.float64), i)
    w = measure_weights(f.n - 1, p)
    return float(w @ np.maximum(lo - hi, 0.0))


def is_monotone(f: AnyFunction) -> bool:
    """Exhaustive edge check: no coordinate raise may decrease the value."""
    table = f.table.astype(np.float64)
    for i in range(f.n):
        lo, hi = _edge_slices(table, i)
        if np.any(lo > hi):
            return False
    return True


def sensitivity(f: BooleanFunction) -> int:
    """Max over points of the number of value-flipping coordinate flips."""
    table = f.table
    counts = np.zeros(1 << f.n, dtype=np.int32)
    idx = np.arange(1 << f.n)
    for i in range(f.n):
        counts += table != table[idx ^ (1 << i)]
    return int(counts.max(initial=0))


def degree(f: BooleanFunction, tol: float = 1e-9, cross_check: bool = True) -> int:
    """Largest |S| carrying a nonzero Fourier coefficient.

    Computed from the bias-1/2 spectrum with a zero threshold; the result is
    independent of the bias, which is re-verified at bias 1/3 unless
    disabled.
    """
    def deg_at(p: float) -> int:
        coeffs = transform_table(f.table, f.n, p)
        live = np.abs(coeffs) > tol
        return int(popcounts(f.n)[live].max(initial=0))

    d = deg_at(0.5)
    if cross_check and deg_at(1.0 / 3.0) != d:
        raise ArithmeticError("degree disagrees across biases; raise the threshold")
    return d


@dataclass(frozen=True)
class InfluenceProfile:
    """Per-coordinate influence summary of one function at one bias."""

    p: float
    influences: tuple[float, ...]
    negative_influences: tuple[float, ...]
    max_sensitivity: int | None = None
    degree: int | None = None
    monotone: bool = field(default=False)

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "influences": list(self.influences),
            "negative_influences": list(self.negative_influences),
            "max_sensitivity": self.max_sensitivity,
            "degree": self.degree,
            "monotone": self.monotone,
        }


def influence_profile(f: AnyFunction, p: float) -> InfluenceProfile:
    infl = tuple(influence(f, i, p) for i in range(f.n))
    neg = tuple(negative_influence(f, i, p) for i in range(f.n))
    s = d = None
    if isinstance(f, BooleanFunction):
        s = sensitivity(f)
        d = degree(f)
    return InfluenceProfile(p=p, influences=infl, negative_influences=neg,
                            max_sensitivity=s, degree=d, monotone=is_monotone(f))


def shift(f: AnyFunction, i: int) -> AnyFunction:
    """Sort every i-edge: min goes to x_i = 0, max to x_i = 1."""
    if not 0 <= i < f.n:
        raise ValueError(f"coordinate {i} outside [0, {f.n})")
    table = f.table.astype(np.float64).copy()
    t = table.reshape(-1, 2, 1 << i)
    lo = np.minimum(t[:, 0, :], t[:, 1, :])
    hi = np.maximum(t[:, 0, :], t[:, 1, :])
    t[:, 0, :] = lo
    t[:, 1, :] = hi
    if isinstance(f, BooleanFunction):
        return BooleanFunction(f.n, table.astype(np.uint8))
    return BoundedFunction(f.n, table)


def monotonize(f: AnyFunction) -> AnyFunction:
    """Shift every coordinate in turn; the result is monotone.

    Each stage moves the function by at most its own negative influence in
    L1, so the total displacement is controlled by the largest negative
    influence of f (up to the ((1-p)p)^(-n) * n blow-up of the aggregate
    bound).
    """
    out = f
    for i in range(f.n):
        out = shift(out, i)
    return out


def junta_project(f: AnyFunction, coords, p: float,
                  rounding: bool = False) -> AnyFunction:
    """Average f over the coordinates outside ``coords`` under mu_p.

    The output lives on the full n coordinates but depends only on
    ``coords`` (the L2-closest such function).  With rounding, threshold at
    1/2 to a Boolean function.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"bias p must lie in (0,1), got {p}")
    keep = set(coords)
    if any(i >= f.n or i < 0 for i in keep):
        raise ValueError("junta coordinates outside [0, n)")
    table = f.table.astype(np.float64).copy()
    for j in range(f.n):
        if j in keep:
            continue
        t = table.reshape(-1, 2, 1 << j)
        avg = (1.0 - p) * t[:, 0, :] + p * t[:, 1, :]
        t[:, 0, :] = avg
        t[:, 1, :] = avg
    if rounding:
        return BooleanFunction(f.n, (table >= 0.5).astype(np.uint8))
    return BoundedFunction(f.n, table)


def high_influence_coordinates(f: AnyFunction, p: float, tau: float) -> list[int]:
    """Coordinates whose influence reaches tau; the junta candidate set."""
    return [i for i in range(f.n) if influence(f, i, p) >= tau]


def sensitivity_degree_gap(f: BooleanFunction) -> float:
    """s(f) - sqrt(deg f); nonnegative for every Boolean function."""
    return sensitivity(f) - math.sqrt(degree(f))
