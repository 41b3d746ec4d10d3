"""Boolean and bounded functions on the hypercube, with p-biased averaging.

Truth tables are dense numpy arrays indexed by the integer point encoding of
:mod:`polyspec.lattice` (bit i of the index = coordinate x_i).  Instances are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .lattice import measure_weights

MAX_N_BOOLEAN = 24   # 16 MiB dense table
MAX_N_BOUNDED = 20   # 8 MiB of doubles
VALUE_TOL = 1e-12    # slack accepted on [0,1] bounds at construction


class BooleanFunction:
    """A function {0,1}^n -> {0,1} stored as a dense truth table."""

    __slots__ = ("n", "_table")

    def __init__(self, n: int, table):
        if not 0 <= n <= MAX_N_BOOLEAN:
            raise ValueError(f"dimension {n} outside [0, {MAX_N_BOOLEAN}]")
        arr = np.asarray(table)
        if arr.shape != (1 << n,):
            raise ValueError(f"table has shape {arr.shape}, expected ({1 << n},)")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("Boolean table entries must be 0 or 1")
        self.n = n
        self._table = np.ascontiguousarray(arr, dtype=np.uint8)
        self._table.flags.writeable = False

    @property
    def table(self) -> np.ndarray:
        return self._table

    def values(self) -> np.ndarray:
        """Truth table as float64 (fresh writable copy)."""
        return self._table.astype(np.float64)

    @property
    def bits_hex(self) -> str:
        """Truth table packed 8 points per byte, point index = bit position."""
        return np.packbits(self._table, bitorder="little").tobytes().hex()

    @classmethod
    def from_bits_hex(cls, n: int, bits_hex: str) -> "BooleanFunction":
        raw = np.frombuffer(bytes.fromhex(bits_hex), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits.size < (1 << n):
            raise ValueError("hex string too short for dimension")
        return cls(n, bits[: 1 << n])

    def __eq__(self, other) -> bool:
        return (isinstance(other, BooleanFunction) and self.n == other.n
                and np.array_equal(self._table, other._table))

    def __hash__(self) -> int:
        return hash((self.n, self._table.tobytes()))

    def __repr__(self) -> str:
        if self.n <= 4:
            return f"BooleanFunction(n={self.n}, table={self._table.tolist()})"
        return f"BooleanFunction(n={self.n}, bits_hex='{self.bits_hex[:16]}...')"


class BoundedFunction:
    """A function {0,1}^n -> [0,1] stored as a dense table of doubles."""

    __slots__ = ("n", "_table")

    def __init__(self, n: int, table):
        if not 0 <= n <= MAX_N_BOUNDED:
            raise ValueError(f"dimension {n} outside [0, {MAX_N_BOUNDED}]")
        arr = np.asarray(table, dtype=np.float64)
        if arr.shape != (1 << n,):
            raise ValueError(f"table has shape {arr.shape}, expected ({1 << n},)")
        if arr.min(initial=0.0) < -VALUE_TOL or arr.max(initial=0.0) > 1.0 + VALUE_TOL:
            raise ValueError("bounded table entries must lie in [0,1] (tol 1e-12)")
        self.n = n
        self._table = np.clip(arr, 0.0, 1.0)
        self._table.flags.writeable = False

    @property
    def table(self) -> np.ndarray:
        return self._table

    def values(self) -> np.ndarray:
        return self._table.copy()

    def __eq__(self, other) -> bool:
        return (isinstance(other, BoundedFunction) and self.n == other.n
                and np.array_equal(self._table, other._table))

    def __repr__(self) -> str:
        return f"BoundedFunction(n={self.n})"


AnyFunction = BooleanFunction | BoundedFunction


@dataclass(frozen=True)
class Restriction:
    """Assignment of bits to a subset of coordinates.

    Restricting f by {i: b, ...} produces the function of the remaining
    coordinates alpha |-> f(alpha merged with the fixed bits).
    """

    fixed: tuple[tuple[int, int], ...]

    def __init__(self, fixed):
        items = dict(fixed)
        for i, b in items.items():
            if b not in (0, 1):
                raise ValueError(f"fixed value for coordinate {i} must be 0 or 1")
        object.__setattr__(self, "fixed", tuple(sorted(items.items())))

    def coordinates(self) -> list[int]:
        return [i for i, _ in self.fixed]


def evaluate(f: AnyFunction, x: int) -> float:
    """Value of f at the point with integer code x."""
    if not 0 <= x < (1 << f.n):
        raise IndexError(f"point {x} outside [0, 2^{f.n})")
    v = f.table[x]
    return int(v) if isinstance(f, BooleanFunction) else float(v)


def _contract(table: np.ndarray, j: int, w0: float, w1: float) -> np.ndarray:
    """Eliminate coordinate j, combining its two slices with weights w0, w1."""
    t = table.reshape(-1, 2, 1 << j)
    return (w0 * t[:, 0, :] + w1 * t[:, 1, :]).reshape(-1)


def _slice(table: np.ndarray, j: int, bit: int) -> np.ndarray:
    t = table.reshape(-1, 2, 1 << j)
    return t[:, bit, :].reshape(-1).copy()


def restrict(f: AnyFunction, r: Restriction) -> AnyFunction:
    """Fix the coordinates of r; the result has dimension n - |r|.

    Remaining coordinates keep their relative order and are renumbered
    from 0.
    """
    coords = r.coordinates()
    if any(i >= f.n or i < 0 for i in coords):
        raise ValueError("restriction fixes a coordinate outside [0, n)")
    table = f.table.astype(np.float64) if isinstance(f, BoundedFunction) else f.table.copy()
    for i, b in sorted(r.fixed, reverse=True):
        table = _slice(table, i, b)
    m = f.n - len(coords)
    if isinstance(f, BooleanFunction):
        return BooleanFunction(m, table)
    return BoundedFunction(m, table)


def average_out(f: AnyFunction, keep, q: float) -> BoundedFunction:
    """Average f over the coordinates outside ``keep`` under bias q.

    Returns the function on {0,1}^|keep| given by
    alpha |-> sum over beta of mu_q(beta) * f(alpha, beta); coordinates in
    ``keep`` keep their relative order.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("bias q must lie in (0,1)")
    keep = set(keep)
    if any(i >= f.n or i < 0 for i in keep):
        raise ValueError("keep-set contains a coordinate outside [0, n)")
    table = f.table.astype(np.float64)
    for j in sorted(set(range(f.n)) - keep, reverse=True):
        table = _contract(table, j, 1.0 - q, q)
    return BoundedFunction(len(keep), table)


def expectation(f: AnyFunction, p: float) -> float:
    """Mean of f under the p-biased product measure."""
    if not 0.0 < p < 1.0:
        raise ValueError("bias p must lie in (0,1)")
    return float(measure_weights(f.n, p) @ f.table.astype(np.float64))


def l1_distance(f: AnyFunction, g: AnyFunction, p: float) -> float:
    """L1 distance between f and g under the p-biased measure."""
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} != {g.n}")
    diff = np.abs(f.table.astype(np.float64) - g.table.astype(np.float64))
    return float(measure_weights(f.n, p) @ diff)


def linf_distance(f: AnyFunction, g: AnyFunction) -> float:
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} != {g.n}")
    diff = np.abs(f.table.astype(np.float64) - g.table.astype(np.float64))
    return float(diff.max(initial=0.0))


def constant(n: int, value) -> AnyFunction:
    """Constant function; Boolean when value is exactly 0 or 1."""
    if value in (0, 1):
        return BooleanFunction(n, np.full(1 << n, value, dtype=np.uint8))
    return BoundedFunction(n, np.full(1 << n, float(value)))


# ---------------------------------------------------------------------------
# Function file format (JSON)

def to_json_dict(f: AnyFunction) -> dict:
    if isinstance(f, BooleanFunction):
        return {"n": f.n, "kind": "boolean", "bits_hex": f.bits_hex}
    return {"n": f.n, "kind": "bounded", "values": f.table.tolist()}


def from_json_dict(data: dict) -> AnyFunction:
    kind = data.get("kind")
    if kind == "boolean":
        return BooleanFunction.from_bits_hex(int(data["n"]), data["bits_hex"])
    if kind == "bounded":
        return BoundedFunction(int(data["n"]), np.asarray(data["values"], dtype=np.float64))
    raise ValueError(f"unknown function kind: {kind!r}")


def save_function(f: AnyFunction, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(f), fh)
        fh.write("\n")


def load_function(path) -> AnyFunction:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
