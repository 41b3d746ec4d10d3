"""The one-sided (downwards) noise operator and its relatives.

The operator at retention rho maps a table f to
(T f)(x) = expectation over z ~ mu_rho of f(x AND z);
AND_S is an eigenvector with eigenvalue rho^|S|.  T carries functions living
on the mu_{rho*p} measure to functions on mu_p, and is an L1 contraction.

The per-coordinate kernel is [[1, 0], [1-rho, rho]]: a point with x_i = 0
cannot see the x_i = 1 half, while a point with x_i = 1 mixes both.  The
inverse uses the inverse kernel [[1, 0], [-(1-rho)/rho, 1/rho]] stage by
stage, O(n*2^n), rather than direct Moebius sums over the lattice; the
closed-form alternating-sum inverse at rho = 1/2 is kept in the test suite
as an independent oracle.  Note the closed form is stated only for
rho = 1/2; the general-rho inverse is an extension supported by the kernel
factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AnyFunction, BooleanFunction, BoundedFunction
from .fourier import synthesize_table, transform_table
from .lattice import apply_kernel, measure_weights, popcounts, working_copy

DEFAULT_SAMPLES = 1_000_000
_SAMPLE_BATCH = 1 << 17


@dataclass(frozen=True)
class NoiseParams:
    """Scalar knobs of the eigenvalue problem: T f compared against lam * g.

    p: bias of the output measure; rho: retention of the downwards step
    (the input measure has bias q = rho * p); lam: eigenvalue candidate;
    nu: resampling rate for noise-sensitivity experiments.
    """

    p: float
    rho: float
    lam: float | None = None
    nu: float | None = None

    def __post_init__(self):
        for name in ("p", "rho"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0,1), got {v}")
        if self.lam is not None and not 0.0 < self.lam <= 1.0:
            raise ValueError(f"lam must lie in (0,1], got {self.lam}")
        if self.nu is not None and not 0.0 < self.nu < 1.0:
            raise ValueError(f"nu must lie in (0,1), got {self.nu}")

    @property
    def q(self) -> float:
        return self.rho * self.p


@dataclass(frozen=True)
class TesterReport:
    """Estimate with sampling metadata; exact results carry zero error."""

    estimate: float
    std_error: float
    samples: int
    seed: int | None = None
    exact: bool = False
    details: dict | None = None
    accepted: bool | None = None

    def __post_init__(self):
        if self.exact and self.std_error != 0.0:
            raise ValueError("exact reports must have zero standard error")


def noise_kernel(rho: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [1.0 - rho, rho]])


def inverse_noise_kernel(rho: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [-(1.0 - rho) / rho, 1.0 / rho]])


def downward_noise_table(table: np.ndarray, n: int, rho: float) -> np.ndarray:
    """Apply the operator to a raw table (supports leading batch axes)."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0,1), got {rho}")
    return apply_kernel(working_copy(table), n, noise_kernel(rho))


def downward_noise(f: AnyFunction, rho: float) -> BoundedFunction:
    """(T f)(x) = sum over z of mu_rho(z) f(x AND z)."""
    return BoundedFunction(f.n, downward_noise_table(f.table, f.n, rho))


def iterated_noise(f: AnyFunction, rho: float, m: int) -> BoundedFunction:
    """m-ary variant: AND of m-1 independent masks, retention rho^(m-1)."""
    if m < 2:
        raise ValueError(f"arity m must be at least 2, got {m}")
    return downward_noise(f, rho ** (m - 1))


def invert_downward(h, rho: float) -> np.ndarray:
    """Solve T u = h for u; returns the raw table.

    The output is not clamped to [0,1]: a negative entry certifies that h
    has no preimage among bounded functions, which is exactly what the
    feasibility classifiers look at.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0,1), got {rho}")
    if isinstance(h, (BooleanFunction, BoundedFunction)):
        table, n = h.table, h.n
    else:
        table = np.asarray(h)
        n = int(table.shape[-1]).bit_length() - 1
    return apply_kernel(working_copy(table), n, inverse_noise_kernel(rho))


def spectral_eigenvalue(p: float, rho: float, level: int = 1) -> float:
    """Per-level shrink factor of T between the two Fourier bases."""
    return ((1.0 - p) * rho / (1.0 - rho * p)) ** (level / 2.0)


def spectral_action_check(f: AnyFunction, p: float, rho: float) -> float:
    """Max pointwise gap between the two routes for computing T f.

    Route one applies the per-coordinate kernels.  Route two transforms f at
    bias rho*p, shrinks level k coefficients by
    ((1-p) rho / (1 - rho p))^(k/2), and re-synthesizes at bias p.
    """
    direct = downward_noise_table(f.table, f.n, rho)
    coeffs = transform_table(f.table, f.n, rho * p)
    factors = spectral_eigenvalue(p, rho) ** popcounts(f.n).astype(np.float64)
    via_spectrum = synthesize_table(coeffs * factors, f.n, p)
    return float(np.abs(direct - via_spectrum).max())


def residual(f: AnyFunction, g: AnyFunction, params: NoiseParams) -> float:
    """L1 gap (under mu_p) between T f and lam * g."""
    if params.lam is None:
        raise ValueError("params.lam is required for a residual")
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} != {g.n}")
    tf = downward_noise_table(f.table, f.n, params.rho)
    gap = np.abs(tf - params.lam * g.table.astype(np.float64))
    return float(measure_weights(f.n, params.p) @ gap)


# ---------------------------------------------------------------------------
# Samplers.  All draw from an explicit Generator so concurrent trials are
# reproducible; samples are integer point codes.

def _biased_bits(rng: np.random.Generator, shape, p: float) -> np.ndarray:
    return (rng.random(shape) < p).astype(np.uint8)


def sample_coupled(params: NoiseParams, n: int, rng: np.random.Generator,
                   size: int) -> tuple[np.ndarray, np.ndarray]:
    """Coupled pair (y, x): x ~ mu_p, y = x AND z with z ~ mu_rho.

    Marginally y ~ mu_{rho p} and y <= x coordinatewise on every sample.
    """
    from .lattice import pack_bits

    x = _biased_bits(rng, (size, n), params.p)
    z = _biased_bits(rng, (size, n), params.rho)
    return pack_bits(x & z), pack_bits(x)


def sample_dnu(nu: float, n: int, rng: np.random.Generator,
               size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Quadruple (y, m, x, z) coupling a correlated pair with downward walks.

    m ~ mu_{1/2 - nu/4} and y is a downward step from m with marginal
    mu_{1/4}.  Where m_i = 1 both x_i and z_i are 1; where m_i = 0 the pair
    (x_i, z_i) is (1,0) or (0,1) with probability theta = nu/(2+nu) each,
    else (0,0).  Then x, z ~ mu_{1/2}, the pair (x, z) is (1-nu)-correlated
    (coordinates agree with probability 1 - nu/2, independently), and
    y <= m <= x AND z on every sample.
    """
    from .lattice import pack_bits

    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu must lie in (0,1), got {nu}")
    theta = nu / (2.0 + nu)
    pm = 0.5 - nu / 4.0
    m = _biased_bits(rng, (size, n), pm)
    w = _biased_bits(rng, (size, n), 0.25 / pm)
    y = m & w
    u = rng.random((size, n))
    x = np.where(m == 1, 1, (u < theta).astype(np.uint8))
    z = np.where(m == 1, 1, ((u >= theta) & (u < 2 * theta)).astype(np.uint8))
    return pack_bits(y), pack_bits(m), pack_bits(x), pack_bits(z)


def sample_correlated_pair(p: float, nu: float, n: int,
                           rng: np.random.Generator,
                           size: int) -> tuple[np.ndarray, np.ndarray]:
    """(1-nu)-correlated pair under mu_p: each coordinate of y copies x
    with probability 1-nu and is redrawn from mu_p otherwise."""
    from .lattice import pack_bits

    x = _biased_bits(rng, (size, n), p)
    fresh = _biased_bits(rng, (size, n), p)
    redraw = rng.random((size, n)) < nu
    y = np.where(redraw, fresh, x)
    return pack_bits(x), pack_bits(y)


def noise_sensitivity(g: BooleanFunction, p: float, nu: float,
                      mode: str = "exact", samples: int = DEFAULT_SAMPLES,
                      rng: np.random.Generator | None = None,
                      seed: int | None = None) -> TesterReport:
    """Probability that a (1-nu)-correlated resample changes g.

    Exact mode evaluates 2 * sum over S of (1 - (1-nu)^|S|) coeff(S)^2 from
    the bias-p spectrum; montecarlo mode samples correlated pairs.
    """
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu must lie in (0,1), got {nu}")
    if mode == "exact":
        coeffs = transform_table(g.table, g.n, p)
        lvl = popcounts(g.n).astype(np.float64)
        val = 2.0 * float(np.sum((1.0 - (1.0 - nu) ** lvl) * coeffs ** 2))
        return TesterReport(estimate=val, std_error=0.0, samples=0, exact=True)
    if mode != "montecarlo":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        rng = np.random.default_rng(seed)
    table = g.table
    hits = 0
    done = 0
    while done < samples:
        batch = min(_SAMPLE_BATCH, samples - done)
        x, y = sample_correlated_pair(p, nu, g.n, rng, batch)
        hits += int(np.count_nonzero(table[x] != table[y]))
        done += batch
    est = hits / samples
    se = math.sqrt(max(est * (1.0 - est), 1.0 / samples) / samples)
    return TesterReport(estimate=est, std_error=se, samples=samples, seed=seed)
