"""Classifiers, testers, structure distances and theorem-style audits.

Everything here reports measured quantities.  Audits return the premise and
conclusion numbers side by side instead of asserting any particular
premise-to-conclusion rate: the qualitative content (conclusions shrink as
premises shrink) is checked by the sweep harness, while pass thresholds are
run configuration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (AnyFunction, BooleanFunction, average_out, expectation,
                   l1_distance)
from .families import (BlockPartition, make_and, make_and_or, make_and_xor,
                       make_majority3, make_semirandom, recognize_and_or)
from .fourier import correlation_with_ands
from .influences import (high_influence_coordinates, junta_project, monotonize,
                         negative_influence)
from .lattice import (index_bits, measure_weights, mobius_subsets, pack_bits,
                      popcounts, zeta_subsets, zeta_supersets)
from .noise import (NoiseParams, TesterReport, downward_noise_table,
                    invert_downward, residual)

EIGEN_TOL = 1e-10
EXACT_PAIR_TOL = 1e-12
MAX_EXACT_HOM_N = 13
TIE_TOL = 1e-15


@dataclass(frozen=True)
class StructureVerdict:
    """Outcome of a structure search: what the input is close to, how close.

    kind is one of zero, constant, and, and_or, monotone_junta, none; the
    witness is the matching constant, coordinate set or partition.  When
    is_upper_bound is set the distance is a certified upper bound (the
    projection pipeline), not a minimum over the family.
    """

    kind: str
    witness: object
    distance: float
    residual: float | None = None
    lam: float | None = None
    is_upper_bound: bool = False

    def witness_str(self) -> str:
        if self.kind in ("zero", "constant"):
            return str(self.witness)
        if self.kind in ("and", "monotone_junta"):
            return "+".join(map(str, sorted(self.witness))) or "()"
        if self.kind == "and_or":
            return ";".join("+".join(map(str, blk))
                            for blk in self.witness.sorted_blocks()) or "()"
        return ""


# ---------------------------------------------------------------------------
# Exhaustive eigenfunction classification

def classify_boolean_eigens(n: int, rho: float,
                            tol: float = EIGEN_TOL) -> list[tuple[BooleanFunction, float | None]]:
    """All Boolean f with T f = lam * f pointwise for some lam > 0.

    Enumerates every one of the 2^(2^n) truth tables (so n <= 4), applying
    the operator to the whole batch at once.  The zero function is included
    with lam None.
    """
    if n > 4:
        raise ValueError("exhaustive eigen classification is capped at n = 4")
    size = 1 << n
    tables = index_bits(size, np.arange(1 << size, dtype=np.int64)).astype(np.float64)
    transformed = downward_noise_table(tables, n, rho)
    has_ones = tables.any(axis=1)
    # candidate eigenvalue: value of T f at any point where f = 1
    lam = np.max(np.where(tables > 0.5, transformed, -np.inf), axis=1)
    lam = np.where(has_ones, lam, 0.0)
    gap = np.abs(transformed - lam[:, None] * tables).max(axis=1)
    hits = np.flatnonzero((gap <= tol) & ((lam > 0) | ~has_ones))
    out: list[tuple[BooleanFunction, float | None]] = []
    for code in hits:
        f = BooleanFunction(n, tables[code].astype(np.uint8))
        out.append((f, float(lam[code]) if lam[code] > 0 else None))
    return out


@dataclass(frozen=True)
class ExactPairSolution:
    """Feasibility record for T f = lam * g with f required in [0,1]."""

    feasible: bool
    preimage: np.ndarray          # raw table of lam * T^{-1} g (lam = 1 if None)
    lam_max: float | None         # largest feasible lam, None when g = 0
    negative_mass: float          # magnitude of the most negative raw entry


def solve_exact_pair(g: BooleanFunction, rho: float, lam: float | None = None,
                     tol: float = EXACT_PAIR_TOL) -> ExactPairSolution:
    """Invert the operator on g and classify feasibility.

    g is feasible iff the raw preimage is entrywise nonnegative; then
    f = lam * T^{-1} g lies in [0,1] exactly for lam in (0, 1/max entry].
    For g identically zero any lam works and f = 0 is the only solution.
    """
    u = invert_downward(g, rho)
    most_negative = float(min(u.min(initial=0.0), 0.0))
    feasible = most_negative >= -tol
    scale = lam if lam is not None else 1.0
    if not g.table.any():
        return ExactPairSolution(True, u * scale, None, 0.0)
    top = float(u.max())
    lam_max = 1.0 / top if feasible and top > 0 else None
    return ExactPairSolution(feasible, u * scale, lam_max, -most_negative)


# ---------------------------------------------------------------------------
# Homomorphism testers

def _and_correlation(f_table: np.ndarray, h_table: np.ndarray, n: int,
                     rho: float) -> np.ndarray:
    """q(x) = E over y ~ mu_rho of h(y) * f(x AND y), for every x at once.

    Writing A for the superset sums of mu_rho * h and m for the alternating
    subset sums of f, q is the subset zeta transform of A * m; three
    O(n*2^n) passes replace the 4^n double loop.
    """
    a = h_table.astype(np.float64) * measure_weights(n, rho)
    a_sup = zeta_supersets(a, n)
    m = mobius_subsets(f_table.astype(np.float64).copy(), n)
    return zeta_subsets(a_sup * m, n)


def _agreement_exact(f: BooleanFunction, g: BooleanFunction,
                     h: BooleanFunction, p: float, rho: float) -> float:
    """Pr over x ~ mu_p, y ~ mu_rho that f(x AND y) = g(x) AND h(y)."""
    n = f.n
    tf = downward_noise_table(f.table, n, rho)
    q = _and_correlation(f.table, h.table, n, rho)
    eh = float(measure_weights(n, rho) @ h.table.astype(np.float64))
    gx = g.table.astype(np.float64)
    per_x = np.where(gx > 0.5, 1.0 - tf - eh + 2.0 * q, 1.0 - tf)
    return float(measure_weights(n, p) @ per_x)


def _agreement_pairs(f: BooleanFunction, g: BooleanFunction,
                     h: BooleanFunction, p: float, rho: float) -> float:
    """Same probability by brute enumeration of all 4^n input pairs."""
    n = f.n
    wx = measure_weights(n, p)
    wy = measure_weights(n, rho)
    ft, gt, ht = f.table, g.table, h.table
    ys = np.arange(1 << n)
    total = 0.0
    for x in range(1 << n):
        agree = ft[x & ys] == (gt[x] & ht)
        total += wx[x] * float(wy @ agree)
    return total


def homomorphism_agreement(f: BooleanFunction, p: float, rho: float,
                           mode: str = "exact", g: BooleanFunction | None = None,
                           h: BooleanFunction | None = None,
                           samples: int = 1_000_000,
                           rng: np.random.Generator | None = None,
                           seed: int | None = None) -> TesterReport:
    """Agreement rate of f(x AND y) with g(x) AND h(y); g = h = f by default.

    Exact mode uses the O(n*2^n) correlation identity for n up to 13 (the
    4^n pair enumeration backs it up as a test oracle); montecarlo mode
    samples input pairs.
    """
    g = g or f
    h = h or f
    if not (f.n == g.n == h.n):
        raise ValueError("functions must share one dimension")
    if mode == "exact":
        if f.n > MAX_EXACT_HOM_N:
            raise ValueError(f"exact agreement capped at n = {MAX_EXACT_HOM_N}")
        val = _agreement_exact(f, g, h, p, rho)
        return TesterReport(estimate=val, std_error=0.0, samples=0, exact=True)
    if mode != "montecarlo":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        batch = min(1 << 17, samples - done)
        x = pack_bits((rng.random((batch, f.n)) < p).astype(np.uint8))
        y = pack_bits((rng.random((batch, f.n)) < rho).astype(np.uint8))
        hits += int(np.count_nonzero(f.table[x & y] == (g.table[x] & h.table[y])))
        done += batch
    est = hits / samples
    se = math.sqrt(max(est * (1.0 - est), 1.0 / samples) / samples)
    return TesterReport(estimate=est, std_error=se, samples=samples, seed=seed)


def prs_tester(f: BooleanFunction, p: float = 0.5, samples: int | None = None,
               rng: np.random.Generator | None = None, seed: int | None = None,
               expectation_window: float = 0.05,
               agreement_min: float = 0.95) -> TesterReport:
    """Dictatorship-style tester: near-half mean plus AND-agreement.

    Accepts when |E[f] - 1/2| <= expectation_window and the agreement rate
    of f(x AND y) with f(x) AND f(y) reaches agreement_min.  With samples
    None both statistics are exact.
    """
    if samples is None:
        mean = expectation(f, p)
        agree = homomorphism_agreement(f, p, p, mode="exact")
        se, n_used, exact = 0.0, 0, True
    else:
        if rng is None:
            rng = np.random.default_rng(seed)
        codes = pack_bits((rng.random((samples, f.n)) < p).astype(np.uint8))
        mean = float(np.mean(f.table[codes]))
        agree = homomorphism_agreement(f, p, p, mode="montecarlo",
                                       samples=samples, rng=rng, seed=seed)
        se, n_used, exact = agree.std_error, samples, False
    accepted = (abs(mean - 0.5) <= expectation_window
                and agree.estimate >= agreement_min)
    return TesterReport(estimate=agree.estimate, std_error=se, samples=n_used,
                        seed=seed, exact=exact, accepted=accepted,
                        details={"expectation": mean,
                                 "agreement": agree.estimate,
                                 "expectation_window": expectation_window,
                                 "agreement_min": agreement_min})


def one_sided_check(f: AnyFunction, g: BooleanFunction, params: NoiseParams,
                    lam: float) -> tuple[float, float]:
    """One-sided error pair (eta1, eta2) of the relaxed eigenvalue problem.

    eta1 = E over mu_p of (1 - g) * T f; eta2 = Pr over mu_p that g = 1 yet
    T f falls strictly below lam.  (Strictly: an exact eigenpair with lam
    equal to the minimum of T f on the support of g scores eta2 = 0.)
    """
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} != {g.n}")
    tf = downward_noise_table(f.table, f.n, params.rho)
    w = measure_weights(f.n, params.p)
    gt = g.table.astype(np.float64)
    eta1 = float(w @ ((1.0 - gt) * tf))
    eta2 = float(w @ ((gt > 0.5) & (tf < lam)))
    return eta1, eta2


# ---------------------------------------------------------------------------
# Structure distances

def distance_to_constant_or_and(f: BooleanFunction, p: float) -> StructureVerdict:
    """Minimal L1 distance from f to a constant or an AND, with witness.

    The correlation of f with every AND comes from one superset-sum pass,
    so the search over all 2^n subsets runs in O(n*2^n).  Ties prefer the
    smaller witness (constants count as empty), then the lexicographically
    smaller one.
    """
    mean = expectation(f, p)
    corr = correlation_with_ands(f.table, f.n, p)
    pk = p ** popcounts(f.n).astype(np.float64)
    dists = mean + pk - 2.0 * corr       # L1 gap to each AND (f Boolean)
    best = min(mean, 1.0 - mean, float(dists.min()))
    if mean <= best + TIE_TOL:
        return StructureVerdict(kind="zero", witness=0, distance=mean)
    if 1.0 - mean <= best + TIE_TOL:     # the empty AND is the same function
        return StructureVerdict(kind="constant", witness=1, distance=1.0 - mean)
    cands = np.flatnonzero(dists <= best + TIE_TOL)
    pick = int(cands[np.lexsort((cands, popcounts(f.n)[cands]))[0]])
    witness = frozenset(i for i in range(f.n) if (pick >> i) & 1)
    return StructureVerdict(kind="and", witness=witness, distance=float(dists[pick]))


def _partitions_into_blocks(items: list[int], max_blocks: int):
    """All set partitions of items into at most max_blocks nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions_into_blocks(rest, max_blocks):
        for k in range(len(sub)):
            yield sub[:k] + [sub[k] | {first}] + sub[k + 1:]
        if len(sub) < max_blocks:
            yield sub + [{first}]


def distance_to_and_or(f: BooleanFunction, p: float, max_width: int = 4,
                       tau: float = 0.05,
                       max_support: int = 10) -> StructureVerdict:
    """Minimal L1 distance from f to an AND-OR of bounded width.

    An exact recognition hit short-circuits to distance zero.  Otherwise the
    partition search runs over the coordinates of influence at least tau
    (all coordinates when n <= max_support), every subset of them, and
    every partition into at most max_width blocks.
    """
    exact = recognize_and_or(f)
    if exact is not None and exact.width <= max_width:
        return StructureVerdict(kind="and_or", witness=exact, distance=0.0)
    if f.n <= max_support:
        cand = list(range(f.n))
    else:
        cand = high_influence_coordinates(f, p, tau)
        if len(cand) > max_support:
            ranked = sorted(cand, key=lambda i: -abs(negative_influence(f, i, p)))
            cand = sorted(ranked[:max_support])
    mean = expectation(f, p)
    w = measure_weights(f.n, p)
    wf = w * f.table
    best_dist, best_width, best_part = 1.0 - mean, 0, BlockPartition(())
    for size in range(1, len(cand) + 1):
        for support in itertools.combinations(cand, size):
            for blocks in _partitions_into_blocks(list(support), max_width):
                part = BlockPartition(tuple(frozenset(b) for b in blocks))
                g = make_and_or(f.n, part)
                dist = mean + float(w @ g.table) - 2.0 * float(wf @ g.table)
                if dist < best_dist - TIE_TOL or (
                        abs(dist - best_dist) <= TIE_TOL and part.width < best_width):
                    best_dist, best_width, best_part = dist, part.width, part
    return StructureVerdict(kind="and_or", witness=best_part,
                            distance=float(max(best_dist, 0.0)))


def distance_to_monotone_junta(f: BooleanFunction, p: float,
                               tau: float = 0.05) -> StructureVerdict:
    """Upper bound on the distance from f to a monotone Boolean junta.

    Projects onto the coordinates of influence at least tau, monotonizes,
    rounds at 1/2, and reports the resulting distance; the true minimum may
    be smaller, hence is_upper_bound.
    """
    coords = high_influence_coordinates(f, p, tau)
    projected = junta_project(f, coords, p)
    mono = monotonize(projected)
    rounded = BooleanFunction(f.n, (mono.table >= 0.5).astype(np.uint8))
    dist = l1_distance(f, rounded, p)
    return StructureVerdict(kind="monotone_junta", witness=frozenset(coords),
                            distance=dist, is_upper_bound=True)


# ---------------------------------------------------------------------------
# Theorem-style audits

@dataclass(frozen=True)
class AuditReport:
    theorem: str
    premise: dict[str, float]
    conclusion: dict[str, float]
    verdict: StructureVerdict | None = None
    notes: tuple[str, ...] = field(default=())

    def passed(self, eta_max: float, eps_max: float) -> bool:
        """Strict-mode gate: if every premise defect is within eta_max, every
        conclusion distance must be within eps_max (vacuous otherwise)."""
        premise_ok = all(v <= eta_max for k, v in self.premise.items()
                         if k.startswith(("eta", "epsilon", "max_")))
        if not premise_ok:
            return True
        return all(v <= eps_max for k, v in self.conclusion.items()
                   if k.startswith("delta"))


def _averaged_profile(f: AnyFunction, coords, avg_bias: float,
                      target: BooleanFunction | None, scale: float,
                      measure_bias: float) -> dict[str, float]:
    """L1/Linf gaps between f averaged outside coords and scale * target.

    Averaging uses avg_bias on the dropped coordinates; the L1 gap is taken
    under measure_bias on the kept cube (the averaged function lives on the
    input side of the operator, hence the lower bias by default).
    """
    keep = sorted(coords)
    ftilde = average_out(f, keep, avg_bias) if len(keep) < f.n else f
    ref = (scale * target.table.astype(np.float64) if target is not None
           else np.zeros(1 << len(keep)))
    gap = np.abs(ftilde.table.astype(np.float64) - ref)
    w = measure_weights(len(keep), measure_bias)
    return {"delta_f_avg_l1": float(w @ gap),
            "delta_f_avg_linf": float(gap.max(initial=0.0))}


THEOREM_ALIASES = {"2.1": "small-rho", "2.2": "half-rho", "2.3": "large-lambda",
                   "2.4": "monotone", "2.6": "triple", "2.8": "one-sided"}


def theorem_audit(theorem: str, f: AnyFunction, g: BooleanFunction,
                  params: NoiseParams, h: BooleanFunction | None = None,
                  tau: float = 0.05) -> AuditReport:
    """Measure premise and conclusion quantities of one classification claim.

    Supported ids: 'small-rho' (rho below 1/2: constant-or-AND structure),
    'half-rho' (rho = 1/2: AND-OR / AND-XOR structure), 'large-lambda'
    (lam >= rho: near-constant), 'monotone' (monotone f: AND structure),
    'triple' (three-function AND homomorphism), 'one-sided' (monotone
    junta).  Numeric aliases 2.1, 2.2, 2.3, 2.4, 2.6, 2.8 map in that
    order.  Averaged-function closeness is measured exactly in the averaged
    form (average f outside the witness, compare to the scaled target) and
    nothing stronger.
    """
    theorem = THEOREM_ALIASES.get(theorem, theorem)
    p, rho, lam = params.p, params.rho, params.lam
    notes: list[str] = []

    if theorem == "triple":
        if h is None:
            raise ValueError("the triple audit needs all three functions")
        if not isinstance(f, BooleanFunction):
            raise ValueError("the triple audit needs Boolean f")
        agree = homomorphism_agreement(f, p, rho, mode="exact", g=g, h=h)
        vf = distance_to_constant_or_and(f, rho * p)
        vg = distance_to_constant_or_and(g, p)
        vh = distance_to_constant_or_and(h, rho)
        conclusion = {
            "delta_f": vf.distance, "delta_g": vg.distance, "delta_h": vh.distance,
            "delta_zero_f": expectation(f, rho * p),
            "delta_zero_gh": min(expectation(g, p), expectation(h, rho)),
        }
        return AuditReport(theorem, {"epsilon_hom": 1.0 - agree.estimate},
                           conclusion, vg, tuple(notes))

    if theorem == "one-sided":
        if lam is None:
            raise ValueError("the one-sided audit needs params.lam")
        eta1, eta2 = one_sided_check(f, g, params, lam)
        v = distance_to_monotone_junta(g, p, tau)
        return AuditReport(theorem, {"eta1": eta1, "eta2": eta2},
                           {"delta_g_monotone_junta": v.distance}, v, tuple(notes))

    if lam is None:
        raise ValueError("this audit needs params.lam")
    premise = {"eta_residual": residual(f, g, params)}

    if theorem == "large-lambda":
        premise["lambda_minus_rho"] = lam - rho
        e_g = expectation(g, p)
        gamma = 0 if e_g <= 0.5 else 1
        dist = min(e_g, 1.0 - e_g)
        conclusion = {"delta_g_const": dist,
                      "delta_f_mean": abs(expectation(f, rho * p) - lam * gamma)}
        witness = StructureVerdict(kind="zero" if gamma == 0 else "constant",
                                   witness=gamma, distance=dist,
                                   residual=premise["eta_residual"], lam=lam)
        return AuditReport(theorem, premise, conclusion, witness, tuple(notes))

    if theorem in ("small-rho", "monotone"):
        if theorem == "monotone":
            premise["max_negative_influence"] = max(
                (negative_influence(f, i, rho * p) for i in range(f.n)),
                default=0.0)
        v = distance_to_constant_or_and(g, p)
        conclusion = {"delta_g": v.distance}
        if v.kind == "and":
            T = sorted(v.witness)
            conclusion["witness_size"] = float(len(T))
            conclusion["witness_size_bound"] = float(math.ceil(math.log2(2.0 / lam)))
            target = make_and(len(T), range(len(T)))
            conclusion.update(_averaged_profile(
                f, T, rho * p, target, rho ** -len(T) * lam, rho * p))
        else:
            gamma = 1.0 if v.kind == "constant" else 0.0
            conclusion["delta_f_mean"] = abs(expectation(f, rho * p) - lam * gamma)
        return AuditReport(theorem, premise, conclusion, v, tuple(notes))

    if theorem == "half-rho":
        if abs(rho - 0.5) > 1e-12:
            notes.append("this audit is specific to rho = 1/2")
        v = distance_to_and_or(g, p, tau=tau)
        part: BlockPartition = v.witness
        conclusion = {"delta_g": v.distance, "width": float(part.width)}
        support = sorted(part.support())
        pos = {c: k for k, c in enumerate(support)}
        local = BlockPartition(tuple(frozenset(pos[c] for c in blk)
                                     for blk in part.blocks))
        target = make_and_xor(len(support), local)
        conclusion.update(_averaged_profile(
            f, support, rho * p, target, 2.0 ** part.width * lam, rho * p))
        return AuditReport(theorem, premise, conclusion, v, tuple(notes))

    raise ValueError(f"unknown theorem id {theorem!r}")


# ---------------------------------------------------------------------------
# Perturbation sweep

SWEEP_HEADER = ("seed,n,p,rho,lambda,epsilon_hom,eta_residual,"
                "delta_const_and,delta_andor,verdict_kind,witness")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _perturb(f: BooleanFunction, k: int, rng: np.random.Generator) -> BooleanFunction:
    """Flip k distinct truth-table points."""
    table = f.table.copy()
    pts = rng.choice(1 << f.n, size=min(k, 1 << f.n), replace=False)
    table[pts] ^= 1
    return BooleanFunction(f.n, table)


def _base_function(family: str, n: int, width: int, window_scale: float,
                   rng: np.random.Generator) -> BooleanFunction:
    if family == "and":
        coords = sorted(rng.choice(n, size=min(width, n), replace=False).tolist())
        return make_and(n, coords)
    if family == "maj":
        return make_majority3(n)
    if family == "semirandom":
        return make_semirandom(n, window_scale, rng)
    raise ValueError(f"unknown sweep family {family!r}")


def _sweep_row(arg: tuple) -> str:
    (family, n, k, trial, p, rho, seed, and_width, andor_max_width, tau,
     window_scale) = arg
    rng = np.random.default_rng(np.random.SeedSequence((seed, n, k, trial)))
    base = _base_function(family, n, and_width, window_scale, rng)
    f = _perturb(base, k, rng) if k else base
    lam = expectation(f, p)
    eps_hom = 1.0 - homomorphism_agreement(f, p, rho, mode="exact").estimate
    eta = (residual(f, f, NoiseParams(p=p, rho=rho, lam=lam))
           if 0.0 < lam <= 1.0 else float("nan"))
    v = distance_to_constant_or_and(f, p)
    va = distance_to_and_or(f, p, max_width=andor_max_width, tau=tau,
                            max_support=min(n, 8))
    fields = [str(seed), str(n), _fmt(p), _fmt(rho), _fmt(lam), _fmt(eps_hom),
              _fmt(eta), _fmt(v.distance), _fmt(va.distance), v.kind,
              v.witness_str()]
    return ",".join(fields)


def sweep_rows(family: str, sizes, perturbations, trials: int, p: float,
               rho: float, seed: int, and_width: int = 2,
               andor_max_width: int = 2, tau: float = 0.05,
               window_scale: float = 0.5, workers: int = 1) -> list[str]:
    """CSV rows for one perturbation family; deterministic in (config, seed).

    Every row perturbs a base function on k points, takes lam to be the
    perturbed function's mu_p mean, and reports the homomorphism defect,
    the eigenvalue residual and the structure distances.  Rows come back in
    task order regardless of the worker count.
    """
    args = [(family, int(n), int(k), int(t), p, rho, seed, and_width,
             andor_max_width, tau, window_scale)
            for n in sizes for k in perturbations for t in range(trials)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, args, chunksize=4))
    return [_sweep_row(a) for a in args]
