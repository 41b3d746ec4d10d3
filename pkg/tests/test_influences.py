import math

import numpy as np
import pytest

import polyspec as ps
from polyspec.influences import is_monotone, sensitivity_degree_gap
from conftest import random_boolean, random_bounded
from oracles import naive_influence, naive_negative_influence


def test_dictator_influence():
    f = ps.make_and(3, [1])
    for p in (0.2, 0.5, 0.9):
        assert ps.influence(f, 1, p) == pytest.approx(1.0, abs=1e-12)
        assert ps.influence(f, 0, p) == 0.0


def test_monotone_has_no_negative_influence(rng):
    f = ps.make_and_or(4, ps.BlockPartition(({0, 1}, {3})))
    for i in range(4):
        assert ps.negative_influence(f, i, 0.4) == 0.0


def test_negation_negative_influence():
    f = ps.BooleanFunction(1, [1, 0])
    for p in (0.25, 0.5, 0.8):
        assert ps.negative_influence(f, 0, p) == pytest.approx(1.0, abs=1e-12)


def test_influences_match_naive(rng):
    for _ in range(10):
        n = int(rng.integers(1, 6))
        f = random_bounded(n, rng)
        p = float(rng.uniform(0.1, 0.9))
        for i in range(n):
            assert ps.influence(f, i, p) == pytest.approx(
                naive_influence(f.table, n, i, p), abs=1e-12)
            assert ps.negative_influence(f, i, p) == pytest.approx(
                naive_negative_influence(f.table, n, i, p), abs=1e-12)


def test_influence_fourier_identity(rng):
    # I_i equals the mass of coefficients containing i divided by p(1-p)
    for p in (1.0 / 3.0, 0.5):
        f = random_boolean(6, rng)
        spec = ps.fourier_transform(f, p)
        for i in range(6):
            assert ps.influence(f, i, p) * p * (1 - p) == pytest.approx(
                ps.set_influence(spec, [i]), abs=1e-9)


def test_sensitivity_and_degree_of_parity_and_and():
    n = 5
    parity = ps.make_xor(n, range(n))
    assert ps.sensitivity(parity) == n
    assert ps.degree(parity) == n
    for coords in ([0], [1, 3], [0, 2, 4]):
        f = ps.make_and(n, coords)
        assert ps.sensitivity(f) == len(coords)
        assert ps.degree(f) == len(coords)


def test_huang_inequality_random(rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        f = random_boolean(n, rng)
        s, d = ps.sensitivity(f), ps.degree(f)
        assert s * s >= d
        assert sensitivity_degree_gap(f) >= 0.0


def test_shift_examples():
    f = ps.BooleanFunction(1, [1, 0])
    assert ps.shift(f, 0).table.tolist() == [0, 1]
    mono = ps.make_and(3, [0, 1])
    for i in range(3):
        assert ps.shift(mono, i) == mono


def test_shift_displacement_bounded_by_negative_influence(rng):
    for _ in range(30):
        n = int(rng.integers(1, 8))
        f = random_bounded(n, rng)
        p = float(rng.uniform(0.15, 0.85))
        for i in range(n):
            moved = ps.l1_distance(ps.shift(f, i), f, p)
            assert moved <= ps.negative_influence(f, i, p) + 1e-12


def test_shift_controls_other_negative_influences(rng):
    for _ in range(30):
        n = int(rng.integers(2, 7))
        f = random_bounded(n, rng)
        p = float(rng.uniform(0.15, 0.85))
        i, j = rng.choice(n, size=2, replace=False)
        before = ps.negative_influence(f, j, p)
        after = ps.negative_influence(ps.shift(f, int(i)), j, p)
        assert after <= before / (p * (1 - p)) + 1e-12


def test_monotonize(rng):
    for _ in range(30):
        n = int(rng.integers(1, 8))
        f = random_bounded(n, rng)
        m = ps.monotonize(f)
        assert is_monotone(m)
        assert ps.monotonize(m) == m            # idempotent
    g = ps.make_and_or(4, ps.BlockPartition(({0}, {1, 2})))
    assert ps.monotonize(g) == g


def test_monotonize_aggregate_bound(rng):
    for _ in range(30):
        n = int(rng.integers(1, 7))
        f = random_bounded(n, rng)
        p = float(rng.uniform(0.2, 0.8))
        tau = max(ps.negative_influence(f, i, p) for i in range(n))
        bound = ((1 - p) * p) ** (-n) * n * tau
        assert ps.l1_distance(f, ps.monotonize(f), p) <= bound + 1e-12


def test_junta_project_fixes_juntas(rng):
    base = random_boolean(3, rng)
    # lift to 5 coordinates: depends only on 0, 2, 4
    lifted = np.zeros(32, dtype=np.uint8)
    for x in range(32):
        key = ((x >> 0) & 1) | (((x >> 2) & 1) << 1) | (((x >> 4) & 1) << 2)
        lifted[x] = base.table[key]
    f = ps.BooleanFunction(5, lifted)
    proj = ps.junta_project(f, [0, 2, 4], 0.3)
    assert np.allclose(proj.table, f.table, atol=1e-12)


def test_junta_project_dictator_to_empty():
    d = ps.make_and(2, [0])
    assert ps.junta_project(d, [], 0.7, rounding=True) == ps.constant(2, 1)
    assert ps.junta_project(d, [], 0.3, rounding=True) == ps.constant(2, 0)


def test_junta_project_decreases_negative_influence(rng):
    for _ in range(20):
        n = int(rng.integers(2, 7))
        f = random_bounded(n, rng)
        p = float(rng.uniform(0.2, 0.8))
        keep = [i for i in range(n) if rng.random() < 0.6]
        proj = ps.junta_project(f, keep, p)
        for j in keep:
            assert (ps.negative_influence(proj, j, p)
                    <= ps.negative_influence(f, j, p) + 1e-12)


def test_influence_profile(rng):
    f = ps.make_majority3()
    prof = ps.influence_profile(f, 0.5)
    assert prof.max_sensitivity == 2 and prof.degree == 3
    assert prof.monotone
    assert prof.influences == (0.5, 0.5, 0.5)
    assert prof.negative_influences == (0.0, 0.0, 0.0)
    d = prof.to_json_dict()
    assert set(d) == {"p", "influences", "negative_influences",
                      "max_sensitivity", "degree", "monotone"}


def test_degree_cross_check_biases(rng):
    for _ in range(10):
        f = random_boolean(5, rng)
        assert ps.degree(f) == ps.degree(f, cross_check=False)
