"""Eigenvalue routines and the bound formulas."""

import math
import random

import numpy as np
import pytest

from polyforge.polygons import build_pg2, build_w3
from polyforge.spectral import (SpectralError, biadjacency, cage_bounds,
                                eigen_sym, mixing_bound, moore_bound,
                                polygon_second_eigenvalue_theory, polygon_size,
                                second_eigenvalue, subgraph_ratio_bounds,
                                tgood_upper_bound)


def test_eigen_sym_against_numpy():
    rng = np.random.default_rng(42)
    for n in (2, 5, 9, 16):
        for _ in range(5):
            m = rng.integers(-4, 5, size=(n, n))
            a = m + m.T
            got = eigen_sym(a)
            want = np.sort(np.linalg.eigvalsh(a.astype(float)))[::-1]
            assert np.max(np.abs(np.array(got) - want)) < 1e-9


def test_eigen_sym_rejects_bad_input():
    with pytest.raises(SpectralError):
        eigen_sym([[1, 2], [3, 4]])
    with pytest.raises(SpectralError):
        eigen_sym([[1, 2, 3]])


def test_biadjacency_row_sums(pg23):
    b = biadjacency(pg23)
    assert b.shape == (13, 13)
    assert set(b.sum(axis=0)) == {4}
    assert set(b.sum(axis=1)) == {4}


@pytest.mark.parametrize("q", [2, 3, 4])
def test_polygon_spectra(q, fano, pg23, w32):
    plane = {2: fano, 3: pg23}.get(q) or build_pg2(q)
    lam1, lam2 = second_eigenvalue(plane)
    assert abs(lam1 - (q + 1)) < 1e-9
    assert abs(lam2 - math.sqrt(q)) < 1e-6
    assert abs(lam2 - polygon_second_eigenvalue_theory(3, q)) < 1e-6
    w = w32 if q == 2 else build_w3(q)
    _, lam2w = second_eigenvalue(w)
    assert abs(lam2w - math.sqrt(2 * q)) < 1e-6


def test_polygon_size_formulas():
    assert polygon_size(3, 4) == 21
    assert polygon_size(4, 3) == 40
    assert polygon_size(6, 2) == 63
    with pytest.raises(SpectralError):
        polygon_size(5, 2)


def test_mixing_inequality_random_subsets(pg23):
    rng = random.Random(0)
    for _ in range(50):
        S = rng.sample(range(pg23.n_points), rng.randrange(1, 13))
        T = rng.sample(range(pg23.n_lines), rng.randrange(1, 13))
        rep = mixing_bound(pg23, S, T)
        assert rep["holds"]
        # direct edge recount
        direct = sum(1 for li in T for pi in pg23.line_points[li] if pi in set(S))
        assert rep["edges"] == direct


def test_subgraph_ratio_window():
    lo, hi = subgraph_ratio_bounds(4, 3, math.sqrt(6))
    assert 0 < lo < hi < 1
    with pytest.raises(SpectralError):
        subgraph_ratio_bounds(2, 1, 2.5)


def test_tgood_upper_bound_values():
    r = tgood_upper_bound(3, 4, 1)
    assert r.value == 7 and r.floor == 7
    r = tgood_upper_bound(4, 3, 1)
    assert abs(r.value - 4 * (4 + math.sqrt(6))) < 1e-12
    assert r.floor == 25
    # doubling t doubles the bound
    assert abs(tgood_upper_bound(4, 3, 2).value - 2 * r.value) < 1e-9
    with pytest.raises(SpectralError):
        tgood_upper_bound(5, 2, 1)


def test_moore_bound_values():
    assert moore_bound(4, 8).floor == 80
    assert moore_bound(3, 6).floor == 14
    assert moore_bound(3, 5).floor == 10  # Petersen graph is extremal
    with pytest.raises(SpectralError):
        moore_bound(1, 8)


def test_cage_bound_values():
    assert cage_bounds(4, 8).floor == 104
    assert cage_bounds(9, 8).floor == 1386
    assert cage_bounds(2, 12).floor == 16
    assert cage_bounds(3, 12).floor == 324
    with pytest.raises(SpectralError):
        cage_bounds(5, 8)  # needs square q
    with pytest.raises(SpectralError):
        cage_bounds(3, 10)


def test_cage_above_moore():
    # removing a 1-good structure leaves a q-regular subgraph, so the
    # construction upper bound must sit on or above the q-degree Moore floor
    for q in (4, 9):
        assert cage_bounds(q, 8).floor >= moore_bound(q, 8).floor
    for q in (2, 3, 4, 5):
        assert cage_bounds(q, 12).floor >= moore_bound(q, 12).floor
