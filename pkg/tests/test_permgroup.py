"""Permutation groups, stabilizers, canonical images, dualities."""

import random

import pytest

from polyforge.permgroup import (GroupError, PermGroup, Permutation,
                                 collineation_generators, matrix_collineation,
                                 minimal_image, plane_collineation_order,
                                 quadrangle_collineation_order,
                                 quadrangle_duality, set_stabilizer,
                                 symplectic_order)
from polyforge.polygons import build_pg2, build_w3


def random_word(group, rng, length=6):
    g = Permutation(range(group.degree))
    for _ in range(length):
        g = rng.choice(group.gens) * g
    return g


def test_permutation_algebra():
    a = Permutation((1, 2, 0, 3))
    b = Permutation((0, 1, 3, 2))
    assert a * a.inverse() == Permutation(range(4))
    assert (a * b).inverse() == b.inverse() * a.inverse()
    assert a.apply_set({0, 3}) == (1, 3)
    m = a.apply_mask(0b1001)
    assert m == (1 << 1) | (1 << 3)


@pytest.mark.parametrize("q,e", [(2, 1), (3, 1), (4, 2)])
def test_plane_group_orders(q, e):
    G = collineation_generators(build_pg2(q))
    assert G.order() == plane_collineation_order(q, e)


@pytest.mark.parametrize("q,e", [(2, 1), (3, 1), (4, 2)])
def test_quadrangle_group_orders(q, e):
    G = collineation_generators(build_w3(q))
    assert G.order() == quadrangle_collineation_order(q, e)
    assert quadrangle_collineation_order(q, e) == symplectic_order(q) * e


def test_known_group_orders():
    assert plane_collineation_order(2, 1) == 168
    assert plane_collineation_order(3, 1) == 5616
    assert plane_collineation_order(4, 2) == 120960
    assert quadrangle_collineation_order(2, 1) == 720
    assert quadrangle_collineation_order(3, 1) == 51840
    assert quadrangle_collineation_order(4, 2) == 1958400


def test_group_elements_preserve_incidence(w32):
    G = collineation_generators(w32)
    rng = random.Random(9)
    npts = w32.n_points
    flags = [(pi, li) for li in range(w32.n_lines) for pi in w32.line_points[li]]
    for _ in range(20):
        g = random_word(G, rng)
        # points map to points, lines to lines, flags to flags
        assert all(g[pi] < npts for pi in range(npts))
        for pi, li in rng.sample(flags, 15):
            assert g[pi] in w32.line_points[g[npts + li] - npts]


def test_membership_and_elements_stream(fano):
    G = collineation_generators(fano)
    assert G.order() == 168
    els = list(G.elements())
    assert len(els) == 168
    assert len(set(els)) == 168
    rng = random.Random(1)
    for _ in range(10):
        assert random_word(G, rng) in G
    # a transposition of two points is never a collineation here
    bad = list(range(G.degree))
    bad[0], bad[1] = bad[1], bad[0]
    assert Permutation(bad) not in G


def test_orbit_stabilizer_identity(w33):
    G = collineation_generators(w33)
    order = G.order()
    assert G.orbits(range(w33.n_points)) == (tuple(range(w33.n_points)),)
    stab = set_stabilizer(G, (0,))
    assert stab.order() * len(G.orbit(0)) == order


def test_set_stabilizer_methods_agree(fano):
    G = collineation_generators(fano)
    rng = random.Random(4)
    for _ in range(8):
        s = tuple(sorted(rng.sample(range(G.degree), rng.randrange(2, 6))))
        a = set_stabilizer(G, s, method="orbit")
        b = set_stabilizer(G, s, method="filter")
        assert a.order() == b.order()
        for g in a.gens:
            assert g.apply_set(s) == s


def test_set_stabilizer_fixes_setwise(w32):
    G = collineation_generators(w32)
    s = tuple(w32.line_points[0]) + (w32.n_points + 0,)
    stab = set_stabilizer(G, s)
    ss = tuple(sorted(s))
    for g in stab.gens:
        assert g.apply_set(ss) == ss
    # the whole orbit of the set accounts for the index
    from polyforge.permgroup import set_orbit_masks, _to_mask
    orbit = set_orbit_masks(G.gens, _to_mask(s))
    assert stab.order() * len(orbit) == G.order()


def test_minimal_image_is_orbit_invariant(fano):
    G = collineation_generators(fano)
    rng = random.Random(12)
    for _ in range(12):
        s = tuple(sorted(rng.sample(range(G.degree), 5)))
        mi = minimal_image(G, s)
        g = random_word(G, rng)
        assert minimal_image(G, tuple(sorted(g[x] for x in s))) == mi
        assert minimal_image(G, mi) == mi
        assert mi <= s


def test_matrix_collineation_and_frobenius(pg24):
    frob = matrix_collineation(pg24, frob=1)
    sq = frob * frob
    assert sq == Permutation(range(pg24.n_points + pg24.n_lines))
    # prime-subfield points are fixed
    fixed = sum(1 for i in range(pg24.n_points) if frob[i] == i)
    assert fixed == 7  # a Fano worth of rational points


def test_quadrangle_duality_even_q(w32, w34):
    for w in (w32, w34):
        d = quadrangle_duality(w)
        npts = w.n_points
        # swaps sides and reverses incidence
        assert all(d[pi] >= npts for pi in range(npts))
        for li in range(0, w.n_lines, 7):
            for pi in w.line_points[li]:
                assert d[npts + li] in w.line_points[d[pi] - npts]
        G = collineation_generators(w)
        assert d not in G
        assert d * d in G
        big = PermGroup(G.degree, G.gens + (d,))
        assert big.order() == 2 * G.order()


def test_quadrangle_duality_rejects(w33, fano):
    with pytest.raises(GroupError):
        quadrangle_duality(w33)  # odd q has no duality
    with pytest.raises(GroupError):
        quadrangle_duality(fano)
