import itertools

import numpy as np
import pytest

from oracles import compose_perm, dihedral_perm, heis_matrix, lattice_ball_count
from tca.groups import (
    Cyclic,
    Dihedral,
    DirectProduct,
    GroupError,
    Heisenberg,
    Lattice,
    parse_group,
    word_shells,
)

FINITE = ["C4", "C6", "D3", "D4", "Heis3", "C2xC4", "C2xD3"]


def test_lattice_product_and_inverse():
    z2 = Lattice(2)
    assert z2.multiply((1, 0), (0, 1)) == (1, 1)
    assert z2.inverse((3, -1)) == (-3, 1)
    assert z2.identity() == (0, 0)


def test_cyclic_arithmetic():
    c4 = Cyclic(4)
    assert c4.multiply((3,), (2,)) == (1,)
    assert c4.inverse((1,)) == (3,)


def test_dihedral_matches_permutation_model():
    for m in (3, 4, 5):
        d = Dihedral(m)
        for (k1, s1), (k2, s2) in itertools.product(d.elements(), repeat=2):
            prod = d.multiply((k1, s1), (k2, s2))
            assert dihedral_perm(*prod, m) == compose_perm(dihedral_perm(k1, s1, m), dihedral_perm(k2, s2, m))


def test_dihedral_presentation():
    d = Dihedral(3)
    r, s = (1, 0), (0, 1)
    e = d.identity()
    assert d.power(r, 3) == e and d.power(s, 2) == e
    assert d.multiply(d.multiply(s, r), s) == d.inverse(r)


def test_heisenberg_matches_matrices():
    h = Heisenberg(3)
    els = h.elements()
    assert len(els) == 27
    for x, y in itertools.product(els, repeat=2):
        assert np.array_equal(heis_matrix(*h.multiply(x, y), 3), (heis_matrix(*x, 3) @ heis_matrix(*y, 3)) % 3)
    for x in els:
        assert h.multiply(x, h.inverse(x)) == h.identity()


@pytest.mark.parametrize("spec", FINITE)
def test_finite_group_axioms_exhaustive(spec):
    g = parse_group(spec)
    els = g.elements()
    e = g.identity()
    for x in els:
        assert g.multiply(x, e) == x == g.multiply(e, x)
        assert g.multiply(x, g.inverse(x)) == e
    for x, y, z in itertools.product(els, repeat=3):
        assert g.multiply(g.multiply(x, y), z) == g.multiply(x, g.multiply(y, z))


@pytest.mark.parametrize("spec", FINITE)
def test_generators_generate(spec):
    g = parse_group(spec)
    seen = set()
    for shell in word_shells(g, g.order):
        seen.update(shell)
    assert seen == set(g.elements())
    assert g.identity() in g.generators


@pytest.mark.parametrize("spec", FINITE + ["Z", "Z^2", "Z^3", "ZxC4"])
def test_word_length_properties(spec, rng):
    g = parse_group(spec)
    pts = g.elements() if g.finite else g.ball(4)
    assert g.length(g.identity()) == 0
    for _ in range(300):
        x, y = (pts[int(i)] for i in rng.integers(len(pts), size=2))
        assert g.length(g.inverse(x)) == g.length(x)
        assert g.length(g.multiply(x, y)) <= g.length(x) + g.length(y)


def test_ball_examples():
    assert Lattice(1).ball(2) == [(-2,), (-1,), (0,), (1,), (2,)]
    assert len(Lattice(2).ball(1)) == 5
    assert Dihedral(3).ball(10) == Dihedral(3).elements()


@pytest.mark.parametrize("n,r", [(1, 3), (2, 4), (3, 3)])
def test_lattice_ball_sizes(n, r):
    b = Lattice(n).ball(r)
    assert len(b) == len(set(b)) == lattice_ball_count(n, r)
    assert b == sorted(b)


def test_balls_nested():
    for g in (Lattice(2), Heisenberg(3), parse_group("ZxC3")):
        for r in range(4):
            assert set(g.ball(r)) <= set(g.ball(r + 1))


def test_finite_ball_exhausts():
    h = Heisenberg(3)
    r = max(h.length(x) for x in h.elements())
    assert h.ball(r) == h.elements()


def test_parse_group_variants():
    assert isinstance(parse_group("Z^2"), Lattice)
    assert parse_group("C2xC4").order == 8
    assert isinstance(parse_group("C2xC4"), DirectProduct)
    assert parse_group("Heis5").order == 125
    for bad in ("", "Q8", "C", "Zx", "D3y"):
        with pytest.raises(GroupError):
            parse_group(bad)


def test_invalid_elements_rejected():
    with pytest.raises(GroupError):
        Cyclic(4).multiply((5,), (1,))
    with pytest.raises(GroupError):
        Lattice(2).multiply((1,), (1, 2))
    with pytest.raises(GroupError):
        Dihedral(3).validate((0, 2))


def test_lattice_overflow_checked():
    z = Lattice(1)
    with pytest.raises(GroupError):
        z.multiply((2**63 - 1,), (1,))


def test_deterministic_enumeration():
    assert parse_group("D4").elements() == sorted(parse_group("D4").elements())
    assert Lattice(2).ball(3) == Lattice(2).ball(3)
