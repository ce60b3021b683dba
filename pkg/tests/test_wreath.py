"""Wreath product arithmetic over boundary orbits."""

import numpy as np
import pytest

from grigwalk import (
    BUILTIN_GROUPS,
    FiniteGroupA,
    GroupAction,
    WreathProduct,
    apply_diagonal,
    cyclic_group,
    rho_pair,
    standard_generators,
    symmetric3,
)
from grigwalk.core import random_reduced_word


def random_element(W, gens, rng, steps=5):
    e = W.identity()
    for _ in range(int(rng.integers(0, steps + 1))):
        e = e * gens[int(rng.integers(0, len(gens)))][1]
    return e


class TestFiniteGroupA:
    def test_builtins_are_groups(self):
        for name, A in BUILTIN_GROUPS.items():
            assert A.mul(0, 1) == 1
            for i in range(A.order):
                assert A.mul(i, A.inverse[i]) == 0

    def test_s3_nonabelian(self):
        S3 = symmetric3()
        assert any(S3.mul(i, j) != S3.mul(j, i) for i in range(6) for j in range(6))

    def test_bad_table_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroupA("bad", [[0, 1], [1, 1]])
        with pytest.raises(ValueError):
            FiniteGroupA("bad", [[1, 0], [0, 1]])


class TestStandardGenerators:
    def test_counts_diagonal(self, W_c2):
        gens = standard_generators(W_c2)
        assert len(gens) == 5  # one lamp + four base letters

    def test_counts_product(self, G, pair_action):
        W = WreathProduct(cyclic_group(2), pair_action)
        assert len(standard_generators(W)) == 9

    def test_c3_lamp_order(self, diag_action):
        W = WreathProduct(cyclic_group(3), diag_action)
        t = W.lamp(1)
        assert not (t * t).is_identity()
        assert (t * t * t).is_identity()

    def test_trivial_A_rejected(self, diag_action):
        W = WreathProduct(FiniteGroupA("C1", [[0]]), diag_action)
        with pytest.raises(ValueError):
            standard_generators(W)


class TestArithmetic:
    def test_lamp_cancellation(self, W_c2):
        t = W_c2.lamp(1)
        assert (t * t).is_identity()

    def test_group_axioms_random(self, W_c2, rng):
        gens = standard_generators(W_c2)
        for _ in range(1000):
            x = random_element(W_c2, gens, rng)
            y = random_element(W_c2, gens, rng)
            z = random_element(W_c2, gens, rng)
            assert ((x * y) * z).equals(x * (y * z))
            assert (x * x.inverse()).is_identity()

    def test_support_transport(self, G, W_c2, rng):
        # (pure base g) lamp (pure base g)^-1 has support at the x with xg = rho
        for _ in range(100):
            g = G.element(random_reduced_word(rng, int(rng.integers(0, 8))))
            conj = W_c2.base((g,)) * W_c2.lamp(1) * W_c2.base((g,)).inverse()
            assert len(conj.lamps) == 1
            (pt, a), = conj.lamps.values()
            assert a == 1
            assert apply_diagonal(pt, g) == rho_pair()

    def test_base_projection_homomorphism(self, W_c2, rng):
        gens = standard_generators(W_c2)
        for _ in range(300):
            x = random_element(W_c2, gens, rng)
            y = random_element(W_c2, gens, rng)
            xy = x * y
            proj = x.base_tuple[0] * y.base_tuple[0]
            assert xy.base_tuple[0].equals(proj)


class TestCanonicalKey:
    def test_identity_sentinel(self, W_c2):
        assert W_c2.identity().key() == "[]@e"

    def test_two_routes_same_key(self, G, W_c2):
        g = W_c2.base((G.element("ab"),))
        t = W_c2.lamp(1)
        # place lamp then move vs move then place at the translated point
        r = t * g
        moved = g * g.inverse() * t * g
        assert r.key() == moved.key()
        assert r.equals(moved)

    def test_c3_lamp_values_distinct(self, diag_action):
        W = WreathProduct(cyclic_group(3), diag_action)
        assert W.lamp(1).key() != W.lamp(2).key()
