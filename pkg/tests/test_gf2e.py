import itertools
import random

import numpy as np
import pytest

from keyrecycle import gf2e
from keyrecycle.errors import DimensionError
from keyrecycle.pauli import gf2_matmul, symplectic_check


def poly_mul_mod(a, b, mod):
    """Schoolbook product of bit polynomials, reduced by long division."""
    prod = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            prod ^= a << i
    deg = mod.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= mod << (prod.bit_length() - 1 - deg)
    return prod


class TestArithmetic:
    def test_one_is_identity(self):
        for e in (1, 2, 3, 4):
            for a in range(1 << e):
                assert gf2e.gf_mul(1, a, e) == a

    def test_gf4_alpha_squared(self):
        assert gf2e.gf_mul(0b10, 0b10, 2) == 0b11

    def test_gf8_hand_reduction(self):
        assert gf2e.gf_mul(0b100, 0b100, 3) == 0b110

    @pytest.mark.parametrize("e", range(1, 9))
    def test_matches_schoolbook(self, e):
        mod = gf2e.modulus(e)
        rng = random.Random(e)
        for _ in range(200):
            a, b = rng.randrange(1 << e), rng.randrange(1 << e)
            assert gf2e.gf_mul(a, b, e) == poly_mul_mod(a, b, mod)

    @pytest.mark.parametrize("e", range(1, 5))
    def test_field_axioms(self, e):
        els = range(1 << e)
        mul = lambda a, b: gf2e.gf_mul(a, b, e)
        for a, b, c in itertools.product(els, repeat=3):
            assert mul(mul(a, b), c) == mul(a, mul(b, c))
            assert mul(a, b ^ c) == mul(a, b) ^ mul(a, c)

    @pytest.mark.parametrize("e", range(1, 9))
    def test_inverses(self, e):
        for a in range(1, 1 << e):
            assert gf2e.gf_mul(a, gf2e.gf_inv(a, e), e) == 1

    def test_inverse_examples(self):
        assert gf2e.gf_inv(1, 3) == 1
        assert gf2e.gf_inv(0b10, 2) == 0b11

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            gf2e.gf_inv(0, 3)

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            gf2e.gf_mul(8, 1, 3)

    @pytest.mark.parametrize("e", sorted(gf2e.MODULI))
    def test_moduli_irreducible(self, e):
        assert gf2e.is_irreducible(gf2e.modulus(e))

    def test_documented_moduli(self):
        assert [gf2e.modulus(e) for e in (2, 3, 4, 5, 6)] == [0b111, 0b1011, 0b10011, 0b100101, 0b1000011]


class TestSelfDualBasis:
    def test_e1(self):
        assert gf2e.selfdual_basis(1).tolist() == [[1]]

    def test_e2_elements(self):
        assert set(gf2e.selfdual_elements(2)) == {0b10, 0b11}

    @pytest.mark.parametrize("e", range(1, 7))
    def test_trace_gram_is_identity(self, e):
        b = gf2e.selfdual_elements(e)
        gram = [[gf2e.gf_trace(gf2e.gf_mul(x, y, e), e) for y in b] for x in b]
        assert np.array_equal(gram, np.eye(e, dtype=int))

    @pytest.mark.parametrize("e", range(1, 5))
    def test_bit_dot_is_trace(self, e):
        for a in range(1 << e):
            for c in range(1 << e):
                dot = int(gf2e.to_selfdual(a, e) @ gf2e.to_selfdual(c, e)) & 1
                assert dot == gf2e.gf_trace(gf2e.gf_mul(a, c, e), e)

    @pytest.mark.parametrize("e", range(1, 6))
    def test_coordinates_round_trip(self, e):
        for a in range(1 << e):
            assert gf2e.from_selfdual(gf2e.to_selfdual(a, e), e) == a

    @pytest.mark.parametrize("e", range(1, 6))
    def test_basis_matrix_invertible(self, e):
        B = gf2e.selfdual_basis(e).astype(int)
        # a GF(2) matrix is invertible iff the columns span: check all 2^e combinations are distinct
        images = {tuple((B @ np.array(v)) % 2) for v in itertools.product((0, 1), repeat=e)}
        assert len(images) == 1 << e


class TestFieldLinearMaps:
    def test_identity(self):
        for e in (1, 2, 3):
            assert np.array_equal(gf2e.field_linear_to_gf2(1, 0, 0, 1, e), np.eye(2 * e, dtype=np.uint8))

    def test_swap(self):
        for e in (1, 2, 3):
            S = gf2e.field_linear_to_gf2(0, 1, 1, 0, e)
            I = np.eye(e, dtype=np.uint8)
            Z = np.zeros((e, e), dtype=np.uint8)
            assert np.array_equal(S, np.block([[Z, I], [I, Z]]))

    def test_diagonal_square(self):
        e, a = 2, 0b10
        ai = gf2e.gf_inv(a, e)
        S = gf2e.field_linear_to_gf2(a, 0, 0, ai, e)
        assert symplectic_check(S)
        a2 = gf2e.gf_mul(a, a, e)
        S2 = gf2e.field_linear_to_gf2(a2, 0, 0, gf2e.gf_inv(a2, e), e)
        assert np.array_equal(gf2_matmul(S, S), S2)

    def test_determinant_must_be_one(self):
        with pytest.raises(ValueError):
            gf2e.field_linear_to_gf2(1, 1, 1, 1, 2)

    def test_matches_field_action(self):
        e = 3
        rng = random.Random(5)
        for _ in range(50):
            a, b, d = (rng.randrange(1, 8) for _ in range(3))
            g = gf2e.gf_mul(1 ^ gf2e.gf_mul(b, d, e), gf2e.gf_inv(a, e), e)
            S = gf2e.field_linear_to_gf2(a, b, d, g, e)
            for x, z in itertools.product(range(8), repeat=2):
                v = np.concatenate([gf2e.to_selfdual(x, e), gf2e.to_selfdual(z, e)])
                out = (S.astype(int) @ v) % 2
                fx = gf2e.gf_mul(a, x, e) ^ gf2e.gf_mul(b, z, e)
                fz = gf2e.gf_mul(d, x, e) ^ gf2e.gf_mul(g, z, e)
                assert gf2e.from_selfdual(out[:e], e) == fx
                assert gf2e.from_selfdual(out[e:], e) == fz

    def test_homomorphism_and_symplectic(self):
        e = 3
        rng = random.Random(9)

        def sample():
            while True:
                a, b, d, g = (rng.randrange(8) for _ in range(4))
                if gf2e.gf_mul(a, g, e) ^ gf2e.gf_mul(b, d, e) == 1:
                    return a, b, d, g

        def matmul(p, q):
            a, b, d, g = p
            a2, b2, d2, g2 = q
            m = lambda u, v: gf2e.gf_mul(u, v, e)
            return (m(a, a2) ^ m(b, d2), m(a, b2) ^ m(b, g2), m(d, a2) ^ m(g, d2), m(d, b2) ^ m(g, g2))

        for _ in range(100):
            p, q = sample(), sample()
            Sp = gf2e.field_linear_to_gf2(*p, e)
            Sq = gf2e.field_linear_to_gf2(*q, e)
            assert symplectic_check(Sp)
            assert np.array_equal(gf2_matmul(Sp, Sq), gf2e.field_linear_to_gf2(*matmul(p, q), e))
