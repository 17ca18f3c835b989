"""Arithmetic in GF(2^e) and the map from field-linear actions to GF(2) matrices.

Field elements are plain ints whose bits are polynomial-basis coefficients
(bit i is the coefficient of x^i). Reduction uses one fixed irreducible
polynomial per degree, listed in :data:`MODULI`.

Pauli bit vectors are identified with field elements through a trace
self-dual basis ``b_1..b_e`` (``Tr(b_i b_j) = delta_ij``). In that basis the
bitwise dot product of coordinate vectors equals ``Tr(ab)``, which is what
makes a determinant-one map ``(x, z) -> (ax + bz, dx + gz)`` symplectic.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DimensionError

MODULI = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: (1 << 9) | (1 << 4) | 1,
    10: (1 << 10) | (1 << 3) | 1,
    11: (1 << 11) | (1 << 2) | 1,
    12: (1 << 12) | (1 << 6) | (1 << 4) | (1 << 1) | 1,
    13: (1 << 13) | (1 << 4) | (1 << 3) | (1 << 1) | 1,
    14: (1 << 14) | (1 << 5) | 1,
    15: (1 << 15) | (1 << 1) | 1,
    16: (1 << 16) | (1 << 5) | (1 << 3) | (1 << 1) | 1,
}


def modulus(e):
    try:
        return MODULI[e]
    except KeyError:
        raise ValueError(f"no modulus configured for degree {e} (supported 1..16)") from None


def _check(a, e):
    if not 0 <= a < (1 << e):
        raise DimensionError(f"{a} is not an element of GF(2^{e})")


def gf_add(a, b, e):
    _check(a, e)
    _check(b, e)
    return a ^ b


def gf_mul(a: int, b: int, e: int) -> int:
    """Product of ``a`` and ``b`` in GF(2^e)."""
    _check(a, e)
    _check(b, e)
    poly = modulus(e)
    top = 1 << e
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return out


def gf_pow(a, k, e):
    out = 1
    while k:
        if k & 1:
            out = gf_mul(out, a, e)
        a = gf_mul(a, a, e)
        k >>= 1
    return out


def gf_inv(a: int, e: int) -> int:
    """Multiplicative inverse; ``a^(2^e - 2)``."""
    _check(a, e)
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(2^e)")
    return gf_pow(a, (1 << e) - 2, e)


def gf_trace(a, e):
    """Absolute trace to GF(2): sum of the Frobenius conjugates."""
    t, c = 0, a
    for _ in range(e):
        t ^= c
        c = gf_mul(c, c, e)
    if t not in (0, 1):
        raise ArithmeticError("trace left GF(2); modulus is not irreducible")
    return t


def is_irreducible(poly):
    """Rabin-style check by trial division over all lower-degree polynomials."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False

    def pmod(a, b):
        db = b.bit_length() - 1
        while a and a.bit_length() - 1 >= db:
            a ^= b << (a.bit_length() - 1 - db)
        return a

    for d in range(1, deg // 2 + 1):
        for q in range(1 << d, 1 << (d + 1)):
            if pmod(poly, q) == 0:
                return False
    return True


@lru_cache(maxsize=None)
def selfdual_elements(e):
    """A trace self-dual basis as a tuple of field elements, found by ordered search."""
    if e < 1:
        raise ValueError("e must be at least 1")
    # Candidates have Tr(b^2) = Tr(b) = 1.
    cands = [a for a in range(1, 1 << e) if gf_trace(a, e) == 1]

    def search(chosen, start):
        if len(chosen) == e:
            return chosen
        for idx in range(start, len(cands)):
            b = cands[idx]
            if all(gf_trace(gf_mul(b, c, e), e) == 0 for c in chosen):
                found = search(chosen + [b], idx + 1)
                if found:
                    return found
        return None

    basis = search([], 0)
    if basis is None:
        raise ArithmeticError(f"no self-dual basis found for e={e}")
    return tuple(basis)


@lru_cache(maxsize=None)
def selfdual_basis(e):
    """Matrix whose column i holds the polynomial coordinates of basis element ``b_i``.

    Row r is the coefficient of x^r. Self-dual coordinates of ``v`` are
    ``Tr(v b_i)``; polynomial coordinates are recovered as ``B @ c``.
    """
    els = selfdual_elements(e)
    B = np.zeros((e, e), dtype=np.uint8)
    for i, b in enumerate(els):
        for r in range(e):
            B[r, i] = (b >> r) & 1
    B.setflags(write=False)
    return B


def to_selfdual(v, e):
    """Coordinate bits of ``v`` in the self-dual basis."""
    return np.array([gf_trace(gf_mul(v, b, e), e) for b in selfdual_elements(e)], dtype=np.uint8)


def from_selfdual(bits, e):
    out = 0
    for bit, b in zip(bits, selfdual_elements(e)):
        if int(bit) & 1:
            out ^= b
    return out


@lru_cache(maxsize=None)
def multiplication_matrix(a, e):
    """GF(2) matrix of ``v -> a v`` in self-dual coordinates (symmetric)."""
    els = selfdual_elements(e)
    M = np.zeros((e, e), dtype=np.uint8)
    for j, bj in enumerate(els):
        for i, bi in enumerate(els):
            M[j, i] = gf_trace(gf_mul(a, gf_mul(bi, bj, e), e), e)
    M.setflags(write=False)
    return M


def field_linear_to_gf2(alpha, beta, delta, gamma, e):
    """Bit matrix of ``(x, z) -> (alpha x + beta z, delta x + gamma z)``.

    Requires ``alpha gamma + beta delta = 1``.
    """
    det = gf_mul(alpha, gamma, e) ^ gf_mul(beta, delta, e)
    if det != 1:
        raise ValueError(f"determinant is {det}, expected 1")
    S = np.zeros((2 * e, 2 * e), dtype=np.uint8)
    S[:e, :e] = multiplication_matrix(alpha, e)
    S[:e, e:] = multiplication_matrix(beta, e)
    S[e:, :e] = multiplication_matrix(delta, e)
    S[e:, e:] = multiplication_matrix(gamma, e)
    return S
