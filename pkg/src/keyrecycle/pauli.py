"""Binary symplectic representation of Pauli operators.

A Pauli on N qubits is indexed by two bit vectors ``(x, z)`` and stands for
``X^x Z^z`` with no scalar prefactor. Vectors are laid out as the column
``(x || z)`` of length 2N. Qubit 0 is the first message qubit; syndrome qubits
follow the message qubits.

Symplectic matrices act on that column from the left, and the form is
``J = [[0, I], [I, 0]]`` so that ``v^T J w`` is exactly the commutation bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, NonSymplecticError

DEFAULT_CAP = 6


@dataclass(frozen=True)
class Dimensions:
    """Message/syndrome split of an authentication code.

    ``m`` message qubits are followed by ``n`` syndrome qubits.
    """

    m: int
    n: int
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DimensionError(f"need m >= 1 and n >= 1, got m={self.m}, n={self.n}")

    @property
    def N(self):
        return self.m + self.n

    @property
    def d(self):
        return 2**self.N

    def check_cap(self):
        from .errors import CapExceededError

        if self.N > self.cap:
            raise CapExceededError(f"m+n={self.N} exceeds enumeration cap {self.cap}")


@dataclass(frozen=True)
class PauliIndex:
    """Index ``(x, z)`` of the Pauli ``X^x Z^z`` on ``len(x)`` qubits."""

    x: tuple
    z: tuple

    def __post_init__(self):
        x = tuple(int(b) & 1 for b in self.x)
        z = tuple(int(b) & 1 for b in self.z)
        if len(x) != len(z):
            raise DimensionError(f"x has {len(x)} bits but z has {len(z)}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def N(self):
        return len(self.x)

    def is_identity(self):
        return not any(self.x) and not any(self.z)

    def vector(self):
        return np.array(self.x + self.z, dtype=np.uint8)

    def to_int(self):
        return vector_to_int(self.vector())

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=np.uint8) & 1
        if v.ndim != 1 or v.size % 2:
            raise DimensionError(f"expected an even-length bit vector, got shape {v.shape}")
        h = v.size // 2
        return cls(tuple(v[:h]), tuple(v[h:]))

    @classmethod
    def from_int(cls, N, i):
        return cls.from_vector(int_to_vector(i, 2 * N))

    @classmethod
    def zero(cls, N):
        return cls((0,) * N, (0,) * N)

    @classmethod
    def single(cls, N, qubit, kind):
        """Single-qubit X, Y or Z on ``qubit``."""
        x = [0] * N
        z = [0] * N
        if kind in "XY":
            x[qubit] = 1
        if kind in "ZY":
            z[qubit] = 1
        return cls(tuple(x), tuple(z))

    @classmethod
    def from_label(cls, label):
        """Parse a label such as ``"XIZY"`` (qubit 0 first)."""
        x, z = [], []
        for ch in label.upper():
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli label character {ch!r}")
            x.append(int(ch in "XY"))
            z.append(int(ch in "ZY"))
        return cls(tuple(x), tuple(z))

    @property
    def label(self):
        return "".join("IZXY"[2 * a + b] for a, b in zip(self.x, self.z))

    def __str__(self):
        return self.label


def _check_same(j, l):
    if j.N != l.N:
        raise DimensionError(f"Pauli indices on {j.N} and {l.N} qubits")


def symplectic_product(j: PauliIndex, l: PauliIndex) -> int:
    """Commutation bit: 0 if the Paulis commute, 1 if they anticommute."""
    _check_same(j, l)
    s = sum(a & b for a, b in zip(j.x, l.z)) + sum(a & b for a, b in zip(j.z, l.x))
    return s & 1


def pauli_compose(j: PauliIndex, l: PauliIndex) -> PauliIndex:
    """Index of the product, phases dropped."""
    _check_same(j, l)
    return PauliIndex(
        tuple(a ^ b for a, b in zip(j.x, l.x)),
        tuple(a ^ b for a, b in zip(j.z, l.z)),
    )


def int_to_vector(i, length):
    """Big-endian bits of ``i``: element 0 is the most significant."""
    return np.array([(i >> (length - 1 - t)) & 1 for t in range(length)], dtype=np.uint8)


def vector_to_int(v):
    out = 0
    for b in np.asarray(v).ravel():
        out = (out << 1) | (int(b) & 1)
    return out


@lru_cache(maxsize=None)
def all_vectors(N):
    """All 4^N index vectors as rows, in integer order (row i is ``int_to_vector(i)``)."""
    L = 2 * N
    idx = np.arange(4**N, dtype=np.int64)
    shifts = np.arange(L - 1, -1, -1, dtype=np.int64)
    out = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


def symplectic_form(N):
    J = np.zeros((2 * N, 2 * N), dtype=np.uint8)
    J[:N, N:] = np.eye(N, dtype=np.uint8)
    J[N:, :N] = np.eye(N, dtype=np.uint8)
    return J


def gf2_matmul(A, B):
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64) % 2).astype(np.uint8)


def symplectic_check(S) -> bool:
    """True iff ``S^T J S = J`` over GF(2)."""
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        return False
    N = S.shape[0] // 2
    J = symplectic_form(N)
    return bool(np.array_equal(gf2_matmul(gf2_matmul(S.T, J), S), J))


def symplectic_inverse(S):
    """Inverse of a symplectic matrix, ``J S^T J``."""
    S = np.asarray(S, dtype=np.uint8)
    J = symplectic_form(S.shape[0] // 2)
    return gf2_matmul(gf2_matmul(J, S.T), J)


def symplectic_apply(S, l: PauliIndex) -> PauliIndex:
    """Image of ``l`` under the index map ``S``."""
    S = np.asarray(S, dtype=np.uint8)
    if S.shape != (2 * l.N, 2 * l.N):
        raise DimensionError(f"matrix of shape {S.shape} cannot act on {l.N} qubits")
    if not symplectic_check(S):
        raise NonSymplecticError("matrix is not symplectic")
    return PauliIndex.from_vector(gf2_matmul(S, l.vector()))


def sp_order(N):
    """|Sp(2N, 2)| = 2^{N^2} prod_{j=1}^N (4^j - 1)."""
    out = 2 ** (N * N)
    for j in range(1, N + 1):
        out *= 4**j - 1
    return out


# Transvection-based bijection between integers and Sp(2N, 2). Internally this
# works in the interleaved ordering (x1, z1, x2, z2, ...), whose form is a
# direct sum of [[0,1],[1,0]] blocks, and converts to (x || z) at the end.


def _inner(v, w):
    return int((v[0::2] @ w[1::2] + v[1::2] @ w[0::2]) % 2)


def _transvect(k, v):
    return (v + _inner(k, v) * k) % 2


def _find_transvection(x, y):
    """Two vectors h1, h2 with y = T_{h1} T_{h2} x (either may be zero)."""
    out = np.zeros((2, x.size), dtype=np.int64)
    if np.array_equal(x, y):
        return out
    if _inner(x, y) == 1:
        out[0] = (x + y) % 2
        return out
    z = np.zeros(x.size, dtype=np.int64)
    for i in range(x.size // 2):
        a, b = 2 * i, 2 * i + 1
        if (x[a] or x[b]) and (y[a] or y[b]):
            z[a] = (x[a] + y[a]) % 2
            z[b] = (x[b] + y[b]) % 2
            if not (z[a] or z[b]):
                z[b] = 1
                if x[a] != x[b]:
                    z[a] = 1
            out[0] = (x + z) % 2
            out[1] = (y + z) % 2
            return out
    for i in range(x.size // 2):
        a, b = 2 * i, 2 * i + 1
        if (x[a] or x[b]) and not (y[a] or y[b]):
            if x[a] == x[b]:
                z[b] = 1
            else:
                z[b] = x[a]
                z[a] = x[b]
            break
    for i in range(x.size // 2):
        a, b = 2 * i, 2 * i + 1
        if not (x[a] or x[b]) and (y[a] or y[b]):
            if y[a] == y[b]:
                z[b] = 1
            else:
                z[b] = y[a]
                z[a] = y[b]
            break
    out[0] = (x + z) % 2
    out[1] = (y + z) % 2
    return out


def _symplectic_interleaved(i, N):
    nn = 2 * N
    s = (1 << nn) - 1
    k = (i % s) + 1
    i //= s
    f1 = np.array([(k >> t) & 1 for t in range(nn)], dtype=np.int64)
    e1 = np.zeros(nn, dtype=np.int64)
    e1[0] = 1
    T = _find_transvection(e1, f1)
    rest = i % (1 << (nn - 1))
    bits = np.array([(rest >> t) & 1 for t in range(nn - 1)], dtype=np.int64)
    eprime = e1.copy()
    eprime[2:] = bits[1:]
    h0 = _transvect(T[0], eprime)
    h0 = _transvect(T[1], h0)
    if bits[0] == 1:
        f1 = np.zeros_like(f1)
    g = np.zeros((nn, nn), dtype=np.int64)
    g[0, 0] = g[1, 1] = 1
    if N > 1:
        g[2:, 2:] = _symplectic_interleaved(i >> (nn - 1), N - 1)
    for j in range(nn):
        row = g[j]
        for h in (T[0], T[1], h0, f1):
            row = _transvect(h, row)
        g[j] = row
    return g


def _interleaved_to_block(N):
    """Permutation matrix P with P @ (x1,z1,x2,z2,..) = (x1..xN, z1..zN)."""
    P = np.zeros((2 * N, 2 * N), dtype=np.int64)
    for q in range(N):
        P[q, 2 * q] = 1
        P[N + q, 2 * q + 1] = 1
    return P


def symplectic_from_index(i, N):
    """The ``i``-th element of Sp(2N, 2) for ``0 <= i < sp_order(N)``."""
    if not 0 <= i < sp_order(N):
        raise ValueError(f"index {i} out of range for Sp({2 * N}, 2)")
    g = _symplectic_interleaved(i, N)
    P = _interleaved_to_block(N)
    return (P @ g @ P.T % 2).astype(np.uint8)


def random_symplectic(N, seed=None):
    """Uniform element of Sp(2N, 2).

    ``seed`` may be an int, ``None`` or a :class:`random.Random`; the draw is a
    uniform integer below the group order, so sampling is exactly uniform.
    """
    if N < 1:
        raise DimensionError("N must be at least 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return symplectic_from_index(rng.randrange(sp_order(N)), N)
