"""Keyed families of symplectic decode maps and their detection errors.

A family stores, for each key ``k``, the bit matrix ``D_k`` with
``U_k^dag P_l U_k ~ P_{D_k l}``. The receiver sees a Pauli error ``l`` as
``D_k l``; the error is detected iff the syndrome qubits carry a bit flip.
"""

from __future__ import annotations

import enum
import math
import os
import random
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from . import gf2e
from .errors import CapExceededError, DimensionError, NonSymplecticError, PTCFormatError
from .pauli import (
    DEFAULT_CAP,
    Dimensions,
    PauliIndex,
    random_symplectic,
    symplectic_check,
    symplectic_inverse,
)

SL2Key = namedtuple("SL2Key", "alpha beta delta gamma")

WORKERS_ENV = "KEYRECYCLE_WORKERS"


class ErrorClass(enum.Enum):
    DETECTED = "Detected"
    UNDETECTED_TRIVIAL = "UndetectedTrivial"
    UNDETECTED_HARMFUL = "UndetectedHarmful"


@dataclass(frozen=True)
class EpsilonReport:
    eps_weak: Fraction
    eps_strong: Fraction
    worst_weak: PauliIndex
    worst_strong: PauliIndex
    num_keys: int
    # undetected counts per Pauli index (integer order), index 0 unused
    undetected: np.ndarray = field(repr=False, compare=False)
    harmful: np.ndarray = field(repr=False, compare=False)


class CodeFamily:
    """Immutable keyed family of decode matrices.

    ``decode`` has shape ``(|K|, 2N, 2N)``. ``labels`` optionally names each
    key (SL(2) tuples for the Chau family). ``modulus`` is the field modulus
    for field-based families, written into saved files.
    """

    def __init__(self, dims: Dimensions, decode, name="custom", labels=None, modulus=None, validate=True):
        decode = np.asarray(decode, dtype=np.uint8) & 1
        L = 2 * dims.N
        if decode.ndim != 3 or decode.shape[1:] != (L, L):
            raise DimensionError(f"decode maps must have shape (K, {L}, {L}), got {decode.shape}")
        if decode.shape[0] < 1:
            raise ValueError("a family needs at least one key")
        if validate:
            for k in range(decode.shape[0]):
                if not symplectic_check(decode[k]):
                    raise NonSymplecticError(f"decode matrix for key {k} is not symplectic", key=k)
        decode.setflags(write=False)
        self.dims = dims
        self.decode = decode
        self.name = name
        self.labels = tuple(labels) if labels is not None else None
        self.modulus = modulus

    def __len__(self):
        return self.decode.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, CodeFamily)
            and self.dims.m == other.dims.m
            and self.dims.n == other.dims.n
            and np.array_equal(self.decode, other.decode)
            and self.modulus == other.modulus
        )

    def __repr__(self):
        return f"CodeFamily({self.name!r}, m={self.dims.m}, n={self.dims.n}, keys={len(self)})"

    @property
    def nu(self):
        """Key length in bits, rounded up for non-power-of-two families."""
        return math.ceil(math.log2(len(self))) if len(self) > 1 else 0

    def decode_matrix(self, k):
        if not 0 <= k < len(self):
            raise KeyError(f"unknown key {k} (family has {len(self)} keys)")
        return self.decode[k]

    @cached_property
    def encode(self):
        out = np.stack([symplectic_inverse(D) for D in self.decode])
        out.setflags(write=False)
        return out

    def encode_matrix(self, k):
        self.decode_matrix(k)
        return self.encode[k]

    def sample_key(self, rng):
        """Uniform key index; ``rng`` is a :class:`random.Random`."""
        return rng.randrange(len(self))


def decode_index(family: CodeFamily, k: int, l: PauliIndex) -> PauliIndex:
    """Index seen after decoding with key ``k`` when error ``l`` hit the cipher."""
    if l.N != family.dims.N:
        raise DimensionError(f"Pauli on {l.N} qubits, family acts on {family.dims.N}")
    D = family.decode_matrix(k)
    return PauliIndex.from_vector((D.astype(np.int64) @ l.vector()) % 2)


def _classify_decoded(lp: PauliIndex, m: int) -> ErrorClass:
    if any(lp.x[m:]):
        return ErrorClass.DETECTED
    if any(lp.x[:m]) or any(lp.z[:m]):
        return ErrorClass.UNDETECTED_HARMFUL
    return ErrorClass.UNDETECTED_TRIVIAL


def classify(family: CodeFamily, k: int, l: PauliIndex) -> ErrorClass:
    if l.is_identity():
        raise ValueError("the identity is not an error")
    return _classify_decoded(decode_index(family, k, l), family.dims.m)


# Vectorised classification. Pauli vectors are packed into ints with vector
# position p at bit (2N-1-p), matching PauliIndex.to_int.


def _column_ints(decode):
    """Packed images of the unit vectors, shape (K, 2N)."""
    K, L, _ = decode.shape
    weights = (1 << np.arange(L - 1, -1, -1, dtype=np.int64))
    return (decode.astype(np.int64) * weights[None, :, None]).sum(axis=1)


def image_table(decode):
    """Packed image of every Pauli index under every key, shape (K, 4^N)."""
    cols = _column_ints(decode)
    K, L = cols.shape
    out = np.zeros((K, 1 << L), dtype=np.int64)
    for t in range(L):
        # integer bit t is vector position L-1-t
        col = cols[:, L - 1 - t]
        span = 1 << t
        out[:, span : 2 * span] = out[:, :span] ^ col[:, None]
    return out


def _masks(dims):
    m, n, N = dims.m, dims.n, dims.N
    L = 2 * N

    def bit(p):
        return 1 << (L - 1 - p)

    syn = sum(bit(p) for p in range(m, N))
    msg = sum(bit(p) for p in range(m)) + sum(bit(N + p) for p in range(m))
    return syn, msg


def _count_chunk(decode, dims):
    img = image_table(decode)
    syn, msg = _masks(dims)
    undetected = (img & syn) == 0
    harmful = undetected & ((img & msg) != 0)
    return undetected.sum(axis=0), harmful.sum(axis=0)


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def undetected_counts(family: CodeFamily, chunk=256):
    """Per-Pauli counts of keys leaving it undetected / undetected and harmful."""
    dims = family.dims
    if dims.N > dims.cap:
        raise CapExceededError(f"m+n={dims.N} exceeds enumeration cap {dims.cap}")
    K = len(family)
    chunks = [family.decode[i : i + chunk] for i in range(0, K, chunk)]
    workers = _workers()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _count_chunk(c, dims), chunks))
    else:
        parts = [_count_chunk(c, dims) for c in chunks]
    # summation order is fixed, so results do not depend on the worker count
    und = sum(p[0] for p in parts)
    harm = sum(p[1] for p in parts)
    return und, harm


def epsilon_report(family: CodeFamily) -> EpsilonReport:
    und, harm = undetected_counts(family)
    N = family.dims.N
    K = len(family)
    und = und.copy()
    harm = harm.copy()
    und[0] = 0
    harm[0] = 0
    i_strong = int(np.argmax(und))
    i_weak = int(np.argmax(harm))
    return EpsilonReport(
        eps_weak=Fraction(int(harm[i_weak]), K),
        eps_strong=Fraction(int(und[i_strong]), K),
        worst_weak=PauliIndex.from_int(N, i_weak if harm[i_weak] else 1),
        worst_strong=PauliIndex.from_int(N, i_strong if und[i_strong] else 1),
        num_keys=K,
        undetected=und,
        harmful=harm,
    )


def epsilon_strong(family: CodeFamily) -> Fraction:
    return epsilon_report(family).eps_strong


def epsilon_weak(family: CodeFamily) -> Fraction:
    return epsilon_report(family).eps_weak


def strong_lower_bound(m, n) -> Fraction:
    """Smallest possible strong error: (2^{2m+n}-1)/(2^{2m+2n}-1)."""
    return Fraction(2 ** (2 * m + n) - 1, 2 ** (2 * m + 2 * n) - 1)


def sl2_enumerate(e, cap=DEFAULT_CAP):
    """All of SL(2, 2^e) in lexicographic (alpha, beta, delta, gamma) order."""
    if e < 1:
        raise ValueError("e must be at least 1")
    if e > cap:
        raise CapExceededError(f"degree {e} exceeds enumeration cap {cap}")
    d = 1 << e
    inv = [0] + [gf2e.gf_inv(a, e) for a in range(1, d)]
    out = []
    for a in range(d):
        for b in range(d):
            if a == 0:
                if b == 0:
                    continue
                dl = inv[b]
                out.extend(SL2Key(a, b, dl, g) for g in range(d))
            else:
                for dl in range(d):
                    g = gf2e.gf_mul(1 ^ gf2e.gf_mul(b, dl, e), inv[a], e)
                    out.append(SL2Key(a, b, dl, g))
    out.sort()
    return out


def chau_family(m, n, cap=DEFAULT_CAP) -> CodeFamily:
    """Family indexed by SL(2, 2^{m+n}); key ``k`` decodes with its inverse matrix."""
    dims = Dimensions(m, n, cap)
    if dims.N > cap:
        raise CapExceededError(f"m+n={dims.N} exceeds enumeration cap {cap}")
    e = dims.N
    keys = sl2_enumerate(e, cap)
    decode = np.stack([gf2e.field_linear_to_gf2(k.gamma, k.beta, k.delta, k.alpha, e) for k in keys])
    # images of SL(2) are symplectic by construction; checked in tests
    return CodeFamily(dims, decode, name="chau", labels=keys, modulus=gf2e.modulus(e), validate=False)


def random_clifford_family(m, n, size, seed=0, cap=DEFAULT_CAP) -> CodeFamily:
    dims = Dimensions(m, n, cap)
    if size < 1:
        raise ValueError("size must be positive")
    rng = random.Random(seed)
    decode = np.stack([random_symplectic(dims.N, rng) for _ in range(size)])
    return CodeFamily(dims, decode, name=f"random:{size}", validate=False)


def identity_family(m, n, cap=DEFAULT_CAP) -> CodeFamily:
    """Single key whose code is the identity: syndrome qubits are simply appended."""
    dims = Dimensions(m, n, cap)
    return CodeFamily(dims, np.eye(2 * dims.N, dtype=np.uint8)[None], name="identity")


# File format


def _format_modulus(mod):
    return "-" if mod is None else hex(mod)


def _parse_modulus(text):
    if text == "-":
        return None
    try:
        return int(text, 16)
    except ValueError:
        raise PTCFormatError(f"bad modulus {text!r}") from None


def dumps_family(family: CodeFamily) -> str:
    d = family.dims
    lines = ["PTC v1", f"m={d.m} n={d.n} keys={len(family)} modulus={_format_modulus(family.modulus)}"]
    for D in family.decode:
        lines.extend("".join(str(int(b)) for b in row) for row in D)
    return "\n".join(lines) + "\n"


def save_family(family: CodeFamily, path):
    Path(path).write_bytes(dumps_family(family).encode("ascii"))


def loads_family(text: str, cap=DEFAULT_CAP, name="file") -> CodeFamily:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].rstrip("\r") != "PTC v1":
        got = lines[0] if lines else ""
        raise PTCFormatError(f"unsupported header {got!r}, expected 'PTC v1'")
    if len(lines) < 2:
        raise PTCFormatError("missing parameter line")
    fields = {}
    for tok in lines[1].split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise PTCFormatError(f"bad parameter token {tok!r}")
        fields[key] = val
    try:
        m, n, K = int(fields["m"]), int(fields["n"]), int(fields["keys"])
        mod = _parse_modulus(fields["modulus"])
    except KeyError as exc:
        raise PTCFormatError(f"missing parameter {exc.args[0]!r}") from None
    except ValueError:
        raise PTCFormatError(f"bad parameter line {lines[1]!r}") from None
    try:
        dims = Dimensions(m, n, cap)
    except DimensionError as exc:
        raise PTCFormatError(str(exc)) from None
    L = 2 * dims.N
    body = lines[2:]
    if len(body) != K * L:
        raise PTCFormatError(f"expected {K * L} matrix rows for {K} keys, found {len(body)}")
    decode = np.zeros((K, L, L), dtype=np.uint8)
    for r, row in enumerate(body):
        if len(row) != L or set(row) - {"0", "1"}:
            raise PTCFormatError(f"row {r + 3} must be {L} characters of 0/1, got {row!r}")
        decode[r // L, r % L] = [int(c) for c in row]
    return CodeFamily(dims, decode, name=name, modulus=mod)


def load_family(path, cap=DEFAULT_CAP) -> CodeFamily:
    text = Path(path).read_bytes().decode("ascii")
    return loads_family(text, cap=cap, name=f"file:{path}")
