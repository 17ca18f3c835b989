"""The two authentication protocols on dense statevectors.

Encode-then-encrypt (``ETE``): cipher = P_l U_k (msg (x) |0^n>), with a pad on
all m+n qubits. Encrypt-then-encode (``ETC``): cipher = U_k (P_l msg (x) |s>),
with a pad on the m message qubits and a uniform syndrome ``s``.

The receiver rejects a cipher of the wrong length outright.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .pauli import PauliIndex
from .ptc import CodeFamily
from .statevec import (
    apply_pauli,
    clifford_unitary,
    drop_qubits,
    num_qubits,
    project_bits,
    tensor,
    zero_state,
    basis_state,
)

ETE = "encode-then-encrypt"
ETC = "encrypt-then-encode"
VARIANTS = (ETE, ETC)


@dataclass(frozen=True)
class KeyMaterial:
    """Secret keys for one run: code key ``k``, Pauli pad, and syndrome ``s`` (ETC only)."""

    variant: str
    k: int
    pad: PauliIndex
    s: tuple = None

    def check(self, family: CodeFamily):
        m, N = family.dims.m, family.dims.N
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        family.decode_matrix(self.k)
        want = N if self.variant == ETE else m
        if self.pad.N != want:
            raise DimensionError(f"{self.variant} pad must cover {want} qubits, got {self.pad.N}")
        if self.variant == ETC:
            if self.s is None or len(self.s) != family.dims.n:
                raise DimensionError(f"syndrome key must have {family.dims.n} bits")
        elif self.s is not None:
            raise DimensionError("encode-then-encrypt keys carry no syndrome value")

    def bits(self):
        """Key bits excluding the code key, as a tuple."""
        extra = tuple(self.s) if self.s is not None else ()
        return self.pad.x + self.pad.z + extra


def random_keys(family: CodeFamily, variant, rng=None):
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    m, n, N = family.dims.m, family.dims.n, family.dims.N
    k = family.sample_key(rng)
    if variant == ETE:
        return KeyMaterial(ETE, k, PauliIndex.from_int(N, rng.randrange(4**N)))
    s = tuple(rng.randrange(2) for _ in range(n))
    return KeyMaterial(ETC, k, PauliIndex.from_int(m, rng.randrange(4**m)), s)


def all_keys(family: CodeFamily, variant):
    m, n, N = family.dims.m, family.dims.n, family.dims.N
    for k in range(len(family)):
        if variant == ETE:
            for p in range(4**N):
                yield KeyMaterial(ETE, k, PauliIndex.from_int(N, p))
        else:
            for p in range(4**m):
                for s in range(2**n):
                    bits = tuple((s >> (n - 1 - i)) & 1 for i in range(n))
                    yield KeyMaterial(ETC, k, PauliIndex.from_int(m, p), bits)


def variant_key_map(family: CodeFamily, keys: KeyMaterial) -> KeyMaterial:
    """Encode-then-encrypt keys producing the same cipher as the given ETC keys.

    P_{l'} U_k ~ U_k (P_l (x) X^s), so l' is the encode map applied to
    (l on the message, X^s on the syndrome).
    """
    keys.check(family)
    if keys.variant != ETC:
        raise ValueError("expected encrypt-then-encode keys")
    m, n = family.dims.m, family.dims.n
    inner = PauliIndex(keys.pad.x + tuple(keys.s), keys.pad.z + (0,) * n)
    E = family.encode_matrix(keys.k).astype(np.int64)
    return KeyMaterial(ETE, keys.k, PauliIndex.from_vector(E @ inner.vector() % 2))


def code_unitary(family: CodeFamily, k):
    return clifford_unitary(family.encode_matrix(k))


def _check_message(family, message):
    message = np.asarray(message, dtype=complex)
    if num_qubits(message) != family.dims.m:
        raise DimensionError(f"message must have {family.dims.m} qubits")
    return message


def _check_variant(keys, family, variant):
    if keys.variant != variant:
        raise ValueError(f"expected {variant} keys, got {keys.variant}")
    keys.check(family)


def ete_encrypt(family: CodeFamily, keys: KeyMaterial, message):
    _check_variant(keys, family, ETE)
    message = _check_message(family, message)
    state = tensor(message, zero_state(family.dims.n))
    state = code_unitary(family, keys.k) @ state
    return apply_pauli(state, keys.pad)


def etc_encrypt(family: CodeFamily, keys: KeyMaterial, message):
    _check_variant(keys, family, ETC)
    message = _check_message(family, message)
    m = family.dims.m
    padded = apply_pauli(message, keys.pad, range(m)) if m else message
    state = tensor(padded, basis_state(keys.s))
    return code_unitary(family, keys.k) @ state


@dataclass
class DecryptResult:
    """Outcome of a receiver run.

    ``message`` is the renormalised message on acceptance and ``None`` (the
    reject symbol) otherwise. ``accepted`` is a sampled decision, present
    only when a seed or rng was supplied.
    """

    accept_probability: float
    message: np.ndarray | None
    accepted: bool | None = None
    reason: str = ""

    @property
    def rejected(self):
        return self.message is None


def _finish(family, state, expected, post_pauli, rng):
    m, n, N = family.dims.m, family.dims.n, family.dims.N
    syn = list(range(m, N))
    acc = project_bits(state, syn, expected)
    p = float(np.vdot(acc, acc).real)
    msg = None
    if p > 1e-15:
        msg = drop_qubits(acc, syn, expected) / np.sqrt(p)
        if post_pauli is not None:
            msg = apply_pauli(msg, post_pauli)
    sampled = None
    if rng is not None:
        rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        sampled = rng.random() < p
    return DecryptResult(min(p, 1.0), msg, sampled)


def _length_ok(family, cipher):
    try:
        return num_qubits(cipher) == family.dims.N
    except DimensionError:
        return False


def _wrong_length(rng):
    return DecryptResult(0.0, None, False if rng is not None else None, reason="wrong cipher length")


def ete_decrypt(family: CodeFamily, keys: KeyMaterial, cipher, rng=None) -> DecryptResult:
    """Undo the pad, apply U_k^dag, and accept iff the syndrome reads 0^n."""
    _check_variant(keys, family, ETE)
    cipher = np.asarray(cipher, dtype=complex)
    if not _length_ok(family, cipher):
        return _wrong_length(rng)
    state = apply_pauli(cipher, keys.pad)
    state = code_unitary(family, keys.k).conj().T @ state
    return _finish(family, state, (0,) * family.dims.n, None, rng)


def etc_decrypt(family: CodeFamily, keys: KeyMaterial, cipher, rng=None) -> DecryptResult:
    """Apply U_k^dag, accept iff the syndrome reads ``s``, then undo the message pad."""
    _check_variant(keys, family, ETC)
    cipher = np.asarray(cipher, dtype=complex)
    if not _length_ok(family, cipher):
        return _wrong_length(rng)
    state = code_unitary(family, keys.k).conj().T @ cipher
    return _finish(family, state, tuple(keys.s), keys.pad, rng)


def encrypt(family, keys, message):
    return (ete_encrypt if keys.variant == ETE else etc_encrypt)(family, keys, message)


def decrypt(family, keys, cipher, rng=None):
    return (ete_decrypt if keys.variant == ETE else etc_decrypt)(family, keys, cipher, rng)


def weak_auth_decrypt(family: CodeFamily, keys: KeyMaterial, cipher, rng=None) -> DecryptResult:
    """Receiver of the scheme without key recycling; same accept rule, no key released."""
    return decrypt(family, keys, cipher, rng)
