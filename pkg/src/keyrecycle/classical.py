"""Classical pieces: the one-bit MAC and a repetition-code wrapper."""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction


def _check_eta(eta):
    if eta < 2 or eta % 2:
        raise ValueError(f"MAC key length must be a positive even number, got {eta}")


def mac_tag(key, x):
    """Tag of bit ``x``: the first half of ``key`` for x=0, the second half for x=1."""
    key = tuple(int(b) for b in key)
    _check_eta(len(key))
    if x not in (0, 1):
        raise ValueError("message must be a single bit")
    h = len(key) // 2
    return key[:h] if x == 0 else key[h:]


def mac_verify(key, x, tag):
    if x not in (0, 1):
        return False
    return tuple(int(b) for b in tag) == mac_tag(key, x)


@dataclass(frozen=True)
class ForgeryReport:
    impersonation: Fraction
    substitution: Fraction

    @property
    def best(self):
        return max(self.impersonation, self.substitution)


def mac_forgery(eta) -> ForgeryReport:
    """Exact optimal forging probabilities by enumeration over all keys.

    Impersonation: guess a pair with no observation. Substitution: see a
    valid (x, tag) and output a pair with a different message. The message
    bit observed is taken uniform; the adversary adapts to what it sees.
    """
    _check_eta(eta)
    keys = list(itertools.product((0, 1), repeat=eta))
    tags = list(itertools.product((0, 1), repeat=eta // 2))
    nk = len(keys)
    best_imp = Fraction(0)
    for x in (0, 1):
        for t in tags:
            hits = sum(mac_verify(k, x, t) for k in keys)
            best_imp = max(best_imp, Fraction(hits, nk))
    sub = Fraction(0)
    for x in (0, 1):
        for t in tags:
            consistent = [k for k in keys if mac_tag(k, x) == t]
            if not consistent:
                continue
            # best reply to the observed pair, weighted by its probability
            best = max(sum(mac_verify(k, 1 - x, t2) for k in consistent) for t2 in tags)
            sub += Fraction(1, 2) * Fraction(best, nk)
    return ForgeryReport(best_imp, sub)


# Error correction


@dataclass(frozen=True)
class ECC:
    """Classical code descriptor: ``identity`` or ``repetition-r`` (r odd)."""

    kind: str
    r: int = 1

    @classmethod
    def parse(cls, text):
        if isinstance(text, ECC):
            return text
        if text == "identity":
            return cls("identity")
        mt = re.fullmatch(r"repetition-(\d+)", str(text))
        if mt and int(mt.group(1)) % 2 == 1:
            return cls("repetition", int(mt.group(1)))
        raise ValueError(f"unsupported code descriptor {text!r}")


def ecc_encode(code, bits):
    code = ECC.parse(code)
    bits = tuple(int(b) for b in bits)
    if code.kind == "identity":
        return bits
    return tuple(b for b in bits for _ in range(code.r))


def ecc_decode(code, bits):
    code = ECC.parse(code)
    bits = tuple(int(b) for b in bits)
    if code.kind == "identity":
        return bits
    r = code.r
    if len(bits) % r:
        raise ValueError(f"length {len(bits)} is not a multiple of {r}")
    return tuple(int(2 * sum(bits[i : i + r]) > r) for i in range(0, len(bits), r))


def ecc_residual_error(code, p):
    """Probability that one payload bit is decoded wrongly over a bit-flip channel."""
    code = ECC.parse(code)
    if code.kind == "identity":
        return p
    r = code.r
    return sum(math.comb(r, t) * p**t * (1 - p) ** (r - t) for t in range(r // 2 + 1, r + 1))


def ecc_monte_carlo(code, p, trials, seed=0):
    """Empirical per-bit failure rate of encode, flip, decode."""
    code = ECC.parse(code)
    rng = random.Random(seed)
    fails = 0
    for _ in range(trials):
        bit = rng.randrange(2)
        noisy = tuple(b ^ (rng.random() < p) for b in ecc_encode(code, (bit,)))
        fails += ecc_decode(code, noisy)[0] != bit
    return fails / trials
