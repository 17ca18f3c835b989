"""Concrete adversaries: Pauli substitution, impersonation, EPR substitution
with entangled memory, and key extraction from recycled keys.

Strategies are run exactly through :mod:`keyrecycle.acsim`; the battery
reports each strategy's real-versus-ideal advantage next to the bound it
must respect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .acsim import (
    Apply,
    ApplyKeyed,
    BellMeasure,
    Forget,
    Measure,
    Prepare,
    Send,
    Split,
    Strategy,
    distinguisher_advantage,
    run_session,
)
from .budget import qauth_error, weak_error
from .errors import DimensionError
from .pauli import PauliIndex
from .protocol import ETC, ETE, VARIANTS
from .ptc import CodeFamily, epsilon_report
from .resources import (
    ideal_qauth_system,
    real_qauth_system,
    weak_ideal_system,
)
from .statevec import (
    antisymmetric_state,
    bell_pairs,
    clifford_unitary,
    num_qubits,
    partial_trace,
    pauli_matrix,
)

UNITARY_TOL = 1e-9
MAX_MEMORY_QUBITS = 2


# Index-level attacks


def best_pauli_substitution(family: CodeFamily):
    """Pauli maximising the key-averaged chance of an accepted, altered message.

    Returns ``(pauli, success)`` with ``success`` the number of keys for which
    the Pauli is undetected and harmful, over |K|.
    """
    rep = epsilon_report(family)
    return rep.worst_weak, rep.eps_weak


def _fake_density(fake, N):
    if isinstance(fake, str):
        if fake != "antisymmetric":
            raise ValueError(f"unknown fake {fake!r}")
        return partial_trace(antisymmetric_state(N), range(N), 2 * N)
    fake = np.asarray(fake, dtype=complex)
    if fake.ndim == 1:
        q = num_qubits(fake)
        if q == N:
            return np.outer(fake, fake.conj())
        if q == 2 * N:
            # first N qubits are sent, the rest is kept as reference
            return partial_trace(fake, range(N), q)
        raise DimensionError(f"fake has {q} qubits, expected {N} or {2 * N}")
    if fake.shape != (1 << N, 1 << N):
        raise DimensionError(f"fake density matrix must be {1 << N}x{1 << N}")
    return fake


def impersonation_acceptance(family: CodeFamily, fake="antisymmetric", variant=ETE, keys=None):
    """Exact acceptance probability of a forged cipher sent with no valid example.

    ``fake`` is an N-qubit state, a 2N-qubit state whose first N qubits are
    sent, an N-qubit density matrix, or ``"antisymmetric"``. The result is
    averaged over all keys, or evaluated for the single ``keys`` given.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    d = family.dims
    rho = _fake_density(fake, d.N)
    if keys is not None:
        from .protocol import decrypt

        keys.check(family)
        vals, vecs = np.linalg.eigh((rho + rho.conj().T) / 2)
        return float(sum(v * decrypt(family, keys, vecs[:, i]).accept_probability for i, v in enumerate(vals) if v > 1e-15))
    if variant == ETE:
        # the uniform pad twirls the fake into the maximally mixed state
        paulis = [pauli_matrix(PauliIndex.from_int(d.N, j)) for j in range(4**d.N)]
        rho = sum(P @ rho @ P.conj().T for P in paulis) / 4**d.N
    syn_dim = 1 << d.n
    total = 0.0
    for E in family.encode:
        U = clifford_unitary(E)
        dec = U.conj().T @ rho @ U
        blocks = np.einsum("asbt->st", dec.reshape(1 << d.m, syn_dim, 1 << d.m, syn_dim))
        diag = np.real(np.diag(blocks))
        # ETE expects syndrome 0; ETC expects a uniform s
        total += diag[0] if variant == ETE else diag.sum() / syn_dim
    return float(total / len(family))


# Key extraction


@dataclass
class AttackOutcome:
    success: float
    recovered: int
    total: int
    per_key: dict = field(default_factory=dict)

    def summary(self):
        return f"recovered {self.recovered}/{self.total} keys, success {round(self.success, 12)}"


def _guess_key(family, released, release_bits):
    K = len(family)
    if release_bits is None:
        k = released
    else:
        k = released << max(family.nu - release_bits, 0)
    return k if 0 <= k < K else 0


def key_extraction_strategy(family: CodeFamily, withhold=False, release_bits=None):
    """Learn the pad and syndrome key of an encrypt-then-encode run from the recycled code key.

    The distinguisher keeps Alice's cipher, sends Bob a blank one, asks for
    the recycled key, decodes the kept cipher, reads the syndrome key off
    the S register and Bell-measures the message half against its reference.
    """
    d = family.dims
    decoders = {}

    def decoder(value):
        k = 0 if value is None else _guess_key(family, int(value[0]), release_bits)
        if k not in decoders:
            decoders[k] = clifford_unitary(family.encode_matrix(k)).conj().T
        return decoders[k]

    acts = [
        Prepare(["R", "M"], [d.m, d.m], bell_pairs(d.m)),
        Send("alice.msg", reg="M"),
        Prepare(["F"], [d.N]),
        Send("eve.cipher_in", reg="F"),
    ]
    rejected = {"bob.out": 0}
    if withhold:
        acts.append(ApplyKeyed(["C"], "bob.out", lambda v: decoder(None), where=rejected))
    else:
        acts.append(Send("bob.req"))
        acts.append(ApplyKeyed(["C"], "bob.key", decoder, where=rejected))
    acts += [
        Split("C", [("Mc", d.m), ("S", d.n)], where=rejected),
        Measure(["S"], "guess.s", where=rejected),
        BellMeasure("Mc", "R", "guess.pad", where=rejected),
        Forget(["C", "R"], where={"bob.out": 1}),
    ]
    return Strategy("key extraction", acts)


def key_extraction_attack(family: CodeFamily, withhold=False, release_bits=None) -> AttackOutcome:
    """Run :func:`key_extraction_strategy` against the encrypt-then-encode real system.

    Success means the guessed (pad, s) equals the true keys. A run where Bob
    accepts the blank cipher hands out the full key and counts as success
    unless the key is withheld.
    """
    system = real_qauth_system(family, ETC, release_bits=release_bits)
    t = run_session(system, key_extraction_strategy(family, withhold, release_bits))
    per_key_hit = np.zeros(len(family))
    per_key_mass = np.zeros(len(family))
    for b in t.batches:
        p = b.probabilities()
        ks = b.data["key.k"]
        if b.view["bob.out"][0] == 1:
            hit = np.full(b.B, not withhold)
        else:
            hit = (b.view["guess.pad"] == b.data["key.pad"]) & (b.view["guess.s"] == b.data["key.s"])
        np.add.at(per_key_mass, ks.astype(np.int64), p)
        np.add.at(per_key_hit, ks.astype(np.int64), p * hit.astype(float))
    per_key = {int(k): float(per_key_hit[k] / per_key_mass[k]) for k in range(len(family)) if per_key_mass[k] > 0}
    success = float(per_key_hit.sum())
    recovered = sum(v >= 1 - 1e-9 for v in per_key.values())
    return AttackOutcome(success, recovered, len(family), per_key)


# EPR substitution


def _pauli_key(j, N):
    if isinstance(j, PauliIndex):
        if j.N != N:
            raise DimensionError(f"Pauli on {j.N} qubits, cipher has {N}")
        return j
    return PauliIndex.from_int(N, int(j))


def epr_unitary(table, N):
    """U = sum_j P_j (x) E_j on cipher (first) and memory; raises ValueError unless unitary."""
    if not table:
        raise ValueError("empty attack table")
    mats = {_pauli_key(j, N): np.asarray(E, dtype=complex) for j, E in table.items()}
    shapes = {E.shape for E in mats.values()}
    if len(shapes) != 1:
        raise ValueError("memory operators differ in shape")
    dim = shapes.pop()
    if len(dim) != 2 or dim[0] != dim[1] or dim[0] & (dim[0] - 1):
        raise ValueError(f"memory operators must be square with power-of-two size, got {dim}")
    if dim[0] > 1 << MAX_MEMORY_QUBITS:
        raise ValueError(f"memory dimension {dim[0]} exceeds {1 << MAX_MEMORY_QUBITS}")
    U = sum(np.kron(pauli_matrix(j), E) for j, E in mats.items())
    if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=UNITARY_TOL):
        raise ValueError("attack table does not define a unitary")
    return U, dim[0].bit_length() - 1


@dataclass
class EprReport:
    advantage: float
    bound: float

    @property
    def within_bound(self):
        return self.advantage <= self.bound + 1e-9


def epr_substitution_strategy(family: CodeFamily, table, recycle=True):
    d = family.dims
    U, mem = epr_unitary(table, d.N)
    acts = [Prepare(["R", "M"], [d.m, d.m], bell_pairs(d.m)), Send("alice.msg", reg="M")]
    if mem:
        acts.append(Prepare(["E"], [mem]))
        acts.append(Apply(["C", "E"], U))
    else:
        acts.append(Apply(["C"], U))
    acts.append(Send("eve.cipher_in", reg="C"))
    acts += _requests(recycle)
    return Strategy("EPR substitution", acts)


def epr_substitution(family: CodeFamily, table, variant=ETE, chunk=None) -> EprReport:
    """Exact advantage of the substitution attack U = sum_j P_j (x) E_j with quantum memory."""
    strat = epr_substitution_strategy(family, table)
    real = real_qauth_system(family, variant)
    ideal = ideal_qauth_system(family, variant)
    adv = distinguisher_advantage(real, ideal, strat, chunk=chunk or _default_chunk(family)).advantage
    return EprReport(adv, qauth_error(epsilon_report(family).eps_strong))


def controlled_pauli_table(N, pauli):
    """Memory qubit in |+>, then P on the cipher iff the memory is |1>."""
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    return {PauliIndex.zero(N): p0 @ h, _pauli_key(pauli, N): p1 @ h}


# Strategy battery


def _requests(recycle):
    return [Send("bob.req"), Send("alice.req")] if recycle else []


def identity_strategy(family: CodeFamily, recycle=True):
    d = family.dims
    acts = [
        Prepare(["R", "M"], [d.m, d.m], bell_pairs(d.m)),
        Send("alice.msg", reg="M"),
        Send("eve.cipher_in", reg="C"),
    ]
    return Strategy("identity", acts + _requests(recycle))


def pauli_strategy(family: CodeFamily, pauli, recycle=True):
    d = family.dims
    P = _pauli_key(pauli, d.N)
    acts = [
        Prepare(["R", "M"], [d.m, d.m], bell_pairs(d.m)),
        Send("alice.msg", reg="M"),
        Apply(["C"], pauli_matrix(P)),
        Send("eve.cipher_in", reg="C"),
    ]
    return Strategy(f"pauli {P.label}", acts + _requests(recycle))


def impersonation_strategy(family: CodeFamily, then_message=False, recycle=True):
    """Send half of the antisymmetric state before any message; optionally send a message afterwards."""
    d = family.dims
    acts = [
        Prepare(["F", "Fref"], [d.N, d.N], antisymmetric_state(d.N)),
        Send("eve.cipher_in", reg="F"),
    ]
    acts += _requests(recycle)
    name = "impersonation"
    if then_message:
        acts += [Prepare(["R", "M"], [d.m, d.m], bell_pairs(d.m)), Send("alice.msg", reg="M")]
        name = "impersonation then message"
    return Strategy(name, acts)


@dataclass
class BatteryEntry:
    name: str
    advantage: float
    bound: float

    @property
    def within_bound(self):
        return self.advantage <= self.bound + 1e-9


def _default_chunk(family):
    return max(1, min(len(family), 64))


def battery_strategies(family: CodeFamily, recycle=True, paulis=None):
    N = family.dims.N
    rep = epsilon_report(family)
    paulis = range(1, 4**N) if paulis is None else paulis
    out = [identity_strategy(family, recycle)]
    out += [pauli_strategy(family, j, recycle) for j in paulis]
    out.append(impersonation_strategy(family, recycle=recycle))
    out.append(impersonation_strategy(family, then_message=True, recycle=recycle))
    for worst in {rep.worst_strong, rep.worst_weak}:
        s = epr_substitution_strategy(family, controlled_pauli_table(N, worst), recycle)
        s.name = f"EPR substitution {worst.label}"
        out.append(s)
    return out


def battery(family: CodeFamily, variant=ETE, recycle=True, paulis=None, chunk=None):
    """Advantage of every battery strategy against the matching real/ideal pair.

    With recycling the bound is sqrt(eps) + eps/2 for the strong error; without
    it the bound is max(eps_weak, 2^-n) against the keyed weak simulator.
    """
    rep = epsilon_report(family)
    if recycle:
        real = real_qauth_system(family, variant)
        ideal = ideal_qauth_system(family, variant)
        bound = qauth_error(rep.eps_strong)
    else:
        real = real_qauth_system(family, variant, recycle=False)
        ideal = weak_ideal_system(family)
        bound = float(weak_error(rep.eps_weak, family.dims.n))
    chunk = chunk or _default_chunk(family)
    results = []
    for strat in battery_strategies(family, recycle, paulis):
        adv = distinguisher_advantage(real, ideal, strat, chunk=chunk).advantage
        results.append(BatteryEntry(strat.name, adv, bound))
    return results


def misclassification_mass(family: CodeFamily, pauli) -> Fraction:
    """Key-averaged probability that a Pauli attack goes undetected."""
    rep = epsilon_report(family)
    j = _pauli_key(pauli, family.dims.N).to_int()
    return Fraction(int(rep.undetected[j]), len(family))
