"""Dense statevector oracle.

States are complex numpy vectors of length 2^q; qubit 0 is the most
significant bit of the basis index, so a tensor reshape to ``(2,)*q`` puts
qubit ``i`` on axis ``i``. Circuits are lists of ``(gate, qubits)`` tuples
applied left to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, NonSymplecticError
from .pauli import PauliIndex, symplectic_check

MAX_QUBITS = 12
TOL = 1e-9

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0 + 0j, -1.0])
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1.0 + 0j, 1, 1, -1])

GATES = {"H": _H, "S": _S, "X": _X, "Z": _Z, "CNOT": _CNOT, "CZ": _CZ}


def num_qubits(state):
    size = np.asarray(state).shape[-1]
    q = size.bit_length() - 1
    if size < 1 or 1 << q != size:
        raise DimensionError(f"length {size} is not a power of two")
    return q


def basis_state(bits):
    bits = [int(b) for b in bits]
    out = np.zeros(1 << len(bits), dtype=complex)
    out[int("".join(map(str, bits)) or "0", 2)] = 1
    return out


def zero_state(q):
    return basis_state([0] * q)


def random_state(q, rng, norm=1.0):
    """Haar-random pure state scaled to the given norm; ``rng`` is a numpy Generator."""
    v = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
    return norm * v / np.linalg.norm(v)


def bell_pairs(k):
    """|Phi>^{CR} on 2k qubits: qubit i of the first half paired with qubit i of the second."""
    out = np.zeros((1 << k, 1 << k), dtype=complex)
    np.fill_diagonal(out, 1 / np.sqrt(1 << k))
    return out.reshape(-1)


def tensor(*states):
    out = np.ones(1, dtype=complex)
    for s in states:
        out = np.kron(out, s)
    return out


def apply_matrix(state, U, qubits):
    """Apply a 2^k x 2^k matrix to the listed qubits (first listed is most significant)."""
    state = np.asarray(state, dtype=complex)
    q = num_qubits(state)
    qubits = list(qubits)
    k = len(qubits)
    if U.shape != (1 << k, 1 << k):
        raise DimensionError(f"matrix of shape {U.shape} on {k} qubits")
    if len(set(qubits)) != k or any(not 0 <= t < q for t in qubits):
        raise DimensionError(f"bad qubit list {qubits} for {q} qubits")
    psi = np.moveaxis(state.reshape((2,) * q), qubits, range(k)).reshape(1 << k, -1)
    psi = (U @ psi).reshape((2,) * q)
    return np.moveaxis(psi, range(k), qubits).reshape(-1)


def apply_pauli(state, l: PauliIndex, qubits=None):
    """Apply X^x Z^z (Z first) to ``qubits`` (default: all qubits, in order)."""
    state = np.asarray(state, dtype=complex)
    q = num_qubits(state)
    qubits = list(range(q)) if qubits is None else list(qubits)
    if l.N != len(qubits):
        raise DimensionError(f"Pauli on {l.N} qubits applied to {len(qubits)}")
    psi = state.reshape((2,) * q).copy()
    for t, (xb, zb) in zip(qubits, zip(l.x, l.z)):
        if zb:
            idx = [slice(None)] * q
            idx[t] = 1
            psi[tuple(idx)] *= -1
        if xb:
            psi = np.flip(psi, axis=t)
    return psi.reshape(-1)


def apply_circuit(state, circuit):
    out = np.asarray(state, dtype=complex)
    for gate, qubits in circuit:
        out = apply_matrix(out, GATES[gate], qubits)
    return out


def pauli_matrix(l: PauliIndex):
    d = 1 << l.N
    return np.stack([apply_pauli(np.eye(d, dtype=complex)[:, c], l) for c in range(d)], axis=1)


def circuit_unitary(circuit, q):
    d = 1 << q
    return np.stack([apply_circuit(np.eye(d, dtype=complex)[:, c], circuit) for c in range(d)], axis=1)


# Clifford synthesis. Every gate used acts on Pauli indices as a symplectic
# involution, so reducing S to the identity with gates g_1..g_r gives
# S = A_1 A_2 ... A_r, which the reversed gate list realises.


def _gate_action(S, gate, qubits, N):
    """Left-multiply S (in place) by the index action of ``gate``."""
    if gate == "H":
        (a,) = qubits
        S[[a, N + a]] = S[[N + a, a]]
    elif gate == "S":
        (a,) = qubits
        S[N + a] ^= S[a]
    elif gate == "CNOT":
        c, t = qubits
        S[t] ^= S[c]
        S[N + c] ^= S[N + t]
    elif gate == "CZ":
        a, b = qubits
        S[N + a] ^= S[b]
        S[N + b] ^= S[a]
    elif gate in ("X", "Z"):
        pass
    else:
        raise ValueError(f"unknown gate {gate!r}")


def index_action(circuit, N):
    """Symplectic index action of a circuit: C P_v C^dag ~ P_{A v}."""
    A = np.eye(2 * N, dtype=np.uint8)
    for gate, qubits in circuit:
        _gate_action(A, gate, qubits, N)
    return A


def synthesize_clifford(S):
    """Gate list whose conjugation action on Pauli indices is ``S`` (phases free)."""
    S = np.array(S, dtype=np.uint8) & 1
    if not symplectic_check(S):
        raise NonSymplecticError("cannot synthesise a non-symplectic matrix")
    N = S.shape[0] // 2
    gates = []

    def do(gate, *qubits):
        gates.append((gate, tuple(qubits)))
        _gate_action(S, gate, qubits, N)

    for i in range(N):
        # image of X_i -> X_i
        for k in range(i, N):
            if S[k, i] and S[N + k, i]:
                do("S", k)
            elif S[N + k, i]:
                do("H", k)
        if not S[i, i]:
            k = next(k for k in range(i + 1, N) if S[k, i])
            do("CNOT", k, i)
        for k in range(i + 1, N):
            if S[k, i]:
                do("CNOT", i, k)
        # image of Z_i -> Z_i, using gates that fix X_i
        c = N + i
        for k in range(i + 1, N):
            if S[k, c] and S[N + k, c]:
                do("S", k)
                do("H", k)
            elif S[k, c]:
                do("H", k)
            if S[N + k, c]:
                do("CNOT", k, i)
        if S[i, c]:
            do("H", i)
            do("S", i)
            do("H", i)
    assert np.array_equal(S, np.eye(2 * N, dtype=np.uint8))
    return gates[::-1]


def dagger_circuit(circuit):
    """Inverse circuit; S^dag is realised as S followed by Z."""
    out = []
    for gate, qubits in reversed(circuit):
        if gate == "S":
            out.append(("Z", qubits))
            out.append(("S", qubits))
        else:
            out.append((gate, qubits))
    return out


@lru_cache(maxsize=4096)
def _clifford_unitary_cached(key, N):
    S = np.frombuffer(key, dtype=np.uint8).reshape(2 * N, 2 * N)
    U = circuit_unitary(synthesize_clifford(S), N)
    U.setflags(write=False)
    return U


def clifford_unitary(S):
    """Dense unitary of the synthesised circuit for ``S`` (cached)."""
    S = np.ascontiguousarray(np.asarray(S, dtype=np.uint8) & 1)
    return _clifford_unitary_cached(S.tobytes(), S.shape[0] // 2)


# Measurements


@dataclass
class SyndromeOutcome:
    probability: float  # probability of reading the expected value
    accepted: np.ndarray | None  # renormalised post-state, None if probability is 0
    rejected: np.ndarray | None


def project_bits(state, positions, bits):
    """Unnormalised projection of ``positions`` onto the computational value ``bits``."""
    state = np.asarray(state, dtype=complex)
    q = num_qubits(state)
    positions = list(positions)
    if len(set(positions)) != len(positions) or any(not 0 <= p < q for p in positions):
        raise DimensionError(f"bad positions {positions} for {q} qubits")
    if len(bits) != len(positions):
        raise DimensionError("need one expected bit per position")
    psi = state.reshape((2,) * q)
    mask = np.zeros((2,) * q, dtype=bool)
    idx = [slice(None)] * q
    for p, b in zip(positions, bits):
        idx[p] = int(b)
    mask[tuple(idx)] = True
    return np.where(mask, psi, 0).reshape(-1)


def measure_syndrome(state, positions, expected):
    acc = project_bits(state, positions, expected)
    rej = np.asarray(state, dtype=complex) - acc
    p = float(np.vdot(acc, acc).real)
    total = float(np.vdot(state, state).real)
    pr = total - p

    def norm(v, w):
        return v / np.sqrt(w) if w > 1e-15 else None

    return SyndromeOutcome(p, norm(acc, p), norm(rej, pr))


def drop_qubits(state, positions, bits):
    """Remove qubits known to hold the computational value ``bits`` (no renormalisation)."""
    state = np.asarray(state, dtype=complex)
    q = num_qubits(state)
    idx = [slice(None)] * q
    for p, b in zip(positions, bits):
        idx[p] = int(b)
    return state.reshape((2,) * q)[tuple(idx)].reshape(-1)


def bell_rotate(state, pairs):
    """Map the Bell basis of each pair to the computational basis.

    Afterwards the first qubit of a pair holds the z bit and the second the x
    bit of the outcome index.
    """
    out = np.asarray(state, dtype=complex)
    for c, r in pairs:
        out = apply_matrix(out, _CNOT, [c, r])
        out = apply_matrix(out, _H, [c])
    return out


def _check_pairs(pairs, q):
    flat = [t for p in pairs for t in p]
    if len(set(flat)) != len(flat):
        raise DimensionError(f"pairs {pairs} overlap")
    if any(not 0 <= t < q for t in flat):
        raise DimensionError(f"pairs {pairs} out of range for {q} qubits")


def bell_measure(state, pairs):
    """Outcome distribution of a Bell measurement, indexed by ``PauliIndex.to_int``.

    Outcome ``j`` (x bits then z bits over the pairs) is the Pauli on the
    first qubit of each pair that maps |Phi> to the measured Bell state.
    """
    state = np.asarray(state, dtype=complex)
    q = num_qubits(state)
    pairs = [tuple(p) for p in pairs]
    _check_pairs(pairs, q)
    rot = bell_rotate(state, pairs)
    k = len(pairs)
    zs = [c for c, _ in pairs]
    xs = [r for _, r in pairs]
    probs = np.abs(rot.reshape((2,) * q)) ** 2
    rest = [t for t in range(q) if t not in zs and t not in xs]
    probs = np.transpose(probs, xs + zs + rest).reshape(1 << (2 * k), -1).sum(axis=1)
    return probs


def antisymmetric_state(N):
    """sum_x (-1)^{w(x)} |x, not x> / 2^{N/2} on 2N qubits (first N are C)."""
    d = 1 << N
    out = np.zeros(d * d, dtype=complex)
    for x in range(d):
        out[x * d + (d - 1 - x)] = (-1) ** bin(x).count("1")
    return out / np.sqrt(d)


# Density operators and distances


def density(state):
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def partial_trace(state, keep, q=None):
    """Reduced density matrix of a pure (possibly subnormalised) state on ``keep``."""
    state = np.asarray(state, dtype=complex)
    q = num_qubits(state) if q is None else q
    keep = list(keep)
    rest = [t for t in range(q) if t not in keep]
    A = np.transpose(state.reshape((2,) * q), keep + rest).reshape(1 << len(keep), -1)
    return A @ A.conj().T


def fidelity(a, b):
    """|<a|b>|^2 for pure states."""
    return float(abs(np.vdot(a, b)) ** 2)


def trace_norm(A):
    return float(np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2)).sum())


def trace_distance(rho, sigma):
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"shapes {rho.shape} and {sigma.shape} differ")
    return 0.5 * trace_norm(rho - sigma)


def two_norm_bound_check(psi, phi, tol=1e-12):
    """Check 1/2 || |psi><psi| - |phi><phi| ||_1 <= || |psi> - |phi> ||."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if psi.shape != phi.shape:
        raise DimensionError(f"shapes {psi.shape} and {phi.shape} differ")
    lhs = trace_distance(density(psi), density(phi))
    rhs = float(np.linalg.norm(psi - phi))
    return lhs <= rhs + tol
