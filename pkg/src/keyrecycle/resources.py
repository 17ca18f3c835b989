"""Resources, protocol converters and simulators as :class:`~keyrecycle.acsim.Machine` objects.

Distinguisher-facing port names are shared by real and ideal systems:

``alice.msg``      message register in
``eve.cipher``     cipher register out (delivered as register ``C``)
``eve.cipher_in``  register returned to the channel
``bob.out``        1 with register ``B`` on acceptance, 0 for the reject symbol
``bob.req`` / ``bob.key`` and ``alice.req`` / ``alice.key``  recycled keys

In real systems Bob reports his verdict to Alice faithfully, so Alice's key
request succeeds once Bob has decided.
"""

from __future__ import annotations

import copy
from functools import cached_property

import numpy as np

from .acsim import BOT, Machine, Msg, Outer, System, Uniform, bell_projector, object_array
from .errors import DimensionError
from .pauli import PauliIndex
from .protocol import ETC, ETE, VARIANTS
from .ptc import CodeFamily
from .statevec import bell_pairs, clifford_unitary, pauli_matrix

# Protocol side


class KeyResource(Machine):
    """Secret key shared by the honest parties, drawn when the run starts.

    ``code_keys`` restricts the code key to a subset while keeping each
    value's weight 1/|K|; used to evaluate a real system in chunks.
    """

    def __init__(self, family: CodeFamily, variant, name="key", code_keys=None):
        super().__init__(name)
        self.family = family
        self.variant = variant
        self.code_keys = code_keys

    def start(self, session, batch):
        d = self.family.dims
        K = len(self.family)
        values = self.code_keys if self.code_keys is not None else np.arange(K)
        session.draw(batch, f"{self.name}.k", K, keyed=True, values=values)
        pad_qubits = d.N if self.variant == ETE else d.m
        session.draw(batch, f"{self.name}.pad", 4**pad_qubits)
        if self.variant == ETC:
            session.draw(batch, f"{self.name}.s", 2**d.n)
        return [batch]


class _Coder:
    def __init__(self, family: CodeFamily, variant, key):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.family = family
        self.variant = variant
        self.key = key

    @cached_property
    def unitaries(self):
        return np.stack([clifford_unitary(E) for E in self.family.encode])

    def fields(self, batch):
        k = batch.data[f"{self.key}.k"]
        pad = batch.data[f"{self.key}.pad"]
        s = batch.data.get(f"{self.key}.s")
        return k, pad, s

    def pad_split(self, pad):
        q = self.family.dims.N if self.variant == ETE else self.family.dims.m
        return pad >> q, pad & ((1 << q) - 1)


class ProtocolAlice(Machine, _Coder):
    def __init__(self, family, variant, key="key", name="alice", recycle=True):
        Machine.__init__(self, name)
        _Coder.__init__(self, family, variant, key)
        self.recycle = recycle
        self.inputs = ("msg", "verdict", "req") if recycle else ("msg",)
        self.outputs = ("cipher", "key") if recycle else ("cipher",)

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "msg":
            return [(batch, [("cipher", Msg(reg=self._encrypt(batch, msg.reg)))])]
        if port == "verdict":
            st["verdict"] = msg.value
            st["recycled"] = msg.field
            return [(batch, [])]
        if "verdict" in st:
            return [(batch, [("key", Msg(field=st["recycled"]))])]
        return [(batch, [("key", Msg(value=BOT))])]

    def _encrypt(self, batch, reg):
        d = self.family.dims
        if reg is None or batch.size_of(reg) != d.m:
            raise DimensionError(f"Alice expects an {d.m}-qubit message register")
        k, pad, s = self.fields(batch)
        x, z = self.pad_split(pad)
        syn = batch.fresh_name(f"{self.name}.S")
        batch.add_register(syn, np.eye(1 << d.n)[0], self.name)
        if self.variant == ETC:
            batch.apply_pauli([reg], x, z)
            batch.apply_pauli([syn], s, 0)
        cipher = batch.fresh_name(f"{self.name}.cipher")
        batch.merge([reg, syn], cipher, self.name)
        batch.apply([cipher], self.unitaries[k])
        if self.variant == ETE:
            batch.apply_pauli([cipher], x, z)
        return cipher


class ProtocolBob(Machine, _Coder):
    """Receiver. On reject it recycles the code key; ``release_bits`` keeps only its top bits."""

    def __init__(self, family, variant, key="key", name="bob", recycle=True, release_bits=None):
        Machine.__init__(self, name)
        _Coder.__init__(self, family, variant, key)
        self.recycle = recycle
        self.release_bits = release_bits
        self.inputs = ("cipher", "req") if recycle else ("cipher",)
        self.outputs = ("out", "verdict", "key") if recycle else ("out",)

    def _reject_key(self, k):
        if self.release_bits is None:
            return k
        drop = max(self.family.nu - self.release_bits, 0)
        return k >> drop

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "req":
            if "verdict" in st:
                return [(batch, [("key", Msg(field=f"{self.name}.recycled"))])]
            return [(batch, [("key", Msg(value=BOT))])]
        d = self.family.dims
        reg = msg.reg
        if reg is None or batch.size_of(reg) != d.N:
            # wrong length: reject and recycle as on reject
            if reg is not None:
                batch.discard([reg])
            return [(batch, self._reject(batch))]
        k, pad, s = self.fields(batch)
        x, z = self.pad_split(pad)
        if self.variant == ETE:
            batch.apply_pauli([reg], x, z)
        batch.apply([reg], np.conj(np.swapaxes(self.unitaries[k], 1, 2)))
        mreg = batch.fresh_name(f"{self.name}.M")
        sreg = batch.fresh_name(f"{self.name}.S")
        batch.split(reg, [(mreg, d.m), (sreg, d.n)], self.name)
        expected = s if self.variant == ETC else 0
        acc, rej = batch.project_value([sreg], expected)
        out = []
        acc = acc.prune()
        if acc.B:
            acc.discard([sreg])
            if self.variant == ETC:
                ax, az = self.pad_split(acc.data[f"{self.key}.pad"])
                acc.apply_pauli([mreg], ax, az)
            out.append((acc, self._accept(acc, mreg)))
        rej = rej.prune()
        if rej.B:
            rej.discard([mreg, sreg])
            out.append((rej, self._reject(rej)))
        return out

    def _accept(self, batch, mreg):
        self.st(batch)["verdict"] = 1
        if not self.recycle:
            return [("out", Msg(value=1, reg=mreg))]
        k, pad, s = self.fields(batch)
        if s is None:
            keys = [(int(a), int(b)) for a, b in zip(k, pad)]
        else:
            keys = [(int(a), int(b), int(c)) for a, b, c in zip(k, pad, s)]
        name = f"{self.name}.recycled"
        batch.set_data(name, object_array(keys), keyed=True)
        return [("out", Msg(value=1, reg=mreg)), ("verdict", Msg(value=1, field=name))]

    def _reject(self, batch):
        self.st(batch)["verdict"] = 0
        if not self.recycle:
            return [("out", Msg(value=0))]
        k = batch.data[f"{self.key}.k"]
        name = f"{self.name}.recycled"
        batch.set_data(name, object_array([(int(self._reject_key(a)),) for a in k]), keyed=True)
        return [("out", Msg(value=0)), ("verdict", Msg(value=0, field=name))]


class InsecureChannel(Machine):
    """Everything sent goes to Eve; whatever Eve inputs goes to the receiver."""

    inputs = ("in_a", "in_e")
    outputs = ("to_e", "to_b")

    def __init__(self, name="channel"):
        super().__init__(name)

    def receive(self, session, batch, port, msg):
        return [(batch, [("to_e" if port == "in_a" else "to_b", msg)])]


# Ideal side


class CombinedQ(Machine):
    """Secure channel and switched key driven by one switch at Eve's interface.

    Switch 1 delivers the message and a long key; switch 0 deletes it and
    produces a short key. A switch before any message yields the reject
    symbol and the short key regardless of its value.
    """

    inputs = ("msg", "switch", "alice.req", "bob.req")
    outputs = ("notify", "bob", "alice.key", "bob.key")

    def __init__(self, m, acc_size, rej_size, name="Q"):
        super().__init__(name)
        self.m = m
        self.acc_size = acc_size
        self.rej_size = rej_size

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "msg":
            if msg.reg is None or batch.size_of(msg.reg) != self.m:
                raise DimensionError(f"expected an {self.m}-qubit message register")
            if "key" in st:
                batch.discard([msg.reg])
            else:
                st["held"] = msg.reg
            return [(batch, [("notify", Msg(value=self.m))])]
        if port == "switch":
            held = st.pop("held", None)
            bit = msg.value
            if held is not None and bit == 1:
                st["key"] = Uniform(f"{self.name}.key", self.acc_size)
                return [(batch, [("bob", Msg(value=1, reg=held))])]
            if held is not None:
                batch.discard([held])
            st["key"] = Uniform(f"{self.name}.key", self.rej_size)
            return [(batch, [("bob", Msg(value=0))])]
        out_port = "alice.key" if port == "alice.req" else "bob.key"
        return [(batch, [(out_port, Msg(value=st.get("key", BOT)))])]


class SecureChannel(Machine):
    """S^m: leaks only the message length to Eve, who decides delivery with one bit."""

    inputs = ("msg", "switch")
    outputs = ("leak", "bob")

    def __init__(self, m, name="S"):
        super().__init__(name)
        self.m = m

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "msg":
            if msg.reg is None or batch.size_of(msg.reg) != self.m:
                raise DimensionError(f"expected an {self.m}-qubit message register")
            if st.get("decided"):
                batch.discard([msg.reg])
            else:
                st["held"] = msg.reg
            return [(batch, [("leak", Msg(value=self.m))])]
        st["decided"] = True
        held = st.pop("held", None)
        if held is not None and msg.value == 1:
            return [(batch, [("bob", Msg(value=1, reg=held))])]
        if held is not None:
            batch.discard([held])
        return [(batch, [("bob", Msg(value=0))])]


class SwitchedKey(Machine):
    """Key whose length Eve picks with one bit; a second bit gates Alice's copy.

    Bob's request before the length bit, or Alice's before both bits, gets the
    reject symbol. Bits given in the wrong order leave Alice with the reject
    symbol for good.
    """

    inputs = ("len", "alice_sw", "alice.req", "bob.req")
    outputs = ("alice.key", "bob.key")

    def __init__(self, rej_size, acc_size, name="Kbar"):
        super().__init__(name)
        self.rej_size = rej_size
        self.acc_size = acc_size

    def _key(self, st):
        return Uniform(f"{self.name}.key", self.acc_size if st["len"] == 1 else self.rej_size)

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "len":
            st["len"] = msg.value
            return [(batch, [])]
        if port == "alice_sw":
            if "len" not in st:
                st["wrong_order"] = True
            st["alice_sw"] = msg.value
            return [(batch, [])]
        if port == "bob.req":
            value = self._key(st) if "len" in st else BOT
            return [(batch, [("bob.key", Msg(value=value))])]
        ok = "len" in st and "alice_sw" in st and not st.get("wrong_order") and st["alice_sw"] == 1
        return [(batch, [("alice.key", Msg(value=self._key(st) if ok else BOT))])]


class AuthenticChannel(Machine):
    """Classical channel: Eve gets a copy and a delivery switch but cannot alter the message."""

    inputs = ("msg", "switch")
    outputs = ("eve", "bob")

    def __init__(self, name="A"):
        super().__init__(name)

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "msg":
            batch.set_data(f"{self.name}.x", batch.values(msg).copy())
            st["sent"] = True
            return [(batch, [("eve", Msg(field=f"{self.name}.x"))])]
        if not st.get("sent"):
            return [(batch, [("bob", Msg(value=BOT))])]
        x = batch.data[f"{self.name}.x"]
        sw = batch.values(msg)
        out = object_array([xi if s == 1 else BOT for xi, s in zip(x, sw)])
        batch.set_data(f"{self.name}.out", out)
        return [(batch, [("bob", Msg(field=f"{self.name}.out"))])]


class HonestFilter(Machine):
    """Covers Eve's interface of an ideal resource: always lets the message through."""

    inputs = ("notify",)
    outputs = ("switch",)

    def __init__(self, name="filter"):
        super().__init__(name)

    def receive(self, session, batch, port, msg):
        return [(batch, [("switch", Msg(value=1))])]


class SimulatorQAuth(Machine):
    """EPR-pair simulator for the recycling scheme.

    On notification it outputs half of fresh EPR pairs. On the return it
    projects onto |Phi> (the zero Bell outcome): on success the resource
    delivers, otherwise it rejects. A cipher arriving before any message
    is always rejected.
    """

    inputs = ("notify", "cipher_in")
    outputs = ("cipher", "switch")

    def __init__(self, N, name="sim"):
        super().__init__(name)
        self.N = N

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        if port == "notify":
            c = batch.fresh_name(f"{self.name}.C")
            r = batch.fresh_name(f"{self.name}.R")
            batch.add_registers([c, r], [self.N, self.N], bell_pairs(self.N), self.name)
            st["ref"] = r
            return [(batch, [("cipher", Msg(reg=c))])]
        ref = st.get("ref")
        if ref is None or msg.reg is None or batch.size_of(msg.reg) != self.N:
            if msg.reg is not None:
                batch.discard([msg.reg])
            return [(batch, [("switch", Msg(value=0))])]
        acc, rej = batch.project([msg.reg, ref], bell_projector(self.N))
        acc.discard([msg.reg, ref])
        rej.discard([msg.reg, ref])
        return [(acc, [("switch", Msg(value=1))]), (rej, [("switch", Msg(value=0))])]


class SimulatorWeak(Machine, _Coder):
    """Simulator for the scheme without recycling.

    It encodes its EPR halves with a private uniformly drawn code key,
    decodes the returned register, and lets the message through iff the Bell
    outcome has no bit flips at all and no phase flips on message qubits.
    """

    inputs = ("notify", "cipher_in")
    outputs = ("cipher", "switch")

    def __init__(self, family: CodeFamily, name="sim"):
        Machine.__init__(self, name)
        _Coder.__init__(self, family, ETE, f"{name}.key")

    @cached_property
    def accept_projector(self):
        d = self.family.dims
        P = np.zeros((4**d.N, 4**d.N), dtype=complex)
        base = bell_projector(d.N)
        ident = np.eye(2**d.N)
        for zs in range(2**d.n):
            z = tuple((zs >> (d.n - 1 - i)) & 1 for i in range(d.n))
            j = PauliIndex((0,) * d.N, (0,) * d.m + z)
            W = np.kron(pauli_matrix(j), ident)
            P += W @ base @ W.conj().T
        return P

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        N = self.family.dims.N
        if port == "notify":
            session.draw(batch, f"{self.name}.key.k", len(self.family))
            c = batch.fresh_name(f"{self.name}.C")
            r = batch.fresh_name(f"{self.name}.R")
            batch.add_registers([c, r], [N, N], bell_pairs(N), self.name)
            batch.apply([c], self.unitaries[batch.data[f"{self.name}.key.k"]])
            st["ref"] = r
            return [(batch, [("cipher", Msg(reg=c))])]
        ref = st.get("ref")
        if ref is None or msg.reg is None or batch.size_of(msg.reg) != N:
            if msg.reg is not None:
                batch.discard([msg.reg])
            return [(batch, [("switch", Msg(value=0))])]
        U = self.unitaries[batch.data[f"{self.name}.key.k"]]
        batch.apply([msg.reg], np.conj(np.swapaxes(U, 1, 2)))
        acc, rej = batch.project([msg.reg, ref], self.accept_projector)
        acc.discard([msg.reg, ref])
        rej.discard([msg.reg, ref])
        return [(acc, [("switch", Msg(value=1))]), (rej, [("switch", Msg(value=0))])]


# Classical MAC


def _tag(key, x, eta):
    h = eta // 2
    return (key >> h) if x == 0 else key & ((1 << h) - 1)


def _tag_bits(t, h):
    return tuple((t >> (h - 1 - i)) & 1 for i in range(h))


class MacKey(Machine):
    inputs = ()
    outputs = ()

    def __init__(self, eta, name="mackey"):
        super().__init__(name)
        self.eta = eta

    def start(self, session, batch):
        session.draw(batch, f"{self.name}.key", 2**self.eta)
        return [batch]


class MacAlice(Machine):
    inputs = ("msg",)
    outputs = ("pair",)

    def __init__(self, eta, key="mackey", name="alice"):
        super().__init__(name)
        self.eta = eta
        self.key = key

    def receive(self, session, batch, port, msg):
        xs = batch.values(msg)
        keys = batch.data[f"{self.key}.key"]
        h = self.eta // 2
        pairs = object_array([(int(x), _tag_bits(_tag(int(k), int(x), self.eta), h)) for x, k in zip(xs, keys)])
        batch.set_data(f"{self.name}.pair", pairs)
        return [(batch, [("pair", Msg(field=f"{self.name}.pair"))])]


class MacBob(Machine):
    inputs = ("pair",)
    outputs = ("out",)

    def __init__(self, eta, key="mackey", name="bob"):
        super().__init__(name)
        self.eta = eta
        self.key = key

    def receive(self, session, batch, port, msg):
        pairs = batch.values(msg)
        keys = batch.data[f"{self.key}.key"]
        h = self.eta // 2
        out = []
        for p, k in zip(pairs, keys):
            ok = isinstance(p, tuple) and len(p) == 2 and p[0] in (0, 1)
            ok = ok and tuple(p[1]) == _tag_bits(_tag(int(k), p[0], self.eta), h)
            out.append(p[0] if ok else BOT)
        batch.set_data(f"{self.name}.out", object_array(out))
        return [(batch, [("out", Msg(field=f"{self.name}.out"))])]


class SimulatorMac(Machine):
    """Tags the copied message under its own key; delivers iff Eve returns that exact pair."""

    inputs = ("copy", "pair_in")
    outputs = ("pair", "switch")

    def __init__(self, eta, name="sim"):
        super().__init__(name)
        self.eta = eta

    def receive(self, session, batch, port, msg):
        st = self.st(batch)
        h = self.eta // 2
        if port == "copy":
            session.draw(batch, f"{self.name}.key", 2**self.eta)
            xs = batch.values(msg)
            keys = batch.data[f"{self.name}.key"]
            pairs = object_array([(int(x), _tag_bits(_tag(int(k), int(x), self.eta), h)) for x, k in zip(xs, keys)])
            batch.set_data(f"{self.name}.pair", pairs)
            st["emitted"] = True
            return [(batch, [("pair", Msg(field=f"{self.name}.pair"))])]
        if not st.get("emitted"):
            return [(batch, [("switch", Msg(value=0))])]
        got = batch.values(msg)
        sent = batch.data[f"{self.name}.pair"]
        sw = object_array([int(g == s) for g, s in zip(got, sent)])
        batch.set_data(f"{self.name}.sw", sw)
        return [(batch, [("switch", Msg(field=f"{self.name}.sw"))])]


# System builders


class KeyedSystem(System):
    """A system whose key resource can be restricted to subsets of code keys."""

    def __init__(self, name, machines, links, outer, key_machine, build):
        super().__init__(name, machines, links, outer)
        self.key_machine = key_machine
        self._build = build

    def chunks(self, size):
        km = self.machines[self.key_machine]
        K = len(km.family)
        for start in range(0, K, size):
            yield self.restricted(np.arange(start, min(K, start + size)))

    def restricted(self, keys):
        return self._build(code_keys=np.asarray(keys))


def _qauth_outer(alice, bob, channel, recycle):
    outer = [
        Outer("alice.msg", "in", alice, "msg"),
        Outer("eve.cipher", "out", channel, "to_e", "C"),
        Outer("eve.cipher_in", "in", channel, "in_e"),
        Outer("bob.out", "out", bob, "out", "B"),
    ]
    if recycle:
        outer += [
            Outer("bob.req", "in", bob, "req"),
            Outer("bob.key", "out", bob, "key"),
            Outer("alice.req", "in", alice, "req"),
            Outer("alice.key", "out", alice, "key"),
        ]
    return outer


def real_qauth_system(family: CodeFamily, variant=ETE, recycle=True, release_bits=None, code_keys=None):
    """Alice and Bob running the protocol over an insecure channel with a shared key."""

    def build(code_keys=None):
        key = KeyResource(family, variant, code_keys=code_keys)
        alice = ProtocolAlice(family, variant, recycle=recycle)
        bob = ProtocolBob(family, variant, recycle=recycle, release_bits=release_bits)
        channel = InsecureChannel()
        links = [(("alice", "cipher"), ("channel", "in_a")), (("channel", "to_b"), ("bob", "cipher"))]
        if recycle:
            links.append((("bob", "verdict"), ("alice", "verdict")))
        name = f"real[{variant}{'' if recycle else ', no recycling'}]"
        return KeyedSystem(name, [key, alice, bob, channel], links, _qauth_outer("alice", "bob", "channel", recycle), "key", build)

    return build(code_keys)


def key_space(family: CodeFamily, variant):
    """Number of distinct (accept, reject) recycled key values."""
    d = family.dims
    K = len(family)
    acc = K * (4**d.N if variant == ETE else 4**d.m * 2**d.n)
    return acc, K


def ideal_qauth_system(family: CodeFamily, variant=ETE, honest=False):
    """Q resource with the EPR simulator (or the honest filter) at Eve's interface."""
    d = family.dims
    acc, rej = key_space(family, variant)
    q = CombinedQ(d.m, acc, rej)
    outer = [
        Outer("alice.msg", "in", "Q", "msg"),
        Outer("bob.out", "out", "Q", "bob", "B"),
        Outer("bob.req", "in", "Q", "bob.req"),
        Outer("bob.key", "out", "Q", "bob.key"),
        Outer("alice.req", "in", "Q", "alice.req"),
        Outer("alice.key", "out", "Q", "alice.key"),
    ]
    if honest:
        f = HonestFilter()
        links = [(("Q", "notify"), ("filter", "notify")), (("filter", "switch"), ("Q", "switch"))]
        return System("ideal[Q, honest]", [q, f], links, outer)
    sim = SimulatorQAuth(d.N)
    links = [(("Q", "notify"), ("sim", "notify")), (("sim", "switch"), ("Q", "switch"))]
    outer += [Outer("eve.cipher", "out", "sim", "cipher", "C"), Outer("eve.cipher_in", "in", "sim", "cipher_in")]
    return System("ideal[Q, simulator]", [q, sim], links, outer)


def weak_ideal_system(family: CodeFamily):
    """Secure channel with the keyed simulator for the scheme without recycling."""
    s = SecureChannel(family.dims.m)
    sim = SimulatorWeak(family)
    links = [(("S", "leak"), ("sim", "notify")), (("sim", "switch"), ("S", "switch"))]
    outer = [
        Outer("alice.msg", "in", "S", "msg"),
        Outer("eve.cipher", "out", "sim", "cipher", "C"),
        Outer("eve.cipher_in", "in", "sim", "cipher_in"),
        Outer("bob.out", "out", "S", "bob", "B"),
    ]
    return System("ideal[S, weak simulator]", [s, sim], links, outer)


def secure_channel_system(m):
    """S^m alone, with Eve's interface exposed."""
    s = SecureChannel(m)
    outer = [
        Outer("alice.msg", "in", "S", "msg"),
        Outer("eve.leak", "out", "S", "leak"),
        Outer("eve.switch", "in", "S", "switch"),
        Outer("bob.out", "out", "S", "bob", "B"),
    ]
    return System("S", [s], [], outer)


def switched_key_system(rej_size, acc_size):
    k = SwitchedKey(rej_size, acc_size)
    outer = [
        Outer("eve.len", "in", "Kbar", "len"),
        Outer("eve.alice", "in", "Kbar", "alice_sw"),
        Outer("alice.req", "in", "Kbar", "alice.req"),
        Outer("bob.req", "in", "Kbar", "bob.req"),
        Outer("alice.key", "out", "Kbar", "alice.key"),
        Outer("bob.key", "out", "Kbar", "bob.key"),
    ]
    return System("Kbar", [k], [], outer)


def combined_q_system(m, acc_size, rej_size):
    """Q alone with its switch exposed at Eve's interface."""
    q = CombinedQ(m, acc_size, rej_size)
    outer = [
        Outer("alice.msg", "in", "Q", "msg"),
        Outer("eve.leak", "out", "Q", "notify"),
        Outer("eve.switch", "in", "Q", "switch"),
        Outer("bob.out", "out", "Q", "bob", "B"),
        Outer("bob.req", "in", "Q", "bob.req"),
        Outer("bob.key", "out", "Q", "bob.key"),
        Outer("alice.req", "in", "Q", "alice.req"),
        Outer("alice.key", "out", "Q", "alice.key"),
    ]
    return System("Q", [q], [], outer)


def authentic_channel_system():
    a = AuthenticChannel()
    outer = [
        Outer("alice.msg", "in", "A", "msg"),
        Outer("eve.copy", "out", "A", "eve"),
        Outer("eve.switch", "in", "A", "switch"),
        Outer("bob.out", "out", "A", "bob"),
    ]
    return System("A", [a], [], outer)


def _mac_outer(a, e_out, e_in, b):
    return [
        Outer("alice.msg", "in", *a),
        Outer("eve.pair", "out", *e_out),
        Outer("eve.pair_in", "in", *e_in),
        Outer("bob.out", "out", *b),
    ]


def mac_real_system(eta):
    key = MacKey(eta)
    alice = MacAlice(eta)
    bob = MacBob(eta)
    ch = InsecureChannel()
    links = [(("alice", "pair"), ("channel", "in_a")), (("channel", "to_b"), ("bob", "pair"))]
    outer = _mac_outer(("alice", "msg"), ("channel", "to_e"), ("channel", "in_e"), ("bob", "out"))
    return System(f"real[MAC, eta={eta}]", [key, alice, bob, ch], links, outer)


def mac_ideal_system(eta):
    a = AuthenticChannel()
    sim = SimulatorMac(eta)
    links = [(("A", "eve"), ("sim", "copy")), (("sim", "switch"), ("A", "switch"))]
    outer = _mac_outer(("A", "msg"), ("sim", "pair"), ("sim", "pair_in"), ("A", "bob"))
    return System(f"ideal[A, MAC simulator, eta={eta}]", [a, sim], links, outer)


def simulator_qauth(N):
    return SimulatorQAuth(N)


def simulator_weak(family):
    return SimulatorWeak(family)


def simulator_mac(eta):
    return SimulatorMac(eta)
