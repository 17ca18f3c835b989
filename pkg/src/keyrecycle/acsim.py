"""Exact real-versus-ideal simulation of composable systems.

A run is a list of :class:`Batch` objects. Each batch is a weighted set of
branches sharing one register layout and one control state; branches differ
in classical data (keys, measurement results) and in their (subnormalised)
joint statevector. Key draws multiply branches, two-outcome measurements
split batches, so control decisions are always taken per batch.

Systems are machines joined by port links (see :mod:`keyrecycle.resources`).
A distinguisher strategy is a list of actions on the outer ports and on the
registers it holds. Its final view is the classical fields it received plus
the reduced state of its registers, and the advantage of a strategy is the
trace distance between its views of two systems.
"""

from __future__ import annotations

import copy
import json
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, IllegalWiring, PortUnavailable, SignatureMismatch

BOT = "⊥"
PRUNE = 1e-15

_PARITY = np.array([bin(i).count("1") & 1 for i in range(1 << 12)], dtype=np.int8)


@dataclass(frozen=True)
class Uniform:
    """Symbolic value drawn uniformly from ``size`` possibilities.

    Fresh keys produced by ideal resources are left symbolic; fields that
    share a symbol hold the same value.
    """

    symbol: str
    size: int


@dataclass(frozen=True)
class Msg:
    """Payload on a port: a constant, a per-branch data field, and/or a register."""

    value: object = None
    field: str | None = None
    reg: str | None = None


def object_array(values):
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


class Batch:
    """Branches with a common register layout and control state."""

    def __init__(self, layout, psi, weight, data, view, owner, state, used, keyed):
        self.layout = layout  # list of (register, qubits) in axis order
        self.psi = psi  # (B, 2^q)
        self.weight = weight  # (B,)
        self.data = data  # hidden per-branch values
        self.view = view  # per-branch values seen by the distinguisher
        self.owner = owner  # register -> holder ("D" for the distinguisher)
        self.state = state  # per-machine control state
        self.used = used  # consumed in-ports
        self.keyed = keyed  # data/view names whose values fix the code key

    @classmethod
    def empty(cls):
        return cls([], np.ones((1, 1), dtype=complex), np.ones(1), {}, {}, {}, {}, set(), set())

    # bookkeeping

    @property
    def B(self):
        return self.psi.shape[0]

    @property
    def q(self):
        return sum(k for _, k in self.layout)

    def registers(self, owner=None):
        return [r for r, _ in self.layout if owner is None or self.owner[r] == owner]

    def size_of(self, reg):
        for r, k in self.layout:
            if r == reg:
                return k
        raise PortUnavailable(f"no register {reg!r}")

    def has(self, reg):
        return any(r == reg for r, _ in self.layout)

    def fresh_name(self, base):
        names = {r for r, _ in self.layout}
        i = 0
        while f"{base}#{i}" in names:
            i += 1
        return f"{base}#{i}"

    def probabilities(self):
        return self.weight * np.sum(np.abs(self.psi) ** 2, axis=1)

    def mass(self):
        return float(self.probabilities().sum())

    def copy(self):
        return self.select(np.ones(self.B, dtype=bool))

    def select(self, mask):
        mask = np.asarray(mask)
        return Batch(
            list(self.layout),
            self.psi[mask],
            self.weight[mask],
            {k: v[mask] for k, v in self.data.items()},
            {k: v[mask] for k, v in self.view.items()},
            dict(self.owner),
            copy.deepcopy(self.state),
            set(self.used),
            set(self.keyed),
        )

    def prune(self):
        keep = self.probabilities() > PRUNE
        return self if keep.all() else self.select(keep)

    def values(self, msg: Msg):
        """Per-branch values carried by a payload."""
        if msg.field is not None:
            return self.data[msg.field]
        return object_array([msg.value] * self.B)

    def constant(self, name, where="view"):
        arr = (self.view if where == "view" else self.data)[name]
        first = arr[0]
        if not all(v == first for v in arr):
            raise ValueError(f"{name} is not constant over the batch")
        return first

    # classical data

    def expand(self, name, values, probs, keyed=False):
        """Branch every current branch over ``values`` with the given probabilities."""
        values = np.asarray(values)
        V = len(values)
        B = self.B
        self.psi = np.repeat(self.psi, V, axis=0)
        self.weight = np.repeat(self.weight, V) * np.tile(np.asarray(probs, dtype=float), B)
        self.data = {k: np.repeat(v, V) for k, v in self.data.items()}
        self.view = {k: np.repeat(v, V) for k, v in self.view.items()}
        self.data[name] = np.tile(values, B)
        if keyed:
            self.keyed.add(name)

    def set_data(self, name, values, keyed=False):
        self.data[name] = values if isinstance(values, np.ndarray) else object_array(values)
        if keyed:
            self.keyed.add(name)

    # registers

    def _axes(self, names):
        offsets = {}
        pos = 0
        for r, k in self.layout:
            offsets[r] = (pos, k)
            pos += k
        out = []
        for name in names:
            if name not in offsets:
                raise PortUnavailable(f"no register {name!r}")
            p, k = offsets[name]
            out.extend(range(p, p + k))
        return out

    def _grouped(self, names):
        """psi viewed as (B, rest, d) with ``names`` last, and the permutation used."""
        ax = self._axes(names)
        q = self.q
        rest = [i for i in range(q) if i not in ax]
        perm = [0] + [1 + i for i in rest] + [1 + i for i in ax]
        t = np.transpose(self.psi.reshape((self.B,) + (2,) * q), perm)
        return t.reshape(self.B, -1, 1 << len(ax)), perm

    def _ungroup(self, t, perm):
        t = t.reshape((self.B,) + (2,) * self.q)
        return np.transpose(t, np.argsort(perm)).reshape(self.B, -1)

    def add_register(self, name, state, owner):
        if self.has(name):
            raise IllegalWiring(f"register {name!r} already exists")
        state = np.asarray(state, dtype=complex)
        k = state.shape[-1].bit_length() - 1
        if 1 << k != state.shape[-1]:
            raise DimensionError("register state length must be a power of two")
        if state.ndim == 1:
            self.psi = (self.psi[:, :, None] * state[None, None, :]).reshape(self.B, -1)
        else:
            self.psi = (self.psi[:, :, None] * state[:, None, :]).reshape(self.B, -1)
        self.layout.append((name, k))
        self.owner[name] = owner

    def add_registers(self, names, sizes, state, owner):
        """Add several registers jointly prepared in ``state`` (in the listed order)."""
        tmp = self.fresh_name("joint")
        self.add_register(tmp, state, owner)
        if sum(sizes) != self.size_of(tmp):
            raise DimensionError("register sizes do not match the prepared state")
        self.split(tmp, list(zip(names, sizes)), owner)

    def apply(self, names, U):
        """Apply a shared (d, d) or per-branch (B, d, d) matrix to ``names``."""
        t, perm = self._grouped(names)
        d = t.shape[-1]
        U = np.asarray(U)
        if U.shape[-2:] != (d, d):
            raise DimensionError(f"matrix of shape {U.shape} on registers of dimension {d}")
        if U.ndim == 2:
            t = t @ U.T
        else:
            t = np.einsum("bij,brj->bri", U, t)
        self.psi = self._ungroup(t, perm)

    def apply_pauli(self, names, x, z):
        """Per-branch X^x Z^z; ``x`` and ``z`` are packed ints (first qubit most significant)."""
        t, perm = self._grouped(names)
        d = t.shape[-1]
        x = np.broadcast_to(np.asarray(x, dtype=np.int64), (self.B,))
        z = np.broadcast_to(np.asarray(z, dtype=np.int64), (self.B,))
        c = np.arange(d, dtype=np.int64)
        src = c[None, :] ^ x[:, None]
        sign = 1 - 2 * _PARITY[z[:, None] & src]
        t = np.take_along_axis(t, np.broadcast_to(src[:, None, :], t.shape), axis=2) * sign[:, None, :]
        self.psi = self._ungroup(t, perm)

    def project_value(self, names, value):
        """Split into (matches ``value``, does not match); ``value`` may vary per branch."""
        t, perm = self._grouped(names)
        d = t.shape[-1]
        value = np.broadcast_to(np.asarray(value, dtype=np.int64), (self.B,))
        hit = np.arange(d)[None, None, :] == value[:, None, None]
        acc = self.copy()
        rej = self.copy()
        acc.psi = self._ungroup(np.where(hit, t, 0), perm)
        rej.psi = self._ungroup(np.where(hit, 0, t), perm)
        return acc, rej

    def project(self, names, P):
        """Split into P|psi> and (I-P)|psi> for a projector P on ``names``."""
        acc = self.copy()
        acc.apply(names, P)
        rej = self.copy()
        rej.psi = self.psi - acc.psi
        return acc, rej

    def measure(self, names, name):
        """Computational-basis measurement recorded in data field ``name``."""
        t, perm = self._grouped(names)
        d = t.shape[-1]
        parts = []
        for o in range(d):
            s = np.zeros_like(t)
            s[:, :, o] = t[:, :, o]
            parts.append(self._ungroup(s, perm))
        psi = np.stack(parts, axis=1).reshape(self.B * d, -1)
        B = self.B
        self.psi = psi
        self.weight = np.repeat(self.weight, d)
        self.data = {k: np.repeat(v, d) for k, v in self.data.items()}
        self.view = {k: np.repeat(v, d) for k, v in self.view.items()}
        self.data[name] = np.tile(np.arange(d, dtype=np.int64), B)

    def merge(self, names, new, owner):
        """Join registers into one, in the listed order, placed last."""
        t, perm = self._grouped(names)
        k = sum(self.size_of(r) for r in names)
        self.psi = t.reshape(self.B, -1)
        self.layout = [(r, s) for r, s in self.layout if r not in names] + [(new, k)]
        for r in names:
            del self.owner[r]
        self.owner[new] = owner

    def split(self, name, parts, owner):
        """Cut a register into consecutive pieces ``[(name, qubits), ...]``."""
        k = self.size_of(name)
        if sum(s for _, s in parts) != k:
            raise DimensionError(f"parts do not add up to the {k} qubits of {name!r}")
        i = [r for r, _ in self.layout].index(name)
        self.layout[i : i + 1] = list(parts)
        del self.owner[name]
        for r, _ in parts:
            self.owner[r] = owner

    def rename(self, old, new):
        if old == new:
            return
        if self.has(new):
            raise IllegalWiring(f"register {new!r} already exists")
        self.layout = [(new if r == old else r, k) for r, k in self.layout]
        self.owner[new] = self.owner.pop(old)

    def discard(self, names):
        for r in names:
            self.size_of(r)
            self.owner[r] = "trash"


# Systems


class Machine:
    """A resource or converter. Control state lives in ``batch.state[name]``."""

    inputs: tuple = ()
    outputs: tuple = ()

    def __init__(self, name):
        self.name = name

    def st(self, batch):
        return batch.state.setdefault(self.name, {})

    def start(self, session, batch):
        return [batch]

    def receive(self, session, batch, port, msg):
        """Return a list of ``(batch, [(out_port, Msg), ...])``."""
        raise NotImplementedError


@dataclass(frozen=True)
class Outer:
    """A port at the distinguisher's interface."""

    name: str
    direction: str  # "in" or "out"
    machine: str
    port: str
    alias: str | None = None  # name given to a register delivered here


class System:
    """Machines joined by links; unlinked ports are exposed as :class:`Outer` ports."""

    def __init__(self, name, machines, links, outer):
        self.name = name
        self.machines = {m.name: m for m in machines}
        if len(self.machines) != len(machines):
            raise IllegalWiring("duplicate machine names")
        self.links = {}
        self.outer = {}
        targets = set()
        for (src, sport), (dst, dport) in links:
            self._check_port(src, sport, "outputs")
            self._check_port(dst, dport, "inputs")
            if (src, sport) in self.links:
                raise IllegalWiring(f"output {src}.{sport} is connected twice")
            if (dst, dport) in targets:
                raise IllegalWiring(f"input {dst}.{dport} is connected twice")
            self.links[(src, sport)] = ("machine", dst, dport)
            targets.add((dst, dport))
        for o in outer:
            if o.name in self.outer:
                raise IllegalWiring(f"outer port {o.name} declared twice")
            if o.direction == "in":
                self._check_port(o.machine, o.port, "inputs")
                if (o.machine, o.port) in targets:
                    raise IllegalWiring(f"input {o.machine}.{o.port} is connected twice")
                targets.add((o.machine, o.port))
            else:
                self._check_port(o.machine, o.port, "outputs")
                if (o.machine, o.port) in self.links:
                    raise IllegalWiring(f"output {o.machine}.{o.port} is connected twice")
                self.links[(o.machine, o.port)] = ("outer", o)
            self.outer[o.name] = o
        for m in self.machines.values():
            for p in m.inputs:
                if (m.name, p) not in targets:
                    raise IllegalWiring(f"input {m.name}.{p} is not connected")
            for p in m.outputs:
                if (m.name, p) not in self.links:
                    raise IllegalWiring(f"output {m.name}.{p} is not connected")

    def _check_port(self, machine, port, kind):
        if machine not in self.machines:
            raise IllegalWiring(f"unknown machine {machine!r}")
        if port not in getattr(self.machines[machine], kind):
            raise IllegalWiring(f"{machine} has no {kind[:-1]} port {port!r}")

    @property
    def signature(self):
        return tuple(sorted((o.name, o.direction) for o in self.outer.values()))

    def start(self, session, batches):
        for m in self.machines.values():
            batches = [b for bb in batches for b in m.start(session, bb)]
        return batches

    def send(self, session, batch, outer_name, msg):
        o = self.outer.get(outer_name)
        if o is None or o.direction != "in":
            raise PortUnavailable(f"{self.name} has no input port {outer_name!r}")
        if ("D", outer_name) in batch.used:
            raise IllegalWiring(f"port {outer_name} used twice")
        batch.used.add(("D", outer_name))
        return self._dispatch(session, batch, o.machine, o.port, msg)

    def _dispatch(self, session, batch, machine, port, msg):
        if (machine, port) in batch.used:
            raise IllegalWiring(f"port {machine}.{port} used twice")
        batch.used.add((machine, port))
        out = []
        for b, emissions in self.machines[machine].receive(session, batch, port, msg):
            pending = [b]
            for oport, omsg in emissions:
                pending = [r for p in pending for r in self._route(session, p, machine, oport, omsg)]
            out.extend(pending)
        return [b.prune() for b in out if b.B]

    def _route(self, session, batch, machine, port, msg):
        target = self.links[(machine, port)]
        if target[0] == "machine":
            return self._dispatch(session, batch, target[1], target[2], msg)
        return [self._deliver(session, batch, target[1], msg)]

    def _deliver(self, session, batch, o: Outer, msg):
        if msg.field is not None:
            batch.view[o.name] = batch.data[msg.field].copy()
            if msg.field in batch.keyed:
                batch.keyed.add(o.name)
        elif msg.value is not None or msg.reg is None:
            batch.view[o.name] = object_array([msg.value] * batch.B)
        if msg.reg is not None:
            alias = o.alias or o.name
            if batch.has(alias):
                alias = batch.fresh_name(alias)
            batch.rename(msg.reg, alias)
            batch.owner[alias] = "D"
        session.record(batch, o.name, msg)
        return batch


# Distinguisher actions


def _matches(batch, where):
    """Per-branch mask of branches whose view agrees with ``where``."""
    mask = np.ones(batch.B, dtype=bool)
    for k, v in where.items():
        col = batch.view.get(k)
        mask &= np.array([x == v for x in col], dtype=bool) if col is not None else (v is None)
    return mask


@dataclass
class Action:
    where: dict = field(default_factory=dict, kw_only=True)

    def label(self):
        return type(self).__name__


@dataclass
class Prepare(Action):
    """New registers held by the distinguisher, jointly in ``state``."""

    names: list
    sizes: list
    state: np.ndarray = None

    def run(self, session, batch):
        state = self.state if self.state is not None else np.eye(1 << sum(self.sizes), dtype=complex)[0]
        batch.add_registers(list(self.names), list(self.sizes), state, "D")
        return [batch]


@dataclass
class Apply(Action):
    names: list
    unitary: np.ndarray

    def run(self, session, batch):
        _own(batch, self.names)
        batch.apply(self.names, self.unitary)
        return [batch]


@dataclass
class ApplyKeyed(Action):
    """Per-branch unitary chosen from a view field: ``table(value) -> matrix``."""

    names: list
    source: str
    table: object

    def run(self, session, batch):
        _own(batch, self.names)
        vals = batch.view[self.source]
        cache = {}
        mats = []
        for v in vals:
            if v not in cache:
                cache[v] = np.asarray(self.table(v), dtype=complex)
            mats.append(cache[v])
        batch.apply(self.names, np.stack(mats))
        return [batch]


@dataclass
class Send(Action):
    """Input at an outer port: a held register, a constant, or a copy of a view field."""

    port: str
    reg: str | None = None
    value: object = None
    from_view: str | None = None

    def label(self):
        return f"Send({self.port})"

    def run(self, session, batch):
        msg = Msg(value=self.value)
        if self.reg is not None:
            _own(batch, [self.reg])
            o = session.system.outer.get(self.port)
            holder = o.machine if o is not None else "?"
            internal = batch.fresh_name(f"{holder}.{self.port}")
            batch.rename(self.reg, internal)
            batch.owner[internal] = holder
            msg = Msg(value=self.value, reg=internal)
        elif self.from_view is not None:
            name = f"D.{self.port}"
            batch.data[name] = batch.view[self.from_view].copy()
            msg = Msg(field=name)
        return session.system.send(session, batch, self.port, msg)


@dataclass
class Measure(Action):
    """Computational-basis measurement of held registers; result goes to the view."""

    names: list
    result: str

    def run(self, session, batch):
        _own(batch, self.names)
        tmp = f"D.measure.{self.result}"
        batch.measure(self.names, tmp)
        batch.view[self.result] = batch.data.pop(tmp).astype(object)
        batch.discard(self.names)
        return [batch.prune()]


@dataclass
class BellMeasure(Action):
    """Bell measurement of paired held registers; the result is a packed Pauli index.

    ``first`` and ``second`` have equal size; qubit i of ``first`` pairs with
    qubit i of ``second`` and the outcome is the Pauli on ``first``.
    """

    first: str
    second: str
    result: str

    def run(self, session, batch):
        _own(batch, [self.first, self.second])
        k = batch.size_of(self.first)
        if batch.size_of(self.second) != k:
            raise DimensionError("Bell measurement needs registers of equal size")
        batch.apply([self.first, self.second], bell_rotation(k))
        tmp = f"D.bell.{self.result}"
        # after rotation the first register holds z bits, the second x bits
        batch.measure([self.second, self.first], tmp)
        batch.view[self.result] = batch.data.pop(tmp).astype(object)
        batch.discard([self.first, self.second])
        return [batch.prune()]


@dataclass
class Split(Action):
    name: str
    parts: list

    def run(self, session, batch):
        _own(batch, [self.name])
        batch.split(self.name, [tuple(p) for p in self.parts], "D")
        return [batch]


@dataclass
class Forget(Action):
    names: list

    def run(self, session, batch):
        _own(batch, self.names)
        batch.discard(self.names)
        return [batch]


def _own(batch, names):
    for r in names:
        if not batch.has(r) or batch.owner[r] != "D":
            raise PortUnavailable(f"the distinguisher does not hold register {r!r}")


@dataclass
class Strategy:
    name: str
    actions: list


def bell_rotation(k):
    """Unitary on 2k qubits (first k, then their partners) mapping Bell states to basis states."""
    from .statevec import apply_matrix, GATES

    d = 1 << (2 * k)
    cols = []
    for c in range(d):
        v = np.zeros(d, dtype=complex)
        v[c] = 1
        for i in range(k):
            v = apply_matrix(v, GATES["CNOT"], [i, k + i])
            v = apply_matrix(v, GATES["H"], [i])
        cols.append(v)
    return np.stack(cols, axis=1)


def bell_projector(k):
    """Projector onto |Phi> over k pairs (first k qubits paired with the next k)."""
    from .statevec import bell_pairs

    phi = bell_pairs(k)
    return np.outer(phi, phi.conj())


# Sessions


@dataclass
class Transcript:
    system: str
    strategy: str
    events: list
    batches: list

    def total(self):
        return sum(b.mass() for b in self.batches)

    def probability(self, **where):
        """Probability that every named view field takes the given value."""
        p = 0.0
        for b in self.batches:
            mask = np.ones(b.B, dtype=bool)
            for k, v in where.items():
                col = b.view.get(k)
                mask &= np.array([x == v for x in col]) if col is not None else (v is None)
            p += float(b.probabilities()[mask].sum())
        return p

    def to_jsonl(self):
        return "".join(json.dumps(e, sort_keys=True, default=str) + "\n" for e in self.events)

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_jsonl())


class Session:
    """One isolated run of a strategy against a system."""

    def __init__(self, system: System, mode="exact", seed=0):
        if mode not in ("exact", "sample"):
            raise ValueError("mode must be 'exact' or 'sample'")
        self.system = system
        self.mode = mode
        self.rng = random.Random(seed)
        self.events = []
        self.step = 0
        self.batches = [b.prune() for b in system.start(self, [Batch.empty()])]

    def draw(self, batch, name, size, keyed=False, values=None):
        """Uniform classical value: all branches in exact mode, one sample otherwise."""
        vals = np.arange(size, dtype=np.int64) if values is None else np.asarray(values, dtype=np.int64)
        if self.mode == "exact":
            batch.expand(name, vals, np.full(len(vals), 1.0 / size), keyed=keyed)
        else:
            pick = vals[self.rng.randrange(len(vals))]
            batch.expand(name, np.array([pick]), np.array([1.0]), keyed=keyed)

    def record(self, batch, port, msg):
        summary = {}
        if msg.reg is not None:
            summary["register"] = msg.reg
        if msg.field is not None:
            summary["field"] = msg.field
        elif msg.value is not None:
            summary["value"] = msg.value
        self.events.append(
            {"step": self.step, "port": port, "payload": summary, "probability": round(batch.mass(), 15)}
        )

    def act(self, action):
        self.step += 1
        out = []
        for batch in self.batches:
            mask = _matches(batch, action.where)
            if mask.all():
                out.extend(action.run(self, batch))
            elif not mask.any():
                out.append(batch)
            else:
                out.extend(action.run(self, batch.select(mask)))
                out.append(batch.select(~mask))
        self.batches = [b for b in out if b.B]
        self.events.append(
            {
                "step": self.step,
                "port": getattr(action, "port", None) or action.label(),
                "payload": {"action": action.label()},
                "probability": round(sum(b.mass() for b in self.batches), 15),
            }
        )


def run_session(system: System, strategy: Strategy, mode="exact", seed=0) -> Transcript:
    s = Session(system, mode=mode, seed=seed)
    for action in strategy.actions:
        s.act(action)
    return Transcript(system.name, strategy.name, s.events, s.batches)


# Final views and distances


def _view_key(batch, i, names):
    return tuple((n, batch.view[n][i]) for n in names)


def _compress(F):
    """Factor with at most as many columns as rows, spanning the same operator F F^dagger."""
    d, r = F.shape
    if r <= d:
        return F
    ev, V = np.linalg.eigh(F @ F.conj().T)
    keep = ev > 1e-18
    return V[:, keep] * np.sqrt(ev[keep])


def _view_factors(batches):
    """Distinguisher states grouped by classical view, as factors.

    Returns ``{(view, registers): (F, keyed)}`` with the weighted reduced
    state on the distinguisher's registers (sorted by name) equal to F F^dagger.
    Views that share a key value are typically low rank, so factors keep
    memory proportional to the rank rather than to the squared dimension.
    """
    parts = {}
    keyed_of = {}
    for b in batches:
        regs = sorted(b.registers("D"))
        names = sorted(b.view)
        keyed = any(n in b.keyed for n in names)
        sig = tuple((r, b.size_of(r)) for r in regs)
        t, _ = b._grouped(regs) if regs else (b.psi.reshape(b.B, -1, 1), None)
        # t: (B, rest, dD) with D registers last
        index = {}
        for i in range(b.B):
            index.setdefault(_view_key(b, i, names), []).append(i)
        for view, rows in index.items():
            rows = np.asarray(rows)
            A = t[rows] * np.sqrt(b.weight[rows])[:, None, None]
            key = (view, sig)
            parts.setdefault(key, []).append(A.reshape(-1, A.shape[-1]).T)
            keyed_of[key] = keyed
    return {k: (_compress(np.hstack(fs)), keyed_of[k]) for k, fs in parts.items()}


def final_views(batches):
    """Distinguisher states grouped by classical view.

    Returns ``{(view, registers): (rho, keyed)}`` where ``rho`` is the
    weighted reduced state on the distinguisher's registers (sorted by name).
    """
    return {k: (F @ F.conj().T, keyed) for k, (F, keyed) in _view_factors(batches).items()}


def _weight(F):
    return float(np.vdot(F, F).real)


def _difference_norms(pairs):
    """Trace norms of F F^dagger - G G^dagger for a list of factor pairs ``(F, G)``.

    When the joint rank is below the dimension the norm is computed on the
    span of the factors: with W = [F, G] and signs S = diag(1, -1), the
    nonzero spectrum of W S W^dagger equals that of sqrt(W^dagger W) S sqrt(W^dagger W).
    """
    out = np.zeros(len(pairs))
    dense, small = {}, {}
    for i, (F, G) in enumerate(pairs):
        W = np.hstack([F, G])
        d, r = W.shape
        if r >= d:
            dense.setdefault(d, []).append((i, F @ F.conj().T - G @ G.conj().T))
        else:
            signs = np.concatenate([np.ones(F.shape[1]), -np.ones(G.shape[1])])
            small.setdefault(r, []).append((i, W.conj().T @ W, signs))
    for items in dense.values():
        idx = [i for i, _ in items]
        ev = np.linalg.eigvalsh(np.stack([M for _, M in items]))
        out[idx] = np.abs(ev).sum(axis=1)
    for items in small.values():
        idx = [i for i, _, _ in items]
        grams = np.stack([G for _, G, _ in items])
        grams = (grams + np.conj(np.swapaxes(grams, 1, 2))) / 2
        g, U = np.linalg.eigh(grams)
        root = (U * np.sqrt(np.clip(g, 0, None))[:, None, :]) @ np.conj(np.swapaxes(U, 1, 2))
        signs = np.stack([s for _, _, s in items])
        H = root @ (signs[:, :, None] * root)
        H = (H + np.conj(np.swapaxes(H, 1, 2))) / 2
        out[idx] = np.abs(np.linalg.eigvalsh(H)).sum(axis=1)
    return out


class _IdealIndex:
    """Lookup of ideal views, where symbolic keys match any concrete value."""

    def __init__(self, groups):
        self.groups = groups
        self.matched = {k: 0 for k in groups}
        self.patterns = {}
        for key in groups:
            view, sig = key
            names = tuple(n for n, _ in view)
            sym = tuple(i for i, (_, v) in enumerate(view) if isinstance(v, Uniform))
            lookup = tuple(None if isinstance(v, Uniform) else v for _, v in view)
            size = 1
            seen = {}
            for i in sym:
                u = view[i][1]
                if u.symbol not in seen:
                    seen[u.symbol] = u.size
                    size *= u.size
            self.patterns.setdefault((names, sig, sym), {})[lookup] = (key, size)

    def find(self, real_key):
        view, sig = real_key
        names = tuple(n for n, _ in view)
        for (pn, ps, sym), table in self.patterns.items():
            if pn != names or ps != sig:
                continue
            lookup = tuple(None if i in sym else v for i, (_, v) in enumerate(view))
            hit = table.get(lookup)
            if hit is None:
                continue
            ideal_key, size = hit
            ideal_view = ideal_key[0]
            chosen = {}
            ok = True
            for i in sym:
                u = ideal_view[i][1]
                if chosen.setdefault(u.symbol, view[i][1]) != view[i][1]:
                    ok = False
            if ok:
                return ideal_key, size
        return None, 1


@dataclass
class AdvantageReport:
    advantage: float
    real_groups: int
    ideal_groups: int
    unmatched_real: float
    unmatched_ideal: float
    real_mass: float
    ideal_mass: float


class _Accumulator:
    def __init__(self, ideal_groups):
        self.index = _IdealIndex(ideal_groups)
        self.total = 0.0
        self.unmatched_real = 0.0
        self.count = 0
        self.mass = 0.0

    def add(self, groups):
        pairs = []
        for key, (F, _) in groups.items():
            self.count += 1
            self.mass += _weight(F)
            ideal_key, size = self.index.find(key)
            if ideal_key is None:
                t = _weight(F)
                self.total += t / 2
                self.unmatched_real += t
                continue
            self.index.matched[ideal_key] += 1
            pairs.append((F, self.index.groups[ideal_key][0] / np.sqrt(size)))
        if pairs:
            self.total += float(_difference_norms(pairs).sum()) / 2

    def finish(self):
        unmatched = 0.0
        for table in self.index.patterns.values():
            for key, size in table.values():
                rest = size - self.index.matched[key]
                if rest:
                    t = _weight(self.index.groups[key][0]) * rest / size
                    unmatched += t
        self.total += unmatched / 2
        return unmatched


def distinguisher_advantage(real: System, ideal: System, strategy: Strategy, chunk=None) -> AdvantageReport:
    """Trace distance between the strategy's final views of ``real`` and ``ideal``.

    If ``real`` supports :meth:`restricted` (code-key subsets), the real side
    is evaluated in chunks of ``chunk`` code keys; views that reveal the code
    key are compared per chunk, the rest are accumulated.
    """
    if real.signature != ideal.signature:
        raise SignatureMismatch(f"{real.name} exposes {real.signature}, {ideal.name} exposes {ideal.signature}")
    ideal_t = run_session(ideal, strategy)
    ideal_groups = _view_factors(ideal_t.batches)
    acc = _Accumulator(ideal_groups)
    pending = {}
    parts = real.chunks(chunk) if chunk and hasattr(real, "chunks") else [real]
    for sub in parts:
        t = run_session(sub, strategy)
        groups = _view_factors(t.batches)
        ready = {}
        for key, (F, keyed) in groups.items():
            if keyed:
                ready[key] = (F, keyed)
            elif key in pending:
                pending[key] = (_compress(np.hstack([pending[key][0], F])), keyed)
            else:
                pending[key] = (F, keyed)
        acc.add(ready)
    acc.add(pending)
    unmatched_ideal = acc.finish()
    ideal_mass = sum(_weight(F) for F, _ in ideal_groups.values())
    return AdvantageReport(
        advantage=acc.total,
        real_groups=acc.count,
        ideal_groups=len(ideal_groups),
        unmatched_real=acc.unmatched_real,
        unmatched_ideal=unmatched_ideal,
        real_mass=acc.mass,
        ideal_mass=ideal_mass,
    )
