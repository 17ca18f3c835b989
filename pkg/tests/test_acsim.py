import json

import numpy as np
import pytest

from keyrecycle.acsim import (
    Apply,
    BellMeasure,
    Forget,
    Machine,
    Measure,
    Msg,
    Outer,
    Prepare,
    Send,
    Split,
    Strategy,
    System,
    Uniform,
    distinguisher_advantage,
    final_views,
    run_session,
)
from keyrecycle.attacks import identity_strategy, pauli_strategy
from keyrecycle.errors import IllegalWiring, PortUnavailable, SignatureMismatch
from keyrecycle.pauli import PauliIndex
from keyrecycle.protocol import ETC, ETE
from keyrecycle.resources import (
    InsecureChannel,
    ideal_qauth_system,
    real_qauth_system,
    secure_channel_system,
)
from keyrecycle.statevec import bell_pairs, pauli_matrix


class Echo(Machine):
    inputs = ("in",)
    outputs = ("out",)

    def receive(self, session, batch, port, msg):
        return [(batch, [("out", msg)])]


def echo_system(name="echo"):
    return System(name, [Echo("e")], [], [Outer("d.in", "in", "e", "in"), Outer("d.out", "out", "e", "out")])


class TestWiring:
    def test_duplicate_machine(self):
        with pytest.raises(IllegalWiring):
            System("x", [Echo("e"), Echo("e")], [], [])

    def test_dangling_input(self):
        with pytest.raises(IllegalWiring):
            System("x", [Echo("e")], [], [Outer("d.out", "out", "e", "out")])

    def test_dangling_output(self):
        with pytest.raises(IllegalWiring):
            System("x", [Echo("e")], [], [Outer("d.in", "in", "e", "in")])

    def test_output_connected_twice(self):
        links = [(("a", "out"), ("b", "in"))]
        outer = [
            Outer("d.in", "in", "a", "in"),
            Outer("d.out", "out", "a", "out"),
            Outer("d.out2", "out", "b", "out"),
        ]
        with pytest.raises(IllegalWiring):
            System("x", [Echo("a"), Echo("b")], links, outer)

    def test_unknown_port(self):
        with pytest.raises(IllegalWiring):
            System("x", [Echo("e")], [], [Outer("d.in", "in", "e", "nope")])

    def test_port_used_twice(self):
        strat = Strategy("twice", [Send("d.in", value=1), Send("d.in", value=2)])
        with pytest.raises(IllegalWiring):
            run_session(echo_system(), strat)

    def test_unknown_outer_port(self):
        with pytest.raises(PortUnavailable):
            run_session(echo_system(), Strategy("bad", [Send("d.nope", value=1)]))

    def test_register_not_held(self):
        with pytest.raises(PortUnavailable):
            run_session(echo_system(), Strategy("bad", [Apply(["ghost"], np.eye(2))]))

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            distinguisher_advantage(echo_system(), secure_channel_system(1), Strategy("s", []))


class TestEngine:
    def test_echo_constant(self):
        t = run_session(echo_system(), Strategy("s", [Send("d.in", value=7)]))
        assert t.probability(**{"d.out": 7}) == pytest.approx(1)

    def test_echo_register(self):
        acts = [Prepare(["R", "M"], [1, 1], bell_pairs(1)), Send("d.in", reg="M"), BellMeasure("d.out", "R", "b")]
        t = run_session(echo_system(), Strategy("s", acts))
        assert t.probability(b=0) == pytest.approx(1)

    @pytest.mark.parametrize("label,outcome", [("I", 0), ("Z", 1), ("X", 2), ("Y", 3)])
    def test_bell_outcome_packs_x_then_z(self, label, outcome):
        acts = [
            Prepare(["A", "B"], [1, 1], bell_pairs(1)),
            Apply(["A"], pauli_matrix(PauliIndex.from_label(label))),
            BellMeasure("A", "B", "r"),
        ]
        t = run_session(echo_system(), Strategy("s", acts))
        assert t.probability(r=outcome) == pytest.approx(1)

    def test_measure_and_split(self):
        plus = np.full(4, 0.5)
        acts = [Prepare(["A"], [2], plus), Split("A", [("A0", 1), ("A1", 1)]), Measure(["A0"], "a"), Forget(["A1"])]
        t = run_session(echo_system(), Strategy("s", acts))
        assert t.probability(a=0) == pytest.approx(0.5)
        assert t.total() == pytest.approx(1)

    def test_conditional_action(self):
        plus = np.full(2, 2**-0.5)
        acts = [Prepare(["A"], [1], plus), Measure(["A"], "a"), Send("d.in", value="hit", where={"a": 1})]
        t = run_session(echo_system(), Strategy("s", acts))
        assert t.probability(**{"d.out": "hit"}) == pytest.approx(0.5)
        assert t.probability(**{"d.out": None}) == pytest.approx(0.5)

    def test_self_advantage_zero(self, chau11):
        real = real_qauth_system(chau11, ETE)
        rep = distinguisher_advantage(real, real_qauth_system(chau11, ETE), identity_strategy(chau11))
        assert rep.advantage == pytest.approx(0, abs=1e-9)

    def test_chunking_is_exact(self, chau11):
        real = real_qauth_system(chau11, ETE)
        ideal = ideal_qauth_system(chau11, ETE)
        strat = pauli_strategy(chau11, PauliIndex.from_label("XX"))
        whole = distinguisher_advantage(real, ideal, strat).advantage
        parts = distinguisher_advantage(real, ideal, strat, chunk=7).advantage
        assert parts == pytest.approx(whole, abs=1e-9)

    def test_symbolic_key_matches_every_value(self):
        class KeyOut(Machine):
            inputs = ("req",)
            outputs = ("key",)

            def __init__(self, name, symbolic):
                super().__init__(name)
                self.symbolic = symbolic

            def receive(self, session, batch, port, msg):
                if self.symbolic:
                    return [(batch, [("key", Msg(value=Uniform("k", 4)))])]
                session.draw(batch, "k", 4, keyed=True)
                return [(batch, [("key", Msg(field="k"))])]

        def system(symbolic):
            m = KeyOut("g", symbolic)
            return System("keys", [m], [], [Outer("d.req", "in", "g", "req"), Outer("d.key", "out", "g", "key")])

        strat = Strategy("s", [Send("d.req")])
        rep = distinguisher_advantage(system(False), system(True), strat)
        assert rep.advantage == pytest.approx(0, abs=1e-12)
        assert rep.unmatched_real == rep.unmatched_ideal == 0


class TestTranscripts:
    def test_deterministic(self, chau11):
        strat = identity_strategy(chau11)
        a = run_session(real_qauth_system(chau11, ETC), strat, mode="sample", seed=3)
        b = run_session(real_qauth_system(chau11, ETC), strat, mode="sample", seed=3)
        assert a.to_jsonl() == b.to_jsonl()
        assert a.total() == pytest.approx(1)

    def test_exact_mode_keeps_all_keys(self, chau11):
        t = run_session(real_qauth_system(chau11, ETC), identity_strategy(chau11))
        assert sum(b.B for b in t.batches) == 60 * 4 * 2
        assert t.probability(**{"bob.out": 1}) == pytest.approx(1)

    def test_bad_mode(self, chau11):
        with pytest.raises(ValueError):
            run_session(real_qauth_system(chau11, ETE), identity_strategy(chau11), mode="fast")

    def test_jsonl_export(self, chau11, tmp_path):
        t = run_session(real_qauth_system(chau11, ETE), identity_strategy(chau11), mode="sample", seed=0)
        path = tmp_path / "t.jsonl"
        t.save(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines
        for line in lines:
            event = json.loads(line)
            assert set(event) == {"step", "port", "payload", "probability"}
        ports = [json.loads(line)["port"] for line in lines]
        assert "eve.cipher" in ports and "bob.out" in ports

    def test_final_views_reduced_state(self):
        acts = [Prepare(["R", "M"], [1, 1], bell_pairs(1)), Send("d.in", reg="M"), Forget(["R"])]
        t = run_session(echo_system(), Strategy("s", acts))
        (rho, keyed), = final_views(t.batches).values()
        assert np.allclose(rho, np.eye(2) / 2)
        assert not keyed


class TestFactoredNorms:
    @pytest.mark.parametrize("d,r1,r2", [(8, 1, 3), (4, 2, 2), (4, 5, 1), (2, 1, 1)])
    def test_matches_dense(self, rng, d, r1, r2):
        from keyrecycle.acsim import _compress, _difference_norms

        F = rng.normal(size=(d, r1)) + 1j * rng.normal(size=(d, r1))
        G = rng.normal(size=(d, r2)) + 1j * rng.normal(size=(d, r2))
        dense = np.abs(np.linalg.eigvalsh(F @ F.conj().T - G @ G.conj().T)).sum()
        assert _difference_norms([(F, G)])[0] == pytest.approx(dense)
        C = _compress(F)
        assert C.shape[1] <= d
        assert np.allclose(C @ C.conj().T, F @ F.conj().T)
