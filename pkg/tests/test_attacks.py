from fractions import Fraction

import numpy as np
import pytest

from keyrecycle.attacks import (
    battery,
    best_pauli_substitution,
    controlled_pauli_table,
    epr_substitution,
    epr_unitary,
    impersonation_acceptance,
    key_extraction_attack,
    misclassification_mass,
)
from keyrecycle.budget import qauth_error
from keyrecycle.errors import DimensionError
from keyrecycle.pauli import PauliIndex
from keyrecycle.protocol import ETC, ETE, KeyMaterial, encrypt
from keyrecycle.ptc import ErrorClass, classify, epsilon_report, identity_family, random_clifford_family
from keyrecycle.statevec import zero_state


class TestKeyExtraction:
    def test_recycled_code_key_reveals_everything(self, chau11):
        out = key_extraction_attack(chau11)
        assert (out.recovered, out.total) == (60, 60)
        assert out.success == pytest.approx(1)
        assert out.summary() == "recovered 60/60 keys, success 1.0"

    def test_withheld_key(self, chau11):
        out = key_extraction_attack(chau11, withhold=True)
        assert out.success < 1
        assert out.recovered == 0

    def test_truncated_release(self, chau11):
        out = key_extraction_attack(chau11, release_bits=2)
        assert out.success < 1
        assert out.recovered < out.total

    def test_full_release_bits(self, chau11):
        assert key_extraction_attack(chau11, release_bits=chau11.nu).recovered == 60


class TestImpersonation:
    @pytest.mark.parametrize("variant", [ETE, ETC])
    def test_two_to_minus_n(self, chau11, chau12, variant):
        assert impersonation_acceptance(chau11, variant=variant) == pytest.approx(1 / 2)
        assert impersonation_acceptance(chau12, variant=variant) == pytest.approx(1 / 4)

    def test_family_independent(self, chau12):
        fam = random_clifford_family(1, 2, 20, seed=5)
        assert impersonation_acceptance(fam) == pytest.approx(impersonation_acceptance(chau12))

    def test_mixed_fake(self, chau12):
        assert impersonation_acceptance(chau12, np.eye(8) / 8, ETC) == pytest.approx(1 / 4)

    def test_encoded_zero_fake_under_etc(self):
        # the zero state passes the syndrome check only for s = 0
        fam = identity_family(1, 1)
        assert impersonation_acceptance(fam, zero_state(2), ETC) == pytest.approx(1 / 2)

    def test_honest_cipher_single_key(self):
        fam = identity_family(1, 1)
        keys = KeyMaterial(ETE, 0, PauliIndex.from_label("XZ"))
        cipher = encrypt(fam, keys, zero_state(1))
        assert impersonation_acceptance(fam, cipher, keys=keys) == pytest.approx(1)

    def test_bad_inputs(self, chau11):
        with pytest.raises(ValueError):
            impersonation_acceptance(chau11, "nope")
        with pytest.raises(DimensionError):
            impersonation_acceptance(chau11, zero_state(3))
        with pytest.raises(ValueError):
            impersonation_acceptance(chau11, variant="xyz")


class TestSubstitution:
    def test_identity_family_is_broken(self):
        pauli, success = best_pauli_substitution(identity_family(1, 1))
        assert success == 1
        assert classify(identity_family(1, 1), 0, pauli) is ErrorClass.UNDETECTED_HARMFUL

    def test_chau_weak_error(self, chau11):
        assert best_pauli_substitution(chau11)[1] == Fraction(2, 5)

    def test_misclassification_mass_oracle(self, chau11):
        for j in range(1, 16):
            count = sum(classify(chau11, k, PauliIndex.from_int(2, j)) is not ErrorClass.DETECTED for k in range(60))
            assert misclassification_mass(chau11, j) == Fraction(count, 60)


class TestEpr:
    def test_identity_table(self, chau11):
        rep = epr_substitution(chau11, {0: np.eye(1)})
        assert rep.advantage == pytest.approx(0, abs=1e-9)

    @pytest.mark.parametrize("label", ["XI", "IZ", "YY"])
    def test_single_pauli_equals_undetected_mass(self, chau11, label):
        rep = epr_substitution(chau11, {PauliIndex.from_label(label): np.eye(1)})
        assert rep.advantage == pytest.approx(float(misclassification_mass(chau11, PauliIndex.from_label(label))))
        assert rep.within_bound

    def test_controlled_pauli_within_bound(self, chau11):
        rep_eps = epsilon_report(chau11)
        for worst in (rep_eps.worst_strong, rep_eps.worst_weak):
            rep = epr_substitution(chau11, controlled_pauli_table(2, worst))
            assert rep.bound == pytest.approx(qauth_error(Fraction(7, 15)))
            assert 0 < rep.advantage and rep.within_bound

    def test_etc_variant(self, chau11):
        rep = epr_substitution(chau11, controlled_pauli_table(2, 5), variant=ETC)
        assert rep.within_bound

    def test_unitary_checks(self):
        assert epr_unitary({0: np.eye(2)}, 1)[1] == 1
        with pytest.raises(ValueError):
            epr_unitary({0: np.eye(2), 1: np.eye(2)}, 1)
        with pytest.raises(ValueError):
            epr_unitary({0: np.eye(8)}, 1)
        with pytest.raises(ValueError):
            epr_unitary({}, 1)
        with pytest.raises(ValueError):
            epr_unitary({0: np.eye(2), 1: np.eye(4) / 2}, 1)


class TestBattery:
    def test_small_battery_within_bounds(self, chau11):
        entries = battery(chau11)
        assert len(entries) >= 15 + 1 + 2
        assert all(e.within_bound for e in entries)
        by_name = {e.name: e for e in entries}
        assert by_name["identity"].advantage == pytest.approx(0, abs=1e-9)

    def test_no_recycling_battery(self, chau11):
        entries = battery(chau11, recycle=False)
        assert all(e.within_bound for e in entries)
        assert {e.bound for e in entries} == {0.5}
