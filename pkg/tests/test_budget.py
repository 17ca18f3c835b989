import math
from fractions import Fraction

import pytest

from keyrecycle.budget import (
    KeyBudget,
    abstract_bound,
    compose_full,
    closed_form_bounds,
    key_requirements,
    named_eps,
    qauth_error,
    recycle_verdict,
    theory_bounds,
    weak_error,
)
from keyrecycle.protocol import ETC, ETE

GRID = [(m, n) for m in (1, 2, 3, 7, 16, 64) for n in (1, 2, 5, 8, 33, 64)]


class TestKeyRequirements:
    @pytest.mark.parametrize("m,n", GRID)
    def test_instantiations(self, m, n):
        assert key_requirements(ETC, m, n, "bcgst").mu == 2 * m + 2 * n
        kb = key_requirements(ETC, m, n, "chau")
        assert (kb.mu, kb.nu_rej) == (5 * m + 4 * n, 3 * m + 3 * n)

    @pytest.mark.parametrize("m,n", GRID)
    def test_variant_difference(self, m, n):
        ete = key_requirements(ETE, m, n, "chau")
        etc = key_requirements(ETC, m, n, "chau")
        assert ete.mu == 3 * m + 3 * n + 2 * m + 2 * n
        assert ete.nu_acc - ete.nu_rej == 2 * m + 2 * n
        assert etc.nu_acc - etc.nu_rej == 2 * m + n

    def test_family_object(self, chau11):
        assert key_requirements(ETC, 1, 1, chau11).mu == 6 + 2 + 1

    def test_unknown(self):
        with pytest.raises(ValueError):
            key_requirements("bogus", 1, 1)
        with pytest.raises(ValueError):
            key_requirements(ETC, 1, 1, "bogus")

    def test_budget_invariants(self):
        with pytest.raises(ValueError):
            KeyBudget(mu=3, nu_acc=4, nu_rej=1)


class TestCompose:
    @pytest.mark.parametrize("m,n", GRID)
    def test_headline_budgets(self, m, n):
        a = compose_full(m, n, family="bcgst")
        assert a.initial == 2 * m + 4 * n
        assert a.recycled_reject == n
        assert a.net_accept == 0
        b = compose_full(m, n, family="chau")
        assert b.initial == 5 * m + 9 * n
        assert b.recycled_reject == 3 * m + 6 * n
        assert a.net_reject == b.net_reject == 2 * m + 3 * n

    def test_composed_chau_example(self):
        led = compose_full(4, 8)
        assert (led.initial, led.recycled_reject) == (92, 60)

    def test_errors_sum(self):
        led = compose_full(1, 2)
        assert led.eps_total == pytest.approx(led.eps_qauth + led.eps_auth)

    def test_verdicts(self):
        kb = KeyBudget(mu=10, nu_acc=10, nu_rej=6, eta=2, r=2)
        assert recycle_verdict(kb, True).net_loss == 0
        assert recycle_verdict(kb, False).net_loss == 6


class TestBounds:
    def test_qauth(self):
        assert qauth_error(Fraction(1, 16)) == pytest.approx(0.28125)

    def test_chau_closed_form(self):
        assert closed_form_bounds(1, 8)["chau"] == pytest.approx(2**-4 + 2**-9)
        assert closed_form_bounds(1, 8)["chau"] == pytest.approx(0.064453125)

    def test_composed_chau_closed_form(self):
        assert closed_form_bounds(4, 8)["chau_composed"] == pytest.approx(2**-3 + 2**-9)

    def test_bcgst_closed_forms(self):
        m, n = 3, 6
        x = m / n
        cb = closed_form_bounds(m, n)
        assert cb["bcgst"] == pytest.approx(math.sqrt((2 * x + 2) / 2**n) + (x + 1) / 2**n)
        assert cb["bcgst_composed"] == pytest.approx(2 ** (-n / 2) * (1 + math.sqrt(2 * x + 4)) + 2**-n * (x + 2))

    def test_bcgst_form_is_qauth_error(self):
        for m, n in [(1, 1), (2, 4), (5, 3)]:
            assert closed_form_bounds(m, n)["bcgst"] == pytest.approx(qauth_error(named_eps("bcgst", m, n)))

    @pytest.mark.parametrize("m,n", GRID)
    def test_abstract_bound_region(self, m, n):
        dominates = closed_form_bounds(m, n)["bcgst"] <= abstract_bound(m, n) + 1e-12
        assert dominates == (m / n + 1 <= 2 ** (n + 1))

    def test_weak(self):
        assert weak_error(Fraction(2, 5), 1) == Fraction(1, 2)
        assert weak_error(Fraction(2, 5), 2) == Fraction(2, 5)

    def test_theory_bounds(self):
        eb = theory_bounds(1, 2, Fraction(15, 63), eta=40)
        assert eb.eps_qauth == pytest.approx(math.sqrt(15 / 63) + 15 / 126)
        assert eb.eps_auth == pytest.approx(2**-20)
        assert eb.eps_total == pytest.approx(eb.eps_qauth + eb.eps_auth)
