"""Key budgets and closed-form error bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .protocol import ETC, ETE, VARIANTS
from .ptc import CodeFamily

# Code-family presets given by their key length in bits as a function of (m, n).
# "bcgst" is the construction with nu = n and eps = (2m/n + 2)/2^n; "chau" is
# the SL(2, 2^{m+n}) family with nu = 3m + 3n and eps = 2^-n.
NAMED_NU = {
    "bcgst": lambda m, n: n,
    "chau": lambda m, n: 3 * m + 3 * n,
}


def named_eps(name, m, n):
    if name == "bcgst":
        return Fraction(2 * m + 2 * n, n * 2**n)
    if name == "chau":
        return Fraction(1, 2**n)
    raise ValueError(f"unknown family preset {name!r}")


def family_nu(family, m, n):
    if isinstance(family, CodeFamily):
        return family.nu
    if isinstance(family, int):
        return family
    try:
        return NAMED_NU[family](m, n)
    except KeyError:
        raise ValueError(f"unknown family preset {family!r}") from None


@dataclass(frozen=True)
class KeyBudget:
    mu: int
    nu_acc: int
    nu_rej: int
    eta: int = 0
    r: int = 0

    def __post_init__(self):
        if not 0 <= self.nu_rej <= self.nu_acc <= self.mu:
            raise ValueError(f"need 0 <= nu_rej <= nu_acc <= mu, got {self}")
        if self.eta < 0 or self.r < 0:
            raise ValueError("eta and r must be non-negative")


def key_requirements(variant, m, n, family="chau") -> KeyBudget:
    """Initial key and recycled amounts for one protocol run.

    ``family`` is a :class:`CodeFamily`, a preset name or the code key
    length in bits.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    nu = family_nu(family, m, n)
    mu = nu + 2 * m + (2 * n if variant == ETE else n)
    return KeyBudget(mu=mu, nu_acc=mu, nu_rej=nu)


@dataclass(frozen=True)
class RecycleVerdict:
    accepted: bool
    recycled: int
    net_loss: int


def recycle_verdict(budget: KeyBudget, accepted: bool) -> RecycleVerdict:
    """Key bits returned after a run; MAC bits count as lost unless replenished."""
    initial = budget.mu + budget.eta
    if accepted:
        recycled = budget.nu_acc + min(budget.r, budget.eta)
    else:
        recycled = budget.nu_rej
    return RecycleVerdict(accepted, recycled, initial - recycled)


def qauth_error(eps):
    """sqrt(eps) + eps/2."""
    eps = float(eps)
    return math.sqrt(eps) + eps / 2


def mac_error(eta):
    return 2.0 ** (-eta / 2)


def weak_error(eps, n):
    """Error of the scheme without recycling: max(eps, 2^-n)."""
    return max(Fraction(eps), Fraction(1, 2**n))


def closed_form_bounds(m, n):
    """Closed-form errors of both presets, alone and composed with the MAC ledger."""
    x = m / n
    return {
        "bcgst": math.sqrt((2 * x + 2) / 2**n) + (x + 1) / 2**n,
        "chau": 2 ** (-n / 2) + 2 ** (-n - 1),
        "bcgst_composed": 2 ** (-n / 2) * (1 + math.sqrt(2 * x + 4)) + 2.0**-n * (x + 2),
        "chau_composed": 2 ** (-n / 2 + 1) + 2 ** (-n - 1),
    }


def abstract_bound(m, n):
    """Simplified bound 2^{-n/2+1} sqrt(2m/n + 2).

    It dominates the bcgst closed form exactly when m/n + 1 <= 2^{n+1}.
    """
    return 2 ** (-n / 2 + 1) * math.sqrt(2 * m / n + 2)


@dataclass(frozen=True)
class ErrorBudget:
    eps_ptc: Fraction | float
    eps_qauth: float
    eps_auth: float
    eps_ecc: float
    eps_total: float
    closed_forms: dict = field(default_factory=dict, compare=False)


def theory_bounds(m, n, eps_ptc, eta=None, eps_ecc=0.0) -> ErrorBudget:
    """Evaluate every closed form; the composed total is the sum of the parts."""
    eps_ptc = Fraction(eps_ptc) if not isinstance(eps_ptc, float) else eps_ptc
    eps_q = qauth_error(eps_ptc)
    eps_a = mac_error(eta) if eta else 0.0
    forms = dict(closed_form_bounds(m, n))
    forms["weak"] = float(weak_error(eps_ptc, n)) if not isinstance(eps_ptc, float) else max(eps_ptc, 2.0**-n)
    forms["abstract"] = abstract_bound(m, n)
    if eta:
        forms["mac"] = eps_a
    return ErrorBudget(eps_ptc, eps_q, eps_a, eps_ecc, eps_q + eps_a + eps_ecc, forms)


@dataclass(frozen=True)
class ComposedLedgerReport:
    family: str
    m: int
    n: int
    r: int
    eta: int
    initial: int
    recycled_accept: int
    recycled_reject: int
    net_accept: int
    net_reject: int
    eps_qauth: float
    eps_auth: float
    eps_total: float


def compose_full(m, n, r=None, eta=None, family="chau") -> ComposedLedgerReport:
    """Ledger of the protocol that sends m qubits plus r fresh classical key bits.

    The classical r bits only need a bit-flip pad, so the quantum layer costs
    nu(m+r, n) + 2m + r + n bits, plus eta bits for the MAC on the receipt.
    On accept all of it comes back (r fresh bits replace the MAC key); on
    reject only the code key is recycled.
    """
    r = n if r is None else r
    eta = n if eta is None else eta
    if not isinstance(family, str):
        raise ValueError("compose_full takes a family preset name")
    nu = family_nu(family, m + r, n)
    quantum = nu + 2 * m + r + n
    initial = quantum + eta
    rec_acc = quantum + min(r, eta)
    rec_rej = nu
    eps_q = qauth_error(named_eps(family, m + r, n))
    eps_a = mac_error(eta)
    return ComposedLedgerReport(
        family=family,
        m=m,
        n=n,
        r=r,
        eta=eta,
        initial=initial,
        recycled_accept=rec_acc,
        recycled_reject=rec_rej,
        net_accept=initial - rec_acc,
        net_reject=initial - rec_rej,
        eps_qauth=eps_q,
        eps_auth=eps_a,
        eps_total=eps_q + eps_a,
    )
