"""Command-line front end.

Exit codes: 0 success, 1 validation or input error, 2 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import attacks, budget
from .acsim import distinguisher_advantage, run_session
from .errors import CapExceededError
from .pauli import DEFAULT_CAP, PauliIndex
from .protocol import ETC, ETE
from .ptc import (
    chau_family,
    epsilon_report,
    identity_family,
    load_family,
    random_clifford_family,
    save_family,
)
from .resources import ideal_qauth_system, real_qauth_system, weak_ideal_system

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 1, 2
VARIANT_NAMES = {"ete": ETE, "etc": ETC}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def fmt_rational(x):
    x = Fraction(x)
    if x.denominator == 1:
        return f"{x.numerator} (≈ {float(x):.6g})"
    return f"{x.numerator}/{x.denominator} (≈ {float(x):.6g})"


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, PauliIndex):
        return v.label
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def _text(v):
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, PauliIndex):
        return v.label
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render(report, fmt):
    """``report`` is {"summary": {...}, "rows": [{...}, ...]} (rows optional)."""
    summary = report.get("summary", {})
    rows = report.get("rows", [])
    if fmt == "json":
        out = {"summary": {k: _jsonable(v) for k, v in summary.items()}}
        if rows:
            out["rows"] = [{k: _jsonable(v) for k, v in r.items()} for r in rows]
        return json.dumps(out, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if rows:
            keys = list(rows[0])
            w.writerow(keys)
            for r in rows:
                w.writerow([_jsonable(r[k]) for k in keys])
        else:
            w.writerow(["field", "value"])
            for k, v in summary.items():
                w.writerow([k, _jsonable(v)])
        return buf.getvalue()
    lines = [f"{k}: {_text(v)}" for k, v in summary.items()]
    if rows:
        keys = list(rows[0])
        lines.append("")
        lines.append("  ".join(keys))
        for r in rows:
            lines.append("  ".join(_text(r[k]) for k in keys))
    return "\n".join(lines) + "\n"


def parse_family(spec, m, n, seed, cap=DEFAULT_CAP):
    if spec == "chau":
        return chau_family(m, n, cap)
    if spec == "identity":
        return identity_family(m, n, cap)
    if spec.startswith("random:"):
        try:
            size = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad family spec {spec!r}") from None
        return random_clifford_family(m, n, size, seed, cap)
    if spec.startswith("file:"):
        return load_family(spec.split(":", 1)[1], cap)
    raise UsageError(f"unknown family spec {spec!r} (chau, identity, random:SIZE, file:PATH)")


def _family(args):
    return parse_family(args.family, args.m, args.n, args.seed)


# Commands


def cmd_ptc_verify(args):
    fam = _family(args)
    rep = epsilon_report(fam)
    target = Fraction(1, 2**args.n)
    summary = {
        "family": fam.name,
        "m": args.m,
        "n": args.n,
        "keys": len(fam),
        "nu": fam.nu,
        "eps_weak": rep.eps_weak,
        "eps_strong": rep.eps_strong,
        "worst_weak": rep.worst_weak,
        "worst_strong": rep.worst_strong,
        "target": target,
        "status": "PASS" if rep.eps_strong <= target else "FAIL",
    }
    return {"summary": summary}, EXIT_OK


def cmd_ptc_export(args):
    if not args.out:
        raise UsageError("ptc-export needs --out")
    fam = _family(args)
    save_family(fam, args.out)
    return {"summary": {"family": fam.name, "keys": len(fam), "written": args.out}}, EXIT_OK


def cmd_bounds(args):
    m, n = args.m, args.n
    rows = []
    forms = budget.closed_form_bounds(m, n)
    for preset in ("bcgst", "chau"):
        for variant in (ETE, ETC):
            kb = budget.key_requirements(variant, m, n, preset)
            rows.append(
                {
                    "construction": f"{preset}/{'ete' if variant == ETE else 'etc'}",
                    "eps_ptc": budget.named_eps(preset, m, n),
                    "error": forms[preset],
                    "key": kb.mu,
                    "recycled_accept": kb.nu_acc,
                    "recycled_reject": kb.nu_rej,
                }
            )
    for preset in ("bcgst", "chau"):
        led = budget.compose_full(m, n, family=preset)
        rows.append(
            {
                "construction": f"{preset}/composed",
                "eps_ptc": budget.named_eps(preset, m + n, n),
                "error": forms[f"{preset}_composed"],
                "key": led.initial,
                "recycled_accept": led.recycled_accept,
                "recycled_reject": led.recycled_reject,
            }
        )
    summary = {"m": m, "n": n, "abstract_bound": budget.abstract_bound(m, n)}
    summary.update(forms)
    if args.eta:
        summary["mac_error"] = budget.mac_error(args.eta)
        summary["eta"] = args.eta
    return {"summary": summary, "rows": rows}, EXIT_OK


def _strategy(fam, kind, recycle):
    if kind == "identity":
        return attacks.identity_strategy(fam, recycle)
    if kind == "impersonation":
        return attacks.impersonation_strategy(fam, recycle=recycle)
    if kind == "impersonation-then-message":
        return attacks.impersonation_strategy(fam, then_message=True, recycle=recycle)
    if kind.startswith("pauli:"):
        return attacks.pauli_strategy(fam, _pauli(kind.split(":", 1)[1], fam.dims.N), recycle)
    if kind.startswith("epr:"):
        p = _pauli(kind.split(":", 1)[1], fam.dims.N)
        return attacks.epr_substitution_strategy(fam, attacks.controlled_pauli_table(fam.dims.N, p), recycle)
    raise UsageError(f"unknown strategy {kind!r}")


def _pauli(text, N):
    try:
        p = PauliIndex.from_label(text)
    except (ValueError, KeyError):
        raise UsageError(f"bad Pauli label {text!r}") from None
    if p.N != N:
        raise UsageError(f"Pauli {text} acts on {p.N} qubits, the cipher has {N}")
    return p


def _systems(fam, variant, recycle):
    if recycle:
        return real_qauth_system(fam, variant), ideal_qauth_system(fam, variant)
    return real_qauth_system(fam, variant, recycle=False), weak_ideal_system(fam)


def cmd_simulate(args):
    fam = _family(args)
    variant = VARIANT_NAMES[args.variant]
    recycle = not args.no_recycle
    strat = _strategy(fam, args.kind, recycle)
    real, ideal = _systems(fam, variant, recycle)
    rep = epsilon_report(fam)
    exact = run_session(real, strat)
    accepts = 0
    events = []
    for t in range(args.trials):
        tr = run_session(real, strat, mode="sample", seed=args.seed + t)
        accepts += tr.probability(**{"bob.out": 1}) > 0.5
        for e in tr.events:
            events.append(dict(e, trial=t))
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(json.dumps(e, sort_keys=True, default=str) + "\n" for e in events)
    adv = distinguisher_advantage(real, ideal, strat, chunk=64).advantage
    bound = budget.qauth_error(rep.eps_strong) if recycle else float(budget.weak_error(rep.eps_weak, args.n))
    kb = budget.key_requirements(variant, args.m, args.n, fam)
    summary = {
        "family": fam.name,
        "variant": variant,
        "strategy": strat.name,
        "recycling": recycle,
        "accept_probability": exact.probability(**{"bob.out": 1}),
        "trials": args.trials,
        "sampled_accepts": accepts,
        "advantage": adv,
        "bound": bound,
        "status": "PASS" if adv <= bound + args.tolerance else "FAIL",
        "key_bits": kb.mu,
        "recycled_accept": kb.nu_acc,
        "recycled_reject": kb.nu_rej,
    }
    return {"summary": summary}, EXIT_OK


def cmd_attack(args):
    fam = _family(args)
    kind = args.kind
    if kind == "key-extraction":
        out = attacks.key_extraction_attack(fam, withhold=args.withhold, release_bits=args.release_bits)
        summary = {
            "family": fam.name,
            "attack": kind,
            "recovered": out.recovered,
            "keys": out.total,
            "success": round(out.success, 12),
            "result": out.summary(),
        }
        rows = [{"key": k, "success": round(v, 12)} for k, v in sorted(out.per_key.items())]
        return {"summary": summary, "rows": rows if args.format != "text" else []}, EXIT_OK
    if kind == "impersonation":
        N = fam.dims.N
        fakes = {"antisymmetric": "antisymmetric", "mixed": np.eye(1 << N) / (1 << N), "zero": np.eye(1 << N)[0]}
        if args.fake not in fakes:
            raise UsageError(f"unknown fake {args.fake!r} (antisymmetric, mixed, zero)")
        p = attacks.impersonation_acceptance(fam, fakes[args.fake], VARIANT_NAMES[args.variant])
        summary = {"family": fam.name, "attack": kind, "fake": args.fake, "accept": round(p, 12), "target": Fraction(1, 2**args.n)}
        return {"summary": summary}, EXIT_OK
    if kind == "substitution":
        p, s = attacks.best_pauli_substitution(fam)
        return {"summary": {"family": fam.name, "attack": kind, "pauli": p, "success": s}}, EXIT_OK
    if kind == "battery":
        variant = VARIANT_NAMES[args.variant]
        res = attacks.battery(fam, variant, recycle=not args.no_recycle)
        rows = [{"strategy": r.name, "advantage": r.advantage, "bound": r.bound, "status": "PASS" if r.advantage <= r.bound + args.tolerance else "FAIL"} for r in res]
        worst = max(res, key=lambda r: r.advantage)
        summary = {
            "family": fam.name,
            "attack": kind,
            "strategies": len(res),
            "worst": worst.name,
            "advantage": worst.advantage,
            "bound": worst.bound,
            "status": "PASS" if all(r["status"] == "PASS" for r in rows) else "FAIL",
        }
        return {"summary": summary, "rows": rows}, EXIT_OK if summary["status"] == "PASS" else EXIT_INVALID
    raise UsageError(f"unknown attack kind {kind!r}")


def cmd_compose(args):
    if args.family not in budget.NAMED_NU:
        raise UsageError(f"compose takes a preset family ({', '.join(budget.NAMED_NU)}), got {args.family!r}")
    led = budget.compose_full(args.m, args.n, r=args.r, eta=args.eta, family=args.family)
    summary = {
        "family": led.family,
        "m": led.m,
        "n": led.n,
        "r": led.r,
        "eta": led.eta,
        "initial_key": led.initial,
        "recycled_accept": led.recycled_accept,
        "recycled_reject": led.recycled_reject,
        "net_loss_accept": led.net_accept,
        "net_loss_reject": led.net_reject,
        "eps_qauth": led.eps_qauth,
        "eps_auth": led.eps_auth,
        "eps_total": led.eps_total,
    }
    return {"summary": summary}, EXIT_OK


COMMANDS = {
    "ptc-verify": cmd_ptc_verify,
    "ptc-export": cmd_ptc_export,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "attack": cmd_attack,
    "compose": cmd_compose,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", type=int, default=1, help="message qubits (default 1)")
    common.add_argument("-n", type=int, default=2, help="syndrome qubits (default 2)")
    common.add_argument("--family", default="chau", help="chau | identity | random:SIZE | file:PATH")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", help="write the report (or family file) here")
    common.add_argument("--tolerance", type=float, default=1e-9)

    p = _Parser(prog="keyrecycle", description="Quantum authentication with key recycling.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("ptc-verify", parents=[common], help="exact weak and strong errors of a code family")
    sub.add_parser("ptc-export", parents=[common], help="write a code family file")
    b = sub.add_parser("bounds", parents=[common], help="closed-form errors and key budgets")
    b.add_argument("--eta", type=int, default=None, help="MAC key bits")
    s = sub.add_parser("simulate", parents=[common], help="run a strategy against the real and ideal systems")
    s.add_argument("--kind", default="identity", help="identity | impersonation | impersonation-then-message | pauli:LABEL | epr:LABEL")
    s.add_argument("--variant", choices=tuple(VARIANT_NAMES), default="ete")
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--no-recycle", action="store_true")
    s.add_argument("--transcript", help="write sampled transcripts as JSON lines")
    a = sub.add_parser("attack", parents=[common], help="run a concrete attack")
    a.add_argument("--kind", required=True, choices=("key-extraction", "impersonation", "substitution", "battery"))
    a.add_argument("--fake", default="antisymmetric")
    a.add_argument("--variant", choices=tuple(VARIANT_NAMES), default="ete")
    a.add_argument("--withhold", action="store_true", help="key extraction without the recycled key")
    a.add_argument("--release-bits", type=int, default=None)
    a.add_argument("--no-recycle", action="store_true")
    c = sub.add_parser("compose", parents=[common], help="key ledger of the composed protocol")
    c.add_argument("--r", type=int, default=None, help="fresh key bits carried per run (default n)")
    c.add_argument("--eta", type=int, default=None, help="MAC key bits (default n)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.m < 1 or args.n < 1:
            raise UsageError("m and n must be positive")
        if getattr(args, "trials", 1) < 0:
            raise UsageError("--trials must be non-negative")
        report, code = COMMANDS[args.command](args)
    except CapExceededError as exc:
        print(f"keyrecycle: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError, OSError, KeyError) as exc:
        print(f"keyrecycle: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(report, args.format)
    if args.out and args.command != "ptc-export":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
