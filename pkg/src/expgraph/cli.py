"""Command-line front end.

Exit codes: 0 success / clean audit, 1 audit failure (an expect_confirmed
step was Refuted), 2 usage error, 3 audit discrepancy in audit-only steps.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .arith import FactoredInteger
from .auditor import ProfileError, dump_json, load_profile, run_audit
from .groups import (
    Family,
    FixtureError,
    PrimePowerField,
    order,
    prime_graph_summary,
    prime_powers,
    verify_partition,
)
from .outcomes import Status
from .zsigmondy import (
    EXCEPTION_PAIRS,
    primitive_prime_divisors,
    verify_primitiv,
    violations,
    zsigmondy_scan,
)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_DISCREPANCY = 0, 1, 2, 3
FAMILY_CHOICES = ("f4", "e6", "2e6")


class UsageError(Exception):
    pass


def _field(text: str) -> PrimePowerField:
    try:
        q = int(text)
    except ValueError:
        raise UsageError(f"{text!r} is not an integer") from None
    try:
        return PrimePowerField.from_q(q)
    except ValueError:
        raise UsageError(f"{q} is not a prime power") from None


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _format_order(g: FactoredInteger, p: int) -> str:
    # characteristic first, then the remaining primes ascending
    parts = [(p, g.factors[p])] + [(r, e) for r, e in g.factors.items() if r != p]
    return " * ".join(f"{r}^{e}" if e > 1 else str(r) for r, e in parts)


def _set_text(values) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


# --------------------------------------------------------------------------
# subcommands


def cmd_order(args) -> int:
    family = Family.parse(args.family)
    f = _field(args.q)
    g = order(family, f)
    if args.format == "json":
        record = {
            "family": family.value,
            "q": str(f.q),
            "p": str(f.p),
            "n": str(f.n),
            "order": str(g.value),
            "factors": [[str(p), str(e)] for p, e in g.factors.items()],
        }
        _emit(dump_json(record))
    else:
        _emit(f"|{family.value}({f.q})| = {g.value}\n  = {_format_order(g, f.p)}")
    return EXIT_OK


def _dot(summary) -> str:
    name = f"{summary.family.value}({summary.q})"
    lines = [f'graph "{name}" {{', f'  label="{name}: prime graph components";']
    for label, primes in (("pi1", summary.pi1), ("pi2", summary.pi2)):
        lines.append(f"  subgraph cluster_{label} {{")
        lines.append(f'    label="{label}";')
        for p in sorted(primes):
            lines.append(f'    "{p}";')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def cmd_pgraph(args) -> int:
    family = Family.parse(args.family)
    f = _field(args.q)
    try:
        summary = prime_graph_summary(family, f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "dot":
        _emit(_dot(summary))
    elif args.format == "json":
        record = {
            "family": family.value,
            "q": str(summary.q),
            "s": summary.s,
            "pi1": [str(p) for p in sorted(summary.pi1)],
            "pi2": [str(p) for p in sorted(summary.pi2)],
            "pi2_value": str(summary.pi2_value),
            "t": summary.t,
            "rho_indices": list(summary.rho_indices) if summary.rho_indices else None,
            "rho": [str(p) for p in summary.rho],
            "partition": verify_partition(family, f).status.value,
        }
        _emit(dump_json(record))
    else:
        idx = ""
        if summary.rho_indices:
            idx = "  (r_" + ", r_".join(map(str, summary.rho_indices)) + ")"
        _emit(
            "\n".join(
                [
                    f"{family.value}({summary.q}): s = {summary.s}, t = {summary.t}",
                    f"pi1 = {_set_text(summary.pi1)}",
                    f"pi2 = {_set_text(summary.pi2)}  (pi2 value {summary.pi2_value})",
                    f"rho = {_set_text(summary.rho)}{idx}",
                ]
            )
        )
    return EXIT_OK


def cmd_zsig(args) -> int:
    if abs(args.a) <= 1:
        raise UsageError("need |a| > 1")
    if args.i < 1:
        raise UsageError("need i >= 1")
    rec = primitive_prime_divisors(args.a, args.i)
    if args.format == "json":
        _emit(
            dump_json(
                {
                    "a": str(rec.base),
                    "i": str(rec.index),
                    "R": [str(r) for r in sorted(rec.primes)],
                    "k": str(rec.primitive_part),
                    "exception": rec.is_exception,
                }
            )
        )
    else:
        tail = ", exception" if rec.is_exception else ""
        _emit(f"R = {_set_text(rec.primes)}, k = {rec.primitive_part}{tail}")
    return EXIT_OK


def cmd_klemma(args) -> int:
    if args.a_max < 2 or args.n_max < 1 or args.i_max < 2:
        raise UsageError("need --a-max >= 2, --n-max >= 1, --i-max >= 2")
    found = verify_primitiv(args.a_max, args.n_max, args.i_max)
    bad = violations(found)
    if args.format == "json":
        rows = [
            {"a": c.a, "i": c.i, "n": c.n, "j": c.j, "m": c.m, "k": str(c.value), "resolution": c.resolution}
            for c in found
        ]
        _emit(dump_json({"coincidences": rows, "violations": len(bad)}))
    else:
        nontrivial = [c for c in found if (c.i, c.n) != (c.j, c.m)]
        lines = [f"{len(found)} coincidences ({len(nontrivial)} non-reflexive), {len(bad)} violations"]
        for c in nontrivial:
            lines.append(f"  a={c.a}: k_{c.i}(a^{c.n}) = k_{c.j}(a^{c.m}) = {c.value}  [{c.resolution}]")
        _emit("\n".join(lines))
    return EXIT_FAILURE if bad else EXIT_OK


def cmd_audit(args) -> int:
    family = Family.parse(args.family)
    if args.q:
        qs = [_field(q).q for q in args.q]
    else:
        if args.q_max < 2:
            raise UsageError("--q-max must be at least 2")
        qs = prime_powers(2, args.q_max, odd_only=family is Family.F4)
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    try:
        profile = load_profile(args.profile)
    except ProfileError as exc:
        raise UsageError(str(exc)) from None
    report = run_audit(family, qs, profile, jobs=args.jobs)
    text = report.to_json()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        counts = json.loads(text)["counts"]
        summary = ", ".join(f"{k} {v}" for k, v in counts.items())
        _emit(f"{family.value}: {len(qs)} q values, {summary}; {report.classification} -> {args.output}")
    else:
        sys.stdout.write(text)
    return report.exit_code


def _selftest_checks():
    signed = [a for a in range(-20, 21) if abs(a) > 1]
    yield "zsigmondy exceptions", set(zsigmondy_scan(signed, range(1, 25))) == set(EXCEPTION_PAIRS)
    yield "k-equality oracle", not violations(verify_primitiv(3, 4, 8))
    yield "partition F4(q), q odd <= 50", all(
        verify_partition(Family.F4, q).status is Status.CONFIRMED for q in prime_powers(3, 50, odd_only=True)
    )
    yield "partition E6/2E6(q), q <= 50", all(
        verify_partition(fam, q).status is Status.CONFIRMED
        for fam in (Family.E6, Family.TWISTED_E6)
        for q in prime_powers(2, 50)
    )
    yield "F4 audit, q odd <= 50", run_audit(Family.F4, prime_powers(3, 50, odd_only=True)).exit_code == 0


def cmd_selftest(args) -> int:
    ok = True
    for name, passed in _selftest_checks():
        ok &= passed
        _emit(f"{'PASS' if passed else 'FAIL'}  {name}")
    return EXIT_OK if ok else EXIT_FAILURE


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="expgraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"expgraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order", help="group order, decimal and factored")
    p.add_argument("family", choices=FAMILY_CHOICES)
    p.add_argument("q")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("pgraph", help="prime-graph component data")
    p.add_argument("family", choices=FAMILY_CHOICES)
    p.add_argument("q")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    p.set_defaults(func=cmd_pgraph)

    p = sub.add_parser("zsig", help="primitive prime divisors R_i(a) and k_i(a)")
    p.add_argument("a", type=int)
    p.add_argument("i", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_zsig)

    p = sub.add_parser("klemma", help="brute-force scan of k_i(a^n) = k_j(a^m) coincidences")
    p.add_argument("--a-max", type=int, default=3)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--i-max", type=int, default=8)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_klemma)

    p = sub.add_parser("audit", help="audit the exclusion steps over a range of q")
    p.add_argument("family", choices=FAMILY_CHOICES)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--q", nargs="+", help="explicit field sizes")
    group.add_argument("--q-max", type=int, help="all in-scope prime powers up to this bound")
    p.add_argument("--profile", help="expectation profile (default: bundled profile)")
    p.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("selftest", help="quick consistency checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")
    except FixtureError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog}: fixture error: {exc}\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
