"""Step-by-step arithmetic audit of the F4 and E6/2E6 exclusion arguments.

Each ``check_*`` function evaluates one literal inequality or divisibility
claim at a concrete q and returns an :class:`AuditOutcome` carrying the
exact integers it compared. Nothing is assumed to hold; structural facts
that are taken on trust rather than checked are listed in
``assumption_notes``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from . import __version__
from .arith import (
    DETERMINISTIC_BELOW,
    MR_WITNESSES,
    is_prime,
    log2_bounds,
    log2_factorial_lower_bound,
    order_modulo,
    pi_part,
    pi_prime_part,
)
from .groups import (
    PI2_INDEX,
    Family,
    PrimePowerField,
    as_field,
    order,
    outer_order,
    p_part,
    pi2_value,
    prime_graph_summary,
    product_form,
    profile,
    sporadic_orders,
)
from .outcomes import Status
from .zsigmondy import cyclotomic_eval


class StepId(str, Enum):
    FROBENIUS_EXCLUSION = "frobenius_exclusion"
    ALTERNATING_EXCLUSION = "alternating_exclusion"
    SPORADIC_EXCLUSION = "sporadic_exclusion"
    CROSS_CHARACTERISTIC = "cross_characteristic"
    SMALL_RANK_EXCLUSION = "small_rank_exclusion"
    TWO_PART_KERNEL = "two_part_kernel"
    SANDWICH = "sandwich"
    FIELD_SIZE_MATCH = "field_size_match"
    FINAL_EQUATION = "final_equation"
    LEMMA_AH = "lemma_ah"

    def __str__(self) -> str:
        return self.value

    @property
    def rank(self) -> int:
        return list(StepId).index(self)


STRUCTURAL_ASSUMPTIONS = (
    "equal class-size sets and trivial centres force |G| = |L|",
    "equal orders and class-size sets force equal prime-graph components",
    "a group with disconnected prime graph is Frobenius, 2-Frobenius, "
    "or has a unique nonabelian composition factor S with S <= G/K <= Aut(S)",
)


@dataclass(frozen=True)
class AuditStep:
    id: StepId
    family: Family
    q: PrimePowerField


@dataclass(frozen=True)
class AuditOutcome:
    step: AuditStep
    status: Status
    witness: Mapping[str, Any] = field(default_factory=dict)
    assumption_notes: tuple[str, ...] = ()

    @property
    def q(self) -> int:
        return self.step.q.q

    @property
    def step_id(self) -> StepId:
        return self.step.id


def _outcome(step_id, family, f, ok: bool, witness, notes=()) -> AuditOutcome:
    status = Status.CONFIRMED if ok else Status.REFUTED
    return AuditOutcome(AuditStep(step_id, family, f), status, witness, tuple(notes))


def _inapplicable(step_id, family, f, reason: str) -> AuditOutcome:
    return AuditOutcome(AuditStep(step_id, family, f), Status.INAPPLICABLE, {"reason": reason})


def _scope_error(step_id: StepId, family: Family, f: PrimePowerField) -> str | None:
    if family is Family.F4 and f.p == 2:
        return "F4 audit covers odd q only"
    if step_id is StepId.TWO_PART_KERNEL and f.p == 2:
        return "2-part kernel step arises only for odd q"
    if step_id is StepId.FINAL_EQUATION and family is Family.F4:
        return "final equation belongs to the E6/2E6 argument"
    return None


def _prepare(step_id: StepId, family, q):
    family = Family.parse(family)
    f = as_field(q)
    return family, f, _scope_error(step_id, family, f)


def _pi2_split(family: Family, f: PrimePowerField):
    summary = prime_graph_summary(family, f)
    g = order(family, f)
    return summary, g, pi_part(g, summary.pi2)


# --------------------------------------------------------------------------
# individual steps


def check_frobenius_exclusion(family, q) -> AuditOutcome:
    """Kernel = pi2 value, complement = |G| / |G|_{pi2}; need |C| > |K|."""
    sid = StepId.FROBENIUS_EXCLUSION
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    summary, g, gpi2 = _pi2_split(family, f)
    kernel = summary.pi2_value
    complement = g.value // gpi2.value
    notes = (
        "a Frobenius complement has order less than its kernel",
        "2-Frobenius case: no class size has prime support equal to pi2 (structural, not checked)",
    )
    witness = {"kernel_order": kernel, "complement_order": complement, "group_order": g.value}
    return _outcome(sid, family, f, complement > kernel, witness, notes)


def check_alternating_exclusion(family, q) -> AuditOutcome:
    """log2(pi2_value!) - 1 > log2|L|, with certified rational bounds on both sides."""
    sid = StepId.ALTERNATING_EXCLUSION
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    m = pi2_value(family, f)
    full = cyclotomic_eval(PI2_INDEX[family], f.q)
    g = order(family, f)
    lower = log2_factorial_lower_bound(m)
    _, upper = log2_bounds(g.value)
    witness = {
        "pi2_value": m,
        # undivided cyclotomic value; the argument needs it to be a prime
        "cyclotomic_value": full,
        "cyclotomic_value_is_prime": is_prime(full),
        "log2_factorial_lower": lower,
        "log2_order_upper": upper,
        "group_order": g.value,
    }
    notes = ("an alternating factor Alt_k has k >= pi2 prime, so |S| >= pi2_value!/2",)
    return _outcome(sid, family, f, lower - 1 > upper, witness, notes)


def check_sporadic_exclusion(family, q) -> AuditOutcome:
    """No sporadic or Tits order is divisible by pi2_value and divides |L|."""
    sid = StepId.SPORADIC_EXCLUSION
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    m = pi2_value(family, f)
    g = order(family, f).value
    table = sporadic_orders()
    survivors = [name for name, s in table if s.value % m == 0 and g % s.value == 0]
    witness = {
        "pi2_value": m,
        "group_order": g,
        "table_size": len(table),
        "fixture_checksum": table.checksum,
        "survivors": survivors,
    }
    notes = ("necessary conditions only: |S|_{pi2} = pi2_value and |S| divides |L|",)
    return _outcome(sid, family, f, not survivors, witness, notes)


def check_cross_characteristic(family, q) -> AuditOutcome:
    """Cubed cap on |S|_t against the lower bound for |Aut(S)| (t != p)."""
    sid = StepId.CROSS_CHARACTERISTIC
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    x = f.q
    if family is Family.F4:
        cap = (x * x + x + 1) ** 2
        a_den = 2**6 * (x + 1) ** 4
    else:
        sign = 1 if family is Family.E6 else -1
        cap = (x**6 + sign * x**3 + 1) ** 3
        a_den = 2**6 * (x - 1) ** 6
    upper = cap**3
    a_num = product_form(family, x)
    witness = {
        "t_part_cap": cap,
        "upper_bound": upper,
        "aut_lower_numerator": a_num,
        "aut_lower_denominator": a_den,
        "aut_lower_bound": Fraction(a_num, a_den),
    }
    notes = ("|S| < |S|_t^3 for S of Lie type in characteristic t",)
    return _outcome(sid, family, f, upper * a_den < a_num, witness, notes)


def check_small_rank_exclusion(family, q) -> AuditOutcome:
    """|G|_{pi2}^3 < |G|_{{2,p}'}, reading the garbled subscript as the complement of {2, p}."""
    sid = StepId.SMALL_RANK_EXCLUSION
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    _, g, gpi2 = _pi2_split(family, f)
    rest = pi_prime_part(g, {2, f.p}).value
    cube = gpi2.value**3
    witness = {"pi2_part": gpi2.value, "pi2_part_cubed": cube, "order_2p_prime_part": rest}
    notes = ("rank < 3 groups satisfy |S|_{(2,p)'} < |S|_{pi2}^3 (structural, not checked)",)
    return _outcome(sid, family, f, cube < rest, witness, notes)


def _two_part(x: int) -> int:
    return x & -x


def check_two_part_kernel(family, q) -> AuditOutcome:
    """No 2^l - 1 with 2^l <= max(|q-1|_2, |q+1|_2)^e is divisible by pi2_value."""
    sid = StepId.TWO_PART_KERNEL
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    e = 4 if family is Family.F4 else 6
    m = pi2_value(family, f)
    bound_minus = _two_part(f.q - 1) ** e
    bound_plus = _two_part(f.q + 1) ** e
    bound = max(bound_minus, bound_plus)
    ord2 = order_modulo(2, m)
    # bound is a power of two, so 2^ord > bound iff ord > log2(bound)
    log2_bound = bound.bit_length() - 1
    witness = {
        "pi2_value": m,
        "order_of_2": ord2,
        "power_exponent": e,
        "bound_minus": bound_minus,
        "bound_plus": bound_plus,
        "bound": bound,
        "log2_bound": log2_bound,
    }
    notes = ("a Frobenius kernel of order 2^l with complement of order N needs N | 2^l - 1",)
    return _outcome(sid, family, f, ord2 > log2_bound, witness, notes)


def check_sandwich(family, q) -> AuditOutcome:
    """M^6 < W < M^7 with M = |G|_{pi2}, W = |G|_{(p, pi2)'}."""
    sid = StepId.SANDWICH
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    summary, g, gpi2 = _pi2_split(family, f)
    w = pi_prime_part(g, set(summary.pi2) | {f.p}).value
    m6 = gpi2.value**6
    m7 = m6 * gpi2.value
    witness = {
        "pi2_part": gpi2.value,
        "pi2_part_6": m6,
        "remainder": w,
        "pi2_part_7": m7,
        "lower_holds": m6 < w,
        "upper_holds": w < m7,
    }
    return _outcome(sid, family, f, m6 < w < m7, witness)


_SHORTCUT_RATIO = {Family.F4: Fraction(4, 3), Family.E6: Fraction(3, 4), Family.TWISTED_E6: Fraction(3, 4)}


def _candidate_families(family: Family) -> tuple[Family, ...]:
    if family is Family.F4:
        return (Family.E6, Family.TWISTED_E6)
    return (Family.F4,)


def _field_candidate(host: Family, f: PrimePowerField, cand: Family) -> dict[str, Any]:
    ratio = Fraction(PI2_INDEX[host], PI2_INDEX[cand])
    m = ratio * f.n
    info: dict[str, Any] = {"candidate": cand.value, "index_ratio": ratio, "m": m}
    if m.denominator != 1:
        info["contradictions"] = ["m non-integral"]
        return info
    u = PrimePowerField(f.p, int(m))
    s_order = order(cand, u).value
    l_order = order(host, f).value
    s_pexp = profile(cand).p_exponent * u.n
    l_pexp = profile(host).p_exponent * f.n
    aut_pprime = s_order // f.p**s_pexp * outer_order(cand, u)
    aut_pprime //= f.p ** _p_adic(outer_order(cand, u), f.p)
    l_pprime = l_order // f.p**l_pexp
    contradictions = []
    if s_pexp > l_pexp:
        contradictions.append("|S|_p > |L|_p")
    if aut_pprime < l_pprime:
        contradictions.append("|Aut(S)|_p' < |L|_p'")
    if pi2_value(cand, u) != pi2_value(host, f):
        contradictions.append("pi2 values differ")
    if l_order % s_order:
        contradictions.append("|S| does not divide |L|")
    info.update(
        {
            "u": u.q,
            "s_p_exponent": s_pexp,
            "l_p_exponent": l_pexp,
            "aut_s_p_prime": aut_pprime,
            "l_p_prime": l_pprime,
            "aut_p_prime_direction": "<" if aut_pprime < l_pprime else (">" if aut_pprime > l_pprime else "="),
            "contradictions": contradictions,
        }
    )
    return info


def _p_adic(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def check_field_size_match(family, q) -> AuditOutcome:
    """Subfield candidates forced by matching primitive indices of pi2.

    A candidate S over u = p^m must satisfy idx(host) * n = idx(S) * m for
    the cyclotomic indices spanning pi2. The candidate is excluded when m
    is non-integral or one of the order comparisons fails: p-parts,
    p'-parts of |Aut(S)| against |L|, equality of pi2 values, or |S|
    dividing |L|. The shortcut ratio m/n = 4/3 (F4 host) or 3/4 (E6
    hosts) is recorded next to the index-derived one for comparison.
    """
    sid = StepId.FIELD_SIZE_MATCH
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    candidates = [_field_candidate(family, f, c) for c in _candidate_families(family)]
    ratio = _SHORTCUT_RATIO[family]
    literal_m = ratio * f.n
    literal: dict[str, Any] = {"ratio": ratio, "m": literal_m}
    if literal_m.denominator == 1 and family is Family.F4:
        s_pexp = 36 * int(literal_m)
        literal.update({"s_p_exponent": s_pexp, "l_p_exponent": 24 * f.n, "p_part_exceeds": s_pexp > 24 * f.n})
    witness = {"n": f.n, "candidates": candidates, "shortcut_ratio": literal}
    ok = all(c["contradictions"] for c in candidates)
    notes = ("|S| divides |G/K|, which divides |L|; |G/K|_p' = |L|_p' as K is a p-group",)
    return _outcome(sid, family, f, ok, witness, notes)


def check_final_equation(family, q, search_bound: int = 20) -> AuditOutcome:
    """p^{6n} -/+ p^{3n} = p^{6m} +/- p^{3m} has no solution in m."""
    sid = StepId.FINAL_EQUATION
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    p, n = f.p, f.n
    x = p ** (3 * n)
    # x(x-1) = y(y+1) with y = p^{3m} forces y = x - 1; p | x and p | y
    # then gives p | 1, so both orientations are impossible.
    algebraic = (x - 1) % p != 0
    solutions = []
    for m in range(1, search_bound + 1):
        y = p ** (3 * m)
        if x * x - x == y * y + y:
            solutions.append({"m": m, "orientation": "minus=plus"})
        if x * x + x == y * y - y:
            solutions.append({"m": m, "orientation": "plus=minus"})
    witness = {
        "p": p,
        "n": n,
        "search_bound": search_bound,
        "solutions": solutions,
        "algebraic_exclusion": algebraic,
    }
    return _outcome(sid, family, f, algebraic and not solutions, witness)


def check_lemma_ah(family, q) -> AuditOutcome:
    """|G| < (|G|_p)^3."""
    sid = StepId.LEMMA_AH
    family, f, skip = _prepare(sid, family, q)
    if skip:
        return _inapplicable(sid, family, f, skip)
    g = order(family, f).value
    pp = p_part(family, f).value
    witness = {"group_order": g, "p_part": pp, "p_part_cubed": pp**3}
    return _outcome(sid, family, f, g < pp**3, witness)


CHECKS = {
    StepId.FROBENIUS_EXCLUSION: check_frobenius_exclusion,
    StepId.ALTERNATING_EXCLUSION: check_alternating_exclusion,
    StepId.SPORADIC_EXCLUSION: check_sporadic_exclusion,
    StepId.CROSS_CHARACTERISTIC: check_cross_characteristic,
    StepId.SMALL_RANK_EXCLUSION: check_small_rank_exclusion,
    StepId.TWO_PART_KERNEL: check_two_part_kernel,
    StepId.SANDWICH: check_sandwich,
    StepId.FIELD_SIZE_MATCH: check_field_size_match,
    StepId.FINAL_EQUATION: check_final_equation,
    StepId.LEMMA_AH: check_lemma_ah,
}


# --------------------------------------------------------------------------
# expectation profiles

EXPECT_CONFIRMED = "expect_confirmed"
AUDIT_ONLY = "audit_only"


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class ExpectationProfile:
    entries: Mapping[tuple[Family, StepId], str]

    def expectation(self, family: Family, step: StepId) -> str:
        return self.entries.get((family, step), AUDIT_ONLY)


def parse_profile(text: str, source: str = "<profile>") -> ExpectationProfile:
    entries: dict[tuple[Family, StepId], str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        fam_name, dot, step_name = key.strip().partition(".")
        value = value.strip()
        if not sep or not dot:
            raise ProfileError(f"{source}:{lineno}: expected 'family.step_id = expectation'")
        try:
            fam = Family.parse(fam_name)
            step = StepId(step_name.strip())
        except ValueError as exc:
            raise ProfileError(f"{source}:{lineno}: {exc}") from None
        if value not in (EXPECT_CONFIRMED, AUDIT_ONLY):
            raise ProfileError(f"{source}:{lineno}: unknown expectation {value!r}")
        entries[(fam, step)] = value
    return ExpectationProfile(entries)


def load_profile(path: str | Path | None = None) -> ExpectationProfile:
    if path is None:
        res = resources.files("expgraph") / "data" / "default.profile"
        return parse_profile(res.read_text(encoding="utf-8"), "default.profile")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProfileError(f"cannot read profile {path}: {exc}") from exc
    return parse_profile(text, str(path))


# --------------------------------------------------------------------------
# reports

CLEAN, DISCREPANCY, FAILURE = "clean", "discrepancy", "failure"
EXIT_CODES = {CLEAN: 0, FAILURE: 1, DISCREPANCY: 3}


@dataclass(frozen=True)
class AuditReport:
    family: Family
    q_values: tuple[int, ...]
    outcomes: tuple[AuditOutcome, ...]
    expectations: Mapping[str, str]
    metadata: Mapping[str, Any]

    def deviations(self) -> list[AuditOutcome]:
        return [o for o in self.outcomes if o.status is Status.REFUTED]

    @property
    def classification(self) -> str:
        result = CLEAN
        for o in self.deviations():
            if self.expectations[o.step_id.value] == EXPECT_CONFIRMED:
                return FAILURE
            result = DISCREPANCY
        return result

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.classification]

    def to_dict(self, timestamp: str | None = None) -> dict[str, Any]:
        counts = {s.value: 0 for s in Status}
        for o in self.outcomes:
            counts[o.status.value] += 1
        return {
            "tool_version": __version__,
            "generated_at": timestamp or datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            "family": self.family.value,
            "q_values": [str(q) for q in self.q_values],
            "metadata": _encode(dict(self.metadata)),
            "expectations": dict(self.expectations),
            "classification": self.classification,
            "exit_code": self.exit_code,
            "counts": counts,
            "outcomes": [
                {
                    "q": str(o.q),
                    "step": o.step_id.value,
                    "status": o.status.value,
                    "expectation": self.expectations[o.step_id.value],
                    "witness": _encode(dict(o.witness)),
                    "notes": list(o.assumption_notes),
                }
                for o in self.outcomes
            ],
        }

    def to_json(self, timestamp: str | None = None) -> str:
        return dump_json(self.to_dict(timestamp))


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _encode(value: Any) -> Any:
    # ints as decimal strings: consumers may truncate to 64 bits
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, Mapping):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _audit_one(family: Family, q: int) -> list[AuditOutcome]:
    return [CHECKS[sid](family, q) for sid in StepId]


def _probabilistic(family: Family, q: int) -> bool:
    return any(cyclotomic_eval(d, q) >= DETERMINISTIC_BELOW for d in profile(family).cyclotomic_exponents)


def run_audit(
    family,
    q_list: Iterable[int],
    expectation_profile: ExpectationProfile | None = None,
    jobs: int = 1,
) -> AuditReport:
    """Run every step for every q and classify against the profile."""
    family = Family.parse(family)
    qs = sorted(set(int(q) for q in q_list))
    if not qs:
        raise ValueError("q_list is empty")
    for q in qs:
        as_field(q)
    prof = expectation_profile or load_profile()
    if jobs > 1 and len(qs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_audit_one, [family] * len(qs), qs))
    else:
        batches = [_audit_one(family, q) for q in qs]
    outcomes = sorted((o for b in batches for o in b), key=lambda o: (o.q, o.step_id.rank))
    metadata = {
        "primality": {
            "witnesses": list(MR_WITNESSES),
            "deterministic_below": DETERMINISTIC_BELOW,
            "probabilistic_regime": any(_probabilistic(family, q) for q in qs),
        },
        "step_order": [s.value for s in StepId],
        "assumptions": list(STRUCTURAL_ASSUMPTIONS),
    }
    expectations = {s.value: prof.expectation(family, s) for s in StepId}
    return AuditReport(family, tuple(qs), tuple(outcomes), expectations, metadata)
