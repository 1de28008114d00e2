"""Orders and prime-graph component data for F4(q), E6(q) and 2E6(q).

The cyclotomic profile of each family is the single source of truth for
|G|; the textbook product form is evaluated separately and compared on
every call to :func:`order`.
"""
from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping

from .arith import FactoredInteger, PrimeSet, factorize, is_prime
from .outcomes import Status
from .zsigmondy import cyclotomic_eval, primitive_prime_divisors


class Family(str, Enum):
    F4 = "F4"
    E6 = "E6"
    TWISTED_E6 = "2E6"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        key = name.strip().lower()
        aliases = {"f4": cls.F4, "e6": cls.E6, "2e6": cls.TWISTED_E6, "twistede6": cls.TWISTED_E6}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown family {name!r}") from None

    @property
    def cli_name(self) -> str:
        return self.value.lower()

    def __str__(self) -> str:
        return self.value


class FixtureError(RuntimeError):
    """A fixture file is missing, malformed, or fails its checksum."""


@dataclass(frozen=True)
class PrimePowerField:
    p: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1 or not is_prime(self.p):
            raise ValueError(f"bad prime power {self.p}^{self.n}")

    @property
    def q(self) -> int:
        return self.p**self.n

    @classmethod
    def from_q(cls, q: int) -> "PrimePowerField":
        if q < 2:
            raise ValueError(f"{q} is not a prime power (q must be >= 2)")
        f = factorize(q).factors
        if len(f) != 1:
            raise ValueError(f"{q} is not a prime power")
        ((p, n),) = f.items()
        return cls(p, n)

    def __str__(self) -> str:
        return str(self.q) if self.n == 1 else f"{self.q} ({self.p}^{self.n})"


def as_field(q: "int | PrimePowerField") -> PrimePowerField:
    return q if isinstance(q, PrimePowerField) else PrimePowerField.from_q(int(q))


def is_prime_power(q: int) -> bool:
    try:
        PrimePowerField.from_q(q)
    except ValueError:
        return False
    return True


def prime_powers(lo: int, hi: int, *, odd_only: bool = False) -> list[int]:
    out = [q for q in range(max(lo, 2), hi + 1) if is_prime_power(q)]
    return [q for q in out if q % 2] if odd_only else out


# --------------------------------------------------------------------------
# order profiles

_PROFILES: dict[Family, dict[int, int]] = {
    Family.F4: {1: 4, 2: 4, 3: 2, 4: 2, 6: 2, 8: 1, 12: 1},
    Family.E6: {1: 6, 2: 4, 3: 3, 4: 2, 5: 1, 6: 2, 8: 1, 9: 1, 12: 1},
    Family.TWISTED_E6: {1: 4, 2: 6, 3: 2, 4: 2, 6: 3, 8: 1, 10: 1, 12: 1, 18: 1},
}
_P_EXPONENT = {Family.F4: 24, Family.E6: 36, Family.TWISTED_E6: 36}
# cyclotomic index whose (reduced) value spans the second component
PI2_INDEX = {Family.F4: 12, Family.E6: 9, Family.TWISTED_E6: 18}


@dataclass(frozen=True)
class GroupOrderProfile:
    family: Family
    p_exponent: int
    cyclotomic_exponents: Mapping[int, int]

    def central_divisor(self, q: int) -> int:
        if self.family is Family.E6:
            return math.gcd(3, q - 1)
        if self.family is Family.TWISTED_E6:
            return math.gcd(3, q + 1)
        return 1


def profile(family: "Family | str") -> GroupOrderProfile:
    family = Family.parse(family)
    return GroupOrderProfile(family, _P_EXPONENT[family], dict(_PROFILES[family]))


def product_form(family: "Family | str", q: int) -> int:
    """The binomial product behind |G|, evaluated directly (no cyclotomics)."""
    family = Family.parse(family)
    if family is Family.F4:
        return (q**2 - 1) * (q**6 - 1) * (q**8 - 1) * (q**12 - 1)
    s = -1 if family is Family.E6 else 1
    return (q**2 - 1) * (q**5 + s) * (q**6 - 1) * (q**8 - 1) * (q**9 + s) * (q**12 - 1)


def direct_order(family: "Family | str", q: int) -> int:
    """|G| from the product form, as a plain int."""
    prof = profile(family)
    return q**prof.p_exponent * product_form(prof.family, q) // prof.central_divisor(q)


@lru_cache(maxsize=1 << 14)
def factored_cyclotomic(d: int, q: int) -> FactoredInteger:
    return factorize(cyclotomic_eval(d, q))


@lru_cache(maxsize=4096)
def _order(family: Family, p: int, n: int) -> FactoredInteger:
    prof = profile(family)
    q = p**n
    phi_product = FactoredInteger(1)
    for d, mult in prof.cyclotomic_exponents.items():
        phi_product = phi_product * factored_cyclotomic(d, q) ** mult
    if phi_product.value != product_form(family, q):
        raise ArithmeticError(f"cyclotomic profile of {family} disagrees with product form at q={q}")
    full = FactoredInteger(q**prof.p_exponent, {p: n * prof.p_exponent}) * phi_product
    return full.exact_divide(prof.central_divisor(q))


def order(family: "Family | str", q: "int | PrimePowerField") -> FactoredInteger:
    """|G| fully factored, built from the cyclotomic profile."""
    f = as_field(q)
    return _order(Family.parse(family), f.p, f.n)


def p_part(family: "Family | str", q: "int | PrimePowerField") -> FactoredInteger:
    f = as_field(q)
    e = _P_EXPONENT[Family.parse(family)] * f.n
    return FactoredInteger(f.p**e, {f.p: e})


def outer_order(family: "Family | str", q: "int | PrimePowerField") -> int:
    """|Out(G)|: diagonal x field x graph automorphisms."""
    family = Family.parse(family)
    f = as_field(q)
    if family is Family.F4:
        return f.n * (2 if f.p == 2 else 1)
    if family is Family.E6:
        return math.gcd(3, f.q - 1) * 2 * f.n
    return math.gcd(3, f.q + 1) * 2 * f.n


def pi2_value(family: "Family | str", q: "int | PrimePowerField") -> int:
    family = Family.parse(family)
    f = as_field(q)
    return cyclotomic_eval(PI2_INDEX[family], f.q) // profile(family).central_divisor(f.q)


# --------------------------------------------------------------------------
# prime graph summaries

# binomials q^k + sign whose primes, with p, make up the first component
_PI1_BINOMIALS = {
    Family.F4: ((6, -1), (8, -1)),
    Family.E6: ((5, -1), (8, -1), (12, -1)),
    Family.TWISTED_E6: ((5, 1), (8, -1), (12, -1)),
}
_RHO_INDICES = {
    Family.F4: (3, 4, 6, 8, 12),
    Family.E6: (4, 5, 6, 8, 9, 12),
    Family.TWISTED_E6: (4, 8, 10, 12, 18),
}
_E6_OVER_2_RHO = (5, 13, 17, 19, 31)


def binomial_primes(q: int, k: int, sign: int) -> set[int]:
    """Primes of q^k + sign via its cyclotomic factors."""
    if sign == -1:
        ds = [d for d in range(1, k + 1) if k % d == 0]
    else:
        ds = [d for d in range(1, 2 * k + 1) if (2 * k) % d == 0 and k % d]
    out: set[int] = set()
    for d in ds:
        out.update(factored_cyclotomic(d, q).factors)
    return out


@dataclass(frozen=True)
class PrimeGraphSummary:
    family: Family
    q: int
    s: int
    pi1: PrimeSet
    pi2: PrimeSet
    pi2_value: int
    t: int
    rho_indices: tuple[int, ...] | None
    rho: tuple[int, ...]


def _check_scope(family: Family, f: PrimePowerField) -> None:
    if family is Family.F4 and f.p == 2:
        raise ValueError("F4 component data requires odd q")


def prime_graph_summary(family: "Family | str", q: "int | PrimePowerField") -> PrimeGraphSummary:
    family = Family.parse(family)
    f = as_field(q)
    _check_scope(family, f)
    pi1 = {f.p}
    for k, sign in _PI1_BINOMIALS[family]:
        pi1 |= binomial_primes(f.q, k, sign)
    value = pi2_value(family, f)
    if family is Family.E6 and f.q == 2:
        indices, rho = None, _E6_OVER_2_RHO
    else:
        indices = _RHO_INDICES[family]
        rho = tuple(min(primitive_prime_divisors(f.q, d).primes) for d in indices)
    return PrimeGraphSummary(
        family=family,
        q=f.q,
        s=2,
        pi1=PrimeSet(pi1),
        pi2=factorize(value).primes,
        pi2_value=value,
        t=len(rho),
        rho_indices=indices,
        rho=rho,
    )


@dataclass(frozen=True)
class PartitionCheck:
    family: Family
    q: int
    status: Status
    pi2_part: int
    pi2_value: int
    offending_prime: int | None = None
    reason: str = ""


def verify_partition(family: "Family | str", q: "int | PrimePowerField") -> PartitionCheck:
    """Check pi1 | pi2 = pi(|G|), pi1 & pi2 = {} and |G|_{pi2} = pi2_value."""
    family = Family.parse(family)
    f = as_field(q)
    summary = prime_graph_summary(family, f)
    g = order(family, f)
    primes = set(g.factors)
    pi2_part = math.prod(p**e for p, e in g.factors.items() if p in summary.pi2)

    def refuted(prime: int | None, why: str) -> PartitionCheck:
        return PartitionCheck(family, f.q, Status.REFUTED, pi2_part, summary.pi2_value, prime, why)

    both = summary.pi1 & summary.pi2
    if both:
        return refuted(min(both), "prime lies in both components")
    missing = primes - (summary.pi1 | summary.pi2)
    if missing:
        return refuted(min(missing), "prime of |G| lies in neither component")
    extra = (summary.pi1 | summary.pi2) - primes
    if extra:
        return refuted(min(extra), "component prime does not divide |G|")
    if pi2_part != summary.pi2_value:
        return refuted(None, "pi2-part of |G| differs from the defining value")
    return PartitionCheck(family, f.q, Status.CONFIRMED, pi2_part, summary.pi2_value)


# --------------------------------------------------------------------------
# sporadic and Tits group orders

FIXTURE_ENV = "EXPGRAPH_FIXTURES"
SPORADIC_FILE = "sporadic_orders.txt"


@dataclass(frozen=True)
class SporadicOrderTable:
    entries: tuple[tuple[str, FactoredInteger], ...]
    checksum: str

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, FactoredInteger]]:
        return iter(self.entries)

    def lookup(self, name: str) -> FactoredInteger:
        for key, value in self.entries:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.entries]


def _fixture_text() -> tuple[str, str]:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        path = Path(override) / SPORADIC_FILE
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except OSError as exc:
            raise FixtureError(f"cannot read {path}: {exc}") from exc
    res = resources.files("expgraph") / "data" / SPORADIC_FILE
    return res.read_text(encoding="utf-8"), str(res)


def parse_sporadic_fixture(text: str, source: str = "<fixture>") -> SporadicOrderTable:
    head, _, body = text.partition("\n")
    if not head.startswith("sha256:"):
        raise FixtureError(f"{source}: first line must be 'sha256:<hex>'")
    expected = head[len("sha256:") :].strip()
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if expected != actual:
        raise FixtureError(f"{source}: checksum mismatch")
    entries = []
    for lineno, line in enumerate(body.splitlines(), start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 3:
            raise FixtureError(f"{source}:{lineno}: expected name|order|factors")
        name, decimal, factor_text = parts
        try:
            factors = {int(p): int(e) for p, e in (kv.split(":") for kv in factor_text.split(","))}
            value = FactoredInteger(int(decimal), factors)
        except ValueError as exc:
            raise FixtureError(f"{source}:{lineno}: {exc}") from exc
        if any(not is_prime(p) for p in factors):
            raise FixtureError(f"{source}:{lineno}: non-prime factor")
        entries.append((name, value))
    if len(entries) != 27:
        raise FixtureError(f"{source}: expected 27 groups, found {len(entries)}")
    return SporadicOrderTable(tuple(entries), expected)


def sporadic_orders() -> SporadicOrderTable:
    text, source = _fixture_text()
    return _parse_cached(text, source)


@lru_cache(maxsize=8)
def _parse_cached(text: str, source: str) -> SporadicOrderTable:
    return parse_sporadic_fixture(text, source)
