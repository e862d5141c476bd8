"""Exact continued-fraction arithmetic: expansions, convergents, cylinders.

Everything here is integer/rational arithmetic; no floating point enters any
digit-producing path.  Finite expansions are normalized so the last digit is
at least 2, which resolves the trailing-1 ambiguity and makes value/expand
round trips exact.  Digits of inexact reals are certified by running the
Gauss iteration on both endpoints of an interval and keeping the common
digit prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from .errors import DomainError, InputError, ModeError
from .logscalar import LogScalar

Rational = Fraction

EXACT = "exact"
LOGSPACE = "logspace"


@dataclass(frozen=True)
class DigitSequence:
    """A finite run of partial quotients, exact or log-valued."""

    mode: str
    exact_digits: Optional[tuple[int, ...]] = None
    log_digits: Optional[tuple[LogScalar, ...]] = None

    @classmethod
    def exact(cls, digits) -> "DigitSequence":
        digits = tuple(int(a) for a in digits)
        if any(a < 1 for a in digits):
            raise InputError("partial quotients must be >= 1")
        return cls(mode=EXACT, exact_digits=digits)

    @classmethod
    def logspace(cls, log_digits) -> "DigitSequence":
        entries = tuple(
            v if isinstance(v, LogScalar) else LogScalar.from_log(v) for v in log_digits
        )
        if any(e.is_zero or e.log_value < 0 for e in entries):
            raise InputError("log-space digits must be >= 1 (log >= 0)")
        return cls(mode=LOGSPACE, log_digits=entries)

    def __len__(self) -> int:
        seq = self.exact_digits if self.mode == EXACT else self.log_digits
        return len(seq)

    def require_exact(self) -> tuple[int, ...]:
        if self.mode != EXACT:
            raise ModeError("operation requires exact-mode digits")
        return self.exact_digits


@dataclass(frozen=True)
class Convergents:
    """One step of the p/q recursion: previous and current numerators/denominators."""

    p_prev: int
    q_prev: int
    p_cur: int
    q_cur: int
    depth: int

    def determinant(self) -> int:
        return self.p_cur * self.q_prev - self.p_prev * self.q_cur

    @property
    def value(self) -> Fraction:
        return Fraction(self.p_cur, self.q_cur)


@dataclass(frozen=True)
class Cylinder:
    """The half-open interval of points sharing a fixed digit prefix."""

    digits: DigitSequence
    convergents: Convergents
    interval_lo: Fraction
    interval_hi: Fraction

    @property
    def length(self) -> Fraction:
        return self.interval_hi - self.interval_lo

    def contains_interval(self, other: "Cylinder") -> bool:
        return self.interval_lo <= other.interval_lo and other.interval_hi <= self.interval_hi

    def contains_point(self, x: Fraction) -> bool:
        return self.interval_lo <= x < self.interval_hi


def _gauss_digits(x: Fraction, max_depth: int) -> tuple[list[int], bool]:
    """Digits of a rational in [0,1) via the Gauss map; remainder 0 terminates.

    Returns (digits, terminated).  The raw iteration already ends with a
    digit >= 2 for every rational in (0,1); the trailing-1 merge below is a
    normalization guard for the canonical form.
    """
    p, q = x.numerator, x.denominator
    digits: list[int] = []
    terminated = p == 0
    while p and len(digits) < max_depth:
        a, r = divmod(q, p)
        digits.append(a)
        q, p = p, r
        if p == 0:
            terminated = True
    if terminated and len(digits) >= 2 and digits[-1] == 1:
        digits[-2:] = [digits[-2] + 1]
    return digits, terminated


def expand_certified(x: Fraction, max_depth: int, radius: Fraction = Fraction(0)) -> DigitSequence:
    """Longest digit prefix shared by every point of [x-radius, x+radius] in [0,1).

    With radius 0 this is the exact expansion of the rational x (canonical,
    last digit >= 2) truncated at max_depth.
    """
    x = Fraction(x)
    radius = Fraction(radius)
    if not (0 <= x < 1):
        raise DomainError(f"x must lie in [0, 1), got {x}")
    if radius < 0:
        raise DomainError("radius must be >= 0")
    if radius == 0:
        digits, _ = _gauss_digits(x, max_depth)
        return DigitSequence.exact(digits)

    lo = x - radius
    hi = x + radius
    if lo < 0:
        lo = Fraction(0)
    lo_digits, _ = _gauss_digits(lo, max_depth)
    if hi >= 1:
        # The interval reaches up to (but not including) 1: all points of
        # [1/2, 1) share the first digit 1 and nothing beyond.
        hi_digits = [1]
    else:
        hi_digits, _ = _gauss_digits(hi, max_depth)

    common: list[int] = []
    for a, b in zip(lo_digits, hi_digits):
        if a != b:
            break
        common.append(a)
    return DigitSequence.exact(common)


def convergents_of(digits: DigitSequence) -> list[Convergents]:
    """The (p_n, q_n) recursion per prefix, seeded p_{-1}=1, q_{-1}=0, p_0=0, q_0=1."""
    seq = digits.require_exact()
    out: list[Convergents] = []
    p_prev, q_prev, p_cur, q_cur = 1, 0, 0, 1
    for depth, a in enumerate(seq, start=1):
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append(Convergents(p_prev, q_prev, p_cur, q_cur, depth))
    return out


def value_of(digits: DigitSequence) -> Fraction:
    """The rational with the given (exact) digit expansion; empty -> 0."""
    seq = digits.require_exact()
    if not seq:
        return Fraction(0)
    conv = convergents_of(digits)[-1]
    return Fraction(conv.p_cur, conv.q_cur)


def cylinder_of(digits: DigitSequence) -> Cylinder:
    """Exact half-open interval of the cylinder; orientation flips with parity."""
    seq = digits.require_exact()
    if not seq:
        raise InputError("cylinder requires at least one digit")
    conv = convergents_of(digits)[-1]
    inner = Fraction(conv.p_cur, conv.q_cur)
    outer = Fraction(conv.p_cur + conv.p_prev, conv.q_cur + conv.q_prev)
    if conv.depth % 2 == 0:
        lo, hi = inner, outer
    else:
        lo, hi = outer, inner
    return Cylinder(digits=digits, convergents=conv, interval_lo=lo, interval_hi=hi)


def legendre_check(x: Fraction, q_max: int) -> list[tuple[int, int, bool]]:
    """All irreducible p/q in [0,1) with q <= q_max and |x - p/q| < 1/(2q^2).

    Each hit is flagged as convergent-of-x or not; classically every flag
    comes back true.  The 0/1 convergent (depth 0) counts.
    """
    x = Fraction(x)
    if not (0 <= x < 1):
        raise DomainError(f"x must lie in [0, 1), got {x}")
    expansion, _ = _gauss_digits(x, 10 ** 6)
    conv_set = {(0, 1)}
    for c in convergents_of(DigitSequence.exact(expansion)):
        conv_set.add((c.p_cur, c.q_cur))

    hits: list[tuple[int, int, bool]] = []
    for q in range(1, q_max + 1):
        # Only the integers adjacent to q*x can satisfy |q*x - p| < 1/(2q).
        base = (x.numerator * q) // x.denominator
        for p in (base, base + 1):
            if not (0 <= p < q):
                continue
            if gcd(p, q) != 1:
                continue
            if abs(x - Fraction(p, q)) < Fraction(1, 2 * q * q):
                hits.append((p, q, (p, q) in conv_set))
    return hits


@dataclass(frozen=True)
class DepthBounds:
    depth: int
    q_power_lower_ok: bool
    digit_product_sandwich_ok: bool
    approx_sandwich_ok: Optional[bool]  # None when a_{n+1} is unavailable


@dataclass(frozen=True)
class ClassicalBoundsReport:
    rows: tuple[DepthBounds, ...]

    @property
    def all_ok(self) -> bool:
        return all(
            r.q_power_lower_ok
            and r.digit_product_sandwich_ok
            and (r.approx_sandwich_ok is not False)
            for r in self.rows
        )


def verify_classical_bounds(digits: DigitSequence, x: Fraction) -> ClassicalBoundsReport:
    """Check the classical per-depth inequalities along a digit prefix of x.

    Per depth n: q_n^2 >= 2^(n-1); prod(a) <= q_n <= 2^n prod(a); and, when
    a_{n+1} is available, 1/(3 a_{n+1} q_n^2) < |x - p_n/q_n| < 1/(a_{n+1} q_n^2).
    All comparisons are exact.
    """
    seq = digits.require_exact()
    x = Fraction(x)
    if not (0 <= x < 1):
        raise DomainError(f"x must lie in [0, 1), got {x}")
    expansion, _ = _gauss_digits(x, len(seq) + 1)
    if tuple(expansion[: len(seq)]) != seq:
        raise InputError("digits are not a prefix of the expansion of x")

    convs = convergents_of(digits)
    rows: list[DepthBounds] = []
    prod = 1
    for n, (a, conv) in enumerate(zip(seq, convs), start=1):
        prod *= a
        q = conv.q_cur
        q_lower = q * q >= 2 ** (n - 1)
        sandwich = prod <= q <= (2 ** n) * prod
        approx_ok: Optional[bool] = None
        a_next = expansion[n] if len(expansion) > n else None
        if a_next is not None:
            err = abs(x - conv.value)
            lo = Fraction(1, 3 * a_next * q * q)
            hi = Fraction(1, a_next * q * q)
            approx_ok = lo < err < hi
        rows.append(DepthBounds(n, q_lower, sandwich, approx_ok))
    return ClassicalBoundsReport(rows=tuple(rows))
