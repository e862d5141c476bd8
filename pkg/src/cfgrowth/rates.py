"""Growth-target functions and the exponents that drive the dimension formulas.

A RateFunction models a positive function phi on 1..horizon whose ratio
phi(n)/n tends to infinity.  Preset families:

    poly:g      phi(n) = n^g            (g > 1)
    geom:b      phi(n) = b^n            (b > 1)
    superg:a    phi(n) = exp(n^a)       (a > 1)
    table:...   finite list of positive values

The three growth exponents are window surrogates for tail statistics of
log phi(n)/n (max -> B, min -> b) and log log phi(n)/n (max -> A); presets
also carry their closed-form limits.  The dimension formulas are 1/(1+B),
1/(1+b) and 1/(1+A), with 1/(1+inf) = 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

from mpmath import mp, mpf

from .errors import AssumptionViolation, HorizonError, InputError, PreconditionError
from .logscalar import LogScalar, as_mpf

POLY = "poly"
GEOM = "geom"
SUPERG = "superg"
TABLE = "table"


@dataclass(frozen=True)
class RateFunction:
    kind: str
    param: Optional[float]
    horizon: int
    table_values: Optional[tuple[mpf, ...]] = None
    monotone_tail_assumed: bool = False
    growth_floor: float = 1.0

    # -- constructors ---------------------------------------------------------

    @classmethod
    def polynomial(cls, gamma: float, horizon: int) -> "RateFunction":
        if gamma <= 1:
            raise PreconditionError("polynomial rate needs exponent > 1")
        return cls(POLY, float(gamma), horizon, monotone_tail_assumed=True)

    @classmethod
    def geometric(cls, beta: float, horizon: int) -> "RateFunction":
        if beta <= 1:
            raise PreconditionError("geometric rate needs base > 1")
        return cls(GEOM, float(beta), horizon, monotone_tail_assumed=True)

    @classmethod
    def super_geometric(cls, alpha: float, horizon: int) -> "RateFunction":
        if alpha <= 1:
            raise PreconditionError("super-geometric rate needs exponent > 1")
        return cls(SUPERG, float(alpha), horizon, monotone_tail_assumed=True)

    @classmethod
    def from_values(cls, values, growth_floor: float = 1.0) -> "RateFunction":
        vals = tuple(as_mpf(v) for v in values)
        if not vals:
            raise InputError("table rate function needs at least one value")
        if any(v <= 0 for v in vals):
            raise InputError("table rate values must be strictly positive")
        rf = cls(
            TABLE,
            None,
            len(vals),
            table_values=vals,
            monotone_tail_assumed=False,
            growth_floor=growth_floor,
        )
        rf._validate_growth_floor()
        return rf

    @classmethod
    def from_csv(cls, path, growth_floor: float = 1.0) -> "RateFunction":
        """Load a table rate from two-column CSV rows (n, phi(n)), n = 1, 2, ..."""
        rows: list[tuple[int, str]] = []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].strip().startswith("#"):
                    continue
                if len(row) < 2:
                    raise InputError(f"line {lineno}: expected 'n,value'")
                try:
                    n = int(row[0])
                except ValueError:
                    if lineno == 1:  # tolerate a header row
                        continue
                    raise InputError(f"line {lineno}: index {row[0]!r} is not an integer")
                rows.append((n, row[1].strip()))
        if not rows:
            raise InputError("empty rate table")
        indices = [n for n, _ in rows]
        if indices != list(range(1, len(rows) + 1)):
            raise InputError("table indices must be 1, 2, ... with no gaps")
        return cls.from_values([v for _, v in rows], growth_floor=growth_floor)

    def _validate_growth_floor(self):
        # phi(n)/n must clear the configured floor over the final quarter.
        start = max(1, self.horizon - self.horizon // 4 + 1)
        for n in range(start, self.horizon + 1):
            if self.log_phi(n) < mp.log(mpf(self.growth_floor) * n):
                raise PreconditionError(
                    f"table: phi({n})/{n} falls below the growth floor {self.growth_floor}"
                )

    # -- evaluation -----------------------------------------------------------

    def _check_range(self, n: int):
        if n < 1:
            raise HorizonError(f"index {n} < 1")
        # Presets follow an analytic formula, so evaluation past the nominal
        # horizon is well defined (the construction scans rely on it); only
        # tables run out of data.
        if self.kind == TABLE and n > self.horizon:
            raise HorizonError(f"index {n} beyond table horizon {self.horizon}")

    def log_phi(self, n: int) -> mpf:
        """ln(phi(n)), exact-to-precision for presets."""
        self._check_range(n)
        if self.kind == POLY:
            return mpf(self.param) * mp.log(n)
        if self.kind == GEOM:
            return n * mp.log(mpf(self.param))
        if self.kind == SUPERG:
            return mp.power(mpf(n), mpf(self.param))
        return mp.log(self.table_values[n - 1])

    def phi(self, n: int) -> mpf:
        """phi(n) itself as an mpf (may be astronomically large)."""
        if self.kind == TABLE:
            self._check_range(n)
            return self.table_values[n - 1]
        return mp.exp(self.log_phi(n))

    def evaluate(self, n: int) -> LogScalar:
        return LogScalar.from_log(self.log_phi(n))

    # -- running minima ---------------------------------------------------------

    def _monotone_from(self) -> Optional[int]:
        """Index from which phi is analytically nondecreasing (presets: 1)."""
        if self.kind in (POLY, GEOM, SUPERG):
            return 1
        return None

    def suffix_min_log(self, n: int) -> mpf:
        """ln of min_{k >= n} phi(k); tables scan to their horizon."""
        self._check_range(n)
        mono = self._monotone_from()
        if mono is not None:
            # Increasing from index 1, so the suffix minimum is phi(n) itself.
            return self.log_phi(n)
        return min(self.log_phi(k) for k in range(n, self.horizon + 1))

    def suffix_min(self, n: int) -> LogScalar:
        return LogScalar.from_log(self.suffix_min_log(n))

    def phi_value_suffix_min(self, n: int) -> mpf:
        return mp.exp(self.suffix_min_log(n))

    def phi_over_n_inf(self, n: int) -> mpf:
        """inf_{k >= n} phi(k)/k, with the analytic tail for presets."""
        self._check_range(n)
        if self.kind == POLY:
            # n^(g-1) is increasing.
            return mp.exp(self.log_phi(n)) / n
        if self.kind == GEOM:
            # b^k/k increases once k >= 1/(b-1); scan the finite head.
            turn = max(n, int(math.ceil(1.0 / (self.param - 1))) + 1)
            lo = min(mp.exp(self.log_phi(k)) / k for k in range(n, turn + 1))
            return lo
        if self.kind == SUPERG:
            return mp.exp(self.log_phi(n)) / n
        return min(mp.exp(self.log_phi(k)) / k for k in range(n, self.horizon + 1))

    # -- closed forms -------------------------------------------------------------

    def closed_form_exponents(self) -> Optional[tuple[float, float, float]]:
        """(B, b, A) limits for presets; None for tables."""
        if self.kind == POLY:
            return (1.0, 1.0, 1.0)
        if self.kind == GEOM:
            return (self.param, self.param, 1.0)
        if self.kind == SUPERG:
            return (math.inf, math.inf, 1.0)
        return None

    def spec_string(self) -> str:
        if self.kind == TABLE:
            return f"table[{self.horizon}]"
        return f"{self.kind}:{self.param:g}"


@dataclass(frozen=True)
class GrowthExponents:
    B_est: float
    b_est: float
    A_est: float
    window_start: int
    closed_form: Optional[tuple[float, float, float]] = None
    skipped_A_indices: tuple[int, ...] = field(default=())

    @property
    def B(self) -> float:
        return self.closed_form[0] if self.closed_form else self.B_est

    @property
    def b(self) -> float:
        return self.closed_form[1] if self.closed_form else self.b_est

    @property
    def A(self) -> float:
        return self.closed_form[2] if self.closed_form else self.A_est

    @property
    def window_estimate_only(self) -> bool:
        return self.closed_form is None


def growth_exponents(rf: RateFunction, window_start: Optional[int] = None) -> GrowthExponents:
    """Window max/min surrogates for the three exponents over [window_start, horizon]."""
    if window_start is None:
        window_start = max(1, rf.horizon // 2)
    if not (1 <= window_start < rf.horizon):
        raise PreconditionError("window_start must satisfy 1 <= window_start < horizon")

    hi_ratio = None
    lo_ratio = None
    hi_loglog = None
    skipped: list[int] = []
    for n in range(window_start, rf.horizon + 1):
        lp = rf.log_phi(n)
        r = lp / n
        hi_ratio = r if hi_ratio is None else max(hi_ratio, r)
        lo_ratio = r if lo_ratio is None else min(lo_ratio, r)
        if lp <= 0:
            skipped.append(n)  # log log undefined; phi(n) <= 1
            continue
        rr = mp.log(lp) / n
        hi_loglog = rr if hi_loglog is None else max(hi_loglog, rr)

    B_est = float(mp.exp(hi_ratio))
    b_est = float(mp.exp(lo_ratio))
    A_est = float(mp.exp(hi_loglog)) if hi_loglog is not None else float("nan")
    return GrowthExponents(
        B_est=B_est,
        b_est=b_est,
        A_est=A_est,
        window_start=window_start,
        closed_form=rf.closed_form_exponents(),
        skipped_A_indices=tuple(skipped),
    )


def _dimension_of(exponent: float, name: str) -> float:
    if math.isinf(exponent):
        return 0.0
    if exponent < 1 - 1e-12:
        raise AssumptionViolation(f"exponent {name} = {exponent} < 1 breaks the formulas' assumption")
    return 1.0 / (1.0 + exponent)


def predicted_dimensions(g: GrowthExponents) -> dict:
    """The three dimension values 1/(1+B), 1/(1+b), 1/(1+A)."""
    return {
        "dim_liminf": _dimension_of(g.B, "B"),
        "dim_limsup": _dimension_of(g.b, "b"),
        "dim_ND": _dimension_of(g.A, "A"),
    }
