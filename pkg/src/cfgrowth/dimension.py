"""Dimension formulas and the measure apparatus for digit-restricted sets.

Pieces:

* pressure(t) = log sum_{k>=1} k^-t via direct summation plus an integral
  tail bracket; near t = 1 the 1e7-term ceiling forces a bracket-only result.
* Bernoulli cylinder masses mu_t(I_n) = exp(-n P(t) - t sum log a_j) and the
  threshold M making the q_n^-2s mass bound provable on the window-
  constrained tuple family D_n(M).
* the partial dimension formula for plans s_n <= a_n < 2 s_n:
  S_n / (2 S_n + log s_{n+1}) with its algebraically equal 1/(2 + ratio) twin.
* a natural-cover critical exponent: bisection root of the level-n cover sum
  built from per-index digit ranges, with the 4^(n s) continuant-distortion
  reported as an uncertainty band.
"""

from __future__ import annotations

import math
import random as _random
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from mpmath import mp, mpf

from .cf import DigitSequence
from .constructions import DigitPlan, LogSequence, WeightVector
from .errors import (
    BracketError,
    DivergenceError,
    DomainError,
    NumericError,
    PreconditionError,
)
from .logscalar import LogScalar, as_mpf

PRESSURE_TERM_CEILING = 10 ** 7
PRESSURE_TARGET_WIDTH = 1e-10


@dataclass(frozen=True)
class PressureValue:
    t: float
    value: float  # log of the bracket midpoint
    error_bound: float  # half-width of the bracket, log side
    lower: float
    upper: float
    cutoff: int
    bracket_only: bool  # ceiling hit before the 1e-10 width target


def _tail_integrals(K: int, t: float) -> tuple[float, float]:
    # integral bracket for sum_{k > K} k^-t: [int_{K+1}^inf, int_K^inf] x^-t dx
    lo = (K + 1) ** (1.0 - t) / (t - 1.0)
    hi = K ** (1.0 - t) / (t - 1.0)
    return lo, hi


@lru_cache(maxsize=64)
def _pressure_cached(t: float) -> PressureValue:
    if t <= 1:
        raise DivergenceError(f"pressure diverges for t = {t} <= 1")
    # smallest K whose bracket width int_K^{K+1} x^-t dx meets the target
    lo_k, hi_k = 2, PRESSURE_TERM_CEILING
    width = lambda K: _tail_integrals(K, t)[1] - _tail_integrals(K, t)[0]
    if width(hi_k) > PRESSURE_TARGET_WIDTH:
        K = PRESSURE_TERM_CEILING
        bracket_only = True
    else:
        while lo_k < hi_k:
            mid = (lo_k + hi_k) // 2
            if width(mid) <= PRESSURE_TARGET_WIDTH:
                hi_k = mid
            else:
                lo_k = mid + 1
        K = lo_k
        bracket_only = False
    ks = np.arange(1, K + 1, dtype=np.float64)
    partial = float(np.sum(ks ** (-t)))
    tail_lo, tail_hi = _tail_integrals(K, t)
    sum_lo, sum_hi = partial + tail_lo, partial + tail_hi
    value = math.log((sum_lo + sum_hi) / 2.0)
    lower, upper = math.log(sum_lo), math.log(sum_hi)
    return PressureValue(
        t=t,
        value=value,
        error_bound=(upper - lower) / 2.0,
        lower=lower,
        upper=upper,
        cutoff=K,
        bracket_only=bracket_only,
    )


def pressure(t: float) -> PressureValue:
    """log sum_{k>=1} k^-t with a certified bracket."""
    return _pressure_cached(float(t))


def log_bernoulli_mass(digits: DigitSequence, t: float) -> LogScalar:
    """log mu_t(I_n) = -n P(t) - t sum_j log a_j."""
    if t <= 1:
        raise DivergenceError(f"Bernoulli mass needs t > 1, got {t}")
    P = pressure(t).value
    if digits.mode == "exact":
        total = mpf(0)
        for a in digits.exact_digits:
            total += mp.log(mpf(a))
        n = len(digits.exact_digits)
    else:
        total = mpf(0)
        for e in digits.log_digits:
            total += e.log_value
        n = len(digits.log_digits)
    return LogScalar.from_log(-mpf(n) * mpf(P) - as_mpf(t) * total)


def min_mass_threshold(s: float, w: WeightVector, m: Optional[int] = None) -> LogScalar:
    """Smallest log M with (s - 1/2) log M / (t_max 2m) >= P(s + 1/2)."""
    if s <= 0.5:
        raise DomainError(f"mass threshold needs s > 1/2, got {s}")
    if m is None:
        m = w.m
    if m < 1:
        raise PreconditionError("threshold formula needs a window of length >= 2 (m >= 1)")
    P = pressure(s + 0.5).value
    return LogScalar.from_log(2.0 * m * w.t_max * P / (s - 0.5))


@dataclass(frozen=True)
class CoverSpec:
    """Window-product constraint: every length-(m+1) weighted window >= M."""

    log_M: LogScalar
    weights: WeightVector
    depth: int

    def __post_init__(self):
        if self.log_M.is_zero or self.log_M.log_value < 0:
            raise PreconditionError("M must be >= 1")


# membership comparisons tolerate ties at this log-space slack (values that
# are mathematically equal, e.g. log2+log3 vs log6, must not flip the flag)
_TIE_SLACK = mpf(10) ** -40


def dn_membership(digits: DigitSequence, spec: CoverSpec) -> bool:
    """True iff every window k = 1..n-m has sum_i t_i log a_{k+i} >= log M."""
    seq = digits.require_exact()
    m = spec.weights.m
    if len(seq) < m + 1:
        raise PreconditionError("digit tuple shorter than the weight window")
    log_m = spec.log_M.log_value
    logs = [mp.log(mpf(a)) for a in seq]
    for k in range(0, len(seq) - m):
        total = mpf(0)
        for i, t in enumerate(spec.weights.weights):
            if t:
                total += as_mpf(t) * logs[k + i]
        if total < log_m - _TIE_SLACK:
            return False
    return True


@dataclass(frozen=True)
class MassBoundReport:
    n: int
    s: float
    log_M: float
    threshold_ok: bool
    sampler: str
    members_checked: int
    pass_count: int
    fail_count: int
    raw_violations: int
    vacuous: bool
    flags: tuple[str, ...]
    failures: tuple[tuple[int, ...], ...]  # up to a handful of witnesses


@dataclass(frozen=True)
class Exhaustive:
    cap: int  # largest digit enumerated


@dataclass(frozen=True)
class RandomSampler:
    count: int
    digit_range: tuple[int, int]
    seed: int


def _window_ok_fast(logs: list[float], weights: tuple[float, ...], log_m: float, k: int) -> bool:
    total = 0.0
    for i, t in enumerate(weights):
        if t:
            total += t * logs[k + i]
    return total >= log_m - 1e-12


def verify_mass_bound(
    n: int,
    spec: CoverSpec,
    s: float,
    sampler: Union[Exhaustive, RandomSampler],
) -> MassBoundReport:
    """Check -2s log q_n <= log mu_{s+1/2}(I_n) on members of D_n(M).

    q_n is computed exactly; with M above the threshold the bound admits no
    failures.  Below-threshold runs still evaluate but are flagged and their
    violations reported as raw counts only.
    """
    if s <= 0.5:
        raise DomainError("mass bound needs s > 1/2")
    weights = spec.weights.weights
    m = spec.weights.m
    if n < m + 1:
        raise PreconditionError("tuple length must cover at least one window")
    log_m = float(spec.log_M.log_value)
    thr = float(min_mass_threshold(s, spec.weights).log_value)
    threshold_ok = log_m >= thr - 1e-12
    t_meas = s + 0.5
    P = pressure(t_meas).value

    flags: list[str] = []
    if not threshold_ok:
        flags.append("below-threshold")

    checked = 0
    raw_violations = 0
    failures: list[tuple[int, ...]] = []

    def check(tup: tuple[int, ...]) -> None:
        nonlocal checked, raw_violations
        checked += 1
        q_prev, q_cur = 0, 1
        slog = 0.0
        for a in tup:
            q_prev, q_cur = q_cur, a * q_cur + q_prev
            slog += math.log(a)
        lhs = -2.0 * s * math.log(q_cur)
        rhs = -n * P - t_meas * slog
        if lhs > rhs:
            raw_violations += 1
            if len(failures) < 8:
                failures.append(tup)

    if isinstance(sampler, Exhaustive):
        # desk-scale guard per the enumeration design
        if n > 6 or sampler.cap > 200:
            raise PreconditionError("exhaustive mode is bounded to n <= 6, digits <= 200")
        cap = sampler.cap
        logs_tab = [0.0] * (cap + 1)
        for a in range(1, cap + 1):
            logs_tab[a] = math.log(a)
        sampler_name = f"exhaustive(cap={cap})"

        def dfs(prefix: list[int], logs: list[float]):
            pos = len(prefix)
            if pos == n:
                check(tuple(prefix))
                return
            for a in range(1, cap + 1):
                prefix.append(a)
                logs.append(logs_tab[a])
                k = pos + 1 - (m + 1)  # window ending at this new digit
                if k < 0 or _window_ok_fast(logs, weights, log_m, k):
                    dfs(prefix, logs)
                prefix.pop()
                logs.pop()

        dfs([], [])
    else:
        lo, hi = sampler.digit_range
        if lo < 1 or hi < lo:
            raise PreconditionError("digit range must satisfy 1 <= lo <= hi")
        rng = _random.Random(sampler.seed)
        sampler_name = f"random(count={sampler.count},range=[{lo},{hi}],seed={sampler.seed})"
        accepted = 0
        attempts = 0
        max_attempts = max(1000, sampler.count * 1000)
        while accepted < sampler.count and attempts < max_attempts:
            attempts += 1
            tup = tuple(rng.randint(lo, hi) for _ in range(n))
            logs = [math.log(a) for a in tup]
            if all(_window_ok_fast(logs, weights, log_m, k) for k in range(n - m)):
                accepted += 1
                check(tup)

    vacuous = checked == 0
    if vacuous:
        flags.append("vacuous-run")
        warnings.warn("no tuples satisfied the window constraint; vacuous run")

    fail_count = raw_violations if threshold_ok else 0
    return MassBoundReport(
        n=n,
        s=s,
        log_M=log_m,
        threshold_ok=threshold_ok,
        sampler=sampler_name,
        members_checked=checked,
        pass_count=checked - raw_violations,
        fail_count=fail_count,
        raw_violations=raw_violations,
        vacuous=vacuous,
        flags=tuple(flags),
        failures=tuple(failures),
    )


# --------------------------------------------------------------------------
# partial dimension formula
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DimFormulaResult:
    partials: tuple[float, ...]  # value at each n, aligned with indices below
    indices: tuple[int, ...]
    liminf_estimate: float
    alt_form: float  # 1/(2 + window max of log s_{n+1}/S_n)
    window_start: int

    def partial_at(self, n: int) -> float:
        return self.partials[self.indices.index(n)]


def dim_formula_partial(
    logs: LogSequence, up_to: int, window_start: Optional[int] = None
) -> DimFormulaResult:
    """Partial values S_n/(2 S_n + log s_{n+1}) and their window liminf.

    The equivalent 1/(2 + limsup log s_{n+1}/S_n) form is computed
    independently and must agree to 1e-9.  Leading zero entries (s_n = 1)
    are skipped until the partial sums turn positive.
    """
    lv = logs.log_values()
    if up_to > len(lv) - 1:
        raise PreconditionError("up_to must leave one entry for log s_{n+1}")
    partials: list[float] = []
    indices: list[int] = []
    S = mpf(0)
    ratios: list[float] = []
    for n in range(1, up_to + 1):
        S += lv[n - 1]
        if S <= 0:
            continue
        nxt = lv[n]
        partials.append(float(S / (2 * S + nxt)))
        ratios.append(float(nxt / S))
        indices.append(n)
    if not partials:
        raise PreconditionError("no positive partial sums up to the requested depth")
    if window_start is None:
        window_start = max(indices[0], up_to // 2)
    tail = [p for i, p in zip(indices, partials) if i >= window_start]
    tail_ratios = [r for i, r in zip(indices, ratios) if i >= window_start]
    if not tail:
        tail, tail_ratios = partials, ratios
        window_start = indices[0]
    liminf_estimate = min(tail)
    alt = 1.0 / (2.0 + max(tail_ratios))
    if abs(alt - liminf_estimate) > 1e-9:
        raise NumericError(
            f"formula forms disagree: {liminf_estimate} vs {alt}"
        )
    return DimFormulaResult(
        partials=tuple(partials),
        indices=tuple(indices),
        liminf_estimate=liminf_estimate,
        alt_form=alt,
        window_start=window_start,
    )


# --------------------------------------------------------------------------
# natural-cover critical exponent
# --------------------------------------------------------------------------

EXACT_INNER_LIMIT = 10 ** 4


@dataclass(frozen=True)
class CriticalExponentResult:
    s_star: float
    band_lo: float
    band_hi: float
    depth: int
    trace: tuple[tuple[int, float], ...]  # per-level log contribution at s_star

    @property
    def band_width(self) -> float:
        return self.band_hi - self.band_lo


def _inner_log_sum(floor_int: Optional[int], log_s: mpf, s: float) -> mpf:
    """log sum_{a=F}^{2F-1} a^(-2s), exact for small F, integral surrogate beyond."""
    if floor_int is not None and floor_int <= EXACT_INNER_LIMIT:
        arr = np.arange(floor_int, 2 * floor_int, dtype=np.float64)
        return mpf(math.log(float(np.sum(arr ** (-2.0 * s)))))
    # surrogate: integral of x^(-2s) over [F, 2F); the prefactor
    # (1 - 2^(1-2s))/(2s - 1) tends to log 2 as s -> 1/2
    u = 2.0 * s - 1.0
    ratio = math.log(2.0) if abs(u) < 1e-12 else (1.0 - 2.0 ** (-u)) / u
    return (1 - 2 * s) * log_s + mpf(math.log(ratio))


def critical_exponent(plan: DigitPlan, depth: int) -> CriticalExponentResult:
    """Bisection root of the level-`depth` natural-cover sum of the plan.

    The cover models each admissible level-n cylinder by (prod a_k)^-2 mass
    spread over the next level's range, i.e. adds a -s log floor(s_{n+1})
    term; replacing q_n by prod a_k is off by at most 4^n * 2, which is
    reported as the [band_lo, band_hi] uncertainty band on the root.
    """
    if depth < 2:
        raise PreconditionError("depth must be >= 2")
    if len(plan) < depth + 1:
        raise PreconditionError("plan must extend one index past the requested depth")
    logs = plan.lower_logs()
    floors = plan.representatives

    def F(s: float, shift: float = 0.0) -> mpf:
        total = mpf(0)
        for k in range(depth):
            total += _inner_log_sum(floors[k], logs[k], s)
        total -= as_mpf(s) * logs[depth]
        return total - as_mpf(shift) * s

    distortion = depth * math.log(4.0) + math.log(2.0)

    def bisect(shift: float) -> float:
        lo, hi = 0.01, 0.99
        f_lo, f_hi = F(lo, shift), F(hi, shift)
        if not (f_lo > 0 > f_hi):
            raise BracketError(
                f"cover sum has no sign change in (0.01, 0.99): F(lo)={float(f_lo):.3g}, F(hi)={float(f_hi):.3g}"
            )
        while hi - lo > 1e-12:
            mid = (lo + hi) / 2.0
            if F(mid, shift) > 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2.0

    s_star = bisect(0.0)
    s_low = bisect(distortion)
    trace = tuple(
        (k + 1, float(_inner_log_sum(floors[k], logs[k], s_star))) for k in range(depth)
    )
    return CriticalExponentResult(
        s_star=s_star,
        band_lo=min(s_low, s_star),
        band_hi=max(s_low, s_star),
        depth=depth,
        trace=trace,
    )
