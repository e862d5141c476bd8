"""Seeded Monte Carlo checks of almost-everywhere digit growth behaviour,
plus exact event detectors for approximation criteria.

Sampling draws uniform dyadic rationals and expands the whole dyadic cell,
so every reported digit is certified (shared by all reals in the cell) and
runs are bit-reproducible from (master_seed, config).  Statistical targets
here are deliberately loose, factor-2 style: the limits being probed
converge at log-log speed, so the suite emits traces for inspection rather
than asserting sharp constants.
"""

from __future__ import annotations

import hashlib
import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .cf import DigitSequence, convergents_of, expand_certified
from .constructions import WeightVector
from .errors import PrecisionExhausted, PreconditionError
from .logscalar import int_ln

LEVY_BITS_PER_DIGIT = 3.43  # ~ 2 * (pi^2 / (12 ln 2)) / ln 2, with slack


def default_precision_bits(depth: int) -> int:
    """Enough dyadic bits for the certified prefix to reach `depth` w.h.p."""
    return int(math.ceil(depth * LEVY_BITS_PER_DIGIT * 1.1)) + 512


@dataclass(frozen=True)
class TrialConfig:
    trials: int
    depth: int
    precision_bits: int
    master_seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise PreconditionError("at least one trial required")
        if self.depth < 1:
            raise PreconditionError("depth must be >= 1")
        if self.precision_bits < 16:
            raise PreconditionError("precision_bits must be >= 16")


def _trial_rng(master_seed: int, trial_index: int, attempt: int) -> random.Random:
    # hash-derived sub-seed: stable across platforms and PYTHONHASHSEED
    digest = hashlib.sha256(
        f"cfgrowth:{master_seed}:{trial_index}:{attempt}".encode()
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def sample_uniform_digits(
    cfg: TrialConfig, trial_index: int, attempt: int = 0
) -> DigitSequence:
    """Certified digits of a uniform dyadic x; raises PrecisionExhausted when
    the certified prefix falls short of cfg.depth (caller retries with more bits)."""
    bits = cfg.precision_bits << attempt
    rng = _trial_rng(cfg.master_seed, trial_index, attempt)
    scale = 1 << bits
    x = Fraction(rng.getrandbits(bits), scale)
    seq = expand_certified(x, cfg.depth, Fraction(1, scale))
    if len(seq) < cfg.depth:
        raise PrecisionExhausted(
            f"trial {trial_index}: certified {len(seq)} < {cfg.depth} digits at {bits} bits"
        )
    return seq


def _sample_with_retry(cfg: TrialConfig, trial_index: int, max_retries: int = 4):
    for attempt in range(max_retries + 1):
        try:
            return sample_uniform_digits(cfg, trial_index, attempt), attempt
        except PrecisionExhausted:
            continue
    raise PrecisionExhausted(
        f"trial {trial_index}: still short of depth after {max_retries} doublings"
    )


# --------------------------------------------------------------------------
# digit-count experiments
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BorelReport:
    counts: tuple[int, ...]
    mean: float
    median: float
    heuristic_center: float  # log N / log 2, the classical density guess
    retries: int
    digit_one_frequency: float


def borel_bernstein_count(
    cfg: TrialConfig, threshold: Optional[Callable[[int], float]] = None
) -> BorelReport:
    """Per trial, #{n <= N : a_n >= threshold(n)} (default threshold n -> n)."""
    thr = threshold if threshold is not None else (lambda n: float(n))
    counts = []
    retries = 0
    ones = 0
    total_digits = 0
    for idx in range(cfg.trials):
        seq, attempts = _sample_with_retry(cfg, idx)
        retries += attempts
        digits = seq.exact_digits[: cfg.depth]
        count = 0
        for n, a in enumerate(digits, start=1):
            t = thr(n)
            if not math.isinf(t) and a >= t:
                count += 1
        counts.append(count)
        ones += sum(1 for a in digits if a == 1)
        total_digits += len(digits)
    return BorelReport(
        counts=tuple(counts),
        mean=statistics.fmean(counts),
        median=float(statistics.median(counts)),
        heuristic_center=math.log(cfg.depth) / math.log(2),
        retries=retries,
        digit_one_frequency=ones / total_digits,
    )


@dataclass(frozen=True)
class GrowthTrace:
    trial: int
    ns: tuple[int, ...]
    ratios: tuple[float, ...]
    running_max: tuple[float, ...]


@dataclass(frozen=True)
class GrowthStatReport:
    maxima: tuple[float, ...]  # S_N per trial
    median: float
    retries: int
    traces: tuple[GrowthTrace, ...] = field(default=())


def weighted_growth_stat(
    cfg: TrialConfig, w: WeightVector, collect_traces: bool = False
) -> GrowthStatReport:
    """S_N = max_{m+2 <= n <= N} (sum_i t_i log a_{n+i}) / (t_max log n) per trial.

    Needs digits to depth N + m; the running-max trace is nondecreasing by
    construction and is emitted for convergence inspection.
    """
    m = w.m
    deep_cfg = TrialConfig(
        trials=cfg.trials,
        depth=cfg.depth + m,
        precision_bits=cfg.precision_bits,
        master_seed=cfg.master_seed,
    )
    maxima = []
    traces = []
    retries = 0
    for idx in range(cfg.trials):
        seq, attempts = _sample_with_retry(deep_cfg, idx)
        retries += attempts
        digits = seq.exact_digits
        logs = [int_ln(a) if a > 1 else 0.0 for a in digits]
        ns, ratios, running = [], [], []
        best = -math.inf
        for n in range(m + 2, cfg.depth + 1):
            total = 0.0
            for i, t in enumerate(w.weights):
                if t:
                    total += t * logs[n + i - 1]
            r = total / (w.t_max * math.log(n))
            best = max(best, r)
            if collect_traces:
                ns.append(n)
                ratios.append(r)
                running.append(best)
        maxima.append(best)
        if collect_traces:
            traces.append(
                GrowthTrace(trial=idx, ns=tuple(ns), ratios=tuple(ratios), running_max=tuple(running))
            )
    return GrowthStatReport(
        maxima=tuple(maxima),
        median=float(statistics.median(maxima)),
        retries=retries,
        traces=tuple(traces),
    )


# --------------------------------------------------------------------------
# event detectors
# --------------------------------------------------------------------------


def _at_least_power(a: int, q: int, tau) -> bool:
    """Exact a >= q^tau; big-int comparison when tau has a small denominator,
    otherwise a 256-bit log comparison (margin far beyond any realistic tie)."""
    if q == 1:
        return True  # q^tau = 1 <= a always
    if a == 1:
        return False  # q >= 2 here, so q^tau > 1
    frac = Fraction(tau)
    num, den = frac.numerator, frac.denominator
    if num <= 0:
        return True
    if den <= 64 and num * q.bit_length() <= 2_000_000 and den * a.bit_length() <= 2_000_000:
        return a ** den >= q ** num
    from mpmath import mp

    with mp.workprec(256):
        return mp.log(a) >= mp.mpf(frac.numerator) / frac.denominator * mp.log(q)


def jarnik_events(digits: DigitSequence, tau) -> list[int]:
    """All n <= depth-1 with a_{n+1} >= q_n^tau (exact comparisons)."""
    seq = digits.require_exact()
    if not Fraction(tau) > 0:
        raise PreconditionError("tau must be > 0")
    convs = convergents_of(digits)
    events = []
    for n in range(1, len(seq)):
        q_n = convs[n - 1].q_cur
        if _at_least_power(seq[n], q_n, tau):
            events.append(n)
    return events


class PsiTable:
    """Monotone evaluable approximation-rate function q -> psi(q).

    Wraps a callable; every evaluation is recorded so monotonicity can be
    validated on exactly the points used.
    """

    def __init__(self, fn: Callable[[int], object], name: str = "psi"):
        self._fn = fn
        self.name = name
        self._seen: dict[int, Fraction] = {}

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, object]], name: str = "psi-table") -> "PsiTable":
        table = {int(q): Fraction(v) for q, v in pairs}

        def fn(q: int) -> Fraction:
            if q not in table:
                raise PreconditionError(f"psi table has no entry for q={q}")
            return table[q]

        return cls(fn, name=name)

    def __call__(self, q: int) -> Fraction:
        if q not in self._seen:
            val = Fraction(self._fn(q))
            if val <= 0:
                raise PreconditionError(f"psi({q}) = {val} must be positive")
            self._seen[q] = val
        return self._seen[q]

    def validate_monotone(self) -> None:
        pts = sorted(self._seen.items())
        for (q1, v1), (q2, v2) in zip(pts, pts[1:]):
            if v2 > v1:
                raise PreconditionError(
                    f"psi is not nonincreasing on evaluated points: psi({q1})={v1} < psi({q2})={v2}"
                )


@dataclass(frozen=True)
class DirichletRow:
    n: int
    q_n: int
    skipped: bool
    inner: bool  # full threshold
    outer: bool  # threshold weakened by 1/4


def dirichlet_events(
    digits: DigitSequence, psi: Union[PsiTable, Callable[[int], object]]
) -> list[DirichletRow]:
    """Classify each n by a_n a_{n+1} against ((q_n psi(q_n))^-1 - 1)^-1.

    inner uses the full threshold, outer the threshold divided by 4, so
    inner implies outer.  Indices where psi(q_n) >= 1/q_n (threshold
    undefined) are flagged skipped.  All comparisons are exact rationals.
    """
    if not isinstance(psi, PsiTable):
        psi = PsiTable(psi)
    seq = digits.require_exact()
    convs = convergents_of(digits)
    rows = []
    for n in range(1, len(seq)):
        q_n = convs[n - 1].q_cur
        val = psi(q_n)
        q_psi = q_n * val
        if q_psi >= 1:
            rows.append(DirichletRow(n=n, q_n=q_n, skipped=True, inner=False, outer=False))
            continue
        threshold = q_psi / (1 - q_psi)  # ((q psi)^-1 - 1)^-1
        prod = seq[n - 1] * seq[n]
        inner = prod >= threshold
        outer = prod >= threshold / 4
        rows.append(DirichletRow(n=n, q_n=q_n, skipped=False, inner=inner, outer=outer))
    psi.validate_monotone()
    return rows
