"""Sequence constructions behind the two Cantor-set lower bounds.

Two families are built here, both in log space (values are astronomically
large, e.g. exp(3^60)):

* the liminf-side envelope {L_j}: L_j = sup_k c_{j,k} with c_{j,k} = e^phi(k)
  for k <= j and e^(phi(k)(B+eps)^(j-k)) for k > j, together with the
  normalizer Z = liminf of log(L_n^t0 ... L_{n+m}^tm)/phi(n);

* the limsup-side recursion {c_n} driven by the running minimum
  Phi(n) = min_{k>=n} phi(k), padded by a slowly growing integer sequence
  {alpha_n} into s_n = c_n + alpha_n.

Either family turns into a DigitPlan: per-index admissible digit ranges
[floor(s_n), 2*floor(s_n)).  Floors are taken exactly while the values fit
in 64 bits; beyond that the floor is skipped and the (relative) error bound
e^(-log s_n) is recorded, which is negligible at these scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from mpmath import mp, mpf

from .cf import EXACT, DigitSequence
from .errors import (
    ConstructionInconsistencyError,
    InputError,
    PreconditionError,
    UnresolvedSupError,
)
from .logscalar import LogScalar, as_mpf
from .rates import GEOM, POLY, TABLE, RateFunction

# Floors are evaluated exactly up to this log magnitude (64-bit values).
FLOOR_EXACT_LOG_LIMIT = 64 * math.log(2)

LIMINF_CONSTRUCTION = "liminf"
LIMSUP_CONSTRUCTION = "limsup"
CUSTOM = "custom"


@dataclass(frozen=True)
class WeightVector:
    """Exponent weights (t_0, ..., t_m) applied to consecutive digits."""

    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.weights:
            raise PreconditionError("weight vector must be nonempty")
        if any(t < 0 for t in self.weights):
            raise PreconditionError("weights must be nonnegative")
        if all(t == 0 for t in self.weights):
            raise PreconditionError("at least one weight must be positive")

    @classmethod
    def of(cls, *weights) -> "WeightVector":
        return cls(tuple(float(t) for t in weights))

    @property
    def m(self) -> int:
        return len(self.weights) - 1

    @property
    def t_max(self) -> float:
        return max(self.weights)

    @property
    def first_nonzero_index(self) -> int:
        return next(i for i, t in enumerate(self.weights) if t > 0)

    @property
    def nondecreasing_positive(self) -> bool:
        return self.weights[0] > 0 and all(
            a <= b for a, b in zip(self.weights, self.weights[1:])
        )


@dataclass(frozen=True)
class LogSequence:
    """A 1-indexed sequence of large positive reals carried as LogScalars."""

    entries: tuple[LogScalar, ...]
    provenance: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    def log_values(self) -> list[mpf]:
        return [e.log_value for e in self.entries]

    def to_lines(self) -> list[str]:
        return [f"{i},{mp.nstr(e.log_value, 18)}" for i, e in enumerate(self.entries, start=1)]

    @classmethod
    def from_lines(cls, lines, provenance: Optional[dict] = None) -> "LogSequence":
        entries = []
        expected = 1
        for raw in lines:
            raw = raw.strip()
            if not raw or raw.startswith("#"):
                continue
            idx_s, val_s = raw.split(",", 1)
            if int(idx_s) != expected:
                raise InputError(f"expected index {expected}, got {idx_s}")
            entries.append(LogScalar.from_log(mpf(val_s)))
            expected += 1
        return cls(tuple(entries), provenance or {"source": "lines"})


@dataclass(frozen=True)
class DigitPlan:
    """Per-index admissible digit ranges [floor(s_n), 2*floor(s_n))."""

    lower_bounds: LogSequence
    floor_exact: tuple[bool, ...]
    representatives: tuple[Optional[int], ...]
    source: str = CUSTOM
    multiplier: int = 2

    def __len__(self) -> int:
        return len(self.lower_bounds)

    def lower_logs(self) -> list[mpf]:
        return self.lower_bounds.log_values()

    def representative_digit(self, n: int) -> Optional[int]:
        """Exact integer floor(s_n) when the floor was taken exactly."""
        return self.representatives[n - 1]

    def to_lines(self) -> list[str]:
        head = f"# digit-plan source={self.source} multiplier={self.multiplier}"
        return [head] + self.lower_bounds.to_lines()

    @classmethod
    def from_lines(cls, lines) -> "DigitPlan":
        seq = LogSequence.from_lines(lines, provenance={"source": "plan-file"})
        n = len(seq)
        return cls(
            lower_bounds=seq,
            floor_exact=(False,) * n,
            representatives=(None,) * n,
            source=CUSTOM,
        )

    @classmethod
    def from_logs(cls, log_values, source: str = CUSTOM, provenance: Optional[dict] = None) -> "DigitPlan":
        """Build a plan from raw log s_n values, applying the floor policy."""
        lowers, exact, reps = [], [], []
        for lv in log_values:
            lo, ex, rep = _floored_log(as_mpf(lv))
            lowers.append(LogScalar.from_log(lo))
            exact.append(ex)
            reps.append(rep)
        prov = dict(provenance or {})
        prov.setdefault("floor_error_bound", "<= exp(-log s_n) relative where floor skipped")
        return cls(
            lower_bounds=LogSequence(tuple(lowers), prov),
            floor_exact=tuple(exact),
            representatives=tuple(reps),
            source=source,
        )


def _floored_log(log_v: mpf) -> tuple[mpf, bool, Optional[int]]:
    """(log floor(v), exact?, floor as int) with the 64-bit exactness policy.

    Values within 2^-100 relative of an integer are snapped to it: at 192-bit
    working precision that radius exceeds the accumulated rounding error by
    dozens of orders of magnitude, and analytically exact integers (e.g.
    poly rates) must not fall to the predecessor.
    """
    if log_v < 0:
        raise InputError("digit plan lower bounds must be >= 1")
    if log_v > FLOOR_EXACT_LOG_LIMIT:
        return log_v, False, None
    v = mp.exp(log_v)
    nearest = mp.nint(v)
    if abs(v - nearest) <= max(mpf(1), v) * mpf(2) ** -100:
        iv = int(nearest)
    else:
        iv = int(mp.floor(v))
    iv = max(iv, 1)
    return mp.log(mpf(iv)), True, iv


# --------------------------------------------------------------------------
# liminf side: envelope sequence {L_j} and normalizer Z
# --------------------------------------------------------------------------


def build_L_sequence(
    rf: RateFunction,
    B_est: float,
    eps: float,
    horizon: int,
    scan_budget: int = 200,
) -> LogSequence:
    """log L_j = max(max_{k<=j} phi(k), sup_{k>j} phi(k)(B+eps)^(j-k)) for j <= horizon.

    The supremum over infinite k is resolved by a certified finite scan: the
    scan stops once the current candidate has fallen below the running max
    and the tail is provably decreasing.  For poly/geom presets the candidate
    ratio phi(k+1)/(phi(k)(B+eps)) is analytically nonincreasing, so ratio<1
    certifies the tail; the generic envelope certificate
    phi(k) <= (B+eps/2)^k is used as a fallback.  Tables can only be scanned
    to their own horizon; a decayed scan is flagged, a still-rising one errors.
    """
    if eps <= 0:
        raise PreconditionError("eps must be > 0")
    if not (1 <= B_est < math.inf):
        raise PreconditionError("B estimate must be finite and >= 1")
    growth = as_mpf(B_est) + as_mpf(eps)
    grow_half = as_mpf(B_est) + as_mpf(eps) / 2
    log_growth = mp.log(growth)
    log_grow_half = mp.log(grow_half)

    flags: list[str] = []
    argmax: list[int] = []
    logs: list[mpf] = []
    prefix_max = None

    for j in range(1, horizon + 1):
        pj = rf.phi(j)
        prefix_max = pj if prefix_max is None else max(prefix_max, pj)
        best = prefix_max
        best_k = j  # representative; any k <= j attaining the prefix max
        resolved = False
        k_last = j + scan_budget
        if rf.kind == TABLE:
            k_last = min(k_last, rf.horizon)
        cand = None
        for k in range(j + 1, k_last + 1):
            cand = rf.phi(k) * mp.exp((j - k) * log_growth)
            if cand > best:
                best, best_k = cand, k
                continue
            # Candidate below the running max; try to certify the tail.
            if rf.kind in (POLY, GEOM):
                # ratio of consecutive candidates, nonincreasing in k for
                # these kinds; < 1 means the tail decreases forever.
                ratio = mp.exp(rf.log_phi(k + 1) - rf.log_phi(k) - log_growth)
                if ratio < 1:
                    resolved = True
                    break
            envelope = mp.exp(k * log_grow_half + (j - k) * log_growth)
            if rf.phi(k) <= mp.exp(k * log_grow_half) and envelope < best and rf.kind != TABLE:
                resolved = True
                break
        if not resolved:
            if rf.kind == TABLE and k_last == rf.horizon and cand is not None and cand < best:
                flags.append(f"sup-truncated-at-horizon:j={j}")
            elif rf.kind == TABLE and k_last == rf.horizon and j == horizon:
                flags.append(f"sup-truncated-at-horizon:j={j}")
            else:
                raise UnresolvedSupError(
                    f"supremum scan for j={j} unresolved after {scan_budget} indices "
                    f"(kind={rf.kind}, last candidate={mp.nstr(cand, 8) if cand is not None else 'n/a'})"
                )
        logs.append(best)
        argmax.append(best_k)

    provenance = {
        "construction": LIMINF_CONSTRUCTION,
        "phi": rf.spec_string(),
        "B_est": float(B_est),
        "eps": float(eps),
        "horizon": horizon,
        "sup_argmax": tuple(argmax),
        "flags": tuple(flags),
    }
    return LogSequence(tuple(LogScalar.from_log(v) for v in logs), provenance)


@dataclass(frozen=True)
class ZResult:
    Z: float
    lower_bound: float
    upper_bound: float
    window_start: int
    ratios: tuple[float, ...]


def compute_Z(L: LogSequence, w: WeightVector, rf: RateFunction, window_start: Optional[int] = None) -> ZResult:
    """Window-liminf of log(L_n^t0 ... L_{n+m}^tm)/phi(n), with bound checks.

    Validated against the two-sided bound t_k <= Z <= sum_i t_i (B+eps)^i
    (k the first index with a positive weight); falling outside raises.
    """
    m = w.m
    n_max = len(L) - m
    if n_max < 1:
        raise PreconditionError("L sequence shorter than the weight window")
    if window_start is None:
        window_start = max(1, n_max // 2)
    if window_start > n_max:
        raise PreconditionError("window_start beyond usable range")
    logs = L.log_values()
    ratios = []
    for n in range(1, n_max + 1):
        num = mpf(0)
        for i, t in enumerate(w.weights):
            if t:
                num += as_mpf(t) * logs[n + i - 1]
        ratios.append(float(num / rf.phi(n)))
    Z = min(ratios[window_start - 1 :])

    eps = L.provenance.get("eps", 0.0)
    B_est = L.provenance.get("B_est", None)
    if B_est is None:
        raise PreconditionError("L sequence lacks construction provenance (B_est)")
    growth = B_est + eps
    lower = w.weights[w.first_nonzero_index]
    upper = sum(t * growth ** i for i, t in enumerate(w.weights))
    if not (lower - 1e-9 <= Z <= upper + 1e-9):
        raise ConstructionInconsistencyError(
            f"Z={Z} outside the certified range [{lower}, {upper}]"
        )
    return ZResult(Z=Z, lower_bound=lower, upper_bound=upper, window_start=window_start, ratios=tuple(ratios))


def liminf_digit_plan(L: LogSequence, Z: float) -> DigitPlan:
    """Digit plan with lower bounds floor(L_n^(1/Z))."""
    if Z <= 0:
        raise PreconditionError("Z must be > 0")
    zz = as_mpf(Z)
    prov = dict(L.provenance)
    prov["Z"] = float(Z)
    return DigitPlan.from_logs(
        [e.log_value / zz for e in L.entries], source=LIMINF_CONSTRUCTION, provenance=prov
    )


# --------------------------------------------------------------------------
# limsup side: recursion {c_n}, pad {alpha_n}, plan from s_n = c_n + alpha_n
# --------------------------------------------------------------------------


def build_c_sequence(
    rf: RateFunction,
    w: WeightVector,
    b_est: float,
    eps: float,
    horizon: int,
) -> LogSequence:
    """The recursion seeded by ones and driven by the running minimum of phi.

    In log space (gamma_n = log c_n): gamma_1..gamma_m = 0,
    gamma_{m+1} = Phi(1)/t_m, and for n >= 2

        gamma_{n+m} = min( (Phi(n) - sum_{i<m} t_i gamma_{n+i}) / t_m,
                           (b+eps-1) * sum_{j<n+m} gamma_j ).

    Requires nondecreasing positive weights (the recursion can dip below 1
    otherwise, which this artifact does not attempt) and asserts c_n >= 1.
    """
    if not w.nondecreasing_positive:
        raise PreconditionError(
            "limsup construction requires nondecreasing positive weights"
        )
    if eps <= 0:
        raise PreconditionError("eps must be > 0")
    if not b_est >= 1:
        raise PreconditionError("b estimate must be >= 1 (or +inf)")
    m = w.m
    if horizon < m + 1:
        raise PreconditionError("horizon must reach past the weight window")

    t = [as_mpf(x) for x in w.weights]
    power_rate = None if math.isinf(b_est) else as_mpf(b_est) + as_mpf(eps) - 1

    gamma: list[mpf] = [mpf(0)] * (horizon + 1)  # 1-indexed; gamma[0] unused
    branches: list[str] = ["seed"] * min(m, horizon)
    prefix_sum = mpf(0)  # sum of gamma[1..last assigned]
    for j in range(1, min(m, horizon) + 1):
        gamma[j] = mpf(0)
    if horizon >= m + 1:
        gamma[m + 1] = rf.phi_value_suffix_min(1) / t[m]
        branches.append("seed-phi")
        prefix_sum = sum(gamma[1 : m + 2], mpf(0))
    n = 2
    while n + m <= horizon:
        head = mpf(0)
        for i in range(m):
            if w.weights[i]:
                head += t[i] * gamma[n + i]
        branch_phi = (rf.phi_value_suffix_min(n) - head) / t[m]
        if power_rate is None:
            value, branch = branch_phi, "phi"
        else:
            branch_power = power_rate * prefix_sum
            if branch_phi <= branch_power:
                value, branch = branch_phi, "phi"
            else:
                value, branch = branch_power, "power"
        if value < 0:
            if value > -mpf(10) ** -25:
                value = mpf(0)
            else:
                raise ConstructionInconsistencyError(
                    f"c_{n + m} dropped below 1 (log = {mp.nstr(value, 8)})"
                )
        gamma[n + m] = value
        branches.append(branch)
        prefix_sum += value
        n += 1

    provenance = {
        "construction": LIMSUP_CONSTRUCTION,
        "phi": rf.spec_string(),
        "b_est": float(b_est),
        "eps": float(eps),
        "horizon": horizon,
        "branches": tuple(branches),
    }
    return LogSequence(tuple(LogScalar.from_log(v) for v in gamma[1:]), provenance)


def find_growth_witnesses(c: LogSequence, rf: RateFunction, w: WeightVector, tol: float = 1e-9) -> list[int]:
    """Indices n where the weighted window of c matches e^phi(n) within tol (log space)."""
    logs = c.log_values()
    m = w.m
    out = []
    for n in range(1, len(logs) - m + 1):
        total = mpf(0)
        for i, t in enumerate(w.weights):
            if t:
                total += as_mpf(t) * logs[n + i - 1]
        if abs(total - rf.phi(n)) <= tol:
            out.append(n)
    return out


def build_alpha_sequence(rf: RateFunction, horizon: int) -> LogSequence:
    """Slowly growing integer pad: alpha_n = max(2, floor(sqrt(g(n))) + 1)
    where g(n) = inf_{k>=n} phi(k)/k.

    Equivalently alpha_n = k+1 on the block where g first clears k^2; the
    value 2 applies before the first block.  Tables can only certify g up to
    their horizon, which is recorded as truncation.
    """
    alphas: list[int] = []
    for n in range(1, horizon + 1):
        g = rf.phi_over_n_inf(n)
        if g < 1:
            k = 0
        else:
            k = int(mp.floor(mp.sqrt(g)))
            # snap guard: exact squares must not round down
            if (k + 1) ** 2 <= g * (1 + mpf(2) ** -100):
                k += 1
        alphas.append(max(2, k + 1))
    provenance = {
        "construction": "alpha-pad",
        "phi": rf.spec_string(),
        "horizon": horizon,
        "alpha_integers": tuple(alphas),
        "truncated": rf.kind == TABLE,
    }
    return LogSequence(
        tuple(LogScalar.from_value(a) for a in alphas), provenance
    )


def limsup_digit_plan(c: LogSequence, alpha: LogSequence) -> DigitPlan:
    """Plan from s_n = c_n + alpha_n, asserting log c_n <= log s_n <= log c_n + 2 log alpha_n."""
    if len(c) != len(alpha):
        raise PreconditionError("c and alpha sequences must have equal length")
    logs = []
    for cs, al in zip(c.entries, alpha.entries):
        s = cs + al
        if not (cs.log_value - mpf(10) ** -30 <= s.log_value <= cs.log_value + 2 * al.log_value + mpf(10) ** -30):
            raise ConstructionInconsistencyError("s_n left its certified sandwich")
        logs.append(s.log_value)
    prov = dict(c.provenance)
    prov["alpha"] = alpha.provenance.get("alpha_integers")
    return DigitPlan.from_logs(logs, source=LIMSUP_CONSTRUCTION, provenance=prov)


# --------------------------------------------------------------------------
# membership ratios
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioReport:
    ratios: tuple[float, ...]
    suffix_max: tuple[float, ...]
    suffix_min: tuple[float, ...]
    window_start: int

    @property
    def limsup_estimate(self) -> float:
        return self.suffix_max[self.window_start - 1]

    @property
    def liminf_estimate(self) -> float:
        return self.suffix_min[self.window_start - 1]

    def suffix_max_at(self, n: int) -> float:
        return self.suffix_max[n - 1]

    def suffix_min_at(self, n: int) -> float:
        return self.suffix_min[n - 1]


def membership_ratios(
    plan_or_digits: Union[DigitPlan, DigitSequence],
    rf: RateFunction,
    w: WeightVector,
    window_start: Optional[int] = None,
) -> RatioReport:
    """r_n = (sum_i t_i log a_{n+i}) / phi(n) plus suffix extreme traces.

    For a DigitPlan the representative lower-corner choice a_n = floor(s_n)
    is used (the plan's stored lower bounds).  The suffix maxima estimate the
    limsup, the suffix minima the liminf; both are reported from every start
    index so tail behaviour is inspectable.
    """
    if isinstance(plan_or_digits, DigitPlan):
        logs = plan_or_digits.lower_logs()
    elif isinstance(plan_or_digits, DigitSequence):
        if plan_or_digits.mode == EXACT:
            logs = [mp.log(mpf(a)) for a in plan_or_digits.exact_digits]
        else:
            logs = [e.log_value for e in plan_or_digits.log_digits]
    else:
        raise InputError("expected a DigitPlan or DigitSequence")

    m = w.m
    n_max = len(logs) - m
    if n_max < 2:
        raise PreconditionError("need at least m + 2 entries")
    ratios = []
    for n in range(1, n_max + 1):
        total = mpf(0)
        for i, t in enumerate(w.weights):
            if t:
                total += as_mpf(t) * logs[n + i - 1]
        ratios.append(float(total / rf.phi(n)))

    suffix_max = list(ratios)
    suffix_min = list(ratios)
    for i in range(n_max - 2, -1, -1):
        suffix_max[i] = max(suffix_max[i], suffix_max[i + 1])
        suffix_min[i] = min(suffix_min[i], suffix_min[i + 1])

    if window_start is None:
        window_start = max(1, n_max // 2)
    return RatioReport(
        ratios=tuple(ratios),
        suffix_max=tuple(suffix_max),
        suffix_min=tuple(suffix_min),
        window_start=window_start,
    )
