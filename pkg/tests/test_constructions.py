import math

import pytest
from mpmath import mp, mpf

from cfgrowth.cf import DigitSequence
from cfgrowth.constructions import (
    DigitPlan,
    LogSequence,
    WeightVector,
    build_L_sequence,
    build_alpha_sequence,
    build_c_sequence,
    compute_Z,
    find_growth_witnesses,
    liminf_digit_plan,
    limsup_digit_plan,
    membership_ratios,
)
from cfgrowth.errors import (
    ConstructionInconsistencyError,
    PreconditionError,
    UnresolvedSupError,
)
from cfgrowth.rates import RateFunction


def geom2(h=80):
    return RateFunction.geometric(2.0, h)


def brute_force_sup(rf, B_est, eps, j, k_extra=50):
    # Independent oracle: direct sup over k <= j + k_extra.
    growth = mpf(B_est) + mpf(eps)
    best = mpf("-inf")
    for k in range(1, j + k_extra + 1):
        if k <= j:
            cand = rf.phi(k)
        else:
            cand = rf.phi(k) * growth ** (j - k)
        best = max(best, cand)
    return best


# --- L sequence ---------------------------------------------------------------


def test_L_geometric_closed_form():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 20)
    for j in range(1, 21):
        assert abs(L.log_values()[j - 1] - mpf(2) ** j) < mpf(10) ** -30
        oracle = brute_force_sup(rf, 2.0, 0.5, j)
        assert abs(L.log_values()[j - 1] - oracle) < mpf(10) ** -30


def test_L_polynomial_matches_brute_force():
    rf = RateFunction.polynomial(2.0, 80)
    L = build_L_sequence(rf, 1.0, 0.1, 30)
    for j in range(1, 31):
        oracle = brute_force_sup(rf, 1.0, 0.1, j, k_extra=300)
        got = L.log_values()[j - 1]
        assert abs(got - oracle) <= abs(oracle) * mpf(10) ** -40


def _check_chain(L, rf, B_est, eps):
    logs = L.log_values()
    growth = mpf(B_est) + mpf(eps)
    slack = mpf(10) ** -25
    for j in range(len(logs)):
        # envelope dominates e^phi(j)
        assert logs[j] >= rf.phi(j + 1) - slack * max(1, abs(logs[j]))
        if j + 1 < len(logs):
            tol = slack * max(1, abs(logs[j + 1]))
            assert logs[j] <= logs[j + 1] + tol
            assert logs[j + 1] <= growth * logs[j] + tol
    # cumulative bound: log L_{n+1} - log L_1 <= (B+eps-1) * sum_{j<=n} log L_j
    acc = mpf(0)
    for n in range(len(logs) - 1):
        acc += logs[n]
        lhs = logs[n + 1] - logs[0]
        rhs = (growth - 1) * acc
        assert lhs <= rhs + slack * max(1, abs(rhs))


@pytest.mark.parametrize("beta", [2.0, 3.0])
@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_L_chain_invariants_geometric(beta, eps):
    rf = RateFunction.geometric(beta, 80)
    L = build_L_sequence(rf, beta, eps, 60)
    _check_chain(L, rf, beta, eps)


@pytest.mark.parametrize("eps", [0.1, 0.5])
def test_L_chain_invariants_polynomial(eps):
    rf = RateFunction.polynomial(2.0, 80)
    L = build_L_sequence(rf, 1.0, eps, 60)
    _check_chain(L, rf, 1.0, eps)


def test_L_ratio_window_liminf_near_one():
    # window-liminf of log L_n / phi(n) sits in [1, 1+delta] and delta shrinks
    rf = RateFunction.polynomial(2.0, 140)
    for horizon, bound in ((40, 2.0), (120, 1.001)):
        L = build_L_sequence(rf, 1.0, 0.1, horizon)
        ratios = [float(lv / rf.phi(n + 1)) for n, lv in enumerate(L.log_values())]
        window = ratios[horizon // 2 :]
        assert min(window) >= 1 - 1e-12
        assert min(window) <= bound


def test_L_super_geometric_rejected():
    # No finite B certifies the tail for e^(n^a); the scan must fail loudly.
    rf = RateFunction.super_geometric(2.0, 400)
    with pytest.raises(UnresolvedSupError):
        build_L_sequence(rf, 2.0, 0.1, 5, scan_budget=50)


def test_L_table_truncation_flagged():
    values = [float(2 ** n) for n in range(1, 31)]
    rf = RateFunction.from_values(values)
    L = build_L_sequence(rf, 2.0, 0.5, 10)
    assert len(L) == 10
    # sup over the table is resolved within the table horizon for small j
    assert abs(L.log_values()[4] - mpf(2) ** 5) < 1e-20


# --- Z ------------------------------------------------------------------------


def test_Z_single_weight():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 40)
    res = compute_Z(L, WeightVector.of(1.0), rf)
    assert res.Z == pytest.approx(1.0, abs=1e-12)


def test_Z_two_weights_bounds():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 40)
    res = compute_Z(L, WeightVector.of(1.0, 1.0), rf)
    # ratios are (2^n + 2^(n+1))/2^n = 3 identically
    assert res.Z == pytest.approx(3.0, abs=1e-12)
    assert res.lower_bound == 1.0
    assert res.upper_bound == pytest.approx(1.0 + 2.5)
    assert res.lower_bound - 1e-9 <= res.Z <= res.upper_bound + 1e-9


def test_Z_trailing_weight_only():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 40)
    res = compute_Z(L, WeightVector.of(0.0, 2.0), rf)
    assert res.Z >= 2.0 - 1e-12  # Z >= t_m when earlier weights vanish


# --- liminf plan ----------------------------------------------------------------


def test_liminf_plan_scales_with_Z():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 20)
    plan1 = liminf_digit_plan(L, 1.0)
    plan2 = liminf_digit_plan(L, 2.0)
    for n in range(8, 20):  # beyond the exact-floor regime
        l1 = plan1.lower_logs()[n]
        l2 = plan2.lower_logs()[n]
        assert abs(l1 - 2 * l2) < 1e-20
        assert l2 < l1  # larger Z -> pointwise smaller plan


def test_liminf_plan_floor_policy():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 10)
    plan = liminf_digit_plan(L, 1.0)
    # e^(2^n) floors exactly while 2^n <= 64 log 2
    assert plan.floor_exact[:5] == (True,) * 5
    assert plan.representative_digit(1) == 7  # floor(e^2)
    assert plan.representative_digit(2) == 54  # floor(e^4)
    assert plan.representative_digit(3) == 2980  # floor(e^8)
    assert plan.floor_exact[6] is False
    assert plan.representative_digit(7) is None


# --- c sequence -------------------------------------------------------------------


def test_c_sequence_hand_recursion():
    # m=1, t=(1,1), geometric base 2 (running min equals phi), b=2, eps=0.5:
    # hand recursion gives log c = 0, 2, 2, 6, 10, 22 for n = 1..6.
    rf = geom2()
    c = build_c_sequence(rf, WeightVector.of(1.0, 1.0), 2.0, 0.5, 6)
    got = [float(v) for v in c.log_values()]
    assert got == pytest.approx([0.0, 2.0, 2.0, 6.0, 10.0, 22.0], abs=1e-12)


def test_c_sequence_growth_cap():
    # log c_{n+1} / log(c_1...c_n) <= b + eps - 1 wherever the recursion rules
    rf = geom2()
    for eps in (0.1, 0.5):
        c = build_c_sequence(rf, WeightVector.of(1.0, 1.0), 2.0, eps, 60)
        logs = c.log_values()
        acc = mpf(0)
        for j in range(len(logs) - 1):
            acc += logs[j]
            if j + 2 >= 3:  # indices governed by the min-recursion (>= m+2)
                if acc > 0:
                    ratio = logs[j + 1] / acc
                    assert float(ratio) <= (2.0 + eps - 1) + 1e-12


def test_c_sequence_witnesses():
    rf = geom2()
    c = build_c_sequence(rf, WeightVector.of(1.0, 1.0), 2.0, 0.5, 8)
    w = find_growth_witnesses(c, rf, WeightVector.of(1.0, 1.0))
    # gamma_4 + gamma_5 = 16 = phi(4) and gamma_5 + gamma_6 = 32 = phi(5)
    assert 4 in w and 5 in w


def test_c_sequence_rejects_bad_weights():
    rf = geom2()
    with pytest.raises(PreconditionError):
        build_c_sequence(rf, WeightVector.of(2.0, 1.0), 2.0, 0.5, 10)
    with pytest.raises(PreconditionError):
        build_c_sequence(rf, WeightVector.of(0.0, 1.0), 2.0, 0.5, 10)


def test_c_sequence_nonnegative_for_presets():
    for rf, b in ((geom2(), 2.0), (RateFunction.geometric(3.0, 80), 3.0)):
        for eps in (0.1, 0.5):
            c = build_c_sequence(rf, WeightVector.of(1.0, 2.0), b, eps, 60)
            assert all(v >= 0 for v in c.log_values())


# --- alpha sequence ---------------------------------------------------------------


def test_alpha_geometric_blocks():
    rf = geom2()
    alpha = build_alpha_sequence(rf, 12)
    ints = alpha.provenance["alpha_integers"]
    assert ints[:6] == (2, 2, 2, 3, 3, 4)
    assert all(a >= 2 for a in ints)
    assert all(a <= b for a, b in zip(ints, ints[1:]))


def test_alpha_weighted_ratio_vanishes():
    rf = geom2()
    alpha = build_alpha_sequence(rf, 60)
    w = WeightVector.of(1.0, 1.0)
    rep = membership_ratios(
        DigitSequence.logspace(alpha.entries), rf, w
    )
    assert rep.ratios[40] < 1e-6
    assert rep.ratios[-1] < rep.ratios[0]


# --- limsup plan ---------------------------------------------------------------


def test_limsup_plan_sandwich_and_small_values():
    rf = geom2()
    w = WeightVector.of(1.0, 1.0)
    c = build_c_sequence(rf, w, 2.0, 0.5, 8)
    alpha = build_alpha_sequence(rf, 8)
    plan = limsup_digit_plan(c, alpha)
    # s_1 = c_1 + alpha_1 = 1 + 2 = 3 exactly
    assert plan.representative_digit(1) == 3
    # s_4 = e^6 + 3, so log s_4 lies in [6, 6 + 2 log 3]
    l4 = float(plan.lower_logs()[3])
    assert 6.0 - 1e-9 <= l4 <= 6.0 + 2 * math.log(3) + 1e-9
    # s_n tends to infinity across the horizon
    logs = plan.lower_logs()
    assert logs[-1] > logs[0]


def test_limsup_plan_length_mismatch():
    rf = geom2()
    w = WeightVector.of(1.0, 1.0)
    c = build_c_sequence(rf, w, 2.0, 0.5, 8)
    alpha = build_alpha_sequence(rf, 7)
    with pytest.raises(PreconditionError):
        limsup_digit_plan(c, alpha)


# --- membership ratios ------------------------------------------------------------


def test_ratios_liminf_plan_approach_one():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.1, 30)
    plan = liminf_digit_plan(L, compute_Z(L, WeightVector.of(1.0), rf).Z)
    rep = membership_ratios(plan, rf, WeightVector.of(1.0))
    assert abs(rep.ratios[19] - 1.0) <= 0.05
    assert abs(rep.liminf_estimate - 1.0) <= 0.05


def test_ratios_on_c_sequence_peak_at_one():
    # Feeding the recursion output itself (log-space digits): the weighted
    # window ratio equals 1 exactly at the indices driven by phi.
    rf = geom2()
    w = WeightVector.of(1.0, 1.0)
    c = build_c_sequence(rf, w, 2.0, 0.5, 8)
    rep = membership_ratios(DigitSequence.logspace(c.entries), rf, w)
    assert max(rep.ratios[:6]) == pytest.approx(1.0, abs=1e-12)
    assert rep.ratios[3] == pytest.approx(1.0, abs=1e-12)
    assert rep.ratios[4] == pytest.approx(1.0, abs=1e-12)


def test_ratios_identity_digits():
    # a_n = e^phi(n) with a single unit weight gives r_n = 1 identically.
    rf = geom2()
    logs = [rf.phi(n) for n in range(1, 12)]
    rep = membership_ratios(DigitSequence.logspace(logs), rf, WeightVector.of(1.0))
    assert all(r == pytest.approx(1.0, abs=1e-15) for r in rep.ratios)


def test_ratios_plan_consistency_band():
    # Any in-range digit choice moves r_n by at most (m+1) t_max log2 / phi(n).
    rf = geom2()
    w = WeightVector.of(1.0, 1.0)
    L = build_L_sequence(rf, 2.0, 0.1, 20)
    plan = liminf_digit_plan(L, compute_Z(L, w, rf).Z)
    base = membership_ratios(plan, rf, w)
    bumped = DigitSequence.logspace([lv + mp.log(2) * 0.999 for lv in plan.lower_logs()])
    moved = membership_ratios(bumped, rf, w)
    for n, (r0, r1) in enumerate(zip(base.ratios, moved.ratios), start=1):
        bound = (w.m + 1) * w.t_max * math.log(2) / float(rf.phi(n)) + 1e-12
        assert abs(r1 - r0) <= bound


def test_suffix_traces_monotone():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.1, 25)
    plan = liminf_digit_plan(L, 1.0)
    rep = membership_ratios(plan, rf, WeightVector.of(1.0))
    for a, b in zip(rep.suffix_max, rep.suffix_max[1:]):
        assert a >= b - 1e-15
    for a, b in zip(rep.suffix_min, rep.suffix_min[1:]):
        assert a <= b + 1e-15


# --- serialization ------------------------------------------------------------------


def test_log_sequence_round_trip():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 12)
    lines = L.to_lines()
    back = LogSequence.from_lines(lines)
    for a, b in zip(L.log_values(), back.log_values()):
        assert abs(a - b) <= abs(a) * mpf(10) ** -17


def test_digit_plan_round_trip():
    rf = geom2()
    L = build_L_sequence(rf, 2.0, 0.5, 12)
    plan = liminf_digit_plan(L, 1.0)
    back = DigitPlan.from_lines(plan.to_lines())
    assert len(back) == len(plan)
    for a, b in zip(plan.lower_logs(), back.lower_logs()):
        assert abs(a - b) <= max(1, abs(a)) * mpf(10) ** -17
