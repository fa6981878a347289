"""Rank-sum and one-way ANOVA tests, self-contained.

The rank-sum p-value is exact (full permutation distribution via dynamic
programming) for small untied samples and a tie-corrected normal
approximation with continuity correction otherwise. ANOVA p-values come from
the F survival function computed through a hand-rolled regularized incomplete
beta, so external statistics packages stay available as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EXACT_LIMIT = 10  # exact permutation p when min(n, m) <= this and no ties


class StatsError(ValueError):
    pass


# -- special functions -----------------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def f_sf(f_value: float, df_num: float, df_den: float) -> float:
    """Survival function of the F distribution."""
    if f_value <= 0.0:
        return 1.0
    if math.isinf(f_value):
        return 0.0
    x = df_den / (df_den + df_num * f_value)
    return regularized_incomplete_beta(df_den / 2.0, df_num / 2.0, x)


def normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# -- rank-sum --------------------------------------------------------------------


@dataclass(frozen=True)
class RankSumResult:
    statistic: float  # rank sum of the first sample
    p_value: float
    decision: str  # "+", "≈", or "-"
    method: str  # 'exact' or 'asymptotic'


def _midranks(pooled: Sequence[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _exact_tail_counts(k: int, total: int) -> np.ndarray:
    """counts[s] = number of k-subsets of ranks {1..total} with sum s."""
    max_sum = k * total
    dp = np.zeros((k + 1, max_sum + 1), dtype=np.int64)
    dp[0, 0] = 1
    for rank in range(1, total + 1):
        for i in range(min(k, rank), 0, -1):
            dp[i, rank:] += dp[i - 1, : max_sum - rank + 1]
    return dp[k]


def _exact_two_sided_p(w: float, n_x: int, n_y: int) -> float:
    total = n_x + n_y
    # enumerate the smaller side; translate through W_x + W_y = total(total+1)/2
    if n_x <= n_y:
        counts = _exact_tail_counts(n_x, total)
        w_stat = int(round(w))
    else:
        counts = _exact_tail_counts(n_y, total)
        w_stat = total * (total + 1) // 2 - int(round(w))
    denom = counts.sum()
    low = counts[: w_stat + 1].sum() / denom
    high = counts[w_stat:].sum() / denom
    return float(min(1.0, 2.0 * min(low, high)))


def _asymptotic_two_sided_p(u1: float, n_x: int, n_y: int, tie_sizes: list[int]) -> float:
    total = n_x + n_y
    mu = n_x * n_y / 2.0
    tie_term = sum(t**3 - t for t in tie_sizes)
    var = n_x * n_y / 12.0 * ((total + 1) - tie_term / (total * (total - 1)))
    if var <= 0:
        return 1.0
    numerator = u1 - mu
    if numerator > 0:
        numerator -= 0.5
    elif numerator < 0:
        numerator += 0.5
    z = numerator / math.sqrt(var)
    return min(1.0, 2.0 * normal_sf(abs(z)))


def wilcoxon_rank_sum(x: Sequence[float], y: Sequence[float], alpha: float = 0.05) -> RankSumResult:
    """Two-sided rank-sum test with a three-way decision.

    '+' means x is significantly larger (by median) at ``alpha``, '-' the
    reverse, "≈" no significant difference.
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) < 3 or len(y) < 3:
        raise StatsError("rank-sum needs at least 3 observations per sample")
    pooled = x + y
    ranks = _midranks(pooled)
    w_x = sum(ranks[: len(x)])
    tie_sizes = []
    seen: dict[float, int] = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    tie_sizes = [c for c in seen.values() if c > 1]
    has_ties = bool(tie_sizes)

    if not has_ties and min(len(x), len(y)) <= EXACT_LIMIT:
        p = _exact_two_sided_p(w_x, len(x), len(y))
        method = "exact"
    else:
        u1 = w_x - len(x) * (len(x) + 1) / 2.0
        p = _asymptotic_two_sided_p(u1, len(x), len(y), tie_sizes)
        method = "asymptotic"

    decision = "≈"
    if p < alpha:
        diff = _median(x) - _median(y)
        if diff > 0:
            decision = "+"
        elif diff < 0:
            decision = "-"
    return RankSumResult(statistic=w_x, p_value=p, decision=decision, method=method)


def _median(values: Sequence[float]) -> float:
    s = sorted(values)
    mid = len(s) // 2
    if len(s) % 2:
        return s[mid]
    return (s[mid - 1] + s[mid]) / 2.0


# -- ANOVA -----------------------------------------------------------------------


@dataclass(frozen=True)
class AnovaResult:
    f_stat: float
    p_value: float
    different: bool  # at the 0.05 level


def anova_oneway(groups: Sequence[Sequence[float]], alpha: float = 0.05) -> AnovaResult:
    """One-way ANOVA: F = MS_between / MS_within.

    All-constant input (zero variance between and within) is defined as
    F = 0, p = 1; zero within-group variance with real between-group spread
    gives F = inf, p = 0.
    """
    if len(groups) < 2:
        raise StatsError("ANOVA needs at least 2 groups")
    data = [[float(v) for v in grp] for grp in groups]
    if any(len(grp) < 2 for grp in data):
        raise StatsError("every group needs at least 2 values")
    n_total = sum(len(grp) for grp in data)
    grand = sum(sum(grp) for grp in data) / n_total
    ss_between = sum(len(grp) * (sum(grp) / len(grp) - grand) ** 2 for grp in data)
    ss_within = sum(sum((v - sum(grp) / len(grp)) ** 2 for v in grp) for grp in data)
    df_between = len(data) - 1
    df_within = n_total - len(data)
    ms_between = ss_between / df_between
    ms_within = ss_within / df_within
    if ms_within == 0.0 and ms_between == 0.0:
        return AnovaResult(f_stat=0.0, p_value=1.0, different=False)
    if ms_within == 0.0:
        return AnovaResult(f_stat=float("inf"), p_value=0.0, different=True)
    f_value = ms_between / ms_within
    p = f_sf(f_value, df_between, df_within)
    return AnovaResult(f_stat=f_value, p_value=p, different=p < alpha)


# -- ranking ----------------------------------------------------------------------


def average_ranks(per_case_scores: Sequence[dict]) -> dict:
    """Mean rank of each arm across cases, ranking by descending score with
    ties sharing the average rank (rank 1 = best)."""
    if not per_case_scores:
        raise StatsError("no cases to rank")
    arms = sorted(per_case_scores[0])
    totals = {arm: 0.0 for arm in arms}
    for case in per_case_scores:
        scores = [(-case[arm], arm) for arm in arms]
        scores.sort()
        i = 0
        while i < len(scores):
            j = i
            while j + 1 < len(scores) and scores[j + 1][0] == scores[i][0]:
                j += 1
            avg_rank = (i + j) / 2.0 + 1.0
            for t in range(i, j + 1):
                totals[scores[t][1]] += avg_rank
            i = j + 1
    return {arm: totals[arm] / len(per_case_scores) for arm in arms}
