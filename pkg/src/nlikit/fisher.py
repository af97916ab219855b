"""Two-sided Fisher's exact test on 2x2 contingency tables.

Point probabilities are hypergeometric, computed in log space with
log-gamma so tables with counts in the hundreds stay exact to floating
precision. The two-sided p-value follows the point-probability
convention: sum the probabilities of all tables with the observed
margins that are no more likely than the observed table.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, lgamma, log1p

from .errors import NlikitError

# Relative slack when comparing point probabilities, so float noise never
# drops a table that ties the observed one exactly.
TIE_RTOL = 1e-7

Table = tuple[tuple[int, int], tuple[int, int]]


class DegenerateMargins(NlikitError):
    """A margin of the 2x2 table is zero; the test is undefined."""


def _ln_choose(n: int, k: int) -> float:
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def fisher_exact_two_sided(table: Table) -> float:
    """Exact two-sided p-value for a 2x2 table of nonnegative counts.

    All margins must be positive. The result is clamped to (0, 1]; it
    always includes the observed table's own probability.
    """
    (a, b), (c, d) = table
    if min(a, b, c, d) < 0:
        raise ValueError(f"negative count in table {table}")
    r1, r2 = a + b, c + d
    c1, c2 = a + c, b + d
    if min(r1, r2, c1, c2) == 0:
        raise DegenerateMargins(f"table {table} has a zero row or column")
    n = r1 + r2

    ln_denom = _ln_choose(n, c1)

    def ln_prob(x: int) -> float:
        return _ln_choose(r1, x) + _ln_choose(r2, c1 - x) - ln_denom

    lo = max(0, c1 - r2)
    hi = min(r1, c1)
    cutoff = ln_prob(a) + log1p(TIE_RTOL)
    p = 0.0
    included = 0
    for x in range(lo, hi + 1):
        lp = ln_prob(x)
        if lp <= cutoff:
            p += exp(lp)
            included += 1
    if included == hi - lo + 1:
        # The observed table is the mode: the whole distribution is in
        # the tail, so the p-value is exactly 1.
        return 1.0
    return min(p, 1.0)


@dataclass(frozen=True)
class FisherResult:
    table: Table
    p_value: float
    alpha: float
    significant: bool


def compare_eras(
    acc_a: tuple[int, int],
    acc_b: tuple[int, int],
    alpha: float = 0.05,
) -> FisherResult:
    """Test whether two (correct, total) accuracy counts differ.

    Builds the correct/incorrect 2x2 table and applies the two-sided
    test; significance is strict (p < alpha).
    """
    (correct_a, total_a), (correct_b, total_b) = acc_a, acc_b
    if total_a <= 0 or total_b <= 0:
        raise ValueError("totals must be positive")
    if not (0 <= correct_a <= total_a and 0 <= correct_b <= total_b):
        raise ValueError("correct counts must lie within totals")
    table: Table = (
        (correct_a, total_a - correct_a),
        (correct_b, total_b - correct_b),
    )
    p = fisher_exact_two_sided(table)
    return FisherResult(table=table, p_value=p, alpha=alpha, significant=p < alpha)
