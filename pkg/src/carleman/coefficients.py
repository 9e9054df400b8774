"""Exact rational oracle for the logarithm-power coefficients and the
root-substitution series, plus the elementary inequalities built on them.

Everything here is exact ``fractions.Fraction`` arithmetic.  The only
irrational constant that enters is e, and it enters exclusively through a
fixed rational enclosure ``E_LO < e < E_UP``; each inequality check picks
the side that can only weaken the claim, so rounding can never promote a
false statement to confirmed.

Notation used throughout (defined here, in one variable x):

* ``c(k, n)``: the coefficient of x^n in (sum_{i>=1} x^i / i)^k, i.e. in the
  k-th power of the Taylor series of -log(1-x).  Equivalently the sum of
  1/(i_1 * ... * i_k) over all compositions i_1 + ... + i_k = n into k
  positive parts.
* ``a_i``: Taylor coefficients at X = x of the root difference
  X^(1/p) - x^(1/p) = sum_{i>=1} a_i x^{-(p i - 1)/p} (X - x)^i, i.e.
  a_i = binom(1/p, i); the signs alternate and
  |a_i| = (p-1)(2p-1)...((i-1)p - 1) / (i! p^i).
* ``b_j``: coefficients of the k-th power (X^(1/p) - x^(1/p))^k / k! =
  sum_{j>=k} b_j x^{-(p j - k)/p} (X - x)^j, so b = (1/k!) * (a-series)^k.

The dense-series convolution is the module's hot path: schoolbook O(n^2)
products over big rationals, truncated at n_max everywhere.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from mpmath import mp

from .errors import EnumerationCapError
from .intervals import working_precision
from .outcomes import (
    CheckReport,
    EvidenceRow,
    Outcome,
    Reason,
    Verdict,
    aggregate_rows,
)

#: default cap for the brute-force composition enumeration (count 2^(n-1))
ENUMERATION_CAP = 18

_RENDER_BITS = 192


def _e_enclosure(terms: int = 45) -> tuple[Fraction, Fraction]:
    # partial sum of sum 1/j! plus the geometric tail bound
    #   sum_{j>N} 1/j! <= (1/(N+1)!) * (N+2)/(N+1),
    # since consecutive term ratios are <= 1/(N+2).
    lo = sum(Fraction(1, factorial(j)) for j in range(terms + 1))
    tail = Fraction(terms + 2, factorial(terms + 1) * (terms + 1))
    return lo, lo + tail


#: rational enclosure of e, accurate to ~56 decimal digits
E_LO, E_UP = _e_enclosure()


@lru_cache(maxsize=4096)
def e_lo_pow(m: int) -> Fraction:
    return E_LO**m


@lru_cache(maxsize=4096)
def e_up_pow(m: int) -> Fraction:
    return E_UP**m


def dec_str(x: Fraction | int, digits: int = 17) -> str:
    """Deterministic decimal rendering of an exact rational."""
    fr = Fraction(x)
    with working_precision(_RENDER_BITS):
        return mp.nstr(mp.mpf(fr.numerator) / mp.mpf(fr.denominator), digits)


def leq_with_e_power(lhs: Fraction, rhs_coeff: Fraction, e_exp: int) -> Outcome:
    """Three-valued ``lhs <= rhs_coeff * e^e_exp`` using the safe enclosure.

    Confirmed via E_LO (understates the right side), refuted via E_UP
    (overstates it); anything between is inconclusive.
    """
    if e_exp < 0:
        raise ValueError("negative e-powers are not needed here")
    if lhs <= rhs_coeff * e_lo_pow(e_exp):
        return Outcome.CONFIRMED
    if lhs > rhs_coeff * e_up_pow(e_exp):
        return Outcome.REFUTED
    return Outcome.INCONCLUSIVE


# ---------------------------------------------------------------------------
# dense truncated series over Fraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesPoly:
    """A dense truncated power series with exact rational coefficients.

    Index i of ``coeffs`` is the coefficient of x^i; the truncation order is
    ``len(coeffs) - 1``.  Products truncate at the same order and are exact
    below it.
    """

    coeffs: tuple[Fraction, ...]

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def mul(self, other: "SeriesPoly") -> "SeriesPoly":
        if self.n_max != other.n_max:
            raise ValueError("series must share a truncation order")
        n = self.n_max
        out = [Fraction(0)] * (n + 1)
        for i, ci in enumerate(self.coeffs):
            if ci == 0:
                continue
            for j in range(0, n - i + 1):
                cj = other.coeffs[j]
                if cj != 0:
                    out[i + j] += ci * cj
        return SeriesPoly(tuple(out))

    def pow_convolve(self, k: int) -> "SeriesPoly":
        """k-th power by iterated convolution (k - 1 products)."""
        if k < 1:
            raise ValueError("power must be >= 1")
        acc = self
        for _ in range(k - 1):
            acc = acc.mul(self)
        return acc

    def pow_squaring(self, k: int) -> "SeriesPoly":
        """k-th power by binary exponentiation; independent route used to
        cross-check :meth:`pow_convolve`."""
        if k < 1:
            raise ValueError("power must be >= 1")
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result.mul(base)
            k >>= 1
            if k:
                base = base.mul(base)
        return result


def log_series(n_max: int) -> SeriesPoly:
    """Taylor series of -log(1-x) truncated at n_max: coefficient i is 1/i."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return SeriesPoly((Fraction(0),) + tuple(Fraction(1, i) for i in range(1, n_max + 1)))


# ---------------------------------------------------------------------------
# log-power coefficients c(k, n)
# ---------------------------------------------------------------------------

_pow_table_cache: dict[tuple[int, int], list[SeriesPoly]] = {}


def log_power_table(k_max: int, n_max: int) -> list[SeriesPoly]:
    """Powers 1..k_max of the log series at order n_max (index 0 unused)."""
    key = (k_max, n_max)
    cached = _pow_table_cache.get(key)
    if cached is not None:
        return cached
    base = log_series(n_max)
    table: list[SeriesPoly] = [None, base]  # type: ignore[list-item]
    for _ in range(2, k_max + 1):
        table.append(table[-1].mul(base))
    _pow_table_cache[key] = table
    return table


def ckn(k: int, n: int) -> Fraction:
    """c(k, n): coefficient of x^n in the k-th power of the log series.

    Zero for n < k (every composition part is >= 1); c(1, n) = 1/n.
    """
    if k < 1:
        raise ValueError("k must be >= 1 (k = 0 powers are excluded)")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n < k:
        return Fraction(0)
    return log_power_table(k, n)[k][n]


def ckn_bruteforce(k: int, n: int, cap: int = ENUMERATION_CAP) -> Fraction:
    """Independent oracle for c(k, n): explicit sum over the compositions of
    n into k positive parts.  Refuses n beyond the enumeration cap."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cap:
        raise EnumerationCapError(f"composition enumeration capped at n = {cap}")
    if n < k:
        return Fraction(0)
    total = Fraction(0)
    # compositions of n into k positive parts <-> k-1 cut points in 1..n-1
    for cuts in itertools.combinations(range(1, n), k - 1):
        parts = [b - a for a, b in zip((0,) + cuts, cuts + (n,))]
        prod = 1
        for part in parts:
            prod *= part
        total += Fraction(1, prod)
    return total


def verify_ckn_bound(k_max: int, n_max: int) -> CheckReport:
    """Sweep the coefficient estimate c(k, n) <= (2e)^n * k! / n^k over the
    grid 1 <= k <= k_max, 1 <= n <= n_max, together with the intermediate
    Cauchy estimate |c(k, n)| <= 2^n from the same argument."""
    table = log_power_table(k_max, n_max)
    rows: list[EvidenceRow] = []
    for k in range(1, k_max + 1):
        kfact = factorial(k)
        for n in range(1, n_max + 1):
            c = table[k][n] if n >= k else Fraction(0)
            coeff = Fraction(2**n * kfact, n**k)
            lemma = leq_with_e_power(c, coeff, n)
            cauchy = (
                Outcome.CONFIRMED if c <= 2**n else Outcome.REFUTED
            )
            outcome = lemma if cauchy is Outcome.CONFIRMED else Outcome.REFUTED
            note = "" if outcome is Outcome.CONFIRMED else "cauchy" if cauchy is Outcome.REFUTED else "lemma"
            rows.append(
                EvidenceRow(
                    index=(k, n),
                    quantity="c(k,n) vs (2e)^n k!/n^k",
                    lo=dec_str(c),
                    hi=dec_str(coeff * e_lo_pow(n)),
                    outcome=outcome,
                    note=note,
                    extra=(
                        ("c_num", str(c.numerator)),
                        ("c_den", str(c.denominator)),
                    ),
                )
            )
    return aggregate_rows(
        "ckn-bound",
        "c(k,n) <= (2e)^n k!/n^k and c(k,n) <= 2^n on the grid",
        rows,
        params=(("k_max", str(k_max)), ("n_max", str(n_max))),
    )


# ---------------------------------------------------------------------------
# root-substitution series a_i, b_j and the diagonal derivatives
# ---------------------------------------------------------------------------


def root_series_magnitudes(p: int, i_max: int) -> list[Fraction]:
    """|a_i| for i = 0..i_max (index 0 is 0; |a_1| = 1/p).

    Each magnitude is checked against |a_i| <= (i-1)!/i! = 1/i, which holds
    because every factor (j p - 1) < j p.
    """
    if p < 2:
        raise ValueError("p must be an integer >= 2")
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    mags = [Fraction(0), Fraction(1, p)]
    for i in range(2, i_max + 1):
        mags.append(mags[-1] * Fraction((i - 1) * p - 1, i * p))
    for i in range(1, i_max + 1):
        if mags[i] * i > 1:
            raise ArithmeticError(f"|a_{i}| exceeded 1/{i}; oracle is broken")
    return mags


def root_series_signed(p: int, i_max: int) -> SeriesPoly:
    """Signed a-series as a truncated polynomial: a_i = (-1)^(i-1) |a_i|."""
    mags = root_series_magnitudes(p, i_max)
    signed = [Fraction(0)] * (i_max + 1)
    for i in range(1, i_max + 1):
        signed[i] = mags[i] if i % 2 == 1 else -mags[i]
    return SeriesPoly(tuple(signed))


def root_power_series(p: int, k: int, n_max: int) -> list[Fraction]:
    """Signed b_j for j = 0..n_max: b = (1/k!) * (signed a-series)^k.

    b_j = 0 for j < k, and b_j = a_j when k = 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    a = root_series_signed(p, n_max)
    bk = a.pow_convolve(k)
    inv_kfact = Fraction(1, factorial(k))
    return [c * inv_kfact for c in bk.coeffs]


def verify_root_series_bounds(p: int, k: int, n_max: int) -> CheckReport:
    """Check |b_n| <= c(k, n)/k! exactly and |b_n| <= (2e)^n / n^k safely."""
    b = root_power_series(p, k, n_max)
    kfact = factorial(k)
    rows: list[EvidenceRow] = []
    for n in range(1, n_max + 1):
        mag = abs(b[n])
        exact_ok = mag <= ckn(k, n) / kfact
        e_out = leq_with_e_power(mag, Fraction(2**n, n**k), n)
        if exact_ok and e_out is Outcome.CONFIRMED:
            outcome = Outcome.CONFIRMED
        elif not exact_ok:
            outcome = Outcome.REFUTED
        else:
            outcome = e_out
        rows.append(
            EvidenceRow(
                index=(k, n),
                quantity="|b_n| vs c(k,n)/k! and (2e)^n/n^k",
                lo=dec_str(mag),
                hi=dec_str(Fraction(2**n, n**k) * e_lo_pow(n)),
                outcome=outcome,
            )
        )
    return aggregate_rows(
        "root-series-bound",
        "|b_n| <= c(k,n)/k! <= (2e)^n/n^k",
        rows,
        params=(("p", str(p)), ("k", str(k)), ("n_max", str(n_max))),
    )


def _int_nth_root(m: int, p: int) -> int:
    """Floor of the p-th root of a nonnegative integer (exact Newton)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m in (0, 1) or p == 1:
        return m
    x = 1 << ((m.bit_length() + p - 1) // p + 1)
    while True:
        y = ((p - 1) * x + m // x ** (p - 1)) // p
        if y >= x:
            return x
        x = y


def exact_pth_root(x: Fraction, p: int) -> Fraction | None:
    """The exact rational q > 0 with q^p = x, or None if there is none."""
    if x <= 0:
        return None
    rn = _int_nth_root(x.numerator, p)
    rd = _int_nth_root(x.denominator, p)
    if rn**p == x.numerator and rd**p == x.denominator:
        return Fraction(rn, rd)
    return None


def diagonal_derivative(p: int, k: int, n: int, x: Fraction) -> Fraction:
    """Signed n-th diagonal derivative of (X^(1/p) - x^(1/p))^k / k! in X at
    X = x: the exact value n! * b_n * x^(-(p n - k)/p).

    ``x`` must be an exact p-th power of a positive rational so the
    fractional power is itself rational; anything else is rejected.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    q = exact_pth_root(x, p)
    if q is None:
        raise ValueError(f"{x} is not an exact p-th power of a positive rational")
    if n < k:
        return Fraction(0)
    b_n = root_power_series(p, k, n)[n]
    return factorial(n) * b_n * q ** (-(p * n - k))


def diagonal_derivative_bound_coeff(p: int, k: int, n: int, x: Fraction, e_side: Fraction) -> Fraction:
    """The rational part of the diagonal-derivative estimate
    (2e)^n * n^(n-k) * x^(-(pn-k)/p), with e replaced by the given enclosure
    side.  Shared by the theorem assembly so the two modules agree
    bit-for-bit on every (p, k, n, x)."""
    q = exact_pth_root(x, p)
    if q is None:
        raise ValueError(f"{x} is not an exact p-th power of a positive rational")
    return (2 * e_side) ** n * Fraction(n) ** (n - k) * q ** (-(p * n - k))


def verify_diagonal_derivative(p: int, k: int, n: int, x: Fraction) -> Verdict:
    """Companion check |alpha_k^(n)(x, x)| <= (2e)^n n^(n-k) x^(-(pn-k)/p)."""
    value = abs(diagonal_derivative(p, k, n, x))
    safe = diagonal_derivative_bound_coeff(p, k, n, x, E_LO)
    row = EvidenceRow(
        index=(p, k, n, str(x)),
        quantity="|diag derivative| vs (2e)^n n^(n-k) x^(-(pn-k)/p)",
        lo=dec_str(value),
        hi=dec_str(safe),
    )
    if value <= safe:
        return Verdict(Outcome.CONFIRMED, Reason.INTERVAL_SEPARATION, (row,))
    if value > diagonal_derivative_bound_coeff(p, k, n, x, E_UP):
        witness = dataclasses.replace(row, outcome=Outcome.REFUTED)
        return Verdict(Outcome.REFUTED, Reason.INTERVAL_SEPARATION, (witness,))
    return Verdict(Outcome.INCONCLUSIVE, Reason.PRECISION_EXHAUSTED, (row,))


# ---------------------------------------------------------------------------
# the elementary factorial inequality
# ---------------------------------------------------------------------------


def verify_factorial_inequality(p: int, n: int, k: int) -> Verdict:
    """Three-valued check of 1/(pn-k)! <= e^(pn) / n^(pn-k) for 0 <= k < pn,
    i.e. n^(pn-k) <= e^(pn) * (pn-k)! with exact integers and the safe
    rational side of e."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0 <= k < p * n):
        raise ValueError("k must satisfy 0 <= k < p*n")
    m = p * n - k
    lhs = Fraction(n**m)
    rhs_coeff = Fraction(factorial(m))
    outcome = leq_with_e_power(lhs, rhs_coeff, p * n)
    row = EvidenceRow(
        index=(p, n, k),
        quantity="n^(pn-k) vs e^(pn) (pn-k)!",
        lo=dec_str(lhs),
        hi=dec_str(rhs_coeff * e_lo_pow(p * n)),
        outcome=outcome,
    )
    reason = (
        Reason.INTERVAL_SEPARATION
        if outcome is not Outcome.INCONCLUSIVE
        else Reason.PRECISION_EXHAUSTED
    )
    return Verdict(outcome, reason, (row,))


def verify_factorial_inequality_sweep(p: int, n_max: int) -> CheckReport:
    """All (n, k) with 1 <= n <= n_max, 0 <= k < pn."""
    rows: list[EvidenceRow] = []
    for n in range(1, n_max + 1):
        for k in range(0, p * n):
            v = verify_factorial_inequality(p, n, k)
            rows.append(v.evidence[0])
    return aggregate_rows(
        "factorial-inequality",
        "n^(pn-k) <= e^(pn) (pn-k)! for all 0 <= k < pn",
        rows,
        params=(("p", str(p)), ("n_max", str(n_max))),
    )


def verify_root_series_magnitude_bound(p: int, i_max: int) -> CheckReport:
    """Report |a_i| <= 1/i exactly for i = 1..i_max."""
    mags = root_series_magnitudes(p, i_max)
    rows = [
        EvidenceRow(
            index=(p, i),
            quantity="|a_i| vs 1/i",
            lo=dec_str(mags[i]),
            hi=dec_str(Fraction(1, i)),
            outcome=Outcome.CONFIRMED if mags[i] * i <= 1 else Outcome.REFUTED,
        )
        for i in range(1, i_max + 1)
    ]
    return aggregate_rows(
        "root-series-magnitude",
        "|a_i| <= 1/i",
        rows,
        params=(("p", str(p)), ("i_max", str(i_max))),
        reason_confirmed=Reason.SYMBOLIC_COMPARISON,
    )
