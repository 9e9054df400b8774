"""Bang's extremal trigonometric series with certified truncation.

For a weight sequence whose primed sequence M'_k = k! M_k is log-convex,
the series

    F(t) = sum_{k>=0} M'_k / (2 m_k)^k * cos(2 m_k t),    m_k = M'_{k+1}/M'_k,

is an even smooth function whose derivatives at 0 come within geometric
factors of the M' envelope: |F^(2n)(0)| >= M'_{2n} while
sup |F^(n)| <= 2^(n+1) M'_n.  Everything computable here is a finite head
plus a certified tail interval; the tail bound

    M'_k (2 m_k)^(n-k) <= M'_n 2^(n-k)   for k >= n

follows from the monotone ratios (m_j non-decreasing), which is exactly
log-convexity of M'.  A finite numeric check cannot certify the infinite
tail, so construction requires a family for which ratio monotonicity holds
at every index by an encoded closed-form argument, and additionally
confirms it numerically over the working range.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from mpmath import iv

from .errors import TailUncertifiedError
from .intervals import (
    LinearEnclosure,
    LogReal,
    SignedEnclosure,
    iv_endpoints,
    iv_from_endpoints,
    iv_from_fraction,
    mpf_str,
    sum_values,
    working_precision,
)
from .outcomes import CheckReport, EvidenceRow, Outcome, aggregate_rows
from .sequences import BoundCertificate, SequenceSpec, WeightSequence


def _mprime_logconvex_rule(spec: SequenceSpec) -> str | None:
    """Closed-form reason why M' is log-convex at every index, or None.

    * constant: M'_k = k!, ratios m_k = k+1 strictly increase.
    * gevrey(s): M'_k = (k!)^(1+s), ratios (k+1)^(1+s) strictly increase.
    * iterated_log(k): the underlying tower sequence is log-convex from its
      threshold index on, hence the shifted M is log-convex everywhere, and
      multiplying by the log-convex k! preserves log-convexity.
    """
    if spec.family == "constant":
        return "M'_k = k!: ratios k+1 increase"
    if spec.family == "gevrey":
        return f"M'_k = (k!)^(1+{spec.s}): ratios (k+1)^(1+{spec.s}) increase"
    if spec.family == "iterated_log":
        return "shifted tower sequence is log-convex at every index; times k! stays log-convex"
    return None


class BangSeries:
    """Term cache and certified evaluators for the extremal series of one
    weight sequence.

    Construction rejects sequences without an all-index ratio-monotonicity
    rule (table, dilated, and the measured-only double-log family), and
    re-confirms log-convexity of M' numerically over every range it
    actually touches.
    """

    def __init__(self, ws: WeightSequence, confirm_to: int = 64):
        self.ws = ws
        self.bits = ws.bits
        rule = _mprime_logconvex_rule(ws.spec)
        if rule is None:
            raise TailUncertifiedError(
                f"no all-index log-convexity rule for {ws.spec.label()}; "
                "tail bounds would be uncertified"
            )
        self.rule = rule
        self._confirmed_to = 0
        self._mk: dict[int, LogReal] = {}
        self._ensure_confirmed(max(confirm_to, 2))

    # -- certification ---------------------------------------------------------

    def _ensure_confirmed(self, k: int) -> None:
        """Numerically confirm M'_n^2 <= M'_(n-1) M'_(n+1) for n up to k."""
        if k <= self._confirmed_to:
            return
        for n in range(max(1, self._confirmed_to), k + 1):
            lhs = self.ws.log_Mprime(n).pow_int(2)
            with working_precision(self.bits):
                rhs = self.ws.log_Mprime(n - 1) * self.ws.log_Mprime(n + 1)
            if lhs.leq(rhs) is not Outcome.CONFIRMED:
                raise TailUncertifiedError(
                    f"log-convexity of M' not confirmed at index {n} "
                    f"for {self.ws.spec.label()}"
                )
        self._confirmed_to = k

    def ratio(self, k: int) -> LogReal:
        """m_k = M'_{k+1}/M'_k, cached."""
        hit = self._mk.get(k)
        if hit is None:
            hit = self.ws.ratio_m(k)
            self._mk[k] = hit
        return hit

    def term_magnitude(self, k: int) -> LogReal:
        """Coefficient M'_k / (2 m_k)^k of the k-th cosine term."""
        self._ensure_confirmed(k + 1)
        with working_precision(self.bits):
            two_mk = LogReal.from_int(2) * self.ratio(k)
            return self.ws.log_Mprime(k) / two_mk.pow_int(k)

    def deriv_term(self, k: int, n: int) -> LogReal:
        """Magnitude M'_k (2 m_k)^(n-k) of the k-th term's n-th derivative."""
        self._ensure_confirmed(k + 1)
        with working_precision(self.bits):
            two_mk = LogReal.from_int(2) * self.ratio(k)
            return self.ws.log_Mprime(k) * two_mk.pow_int(n - k)

    # -- derivatives at zero -----------------------------------------------------

    def default_truncation(self, n: int) -> int:
        """Head length: the dominant term sits at k = n and the certified
        tail halves per step, so n + (precision bits) + 2 pushes the tail
        below one unit in the last place of the head."""
        return max(2 * n + 8, n + self.bits + 2)

    def tail_bound(self, n: int, K: int) -> LogReal:
        """Upper bound M'_n 2^(n-K) for sum_{k>K} M'_k (2 m_k)^(n-k)."""
        if K < n:
            raise ValueError("truncation must satisfy K >= n")
        self._ensure_confirmed(K + 1)
        with working_precision(self.bits):
            return self.ws.log_Mprime(n) * LogReal.from_int(2).pow_int(n - K)

    def F_deriv_at_zero(self, n: int, K: int | None = None) -> SignedEnclosure:
        """Signed enclosure of F^(n)(0).

        Odd n vanish exactly (odd cosine derivatives at 0).  Even n = 2j
        carry sign (-1)^j and magnitude sum_k M'_k (2 m_k)^(2j-k), computed
        as a head of K+1 terms plus the certified tail interval.
        """
        if n < 0:
            raise ValueError("n must be >= 0")
        if n % 2 == 1:
            return SignedEnclosure.zero()
        if K is None:
            K = self.default_truncation(n)
        if K < n:
            raise ValueError("truncation must satisfy K >= n")
        self._ensure_confirmed(K + 1)
        with working_precision(self.bits):
            head = [self.deriv_term(k, n) for k in range(0, K + 1)]
            magnitude = sum_values(head, tail_upper=self.tail_bound(n, K))
        sign = 1 if (n // 2) % 2 == 0 else -1
        return SignedEnclosure(sign, magnitude)

    def f_deriv_at_zero(self, n: int, K: int | None = None) -> SignedEnclosure:
        """Signed enclosure of f^(n)(0) for the even factorization
        F(t) = f(t^2): the exact scaling n!/(2n)! of F^(2n)(0)."""
        base = self.F_deriv_at_zero(2 * n, K)
        with working_precision(self.bits):
            return base.scale_fraction(Fraction(factorial(n), factorial(2 * n)))

    # -- report builders ---------------------------------------------------------

    def verify_derivative_lower_bounds(self, n_max: int, K: int | None = None) -> CheckReport:
        """Rows j = 0..n_max: sign of F^(2j)(0) is (-1)^j, magnitude is
        >= M'_{2j} with interval separation, and the factored derivative
        f^(j)(0) is >= j! M'_{2j} / (2j)!."""
        rows = []
        for j in range(0, n_max + 1):
            F2 = self.F_deriv_at_zero(2 * j, K)
            sign_ok = F2.sign == (1 if j % 2 == 0 else -1)
            lower = self.ws.log_Mprime(2 * j)
            mag_ok = F2.magnitude.geq(lower)
            fj = self.f_deriv_at_zero(j, K)
            with working_precision(self.bits):
                f_lower = lower * LogReal.from_fraction(
                    Fraction(factorial(j), factorial(2 * j))
                )
            f_ok = fj.magnitude.geq(f_lower)
            if not sign_ok:
                outcome = Outcome.REFUTED
            elif mag_ok is Outcome.CONFIRMED and f_ok is Outcome.CONFIRMED:
                outcome = Outcome.CONFIRMED
            elif mag_ok is Outcome.REFUTED or f_ok is Outcome.REFUTED:
                outcome = Outcome.REFUTED
            else:
                outcome = Outcome.INCONCLUSIVE
            rows.append(
                EvidenceRow(
                    index=(j,),
                    quantity="|F^(2j)(0)| (log)",
                    lo=mpf_str(F2.magnitude.log_lo),
                    hi=mpf_str(F2.magnitude.log_hi),
                    outcome=outcome,
                    note="" if sign_ok else "sign mismatch",
                    extra=(
                        ("lower_bound_log", mpf_str(lower.log_lo)),
                        ("sign", "+" if F2.sign > 0 else "-"),
                    ),
                )
            )
        return aggregate_rows(
            f"bang-lower-bounds[{self.ws.spec.label()}]",
            "F^(2j)(0) alternates in sign with |F^(2j)(0)| >= M'_{2j} and "
            "|f^(j)(0)| >= j! M'_{2j}/(2j)!",
            rows,
            params=(("n_max", str(n_max)), ("spec", self.ws.spec.label())),
        )

    def verify_membership(self, n_max: int) -> tuple[CheckReport, BoundCertificate]:
        """Certify sup_t |F^(n)(t)| <= 2^(n+1) M'_n for 1 <= n <= n_max.

        The summed majorant sum_k M'_k (2 m_k)^(n-k) obeys the ceiling by a
        split argument: for k <= n each term is <= 2^(n-k) M'_n because
        m_k^(n-k) <= m_k ... m_(n-1) = M'_n / M'_k, and for k > n the tail
        halves per step; the two geometric sums total < 2^(n+1).  The rows
        check the computed enclosure against that derived ceiling.
        """
        rows = []
        for n in range(1, n_max + 1):
            K = self.default_truncation(n)
            self._ensure_confirmed(K + 1)
            with working_precision(self.bits):
                head = [self.deriv_term(k, n) for k in range(0, K + 1)]
                total = sum_values(head, tail_upper=self.tail_bound(n, K))
                ceiling = LogReal.from_int(2).pow_int(n + 1) * self.ws.log_Mprime(n)
            rows.append(
                EvidenceRow(
                    index=(n,),
                    quantity="sum_k M'_k (2 m_k)^(n-k) (log)",
                    lo=mpf_str(total.log_lo),
                    hi=mpf_str(total.log_hi),
                    outcome=total.leq(ceiling),
                    extra=(("ceiling_log", mpf_str(ceiling.log_lo)),),
                )
            )
        report = aggregate_rows(
            f"bang-membership[{self.ws.spec.label()}]",
            "sum_k M'_k (2 m_k)^(n-k) <= 2^(n+1) M'_n on the tested range",
            rows,
            params=(("n_max", str(n_max)), ("spec", self.ws.spec.label())),
        )
        with working_precision(self.bits):
            certificate = BoundCertificate(
                C=LogReal.from_int(2),
                R=LogReal.from_int(2),
                interval_id="R",
                seq=self.ws.spec,
            )
        return report, certificate

    def sharpness_evidence(self, n_max: int, p: int = 2) -> CheckReport:
        """Two-sided sandwich log(|F^(2n)(0)| / M'_{2n}) in [0, (n+2) log 4]
        per n: the factored derivatives realize the index-doubled class up
        to geometric factors.  Evidence only; minimality itself is out of
        scope.  The construction is specific to squaring, so p must be 2."""
        if p != 2:
            raise ValueError("sharpness evidence is defined for the squaring substitution only")
        rows = []
        one = LogReal.one()
        for n in range(0, n_max + 1):
            F2 = self.F_deriv_at_zero(2 * n)
            with working_precision(self.bits):
                ratio = F2.magnitude / self.ws.log_Mprime(2 * n)
                ceiling = LogReal.from_int(4).pow_int(n + 2)
            low_ok = one.leq(ratio)
            high_ok = ratio.leq(ceiling)
            if low_ok is Outcome.CONFIRMED and high_ok is Outcome.CONFIRMED:
                outcome = Outcome.CONFIRMED
            elif low_ok is Outcome.REFUTED or high_ok is Outcome.REFUTED:
                outcome = Outcome.REFUTED
            else:
                outcome = Outcome.INCONCLUSIVE
            rows.append(
                EvidenceRow(
                    index=(n,),
                    quantity="log(|F^(2n)(0)|/M'_{2n})",
                    lo=mpf_str(ratio.log_lo),
                    hi=mpf_str(ratio.log_hi),
                    outcome=outcome,
                    extra=(("ceiling_log", mpf_str(ceiling.log_lo)),),
                )
            )
        return aggregate_rows(
            f"bang-sharpness[{self.ws.spec.label()}]",
            "0 <= log(|F^(2n)(0)|/M'_{2n}) <= (n+2) log 4 on the tested range",
            rows,
            params=(("n_max", str(n_max)), ("p", str(p)), ("spec", self.ws.spec.label())),
        )

    # -- pointwise evaluation ------------------------------------------------------

    def eval_F(self, xi: Fraction, K: int) -> LinearEnclosure:
        """Enclosure of F(xi) for an exact rational xi in [-1, 1]: the K+1
        term head plus the certified tail |sum_{k>K}| <= 2^(-K)
        (term magnitudes obey M'_k / (2 m_k)^k <= 2^(-k))."""
        if K < 1:
            raise ValueError("K must be >= 1")
        xi = Fraction(xi)
        if abs(xi) > 1:
            raise ValueError("xi must lie in [-1, 1]")
        self._ensure_confirmed(K + 1)
        with working_precision(self.bits):
            acc = iv.mpf(0)
            xi_iv = iv_from_fraction(xi)
            for k in range(0, K + 1):
                coeff = self.term_magnitude(k).value_iv()
                angle = 2 * self.ratio(k).value_iv() * xi_iv
                acc = acc + coeff * iv.cos(angle)
            tail = LogReal.from_int(2).pow_int(-K).value_iv()
            _, tail_hi = iv_endpoints(tail)
            acc = acc + iv_from_endpoints(-tail_hi, tail_hi)
            return LinearEnclosure.from_iv(acc)
