"""Sequence-level criteria: monotonicity, log-convexity, the quasianalyticity
series, derivation closure, and class inclusion.

Two kinds of evidence feed every verdict here:

* interval rows: per-index enclosures compared under the safe discipline
  (a claim X <= Y is confirmed only when upper(X) <= lower(Y));
* encoded symbolic rules: per-family closed-form term asymptotics routed
  through the classical comparison, p-series, and Cauchy condensation
  tests.  Only these rules can confirm a divergence/convergence or
  boundedness claim; numerical summation alone never does, because the
  criteria are limit statements.
"""

from __future__ import annotations

import dataclasses
from fractions import Fraction

from mpmath import iv

from .intervals import LogReal, mpf_str, working_precision
from .outcomes import (
    CheckReport,
    EvidenceRow,
    Outcome,
    Reason,
    Verdict,
    aggregate_rows,
)
from .sequences import SequenceSpec, WeightSequence


def _row(index, quantity, value: LogReal, outcome=None, note="", extra=()) -> EvidenceRow:
    return EvidenceRow(
        index=index,
        quantity=quantity,
        lo=mpf_str(value.log_lo),
        hi=mpf_str(value.log_hi),
        outcome=outcome,
        note=note,
        extra=extra,
    )


def check_monotone(ws: WeightSequence, n_max: int, n_min: int = 0) -> CheckReport:
    """Per-index check of M_n <= M_{n+1} on [n_min, n_max)."""
    rows = []
    for n in range(n_min, n_max):
        outcome = ws.log_M(n).leq(ws.log_M(n + 1))
        rows.append(_row((n,), "M_n (log)", ws.log_M(n), outcome))
    return aggregate_rows(
        f"monotone[{ws.spec.label()}]",
        "M_n <= M_{n+1} on the tested range",
        rows,
        params=(("n_max", str(n_max)), ("n_min", str(n_min)), ("spec", ws.spec.label())),
    )


def check_log_convex(
    ws: WeightSequence, variant: str, n_max: int, n_min: int = 1
) -> CheckReport:
    """Per-index check of X_n^2 <= X_{n-1} X_{n+1} for X = M or M'.

    Equality (exact families) counts as confirmed; overlapping enclosures
    are inconclusive at that index.
    """
    if variant not in ("M", "Mprime"):
        raise ValueError("variant must be 'M' or 'Mprime'")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    value = ws.log_M if variant == "M" else ws.log_Mprime
    rows = []
    for n in range(max(1, n_min), n_max):
        mid, left, right = value(n), value(n - 1), value(n + 1)
        lhs = mid.pow_int(2)
        with working_precision(ws.bits):
            rhs = left * right
        rows.append(
            _row(
                (n,),
                f"{variant}_n^2 (log) vs {variant}_(n-1)*{variant}_(n+1)",
                lhs,
                lhs.leq(rhs),
                extra=(("rhs_lo", mpf_str(rhs.log_lo)), ("rhs_hi", mpf_str(rhs.log_hi))),
            )
        )
    return aggregate_rows(
        f"log-convex-{variant}[{ws.spec.label()}]",
        f"{variant} is log-convex on the tested range",
        rows,
        params=(
            ("variant", variant),
            ("n_max", str(n_max)),
            ("n_min", str(n_min)),
            ("spec", ws.spec.label()),
        ),
    )


# ---------------------------------------------------------------------------
# quasianalyticity: partial sums + symbolic rule
# ---------------------------------------------------------------------------


def quasianalyticity_rule(spec: SequenceSpec) -> tuple[str, str] | None:
    """Symbolic convergence/divergence of sum M_n / ((n+1) M_{n+1}) for a
    built-in family, else None.

    The term asymptotics below are closed-form per family; each claim is
    settled by the harmonic/p-series comparison or Cauchy condensation.
    """
    base, p = spec.base_chain()
    if base.family == "constant":
        # terms are exactly 1/(n+1) for every p: the harmonic series
        return "divergent", "harmonic comparison: terms equal 1/(n+1)"
    if base.family == "gevrey":
        # terms 1/(n+1)^(1+s) for p = 1; a dilation only shrinks them
        # (extra factor ((pn)!/(pn+p)!)^s <= (pn+1)^(-ps))
        return (
            "convergent",
            f"p-series comparison: terms <= 1/(n+1)^(1+{base.s})",
        )
    if base.family == "iterated_log":
        k = base.k
        if p == 1:
            # terms ~ 1/((n+1) L_k(n)) >= c/(n log n); condensation on the
            # divergent Abel-type series
            return "divergent", "condensation: terms ~ 1/(n * iterated-log_k(n))"
        if k == 1:
            # terms ~ 1/(n (log n)^p) with p >= 2: Bertrand series converges
            return (
                "convergent",
                f"condensation: terms ~ 1/(n (log n)^{p}), exponent {p} > 1",
            )
        # k >= 2: (L_k n)^p grows slower than any power of log n, so the
        # condensed series sum 1/(log m)^p-type still diverges
        return (
            "divergent",
            f"condensation: terms ~ 1/(n (iterated-log_{k} n)^{p}) diverge",
        )
    if base.family == "paper8":
        # double-log base: same regime as iterated_log(k=2) for every p
        return (
            "divergent",
            f"condensation: terms ~ 1/(n (log log n)^{max(p,1)}) diverge",
        )
    return None


def carleman_partial_sums(
    ws: WeightSequence, n_max: int
) -> tuple[list[LogReal], Verdict]:
    """Partial sums S_N = sum_{n=1..N} M_n / ((n+1) M_{n+1}) for N <= n_max,
    with the family's symbolic quasianalyticity verdict.

    The summation starts at n = 1; the constant n = 0 term does not affect
    the criterion.  Without a symbolic rule the verdict is inconclusive and
    carries the empirical trend.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sums: list[LogReal] = []
    with working_precision(ws.bits):
        acc = iv.mpf(0)
        for n in range(1, n_max + 1):
            log_term = (
                ws.log_M(n).log_iv()
                - iv.log(iv.mpf(n + 1))
                - ws.log_M(n + 1).log_iv()
            )
            acc = acc + iv.exp(log_term)
            sums.append(LogReal.from_value_iv(acc))
    rule = quasianalyticity_rule(ws.spec)
    trend = [
        _row((n,), "partial sum S_n (log)", sums[n - 1])
        for n in sorted({1, n_max // 4, n_max // 2, n_max} - {0})
    ]
    if rule is not None:
        claim, note = rule
        evidence = tuple(
            dataclasses.replace(r, note=f"{claim}: {note}") for r in trend
        )
        return sums, Verdict(Outcome.CONFIRMED, Reason.SYMBOLIC_COMPARISON, evidence)
    evidence = tuple(
        dataclasses.replace(r, note="no symbolic rule; empirical trend only")
        for r in trend
    )
    return sums, Verdict(Outcome.INCONCLUSIVE, Reason.DEPTH_EXHAUSTED, evidence)


def quasianalyticity_report(ws: WeightSequence, n_max: int) -> CheckReport:
    """CheckReport wrapper around :func:`carleman_partial_sums`."""
    sums, verdict = carleman_partial_sums(ws, n_max)
    rule = quasianalyticity_rule(ws.spec)
    claim = (
        f"sum M_n/((n+1) M_(n+1)) is {rule[0]}"
        if rule is not None
        else "quasianalyticity undecided (no symbolic rule for this family)"
    )
    rows = tuple(verdict.evidence)
    return CheckReport(
        name=f"quasianalytic[{ws.spec.label()}]",
        claim=claim,
        verdict=verdict,
        params=(("n_max", str(n_max)), ("spec", ws.spec.label())),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# derivation closure: sup (M_{n+1}/M_n)^(1/n)
# ---------------------------------------------------------------------------


def derivation_closed_rule(spec: SequenceSpec) -> str | None:
    """Symbolic boundedness of sup_n (M_{n+1}/M_n)^(1/n), else None.

    For every built-in family the single-step ratio grows at most
    polynomially in n ((n+1)^s for gevrey, ~L_k(n)^(1+o(1)) for the
    iterated-log families), so its n-th root tends to 1 and the sup is
    finite; index dilation raises the ratio to at most a fixed power and
    preserves boundedness.
    """
    base, p = spec.base_chain()
    if base.family == "constant":
        return "ratio is identically 1"
    if base.family == "gevrey":
        return f"ratio (n+1)^{base.s} is polynomial in n; n-th root tends to 1"
    if base.family == "iterated_log":
        return "ratio grows like the iterated logarithm; n-th root tends to 1"
    if base.family == "paper8":
        return "ratio grows like the double logarithm; n-th root tends to 1"
    return None


def check_derivation_closed(ws: WeightSequence, n_max: int) -> CheckReport:
    """Report the running sup enclosure of (M_{n+1}/M_n)^(1/n) together with
    the family's symbolic boundedness verdict (trend only for tables)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows = []
    running: LogReal | None = None
    for n in range(1, n_max + 1):
        with working_precision(ws.bits):
            ratio = ws.log_M(n + 1) / ws.log_M(n)
            root = ratio.pow_fraction(Fraction(1, n))
            running = root if running is None else running.max_with(root)
        rows.append(
            _row(
                (n,),
                "(M_(n+1)/M_n)^(1/n) (log)",
                root,
                extra=(
                    ("sup_lo", mpf_str(running.log_lo)),
                    ("sup_hi", mpf_str(running.log_hi)),
                ),
            )
        )
    rule = derivation_closed_rule(ws.spec)
    if rule is not None:
        verdict = Verdict(Outcome.CONFIRMED, Reason.SYMBOLIC_COMPARISON, (rows[-1],))
        claim = "sup_n (M_(n+1)/M_n)^(1/n) < oo (closed under derivation/division)"
    else:
        verdict = Verdict(Outcome.INCONCLUSIVE, Reason.DEPTH_EXHAUSTED, (rows[-1],))
        claim = "boundedness of sup_n (M_(n+1)/M_n)^(1/n) undecided (trend only)"
    return CheckReport(
        name=f"derivation-closed[{ws.spec.label()}]",
        claim=claim,
        verdict=verdict,
        params=(
            ("n_max", str(n_max)),
            ("spec", ws.spec.label()),
            ("rule", rule or "none"),
        ),
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# inclusion: sup (M_n/N_n)^(1/n)
# ---------------------------------------------------------------------------


def _gevrey_index(spec: SequenceSpec) -> Fraction | None:
    """Gevrey exponent of a non-dilated spec; constant counts as s = 0."""
    if spec.family == "constant":
        return Fraction(0)
    if spec.family == "gevrey":
        return spec.s
    return None


def check_inclusion(wsM: WeightSequence, wsN: WeightSequence, n_max: int) -> CheckReport:
    """Decide the inclusion criterion sup_n (M_n/N_n)^(1/n) < oo.

    Symbolic routes, in order:

    * identical structure: sup = 1;
    * N is an index dilation of M (or a coarser dilation of the same base):
      pointwise M_{an} <= M_{bn} follows from measured monotonicity, so the
      sup enclosure is <= 1;
    * pure gevrey-vs-gevrey (constant = gevrey 0): included when s <= t,
      otherwise the ratio root grows like n^(s-t) by the Stirling lower
      bound n! >= (n/e)^n and the sup is confirmed unbounded.

    Anything else reports the running sup enclosure and stays inconclusive.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    bits = max(wsM.bits, wsN.bits)
    rows = []
    running: LogReal | None = None
    for n in range(1, n_max + 1):
        with working_precision(bits):
            ratio = wsM.log_M(n) / wsN.log_M(n)
            root = ratio.pow_fraction(Fraction(1, n))
            running = root if running is None else running.max_with(root)
        rows.append(
            _row(
                (n,),
                "(M_n/N_n)^(1/n) (log)",
                root,
                extra=(
                    ("sup_lo", mpf_str(running.log_lo)),
                    ("sup_hi", mpf_str(running.log_hi)),
                ),
            )
        )
    params = (
        ("n_max", str(n_max)),
        ("seqM", wsM.spec.label()),
        ("seqN", wsN.spec.label()),
    )

    specM, specN = wsM.spec, wsN.spec
    baseM, pM = specM.base_chain()
    baseN, pN = specN.base_chain()

    if specM.structure_key() == specN.structure_key():
        verdict = Verdict(Outcome.CONFIRMED, Reason.SYMBOLIC_COMPARISON, (rows[-1],))
        return CheckReport(
            name=_inclusion_name(wsM, wsN),
            claim="included: identical sequences (sup = 1)",
            verdict=verdict,
            params=params,
            rows=tuple(rows),
        )

    if baseM.structure_key() == baseN.structure_key() and pN % pM == 0 and pN >= pM:
        monotone = check_monotone(wsM, n_max * (pN // pM))
        if monotone.verdict.outcome is Outcome.CONFIRMED:
            verdict = Verdict(Outcome.CONFIRMED, Reason.SYMBOLIC_COMPARISON, (rows[-1],))
            return CheckReport(
                name=_inclusion_name(wsM, wsN),
                claim="included: N is an index dilation of M and M is "
                "non-decreasing on the range (sup <= 1)",
                verdict=verdict,
                params=params,
                rows=tuple(rows),
            )
        verdict = Verdict(
            monotone.verdict.outcome
            if monotone.verdict.outcome is Outcome.REFUTED
            else Outcome.INCONCLUSIVE,
            Reason.PRECISION_EXHAUSTED,
            monotone.verdict.evidence,
        )
        return CheckReport(
            name=_inclusion_name(wsM, wsN),
            claim="dilation rule prerequisite (monotonicity) not confirmed",
            verdict=verdict,
            params=params,
            rows=tuple(rows),
        )

    sM = _gevrey_index(specM)
    sN = _gevrey_index(specN)
    if sM is not None and sN is not None:
        if sM <= sN:
            verdict = Verdict(Outcome.CONFIRMED, Reason.SYMBOLIC_COMPARISON, (rows[-1],))
            return CheckReport(
                name=_inclusion_name(wsM, wsN),
                claim=f"included: (n!)^({sM}-{sN}) <= 1 pointwise (sup <= 1)",
                verdict=verdict,
                params=params,
                rows=tuple(rows),
            )
        verdict = Verdict(Outcome.CONFIRMED, Reason.SYMBOLIC_COMPARISON, (rows[-1],))
        return CheckReport(
            name=_inclusion_name(wsM, wsN),
            claim=f"not included: sup unbounded, ratio root >= (n/e)^({sM - sN}) "
            "by the Stirling lower bound",
            verdict=verdict,
            params=params,
            rows=tuple(rows),
        )

    verdict = Verdict(Outcome.INCONCLUSIVE, Reason.DEPTH_EXHAUSTED, (rows[-1],))
    return CheckReport(
        name=_inclusion_name(wsM, wsN),
        claim="inclusion undecided (no symbolic rule for this pair)",
        verdict=verdict,
        params=params,
        rows=tuple(rows),
    )


def _inclusion_name(wsM: WeightSequence, wsN: WeightSequence) -> str:
    return f"inclusion[{wsM.spec.label()} vs {wsN.spec.label()}]"
