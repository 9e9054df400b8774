"""Weight-sequence families: enclosure soundness against the exact rational
route, memo discipline, spec document I/O, and the index dilation."""

import json
import threading
from fractions import Fraction
from math import factorial

import pytest
from mpmath import iv

from carleman.errors import IndexRangeError, PrecisionExhaustedError, SpecFormatError
from carleman.intervals import LogReal, iv_endpoints, iv_from_fraction, working_precision
from carleman.sequences import (
    SequenceSpec,
    WeightSequence,
    dump_spec,
    load_spec,
    log_factorial,
    power_substitute,
    spec_from_dict,
    tower_threshold,
)


def encloses_log_fraction(value: LogReal, fr: Fraction, bits: int) -> bool:
    """True when the exact rational log value fr lies inside the interval."""
    with working_precision(bits + 64):
        lo, hi = iv_endpoints(iv_from_fraction(fr))
    return value.log_lo <= lo and hi <= value.log_hi


class TestConstant:
    def test_all_values_exactly_one(self, constant_ws):
        for n in (0, 1, 17, 1000):
            v = constant_ws.log_M(n)
            assert v.is_exact and v.log_lo == 0

    def test_mprime_is_factorial(self, constant_ws):
        with working_precision(constant_ws.bits):
            for n in range(0, 31):
                assert constant_ws.log_Mprime(n).encloses_fraction(
                    Fraction(factorial(n))
                )

    def test_ratio_example(self, constant_ws):
        # m_3 = 4!/3! = 4
        with working_precision(constant_ws.bits):
            assert constant_ws.ratio_m(3).encloses_fraction(Fraction(4))


class TestGevrey:
    def test_m3_is_six(self, gevrey1_ws):
        with working_precision(gevrey1_ws.bits):
            assert gevrey1_ws.log_M(3).encloses_fraction(Fraction(6))

    def test_exact_cross_route_to_30(self, gevrey1_ws):
        with working_precision(gevrey1_ws.bits):
            for n in range(0, 31):
                assert gevrey1_ws.log_M(n).encloses_fraction(Fraction(factorial(n)))

    def test_mprime_example(self, gevrey1_ws):
        # M'_4 = 4! * 4! = 576
        with working_precision(gevrey1_ws.bits):
            assert gevrey1_ws.log_Mprime(4).encloses_fraction(Fraction(576))

    def test_ratio_example(self, gevrey1_ws):
        # m_2 = (3! 3!)/(2! 2!) = 9
        with working_precision(gevrey1_ws.bits):
            assert gevrey1_ws.ratio_m(2).encloses_fraction(Fraction(9))

    def test_rational_exponent_via_power(self):
        # gevrey(1/2): M_n^2 = n! exactly
        ws = WeightSequence(SequenceSpec(family="gevrey", s=Fraction(1, 2)))
        with working_precision(ws.bits):
            for n in range(0, 31):
                squared = ws.log_M(n).pow_int(2)
                assert squared.encloses_fraction(Fraction(factorial(n)))

    def test_gevrey_3_halves(self):
        ws = WeightSequence(SequenceSpec(family="gevrey", s=Fraction(3, 2)))
        with working_precision(ws.bits):
            for n in (2, 7, 19):
                assert ws.log_M(n).pow_int(2).encloses_fraction(
                    Fraction(factorial(n)) ** 3
                )


class TestIteratedLog:
    def test_thresholds(self):
        spec = SequenceSpec(family="iterated_log", k=1)
        with working_precision(spec.bits):
            assert tower_threshold(1) == 3
            assert tower_threshold(2) == 16
            assert tower_threshold(3) == 3814280

    def test_threshold_isolation_failure(self):
        spec = SequenceSpec(family="iterated_log", k=1)
        with working_precision(spec.bits):
            with pytest.raises(PrecisionExhaustedError):
                tower_threshold(4)

    def test_normalization(self):
        for k in (1, 2):
            ws = WeightSequence(SequenceSpec(family="iterated_log", k=k))
            v = ws.log_M(0)
            assert v.is_exact and v.log_lo == 0

    def test_k1_closed_form(self):
        # M_n = (log 3)^(-3) (log(3+n))^(3+n): check n = 2 against a
        # direct high-precision evaluation
        ws = WeightSequence(SequenceSpec(family="iterated_log", k=1))
        v = ws.log_M(2)
        with working_precision(ws.bits + 64):
            ref = iv.log(iv.log(5)) * 5 - iv.log(iv.log(3)) * 3
            lo, hi = iv_endpoints(ref)
        assert v.log_lo <= lo and hi <= v.log_hi

    def test_increasing(self):
        for k in (1, 2):
            ws = WeightSequence(SequenceSpec(family="iterated_log", k=k))
            values = [ws.log_M(n) for n in range(0, 60)]
            for a, b in zip(values, values[1:]):
                assert a.log_hi <= b.log_lo


class TestPaper8:
    def test_normalization_and_growth(self, paper8_ws):
        v0 = paper8_ws.log_M(0)
        assert v0.is_exact and v0.log_lo == 0
        assert paper8_ws.log_M(1).log_lo > 0

    def test_m1_closed_form(self, paper8_ws):
        # M_1 = (log log 4)^4 / (log log 3)^3
        v = paper8_ws.log_M(1)
        with working_precision(paper8_ws.bits + 64):
            ref = iv.log(iv.log(iv.log(4))) * 4 - iv.log(iv.log(iv.log(3))) * 3
            lo, hi = iv_endpoints(ref)
        assert v.log_lo <= lo and hi <= v.log_hi


class TestTable:
    def test_values_and_range(self):
        spec = SequenceSpec(family="table", log_values=("0", "0.5", "1.25"))
        ws = WeightSequence(spec)
        assert ws.log_M(0).is_exact
        assert encloses_log_fraction(ws.log_M(1), Fraction(1, 2), ws.bits)
        assert encloses_log_fraction(ws.log_M(2), Fraction(5, 4), ws.bits)
        with pytest.raises(IndexRangeError):
            ws.log_M(3)

    def test_binary_representable_values_are_exact(self):
        spec = SequenceSpec(family="table", log_values=("0", "0.5"))
        ws = WeightSequence(spec)
        assert ws.log_M(1).is_exact

    def test_invariants_enforced(self):
        with pytest.raises(SpecFormatError):
            SequenceSpec(family="table", log_values=("1", "2"))
        with pytest.raises(SpecFormatError):
            SequenceSpec(family="table", log_values=("0", "2", "1"))
        with pytest.raises(SpecFormatError):
            SequenceSpec(family="table", log_values=())


class TestMemoDiscipline:
    def test_refill_reproduces_identical_interval(self, gevrey1_ws):
        for n in (0, 5, 23):
            memoed = gevrey1_ws.log_M(n)
            fresh = gevrey1_ws.recompute_log_M(n)
            assert memoed.log_lo == fresh.log_lo
            assert memoed.log_hi == fresh.log_hi

    def test_evaluation_order_independent(self, gevrey1_spec):
        ws_up = WeightSequence(gevrey1_spec)
        ws_down = WeightSequence(gevrey1_spec)
        up = [ws_up.log_M(n) for n in range(0, 40)]
        down = [ws_down.log_M(n) for n in reversed(range(0, 40))][::-1]
        for a, b in zip(up, down):
            assert a.log_lo == b.log_lo and a.log_hi == b.log_hi

    def test_concurrent_fills_agree(self, paper8_spec):
        ws = WeightSequence(paper8_spec)
        errors = []

        def worker(start):
            try:
                for n in range(start, 60):
                    ws.log_M(n)
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(s,)) for s in (0, 10, 30)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        fresh = WeightSequence(paper8_spec)
        for n in range(0, 60):
            assert ws.log_M(n).log_lo == fresh.log_M(n).log_lo

    def test_precision_changes_values_deterministically(self):
        a = WeightSequence(SequenceSpec(family="gevrey", s=Fraction(1), precision=40))
        b = WeightSequence(SequenceSpec(family="gevrey", s=Fraction(1), precision=40))
        assert a.log_M(20).log_lo == b.log_M(20).log_lo


class TestIndexRange:
    def test_max_index_enforced(self, gevrey1_spec):
        ws = WeightSequence(gevrey1_spec, max_index=100)
        ws.log_M(100)
        with pytest.raises(IndexRangeError):
            ws.log_M(101)
        with pytest.raises(IndexRangeError):
            ws.log_M(-1)


class TestLogFactorial:
    def test_small_values_exact_route(self):
        spec = SequenceSpec(family="constant")
        with working_precision(spec.bits):
            for n in (0, 1, 2, 10, 100):
                assert log_factorial(n).encloses_fraction(Fraction(factorial(n)))

    def test_seam_consistency(self):
        # incremental route just below the switchover, log-gamma just above:
        # both must enclose the exact factorial
        spec = SequenceSpec(family="constant", precision=30)
        with working_precision(spec.bits):
            for n in (20000, 20001):
                assert log_factorial(n).encloses_fraction(Fraction(factorial(n)))

    def test_large_index_via_loggamma(self):
        spec = SequenceSpec(family="gevrey", s=Fraction(1))
        ws = WeightSequence(spec)
        v = ws.log_M(10**6)
        # Stirling sanity: log(10^6!) ~ 1.28e7, enclosure must be tight
        assert 1.28e7 < float(v.log_lo) < 1.29e7
        assert float(v.log_hi) - float(v.log_lo) < 1e-60


class TestPowerSubstitute:
    def test_requires_p_at_least_two(self, gevrey1_spec):
        with pytest.raises(ValueError):
            power_substitute(gevrey1_spec, 1)

    def test_dilated_values(self, gevrey1_spec):
        tspec, _ = power_substitute(gevrey1_spec, 2)
        ws = WeightSequence(tspec)
        with working_precision(ws.bits):
            for n in range(0, 13):
                assert ws.log_M(n).encloses_fraction(Fraction(factorial(2 * n)))

    def test_mprime_normalization_examples(self, gevrey1_spec):
        _, mprime = power_substitute(gevrey1_spec, 2)
        spec_bits = gevrey1_spec.bits
        v0 = mprime(0)
        assert v0.is_exact and v0.log_lo == 0
        with working_precision(spec_bits):
            # n = 2: (1/2^2) * (4!)^2 = 144
            assert mprime(2).encloses_fraction(Fraction(144))
            # n = 1: 1^0 * (2!)^2 = 4
            assert mprime(1).encloses_fraction(Fraction(4))

    def test_composition_matches_product_transform(self, gevrey1_spec):
        t2, _ = power_substitute(gevrey1_spec, 2)
        t2_then_3, _ = power_substitute(t2, 3)
        t6, _ = power_substitute(gevrey1_spec, 6)
        a, b = WeightSequence(t2_then_3), WeightSequence(t6)
        for n in range(0, 9):
            va, vb = a.log_M(n), b.log_M(n)
            assert va.log_lo == vb.log_lo and va.log_hi == vb.log_hi

    def test_transform_of_constant_stays_one(self, constant_spec):
        tspec, mprime = power_substitute(constant_spec, 3)
        ws = WeightSequence(tspec)
        assert ws.log_M(7).is_exact and ws.log_M(7).log_lo == 0
        with working_precision(ws.bits):
            # M'^(p)_n = n^(-(p-1)n) (pn)!: at n = 2, p = 3: 2^(-4) * 720
            assert mprime(2).encloses_fraction(Fraction(720, 16))


class TestSpecDocuments:
    def test_round_trip(self, paper8_spec):
        doc = json.loads(dump_spec(paper8_spec))
        assert spec_from_dict(doc) == paper8_spec

    def test_round_trip_transformed(self, gevrey1_spec):
        tspec, _ = power_substitute(gevrey1_spec, 2)
        doc = json.loads(dump_spec(tspec))
        assert spec_from_dict(doc) == tspec

    def test_load_from_file(self, tmp_path, gevrey1_spec):
        path = tmp_path / "g.json"
        path.write_text(dump_spec(gevrey1_spec))
        assert load_spec(path) == gevrey1_spec

    def test_malformed_documents(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(SpecFormatError):
            load_spec(bad)
        with pytest.raises(SpecFormatError):
            spec_from_dict({"family": "gevrey", "params": {}})
        with pytest.raises(SpecFormatError):
            spec_from_dict({"family": "unknown", "params": {}})
        with pytest.raises(SpecFormatError):
            spec_from_dict({"family": "constant", "params": {}, "version": 99})
        with pytest.raises(SpecFormatError):
            spec_from_dict({"family": "constant", "params": {}, "precision": "80"})
        with pytest.raises(SpecFormatError):
            spec_from_dict([])

    def test_gevrey_rational_s_from_string(self):
        spec = spec_from_dict({"family": "gevrey", "params": {"s": "3/2"}})
        assert spec.s == Fraction(3, 2)

    def test_labels(self, gevrey1_spec, constant_spec):
        assert gevrey1_spec.label() == "gevrey(s=1)"
        tspec, _ = power_substitute(constant_spec, 2)
        assert tspec.label() == "transformed(constant, p=2)"
