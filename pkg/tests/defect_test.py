"""Unit tests for signature defects and the floating point oracle."""

import math
import random
from fractions import Fraction

import mpmath
import pytest

from django_autbound.defect import (
    DefectValue,
    LocalRep,
    defect_closed,
    defect_direct,
    defect_sl2,
)
from django_autbound.exceptions import NotCoprimeError, PreconditionError


class TestDefectValue:
    def test_thirds(self):
        assert DefectValue(Fraction(2, 3)).value == Fraction(2, 3)
        assert str(DefectValue(Fraction(-2, 3))) == "-2/3"

    def test_not_a_third(self):
        with pytest.raises(PreconditionError):
            DefectValue(Fraction(1, 2))


class TestDefectClosed:
    @pytest.mark.parametrize(
        "p, q, expected",
        [
            (3, 1, Fraction(-2, 3)),
            (2, 1, Fraction(0)),
            (3, -1, Fraction(2, 3)),
            (5, -1, Fraction(4)),
        ],
    )
    def test_values(self, p, q, expected):
        assert defect_closed(p, q).value == expected

    def test_representative_of_q(self):
        for p in range(2, 30):
            for q in range(1, p):
                if math.gcd(q, p) == 1:
                    value = defect_closed(p, q)
                    assert defect_closed(p, q + p) == value
                    assert defect_closed(p, q - 2 * p) == value

    def test_matches_sl2_formula(self):
        for p in range(2, 501):
            assert defect_closed(p, -1) == defect_sl2(p)

    def test_not_coprime(self):
        with pytest.raises(NotCoprimeError):
            defect_closed(4, 2)

    def test_order(self):
        with pytest.raises(PreconditionError):
            defect_closed(1, 0)


class TestDefectSL2:
    def test_values(self):
        assert defect_sl2(2).value == 0
        assert defect_sl2(3).value == Fraction(2, 3)
        assert defect_sl2(4).value == 2
        assert defect_sl2(9).value == Fraction(56, 3)

    def test_order(self):
        with pytest.raises(PreconditionError):
            defect_sl2(1)


class TestLocalRep:
    def test_of_automorphism(self):
        rep = LocalRep.of_automorphism(5, 2)
        assert rep.q == -1
        assert rep.is_sl2()
        assert rep.rotation_numbers() == (2, 3)
        assert rep.defect().value == 4

    def test_not_sl2(self):
        rep = LocalRep(p=5, k=1, q=1)
        assert not rep.is_sl2()
        assert rep.defect() == defect_closed(5, 1)

    def test_not_coprime(self):
        with pytest.raises(NotCoprimeError):
            LocalRep(p=4, k=2, q=1)
        with pytest.raises(NotCoprimeError):
            LocalRep(p=6, k=1, q=3)

    def test_order(self):
        with pytest.raises(PreconditionError):
            LocalRep(p=1, k=1, q=1)


class TestDefectDirect:
    """The floating point sum checks the exact defect."""

    def test_agrees_with_closed_form(self):
        rng = random.Random(500)
        for p in range(2, 501):
            units = [q for q in range(1, p) if math.gcd(q, p) == 1]
            for q in {-1, 1, *rng.choices(units, k=3)}:
                oracle = defect_direct(p, q, 128)
                assert oracle.agrees_with(defect_closed(p, q).value), (p, q)

    def test_error_bound(self):
        oracle = defect_direct(97, 5)
        assert oracle.bits == 128
        assert oracle.error_bound < mpmath.mpf(2) ** -100
        exact = defect_closed(97, 5).value
        with mpmath.workprec(128):
            expected = mpmath.mpf(exact.numerator) / exact.denominator
            difference = abs(oracle.value - expected)
        assert difference <= oracle.error_bound

    def test_disagreement(self):
        oracle = defect_direct(7, 3)
        assert not oracle.agrees_with(defect_closed(7, 3).value + Fraction(1, 3))

    def test_minimum_precision(self):
        with pytest.raises(PreconditionError):
            defect_direct(5, 1, precision=32)

    def test_not_coprime(self):
        with pytest.raises(NotCoprimeError):
            defect_direct(6, 2)
