from fractions import Fraction

import pytest

from odolab.core.adic import AdicRational, ClopenSet, boolean, format_exact, normalize
from odolab.core.errors import BaseMismatchError, InvalidClassError, LevelCapError
from odolab.utils import env


class TestAdicRational:
    def test_canonical_form_strips_base_factors(self):
        x = AdicRational(2, 6, 3)
        assert (x.numerator, x.exponent) == (3, 2)
        assert str(x) == "3/4"

    def test_zero_has_exponent_zero(self):
        assert AdicRational(3, 0, 5).exponent == 0

    def test_arithmetic_is_exact(self):
        a = AdicRational(2, 1, 3)
        b = AdicRational(2, 3, 4)
        assert a + b == AdicRational(2, 5, 4)
        assert b - a == AdicRational(2, 1, 4)
        assert a * b == AdicRational(2, 3, 7)
        assert a + 1 == AdicRational(2, 9, 3)

    def test_division_returns_fraction(self):
        assert AdicRational(2, 1, 1) / AdicRational(2, 3, 2) == Fraction(2, 3)

    def test_mixed_bases_refused(self):
        with pytest.raises(BaseMismatchError):
            AdicRational(2, 1, 1) + AdicRational(3, 1, 1)

    def test_comparisons(self):
        assert AdicRational(2, 1, 1) < AdicRational(2, 3, 2)
        assert AdicRational(2, 4, 2) == 1
        assert AdicRational(3, 1, 1) == Fraction(1, 3)
        assert AdicRational(2, 1, 3) < 1

    @pytest.mark.parametrize(
        "value, expected",
        [
            (AdicRational(2, 1, 0), "1/1"),
            (AdicRational(2, 1, 3), "1/8"),
            (Fraction(2, 6), "1/3"),
            (3, "3/1"),
        ],
    )
    def test_format_exact(self, value, expected):
        assert format_exact(value) == expected

    def test_format_exact_rejects_float(self):
        with pytest.raises(TypeError):
            format_exact(0.5)


class TestClopenSet:
    def test_normalize_coarsens(self):
        s = normalize(2, 2, [0, 2])
        assert (s.level, s.classes) == (1, (0,))

    def test_full_set_normalizes_to_level_zero(self):
        s = normalize(3, 2, range(9))
        assert (s.level, s.classes) == (0, (0,))
        assert s.is_full()

    def test_empty_set(self):
        s = normalize(2, 4, [])
        assert s.is_empty()
        assert s.measure() == 0

    def test_equality_ignores_representation(self):
        assert ClopenSet.from_classes(2, 1, [1]) == ClopenSet(base=2, level=3, classes=(1, 3, 5, 7))

    def test_out_of_range_class_rejected(self):
        with pytest.raises(InvalidClassError):
            ClopenSet(base=2, level=2, classes=(4,))

    def test_level_above_cap_rejected(self):
        env.set_level_cap(3)
        with pytest.raises(LevelCapError):
            ClopenSet(base=2, level=4, classes=(0,))

    def test_measure_is_exact(self):
        s = ClopenSet.from_classes(3, 2, [0, 4, 5])
        assert s.measure() == Fraction(3, 9)
        assert str(s.measure()) == "1/3"

    def test_residues_at_lifts_in_order(self):
        s = ClopenSet.from_classes(2, 1, [1])
        assert s.residues_at(3) == (1, 3, 5, 7)

    def test_residues_at_rejects_coarser_level(self):
        s = ClopenSet.from_classes(2, 2, [1])
        with pytest.raises(ValueError):
            s.residues_at(1)

    def test_translate_shifts_residues(self):
        s = ClopenSet.from_classes(2, 2, [3])
        assert s.translate(1) == ClopenSet.from_classes(2, 2, [0])
        assert s.translate(-3) == ClopenSet.from_classes(2, 2, [0])

    def test_contains_any_integer(self):
        s = ClopenSet.from_classes(2, 2, [1])
        assert s.contains(5) and s.contains(-3)
        assert not s.contains(2)


class TestBooleanOps:
    a = ClopenSet.from_classes(2, 1, [0])
    b = ClopenSet.from_classes(2, 2, [0, 1])

    @pytest.mark.parametrize(
        "op, classes",
        [
            ("union", [0, 1, 2]),
            ("intersect", [0]),
            ("difference", [2]),
            ("symdiff", [1, 2]),
        ],
    )
    def test_binary_operations(self, op, classes):
        assert boolean(self.a, self.b, op) == ClopenSet.from_classes(2, 2, classes)

    def test_complement(self):
        assert boolean(self.a, None, "complement") == ClopenSet.from_classes(2, 1, [1])

    def test_operators_match_methods(self):
        assert (self.a | self.b) == self.a.union(self.b)
        assert (self.a & self.b) == self.a.intersect(self.b)
        assert (self.a - self.b) == self.a.difference(self.b)
        assert (self.a ^ self.b) == self.a.symdiff(self.b)

    def test_binary_needs_second_operand(self):
        with pytest.raises(ValueError):
            boolean(self.a, None, "union")

    def test_mixed_bases_refused(self):
        with pytest.raises(BaseMismatchError):
            self.a | ClopenSet.from_classes(3, 1, [0])

    def test_measure_is_additive_on_disjoint_sets(self):
        c = ClopenSet.from_classes(2, 3, [1, 3])
        d = ClopenSet.from_classes(2, 2, [2])
        assert c.isdisjoint(d)
        assert (c | d).measure() == c.measure() + d.measure()
