from fractions import Fraction

import pytest

from odolab.core.adic import ClopenSet
from odolab.core.element import Element, identity, metric, odometer
from odolab.core.errors import DisjointnessError, NotPeriodicError, RangeError
from odolab.core.genlab import (
    ConstructionSchedule,
    assemble,
    assemble_and_recover,
    build_generators,
    check_schedule,
    crt_exponent,
    disjointify,
    evaluate_word,
    format_word,
    greedy_approximate,
    prime_cycle,
    three_cycle_letters,
    word_for_3cycle,
)
from odolab.core.permutation import Permutation
from odolab.core.towers import enumerate_generating_involutions, rho_embed, rokhlin_tower


class TestPrimeCycle:
    @pytest.mark.parametrize(
        "p, level, cocycle",
        [(2, 2, (1, -1, 0, 0)), (3, 2, (1, 1, -2, 0))],
    )
    def test_examples(self, p, level, cocycle):
        assert prime_cycle(p, level) == Element.from_cocycle(2, level, cocycle)

    def test_order_and_support(self):
        u = prime_cycle(5, 4)
        assert u.periodicity() == 5
        assert u.support().measure() == Fraction(5, 16)

    def test_too_long(self):
        with pytest.raises(RangeError):
            prime_cycle(5, 1)


class TestDisjointify:
    def test_two_cycles(self):
        u0, u1 = prime_cycle(2, 2), prime_cycle(3, 4)
        v0, v1 = disjointify([u0, u1])
        assert v0.support() == ClopenSet.from_classes(2, 4, [4, 5, 8, 9, 12, 13])
        assert metric(v0, u0, "d1") == Fraction(1, 8)
        assert v1 == u1

    def test_single_and_disjoint_inputs_unchanged(self):
        u = prime_cycle(3, 3)
        assert disjointify([u]) == [u]
        w = rho_embed(rokhlin_tower(ClopenSet.from_classes(2, 3, [0])), Permutation.transposition(8, 5, 6))
        assert disjointify([u, w]) == [u, w]

    def test_non_periodic_input(self):
        with pytest.raises(NotPeriodicError):
            disjointify([prime_cycle(2, 2), odometer(2)])

    def test_outputs_are_disjoint(self):
        vs = disjointify([prime_cycle(2, 2), prime_cycle(3, 4), prime_cycle(5, 6)])
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                assert vs[i].support().isdisjoint(vs[j].support())

    def test_distance_bound(self):
        us = [prime_cycle(2, 2), prime_cycle(3, 4), prime_cycle(5, 6)]
        for p, u, v in zip((2, 3, 5), us, disjointify(us)):
            removed = (u.support() - v.support()).measure()
            assert metric(u, v, "d1") <= removed * (p - 1)


class TestRecovery:
    def test_two_cycles(self):
        vs = disjointify([prime_cycle(2, 2), prime_cycle(3, 4)])
        table = assemble_and_recover(vs, 0)
        assert [r.exponent for r in table.rows] == [1, 3]
        assert table.rows[-1].residual == 0
        assert table.crt_exponent == 3
        assert table.crt_residual == 0

    def test_single_element(self):
        v = prime_cycle(3, 2)
        table = assemble_and_recover([v], 0)
        assert [(r.m, r.exponent, r.residual) for r in table.rows] == [(1, 1, 0)]
        assert table.crt_exponent == 1
        assert table.crt_residual == 0

    def test_three_cycles_residuals_decrease(self):
        vs = disjointify([prime_cycle(2, 2), prime_cycle(3, 4), prime_cycle(5, 7)])
        table = assemble_and_recover(vs, 0)
        residuals = [r.residual for r in table.rows]
        assert residuals == [Fraction(36, 128), Fraction(12, 128), 0]
        assert all(a > b for a, b in zip(residuals, residuals[1:]))

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_crt_recovers_every_element(self, n):
        vs = disjointify([prime_cycle(2, 2), prime_cycle(3, 4), prime_cycle(5, 7)])
        table = assemble_and_recover(vs, n)
        assert table.crt_residual == 0

    def test_crt_exponent(self):
        assert crt_exponent([2, 3, 5], 0) == 15
        assert crt_exponent([2, 3, 5], 1) == 10
        assert crt_exponent([2, 3, 5], 2) == 6

    def test_assemble_rejects_overlap(self):
        with pytest.raises(DisjointnessError):
            assemble([prime_cycle(2, 2), prime_cycle(3, 4)])

    def test_assemble_is_order_independent(self):
        vs = disjointify([prime_cycle(2, 2), prime_cycle(3, 4)])
        assert assemble(vs) == assemble(list(reversed(vs)))

    def test_build_generators(self):
        report = build_generators([2, 3], [2, 4])
        assert report.distances == (Fraction(1, 8), 0)
        assert report.product == assemble(report.vs)
        data = report.to_dict()
        assert data["distances"] == ["1/8", "0/1"]


class TestCheckSchedule:
    def test_standard_schedule(self):
        report = check_schedule(ConstructionSchedule.standard(3), 3)
        assert [e.index for e in report.passed("inequality_1")] == [0, 1, 2]
        assert report.failed() == []

    def test_levels_too_small(self):
        schedule = ConstructionSchedule(primes=(2, 3, 5), levels=(1, 2, 3))
        report = check_schedule(schedule, 3)
        assert 1 in [e.index for e in report.failed("condition_iii")]

    def test_zero_count(self):
        assert check_schedule(ConstructionSchedule.standard(2), 0).entries == ()

    def test_count_too_large(self):
        with pytest.raises(RangeError):
            check_schedule(ConstructionSchedule.standard(2), 3)

    def test_deltas(self):
        schedule = ConstructionSchedule(
            primes=(2, 3), levels=(4, 8), deltas=("1/4", "1/2")
        )
        report = check_schedule(schedule)
        # 2 * 3/256 < 1/4
        assert [e.status for e in report.entries if e.condition == "condition_ii"] == ["pass", "pass"]

    def test_huge_levels_are_skipped(self):
        report = check_schedule(ConstructionSchedule.standard(4), 4, max_bits=1 << 20)
        skipped = [e for e in report.entries if e.status == "skipped"]
        assert skipped and all(e.condition in ("inequality_1", "condition_iii") for e in skipped)

    def test_mismatched_lengths(self):
        with pytest.raises(ValueError):
            ConstructionSchedule(primes=(2, 3), levels=(4,))


class TestWords:
    @pytest.mark.parametrize("i, n", [(0, 3), (2, 3), (0, 4), (5, 3), (3, 6)])
    def test_word_evaluates_to_3cycle(self, i, n):
        level = 3
        size = 2**level
        word = word_for_3cycle(i, n, size)
        letters = three_cycle_letters(n, level)
        tower = rokhlin_tower(ClopenSet.from_classes(2, level, [0]))
        expected = rho_embed(tower, Permutation.from_cycle(size, (i, i + 1, i + 2)))
        assert evaluate_word(word, letters) == expected
        assert len(word) == 2 * i + 12
        assert len(word) <= 20 * size

    @pytest.mark.parametrize("i, n", [(0, 2), (0, 7), (6, 3), (-1, 3)])
    def test_out_of_range(self, i, n):
        with pytest.raises(RangeError):
            word_for_3cycle(i, n, 8)

    def test_format_word(self):
        assert format_word((("T", 1), ("U", -1))) == "T U^-1"
        assert format_word(()) == "id"


class TestGreedyApproximate:
    generators = enumerate_generating_involutions(2, 2)

    def test_swap_is_reached(self):
        swap = Element.from_cocycle(2, 1, [1, -1])
        result = greedy_approximate(swap, self.generators, 8)
        assert result.residual == 0
        assert result.steps == (("L", 0),)

    def test_identity_needs_no_steps(self):
        result = greedy_approximate(identity(2), self.generators, 8)
        assert result.steps == () and result.residual == 0

    def test_index_obstruction(self):
        result = greedy_approximate(odometer(2), self.generators, 8)
        assert result.index_gap == 1
        assert result.residual >= 1

    def test_residual_never_increases(self):
        target = Element.from_cocycle(2, 2, [1, 1, -2, 0])
        result = greedy_approximate(target, self.generators, 8)
        assert all(a >= b for a, b in zip(result.trace, result.trace[1:]))
        assert result.residual >= result.index_gap

    def test_negative_budget(self):
        with pytest.raises(RangeError):
            greedy_approximate(odometer(2), self.generators, -1)


@pytest.mark.slow
class TestWordsAtScale:
    @pytest.mark.parametrize("level", [4, 6])
    def test_every_position(self, level):
        size = 2**level
        letters = three_cycle_letters(3, level)
        tower = rokhlin_tower(ClopenSet.from_classes(2, level, [0]))
        for i in range(size - 2):
            word = word_for_3cycle(i, 3, size)
            expected = rho_embed(tower, Permutation.from_cycle(size, (i, i + 1, i + 2)))
            assert evaluate_word(word, letters) == expected
            assert len(word) <= 20 * size
