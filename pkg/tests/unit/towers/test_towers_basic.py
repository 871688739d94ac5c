from fractions import Fraction

import pytest

from odolab.core.adic import AdicRational, ClopenSet
from odolab.core.concentration import sample_uniform_perm
from odolab.core.element import Element, identity, index, metric, odometer
from odolab.core.errors import (
    DisjointnessError,
    EmptySetError,
    OverlapError,
    RangeError,
    SizeMismatchError,
)
from odolab.core.permutation import Permutation, perm_metric
from odolab.core.towers import (
    basic_3cycle,
    boost_return_time,
    conj_distortion,
    distortion_ratio,
    enumerate_generating_involutions,
    generating_involution,
    induced,
    kac_check,
    max_return_time,
    return_times,
    rho_embed,
    rokhlin_tower,
    zn_distortion,
    zn_embedding,
)

ID = identity(2)


def clopen(level, classes, base=2):
    return ClopenSet.from_classes(base, level, classes)


class TestRokhlinTower:
    @pytest.mark.parametrize(
        "classes, height",
        [([0], 4), ([0, 1], 1), ([0, 2], 2)],
    )
    def test_height(self, classes, height):
        assert rokhlin_tower(clopen(2, classes)).height == height

    def test_full_tower_covers_space(self):
        tower = rokhlin_tower(clopen(2, [0]))
        assert tower.levels == tuple(clopen(2, [i]) for i in range(4))
        assert tower.covered.is_full()

    def test_empty_base(self):
        with pytest.raises(EmptySetError):
            rokhlin_tower(ClopenSet.empty(2))

    def test_to_dict(self):
        data = rokhlin_tower(clopen(2, [0, 2])).to_dict()
        assert data["height"] == 2
        assert data["base_set"] == {"base": 2, "level": 1, "classes": [0]}


class TestRhoEmbed:
    tower = rokhlin_tower(clopen(2, [0]))

    @pytest.mark.parametrize(
        "sigma, cocycle",
        [
            (Permutation.identity(4), (0, 0, 0, 0)),
            (Permutation.transposition(4, 0, 1), (1, -1, 0, 0)),
            (Permutation.from_cycle(4, (0, 1, 2, 3)), (1, 1, 1, -3)),
        ],
    )
    def test_examples(self, sigma, cocycle):
        assert rho_embed(self.tower, sigma) == Element.from_cocycle(2, 2, cocycle)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            rho_embed(self.tower, Permutation.identity(3))

    @pytest.mark.parametrize("seed", range(4))
    def test_homomorphism_and_isometry(self, seed):
        tower = rokhlin_tower(clopen(3, [0]))
        sigma = sample_uniform_perm(8, seed)
        tau = sample_uniform_perm(8, seed + 50)
        rho_s, rho_t = rho_embed(tower, sigma), rho_embed(tower, tau)
        assert rho_embed(tower, sigma * tau) == rho_s * rho_t
        assert index(rho_s) == 0
        assert rho_s.periodicity() == sigma.order()
        assert metric(rho_s, rho_t, "d1") == perm_metric(sigma, tau, "l1")

    def test_partial_tower(self):
        tower = rokhlin_tower(clopen(2, [0, 2]))
        u = rho_embed(tower, Permutation.transposition(2, 0, 1))
        assert u == Element.from_cocycle(2, 1, [1, -1])


class TestInducedTransformation:
    def test_full_set(self):
        times, t_a = induced(ClopenSet.full(2))
        assert t_a == odometer(2)
        assert set(times.values()) == {1}

    @pytest.mark.parametrize(
        "classes, cocycle",
        [([0, 2], (2, 0, 2, 0)), ([0], (4, 0, 0, 0))],
    )
    def test_cocycles(self, classes, cocycle):
        _, t_a = induced(clopen(2, classes))
        assert t_a == Element.from_cocycle(2, 2, cocycle)

    def test_return_times(self):
        assert return_times(clopen(3, [0, 5])) == {0: 5, 5: 3}
        assert max_return_time(clopen(3, [0, 5])) == 5

    @pytest.mark.parametrize(
        "a",
        [clopen(2, [0]), clopen(2, [0, 2]), clopen(3, [0, 5]), clopen(2, [1, 2], base=3)],
    )
    def test_kac(self, a):
        assert kac_check(a) == 1
        _, t_a = induced(a)
        assert index(t_a) == 1

    def test_empty_set(self):
        with pytest.raises(EmptySetError):
            kac_check(ClopenSet.empty(2))


class TestGeneratingInvolution:
    @pytest.mark.parametrize(
        "classes, cocycle",
        [([0], (1, -1, 0, 0)), ([0, 2], (1, -1, 1, -1))],
    )
    def test_examples(self, classes, cocycle):
        assert generating_involution(clopen(2, classes)) == Element.from_cocycle(2, 2, cocycle)

    def test_overlap(self):
        with pytest.raises(OverlapError):
            generating_involution(clopen(2, [0, 1]))

    def test_support_and_norm(self):
        a = clopen(3, [0, 4])
        u = generating_involution(a)
        assert u.is_involution()
        assert u.support() == a | a.translate(1)
        assert metric(ID, u, "d1") == a.measure() * 2

    def test_enumeration(self):
        found = enumerate_generating_involutions(2, 2)
        assert len(found) == 6
        assert found[0] == Element.from_cocycle(2, 1, [1, -1])
        assert len(set(found)) == len(found)

    def test_enumeration_bounded(self):
        with pytest.raises(RangeError):
            enumerate_generating_involutions(2, 5)


class TestBasic3Cycle:
    def test_example(self):
        u = basic_3cycle(clopen(2, [0]), 1, 2)
        assert u == Element.from_cocycle(2, 2, [1, 1, -2, 0])
        assert (u**3).is_identity()

    def test_overlap(self):
        with pytest.raises(DisjointnessError):
            basic_3cycle(clopen(2, [0, 1]), 1, 2)


class TestDistortion:
    def test_full_width(self):
        report = conj_distortion(2, 3, 7)
        assert report.u == Element.from_cocycle(2, 3, [1, -1, 0, 0, 0, 0, 0, 0])
        assert report.v == Element.from_cocycle(2, 3, [-7, 7, 0, 0, 0, 0, 0, 0])
        assert report.ratio == 7
        assert report.linf == 7
        assert metric(ID, report.u, "d1") == Fraction(1, 4)

    @pytest.mark.parametrize("m, width", [(2, 3), (3, 2), (3, 5), (4, 11), (2, 1)])
    def test_ratio_equals_width(self, m, width):
        assert conj_distortion(2, m, width).ratio == width

    def test_base_three(self):
        assert conj_distortion(3, 2, 8).ratio == 8

    def test_identity_conjugator(self):
        u = generating_involution(clopen(2, [0]))
        assert distortion_ratio(u, ID) == 1

    @pytest.mark.parametrize("width", [0, 8])
    def test_width_out_of_range(self, width):
        with pytest.raises(RangeError):
            conj_distortion(2, 3, width)


class TestZnEmbedding:
    def test_rank_one(self):
        (t0,) = zn_embedding(1, clopen(2, [0]))
        assert t0 == Element.from_cocycle(2, 2, [4, -4, 0, 0])
        for m in range(-3, 4):
            assert metric(ID, t0**m, "d1") == 2 * abs(m)

    def test_rank_two_commutes(self):
        t0, t1 = zn_embedding(2, clopen(3, [0]))
        assert t0.support() == clopen(3, [0, 1])
        assert t1.support() == clopen(3, [2, 3])
        assert t0 * t1 == t1 * t0
        assert index(t0) == index(t1) == 0

    def test_not_disjoint(self):
        with pytest.raises(DisjointnessError):
            zn_embedding(2, clopen(2, [0, 2]))

    def test_distortion_constants(self):
        report = zn_distortion(2, clopen(3, [0]), 3)
        assert report.c1 == report.c2 == 2
        assert all(d == 2 * l1 for _, l1, d in report.rows)


class TestBoostReturnTime:
    def test_long_gap(self):
        a = clopen(1, [0])
        b = clopen(3, [1])
        report = boost_return_time(a, b, 3)
        assert report.modified == clopen(3, [0, 1, 4, 6])
        assert report.max_return_time >= 3
        assert report.change == AdicRational(2, 1, 2)
        assert report.change <= report.bound

    def test_needs_tall_tower(self):
        with pytest.raises(DisjointnessError):
            boost_return_time(clopen(1, [0]), clopen(1, [1]), 3)


@pytest.mark.slow
class TestTowersAtScale:
    @pytest.mark.parametrize("base, level", [(2, 4), (3, 2)])
    def test_kac_on_every_clopen_set(self, base, level):
        size = base**level
        for mask in range(1, 1 << size):
            a = clopen(level, [w for w in range(size) if mask >> w & 1], base=base)
            assert kac_check(a) == 1

    @pytest.mark.parametrize("m", range(2, 11))
    def test_conj_distortion_levels(self, m):
        size = 2**m
        for width in sorted({1, size // 2, size - 1}):
            report = conj_distortion(2, m, width)
            assert report.ratio == width
            assert report.linf == width

    @pytest.mark.parametrize("rank, level", [(1, 2), (2, 3)])
    def test_zn_distortion_is_bounded(self, rank, level):
        report = zn_distortion(rank, clopen(level, [0]), 20)
        assert report.c1 > 0
        assert report.c2 / report.c1 <= 4
