"""
Rokhlin towers of the odometer and the elements built from them.

A tower over a clopen base ``A`` stacks ``A, T(A), …, T^{N-1}(A)`` for the
largest ``N`` keeping them pairwise disjoint. Permutations of the ``N`` floors
embed ``S_N`` into the full group, first-return maps to ``A`` give induced
transformations, and small involutions supported near the base witness how
badly conjugation by an induced transformation can stretch the d1 metric.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..utils.env import check_level
from .adic import AdicRational, ClopenSet
from .element import Element, identity, metric
from .errors import DisjointnessError, EmptySetError, OverlapError, RangeError, SizeMismatchError
from .permutation import Permutation

__all__ = [
    "TowerSpec",
    "DistortionReport",
    "ZnDistortionReport",
    "BoostReport",
    "rokhlin_tower",
    "rho_embed",
    "induced",
    "return_times",
    "max_return_time",
    "kac_check",
    "generating_involution",
    "enumerate_generating_involutions",
    "basic_3cycle",
    "distortion_ratio",
    "conj_distortion",
    "zn_embedding",
    "zn_distortion",
    "boost_return_time",
]

logger = logging.getLogger(__name__)


def _require_nonempty(a: ClopenSet, what: str = "base set") -> ClopenSet:
    a = a.normalize()
    if a.is_empty():
        raise EmptySetError(f"{what} must be nonempty")
    return a


def _gaps(a: ClopenSet) -> List[Tuple[int, int]]:
    """``(w, gap to the next residue of a, cyclically)`` at the level of ``a``."""
    size = a.base**a.level
    classes = a.classes
    return [
        (w, (classes[(j + 1) % len(classes)] - w) % size or size)
        for j, w in enumerate(classes)
    ]


# ----------------------------------------------------------------------------
# Towers and symmetric-group embeddings
# ----------------------------------------------------------------------------


class TowerSpec(BaseModel):
    """Rokhlin tower over ``base_set``; ``covered`` is the union of its floors."""

    base_set: ClopenSet
    height: int = Field(..., ge=1)
    levels: Tuple[ClopenSet, ...]
    covered: ClopenSet

    model_config = ConfigDict(frozen=True)

    def to_dict(self) -> Dict[str, object]:
        return {
            "base_set": self.base_set.to_dict(),
            "height": self.height,
            "levels": [s.to_dict() for s in self.levels],
            "covered": self.covered.to_dict(),
        }


def rokhlin_tower(a: ClopenSet) -> TowerSpec:
    """Tallest tower over ``a``; its height is the least cyclic gap of ``a``."""
    a = _require_nonempty(a)
    height = min(gap for _, gap in _gaps(a))
    levels = tuple(a.translate(i) for i in range(height))
    covered = ClopenSet.empty(a.base)
    for floor in levels:
        covered = covered | floor
    return TowerSpec(base_set=a, height=height, levels=levels, covered=covered)


def rho_embed(tower: TowerSpec, sigma: Permutation) -> Element:
    """Move floor ``i`` onto floor ``σ(i)`` by ``T^{σ(i)-i}``, identity off the tower."""
    if sigma.n != tower.height:
        raise SizeMismatchError(
            f"permutation of {sigma.n} points on a tower of height {tower.height}"
        )
    a = tower.base_set
    size = a.base**a.level
    values = [0] * size
    for i, target in enumerate(sigma.images):
        shift = target - i
        if shift:
            for w in a.classes:
                values[(w + i) % size] = shift
    return Element.from_cocycle(a.base, a.level, values)


# ----------------------------------------------------------------------------
# Induced transformations
# ----------------------------------------------------------------------------


def return_times(a: ClopenSet) -> Dict[int, int]:
    """First return time of each class of ``a`` (canonical level) to ``a``."""
    return dict(_gaps(_require_nonempty(a)))


def induced(a: ClopenSet) -> Tuple[Dict[int, int], Element]:
    """Return times to ``a`` and the first-return map ``T_A``."""
    a = _require_nonempty(a)
    times = dict(_gaps(a))
    values = [0] * (a.base**a.level)
    for w, gap in times.items():
        values[w] = gap
    return times, Element._trusted(a.base, a.level, values).normalize()


def max_return_time(a: ClopenSet) -> int:
    return max(return_times(a).values())


def kac_check(a: ClopenSet) -> AdicRational:
    """Integral of the return time over ``a``; exactly one for every nonempty ``a``."""
    times, t_a = induced(a)
    a = a.normalize()
    integral = AdicRational(a.base, sum(times.values()), a.level)
    norm = metric(identity(a.base), t_a, "d1")
    if integral != 1 or norm != 1:
        raise ArithmeticError(
            f"return-time integral {integral} and d1 {norm} over {a} should both be 1"
        )
    return integral


# ----------------------------------------------------------------------------
# Involutions and 3-cycles
# ----------------------------------------------------------------------------


def generating_involution(a: ClopenSet) -> Element:
    """Swap ``a`` and ``T(a)`` by ``T`` and ``T^{-1}``; ``a`` must miss ``T(a)``."""
    a = a.normalize()
    shifted = a.translate(1)
    if not a.isdisjoint(shifted):
        raise OverlapError(f"{a} meets its translate {shifted}")
    level = a.level
    size = a.base**level
    values = [0] * size
    for w in a.classes:
        values[w] = 1
        values[(w + 1) % size] = -1
    return Element._trusted(a.base, level, values).normalize()


def enumerate_generating_involutions(base: int, max_level: int) -> List[Element]:
    """Every involution ``I_A`` with ``A`` nonempty at level ``<= max_level``.

    Sets are enumerated level by level and by their residue bitmask; repeated
    elements are dropped, keeping the first occurrence.
    """
    check_level(max_level)
    if base**max_level > 20:
        raise RangeError(f"too many candidate sets at level {max_level} in base {base}")
    seen = set()
    found: List[Element] = []
    for level in range(max_level + 1):
        size = base**level
        for mask in range(1, 1 << size):
            classes = [w for w in range(size) if mask >> w & 1]
            a = ClopenSet._trusted(base, level, classes)
            if not a.isdisjoint(a.translate(1)):
                continue
            involution = generating_involution(a)
            if involution not in seen:
                seen.add(involution)
                found.append(involution)
    logger.debug("%d generating involutions up to level %d", len(found), max_level)
    return found


def basic_3cycle(b: ClopenSet, a: int, c: int) -> Element:
    """Cycle ``B -> T^a(B) -> T^c(B) -> B`` using ``T^a``, ``T^{c-a}`` and ``T^{-c}``."""
    b = _require_nonempty(b)
    first = b.translate(a)
    second = b.translate(c)
    if not (b.isdisjoint(first) and b.isdisjoint(second) and first.isdisjoint(second)):
        raise DisjointnessError(
            f"{b}, its +{a} and its +{c} translates must be pairwise disjoint"
        )
    size = b.base**b.level
    values = [0] * size
    for w in b.classes:
        values[w] = a
        values[(w + a) % size] = c - a
        values[(w + c) % size] = -c
    return Element.from_cocycle(b.base, b.level, values)


# ----------------------------------------------------------------------------
# Distortion of conjugation
# ----------------------------------------------------------------------------


def distortion_ratio(u: Element, w: Element) -> Fraction:
    """``d1(id, W U W^{-1}) / d1(id, U)`` as an exact fraction."""
    if u.is_identity():
        raise RangeError("distortion of the identity is undefined")
    one = identity(u.base)
    conjugate = w.compose(u).compose(w.inverse())
    return metric(one, conjugate, "d1") / metric(one, u, "d1")  # type: ignore[operator]


class DistortionReport(BaseModel):
    base: int
    m: int
    width: int
    induced_set: ClopenSet
    u: Element
    v: Element
    ratio: Fraction
    linf: int

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def conj_distortion(base: int, m: int, width: int) -> DistortionReport:
    """Stretch the swap of classes 0 and 1 mod ``q^m`` by ``width``.

    The induced set ``{0} ∪ {width+1, …, q^m-1}`` returns from class 0 after
    ``width + 1`` steps, so conjugating the swap by its first-return map turns
    a unit displacement into one of size ``width``. At ``width = q^m - 1`` the
    set is the single class ``{0}``.
    """
    if m < 1:
        raise RangeError(f"level must be >= 1, got {m}")
    check_level(m)
    size = base**m
    if not 1 <= width <= size - 1:
        raise RangeError(f"width must lie in [1, {size - 1}], got {width}")
    a = ClopenSet.from_classes(base, m, [0, *range(width + 1, size)])
    u = generating_involution(ClopenSet.from_classes(base, m, [0]))
    _, t_a = induced(a)
    v = t_a.compose(u).compose(t_a.inverse())
    ratio = distortion_ratio(u, t_a)
    linf = metric(identity(base), v, "linf")
    logger.debug("distortion m=%d width=%d ratio=%s", m, width, ratio)
    return DistortionReport(
        base=base, m=m, width=width, induced_set=a, u=u, v=v, ratio=ratio, linf=linf
    )


# ----------------------------------------------------------------------------
# Quasi-isometric copies of Z^n
# ----------------------------------------------------------------------------


def zn_embedding(n: int, a: ClopenSet) -> List[Element]:
    """``T_i = T_{T^{2i}(A)} ∘ T_{T^{2i+1}(A)}^{-1}`` for ``i < n``.

    The ``2n`` translates of ``a`` must be pairwise disjoint; the ``T_i`` then
    have disjoint supports and commute.
    """
    if n < 1:
        raise RangeError(f"rank must be >= 1, got {n}")
    a = _require_nonempty(a)
    if rokhlin_tower(a).height < 2 * n:
        raise DisjointnessError(f"the first {2 * n} translates of {a} are not disjoint")
    generators = []
    for i in range(n):
        _, even = induced(a.translate(2 * i))
        _, odd = induced(a.translate(2 * i + 1))
        generators.append(even.compose(odd.inverse()))
    return generators


class ZnDistortionReport(BaseModel):
    rows: Tuple[Tuple[Tuple[int, ...], int, AdicRational], ...]
    c1: Fraction
    c2: Fraction

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def zn_distortion(n: int, a: ClopenSet, max_l1: int) -> ZnDistortionReport:
    """Exact ``d1(id, T_1^{m_1} ∘ … ∘ T_n^{m_n})`` for ``1 <= Σ|m_i| <= max_l1``.

    ``c1`` and ``c2`` are the least and greatest ratios of distance to
    ``Σ|m_i|`` over the enumerated exponent vectors.
    """
    if max_l1 < 1:
        raise RangeError(f"max_l1 must be >= 1, got {max_l1}")
    generators = zn_embedding(n, a)
    one = identity(a.base)
    rows = []
    for exponents in itertools.product(range(-max_l1, max_l1 + 1), repeat=n):
        l1 = sum(abs(e) for e in exponents)
        if not 1 <= l1 <= max_l1:
            continue
        word = one
        for g, e in zip(generators, exponents):
            word = word.compose(g.power(e))
        rows.append((tuple(exponents), l1, metric(one, word, "d1")))
    ratios = [Fraction(d.to_fraction()) / l1 for _, l1, d in rows]  # type: ignore[union-attr]
    return ZnDistortionReport(rows=tuple(rows), c1=min(ratios), c2=max(ratios))


# ----------------------------------------------------------------------------
# Unbounded return times
# ----------------------------------------------------------------------------


class BoostReport(BaseModel):
    modified: ClopenSet
    change: AdicRational
    bound: AdicRational
    max_return_time: int

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def boost_return_time(a: ClopenSet, b: ClopenSet, n: int) -> BoostReport:
    """Perturb ``a`` so that some point needs at least ``n`` steps to return.

    With ``B, T(B), …, T^n(B)`` pairwise disjoint, the set
    ``(A ∪ B ∪ T^n(B)) ∖ (T(B) ∪ … ∪ T^{n-1}(B))`` contains ``B`` and
    ``T^n(B)`` but none of the floors in between. It differs from ``A`` by at
    most ``(n + 1)·μ(B)``.
    """
    if n < 1:
        raise RangeError(f"n must be >= 1, got {n}")
    b = _require_nonempty(b, "perturbation set")
    if rokhlin_tower(b).height < n + 1:
        raise DisjointnessError(f"{b} and its first {n} translates are not disjoint")
    modified = a | b | b.translate(n)
    for i in range(1, n):
        modified = modified - b.translate(i)
    change = (a ^ modified).measure()
    bound = b.measure() * (n + 1)
    return BoostReport(
        modified=modified,
        change=change,
        bound=bound,
        max_return_time=max_return_time(modified),
    )
