"""
Elements of the topological full group of the q-adic odometer.

An element is stored as a level-``k`` cocycle: on the cylinder of a residue
``w`` modulo ``q^k`` it acts as ``x -> x + n_w``. The odometer itself is the
level-0 cocycle ``(1,)``. Because the odometer acts freely, every metric on
the group reduces to exact arithmetic on the cocycle values.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from typing import Any, Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import entropy as _shannon_entropy

from ..utils.env import check_level
from .adic import AdicRational, ClopenSet
from .errors import (
    BaseMismatchError,
    DisjointnessError,
    NotBijectiveError,
    NotInvariantError,
    NotPeriodicError,
    RangeError,
)

__all__ = [
    "Element",
    "Cycle",
    "MetricKind",
    "identity",
    "odometer",
    "compose",
    "inverse",
    "power",
    "index",
    "support",
    "periodicity",
    "metric",
    "cocycle_entropy",
    "patchwork",
    "random_element",
    "random_periodic_element",
]

logger = logging.getLogger(__name__)

MetricKind = Literal["d1", "du", "linf", "dp"]

# (residues in cycle order starting at the least one, cocycle sum)
Cycle = Tuple[Tuple[int, ...], int]


class Element(BaseModel):
    """Topological-full-group element given by a level-``k`` cocycle.

    Elements built through :meth:`from_cocycle` and every group operation are
    canonical (minimal level). :meth:`refine` deliberately produces a
    non-canonical representative; equality and hashing always compare
    canonical forms.
    """

    base: int = Field(..., ge=2, description="Odometer base q")
    level: int = Field(..., ge=0, description="Cocycle level k")
    cocycle: Tuple[int, ...] = Field(..., description="n_w for w in [0, q^k)")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_bijective(self) -> "Element":
        check_level(self.level)
        size = self.base**self.level
        if len(self.cocycle) != size:
            raise ValueError(
                f"level {self.level} needs {size} cocycle values, got {len(self.cocycle)}"
            )
        seen: Dict[int, int] = {}
        for w, n in enumerate(self.cocycle):
            target = (w + n) % size
            if target in seen:
                colliding = [v for v in range(size) if (v + self.cocycle[v]) % size == target]
                raise NotBijectiveError(colliding, target)
            seen[target] = w
        assert sum(self.cocycle) % size == 0, "cocycle sum must vanish mod q^k"
        return self

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_cocycle(cls, base: int, level: int, values: Iterable[int]) -> "Element":
        """Validate a cocycle given on every residue and return it canonical."""
        return cls(base=base, level=level, cocycle=tuple(values)).normalize()

    @classmethod
    def _trusted(cls, base: int, level: int, values: Iterable[int]) -> "Element":
        return cls.model_construct(base=base, level=level, cocycle=tuple(values))

    @classmethod
    def from_json(cls, text: str) -> "Element":
        return cls.model_validate(json.loads(text)).normalize()

    # -- representation ---------------------------------------------------

    @property
    def size(self) -> int:
        return self.base**self.level

    def values_at(self, level: int) -> Tuple[int, ...]:
        """Cocycle values over residues mod ``q^level`` (``level >= self.level``)."""
        if level < self.level:
            raise ValueError(f"cannot refine level {self.level} down to {level}")
        check_level(level)
        return self.cocycle * (self.base ** (level - self.level))

    def refine(self, level: int) -> "Element":
        """The same transformation written at ``level``; not canonical."""
        return Element._trusted(self.base, level, self.values_at(level))

    def normalize(self) -> "Element":
        level, values = self.level, self.cocycle
        while level > 0:
            coarse = self.base ** (level - 1)
            head = values[:coarse]
            if head * self.base != values:
                break
            values, level = head, level - 1
        if level == self.level:
            return self
        return Element._trusted(self.base, level, values)

    def is_canonical(self) -> bool:
        return self.normalize().level == self.level

    def targets(self) -> List[int]:
        """The residue permutation ``w -> (w + n_w) mod q^k``."""
        size = self.size
        return [(w + n) % size for w, n in enumerate(self.cocycle)]

    def evaluate(self, x: int) -> int:
        """Apply the element to an integer read as a q-adic integer."""
        return x + self.cocycle[x % self.size]

    # -- group structure --------------------------------------------------

    def _common_level(self, other: "Element") -> int:
        if other.base != self.base:
            raise BaseMismatchError(self.base, other.base)
        return max(self.level, other.level)

    def compose(self, other: "Element") -> "Element":
        """``self ∘ other``: apply ``other`` first."""
        level = self._common_level(other)
        size = self.base**level
        outer = self.values_at(level)
        inner = other.values_at(level)
        values = [n + outer[(w + n) % size] for w, n in enumerate(inner)]
        return Element._trusted(self.base, level, values).normalize()

    def inverse(self) -> "Element":
        size = self.size
        values = [0] * size
        for w, n in enumerate(self.cocycle):
            values[(w + n) % size] = -n
        return Element._trusted(self.base, self.level, values)

    def power(self, exponent: int) -> "Element":
        if exponent < 0:
            return self.inverse().power(-exponent)
        result = identity(self.base)
        square = self
        while exponent:
            if exponent & 1:
                result = result.compose(square)
            exponent >>= 1
            if exponent:
                square = square.compose(square)
        return result

    def __mul__(self, other: "Element") -> "Element":
        if not isinstance(other, Element):
            return NotImplemented
        return self.compose(other)

    def __pow__(self, exponent: int) -> "Element":
        return self.power(exponent)

    def is_identity(self) -> bool:
        return not any(self.cocycle)

    def is_involution(self) -> bool:
        return not self.is_identity() and self.compose(self).is_identity()

    # -- invariants -------------------------------------------------------

    def index(self) -> int:
        """Integral of the cocycle; always an exact integer."""
        total = sum(self.cocycle)
        quotient, remainder = divmod(total, self.size)
        if remainder:
            raise NotBijectiveError([], remainder)
        return quotient

    def support(self) -> ClopenSet:
        moved = [w for w, n in enumerate(self.cocycle) if n]
        return ClopenSet._trusted(self.base, self.level, moved).normalize()

    def cycles(self, include_fixed: bool = False) -> List[Cycle]:
        """σ-cycles with their cocycle sums, ascending by least residue.

        Fixed residues with ``n_w == 0`` are skipped unless ``include_fixed``.
        """
        targets = self.targets()
        seen = [False] * self.size
        found: List[Cycle] = []
        for start in range(self.size):
            if seen[start]:
                continue
            orbit = []
            total = 0
            w = start
            while not seen[w]:
                seen[w] = True
                orbit.append(w)
                total += self.cocycle[w]
                w = targets[w]
            if include_fixed or len(orbit) > 1 or total:
                found.append((tuple(orbit), total))
        return found

    def is_periodic(self) -> bool:
        return all(total == 0 for _, total in self.cycles())

    def periodicity(self) -> int:
        """Order of a periodic element; raises :class:`NotPeriodicError` otherwise."""
        order = 1
        for orbit, total in self.cycles():
            if total:
                raise NotPeriodicError(orbit, total)
            order = order * len(orbit) // math.gcd(order, len(orbit))
        return order

    # -- action on clopen sets --------------------------------------------

    def image(self, s: ClopenSet) -> ClopenSet:
        if s.base != self.base:
            raise BaseMismatchError(self.base, s.base)
        level = max(self.level, s.level)
        size = self.base**level
        values = self.values_at(level)
        moved = sorted((w + values[w]) % size for w in s.residues_at(level))
        return ClopenSet._trusted(self.base, level, moved).normalize()

    def restrict(self, s: ClopenSet) -> "Element":
        """The element on the invariant set ``s``, identity elsewhere."""
        if self.image(s) != s:
            raise NotInvariantError(f"{s} is not invariant under the element")
        level = max(self.level, s.level)
        values = self.values_at(level)
        inside = s.membership(level)
        restricted = [n if inside[w] else 0 for w, n in enumerate(values)]
        return Element._trusted(self.base, level, restricted).normalize()

    # -- identity and I/O --------------------------------------------------

    def _key(self) -> Tuple[int, int, Tuple[int, ...]]:
        canon = self.normalize()
        return canon.base, canon.level, canon.cocycle

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def to_dict(self) -> Dict[str, Any]:
        canon = self.normalize()
        return {"base": canon.base, "level": canon.level, "cocycle": list(canon.cocycle)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __str__(self) -> str:
        canon = self.normalize()
        shown = ",".join(str(n) for n in canon.cocycle[:16])
        if len(canon.cocycle) > 16:
            shown += ",..."
        return f"Element(q={canon.base}, k={canon.level}, ({shown}))"


# ----------------------------------------------------------------------------
# Functional API
# ----------------------------------------------------------------------------


def identity(base: int) -> Element:
    return Element._trusted(base, 0, (0,))


def odometer(base: int, n: int = 1) -> Element:
    """``T^n`` where ``T`` is the +1 map of the q-adic integers."""
    return Element._trusted(base, 0, (n,))


def compose(u: Element, v: Element) -> Element:
    """``u ∘ v`` (apply ``v`` first)."""
    return u.compose(v)


def inverse(u: Element) -> Element:
    return u.inverse()


def power(u: Element, exponent: int) -> Element:
    return u.power(exponent)


def index(u: Element) -> int:
    return u.index()


def support(u: Element) -> ClopenSet:
    return u.support()


def periodicity(u: Element) -> int:
    return u.periodicity()


def metric(
    u: Element,
    v: Element,
    kind: MetricKind = "d1",
    p: Optional[float] = None,
) -> Union[AdicRational, int, float]:
    """Distance between two elements.

    ``d1`` and ``du`` are exact :class:`AdicRational`, ``linf`` an exact int.
    ``dp`` with ``p > 1`` is a float: the terms ``|n_w - m_w|^p / q^k`` are
    evaluated in double precision and summed in ascending order before the
    ``1/p`` root; ``dp`` with ``p == 1`` is ``d1``.
    """
    level = u._common_level(v)
    left = u.values_at(level)
    right = v.values_at(level)
    gaps = [abs(a - b) for a, b in zip(left, right)]
    if kind == "d1":
        return AdicRational(u.base, sum(gaps), level)
    if kind == "du":
        return AdicRational(u.base, sum(1 for g in gaps if g), level)
    if kind == "linf":
        return max(gaps)
    if kind == "dp":
        if p is None or p < 1:
            raise RangeError(f"dp needs p >= 1, got {p}")
        if p == 1:
            return AdicRational(u.base, sum(gaps), level)
        size = u.base**level
        terms = sorted(float(g) ** p / size for g in gaps if g)
        total = 0.0
        for term in terms:
            total += term
        return total ** (1.0 / p)
    raise ValueError(f"unknown metric kind {kind!r}")


def cocycle_entropy(u: Element) -> float:
    """Shannon entropy (natural log) of the law of the cocycle under the measure."""
    counts = Counter(u.normalize().cocycle)
    if len(counts) == 1:
        return 0.0
    return float(_shannon_entropy(list(counts.values())))


def patchwork(base: int, pieces: Sequence[Tuple[Element, ClopenSet]]) -> Element:
    """Glue ``U_i`` restricted to ``S_i`` (pairwise disjoint), identity elsewhere.

    The result is validated, so gluing pieces whose images collide raises
    :class:`NotBijectiveError`.
    """
    level = 0
    for element, region in pieces:
        if element.base != base:
            raise BaseMismatchError(base, element.base)
        if region.base != base:
            raise BaseMismatchError(base, region.base)
        level = max(level, element.level, region.level)
    values = [0] * (base**level)
    claimed = [False] * (base**level)
    for element, region in pieces:
        local = element.values_at(level)
        for w in region.residues_at(level):
            if claimed[w]:
                raise DisjointnessError(f"patchwork regions overlap at residue {w}")
            claimed[w] = True
            values[w] = local[w]
    return Element.from_cocycle(base, level, values)


def random_element(
    base: int,
    level: int,
    seed: Union[int, np.random.Generator, None] = None,
    spread: int = 1,
) -> Element:
    """Seeded random valid element: a random residue permutation lifted by
    random multiples of ``q^k`` in ``[-spread, spread]``."""
    rng = np.random.default_rng(seed)
    size = base**level
    perm = rng.permutation(size)
    lifts = rng.integers(-spread, spread + 1, size=size)
    values = [int(perm[w]) - w + size * int(lifts[w]) for w in range(size)]
    return Element.from_cocycle(base, level, values)


def random_periodic_element(
    base: int,
    level: int,
    seed: Union[int, np.random.Generator, None] = None,
) -> Element:
    """Seeded random periodic element: ``n_w = π(w) - w`` telescopes to zero
    around every cycle of ``π``."""
    rng = np.random.default_rng(seed)
    size = base**level
    perm = rng.permutation(size)
    return Element.from_cocycle(base, level, [int(perm[w]) - w for w in range(size)])
