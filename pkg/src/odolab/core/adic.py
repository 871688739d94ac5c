"""
Exact q-adic rationals and the clopen measure algebra of the q-adic odometer.

A clopen subset of the q-adic integers is a finite union of cylinders
``{x : x = w mod q^k}``; it is stored as the sorted residues ``w`` at a level
``k``. Measures of such sets are exactly the numbers ``a / q^k``, which
:class:`AdicRational` represents without rounding.
"""

from __future__ import annotations

import functools
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.env import check_level
from .errors import BaseMismatchError, InvalidClassError

__all__ = [
    "AdicRational",
    "ClopenSet",
    "BooleanOp",
    "normalize",
    "boolean",
    "measure",
    "translate",
    "format_exact",
]

_Number = Union["AdicRational", int]


def _valuation(n: int, q: int, limit: int) -> int:
    """Largest ``v <= limit`` with ``q^v | n`` (``limit`` for ``n == 0``)."""
    if n == 0 or limit == 0:
        return limit
    if q & (q - 1) == 0:
        # q = 2^s: count trailing zero bits
        s = q.bit_length() - 1
        return min(((n & -n).bit_length() - 1) // s, limit)
    v = 0
    while v < limit and n % q == 0:
        n //= q
        v += 1
    return v


@functools.total_ordering
class AdicRational:
    """Exact number ``numerator / base**exponent``.

    Instances are canonical: ``exponent == 0`` or ``numerator`` is not
    divisible by ``base``. Arithmetic never rounds.

    Example:
        >>> AdicRational(2, 6, 3)
        AdicRational(base=2, numerator=3, exponent=2)
        >>> str(AdicRational(2, 6, 3))
        '3/4'
    """

    __slots__ = ("_base", "_numerator", "_exponent")

    def __init__(self, base: int, numerator: int = 0, exponent: int = 0):
        if base < 2:
            raise ValueError(f"base must be >= 2, got {base}")
        if exponent < 0:
            raise ValueError(f"exponent must be >= 0, got {exponent}")
        numerator = int(numerator)
        v = _valuation(numerator, base, exponent)
        if v:
            numerator //= base**v
            exponent -= v
        if numerator == 0:
            exponent = 0
        self._base = base
        self._numerator = numerator
        self._exponent = exponent

    @property
    def base(self) -> int:
        return self._base

    @property
    def numerator(self) -> int:
        return self._numerator

    @property
    def exponent(self) -> int:
        return self._exponent

    @property
    def denominator(self) -> int:
        return self._base**self._exponent

    def to_fraction(self) -> Fraction:
        return Fraction(self._numerator, self.denominator)

    def is_integer(self) -> bool:
        return self._exponent == 0

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def _coerce(self, other: Any) -> "AdicRational":
        if isinstance(other, AdicRational):
            if other._base != self._base:
                raise BaseMismatchError(self._base, other._base)
            return other
        if isinstance(other, int):
            return AdicRational(self._base, other, 0)
        return NotImplemented

    def _aligned(self, other: "AdicRational") -> Tuple[int, int, int]:
        k = max(self._exponent, other._exponent)
        a = self._numerator * self._base ** (k - self._exponent)
        b = other._numerator * self._base ** (k - other._exponent)
        return a, b, k

    def __add__(self, other: Any) -> "AdicRational":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, k = self._aligned(other)
        return AdicRational(self._base, a + b, k)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "AdicRational":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, k = self._aligned(other)
        return AdicRational(self._base, a - b, k)

    def __rsub__(self, other: Any) -> "AdicRational":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> "AdicRational":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return AdicRational(
            self._base,
            self._numerator * other._numerator,
            self._exponent + other._exponent,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> Fraction:
        """Quotients leave the q-adic rationals, so they are returned as ``Fraction``."""
        if isinstance(other, AdicRational):
            return self.to_fraction() / other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() / other
        return NotImplemented

    def __neg__(self) -> "AdicRational":
        return AdicRational(self._base, -self._numerator, self._exponent)

    def __abs__(self) -> "AdicRational":
        return AdicRational(self._base, abs(self._numerator), self._exponent)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __bool__(self) -> bool:
        return self._numerator != 0

    # ------------------------------------------------------------------
    # comparison
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AdicRational):
            if other._base == self._base:
                return (self._numerator, self._exponent) == (
                    other._numerator,
                    other._exponent,
                )
            return self.to_fraction() == other.to_fraction()
        if isinstance(other, int):
            return self._exponent == 0 and self._numerator == other
        if isinstance(other, Fraction):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other: Any) -> bool:
        if isinstance(other, AdicRational) and other._base == self._base:
            a, b, _ = self._aligned(other)
            return a < b
        if isinstance(other, int):
            return self._numerator < other * self.denominator
        if isinstance(other, (AdicRational, Fraction)):
            rhs = other.to_fraction() if isinstance(other, AdicRational) else other
            return self.to_fraction() < rhs
        return NotImplemented

    def __hash__(self) -> int:
        if self._exponent == 0:
            return hash(self._numerator)
        return hash(self.to_fraction())

    def __repr__(self) -> str:
        return (
            f"AdicRational(base={self._base}, numerator={self._numerator}, "
            f"exponent={self._exponent})"
        )

    def __str__(self) -> str:
        return f"{self._numerator}/{self.denominator}"


def format_exact(value: Union[AdicRational, Fraction, int]) -> str:
    """Render an exact number as an ``"a/b"`` string (``"1/1"`` for one)."""
    if isinstance(value, AdicRational):
        return str(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return f"{value}/1"
    raise TypeError(f"not an exact number: {value!r}")


# ----------------------------------------------------------------------------
# Clopen sets
# ----------------------------------------------------------------------------

BooleanOp = Literal["union", "intersect", "difference", "symdiff", "complement"]


def _minimal_level(base: int, level: int, classes: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    """Coarsen ``classes`` while membership only depends on a coarser residue."""
    while level > 0:
        size = base ** (level - 1)
        if len(classes) % base:
            break
        counts: Dict[int, int] = {}
        for w in classes:
            r = w % size
            counts[r] = counts.get(r, 0) + 1
        if any(c != base for c in counts.values()):
            break
        classes = tuple(sorted(counts))
        level -= 1
    return level, classes


class ClopenSet(BaseModel):
    """Finite union of level-``k`` cylinders of the q-adic integers.

    The set may be held at any level; :meth:`normalize` returns the canonical
    minimal-level representative and equality compares canonical forms.

    Example:
        >>> ClopenSet.from_classes(2, 2, [0, 2]).normalize().classes
        (0,)
    """

    base: int = Field(..., ge=2, description="Odometer base q")
    level: int = Field(..., ge=0, description="Cylinder level k")
    classes: Tuple[int, ...] = Field(
        default=(), description="Sorted residues w in [0, q^k)"
    )

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("classes", mode="after")
    @classmethod
    def _sorted_unique(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(sorted(set(value)))

    @model_validator(mode="after")
    def _check_range(self) -> "ClopenSet":
        check_level(self.level)
        size = self.base**self.level
        if self.classes and (self.classes[0] < 0 or self.classes[-1] >= size):
            bad = [w for w in self.classes if not 0 <= w < size]
            raise InvalidClassError(
                f"classes {bad} out of range [0, {size}) at level {self.level}"
            )
        return self

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_classes(cls, base: int, level: int, classes: Iterable[int]) -> "ClopenSet":
        """Validate raw classes at ``level`` and return the canonical set."""
        return cls(base=base, level=level, classes=tuple(classes)).normalize()

    @classmethod
    def _trusted(cls, base: int, level: int, classes: Iterable[int]) -> "ClopenSet":
        return cls.model_construct(base=base, level=level, classes=tuple(classes))

    @classmethod
    def full(cls, base: int) -> "ClopenSet":
        return cls._trusted(base, 0, (0,))

    @classmethod
    def empty(cls, base: int) -> "ClopenSet":
        return cls._trusted(base, 0, ())

    @classmethod
    def from_json(cls, text: str) -> "ClopenSet":
        return cls.model_validate(json.loads(text)).normalize()

    # -- canonical form ---------------------------------------------------

    def normalize(self) -> "ClopenSet":
        level, classes = _minimal_level(self.base, self.level, self.classes)
        if level == self.level:
            return self
        return ClopenSet._trusted(self.base, level, classes)

    def is_canonical(self) -> bool:
        return self.normalize().level == self.level

    def refine(self, level: int) -> "ClopenSet":
        """Same set, represented at ``level >= self.level`` (not canonical)."""
        return ClopenSet._trusted(self.base, level, self.residues_at(level))

    def residues_at(self, level: int) -> Tuple[int, ...]:
        """Sorted residues of the set at ``level >= self.level``."""
        if level < self.level:
            raise ValueError(f"cannot refine level {self.level} down to {level}")
        check_level(level)
        if level == self.level:
            return self.classes
        size = self.base**self.level
        # w < size, so the lift w + size*j is ascending in (j, w)
        return tuple(
            w + size * j
            for j in range(self.base ** (level - self.level))
            for w in self.classes
        )

    def membership(self, level: int) -> List[bool]:
        """Indicator list of the set over residues mod ``q^level``."""
        flags = [False] * (self.base**level)
        for w in self.residues_at(level):
            flags[w] = True
        return flags

    def contains(self, w: int) -> bool:
        """Whether the q-adic integer ``w`` (any int) lies in the set."""
        return (w % self.base**self.level) in set(self.classes)

    # -- measure algebra --------------------------------------------------

    def is_empty(self) -> bool:
        return not self.classes

    def is_full(self) -> bool:
        return self.normalize().level == 0 and bool(self.classes)

    def measure(self) -> AdicRational:
        return AdicRational(self.base, len(self.classes), self.level)

    def translate(self, n: int) -> "ClopenSet":
        """Image under ``T^n``: residues shift by ``n`` modulo ``q^k``."""
        size = self.base**self.level
        return ClopenSet._trusted(
            self.base, self.level, sorted((w + n) % size for w in self.classes)
        ).normalize()

    def _binary(self, other: "ClopenSet", op: str) -> "ClopenSet":
        if other.base != self.base:
            raise BaseMismatchError(self.base, other.base)
        level = max(self.level, other.level)
        left = set(self.residues_at(level))
        right = set(other.residues_at(level))
        if op == "union":
            result = left | right
        elif op == "intersect":
            result = left & right
        elif op == "difference":
            result = left - right
        elif op == "symdiff":
            result = left ^ right
        else:
            raise ValueError(f"unknown boolean operation {op!r}")
        return ClopenSet._trusted(self.base, level, sorted(result)).normalize()

    def union(self, other: "ClopenSet") -> "ClopenSet":
        return self._binary(other, "union")

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        return self._binary(other, "intersect")

    def difference(self, other: "ClopenSet") -> "ClopenSet":
        return self._binary(other, "difference")

    def symdiff(self, other: "ClopenSet") -> "ClopenSet":
        return self._binary(other, "symdiff")

    def complement(self) -> "ClopenSet":
        present = set(self.classes)
        rest = [w for w in range(self.base**self.level) if w not in present]
        return ClopenSet._trusted(self.base, self.level, rest).normalize()

    def isdisjoint(self, other: "ClopenSet") -> bool:
        return self.intersect(other).is_empty()

    def issubset(self, other: "ClopenSet") -> bool:
        return self.difference(other).is_empty()

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __xor__ = symdiff

    # -- identity ---------------------------------------------------------

    def _key(self) -> Tuple[int, int, Tuple[int, ...]]:
        canon = self.normalize()
        return canon.base, canon.level, canon.classes

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClopenSet):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def to_dict(self) -> Dict[str, Any]:
        canon = self.normalize()
        return {"base": canon.base, "level": canon.level, "classes": list(canon.classes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __str__(self) -> str:
        if self.is_empty():
            return "∅"
        canon = self.normalize()
        shown = ",".join(str(w) for w in canon.classes)
        return f"{{{shown}}} mod {canon.base}^{canon.level}"


# ----------------------------------------------------------------------------
# Functional API
# ----------------------------------------------------------------------------


def normalize(base: int, level: int, classes: Iterable[int]) -> ClopenSet:
    """Canonical minimal-level ClopenSet for raw ``classes`` at ``level``."""
    return ClopenSet.from_classes(base, level, classes)


def boolean(left: ClopenSet, right: ClopenSet | None, op: BooleanOp) -> ClopenSet:
    """Apply a measure-algebra operation; ``right`` is ignored for ``complement``."""
    if op == "complement":
        return left.complement()
    if right is None:
        raise ValueError(f"operation {op!r} needs two operands")
    return left._binary(right, op)


def measure(s: ClopenSet) -> AdicRational:
    return s.measure()


def translate(s: ClopenSet, n: int) -> ClopenSet:
    return s.translate(n)
