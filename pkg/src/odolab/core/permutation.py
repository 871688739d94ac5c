"""Finite permutations of ``{0, …, n-1}`` and their normalized metrics."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, List, Literal, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import NotBijectiveError, SizeMismatchError

__all__ = ["Permutation", "PermMetricKind", "perm_metric"]

PermMetricKind = Literal["l1", "hamming"]


class Permutation(BaseModel):
    """Bijection ``i -> images[i]`` of ``{0, …, n-1}``.

    Composition follows function composition: ``(σ * τ)(i) = σ(τ(i))``.
    """

    images: Tuple[int, ...] = Field(..., min_length=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_bijective(self) -> "Permutation":
        n = len(self.images)
        hits = [0] * n
        for i, j in enumerate(self.images):
            if not 0 <= j < n:
                raise ValueError(f"image {j} of {i} outside [0, {n})")
            hits[j] += 1
        for target, count in enumerate(hits):
            if count > 1:
                raise NotBijectiveError(
                    [i for i, j in enumerate(self.images) if j == target], target
                )
        return self

    @classmethod
    def _trusted(cls, images: Iterable[int]) -> "Permutation":
        return cls.model_construct(images=tuple(int(j) for j in images))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        if n < 1:
            raise ValueError("permutation size must be >= 1")
        return cls._trusted(range(n))

    @classmethod
    def from_cycle(cls, n: int, cycle: Sequence[int]) -> "Permutation":
        """The cycle ``c0 -> c1 -> … -> c0`` in ``S_n``."""
        images = list(range(n))
        for a, b in zip(cycle, list(cycle[1:]) + list(cycle[:1])):
            images[a] = b
        return cls(images=tuple(images))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Permutation":
        return cls.from_cycle(n, (a, b))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __len__(self) -> int:
        return len(self.images)

    def compose(self, other: "Permutation") -> "Permutation":
        if other.n != self.n:
            raise SizeMismatchError(f"cannot compose S_{self.n} with S_{other.n}")
        return Permutation._trusted(self.images[j] for j in other.images)

    __mul__ = compose

    def inverse(self) -> "Permutation":
        out = [0] * self.n
        for i, j in enumerate(self.images):
            out[j] = i
        return Permutation._trusted(out)

    def cycles(self) -> List[Tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least element."""
        seen = [False] * self.n
        found = []
        for start in range(self.n):
            if seen[start]:
                continue
            orbit = []
            i = start
            while not seen[i]:
                seen[i] = True
                orbit.append(i)
                i = self.images[i]
            if len(orbit) > 1:
                found.append(tuple(orbit))
        return found

    def order(self) -> int:
        order = 1
        for orbit in self.cycles():
            order = order * len(orbit) // math.gcd(order, len(orbit))
        return order

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def to_json(self) -> str:
        return json.dumps({"images": list(self.images)})

    def __str__(self) -> str:
        shown = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())
        return shown or "()"


def perm_metric(
    sigma: Permutation, tau: Permutation, kind: PermMetricKind = "l1"
) -> Fraction:
    """Normalized distance on ``S_n``.

    ``l1`` is the mean displacement ``(1/n) Σ |σ(i) - τ(i)|``; ``hamming``
    is the proportion of points where the two permutations differ.
    """
    if sigma.n != tau.n:
        raise SizeMismatchError(f"cannot compare S_{sigma.n} with S_{tau.n}")
    if kind == "l1":
        total = sum(abs(a - b) for a, b in zip(sigma.images, tau.images))
    elif kind == "hamming":
        total = sum(1 for a, b in zip(sigma.images, tau.images) if a != b)
    else:
        raise ValueError(f"unknown permutation metric {kind!r}")
    return Fraction(total, sigma.n)
