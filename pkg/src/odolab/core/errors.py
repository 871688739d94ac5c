"""Exception hierarchy for odolab.

Domain errors derive from ``Exception``, not ``ValueError``, so they leave
pydantic validators unwrapped and keep their payload.
"""

from __future__ import annotations

from typing import Sequence, Tuple

__all__ = [
    "OdolabError",
    "BaseMismatchError",
    "InvalidClassError",
    "NotBijectiveError",
    "NotPeriodicError",
    "OverlapError",
    "DisjointnessError",
    "EmptySetError",
    "LevelCapError",
    "SizeMismatchError",
    "RangeError",
    "NotInvariantError",
]


class OdolabError(Exception):
    """Base class of every error raised by odolab."""


class BaseMismatchError(OdolabError):
    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"base mismatch: {left} vs {right}")


class InvalidClassError(OdolabError):
    """A residue class lies outside ``[0, q^level)``."""


class NotBijectiveError(OdolabError):
    """The residue map ``w -> (w + n_w) mod q^k`` has a collision."""

    def __init__(self, residues: Sequence[int], target: int):
        self.residues: Tuple[int, ...] = tuple(residues)
        self.target = target
        listed = ", ".join(str(w) for w in self.residues)
        super().__init__(
            f"cocycle is not bijective: residues {listed} all map to {target}"
        )


class NotPeriodicError(OdolabError):
    """Raised with a witness cycle whose cocycle sum is nonzero."""

    def __init__(self, cycle: Sequence[int], total: int):
        self.cycle: Tuple[int, ...] = tuple(cycle)
        self.total = total
        shown = " ".join(str(w) for w in self.cycle[:8])
        if len(self.cycle) > 8:
            shown += " ..."
        super().__init__(
            f"element is not periodic: cycle ({shown}) has cocycle sum {total}"
        )


class OverlapError(OdolabError):
    """A set meets its own translate where disjointness is required."""


class DisjointnessError(OdolabError):
    """Sets or supports that must be pairwise disjoint are not."""


class EmptySetError(OdolabError):
    """An operation that needs a nonempty clopen set received the empty set."""


class LevelCapError(OdolabError):
    """A level exceeds the configured cap; never silently truncated."""

    def __init__(self, level: int, cap: int):
        self.level = level
        self.cap = cap
        super().__init__(f"level {level} exceeds the level cap {cap}")


class SizeMismatchError(OdolabError):
    """Permutations or towers of incompatible sizes."""


class RangeError(OdolabError):
    """A numeric parameter lies outside its documented range."""


class NotInvariantError(OdolabError):
    """A restriction was requested on a set the element does not preserve."""
