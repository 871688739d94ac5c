"""
Structural decompositions of full-group elements.

All decompositions work on the residue permutation ``σ`` of an element and on
its σ-cycles. Classes that σ fixes while the element still moves them (the
element is a power of the odometer there) carry no cycle structure at their
own level, so decompositions that need one first refine those classes until
σ acts on their sub-residues without fixed points.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..utils.env import check_level
from .adic import AdicRational, ClopenSet, _valuation
from .element import Element, metric, patchwork
from .errors import RangeError

__all__ = [
    "BelinskayaSplit",
    "InvolutionTriple",
    "EqualNormSplit",
    "BallCertificate",
    "belinskaya_decompose",
    "disjoint_support_3coloring",
    "involution_triple_decompose",
    "split_equal_norm",
    "ball_certificate",
]

logger = logging.getLogger(__name__)


def _norm(u: Element) -> AdicRational:
    return metric(Element._trusted(u.base, 0, (0,)), u, "d1")  # type: ignore[return-value]


def _from_residues(base: int, level: int, residues: Sequence[int]) -> ClopenSet:
    return ClopenSet._trusted(base, level, sorted(residues)).normalize()


def _aperiodic_level(u: Element) -> int:
    """Smallest level at which σ has no fixed point inside the support."""
    extra = 0
    size = u.size
    for n in u.cocycle:
        if n and n % size == 0:
            t = n // size
            extra = max(extra, _valuation(t, u.base, abs(t).bit_length()) + 1)
    return u.level + extra


def _fixed_point_free(u: Element) -> Element:
    level = _aperiodic_level(u)
    if level == u.level:
        return u
    check_level(level)
    logger.debug("refining level %d -> %d to break fixed classes", u.level, level)
    return u.refine(level)


# ----------------------------------------------------------------------------
# Belinskaya split
# ----------------------------------------------------------------------------


class BelinskayaSplit(BaseModel):
    """Negative, periodic and positive parts on invariant, disjoint supports."""

    negative: Element
    periodic: Element
    positive: Element
    negative_support: ClopenSet
    periodic_support: ClopenSet
    positive_support: ClopenSet

    model_config = ConfigDict(frozen=True)

    def product(self) -> Element:
        return self.negative.compose(self.periodic).compose(self.positive)

    def to_dict(self) -> Dict[str, object]:
        return {
            "negative": self.negative.to_dict(),
            "periodic": self.periodic.to_dict(),
            "positive": self.positive.to_dict(),
            "negative_support": self.negative_support.to_dict(),
            "periodic_support": self.periodic_support.to_dict(),
            "positive_support": self.positive_support.to_dict(),
        }


def belinskaya_decompose(u: Element) -> BelinskayaSplit:
    """Split ``u`` by the sign of the cocycle sum along each σ-cycle.

    At a finite level a σ-cycle with positive sum is a union of orbits that
    drift to the right, and so on. The three parts have disjoint invariant
    supports, so they commute and ``u = negative ∘ periodic ∘ positive``.
    """
    parts: Dict[int, List[int]] = {-1: [], 0: [], 1: []}
    for orbit, total in u.cycles():
        sign = (total > 0) - (total < 0)
        parts[sign].extend(orbit)

    def piece(residues: List[int]) -> Tuple[Element, ClopenSet]:
        inside = set(residues)
        values = [n if w in inside else 0 for w, n in enumerate(u.cocycle)]
        return (
            Element._trusted(u.base, u.level, values).normalize(),
            _from_residues(u.base, u.level, residues),
        )

    negative, negative_support = piece(parts[-1])
    periodic, periodic_support = piece(parts[0])
    positive, positive_support = piece(parts[1])
    return BelinskayaSplit(
        negative=negative,
        periodic=periodic,
        positive=positive,
        negative_support=negative_support,
        periodic_support=periodic_support,
        positive_support=positive_support,
    )


# ----------------------------------------------------------------------------
# Three-colouring of the support
# ----------------------------------------------------------------------------


def disjoint_support_3coloring(u: Element) -> Tuple[ClopenSet, ClopenSet, ClopenSet]:
    """Partition ``supp u`` into ``A1, A2, A3`` with ``u(A_i) ∩ A_i = ∅``.

    Residues of the support are coloured greedily in ascending order with the
    first colour not already used by their σ-image or σ-preimage.
    """
    v = _fixed_point_free(u)
    targets = v.targets()
    sources = [0] * v.size
    for w, t in enumerate(targets):
        sources[t] = w
    colour: Dict[int, int] = {}
    for w, n in enumerate(v.cocycle):
        if not n:
            continue
        taken = {colour.get(targets[w]), colour.get(sources[w])}
        colour[w] = next(c for c in range(3) if c not in taken)
    classes: List[List[int]] = [[], [], []]
    for w, c in colour.items():
        classes[c].append(w)
    a1, a2, a3 = (_from_residues(v.base, v.level, c) for c in classes)
    return a1, a2, a3


# ----------------------------------------------------------------------------
# Involution triple
# ----------------------------------------------------------------------------


class InvolutionTriple(BaseModel):
    """Three involutions which together agree with an element on its support.

    ``u1`` agrees with the element on ``a1 ⊔ b1``, ``u2`` on ``b2`` and ``u3``
    on ``a2 ⊔ b3``, except on ``paired ⊆ a2``: the second points of σ-cycles
    of length two and cocycle sum zero. The element is already an involution
    there, so ``u1`` covers the whole cycle and ``u3`` stays the identity.
    """

    u1: Element
    u2: Element
    u3: Element
    a1: ClopenSet
    a2: ClopenSet
    b1: ClopenSet
    b2: ClopenSet
    b3: ClopenSet
    paired: ClopenSet

    model_config = ConfigDict(frozen=True)

    def reconstruct(self) -> Element:
        """Glue ``u1``, ``u2``, ``u3`` back along the partition."""
        return patchwork(
            self.u1.base,
            [
                (self.u1, self.a1 | self.b1 | self.paired),
                (self.u2, self.b2),
                (self.u3, (self.a2 - self.paired) | self.b3),
            ],
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            name: getattr(self, name).to_dict()
            for name in ("u1", "u2", "u3", "a1", "a2", "b1", "b2", "b3", "paired")
        }


def involution_triple_decompose(u: Element) -> InvolutionTriple:
    """Write ``u`` piecewise as three involutions of d1-norm at most ``2‖u‖``.

    Each σ-cycle ``w0 → w1 → …`` is labelled from its least residue: even
    cycles alternate ``A1, A2``; odd cycles start ``B1, B2, B3`` and then
    alternate ``A1, A2``. Involutive cycles of length two go entirely to ``u1``.
    """
    v = _fixed_point_free(u)
    base, level, size = v.base, v.level, v.size
    labels: Dict[str, List[int]] = {k: [] for k in ("a1", "a2", "b1", "b2", "b3", "paired")}
    u1 = [0] * size
    u2 = [0] * size
    u3 = [0] * size
    n = v.cocycle

    def swap(values: List[int], w: int) -> None:
        # w -> σ(w) with u, σ(w) -> w with the inverse
        t = (w + n[w]) % size
        values[w] = n[w]
        values[t] = -n[w]

    for orbit, total in v.cycles():
        length = len(orbit)
        if length == 2 and total == 0:
            labels["a1"].append(orbit[0])
            labels["a2"].append(orbit[1])
            labels["paired"].append(orbit[1])
            swap(u1, orbit[0])
            continue
        start = 0
        if length % 2:
            b1, b2, b3 = orbit[0], orbit[1], orbit[2]
            labels["b1"].append(b1)
            labels["b2"].append(b2)
            labels["b3"].append(b3)
            swap(u1, b1)
            swap(u2, b2)
            swap(u3, b3)
            start = 3
        for offset in range(start, length, 2):
            w_a1, w_a2 = orbit[offset], orbit[offset + 1]
            labels["a1"].append(w_a1)
            labels["a2"].append(w_a2)
            swap(u1, w_a1)
            swap(u3, w_a2)

    def build(values: List[int]) -> Element:
        return Element._trusted(base, level, values).normalize()

    sets = {k: _from_residues(base, level, ws) for k, ws in labels.items()}
    return InvolutionTriple(u1=build(u1), u2=build(u2), u3=build(u3), **sets)


# ----------------------------------------------------------------------------
# Equal-norm splitting and ball certificates
# ----------------------------------------------------------------------------


class EqualNormSplit(BaseModel):
    """Periodic factors with disjoint invariant supports and balanced norms."""

    parts: Tuple[Element, ...]
    norms: Tuple[AdicRational, ...]
    tolerance: AdicRational
    depth: int
    exact: bool = Field(..., description="every part has norm exactly d1(id, u)/N")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def product(self) -> Element:
        result = Element._trusted(self.parts[0].base, 0, (0,))
        for part in self.parts:
            result = result.compose(part)
        return result


def split_equal_norm(u: Element, parts: int, depth: int) -> EqualNormSplit:
    """Split a periodic element into ``parts`` factors of nearly equal d1-norm.

    The element is written at level ``max(depth, level)``; its σ-cycles there
    are invariant blocks. Blocks are taken in ascending order of their least
    residue and each goes to the currently lightest factor (lowest index on
    ties), so every norm lies within one block weight of ``d1(id, u)/parts``.
    """
    if parts < 1:
        raise RangeError(f"number of parts must be >= 1, got {parts}")
    u.periodicity()
    check_level(depth)
    level = max(depth, u.level)
    v = u.refine(level)
    size = v.size

    weights = [0] * parts
    assigned: List[List[int]] = [[] for _ in range(parts)]
    heaviest = 0
    for orbit, _ in v.cycles():
        weight = sum(abs(v.cocycle[w]) for w in orbit)
        heaviest = max(heaviest, weight)
        lightest = min(range(parts), key=lambda i: (weights[i], i))
        weights[lightest] += weight
        assigned[lightest].extend(orbit)

    elements = []
    for residues in assigned:
        values = [0] * size
        for w in residues:
            values[w] = v.cocycle[w]
        elements.append(Element._trusted(v.base, level, values).normalize())

    exact = len(set(weights)) == 1
    logger.debug("split into %d parts at level %d, weights %s", parts, level, weights)
    return EqualNormSplit(
        parts=tuple(elements),
        norms=tuple(AdicRational(v.base, w, level) for w in weights),
        tolerance=AdicRational(v.base, heaviest, level),
        depth=level,
        exact=exact,
    )


class BallCertificate(BaseModel):
    """Witness that ``u`` lies in the N-fold product of the ball ``B(id, radius)``."""

    parts: int
    radius: AdicRational
    bound: Fraction
    norm: AdicRational
    certified: bool

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def ball_certificate(u: Element, parts: int, depth: int) -> BallCertificate:
    split = split_equal_norm(u, parts, depth)
    norm = _norm(u)
    radius = max(split.norms)
    bound = norm / parts + split.tolerance.to_fraction()
    return BallCertificate(
        parts=parts,
        radius=radius,
        bound=bound,
        norm=norm,
        certified=radius <= bound,
    )
