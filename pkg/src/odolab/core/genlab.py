"""
Two-generator construction for the odometer's topological full group.

The construction takes cycles ``U_n`` of prime length ``p_n`` on finer and
finer towers, disjointifies them into commuting ``V_n`` and multiplies them
into one periodic element ``V``. Each ``V_n`` is then recovered as a power of
``V``. Full-scale schedules cannot be materialized, so :func:`check_schedule`
verifies their numeric conditions with integer arithmetic only, while the
element-level functions run at small, user-chosen sizes.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import isprime, mod_inverse, prime
from sympy.ntheory.modular import crt

from .adic import AdicRational, ClopenSet, format_exact
from .element import Element, identity, metric, odometer
from .errors import DisjointnessError, RangeError
from .permutation import Permutation
from .towers import rho_embed, rokhlin_tower

__all__ = [
    "ConstructionSchedule",
    "ScheduleEntry",
    "ScheduleReport",
    "RecoveryRow",
    "RecoveryTable",
    "GeneratorReport",
    "ApproximationResult",
    "Word",
    "prime_cycle",
    "disjointify",
    "assemble",
    "crt_exponent",
    "assemble_and_recover",
    "build_generators",
    "check_schedule",
    "word_for_3cycle",
    "evaluate_word",
    "format_word",
    "three_cycle_letters",
    "greedy_approximate",
]

logger = logging.getLogger(__name__)

DEFAULT_MAX_BITS = 1 << 26

Word = Tuple[Tuple[str, int], ...]


# ----------------------------------------------------------------------------
# Schedules
# ----------------------------------------------------------------------------


def _standard_level(n: int) -> int:
    return 4 ** (n * 2**n + 2**n)


class ConstructionSchedule(BaseModel):
    """Primes ``p_n``, levels ``k_n`` and optional tolerances of a construction.

    ``deltas`` and ``epsilons`` are assumptions supplied by the user; nothing
    here derives them.
    """

    base: int = Field(2, ge=2)
    primes: Tuple[int, ...]
    levels: Tuple[int, ...]
    deltas: Optional[Tuple[Fraction, ...]] = None
    epsilons: Optional[Tuple[Fraction, ...]] = None

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    @field_validator("deltas", "epsilons", mode="before")
    @classmethod
    def _as_fractions(cls, value):
        if value is None:
            return None
        return tuple(Fraction(v) for v in value)

    @model_validator(mode="after")
    def _check_lengths(self) -> "ConstructionSchedule":
        if len(self.primes) != len(self.levels):
            raise ValueError("primes and levels must have the same length")
        for name in ("deltas", "epsilons"):
            values = getattr(self, name)
            if values is not None:
                if len(values) != len(self.primes):
                    raise ValueError(f"{name} must have one entry per prime")
                if any(v <= 0 for v in values):
                    raise ValueError(f"{name} must be positive")
        return self

    @classmethod
    def standard(cls, count: int, base: int = 2) -> "ConstructionSchedule":
        """First ``count`` primes with ``k_n = 4^(n 2^n + 2^n)``."""
        return cls(
            base=base,
            primes=tuple(prime(i + 1) for i in range(count)),
            levels=tuple(_standard_level(n) for n in range(count)),
        )

    def __len__(self) -> int:
        return len(self.primes)


Status = Literal["pass", "fail", "skipped"]


class ScheduleEntry(BaseModel):
    index: int
    condition: str
    status: Status
    detail: str = ""

    model_config = ConfigDict(frozen=True)


class ScheduleReport(BaseModel):
    entries: Tuple[ScheduleEntry, ...]

    model_config = ConfigDict(frozen=True)

    def passed(self, condition: Optional[str] = None) -> List[ScheduleEntry]:
        return [
            e
            for e in self.entries
            if e.status == "pass" and (condition is None or e.condition == condition)
        ]

    def failed(self, condition: Optional[str] = None) -> List[ScheduleEntry]:
        return [
            e
            for e in self.entries
            if e.status == "fail" and (condition is None or e.condition == condition)
        ]

    def to_rows(self) -> List[Dict[str, object]]:
        return [e.model_dump() for e in self.entries]


def _power_of_two_exponent(q: int) -> Optional[int]:
    return q.bit_length() - 1 if q & (q - 1) == 0 else None


def _qpow(q: int, e: int) -> int:
    s = _power_of_two_exponent(q)
    if s is not None:
        return 1 << (s * e)
    return q**e


def _at_most_power_of_two(x: int, e: int) -> bool:
    """``x <= 2^e`` for ``x >= 1``, decided from bit lengths."""
    bits = x.bit_length()
    return bits <= e or (bits == e + 1 and x == 1 << e)


def _bits(q: int, e: int) -> int:
    return e * (q - 1).bit_length()


def check_schedule(
    schedule: ConstructionSchedule,
    count: Optional[int] = None,
    max_bits: int = DEFAULT_MAX_BITS,
) -> ScheduleReport:
    """Check the schedule's conditions for ``n < count`` using integers only.

    Conditions per index: ``p_n`` prime with ``p_n <= 2^(2^n)``, ``k_n``
    strictly increasing, ``k_n >= 4^(n 2^n + 2^n)``, the tolerance condition
    ``p_n Σ_{m>n} p_m / q^{k_m} < δ_n`` when ``deltas`` are given, and
    ``(Π_{i<n} p_i)(Σ_{i>=n} p_i / q^{k_i}) <= 2^(-n 2^n)``. Infinite sums are
    truncated at the schedule length. Checks whose integers would exceed
    ``max_bits`` bits are reported as skipped.
    """
    total = len(schedule)
    count = total if count is None else count
    if count > total:
        raise RangeError(f"schedule has {total} entries, {count} requested")
    q = schedule.base
    p, k = schedule.primes, schedule.levels
    entries: List[ScheduleEntry] = []

    def add(n: int, condition: str, ok: Optional[bool], detail: str = "") -> None:
        status: Status = "skipped" if ok is None else ("pass" if ok else "fail")
        entries.append(ScheduleEntry(index=n, condition=condition, status=status, detail=detail))

    for n in range(count):
        add(n, "prime", bool(isprime(p[n])), f"p={p[n]}")
        if 2**n > max_bits:
            add(n, "prime_bound", None, "2^(2^n) too large")
        else:
            add(n, "prime_bound", _at_most_power_of_two(p[n], 2**n), f"p <= 2^{2**n}")
        if n:
            add(n, "levels_increasing", k[n] > k[n - 1])

        exponent = 2 * (n * 2**n + 2**n)
        if exponent > max_bits:
            add(n, "condition_iii", None, "level bound too large")
        else:
            add(n, "condition_iii", k[n] >= 1 << exponent, f"k >= 2^{exponent}")

        if schedule.deltas is not None:
            tail = range(n + 1, total)
            top = max((k[m] for m in tail), default=0)
            if _bits(q, top) > max_bits:
                add(n, "condition_ii", None, "q^k too large")
            else:
                numerator = sum(p[m] * _qpow(q, top - k[m]) for m in tail)
                delta = schedule.deltas[n]
                ok = p[n] * numerator * delta.denominator < delta.numerator * _qpow(q, top)
                add(n, "condition_ii", ok, f"delta={format_exact(delta)}")

        tail = range(n, total)
        top = max(k[i] for i in tail)
        if _bits(q, top) + n * 2**n > max_bits:
            add(n, "inequality_1", None, "q^k too large")
            continue
        product = 1
        for i in range(n):
            product *= p[i]
        numerator = sum(p[i] * _qpow(q, top - k[i]) for i in tail)
        ok = (product * numerator) << (n * 2**n) <= _qpow(q, top)
        add(n, "inequality_1", ok, f"bound 2^-{n * 2**n}")

    logger.info("checked %d schedule indices, %d entries", count, len(entries))
    return ScheduleReport(entries=tuple(entries))


# ----------------------------------------------------------------------------
# Prime cycles, disjointification, recovery
# ----------------------------------------------------------------------------


def prime_cycle(p: int, level: int, base: int = 2) -> Element:
    """The cycle ``(0 1 … p-1)`` on the full tower over ``{0} mod q^level``."""
    size = base**level
    if p < 2 or p > size:
        raise RangeError(f"cycle length {p} must lie in [2, {size}]")
    tower = rokhlin_tower(ClopenSet.from_classes(base, level, [0]))
    return rho_embed(tower, Permutation.from_cycle(size, range(p)))


def disjointify(cycles: Sequence[Element]) -> List[Element]:
    """Shrink periodic elements until their supports are pairwise disjoint.

    ``V_n`` is ``U_n`` restricted to ``supp U_n`` minus the ``U_n``-orbit of
    the later supports ``⋃_{m>n} supp U_m``; the last element is unchanged.
    """
    if not cycles:
        return []
    base = cycles[0].base
    orders = [u.periodicity() for u in cycles]
    out: List[Element] = []
    later = ClopenSet.empty(base)
    for u, order in reversed(list(zip(cycles, orders))):
        orbit = later
        image = later
        for _ in range(order - 1):
            image = u.image(image)
            orbit = orbit | image
        keep = u.support() - orbit
        out.append(u.restrict(keep))
        if not orbit.is_empty():
            logger.debug("removed %s from a cycle of order %d", orbit.measure(), order)
        later = later | u.support()
    out.reverse()
    return out


def assemble(vs: Sequence[Element]) -> Element:
    """Product of elements with pairwise-disjoint supports."""
    if not vs:
        raise RangeError("nothing to assemble")
    supports = [v.support() for v in vs]
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            if not supports[i].isdisjoint(supports[j]):
                raise DisjointnessError(f"supports of elements {i} and {j} overlap")
    product = identity(vs[0].base)
    for v in vs:
        product = product.compose(v)
    return product


def crt_exponent(orders: Sequence[int], n: int) -> int:
    """Least ``e >= 1`` with ``e ≡ 1 mod p_n`` and ``e ≡ 0 mod p_m`` for ``m != n``."""
    residues = [1 if i == n else 0 for i in range(len(orders))]
    solved = crt(list(orders), residues)
    if solved is None:
        raise RangeError(f"orders {list(orders)} admit no recovery exponent")
    e, modulus = int(solved[0]), int(solved[1])
    return e or modulus


class RecoveryRow(BaseModel):
    n: int
    m: int
    exponent: int
    residual: AdicRational

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class RecoveryTable(BaseModel):
    """``d1(V^e, V_n)`` for the exponents ``e = P_m t_m``, plus the CRT exponent."""

    n: int
    rows: Tuple[RecoveryRow, ...]
    crt_exponent: int
    crt_residual: AdicRational

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def to_rows(self) -> List[Dict[str, object]]:
        rows = [
            {"n": r.n, "m": r.m, "exponent": str(r.exponent), "residual": str(r.residual)}
            for r in self.rows
        ]
        rows.append(
            {
                "n": self.n,
                "m": "crt",
                "exponent": str(self.crt_exponent),
                "residual": str(self.crt_residual),
            }
        )
        return rows


def assemble_and_recover(vs: Sequence[Element], n: int) -> RecoveryTable:
    """Recover ``V_n`` from the product ``V`` of disjointified cycles.

    For ``m = n+1 … len(vs)`` the exponent is ``P_m t_m`` with
    ``P_m = Π_{i<m, i≠n} p_i`` and ``t_m`` the inverse of ``P_m`` mod ``p_n``;
    once ``m`` reaches the family size the recovery is exact.
    """
    if not 0 <= n < len(vs):
        raise RangeError(f"index {n} outside the family of {len(vs)} elements")
    product = assemble(vs)
    orders = [v.periodicity() for v in vs]
    target = vs[n]
    rows = []
    for m in range(n + 1, len(vs) + 1):
        p_m = 1
        for i in range(m):
            if i != n:
                p_m *= orders[i]
        exponent = p_m * int(mod_inverse(p_m, orders[n])) if orders[n] > 1 else p_m
        residual = metric(product.power(exponent), target, "d1")
        rows.append(RecoveryRow(n=n, m=m, exponent=exponent, residual=residual))
    e = crt_exponent(orders, n)
    crt_residual = metric(product.power(e), target, "d1")
    return RecoveryTable(
        n=n, rows=tuple(rows), crt_exponent=e, crt_residual=crt_residual  # type: ignore[arg-type]
    )


class GeneratorReport(BaseModel):
    """Cycles ``U_n``, their disjointification ``V_n`` and the product ``V``."""

    us: Tuple[Element, ...]
    vs: Tuple[Element, ...]
    product: Element
    distances: Tuple[AdicRational, ...]
    recovery: Tuple[RecoveryTable, ...]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def to_dict(self) -> Dict[str, object]:
        return {
            "us": [u.to_dict() for u in self.us],
            "vs": [v.to_dict() for v in self.vs],
            "product": self.product.to_dict(),
            "distances": [str(d) for d in self.distances],
            "recovery": [row for table in self.recovery for row in table.to_rows()],
        }


def build_generators(
    primes: Sequence[int], levels: Sequence[int], base: int = 2
) -> GeneratorReport:
    if len(primes) != len(levels) or not primes:
        raise RangeError("need one level per prime and at least one prime")
    us = [prime_cycle(p, k, base) for p, k in zip(primes, levels)]
    vs = disjointify(us)
    distances = tuple(metric(v, u, "d1") for u, v in zip(us, vs))
    recovery = tuple(assemble_and_recover(vs, n) for n in range(len(vs)))
    return GeneratorReport(
        us=tuple(us),
        vs=tuple(vs),
        product=assemble(vs),
        distances=distances,  # type: ignore[arg-type]
        recovery=recovery,
    )


# ----------------------------------------------------------------------------
# Words
# ----------------------------------------------------------------------------

# (0 1 2) = c1^2 (c1^-1 c0)^2 c1^-2 with c0 = U and c1 = T U T^-1, reduced
_BASE_3CYCLE: Word = (
    ("T", 1), ("U", 1), ("T", -1), ("U", 1), ("T", 1), ("U", -1), ("T", -1),
    ("U", 1), ("T", 1), ("U", -1), ("U", -1), ("T", -1),
)  # fmt: skip


def word_for_3cycle(i: int, n: int, tower_size: int) -> Word:
    """Word in ``T`` and ``U = ρ((0 1 … n-1))`` equal to ``ρ((i i+1 i+2))``.

    The word for ``(0 1 2)`` is conjugated by ``T^i``; its length is
    ``2i + 12``, within ``20 * tower_size``.
    """
    if not 3 <= n <= tower_size - 2:
        raise RangeError(f"window {n} must lie in [3, {tower_size - 2}]")
    if not 0 <= i <= tower_size - 3:
        raise RangeError(f"position {i} must lie in [0, {tower_size - 3}]")
    return (("T", 1),) * i + _BASE_3CYCLE + (("T", -1),) * i


def evaluate_word(word: Word, letters: Dict[str, Element]) -> Element:
    """Compose the letters left to right: ``x1 ∘ x2 ∘ …``."""
    if not letters:
        raise RangeError("no letters to evaluate")
    result = identity(next(iter(letters.values())).base)
    for symbol, exponent in word:
        result = result.compose(letters[symbol].power(exponent))
    return result


def format_word(word: Word) -> str:
    return " ".join(s if e == 1 else f"{s}^{e}" for s, e in word) or "id"


def three_cycle_letters(n: int, level: int, base: int = 2) -> Dict[str, Element]:
    """``T`` and the window cycle ``U`` on the full tower of height ``q^level``."""
    return {"T": odometer(base), "U": prime_cycle(n, level, base)}


# ----------------------------------------------------------------------------
# Greedy approximation
# ----------------------------------------------------------------------------


class ApproximationResult(BaseModel):
    """Accepted steps ``(side, generator index)`` and the final d1 residual."""

    steps: Tuple[Tuple[Literal["L", "R"], int], ...]
    residual: AdicRational
    trace: Tuple[AdicRational, ...]
    index_gap: int

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def greedy_approximate(
    target: Element, generators: Sequence[Element], budget: int
) -> ApproximationResult:
    """Multiply generators onto the identity while d1 to ``target`` drops.

    Each step tries ``g ∘ cur`` then ``cur ∘ g`` for every generator in order
    and takes the first candidate of least residual; the search stops when no
    candidate is strictly better or after ``budget`` steps. ``index_gap`` is
    ``|index(target) - index(word)|``, a lower bound on the residual.
    """
    if budget < 0:
        raise RangeError(f"budget must be >= 0, got {budget}")
    current = identity(target.base)
    residual = metric(current, target, "d1")
    steps: List[Tuple[Literal["L", "R"], int]] = []
    trace = [residual]
    for _ in range(budget):
        if not residual:
            break
        best: Optional[Tuple[AdicRational, Element, Tuple[Literal["L", "R"], int]]] = None
        for j, g in enumerate(generators):
            for side, candidate in (("L", g.compose(current)), ("R", current.compose(g))):
                score = metric(candidate, target, "d1")
                if best is None or score < best[0]:
                    best = (score, candidate, (side, j))  # type: ignore[assignment]
        if best is None or not best[0] < residual:
            break
        residual, current = best[0], best[1]
        steps.append(best[2])
        trace.append(residual)
        logger.debug("greedy step %s -> residual %s", best[2], residual)
    gap = abs(target.index() - current.index())
    return ApproximationResult(
        steps=tuple(steps), residual=residual, trace=tuple(trace), index_gap=gap  # type: ignore[arg-type]
    )
