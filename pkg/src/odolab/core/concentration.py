"""
Concentration profiles of distance functionals on ``S_n``.

For a 1-Lipschitz functional ``f`` (here the normalized distance to the
identity or to a fixed permutation) the profile records
``alpha(ε) = P(|f - median| > ε)`` under the uniform law. Small ``n`` are
enumerated exactly; larger ``n`` are sampled.

Sampling uses numpy's ``default_rng`` (PCG64). A batch of permutations is
drawn by a column-vectorized decreasing-index swap shuffle: for
``i = n-1, …, 1`` every row swaps column ``i`` with a column drawn uniformly
from ``[0, i]``. Independent streams come from ``SeedSequence(seed).spawn``;
results are concatenated in stream order, so output does not depend on the
number of worker threads.

The profiles are evidence about concentration for these functionals only;
they do not decide whether ``(S_n, d_L1)`` forms a Lévy family.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import xarray as xr
from pydantic import BaseModel, ConfigDict
from scipy.stats import chisquare

from .errors import RangeError
from .permutation import Permutation, PermMetricKind

__all__ = [
    "Functional",
    "ConcentrationProfile",
    "DEFAULT_EPSILONS",
    "EXACT_LIMIT",
    "sample_batch",
    "sample_uniform_perm",
    "exact_profile",
    "mc_profile",
    "uniformity_pvalue",
    "levy_table",
]

logger = logging.getLogger(__name__)

Functional = Literal["identity", "fixed"]

EXACT_LIMIT = 8
DEFAULT_EPSILONS: Tuple[Fraction, ...] = tuple(Fraction(j, 20) for j in range(0, 21))

# two-sided 95% normal quantile for binomial confidence half-widths
_Z95 = 1.96


class ConcentrationProfile(BaseModel):
    """``alpha(ε)`` on a grid of ``ε`` for one ``(n, metric, functional)``.

    ``samples`` is ``"exact"`` for enumerated profiles, whose ``alpha`` values
    and ``distribution`` are exact fractions; Monte Carlo profiles carry float
    estimates and binomial 95% half-widths.
    """

    n: int
    metric: PermMetricKind
    functional: Functional
    median: Fraction
    epsilons: Tuple[Fraction, ...]
    alpha: Tuple[Union[Fraction, float], ...]
    ci_halfwidth: Tuple[float, ...]
    samples: Union[int, Literal["exact"]]
    distribution: Optional[Dict[Fraction, Fraction]] = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def alpha_at(self, epsilon: Union[Fraction, float]) -> Union[Fraction, float]:
        return self.alpha[self.epsilons.index(_as_fraction(epsilon))]

    def to_dataset(self) -> xr.Dataset:
        return xr.Dataset(
            data_vars={
                "alpha": (["epsilon"], np.array([float(a) for a in self.alpha])),
                "ci_halfwidth": (["epsilon"], np.array(self.ci_halfwidth)),
            },
            coords={"epsilon": np.array([float(e) for e in self.epsilons])},
            attrs={
                "n": self.n,
                "metric": self.metric,
                "functional": self.functional,
                "median": f"{self.median.numerator}/{self.median.denominator}",
                "samples": str(self.samples),
            },
        )

    def to_rows(self) -> List[Dict[str, object]]:
        rows = []
        for eps, a, ci in zip(self.epsilons, self.alpha, self.ci_halfwidth):
            rows.append(
                {
                    "n": self.n,
                    "metric": self.metric,
                    "functional": self.functional,
                    "epsilon": f"{eps.numerator}/{eps.denominator}",
                    "alpha": (
                        f"{a.numerator}/{a.denominator}" if isinstance(a, Fraction) else a
                    ),
                    "ci_halfwidth": ci,
                    "samples": self.samples,
                }
            )
        return rows


# ----------------------------------------------------------------------------
# Sampling
# ----------------------------------------------------------------------------


def _as_fraction(value: Union[Fraction, float, int, str]) -> Fraction:
    # floats go through their shortest repr so 0.1 means 1/10
    return Fraction(repr(value)) if isinstance(value, float) else Fraction(value)


def _shuffle_batch(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    batch = np.tile(np.arange(n, dtype=np.uint16), (size, 1))
    rows = np.arange(size)
    for i in range(n - 1, 0, -1):
        j = rng.integers(0, i + 1, size=size)
        picked = batch[rows, j].copy()
        batch[rows, j] = batch[:, i]
        batch[:, i] = picked
    return batch


def sample_batch(
    n: int,
    samples: int,
    seed: int,
    streams: int = 1,
    workers: Optional[int] = None,
) -> np.ndarray:
    """``samples x n`` array of uniform permutations from ``streams`` seed streams."""
    if n < 1:
        raise RangeError(f"permutation size must be >= 1, got {n}")
    if n > np.iinfo(np.uint16).max:
        raise RangeError(f"permutation size {n} too large for sampling")
    if samples < 1:
        raise RangeError(f"samples must be >= 1, got {samples}")
    streams = max(1, min(streams, samples))
    children = np.random.SeedSequence(seed).spawn(streams)
    sizes = [samples // streams + (1 if s < samples % streams else 0) for s in range(streams)]

    def draw(index: int) -> np.ndarray:
        return _shuffle_batch(np.random.default_rng(children[index]), n, sizes[index])

    if workers and workers > 1 and streams > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(draw, range(streams)))
    else:
        chunks = [draw(s) for s in range(streams)]
    logger.debug("sampled %d permutations of %d over %d streams", samples, n, streams)
    return np.concatenate(chunks, axis=0)


def sample_uniform_perm(n: int, seed: int) -> Permutation:
    return Permutation._trusted(sample_batch(n, 1, seed)[0].tolist())


# ----------------------------------------------------------------------------
# Profiles
# ----------------------------------------------------------------------------


def _fixed_point(n: int, seed: int, tau: Optional[Permutation]) -> np.ndarray:
    if tau is None:
        # a stream of its own, distinct from the sampling stream of the same seed
        tau = Permutation._trusted(
            _shuffle_batch(np.random.default_rng([seed, n]), n, 1)[0].tolist()
        )
    elif tau.n != n:
        raise RangeError(f"fixed permutation has size {tau.n}, expected {n}")
    return np.asarray(tau.images, dtype=np.int32)


def _totals(batch: np.ndarray, center: np.ndarray, metric: PermMetricKind) -> np.ndarray:
    """``n * d(σ, center)`` per row, as integers."""
    values = batch.astype(np.int32)
    if metric == "l1":
        return np.abs(values - center).sum(axis=1)
    if metric == "hamming":
        return (values != center).sum(axis=1)
    raise ValueError(f"unknown permutation metric {metric!r}")


def _lower_median(sorted_values: Sequence[int]) -> int:
    return sorted_values[(len(sorted_values) - 1) // 2]


def _epsilons(epsilons: Optional[Sequence[Union[Fraction, float, str]]]) -> Tuple[Fraction, ...]:
    if epsilons is None:
        return DEFAULT_EPSILONS
    return tuple(_as_fraction(e) for e in epsilons)


def exact_profile(
    n: int,
    metric: PermMetricKind = "l1",
    functional: Functional = "identity",
    tau: Optional[Permutation] = None,
    seed: int = 0,
    epsilons: Optional[Sequence[Union[Fraction, float, str]]] = None,
) -> ConcentrationProfile:
    """Enumerate ``S_n`` (``n <= 8``) and return the exact profile."""
    if not 1 <= n <= EXACT_LIMIT:
        raise RangeError(f"exact profiles need 1 <= n <= {EXACT_LIMIT}, got {n}")
    center = (
        np.arange(n, dtype=np.int32)
        if functional == "identity"
        else _fixed_point(n, seed, tau)
    )
    batch = np.array(list(itertools.permutations(range(n))), dtype=np.uint16)
    totals = _totals(batch, center, metric)
    count = len(totals)
    values, counts = np.unique(totals, return_counts=True)
    distribution = {
        Fraction(int(v), n): Fraction(int(c), count) for v, c in zip(values, counts)
    }
    median_total = _lower_median(np.sort(totals).tolist())
    grid = _epsilons(epsilons)
    alpha = []
    for eps in grid:
        far = sum(
            c for v, c in zip(values.tolist(), counts.tolist()) if abs(v - median_total) > eps * n
        )
        alpha.append(Fraction(far, count))
    return ConcentrationProfile(
        n=n,
        metric=metric,
        functional=functional,
        median=Fraction(median_total, n),
        epsilons=grid,
        alpha=tuple(alpha),
        ci_halfwidth=tuple(0.0 for _ in grid),
        samples="exact",
        distribution=distribution,
    )


def mc_profile(
    n: int,
    metric: PermMetricKind = "l1",
    functional: Functional = "identity",
    samples: int = 10000,
    seed: int = 0,
    tau: Optional[Permutation] = None,
    center: Optional[Union[Fraction, float]] = None,
    epsilons: Optional[Sequence[Union[Fraction, float, str]]] = None,
    streams: int = 1,
    workers: Optional[int] = None,
) -> ConcentrationProfile:
    """Monte Carlo profile with binomial 95% half-widths.

    Deviations are measured from ``center`` when given, otherwise from the
    empirical lower median.
    """
    fixed = (
        np.arange(n, dtype=np.int32)
        if functional == "identity"
        else _fixed_point(n, seed, tau)
    )
    batch = sample_batch(n, samples, seed, streams=streams, workers=workers)
    totals = _totals(batch, fixed, metric)
    median = (
        Fraction(_lower_median(np.sort(totals).tolist()), n)
        if center is None
        else _as_fraction(center)
    )
    grid = _epsilons(epsilons)
    unique, counts = np.unique(totals, return_counts=True)
    deviation = [abs(Fraction(int(t), n) - median) for t in unique.tolist()]
    alpha: List[float] = []
    halfwidths: List[float] = []
    for eps in grid:
        far = int(sum(c for d, c in zip(deviation, counts.tolist()) if d > eps))
        p = far / samples
        alpha.append(p)
        halfwidths.append(_Z95 * math.sqrt(p * (1 - p) / samples))
    logger.info("mc profile n=%d %s/%s over %d samples", n, metric, functional, samples)
    return ConcentrationProfile(
        n=n,
        metric=metric,
        functional=functional,
        median=median,
        epsilons=grid,
        alpha=tuple(alpha),
        ci_halfwidth=tuple(halfwidths),
        samples=samples,
    )


def uniformity_pvalue(n: int, samples: int, seed: int) -> float:
    """Chi-square p-value of sampled permutation frequencies against uniform."""
    if not 1 <= n <= EXACT_LIMIT:
        raise RangeError(f"uniformity test needs 1 <= n <= {EXACT_LIMIT}, got {n}")
    rank = {p: r for r, p in enumerate(itertools.permutations(range(n)))}
    counts = np.zeros(len(rank), dtype=np.int64)
    for row in sample_batch(n, samples, seed).tolist():
        counts[rank[tuple(row)]] += 1
    if len(counts) == 1:
        return 1.0
    return float(chisquare(counts).pvalue)


def levy_table(
    ns: Sequence[int],
    metric: PermMetricKind = "hamming",
    epsilon: Union[Fraction, float, str] = Fraction(1, 10),
    samples: int = 10000,
    seed: int = 0,
    workers: Optional[int] = None,
) -> List[ConcentrationProfile]:
    """One-point profiles ``alpha(ε)`` across sizes ``ns``, in input order."""

    def run(n: int) -> ConcentrationProfile:
        return mc_profile(n, metric, "identity", samples=samples, seed=seed, epsilons=[epsilon])

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, ns))
    return [run(n) for n in ns]
