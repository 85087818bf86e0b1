"""Samples, simplex weight vectors, and weighted order-statistic functionals.

Estimators here are maps x -> -<w, sort(x)> for a weight vector w, or finite
suprema of such maps. Profit is positive in the sample, risk is positive in
the output, so a weight vector summing to one turns a pure cash position
x = m * (1,...,1) into risk -m.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

WEIGHT_SUM_ATOL = 1e-12
# Slack for non-increase checks: absorbs last-ulp noise from float partial
# sums without letting a genuinely increasing pair through.
MONOTONE_ATOL = 1e-12

PERMUTATION_ORACLE_MAX_N = 8

__all__ = [
    "Sample",
    "SortedSample",
    "WeightVector",
    "GeneralWeightScheme",
    "SupremumCre",
    "SupremumResult",
    "sort_sample",
    "apply_l_estimator",
    "apply_supremum",
    "permutation_closure_oracle",
    "weights_to_json",
    "weights_from_json",
    "WEIGHT_SUM_ATOL",
    "MONOTONE_ATOL",
    "PERMUTATION_ORACLE_MAX_N",
]


def _as_vector(values, name: str) -> np.ndarray:
    """Copy into a read-only 1-d float array, rejecting empties and non-finite entries."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must contain at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Sample:
    """A P&L sample of length n >= 1, profit positive. Entries are finite reals."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_vector(self.values, "sample"))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class SortedSample:
    """A sample carried in non-decreasing order (worst outcome first)."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.values, "sorted sample")
        if np.any(np.diff(arr) < 0):
            raise ValueError("sorted sample must be non-decreasing")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


def sort_sample(x: Union[Sample, Sequence[float], np.ndarray]) -> SortedSample:
    """Sort a sample into non-decreasing order.

    Duplicates are preserved; the result always passes the SortedSample
    order check.
    """
    values = x.values if isinstance(x, Sample) else _as_vector(x, "sample")
    return SortedSample(np.sort(values))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """A point of the probability simplex: w_i >= 0, sum w_i = 1 (within 1e-12).

    Args:
        weights: the entries, validated at construction.
        monotone_flag: set when the entries are non-increasing; verified.

    Raises:
        ValueError: negative or non-finite entries, sum off the simplex, or
            a monotone_flag that the entries do not support.
    """

    weights: np.ndarray
    monotone_flag: bool = False

    def __post_init__(self):
        arr = _as_vector(self.weights, "weights")
        if np.any(arr < 0.0):
            raise ValueError("weights must be non-negative")
        total = float(np.sum(arr))
        if abs(total - 1.0) > WEIGHT_SUM_ATOL:
            raise ValueError(
                f"weights must sum to 1 within {WEIGHT_SUM_ATOL}: got {total!r}"
            )
        if self.monotone_flag and np.any(np.diff(arr) > MONOTONE_ATOL):
            raise ValueError("monotone_flag set but weights are not non-increasing")
        object.__setattr__(self, "weights", arr)

    @property
    def n(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True, eq=False)
class GeneralWeightScheme:
    """An arbitrary finite weight scheme, no simplex constraint, with a name.

    Used for estimators whose weights leave the simplex (negative entries or
    a sum away from one), e.g. quantile interpolations or inflated tails.
    """

    weights: np.ndarray
    name: str

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_vector(self.weights, "weights"))
        if not self.name:
            raise ValueError("scheme name must be non-empty")

    @property
    def n(self) -> int:
        return int(self.weights.size)


class SupremumResult(NamedTuple):
    value: float
    winner: int


@dataclass(frozen=True, eq=False)
class SupremumCre:
    """A finite family of non-increasing simplex weight vectors, applied as a sup.

    Every candidate must carry monotone_flag and share one length.
    """

    candidates: tuple[WeightVector, ...]

    def __post_init__(self):
        cands = tuple(self.candidates)
        if not cands:
            raise ValueError("candidate set must be non-empty")
        for w in cands:
            if not isinstance(w, WeightVector):
                raise ValueError("candidates must be WeightVector instances")
            if not w.monotone_flag:
                raise ValueError("every candidate must be non-increasing (monotone_flag)")
        lengths = {w.n for w in cands}
        if len(lengths) != 1:
            raise ValueError(f"candidates must share one length, got {sorted(lengths)}")
        object.__setattr__(self, "candidates", cands)

    @property
    def n(self) -> int:
        return self.candidates[0].n


def _weight_array(w) -> np.ndarray:
    if isinstance(w, (WeightVector, GeneralWeightScheme)):
        return w.weights
    return _as_vector(w, "weights")


def _sorted_values(x) -> np.ndarray:
    if isinstance(x, SortedSample):
        return x.values
    if isinstance(x, Sample):
        return np.sort(x.values)
    return np.sort(_as_vector(x, "sample"))


def apply_l_estimator(w, x) -> float:
    """Evaluate -<w, s(x)> where s(x) is the sample sorted non-decreasingly.

    Args:
        w: WeightVector, GeneralWeightScheme, or a plain weight array.
        x: Sample, SortedSample, or a plain array (sorted on the fly).

    Returns:
        The weighted order-statistic risk value as a float.

    Raises:
        ValueError: length mismatch between weights and sample.
    """
    weights = _weight_array(w)
    values = _sorted_values(x)
    if weights.size != values.size:
        raise ValueError(
            f"weights of length {weights.size} cannot score a sample of length {values.size}"
        )
    return float(-np.dot(weights, values))


def apply_supremum(m: SupremumCre, x) -> SupremumResult:
    """Evaluate max over candidates of -<a, s(x)>, reporting the winner.

    Ties go to the lowest candidate index.
    """
    values = _sorted_values(x)
    if m.n != values.size:
        raise ValueError(
            f"candidates of length {m.n} cannot score a sample of length {values.size}"
        )
    scores = np.array([-np.dot(w.weights, values) for w in m.candidates])
    winner = int(np.argmax(scores))
    return SupremumResult(float(scores[winner]), winner)


def permutation_closure_oracle(m: SupremumCre, x) -> float:
    """Brute-force sup over candidates and all coordinate permutations of <sigma(a), -x>.

    The sample is NOT sorted here; the sup runs over every rearrangement of
    each candidate against x as given. For non-increasing candidates this
    equals apply_supremum(m, x).value by the rearrangement inequality, which
    is exactly what makes this an independent cross-check. Guarded to n <= 8.
    """
    if isinstance(x, (Sample, SortedSample)):
        values = x.values
    else:
        values = _as_vector(x, "sample")
    n = values.size
    if n > PERMUTATION_ORACLE_MAX_N:
        raise ValueError(
            f"permutation oracle is factorial in n; refusing n={n} > {PERMUTATION_ORACLE_MAX_N}"
        )
    if m.n != n:
        raise ValueError(
            f"candidates of length {m.n} cannot score a sample of length {n}"
        )
    neg_x = -values
    best = -np.inf
    for w in m.candidates:
        for perm in itertools.permutations(w.weights.tolist()):
            best = max(best, float(np.dot(perm, neg_x)))
    return best


def weights_to_json(w) -> str:
    """Serialize a weight vector/scheme as a JSON array of doubles, full precision."""
    return json.dumps([float(v) for v in _weight_array(w)])


def weights_from_json(text: str, *, monotone_flag: bool = False) -> WeightVector:
    """Parse a JSON array of doubles back into a WeightVector."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("weight JSON must be an array of numbers")
    return WeightVector(np.array(data, dtype=float), monotone_flag=monotone_flag)
