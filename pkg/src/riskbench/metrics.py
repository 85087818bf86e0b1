"""Replication metrics for estimator benchmarking.

One cell = (distribution, scheme, estimator, level). K replications each
draw an estimation sample and one fresh companion outcome of the target
variable; the five metrics compare the estimates against the true risk and
probe the secured position x~ + estimate:

    ae  mean absolute error / true
    se  root mean squared error / true
    sb  mean estimate / true - 1
    rb  -ES1_level(secured) / true
    ct  smallest m/K whose m worst secured outcomes sum to >= 0
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .distributions import TrueRisk, dist_label, sample as draw_dist
from .estimators import EstimatorId, LEstimatorSpec, es1_tail_average
from .sampling import (
    RandomnessContract,
    SamplingScheme,
    draw_secured_companion,
    draw_values,
    scheme_label,
)

__all__ = [
    "NamedEstimator",
    "BenchCell",
    "MetricReport",
    "run_cell",
    "run_group",
    "order_statistic_means",
    "OrderStatisticMeans",
    "DEFAULT_CHUNK",
]

DEFAULT_CHUNK = 4096

# var-style estimators are benchmarked against true VaR instead of true ES
_VAR_IDS = (EstimatorId.VAR_EMP, EstimatorId.VAR_INTERP_1PCT)


@dataclass(frozen=True, eq=False)
class NamedEstimator:
    """A black-box estimator with a display name for reports."""

    name: str
    fn: Callable[[np.ndarray], float]


EstimatorLike = Union[LEstimatorSpec, NamedEstimator]


def estimator_name(est: EstimatorLike) -> str:
    return est.id.value if isinstance(est, LEstimatorSpec) else est.name


@dataclass(frozen=True, eq=False)
class BenchCell:
    """One benchmark cell. K >= 20 and floor(alpha*K) >= 1 so the secured-tail
    metrics are defined."""

    distribution: object
    scheme: SamplingScheme
    estimator: EstimatorLike
    alpha: float
    K: int
    seed: int

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"level alpha must lie in (0, 1), got {self.alpha}")
        if not (isinstance(self.K, int) and self.K >= 20):
            raise ValueError(f"need at least 20 replications, got {self.K!r}")
        if int(self.alpha * self.K) < 1:
            raise ValueError(
                f"secured-tail metrics need floor(alpha*K) >= 1, got alpha*K = {self.alpha * self.K}"
            )
        if isinstance(self.estimator, LEstimatorSpec) and self.estimator.n != self.scheme.n:
            raise ValueError(
                f"estimator built for n={self.estimator.n} cannot score samples of size {self.scheme.n}"
            )


@dataclass(frozen=True)
class MetricReport:
    """The five metrics of one cell plus MC standard errors where defined.

    ct_crossed is False when the secured tail sum never reaches zero, in
    which case ct is pinned at 1.0.
    """

    ae: float
    se: float
    sb: float
    rb: float
    ct: float
    ae_stderr: float
    se_stderr: float
    sb_stderr: float
    ct_crossed: bool = True

    def __post_init__(self):
        if self.ae < 0.0:
            raise ValueError("mean absolute error cannot be negative")
        if self.se < abs(self.sb) - 1e-12 * (1.0 + abs(self.sb)):
            raise ValueError("rms error cannot be below the absolute bias")
        if not (0.0 < self.ct <= 1.0):
            raise ValueError(f"crossing point must lie in (0, 1], got {self.ct}")

    def metric(self, name: str) -> float:
        return {"ae": self.ae, "se": self.se, "sb": self.sb, "rb": self.rb, "ct": self.ct}[name]

    def stderr(self, name: str) -> Optional[float]:
        return {"ae": self.ae_stderr, "se": self.se_stderr, "sb": self.sb_stderr}.get(name)


def _evaluate_replications(
    distribution,
    scheme: SamplingScheme,
    estimators: Sequence[EstimatorLike],
    K: int,
    contract: RandomnessContract,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> tuple[np.ndarray, np.ndarray]:
    """All K replications for one (distribution, scheme) group.

    Returns (estimates matrix of shape (K, len(estimators)), companions of
    shape (K,)). Per-replication streams are keyed by the cell identity and
    the replication index only, so every estimator scores the same draw and
    the result is independent of workers/chunking.
    """
    cell_tag = f"{dist_label(distribution)}|{scheme_label(scheme)}"
    n = scheme.n
    spec_idx = [i for i, e in enumerate(estimators) if isinstance(e, LEstimatorSpec)]
    box_idx = [i for i, e in enumerate(estimators) if not isinstance(e, LEstimatorSpec)]

    estimates = np.empty((K, len(estimators)))
    companions = np.empty(K)

    def fill(c0: int, c1: int) -> None:
        rows = np.empty((c1 - c0, n))
        for j, k in enumerate(range(c0, c1)):
            rows[j] = draw_values(distribution, scheme, contract.stream(f"sample|{cell_tag}", k))
            companions[k] = draw_secured_companion(
                distribution, scheme, contract.stream(f"companion|{cell_tag}", k)
            )
        for i in box_idx:
            fn = estimators[i].fn
            estimates[c0:c1, i] = [fn(row) for row in rows]
        if spec_idx:
            rows.sort(axis=1)
            # one matvec per estimator: the bits of a column then depend only
            # on the cell and the chunk partition, never on which other
            # estimators share the group
            for i in spec_idx:
                estimates[c0:c1, i] = -(rows @ estimators[i].weights.weights)

    spans = [(c0, min(c0 + chunk_size, K)) for c0 in range(0, K, chunk_size)]
    if workers <= 1 or len(spans) == 1:
        for c0, c1 in spans:
            fill(c0, c1)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda span: fill(*span), spans))
    return estimates, companions


def _metrics_from(
    estimates: np.ndarray, companions: np.ndarray, alpha: float, reference: float
) -> MetricReport:
    if not (reference > 0.0 and math.isfinite(reference)):
        raise ValueError(f"true risk must be a positive finite number, got {reference!r}")
    K = estimates.size
    err = estimates - reference
    abs_err = np.abs(err)
    sq_err = err * err

    ae = float(np.mean(abs_err)) / reference
    m2 = float(np.mean(sq_err))
    se = math.sqrt(m2) / reference
    sb = float(np.mean(estimates)) / reference - 1.0

    ae_stderr = float(np.std(abs_err, ddof=1)) / math.sqrt(K) / reference
    sb_stderr = float(np.std(estimates, ddof=1)) / math.sqrt(K) / reference
    if m2 > 0.0:
        se_stderr = float(np.std(sq_err, ddof=1)) / math.sqrt(K) / (2.0 * math.sqrt(m2)) / reference
    else:
        se_stderr = 0.0

    secured = companions + estimates
    rb = -es1_tail_average(secured, alpha) / reference

    prefix = np.cumsum(np.sort(secured))
    hits = np.nonzero(prefix >= 0.0)[0]
    if hits.size:
        ct = float(hits[0] + 1) / K
        crossed = True
    else:
        ct = 1.0
        crossed = False

    return MetricReport(
        ae=ae,
        se=se,
        sb=sb,
        rb=float(rb),
        ct=ct,
        ae_stderr=ae_stderr,
        se_stderr=se_stderr,
        sb_stderr=sb_stderr,
        ct_crossed=crossed,
    )


def reference_value(estimator: EstimatorLike, true: TrueRisk) -> float:
    """VaR-family estimators are measured against true VaR, the rest against ES."""
    if isinstance(estimator, LEstimatorSpec) and estimator.id in _VAR_IDS:
        return true.var_alpha
    return true.es_alpha


def run_group(
    distribution,
    scheme: SamplingScheme,
    estimators: Sequence[EstimatorLike],
    levels: Sequence[float],
    references: Sequence[float],
    K: int,
    contract: RandomnessContract,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> list[MetricReport]:
    """Run one (distribution, scheme) group of cells on shared draws.

    levels[i] and references[i] are the metric level and true value for
    estimators[i]. Identical to running each cell alone: the streams do not
    depend on the estimator list.
    """
    if not (len(estimators) == len(levels) == len(references)):
        raise ValueError("estimators, levels, and references must align")
    for a in levels:
        if int(a * K) < 1:
            raise ValueError(f"floor(alpha*K) >= 1 required, got alpha={a}, K={K}")
    estimates, companions = _evaluate_replications(
        distribution, scheme, estimators, K, contract, workers=workers, chunk_size=chunk_size
    )
    return [
        _metrics_from(estimates[:, i], companions, float(levels[i]), float(references[i]))
        for i in range(len(estimators))
    ]


def run_cell(
    cell: BenchCell,
    true_risk: TrueRisk,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> MetricReport:
    """All five metrics for one cell against a precomputed true risk."""
    contract = RandomnessContract(cell.seed)
    return run_group(
        cell.distribution,
        cell.scheme,
        [cell.estimator],
        [cell.alpha],
        [reference_value(cell.estimator, true_risk)],
        cell.K,
        contract,
        workers=workers,
        chunk_size=chunk_size,
    )[0]


@dataclass(frozen=True, eq=False)
class OrderStatisticMeans:
    positions: tuple[int, ...]
    means: np.ndarray
    stderrs: np.ndarray


def order_statistic_means(
    dist,
    n: int,
    positions: Sequence[int],
    k_oracle: int = 200_000,
    seed: int = 0,
) -> OrderStatisticMeans:
    """Monte Carlo E[X_(i:n)] at the given 1-based positions, batch-means stderr.

    An independent oracle for semi-analytic bias checks: for a weight vector
    a, the expected estimate is -sum_i a_i E[X_(i:n)].
    """
    positions = tuple(int(p) for p in positions)
    if not positions:
        raise ValueError("need at least one position")
    for p in positions:
        if not (1 <= p <= n):
            raise ValueError(f"positions must lie in 1..{n}, got {p}")
    batches = 20
    per_batch = max(k_oracle // batches, 1)
    rng = np.random.default_rng(seed)
    idx = np.array(positions) - 1
    batch_means = np.empty((batches, len(positions)))
    chunk = max(1, min(per_batch, (1 << 22) // max(n, 1)))
    for b in range(batches):
        acc = np.zeros(len(positions))
        done = 0
        while done < per_batch:
            take = min(chunk, per_batch - done)
            block = draw_dist(dist, take * n, rng).reshape(take, n)
            block.sort(axis=1)
            acc += block[:, idx].sum(axis=0)
            done += take
        batch_means[b] = acc / per_batch
    means = batch_means.mean(axis=0)
    stderrs = batch_means.std(axis=0, ddof=1) / math.sqrt(batches)
    return OrderStatisticMeans(positions=positions, means=means, stderrs=stderrs)
