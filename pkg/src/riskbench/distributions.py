"""Return distributions for the benchmark and their true risk values.

Normal and Student-t true risks have closed forms; the normal inverse
Gaussian (and any h-day sum without a closed form) goes through an
antithetic Monte Carlo oracle whose standard error is reported from batch
means. Profit is positive: VaR and ES of a centered distribution come out
positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy.stats import norm, t as student_t

from .estimators import empirical_quantile_var, es2_tail_average

__all__ = [
    "Normal",
    "StudentT",
    "Nig",
    "HorizonSum",
    "DistributionSpec",
    "dist_label",
    "parse_dist",
    "sample",
    "inverse_gaussian_sample",
    "nig_sample",
    "NigMoments",
    "nig_moments",
    "horizon_convolve",
    "horizon_target",
    "TrueRisk",
    "true_risk",
    "true_risk_levels",
    "normal_var",
    "normal_es",
    "student_t_var",
    "student_t_es",
    "DEFAULT_ORACLE_K",
    "ORACLE_BATCHES",
]

DEFAULT_ORACLE_K = 10_000_000
ORACLE_BATCHES = 20


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0.0 and math.isfinite(self.sigma) and math.isfinite(self.mu)):
            raise ValueError(f"need finite mu and sigma > 0, got ({self.mu}, {self.sigma})")


@dataclass(frozen=True)
class StudentT:
    """Standard Student-t with nu > 1 degrees of freedom (ES needs a tail mean)."""

    nu: float

    def __post_init__(self):
        if not (self.nu > 1.0 and math.isfinite(self.nu)):
            raise ValueError(f"need nu > 1, got {self.nu}")


@dataclass(frozen=True)
class Nig:
    """Normal inverse Gaussian with tail a, asymmetry b, location mu, scale delta.

    Mixture form: X = mu + b*V + sqrt(V)*Z with V inverse Gaussian of mean
    delta/gamma and shape delta^2, gamma = sqrt(a^2 - b^2), Z standard normal.
    """

    a: float
    b: float
    mu: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        ok = (
            math.isfinite(self.a)
            and math.isfinite(self.b)
            and math.isfinite(self.mu)
            and math.isfinite(self.delta)
            and self.a > 0.0
            and abs(self.b) < self.a
            and self.delta > 0.0
        )
        if not ok:
            raise ValueError(
                f"need a > 0, |b| < a, delta > 0, got (a={self.a}, b={self.b}, delta={self.delta})"
            )

    @property
    def gamma(self) -> float:
        return math.sqrt(self.a * self.a - self.b * self.b)


@dataclass(frozen=True)
class HorizonSum:
    """Sum of h independent copies of a base distribution; oracle-only true risk."""

    base: Union[Normal, StudentT, Nig]
    h: int

    def __post_init__(self):
        if not (isinstance(self.h, int) and self.h >= 1):
            raise ValueError(f"horizon must be a positive integer, got {self.h!r}")


DistributionSpec = Union[Normal, StudentT, Nig]


def dist_label(dist) -> str:
    """Canonical text form, also accepted by parse_dist."""
    if isinstance(dist, Normal):
        return f"normal:{dist.mu:g}:{dist.sigma:g}"
    if isinstance(dist, StudentT):
        return f"t:{dist.nu:g}"
    if isinstance(dist, Nig):
        return f"nig:{dist.a:g}:{dist.b:g}:{dist.mu:g}:{dist.delta:g}"
    if isinstance(dist, HorizonSum):
        return f"sum{dist.h}({dist_label(dist.base)})"
    raise ValueError(f"unknown distribution object {dist!r}")


def parse_dist(text: str) -> DistributionSpec:
    """Parse 'normal:mu:sigma', 't:nu', or 'nig:a:b:mu:delta'."""
    parts = text.strip().split(":")
    kind, args = parts[0].lower(), parts[1:]
    try:
        if kind == "normal":
            if len(args) not in (0, 2):
                raise ValueError
            return Normal(*(float(v) for v in args)) if args else Normal()
        if kind in ("t", "student"):
            if len(args) != 1:
                raise ValueError
            return StudentT(float(args[0]))
        if kind == "nig":
            if len(args) not in (2, 4):
                raise ValueError
            return Nig(*(float(v) for v in args))
    except ValueError as exc:
        if str(exc):
            raise
        raise ValueError(f"malformed distribution spec {text!r}") from None
    raise ValueError(f"unknown distribution kind {kind!r} in {text!r}")


def inverse_gaussian_sample(
    mean: float, shape: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Inverse Gaussian draws via the Michael-Schucany-Haas transform.

    One squared normal gives the smaller root of the defining quadratic;
    a uniform accept step picks between that root and its conjugate
    mean^2/root with probability mean/(mean + root).
    """
    if not (mean > 0.0 and shape > 0.0):
        raise ValueError("inverse Gaussian needs mean > 0 and shape > 0")
    y = rng.standard_normal(size) ** 2
    half = mean / (2.0 * shape)
    x = mean + half * (mean * y - np.sqrt(4.0 * mean * shape * y + (mean * y) ** 2))
    u = rng.random(size)
    return np.where(u <= mean / (mean + x), x, mean * mean / x)


def nig_sample(spec: Nig, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw NIG variates through the inverse-Gaussian variance mixture."""
    v = inverse_gaussian_sample(spec.delta / spec.gamma, spec.delta**2, size, rng)
    z = rng.standard_normal(size)
    return spec.mu + spec.b * v + np.sqrt(v) * z


def sample(dist, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `size` variates; the draw order per variate is fixed per distribution."""
    if isinstance(dist, Normal):
        return dist.mu + dist.sigma * rng.standard_normal(size)
    if isinstance(dist, StudentT):
        return rng.standard_t(dist.nu, size)
    if isinstance(dist, Nig):
        return nig_sample(dist, size, rng)
    if isinstance(dist, HorizonSum):
        total = sample(dist.base, size, rng)
        for _ in range(dist.h - 1):
            total = total + sample(dist.base, size, rng)
        return total
    raise ValueError(f"unknown distribution object {dist!r}")


class NigMoments(NamedTuple):
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


def nig_moments(spec: Nig) -> NigMoments:
    g = spec.gamma
    return NigMoments(
        mean=spec.mu + spec.delta * spec.b / g,
        variance=spec.delta * spec.a**2 / g**3,
        skewness=3.0 * spec.b / (spec.a * math.sqrt(spec.delta * g)),
        excess_kurtosis=3.0 * (1.0 + 4.0 * spec.b**2 / spec.a**2) / (spec.delta * g),
    )


def horizon_convolve(spec: Nig, h: int) -> Nig:
    """The h-fold convolution: NIG is closed under summation in (mu, delta)."""
    if not (isinstance(h, int) and h >= 1):
        raise ValueError(f"horizon must be a positive integer, got {h!r}")
    return Nig(spec.a, spec.b, h * spec.mu, h * spec.delta)


def horizon_target(dist, h: int):
    """The distribution of the h-day sum of i.i.d. copies of dist."""
    if not (isinstance(h, int) and h >= 1):
        raise ValueError(f"horizon must be a positive integer, got {h!r}")
    if h == 1:
        return dist
    if isinstance(dist, Normal):
        return Normal(h * dist.mu, dist.sigma * math.sqrt(h))
    if isinstance(dist, Nig):
        return horizon_convolve(dist, h)
    if isinstance(dist, StudentT):
        return HorizonSum(dist, h)
    raise ValueError(f"unknown distribution object {dist!r}")


# ---------------------------------------------------------------------------
# True risk


def normal_var(dist: Normal, alpha: float) -> float:
    return float(-dist.mu - dist.sigma * norm.ppf(alpha))


def normal_es(dist: Normal, alpha: float) -> float:
    return float(-dist.mu + dist.sigma * norm.pdf(norm.ppf(alpha)) / alpha)


def student_t_var(nu: float, alpha: float) -> float:
    return float(-student_t.ppf(alpha, nu))


def student_t_es(nu: float, alpha: float) -> float:
    """Analytic tail mean: pdf(q) * (nu + q^2) / (alpha * (nu - 1)), q the alpha quantile."""
    q = student_t.ppf(alpha, nu)
    return float(student_t.pdf(q, nu) * (nu + q * q) / (alpha * (nu - 1.0)))


@dataclass(frozen=True)
class TrueRisk:
    """True VaR and ES at one level, with the method that produced them.

    standard_error is the batch-means standard error of es_alpha for the
    Monte Carlo oracle and exactly 0.0 for closed forms.
    """

    var_alpha: float
    es_alpha: float
    method: str
    standard_error: float
    oracle_k: int | None = None
    oracle_seed: int | None = None

    def __post_init__(self):
        if self.method not in ("closed_form", "mc_oracle"):
            raise ValueError(f"unknown method {self.method!r}")
        slack = 1e-12 * (1.0 + abs(self.es_alpha))
        if self.es_alpha < self.var_alpha - slack:
            raise ValueError(
                f"ES {self.es_alpha!r} below VaR {self.var_alpha!r}; tail average "
                "cannot beat its quantile"
            )


def _antithetic_values(dist, half: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Paired draws (X+, X-) sharing mixing variables, Z mirrored."""
    if isinstance(dist, Normal):
        z = rng.standard_normal(half)
        return dist.mu + dist.sigma * z, dist.mu - dist.sigma * z
    if isinstance(dist, StudentT):
        w = rng.chisquare(dist.nu, half)
        z = rng.standard_normal(half)
        val = z * np.sqrt(dist.nu / w)
        return val, -val
    if isinstance(dist, Nig):
        v = inverse_gaussian_sample(dist.delta / dist.gamma, dist.delta**2, half, rng)
        z = rng.standard_normal(half)
        drift = dist.mu + dist.b * v
        spread = np.sqrt(v) * z
        return drift + spread, drift - spread
    if isinstance(dist, HorizonSum):
        plus = np.zeros(half)
        minus = np.zeros(half)
        for _ in range(dist.h):
            p, m = _antithetic_values(dist.base, half, rng)
            plus += p
            minus += m
        return plus, minus
    raise ValueError(f"unknown distribution object {dist!r}")


def _oracle_sample(dist, k: int, seed: int) -> np.ndarray:
    """k antithetic draws (pairs adjacent), k a multiple of 2*ORACLE_BATCHES."""
    rng = np.random.default_rng(seed)
    half = k // 2
    plus, minus = _antithetic_values(dist, half, rng)
    out = np.empty(k)
    out[0::2] = plus
    out[1::2] = minus
    return out


def _round_up(k: int, multiple: int) -> int:
    return ((k + multiple - 1) // multiple) * multiple


def true_risk_levels(
    dist,
    alphas,
    *,
    oracle_k: int = DEFAULT_ORACLE_K,
    seed: int = 0,
    force_oracle: bool = False,
) -> dict[float, TrueRisk]:
    """True risk at several levels, sharing one oracle sample across levels.

    Closed forms are used for Normal and Student-t unless force_oracle; NIG
    and h-day sums always go through the oracle. The oracle size is rounded
    up so the 20 batches tile it in whole antithetic pairs.
    """
    levels = [float(a) for a in alphas]
    for a in levels:
        if not (0.0 < a < 1.0):
            raise ValueError(f"level alpha must lie in (0, 1), got {a}")
    if not force_oracle:
        if isinstance(dist, Normal):
            return {
                a: TrueRisk(normal_var(dist, a), normal_es(dist, a), "closed_form", 0.0)
                for a in levels
            }
        if isinstance(dist, StudentT):
            return {
                a: TrueRisk(
                    student_t_var(dist.nu, a), student_t_es(dist.nu, a), "closed_form", 0.0
                )
                for a in levels
            }

    k = _round_up(max(int(oracle_k), 2 * ORACLE_BATCHES), 2 * ORACLE_BATCHES)
    values = _oracle_sample(dist, k, seed)
    batches = values.reshape(ORACLE_BATCHES, -1)
    out = {}
    for a in levels:
        es = es2_tail_average(values, a)
        var = empirical_quantile_var(values, a)
        per_batch = np.array([es2_tail_average(b, a) for b in batches])
        se = float(np.std(per_batch, ddof=1) / math.sqrt(ORACLE_BATCHES))
        out[a] = TrueRisk(var, es, "mc_oracle", se, oracle_k=k, oracle_seed=seed)
    return out


def true_risk(
    dist,
    alpha: float,
    *,
    oracle_k: int = DEFAULT_ORACLE_K,
    seed: int = 0,
    force_oracle: bool = False,
) -> TrueRisk:
    """True VaR and ES of dist at one level. See true_risk_levels."""
    return true_risk_levels(
        dist, [alpha], oracle_k=oracle_k, seed=seed, force_oracle=force_oracle
    )[float(alpha)]
