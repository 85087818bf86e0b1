"""Concrete tail-risk estimators and their order-statistic weight vectors.

Six expected-shortfall estimators, two value-at-risk estimators, a Gaussian
moment plug-in, an expectile-based estimator, and spectral discretizations.
All order-statistic estimators are materialized as full-length weight
arrays (zeros beyond the tail) so they can be compared, serialized, and fed
to the coherence machinery uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .core import (
    MONOTONE_ATOL,
    WEIGHT_SUM_ATOL,
    GeneralWeightScheme,
    Sample,
    WeightVector,
    apply_l_estimator,
)

__all__ = [
    "EstimatorId",
    "LEstimatorSpec",
    "build_var_weights",
    "build_var_interp_1pct",
    "build_es1",
    "build_es2",
    "build_es3",
    "build_es4",
    "build_es5",
    "build_es6",
    "build_estimator",
    "gaussian_plugin_es",
    "ExpectileSolution",
    "expectile_estimate",
    "SpectrumSpec",
    "es_spectrum",
    "uniform_spectrum",
    "build_spectral_weights",
    "build_spectral_weights_alt",
    "empirical_quantile_var",
    "es1_tail_average",
    "es2_tail_average",
    "DEFAULT_XI",
]

# Tail-trim shape parameter for the inflated variants (#4, #6).
DEFAULT_XI = 1.0 / 3.0

# Snap for floor(alpha*n): collapses float dust around exact integers so
# e.g. alpha=0.025, n=240 lands on 6 with zero fractional part.
_FLOOR_SNAP = 1e-9

EXPECTILE_RESIDUAL_RTOL = 1e-10


class EstimatorId(str, Enum):
    VAR_EMP = "var"
    VAR_INTERP_1PCT = "var1"
    ES1 = "es1"
    ES2 = "es2"
    ES3 = "es3"
    ES4 = "es4"
    ES5 = "es5"
    ES6 = "es6"
    SPECTRAL = "spectral"
    SPECTRAL_ALT = "spectral_alt"
    CUSTOM = "custom"


def _snapped_split(value: float) -> tuple[int, float]:
    """Split into (floor, fractional part), snapping float dust at integers."""
    m = int(np.floor(value + _FLOOR_SNAP))
    frac = value - m
    if frac < _FLOOR_SNAP:
        frac = 0.0
    return m, frac


def _check_level(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"level alpha must lie in (0, 1), got {alpha}")


def _check_size(n: int) -> None:
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"sample size n must be a positive integer, got {n!r}")


def _structurally_coherent(weights: np.ndarray) -> bool:
    """Simplex membership plus non-increase: the comonotonic-CRE criterion."""
    if np.any(weights < 0.0):
        return False
    if abs(float(np.sum(weights)) - 1.0) > WEIGHT_SUM_ATOL:
        return False
    return not np.any(np.diff(weights) > MONOTONE_ATOL)


@dataclass(frozen=True, eq=False)
class LEstimatorSpec:
    """A named weighted order-statistic estimator of fixed size.

    Attributes:
        id: which estimator family this is.
        alpha: the tail level the weights were built for.
        n: sample size the weights apply to.
        weights: full-length weight scheme (no simplex constraint imposed).
        is_cre: True when the weights are non-negative, sum to one, and are
            non-increasing, which makes x -> -<w, s(x)> a coherent estimator.
    """

    id: EstimatorId
    alpha: float
    n: int
    weights: GeneralWeightScheme
    is_cre: bool

    def evaluate(self, x) -> float:
        return apply_l_estimator(self.weights, x)

    def as_callable(self) -> Callable[[np.ndarray], float]:
        weights = self.weights
        return lambda x: apply_l_estimator(weights, x)

    def weight_vector(self) -> WeightVector:
        """The weights as a simplex point; only available when is_cre."""
        if not self.is_cre:
            raise ValueError(f"{self.id.value} weights do not lie on the simplex")
        return WeightVector(self.weights.weights, monotone_flag=True)


def _finish(est_id: EstimatorId, alpha: float, n: int, w: np.ndarray) -> LEstimatorSpec:
    scheme = GeneralWeightScheme(w, name=est_id.value)
    return LEstimatorSpec(
        id=est_id,
        alpha=alpha,
        n=n,
        weights=scheme,
        is_cre=_structurally_coherent(scheme.weights),
    )


def build_var_weights(alpha: float, n: int) -> LEstimatorSpec:
    """Empirical VaR: weight one on the (floor(alpha*n)+1)-th worst outcome."""
    _check_level(alpha)
    _check_size(n)
    m, _ = _snapped_split(alpha * n)
    if m + 1 > n:
        raise ValueError(f"empirical VaR needs floor(alpha*n)+1 <= n, got {m + 1} > {n}")
    w = np.zeros(n)
    w[m] = 1.0
    return _finish(EstimatorId.VAR_EMP, alpha, n, w)


def build_var_interp_1pct(n: int) -> LEstimatorSpec:
    """Interpolated 1% VaR, defined only at n=250: 0.49 x_(2) + 0.51 x_(3)."""
    if n != 250:
        raise ValueError(f"interpolated 1% VaR weights are defined for n=250 only, got n={n}")
    w = np.zeros(n)
    w[1] = 0.49
    w[2] = 0.51
    return _finish(EstimatorId.VAR_INTERP_1PCT, 0.01, n, w)


def build_es1(alpha: float, n: int) -> LEstimatorSpec:
    """Average of the floor(alpha*n) worst outcomes, equal weights 1/floor(alpha*n)."""
    _check_level(alpha)
    _check_size(n)
    m, _ = _snapped_split(alpha * n)
    if m < 1:
        raise ValueError(f"need floor(alpha*n) >= 1, got alpha*n = {alpha * n}")
    w = np.zeros(n)
    w[:m] = 1.0 / m
    return _finish(EstimatorId.ES1, alpha, n, w)


def _es2_weight_array(alpha: float, n: int) -> np.ndarray:
    m, frac = _snapped_split(alpha * n)
    if m < 1:
        raise ValueError(f"need floor(alpha*n) >= 1, got alpha*n = {alpha * n}")
    if frac > 0.0 and m + 1 > n:
        raise ValueError(f"fractional tail weight needs position {m + 1} <= n")
    scale = m + frac
    w = np.zeros(n)
    w[:m] = 1.0 / scale
    if frac > 0.0:
        # The trailing weight is dropped entirely when alpha*n is an integer,
        # making this coincide with the equal-weight average bit for bit.
        w[m] = frac / scale
    return w


def build_es2(alpha: float, n: int) -> LEstimatorSpec:
    """Tail average at exact mass alpha*n: equal weights plus one fractional weight."""
    _check_level(alpha)
    _check_size(n)
    return _finish(EstimatorId.ES2, alpha, n, _es2_weight_array(alpha, n))


def _es34_weight_array(alpha: float, n: int, first_coef: float) -> np.ndarray:
    v = alpha * (n + 1)
    m, r = _snapped_split(v)
    if m < 2:
        raise ValueError(f"need floor(alpha*(n+1)) >= 2, got alpha*(n+1) = {v}")
    if m + 1 > n:
        raise ValueError(f"boundary weight needs position {m + 1} <= n")
    scale = m + r
    w = np.zeros(n)
    w[0] = first_coef / scale
    w[1 : m - 1] = 1.0 / scale
    w[m - 1] = (1.0 + 2.0 * r - r * r) / 2.0 / scale
    w[m] = r * r / 2.0 / scale
    return w


def build_es3(alpha: float, n: int) -> LEstimatorSpec:
    """Quantile-integral weights at level alpha*(n+1), worst outcome bumped to 3/2."""
    _check_level(alpha)
    _check_size(n)
    return _finish(EstimatorId.ES3, alpha, n, _es34_weight_array(alpha, n, 1.5))


def build_es4(alpha: float, n: int, xi: float = DEFAULT_XI) -> LEstimatorSpec:
    """Same layout as the quantile-integral weights with the worst-outcome
    coefficient inflated to 1/2 + 1/(1-xi); leaves the simplex (sum > 1)."""
    _check_level(alpha)
    _check_size(n)
    if not (0.0 <= xi < 1.0):
        raise ValueError(f"xi must lie in [0, 1), got {xi}")
    first = 0.5 + 1.0 / (1.0 - xi)
    return _finish(EstimatorId.ES4, alpha, n, _es34_weight_array(alpha, n, first))


def _es56_weight_array(alpha: float, n: int, first_coef: float) -> np.ndarray:
    m, _ = _snapped_split(alpha * (n + 1))
    if m < 1:
        raise ValueError(f"need floor(alpha*(n+1)) >= 1, got alpha*(n+1) = {alpha * (n + 1)}")
    if m > n:
        raise ValueError(f"tail length {m} exceeds sample size {n}")
    w = np.zeros(n)
    w[0] = first_coef / m
    w[1:m] = 1.0 / m
    return w


def build_es5(alpha: float, n: int) -> LEstimatorSpec:
    """Truncated tail average over floor(alpha*(n+1)) outcomes, worst bumped to 3/2."""
    _check_level(alpha)
    _check_size(n)
    return _finish(EstimatorId.ES5, alpha, n, _es56_weight_array(alpha, n, 1.5))


def build_es6(alpha: float, n: int, xi: float = DEFAULT_XI) -> LEstimatorSpec:
    """Truncated tail average with the worst-outcome coefficient 1/2 + 1/(1-xi)."""
    _check_level(alpha)
    _check_size(n)
    if not (0.0 <= xi < 1.0):
        raise ValueError(f"xi must lie in [0, 1), got {xi}")
    first = 0.5 + 1.0 / (1.0 - xi)
    return _finish(EstimatorId.ES6, alpha, n, _es56_weight_array(alpha, n, first))


_BUILDERS: dict[str, Callable[..., LEstimatorSpec]] = {
    "var": build_var_weights,
    "es1": build_es1,
    "es2": build_es2,
    "es3": build_es3,
    "es4": build_es4,
    "es5": build_es5,
    "es6": build_es6,
}


def build_estimator(name: str, alpha: float, n: int) -> LEstimatorSpec:
    """Build a named estimator spec; 'var1' ignores alpha (fixed 1% level)."""
    key = name.lower()
    if key == "var1":
        return build_var_interp_1pct(n)
    try:
        builder = _BUILDERS[key]
    except KeyError:
        raise ValueError(
            f"unknown estimator {name!r}; expected one of "
            f"{sorted([*_BUILDERS, 'var1'])}"
        ) from None
    return builder(alpha, n)


def gaussian_plugin_es(alpha: float, x) -> float:
    """Normal moment plug-in: -(mean - sd * phi(Phi^-1(alpha)) / alpha).

    The sample standard deviation uses the n-1 denominator, so n >= 2 is
    required. Not an order-statistic estimator, and not monotone: it can
    assign higher risk to a dominating sample.
    """
    _check_level(alpha)
    values = x.values if isinstance(x, Sample) else np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("plug-in needs a one-dimensional sample with n >= 2")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample must contain only finite values")
    q = norm.ppf(alpha)
    sd = float(np.std(values, ddof=1))
    return float(-(np.mean(values) - sd * norm.pdf(q) / alpha))


@dataclass(frozen=True, eq=False)
class ExpectileSolution:
    """Exact empirical expectile of a sample and the induced risk value.

    Attributes:
        alpha: asymmetry level in (0, 1/2].
        expectile: the unique root e of
            alpha * sum (x_i - e)_+ = (1-alpha) * sum (x_i - e)_-.
        exp_var: -expectile; the risk value, same orientation as the other
            estimators here.
        n_star: number of sample points <= expectile.
        realized_weights: the sample-dependent simplex weights that reproduce
            exp_var as -<a, s(x)> at this particular sample.
    """

    alpha: float
    expectile: float
    exp_var: float
    n_star: int
    realized_weights: WeightVector


def expectile_estimate(alpha: float, x) -> ExpectileSolution:
    """Solve the empirical expectile equation exactly, segment by segment.

    The first-order condition g(c) = alpha*sum(x-c)_+ - (1-alpha)*sum(x-c)_-
    is continuous, piecewise linear, and strictly decreasing, so the root is
    pinned between two order statistics and solved by one linear equation;
    no iterative tolerance is involved. Requires 0 < alpha <= 1/2 so that
    the realized weights are non-increasing.
    """
    if not (0.0 < alpha <= 0.5):
        raise ValueError(f"alpha must lie in (0, 1/2], got {alpha}")
    values = x.values if isinstance(x, Sample) else np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("expectile needs a non-empty one-dimensional sample")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample must contain only finite values")

    s = np.sort(values)
    n = s.size
    prefix = np.cumsum(s)
    total = prefix[-1]

    def g_at(j: int) -> float:
        # value of g at the j-th order statistic (1-based), split at k=j
        c = s[j - 1]
        above = total - prefix[j - 1]
        below = prefix[j - 1]
        return alpha * (above - (n - j) * c) - (1.0 - alpha) * (j * c - below)

    # g(s_1) >= 0 and g(s_n) <= 0 always; find the first order statistic
    # where g dips to zero or below.
    root = None
    if g_at(1) <= 0.0:
        root = float(s[0])
    else:
        for j in range(2, n + 1):
            if g_at(j) <= 0.0:
                k = j - 1
                below = prefix[k - 1] if k >= 1 else 0.0
                num = alpha * (total - below) + (1.0 - alpha) * below
                den = alpha * (n - k) + (1.0 - alpha) * k
                root = num / den
                break
    if root is None:
        # g(s_n) <= 0 mathematically, but prefix-sum dust can leave g_at(n)
        # a few ulp above zero on near-constant samples; the root is then
        # s_n itself and the residual check below still vouches for it.
        root = float(s[-1])

    diff = s - root
    residual = alpha * float(np.sum(diff[diff > 0.0])) + (1.0 - alpha) * float(
        np.sum(diff[diff < 0.0])
    )
    scale = 1.0 + float(np.sum(np.abs(diff)))
    if abs(residual) > EXPECTILE_RESIDUAL_RTOL * scale:
        raise RuntimeError(
            f"expectile residual {residual!r} exceeds tolerance at scale {scale!r}"
        )

    n_star = int(np.searchsorted(s, root, side="right"))
    den = (1.0 - 2.0 * alpha) * n_star + n * alpha
    a = np.full(n, alpha / den)
    a[:n_star] = (1.0 - alpha) / den
    a /= a.sum()
    weights = WeightVector(a, monotone_flag=True)

    return ExpectileSolution(
        alpha=alpha,
        expectile=float(root),
        exp_var=float(-root),
        n_star=n_star,
        realized_weights=weights,
    )


# ---------------------------------------------------------------------------
# Spectral weights


_SPECTRUM_GRID = np.concatenate(
    [np.geomspace(1e-8, 1e-3, 24, endpoint=False), np.linspace(1e-3, 1.0, 1025)]
)


@dataclass(frozen=True, eq=False)
class SpectrumSpec:
    """A risk spectrum: non-increasing, non-negative density on (0,1], unit mass.

    The declared properties are checked on a fixed validation grid at
    construction and the integral is checked by adaptive quadrature (pass
    jump locations through `discontinuities` so the quadrature sees them).

    Attributes:
        evaluator: pointwise phi(t) for t in (0, 1].
        name: short identifier, used by the CLI.
        sup_bound: declared sup of phi; defaults to the grid maximum.
        discontinuities: interior jump points of phi.
        exact_cells: optional closed form for the per-cell integrals
            n -> (int over ((i-1)/n, i/n] of phi)_i, bypassing quadrature.
        exact_integral: optional closed form for t -> int_0^t phi.
    """

    evaluator: Callable[[float], float]
    name: str = "custom"
    sup_bound: Optional[float] = None
    discontinuities: tuple[float, ...] = ()
    exact_cells: Optional[Callable[[int], np.ndarray]] = None
    exact_integral: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        vals = np.array([self.evaluator(float(t)) for t in _SPECTRUM_GRID])
        if not np.all(np.isfinite(vals)):
            raise ValueError("spectrum must be finite on (0, 1]")
        if np.any(vals < 0.0):
            raise ValueError("spectrum must be non-negative")
        tol = 1e-9 * (1.0 + float(np.max(vals)))
        if np.any(np.diff(vals) > tol):
            raise ValueError("spectrum must be non-increasing on (0, 1]")
        mass = self.cumulative(1.0)
        if abs(mass - 1.0) > 1e-8:
            raise ValueError(f"spectrum must integrate to 1 within 1e-8, got {mass!r}")
        if self.sup_bound is None:
            object.__setattr__(self, "sup_bound", float(np.max(vals)))

    def cumulative(self, t: float) -> float:
        """int_0^t phi, by closed form when available, else adaptive quadrature."""
        if not (0.0 <= t <= 1.0):
            raise ValueError(f"t must lie in [0, 1], got {t}")
        if t == 0.0:
            return 0.0
        if self.exact_integral is not None:
            return float(self.exact_integral(t))
        pts = [p for p in self.discontinuities if 0.0 < p < t]
        val, _ = integrate.quad(
            self.evaluator, 0.0, t, points=pts or None, limit=200, epsabs=1e-10
        )
        return float(val)


def es_spectrum(alpha: float) -> SpectrumSpec:
    """The expected-shortfall spectrum: (1/alpha) on (0, alpha], 0 above."""
    _check_level(alpha)
    inv = 1.0 / alpha

    def phi(t: float) -> float:
        return inv if t <= alpha else 0.0

    return SpectrumSpec(
        evaluator=phi,
        name="es",
        sup_bound=inv,
        discontinuities=(alpha,),
        exact_cells=lambda n: _es2_weight_array(alpha, n),
        exact_integral=lambda t: min(t, alpha) / alpha,
    )


def uniform_spectrum() -> SpectrumSpec:
    """The flat spectrum phi = 1: the sample-mean functional."""
    return SpectrumSpec(
        evaluator=lambda t: 1.0,
        name="uniform",
        sup_bound=1.0,
        exact_cells=lambda n: np.full(n, 1.0 / n),
        exact_integral=lambda t: t,
    )


def build_spectral_weights(spectrum: SpectrumSpec, n: int) -> WeightVector:
    """Discretize a spectrum by per-cell integrals a_i = int over ((i-1)/n, i/n].

    Quadrature-built cells are validated against the declared properties
    (unit mass within 1e-8, non-increase within 1e-9) and then projected
    back onto the simplex; exact closed-form cells are used untouched.
    """
    _check_size(n)
    if spectrum.exact_cells is not None:
        w = np.asarray(spectrum.exact_cells(n), dtype=float)
        if w.size != n:
            raise ValueError("exact_cells returned the wrong length")
        return WeightVector(w, monotone_flag=True)

    edges = np.arange(n + 1) / n
    cells = np.empty(n)
    for i in range(n):
        pts = [p for p in spectrum.discontinuities if edges[i] < p < edges[i + 1]]
        val, _ = integrate.quad(
            spectrum.evaluator,
            edges[i],
            edges[i + 1],
            points=pts or None,
            limit=100,
            epsabs=1e-10,
        )
        cells[i] = val
    total = float(np.sum(cells))
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"cell integrals sum to {total!r}, expected 1 within 1e-8")
    tol = 1e-9 * (1.0 + float(spectrum.sup_bound) / n)
    if np.any(np.diff(cells) > tol):
        raise ValueError("cell integrals are not non-increasing")
    cells = np.minimum.accumulate(np.maximum(cells, 0.0))
    cells /= cells.sum()
    return WeightVector(cells, monotone_flag=True)


def build_spectral_weights_alt(spectrum: SpectrumSpec, n: int) -> WeightVector:
    """Discretize by right-endpoint evaluation: a_i = phi(i/n) / sum_k phi(k/n)."""
    _check_size(n)
    raw = np.array([spectrum.evaluator(i / n) for i in range(1, n + 1)])
    total = float(np.sum(raw))
    if total <= 0.0:
        raise ValueError("spectrum vanishes at every grid point i/n")
    return WeightVector(raw / total, monotone_flag=True)


# ---------------------------------------------------------------------------
# Direct tail evaluations on large flat samples. Same definitions as the
# weight-built estimators, but via partition rather than a full sort, for
# oracle-sized inputs. Cross-checked against the weight route in the tests.


def _flat_sample(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("need a non-empty one-dimensional sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample must contain only finite values")
    return arr


def empirical_quantile_var(values, alpha: float) -> float:
    """-x_(floor(alpha n)+1): the plain empirical quantile VaR."""
    _check_level(alpha)
    arr = _flat_sample(values)
    m, _ = _snapped_split(alpha * arr.size)
    if m + 1 > arr.size:
        raise ValueError(f"need floor(alpha*n)+1 <= n, got {m + 1} > {arr.size}")
    return float(-np.partition(arr, m)[m])


def es1_tail_average(values, alpha: float) -> float:
    """Minus the mean of the floor(alpha n) worst outcomes."""
    _check_level(alpha)
    arr = _flat_sample(values)
    m, _ = _snapped_split(alpha * arr.size)
    if m < 1:
        raise ValueError(f"need floor(alpha*n) >= 1, got alpha*n = {alpha * arr.size}")
    if m >= arr.size:
        return float(-np.mean(arr))
    return float(-np.mean(np.partition(arr, m)[:m]))


def es2_tail_average(values, alpha: float) -> float:
    """Exact-mass tail average: fractional weight on the boundary order statistic."""
    _check_level(alpha)
    arr = _flat_sample(values)
    m, frac = _snapped_split(alpha * arr.size)
    if m < 1:
        raise ValueError(f"need floor(alpha*n) >= 1, got alpha*n = {alpha * arr.size}")
    if m >= arr.size:
        return float(-np.mean(arr))
    part = np.partition(arr, m)
    tail = float(np.sum(part[:m])) + frac * float(part[m])
    return float(-tail / (m + frac))
