"""Black-box coherence testing and robust-representation extraction.

An estimator here is any callable from length-n float arrays to floats.
Each axiom check runs a fixed adversarial deck first (unit spikes, constant
shifts, paired tail spikes) and then randomized probes, and returns either
PASS with the trial count or FAIL with a replayable witness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import WEIGHT_SUM_ATOL, WeightVector, apply_l_estimator

__all__ = [
    "AXIOMS",
    "Witness",
    "AxiomCheck",
    "CoherenceReport",
    "NotComonotonicError",
    "check_axiom",
    "check_all",
    "check_cash_additivity_slope",
    "extract_comonotonic_weights",
    "verify_representation",
    "VerificationResult",
    "VIOLATION_RTOL",
]

Estimator = Callable[[np.ndarray], float]

AXIOMS = (
    "monotonicity",
    "cash_additivity",
    "positive_homogeneity",
    "subadditivity",
    "law_invariance",
    "comonotonic_additivity",
)

# A defect counts as a violation when it exceeds 1e-9 * (1 + scale), where
# scale is the largest magnitude among the probe inputs involved.
VIOLATION_RTOL = 1e-9


class NotComonotonicError(ValueError):
    """The probed estimator is not a comonotonic law-invariant CRE."""


def _tol(*arrays_or_scalars) -> float:
    scale = 0.0
    for a in arrays_or_scalars:
        arr = np.asarray(a, dtype=float)
        if arr.size:
            scale = max(scale, float(np.max(np.abs(arr))))
    return VIOLATION_RTOL * (1.0 + scale)


@dataclass(frozen=True, eq=False)
class Witness:
    """A concrete violation: the inputs fed to the estimator and both side values.

    `lhs - rhs` is the defect; a witness is only stored when the defect
    exceeds tolerance, and `replay` recomputes it from scratch so a report
    can always be double-checked against the live estimator.
    """

    axiom: str
    inputs: tuple[np.ndarray, ...]
    aux: Optional[float]
    lhs: float
    rhs: float
    description: str

    @property
    def defect(self) -> float:
        return self.lhs - self.rhs

    def tolerance(self) -> float:
        extra = () if self.aux is None else (self.aux,)
        return _tol(*self.inputs, *extra)

    def replay(self, estimator: Estimator) -> float:
        """Re-evaluate the defect for this witness against an estimator."""
        x = self.inputs[0]
        if self.axiom == "monotonicity":
            y = self.inputs[1]
            return estimator(x) - estimator(y)
        if self.axiom == "cash_additivity":
            m = self.aux
            return abs(estimator(x + m) - (estimator(x) - m))
        if self.axiom == "positive_homogeneity":
            lam = self.aux
            return abs(estimator(lam * x) - lam * estimator(x))
        if self.axiom == "subadditivity":
            y = self.inputs[1]
            return estimator(x + y) - (estimator(x) + estimator(y))
        if self.axiom == "law_invariance":
            y = self.inputs[1]
            return abs(estimator(y) - estimator(x))
        if self.axiom == "comonotonic_additivity":
            y = self.inputs[1]
            return abs(estimator(x + y) - (estimator(x) + estimator(y)))
        raise ValueError(f"unknown axiom {self.axiom!r}")


@dataclass(frozen=True, eq=False)
class AxiomCheck:
    axiom: str
    passed: bool
    trials: int
    witness: Optional[Witness]


@dataclass(frozen=True, eq=False)
class CoherenceReport:
    """Per-axiom results for one estimator."""

    checks: tuple[AxiomCheck, ...]

    def __getitem__(self, axiom: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_axioms(self) -> list[str]:
        return [c.axiom for c in self.checks if not c.passed]

    def to_json(self) -> str:
        out = []
        for c in self.checks:
            entry = {"axiom": c.axiom, "passed": c.passed, "trials": c.trials}
            if c.witness is not None:
                entry["witness"] = {
                    "inputs": [v.tolist() for v in c.witness.inputs],
                    "aux": c.witness.aux,
                    "lhs": c.witness.lhs,
                    "rhs": c.witness.rhs,
                    "defect": c.witness.defect,
                    "description": c.witness.description,
                }
            out.append(entry)
        return json.dumps(out, indent=2)


def _unit(n: int, i: int) -> np.ndarray:
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _deck(n: int) -> list[np.ndarray]:
    """Deterministic probes: constants, unit spikes, and large tail spikes."""
    vecs = [
        np.zeros(n),
        np.ones(n),
        -np.ones(n),
        _unit(n, 0),
        -_unit(n, 0),
        100.0 * _unit(n, 0),
        -100.0 * _unit(n, 0),
        np.linspace(-1.0, 1.0, n),
    ]
    if n >= 2:
        vecs.append(_unit(n, n - 1))
        vecs.append(-100.0 * _unit(n, n - 1))
    return vecs


def _random_probes(rng: np.random.Generator, trials: int, n: int) -> np.ndarray:
    """Normal rows at random scales in [0.1, 100]; every fifth row heavy-tailed."""
    probes = rng.standard_normal((trials, n))
    scales = 10.0 ** rng.uniform(-1.0, 2.0, size=(trials, 1))
    probes *= scales
    heavy = rng.random(trials) < 0.2
    if np.any(heavy):
        probes[heavy] = rng.standard_t(2.0, size=(int(heavy.sum()), n)) * scales[heavy]
    return probes


def _monotone_transform(rng: np.random.Generator, base: np.ndarray) -> np.ndarray:
    """A random non-decreasing map applied entrywise to the base vector."""
    a = rng.uniform(0.0, 3.0)
    b = rng.uniform(0.0, 2.0)
    c = rng.uniform(-1.0, 1.0)
    knot = rng.uniform(-1.0, 1.0)
    return a * base + b * np.maximum(base, knot) + c


def check_axiom(
    estimator: Estimator,
    axiom: str,
    n: int,
    trials: int = 1000,
    seed: int = 0,
) -> AxiomCheck:
    """Probe one axiom with the adversarial deck plus randomized inputs.

    Args:
        estimator: callable from length-n arrays to floats; must be pure.
        axiom: one of AXIOMS.
        n: probe dimension, n >= 1.
        trials: number of randomized probes after the deck.
        seed: probe stream seed; identical seeds replay identical probes.

    Returns:
        AxiomCheck; on FAIL the witness replays to a violation above
        tolerance by construction.
    """
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}; expected one of {AXIOMS}")
    if n < 1:
        raise ValueError("probe dimension must be at least 1")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    rng = np.random.default_rng(seed)
    probes = np.vstack([_deck(n), _random_probes(rng, trials, n)]) if trials else np.array(_deck(n))
    total = probes.shape[0]

    def fail(inputs, aux, lhs, rhs, description) -> AxiomCheck:
        witness = Witness(
            axiom=axiom,
            inputs=tuple(np.array(v) for v in inputs),
            aux=aux,
            lhs=float(lhs),
            rhs=float(rhs),
            description=description,
        )
        return AxiomCheck(axiom=axiom, passed=False, trials=total, witness=witness)

    if axiom == "monotonicity":
        # x >= y entrywise must give estimator(x) <= estimator(y).
        for i, x in enumerate(probes):
            if i == 0 and n >= 1:
                pairs = [(_unit(n, 0), np.zeros(n)), (np.ones(n), np.zeros(n))]
            else:
                pairs = []
            bump = np.abs(rng.standard_normal(n)) * (1.0 + 0.1 * float(np.max(np.abs(x))))
            mask = rng.random(n) < 0.5
            pairs.append((x + np.where(mask, bump, 0.0), x))
            for hi, lo in pairs:
                lhs, rhs = estimator(hi), estimator(lo)
                if lhs - rhs > _tol(hi, lo):
                    return fail((hi, lo), None, lhs, rhs, "higher outcomes scored riskier")
    elif axiom == "cash_additivity":
        shifts = (1.0, -1.0, 0.5, -0.5)
        for x in probes:
            base = estimator(x)
            for m in shifts + (float(rng.uniform(-10.0, 10.0)),):
                got = estimator(x + m)
                want = base - m
                if abs(got - want) > _tol(x, m):
                    return fail((x,), m, got, want, "cash shift not subtracted one for one")
    elif axiom == "positive_homogeneity":
        lams = (0.0, 0.5, 2.0)
        for x in probes:
            base = estimator(x)
            for lam in lams + (float(rng.uniform(0.0, 20.0)),):
                got = estimator(lam * x)
                want = lam * base
                if abs(got - want) > _tol(x, lam * x):
                    return fail((x,), lam, got, want, "not positively homogeneous")
    elif axiom == "subadditivity":
        fixed_pairs = []
        if n >= 2:
            fixed_pairs.append((-100.0 * _unit(n, 0), -100.0 * _unit(n, 1)))
            fixed_pairs.append((_unit(n, 0), _unit(n, 1)))
        for x, y in fixed_pairs:
            lhs = estimator(x + y)
            rhs = estimator(x) + estimator(y)
            if lhs - rhs > _tol(x, y):
                return fail((x, y), None, lhs, rhs, "merging positions raised total risk")
        for x in probes:
            y_ind = rng.standard_normal(n) * (1.0 + 0.5 * float(np.std(x)))
            y_cor = 0.5 * x + 0.5 * rng.standard_normal(n)
            for y in (y_ind, y_cor):
                lhs = estimator(x + y)
                rhs = estimator(x) + estimator(y)
                if lhs - rhs > _tol(x, y):
                    return fail((x, y), None, lhs, rhs, "merging positions raised total risk")
    elif axiom == "law_invariance":
        for x in probes:
            perm = rng.permutation(n)
            for y in (x[perm], x[::-1]):
                lhs, rhs = estimator(y), estimator(x)
                if abs(lhs - rhs) > _tol(x):
                    return fail((x, y), None, lhs, rhs, "reordering the sample changed the value")
    elif axiom == "comonotonic_additivity":
        for x in probes:
            u = _monotone_transform(rng, x)
            v = _monotone_transform(rng, x)
            lhs = estimator(u + v)
            rhs = estimator(u) + estimator(v)
            if abs(lhs - rhs) > _tol(u, v):
                return fail((u, v), None, lhs, rhs, "not additive on comonotone pairs")

    return AxiomCheck(axiom=axiom, passed=True, trials=total, witness=None)


def check_all(
    estimator: Estimator, n: int, trials: int = 1000, seed: int = 0
) -> CoherenceReport:
    """Run every axiom check; axiom order is fixed, seeds are derived per axiom."""
    checks = tuple(
        check_axiom(estimator, axiom, n, trials=trials, seed=seed + idx)
        for idx, axiom in enumerate(AXIOMS)
    )
    return CoherenceReport(checks=checks)


def check_cash_additivity_slope(
    estimator: Estimator,
    n: int,
    *,
    tol: float = VIOLATION_RTOL,
) -> float:
    """Measure s in estimator(x + m*1) = estimator(x) - s*m over a shift grid.

    For weighted order-statistic estimators s is the weight sum, so a
    measured slope away from 1 quantifies the cash-additivity defect.

    Raises:
        ValueError: the response to cash shifts is not affine within
            tol * (1 + scale) across the grid and two base points.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    grid = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
    bases = [np.zeros(n), np.linspace(-1.0, 1.0, n)]
    slopes = []
    for x in bases:
        v0 = estimator(x)
        for m in grid:
            slopes.append((v0 - estimator(x + m)) / m)
    spread = max(slopes) - min(slopes)
    if spread > tol * (1.0 + max(abs(m) for m in grid)):
        raise ValueError(
            f"cash response is not affine: slope spread {spread!r} over the shift grid"
        )
    # Zeros base with unit shift gives the cleanest float read of the slope.
    return float(estimator(np.zeros(n)) - estimator(np.ones(n)))


@dataclass(frozen=True, eq=False)
class VerificationResult:
    passed: bool
    trials: int
    witness: Optional[Witness]


def verify_representation(
    estimator: Estimator,
    weights: WeightVector,
    trials: int = 200,
    seed: int = 0,
) -> VerificationResult:
    """Check estimator(x) == -<weights, sort(x)> on deck plus random probes."""
    n = weights.n
    rng = np.random.default_rng(seed)
    probes = np.vstack([_deck(n), _random_probes(rng, trials, n)])
    for x in probes:
        got = estimator(x)
        want = apply_l_estimator(weights, x)
        if abs(got - want) > _tol(x):
            witness = Witness(
                axiom="law_invariance",
                inputs=(np.array(x), np.array(x)),
                aux=None,
                lhs=float(got),
                rhs=float(want),
                description="estimator deviates from its candidate weight representation",
            )
            return VerificationResult(passed=False, trials=probes.shape[0], witness=witness)
    return VerificationResult(passed=True, trials=probes.shape[0], witness=None)


def extract_comonotonic_weights(
    estimator: Estimator,
    n: int,
    *,
    tol: float = VIOLATION_RTOL,
    verify: bool = True,
    verify_trials: int = 64,
    seed: int = 0,
) -> WeightVector:
    """Recover the unique weight vector of a comonotonic law-invariant CRE.

    Probes the ladder v_k = (-1 repeated k times, then zeros), already
    sorted, and reads off a_k = estimator(v_k) - estimator(v_{k-1}). For a
    weighted order-statistic estimator this telescopes back to its weights
    exactly (up to float), which is the round-trip the tests pin down.

    The increments must be non-negative, non-increasing, and sum to 1
    within tol; with verify=True the recovered weights are additionally
    probed against the estimator, so estimators that merely look
    order-statistic on the ladder (sample-dependent weights, suprema over
    several vectors) are rejected rather than silently misrepresented.

    Raises:
        NotComonotonicError: any of the checks above fails.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    ladder = np.tril(np.full((n + 1, n), -1.0), k=-1)
    values = np.array([estimator(row) for row in ladder])
    a = np.diff(values)

    if float(np.min(a)) < -tol:
        raise NotComonotonicError(
            f"extracted weight {float(np.min(a))!r} is negative beyond tolerance"
        )
    rises = np.diff(a)
    if rises.size and float(np.max(rises)) > tol:
        raise NotComonotonicError(
            f"extracted weights increase by {float(np.max(rises))!r}; not non-increasing"
        )
    total = float(np.sum(a)) if a.size else 0.0
    if abs(total - 1.0) > tol:
        raise NotComonotonicError(f"extracted weights sum to {total!r}, expected 1")

    # Scrub float dust only where the hard checks would otherwise trip the
    # stricter WeightVector gates; exact extractions pass through untouched.
    if float(np.min(a)) < 0.0:
        a = np.maximum(a, 0.0)
    if rises.size and float(np.max(np.diff(a))) > 0.0:
        a = np.minimum.accumulate(a)
    if abs(float(np.sum(a)) - 1.0) > WEIGHT_SUM_ATOL:
        a = a / np.sum(a)
    weights = WeightVector(a, monotone_flag=True)

    if verify:
        res = verify_representation(estimator, weights, trials=verify_trials, seed=seed)
        if not res.passed:
            raise NotComonotonicError(
                "probe-ladder weights do not reproduce the estimator: defect "
                f"{res.witness.defect!r} at a verification probe"
            )
    return weights
