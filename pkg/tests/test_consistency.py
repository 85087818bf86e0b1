import numpy as np
import pytest

from riskbench.consistency import (
    ConsistencyRow,
    alternative_approximation,
    check_partial_integrals,
    check_uniform_bound,
    empirical_consistency,
    integral_approximation,
)
from riskbench.distributions import Normal
from riskbench.estimators import es_spectrum, uniform_spectrum

ALPHA = 0.025


class TestUniformBound:
    def test_integral_builder_attains_declared_sup(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        res = check_uniform_bound(approx, [50, 100, 250])
        assert res.passed
        assert res.declared == 1.0 / ALPHA
        assert res.bound == 40.0  # interior cells integrate to exactly sup/n

    def test_alternative_builder_overshoots(self):
        # renormalizing pointwise values pushes interior cells above the sup
        # whenever alpha*n is fractional; consistency does not need the bound
        approx = alternative_approximation(es_spectrum(ALPHA))
        res = check_uniform_bound(approx, [250])
        assert not res.passed
        assert res.bound == pytest.approx(250.0 / 6.0, abs=1e-12)

    def test_uniform_spectrum_is_tight_for_both(self):
        for factory in (integral_approximation, alternative_approximation):
            res = check_uniform_bound(factory(uniform_spectrum()), [10, 100])
            assert res.passed
            assert res.bound == pytest.approx(1.0, abs=1e-12)

    def test_needs_sizes(self):
        with pytest.raises(ValueError):
            check_uniform_bound(integral_approximation(uniform_spectrum()), [])


class TestPartialIntegrals:
    def test_integral_builder_is_exact_on_cell_boundaries(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        n = 200
        grid = [k / n for k in range(1, n + 1, 13)]
        errs = check_partial_integrals(approx, grid, [n])
        assert errs[n] <= 1e-12

    def test_error_bounded_by_sup_over_n(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        grid = list(np.linspace(0.001, 1.0, 113))
        errs = check_partial_integrals(approx, grid, [100, 1000, 10_000])
        sup = 1.0 / ALPHA
        for n, err in errs.items():
            assert err <= sup / n + 1e-12

    def test_error_shrinks_with_n(self):
        # the step density deviates from phi only inside the cell containing
        # alpha, so probe the middle of that cell; sizes are chosen with
        # fractional alpha*n because integer alpha*n makes the builder exact
        approx = integral_approximation(es_spectrum(ALPHA))
        errs = {}
        for n in (130, 1310, 13_010):
            probe = (np.floor(ALPHA * n) + 0.5) / n
            errs[n] = check_partial_integrals(approx, [probe], [n])[n]
        assert errs[130] > errs[1310] > errs[13_010] > 1e-9

    def test_exact_when_alpha_n_is_integer(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        grid = list(np.linspace(0.001, 1.0, 229))
        errs = check_partial_integrals(approx, grid, [1000, 10_000])
        assert all(err <= 1e-12 for err in errs.values())


class TestEmpirical:
    def test_median_error_ladder_decreases(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        rows = empirical_consistency(
            Normal(), approx, ALPHA, [100, 1000, 10_000], reps=30, seed=0
        )
        assert [r.n for r in rows] == [100, 1000, 10_000]
        meds = [r.median_abs_error for r in rows]
        assert meds[0] > meds[1] > meds[2]
        assert all(r.iqr >= 0.0 for r in rows)

    def test_deterministic_given_seed(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        a = empirical_consistency(Normal(), approx, ALPHA, [200], reps=10, seed=3)
        b = empirical_consistency(Normal(), approx, ALPHA, [200], reps=10, seed=3)
        assert a[0].median_abs_error == b[0].median_abs_error
        assert a[0].iqr == b[0].iqr

    def test_reference_override_shifts_errors(self):
        approx = integral_approximation(es_spectrum(ALPHA))
        near = empirical_consistency(Normal(), approx, ALPHA, [500], reps=10, seed=4)
        far = empirical_consistency(
            Normal(), approx, ALPHA, [500], reps=10, seed=4, reference=10.0
        )
        assert far[0].median_abs_error > near[0].median_abs_error

    def test_row_type(self):
        approx = alternative_approximation(es_spectrum(ALPHA))
        rows = empirical_consistency(Normal(), approx, ALPHA, [100], reps=5, seed=5)
        assert isinstance(rows[0], ConsistencyRow)
