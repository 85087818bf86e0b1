import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskbench.coherence import (
    AXIOMS,
    NotComonotonicError,
    check_all,
    check_axiom,
    check_cash_additivity_slope,
    extract_comonotonic_weights,
    verify_representation,
)
from riskbench.core import WeightVector, apply_l_estimator
from riskbench.estimators import (
    build_es2,
    build_es5,
    build_estimator,
    build_var_weights,
    expectile_estimate,
    gaussian_plugin_es,
)

TRIALS = 300


def monotone_simplex(rng, n):
    w = rng.dirichlet(np.ones(n))
    w[::-1].sort()
    return w / w.sum()


class TestAxiomBattery:
    @pytest.mark.parametrize("name", ["es1", "es2", "es3"])
    def test_cre_estimators_pass_everything(self, name):
        spec = build_estimator(name, 0.025, 100)
        report = check_all(spec.as_callable(), 100, trials=TRIALS, seed=3)
        assert report.all_pass, report.failed_axioms()

    @pytest.mark.parametrize("name", ["es4", "es5", "es6"])
    def test_inflated_estimators_fail_only_cash(self, name):
        spec = build_estimator(name, 0.025, 100)
        report = check_all(spec.as_callable(), 100, trials=TRIALS, seed=4)
        assert report.failed_axioms() == ["cash_additivity"]
        w = report["cash_additivity"].witness
        assert w is not None
        assert abs(w.defect) > w.tolerance()

    def test_gaussian_plugin_failures(self):
        fn = lambda x: gaussian_plugin_es(0.01, x)
        report = check_all(fn, 50, trials=TRIALS, seed=5)
        assert report.failed_axioms() == ["monotonicity", "comonotonic_additivity"]

    def test_expectile_fails_only_comonotonic_additivity(self):
        fn = lambda x: expectile_estimate(0.25, x).exp_var
        report = check_all(fn, 30, trials=TRIALS, seed=6)
        assert report.failed_axioms() == ["comonotonic_additivity"]

    def test_empirical_var_subadditivity_spikes(self):
        # two single-spike vectors at the 1% level break subadditivity
        spec = build_var_weights(0.01, 100)
        check = check_axiom(spec.as_callable(), "subadditivity", 100, trials=50, seed=0)
        assert not check.passed
        w = check.witness
        assert w.lhs == 100.0
        assert w.rhs == 0.0

    def test_non_law_invariant_estimator_is_caught(self):
        fn = lambda x: -float(x[0])
        check = check_axiom(fn, "law_invariance", 10, trials=TRIALS, seed=7)
        assert not check.passed

    def test_unknown_axiom(self):
        spec = build_es2(0.1, 20)
        with pytest.raises(ValueError):
            check_axiom(spec.as_callable(), "convexity", 20)


class TestWitness:
    def test_replay_reproduces_defect(self):
        # replay is signed for the one-sided axioms, absolute for the rest
        fn = lambda x: gaussian_plugin_es(0.01, x)
        report = check_all(fn, 40, trials=TRIALS, seed=8)
        assert report.failed_axioms()
        for axiom in report.failed_axioms():
            w = report[axiom].witness
            assert w.replay(fn) == pytest.approx(abs(w.defect), abs=1e-12)

    def test_report_json_shape(self):
        spec = build_es2(0.05, 40)
        report = check_all(spec.as_callable(), 40, trials=50, seed=9)
        data = json.loads(report.to_json())
        assert {c["axiom"] for c in data} == set(AXIOMS)
        assert all(c["passed"] for c in data)


class TestCashSlope:
    def test_slopes_match_weight_sums_exactly(self):
        for name, want in (
            ("es4", 1.0 + 0.5 / 6.275),
            ("es5", 6.5 / 6.0),
            ("es6", 7.0 / 6.0),
        ):
            spec = build_estimator(name, 0.025, 250)
            got = check_cash_additivity_slope(spec.as_callable(), 250)
            assert got == pytest.approx(want, abs=1e-12)

    def test_unit_slope_for_cre(self):
        spec = build_es2(0.025, 250)
        got = check_cash_additivity_slope(spec.as_callable(), 250)
        assert got == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_affine_response(self):
        fn = lambda x: float(np.sort(x)[0] ** 3)
        with pytest.raises(ValueError):
            check_cash_additivity_slope(fn, 5)


class TestRepresentation:
    def test_verify_accepts_matching_pair(self):
        spec = build_es2(0.05, 30)
        res = verify_representation(spec.as_callable(), spec.weight_vector(), trials=100)
        assert res.passed

    def test_verify_rejects_wrong_weights(self):
        spec = build_es2(0.05, 30)
        wrong = WeightVector(np.full(30, 1.0 / 30.0))
        res = verify_representation(spec.as_callable(), wrong, trials=100)
        assert not res.passed
        assert res.witness is not None

    @pytest.mark.parametrize("name", ["es1", "es2", "es3"])
    def test_extraction_round_trip(self, name):
        spec = build_estimator(name, 0.05, 60)
        got = extract_comonotonic_weights(spec.as_callable(), 60)
        assert np.allclose(got.weights, spec.weights.weights, atol=1e-12)

    def test_extraction_rejects_rising_weights(self):
        # empirical VaR puts its unit weight past position one, so the
        # ladder increments rise and cannot come from a monotone CRE
        spec = build_var_weights(0.05, 60)
        with pytest.raises(NotComonotonicError):
            extract_comonotonic_weights(spec.as_callable(), 60)

    @given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=60, deadline=None)
    def test_extraction_inverts_application(self, n, seed):
        rng = np.random.default_rng(seed)
        w = WeightVector(monotone_simplex(rng, n), monotone_flag=True)
        fn = lambda x: apply_l_estimator(w, x)
        got = extract_comonotonic_weights(fn, n)
        assert np.allclose(got.weights, w.weights, atol=1e-12)

    def test_extraction_rejects_inflated_weights(self):
        spec = build_es5(0.025, 100)
        with pytest.raises(NotComonotonicError):
            extract_comonotonic_weights(spec.as_callable(), 100)

    def test_extraction_rejects_expectile(self):
        fn = lambda x: expectile_estimate(0.25, x).exp_var
        with pytest.raises(NotComonotonicError):
            extract_comonotonic_weights(fn, 4)

    def test_extraction_rejects_gaussian_plugin(self):
        fn = lambda x: gaussian_plugin_es(0.025, x)
        with pytest.raises(NotComonotonicError):
            extract_comonotonic_weights(fn, 20)

    def test_error_is_a_value_error(self):
        assert issubclass(NotComonotonicError, ValueError)
