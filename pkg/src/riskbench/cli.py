"""Command line front end.

Subcommands map one-to-one onto the library surface: `weights` prints an
estimator's order-statistic weights, `coherence` runs the axiom battery,
`true-risk` evaluates a distribution's reference risk, `consistency`
tabulates spectral approximation error against sample size, and `bench`
runs the Monte Carlo study.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from .bench import BenchConfig, format_metric_table, run_study
from .coherence import NotComonotonicError, check_all, extract_comonotonic_weights
from .consistency import (
    alternative_approximation,
    empirical_consistency,
    integral_approximation,
)
from .distributions import parse_dist, true_risk
from .estimators import (
    build_estimator,
    es_spectrum,
    expectile_estimate,
    gaussian_plugin_es,
    uniform_spectrum,
)


def _add_weights(sub) -> None:
    p = sub.add_parser("weights", help="print an estimator's order-statistic weights")
    p.add_argument("--estimator", required=True)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--n", type=int, default=250)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit a JSON object")
    fmt.add_argument("--csv", action="store_true", help="emit position,weight lines")
    p.set_defaults(run=_cmd_weights)


def _cmd_weights(args) -> int:
    spec = build_estimator(args.estimator, args.alpha, args.n)
    w = spec.weights.weights
    if args.json:
        payload = {
            "estimator": spec.id.value,
            "alpha": spec.alpha,
            "n": spec.n,
            "is_cre": spec.is_cre,
            "sum": repr(float(w.sum())),
            "weights": [repr(float(v)) for v in w],
        }
        print(json.dumps(payload, indent=2))
        return 0
    if args.csv:
        print("position,weight")
        for i, v in enumerate(w, start=1):
            print(f"{i},{float(v)!r}")
        return 0
    print(f"estimator: {spec.id.value}  alpha: {spec.alpha}  n: {spec.n}")
    print(f"is_cre: {spec.is_cre}  sum: {float(w.sum())!r}")
    nz = np.nonzero(w)[0]
    last = int(nz[-1]) + 1 if nz.size else 0
    for i in range(last):
        print(f"  a[{i + 1}] = {float(w[i])!r}")
    if last < w.size:
        print(f"  a[{last + 1}..{w.size}] = 0.0")
    return 0


def _add_coherence(sub) -> None:
    p = sub.add_parser("coherence", help="test an estimator against the risk axioms")
    p.add_argument(
        "--estimator",
        required=True,
        help="a weight-based estimator name, or gaussian / expvar",
    )
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--n", type=int, default=250)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=_cmd_coherence)


def _resolve_functional(name: str, alpha: float, n: int):
    if name == "gaussian":
        return lambda x: gaussian_plugin_es(alpha, x)
    if name == "expvar":
        return lambda x: expectile_estimate(alpha, x).exp_var
    return build_estimator(name, alpha, n).as_callable()


def _cmd_coherence(args) -> int:
    fn = _resolve_functional(args.estimator, args.alpha, args.n)
    report = check_all(fn, args.n, trials=args.trials, seed=args.seed)
    if args.json:
        print(report.to_json())
    else:
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            print(f"{check.axiom:<24} {status}  ({check.trials} trials)")
            if check.witness is not None:
                print(f"    {check.witness.description}")
                print(
                    f"    lhs={check.witness.lhs!r} rhs={check.witness.rhs!r} "
                    f"defect={check.witness.defect!r}"
                )
    return 0 if report.all_pass else 1


def _add_true_risk(sub) -> None:
    p = sub.add_parser("true-risk", help="reference risk of a distribution")
    p.add_argument("--dist", required=True, help="e.g. normal:0:1, t:5, nig:a:b:mu:delta")
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--oracle-k", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_true_risk)


def _cmd_true_risk(args) -> int:
    dist = parse_dist(args.dist)
    risk = true_risk(dist, args.alpha, oracle_k=args.oracle_k, seed=args.seed)
    payload = {
        "dist": args.dist,
        "alpha": args.alpha,
        "var_alpha": risk.var_alpha,
        "es_alpha": risk.es_alpha,
        "method": risk.method,
        "standard_error": risk.standard_error,
    }
    if risk.method == "mc_oracle":
        payload["oracle_k"] = risk.oracle_k
        payload["oracle_seed"] = risk.oracle_seed
    print(json.dumps(payload, indent=2))
    return 0


def _add_consistency(sub) -> None:
    p = sub.add_parser(
        "consistency", help="empirical error of a spectral approximation vs sample size"
    )
    p.add_argument("--spectrum", choices=("es", "uniform"), default="es")
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--builder", choices=("integral", "alternative"), default="integral")
    p.add_argument("--n", default="100,1000,10000", help="comma separated sample sizes")
    p.add_argument("--dist", default="normal:0:1")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_consistency)


def _cmd_consistency(args) -> int:
    spectrum = es_spectrum(args.alpha) if args.spectrum == "es" else uniform_spectrum()
    factory = (
        integral_approximation if args.builder == "integral" else alternative_approximation
    )
    approx = factory(spectrum)
    n_list = [int(tok) for tok in args.n.split(",") if tok.strip()]
    dist = parse_dist(args.dist)
    rows = empirical_consistency(
        dist, approx, args.alpha, n_list, reps=args.reps, seed=args.seed
    )
    print("n,median_abs_error,iqr")
    for row in rows:
        print(f"{row.n},{row.median_abs_error!r},{row.iqr!r}")
    return 0


def _add_bench(sub) -> None:
    p = sub.add_parser("bench", help="run the Monte Carlo estimator study")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--out", help="write results here instead of stdout")
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int, help="replications per cell")
    p.add_argument("--oracle-k", type=int, dest="oracle_k")
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument(
        "--table", action="store_true", help="also print the formatted metric table"
    )
    p.set_defaults(run=_cmd_bench)


def _cmd_bench(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = BenchConfig.from_json(fh.read())
    else:
        config = BenchConfig()
    overrides = {}
    for name in ("seed", "k", "oracle_k", "workers", "format", "out"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if overrides:
        config = replace(config, **overrides)

    table = run_study(config)
    text = table.to_csv() if config.format == "csv" else table.to_json()
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(table.rows)} rows to {config.out}")
    else:
        sys.stdout.write(text)
    if args.table:
        print(format_metric_table(table))
    return 0


def _add_extract(sub) -> None:
    p = sub.add_parser(
        "extract", help="recover order-statistic weights from a black-box estimator"
    )
    p.add_argument("--estimator", required=True, help="estimator name, or gaussian / expvar")
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--n", type=int, default=250)
    p.set_defaults(run=_cmd_extract)


def _cmd_extract(args) -> int:
    fn = _resolve_functional(args.estimator, args.alpha, args.n)
    try:
        w = extract_comonotonic_weights(fn, args.n)
    except NotComonotonicError as exc:
        print(f"not representable as order-statistic weights: {exc}", file=sys.stderr)
        return 1
    print("position,weight")
    for i, v in enumerate(w.weights, start=1):
        print(f"{i},{float(v)!r}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="riskbench",
        description="coherent risk estimators as weighted order statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_weights(sub)
    _add_coherence(sub)
    _add_true_risk(sub)
    _add_consistency(sub)
    _add_bench(sub)
    _add_extract(sub)
    args = parser.parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
