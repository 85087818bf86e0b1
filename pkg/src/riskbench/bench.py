"""The Monte Carlo estimator study: configuration, execution, serialization.

A study crosses distributions x sampling schemes x estimators and reports
the five metrics per cell. True risk is computed once per (distribution,
scheme) target variable — closed form where available, otherwise one
oracle sample shared across the levels involved — and all estimators in a
group score the same replication draws.
"""

from __future__ import annotations

import hashlib
import io
import json
import re
import time
from dataclasses import dataclass, field
from typing import Optional

from .distributions import dist_label, horizon_target, parse_dist, true_risk_levels
from .estimators import LEstimatorSpec, build_estimator
from .metrics import (
    DEFAULT_CHUNK,
    MetricReport,
    RandomnessContract,
    reference_value,
    run_group,
)
from .sampling import parse_scheme, scheme_label, stream_key

__all__ = [
    "DEFAULT_DISTRIBUTIONS",
    "DEFAULT_ESTIMATORS",
    "DEFAULT_SCHEMES",
    "METRICS",
    "BenchConfig",
    "ResultRow",
    "ResultTable",
    "run_study",
    "format_metric_table",
    "parse_metric_table",
]

METRICS = ("ae", "se", "sb", "rb", "ct")

DEFAULT_DISTRIBUTIONS = (
    "normal:0:1",
    "t:5",
    "nig:0.4:0.14:0:1",
    "nig:0.4:-0.14:0:1",
    "nig:0.55:0.3025:0:1",
    "nig:0.55:-0.3025:0:1",
    "nig:0.4:0.22:0:1",
    "nig:0.4:-0.22:0:1",
)

DEFAULT_ESTIMATORS = ("var1", "es1", "es2", "es3", "es4", "es5", "es6")

DEFAULT_SCHEMES = ("iid", "overlapping:10")


@dataclass(frozen=True)
class BenchConfig:
    """Study configuration; every field has the desk-scale default.

    `workers` only affects scheduling: results are bitwise identical for
    any worker count under the per-replication stream contract.
    """

    alpha: float = 0.025
    n: int = 250
    k: int = 100_000
    seed: int = 42
    oracle_k: int = 10_000_000
    distributions: tuple[str, ...] = DEFAULT_DISTRIBUTIONS
    estimators: tuple[str, ...] = DEFAULT_ESTIMATORS
    schemes: tuple[str, ...] = DEFAULT_SCHEMES
    workers: int = 1
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"level alpha must lie in (0, 1), got {self.alpha}")
        if self.k < 20:
            raise ValueError("need at least 20 replications")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        object.__setattr__(self, "distributions", tuple(self.distributions))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "schemes", tuple(self.schemes))

    @classmethod
    def from_json(cls, text: str) -> "BenchConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("config JSON must be an object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "oracle_k": self.oracle_k,
            "distributions": list(self.distributions),
            "estimators": list(self.estimators),
            "schemes": list(self.schemes),
            "workers": self.workers,
            "out": self.out,
            "format": self.format,
        }

    def build_id(self) -> str:
        """Short content hash of everything that determines the numbers."""
        payload = self.to_dict()
        payload.pop("out")
        payload.pop("format")
        payload.pop("workers")
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.blake2b(blob, digest_size=6).hexdigest()


@dataclass(frozen=True)
class ResultRow:
    distribution: str
    scheme: str
    estimator: str
    alpha: float
    n: int
    k: int
    metric: str
    value: float
    mc_stderr: Optional[float]


@dataclass(frozen=True, eq=False)
class ResultTable:
    """All study rows, exactly |dists| * |schemes| * |estimators| * 5 of them."""

    rows: tuple[ResultRow, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        shape = self.metadata.get("shape")
        if shape is not None:
            expected = shape[0] * shape[1] * shape[2] * len(METRICS)
            if len(self.rows) != expected:
                raise ValueError(
                    f"expected {expected} rows for shape {shape}, got {len(self.rows)}"
                )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("distribution,scheme,estimator,alpha,n,K,metric,value,mc_stderr\n")
        for r in self.rows:
            stderr = "" if r.mc_stderr is None else repr(r.mc_stderr)
            buf.write(
                f"{r.distribution},{r.scheme},{r.estimator},{r.alpha!r},{r.n},{r.k},"
                f"{r.metric},{r.value!r},{stderr}\n"
            )
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "metadata": self.metadata,
                "rows": [
                    {
                        "distribution": r.distribution,
                        "scheme": r.scheme,
                        "estimator": r.estimator,
                        "alpha": r.alpha,
                        "n": r.n,
                        "K": r.k,
                        "metric": r.metric,
                        "value": r.value,
                        "mc_stderr": r.mc_stderr,
                    }
                    for r in self.rows
                ],
            },
            indent=2,
        )

    def value(self, distribution: str, scheme: str, estimator: str, metric: str) -> float:
        for r in self.rows:
            if (
                r.distribution == distribution
                and r.scheme == scheme
                and r.estimator == estimator
                and r.metric == metric
            ):
                return r.value
        raise KeyError((distribution, scheme, estimator, metric))


def run_study(config: BenchConfig) -> ResultTable:
    """Execute the full study described by the config.

    Any cell failure aborts the run with the cell identity attached; a
    study is either complete or it is an error.
    """
    t0 = time.monotonic()
    dists = [parse_dist(text) for text in config.distributions]
    schemes = [parse_scheme(text, config.n) for text in config.schemes]
    specs: list[LEstimatorSpec] = [
        build_estimator(name, config.alpha, config.n) for name in config.estimators
    ]
    contract = RandomnessContract(config.seed)

    rows: list[ResultRow] = []
    for dist in dists:
        for scheme in schemes:
            cell_tag = f"{dist_label(dist)}|{scheme_label(scheme)}"
            try:
                target = horizon_target(dist, scheme.horizon)
                levels = sorted({spec.alpha for spec in specs})
                oracle_seed = stream_key(config.seed, f"oracle|{cell_tag}", 0)
                risks = true_risk_levels(
                    target, levels, oracle_k=config.oracle_k, seed=oracle_seed
                )
                per_level = [spec.alpha for spec in specs]
                refs = [reference_value(spec, risks[spec.alpha]) for spec in specs]
                reports = run_group(
                    dist,
                    scheme,
                    specs,
                    per_level,
                    refs,
                    config.k,
                    contract,
                    workers=config.workers,
                    chunk_size=DEFAULT_CHUNK,
                )
            except Exception as exc:
                raise RuntimeError(f"benchmark cell group {cell_tag} failed: {exc}") from exc
            for spec, report in zip(specs, reports):
                rows.extend(_rows_for(config, dist, scheme, spec, report))

    metadata = {
        "config": config.to_dict(),
        "build_id": config.build_id(),
        "wall_seconds": round(time.monotonic() - t0, 3),
        "shape": (len(dists), len(schemes), len(specs)),
    }
    return ResultTable(rows=tuple(rows), metadata=metadata)


def _rows_for(
    config: BenchConfig, dist, scheme, spec: LEstimatorSpec, report: MetricReport
) -> list[ResultRow]:
    out = []
    for metric in METRICS:
        out.append(
            ResultRow(
                distribution=dist_label(dist),
                scheme=scheme_label(scheme),
                estimator=spec.id.value,
                alpha=spec.alpha,
                n=config.n,
                k=config.k,
                metric=metric,
                value=report.metric(metric),
                mc_stderr=report.stderr(metric),
            )
        )
    return out


def format_metric_table(table: ResultTable) -> str:
    """Render the study as text blocks: one per (distribution, scheme), rows
    the five metrics as percents to one decimal, columns the estimators."""
    groups: dict[tuple[str, str], dict[tuple[str, str], float]] = {}
    estimators: list[str] = []
    for r in table.rows:
        key = (r.distribution, r.scheme)
        groups.setdefault(key, {})[(r.estimator, r.metric)] = r.value
        if r.estimator not in estimators:
            estimators.append(r.estimator)

    width = max(8, max(len(e) for e in estimators) + 2)
    lines = []
    for (dist, scheme), cells in groups.items():
        lines.append(f"== {dist} | {scheme} ==")
        lines.append("metric" + "".join(e.rjust(width) for e in estimators))
        for metric in METRICS:
            row = [metric.ljust(6)]
            for e in estimators:
                row.append(f"{100.0 * cells[(e, metric)]:.1f}%".rjust(width))
            lines.append("".join(row))
        lines.append("")
    return "\n".join(lines)


def parse_metric_table(text: str) -> dict[tuple[str, str, str, str], float]:
    """Invert format_metric_table back to {(dist, scheme, estimator, metric): value}."""
    out: dict[tuple[str, str, str, str], float] = {}
    dist = scheme = None
    estimators: list[str] = []
    for line in text.splitlines():
        header = re.match(r"^== (.+) \| (.+) ==$", line.strip())
        if header:
            dist, scheme = header.group(1), header.group(2)
            continue
        if line.startswith("metric"):
            estimators = line.split()[1:]
            continue
        parts = line.split()
        if not parts or dist is None:
            continue
        metric = parts[0]
        if metric not in METRICS:
            continue
        for est, cell in zip(estimators, parts[1:]):
            if not cell.endswith("%"):
                raise ValueError(f"malformed cell {cell!r}")
            out[(dist, scheme, est, metric)] = float(cell[:-1]) / 100.0
    return out
