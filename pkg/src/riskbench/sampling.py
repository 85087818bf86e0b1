"""Sampling schemes and the derived-stream randomness contract.

Every replication draws from its own counter-based stream keyed by
(master_seed, purpose tag, replication index), so results are bitwise
reproducible regardless of execution order or worker count and no state
is shared between replications.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Sample
from .distributions import sample as draw_from

__all__ = [
    "Iid",
    "Overlapping",
    "SamplingScheme",
    "scheme_label",
    "parse_scheme",
    "RandomnessContract",
    "stream_key",
    "draw_sample",
    "draw_values",
    "draw_secured_companion",
    "base_draw_count",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Iid:
    """n independent one-day outcomes."""

    n: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"sample size must be a positive integer, got {self.n!r}")

    @property
    def horizon(self) -> int:
        return 1


@dataclass(frozen=True)
class Overlapping:
    """n overlapping h-day sums built from n + h - 1 base draws.

    X_i = Z_i + ... + Z_{i+h-1} over a single stream of base outcomes, so
    consecutive observations share h - 1 summands. Overlapping(n, 1) is
    Iid(n) draw for draw on the same stream.
    """

    n: int
    h: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"sample size must be a positive integer, got {self.n!r}")
        if not (isinstance(self.h, int) and self.h >= 1):
            raise ValueError(f"window must be a positive integer, got {self.h!r}")

    @property
    def horizon(self) -> int:
        return self.h


SamplingScheme = Union[Iid, Overlapping]


def scheme_label(scheme: SamplingScheme) -> str:
    if isinstance(scheme, Iid):
        return "iid"
    if isinstance(scheme, Overlapping):
        return f"overlapping:{scheme.h}"
    raise ValueError(f"unknown scheme object {scheme!r}")


def parse_scheme(text: str, n: int) -> SamplingScheme:
    """Parse 'iid' or 'overlapping:h' at sample size n."""
    parts = text.strip().lower().split(":")
    if parts[0] == "iid" and len(parts) == 1:
        return Iid(n)
    if parts[0] == "overlapping" and len(parts) <= 2:
        h = int(parts[1]) if len(parts) == 2 else 10
        return Overlapping(n, h)
    raise ValueError(f"unknown sampling scheme {text!r}")


def base_draw_count(scheme: SamplingScheme) -> int:
    """Base variates one sample consumes: n for Iid, n + h - 1 for Overlapping."""
    if isinstance(scheme, Iid):
        return scheme.n
    if isinstance(scheme, Overlapping):
        return scheme.n + scheme.h - 1
    raise ValueError(f"unknown scheme object {scheme!r}")


def stream_key(master_seed: int, tag: str, k: int) -> int:
    """The 128-bit Philox key for stream (master_seed, tag, k).

    High 64 bits: BLAKE2b-64 of "master_seed:tag"; low 64 bits: the
    replication index. Distinct (tag, k) pairs get distinct keys, and
    Philox streams with distinct keys are independent by construction.
    """
    if k < 0:
        raise ValueError(f"replication index must be non-negative, got {k}")
    digest = hashlib.blake2b(f"{master_seed}:{tag}".encode(), digest_size=8).digest()
    high = int.from_bytes(digest, "little")
    return (high << 64) | (k & _MASK64)


@dataclass(frozen=True)
class RandomnessContract:
    """Deterministic per-replication stream derivation from one master seed."""

    master_seed: int

    def stream(self, tag: str, k: int) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=stream_key(self.master_seed, tag, k))
        )


def draw_values(dist, scheme: SamplingScheme, rng: np.random.Generator) -> np.ndarray:
    """The raw sample array for one replication; see draw_sample."""
    base = draw_from(dist, base_draw_count(scheme), rng)
    if isinstance(scheme, Iid) or scheme.h == 1:
        return base
    csum = np.concatenate([[0.0], np.cumsum(base)])
    return csum[scheme.h :] - csum[: scheme.n]


def draw_sample(dist, scheme: SamplingScheme, rng: np.random.Generator) -> Sample:
    """Draw one estimation sample under the scheme from the given stream."""
    return Sample(draw_values(dist, scheme, rng))


def draw_secured_companion(dist, scheme: SamplingScheme, rng: np.random.Generator) -> float:
    """One fresh independent draw of the target variable (the h-day sum for
    overlapping schemes), used to test the secured position."""
    return float(np.sum(draw_from(dist, scheme.horizon, rng)))
