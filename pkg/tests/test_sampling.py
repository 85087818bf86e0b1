import hashlib

import numpy as np
import pytest

from riskbench.distributions import Normal, StudentT, sample
from riskbench.sampling import (
    Iid,
    Overlapping,
    RandomnessContract,
    base_draw_count,
    draw_sample,
    draw_secured_companion,
    draw_values,
    parse_scheme,
    scheme_label,
    stream_key,
)


class TestStreamKey:
    def test_key_layout(self):
        # independent re-derivation: hash of "seed:tag" in the high word,
        # replication index in the low word
        seed, tag, k = 42, "sample|normal:0:1|iid", 137
        digest = hashlib.blake2b(f"{seed}:{tag}".encode(), digest_size=8).digest()
        want = (int.from_bytes(digest, "little") << 64) | k
        assert stream_key(seed, tag, k) == want

    def test_low_word_is_replication_index(self):
        base = stream_key(0, "x", 0)
        assert stream_key(0, "x", 12345) - base == 12345

    def test_distinct_tags_and_seeds(self):
        keys = {
            stream_key(0, "a", 0),
            stream_key(0, "b", 0),
            stream_key(1, "a", 0),
            stream_key(1, "b", 0),
        }
        assert len(keys) == 4

    def test_negative_replication_rejected(self):
        with pytest.raises(ValueError):
            stream_key(0, "a", -1)


class TestContract:
    def test_streams_are_reproducible(self):
        c = RandomnessContract(7)
        a = c.stream("t", 3).standard_normal(16)
        b = c.stream("t", 3).standard_normal(16)
        assert np.array_equal(a, b)

    def test_streams_differ_across_replications(self):
        c = RandomnessContract(7)
        a = c.stream("t", 0).standard_normal(16)
        b = c.stream("t", 1).standard_normal(16)
        assert not np.array_equal(a, b)

    def test_philox_backs_the_generator(self):
        c = RandomnessContract(0)
        assert isinstance(c.stream("t", 0).bit_generator, np.random.Philox)


class TestSchemes:
    def test_parse_and_label(self):
        assert parse_scheme("iid", 250) == Iid(250)
        assert parse_scheme("overlapping:10", 250) == Overlapping(250, 10)
        assert parse_scheme("overlapping", 250) == Overlapping(250, 10)
        assert parse_scheme("overlapping:3", 50) == Overlapping(50, 3)
        assert scheme_label(Iid(250)) == "iid"
        assert scheme_label(Overlapping(250, 10)) == "overlapping:10"

    def test_parse_rejects_garbage(self):
        for bad in ("", "rolling", "overlapping:0", "overlapping:x"):
            with pytest.raises(ValueError):
                parse_scheme(bad, 250)

    def test_base_draw_count(self):
        assert base_draw_count(Iid(250)) == 250
        assert base_draw_count(Overlapping(250, 10)) == 259

    def test_horizons(self):
        assert Iid(250).horizon == 1
        assert Overlapping(250, 10).horizon == 10

    def test_validation(self):
        with pytest.raises(ValueError):
            Iid(0)
        with pytest.raises(ValueError):
            Overlapping(10, 0)


class TestDraws:
    def test_overlap_h1_equals_iid_bitwise(self):
        c = RandomnessContract(11)
        a = draw_values(Normal(), Iid(64), c.stream("s", 9))
        b = draw_values(Normal(), Overlapping(64, 1), c.stream("s", 9))
        assert np.array_equal(a, b)

    def test_rolling_sums_match_naive_loop(self):
        c = RandomnessContract(11)
        n, h = 40, 10
        got = draw_values(StudentT(5.0), Overlapping(n, h), c.stream("s", 2))
        base = sample(StudentT(5.0), n + h - 1, c.stream("s", 2))
        naive = np.array([base[i : i + h].sum() for i in range(n)])
        assert got.shape == (n,)
        assert np.allclose(got, naive, atol=1e-10 * (1 + np.abs(naive).max()))

    def test_secured_companion_is_horizon_sum(self):
        c = RandomnessContract(11)
        got = draw_secured_companion(Normal(), Overlapping(30, 10), c.stream("c", 4))
        want = float(sample(Normal(), 10, c.stream("c", 4)).sum())
        assert got == want

    def test_secured_companion_iid_is_single_draw(self):
        c = RandomnessContract(11)
        got = draw_secured_companion(Normal(), Iid(30), c.stream("c", 5))
        want = float(sample(Normal(), 1, c.stream("c", 5))[0])
        assert got == want

    def test_draw_sample_wraps_values(self):
        c = RandomnessContract(3)
        s = draw_sample(Normal(), Iid(12), c.stream("s", 0))
        v = draw_values(Normal(), Iid(12), c.stream("s", 0))
        assert np.array_equal(s.values, v)

    def test_overlapping_autocorrelation_is_positive(self):
        # rolling sums share h-1 of h terms with their neighbors
        c = RandomnessContract(5)
        x = draw_values(Normal(), Overlapping(5000, 10), c.stream("s", 0))
        lag1 = np.corrcoef(x[:-1], x[1:])[0, 1]
        assert lag1 > 0.8
