"""Portable stream contract: the numpy path must match a big-int reference."""

import math

import numpy as np
import pytest

from cpcapp import SplitMix64

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def reference_stream(seed, count):
    """Textbook scalar implementation on Python integers."""
    out = []
    state = seed & MASK
    for _ in range(count):
        state = (state + GAMMA) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


class TestStream:
    @pytest.mark.parametrize("seed", [0, 1, 12345, 0xDEADBEEF, MASK])
    def test_matches_reference(self, seed):
        got = [int(v) for v in SplitMix64(seed).next_u64(8)]
        assert got == reference_stream(seed, 8)

    def test_uniform_ranges(self):
        stream = SplitMix64(2)
        u = stream.uniform(10_000)
        assert u.min() >= 0.0 and u.max() < 1.0
        v = SplitMix64(2).uniform_open(10_000)
        assert v.min() > 0.0 and v.max() <= 1.0

    def test_normal_consumes_two_words_each(self):
        # normals draw u1 then u2 from consecutive words via the cosine branch
        n = 5
        words = reference_stream(9, 2 * n)
        u1 = [((w >> 11) + 1) * 2.0**-53 for w in words[:n]]
        u2 = [(w >> 11) * 2.0**-53 for w in words[n:]]
        want = [math.sqrt(-2.0 * math.log(a)) * math.cos(2.0 * math.pi * b)
                for a, b in zip(u1, u2)]
        got = SplitMix64(9).normal(n)
        np.testing.assert_allclose(got, want, rtol=1e-15)

    def test_integer_reduction(self):
        words = reference_stream(4, 6)
        got = SplitMix64(4).integers(6, 4)
        assert [int(v) for v in got] == [w % 4 for w in words]
