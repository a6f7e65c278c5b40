import os
import subprocess
import sys

import numpy as np
import pytest

from anomseg import _kernels as K


@pytest.mark.skipif(not K.NUMBA_AVAILABLE, reason="numba not importable")
class TestNumbaNumpyParity:
    def test_channel_max(self, rng):
        logits = rng.normal(size=(19, 31, 17)).astype(np.float32)
        assert np.array_equal(K.channel_max_numba(logits),
                              K.channel_max_numpy(logits))

    @pytest.mark.parametrize("inv_temp", [1.0, 1.0 / 3.0, 10.0])
    def test_softmax_max(self, rng, inv_temp):
        logits = rng.uniform(-50, 50, size=(7, 13, 11)).astype(np.float32)
        a = K.softmax_max_numba(logits, inv_temp)
        b = K.softmax_max_numpy(logits, inv_temp)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-15)

    def test_softmax_entropy(self, rng):
        logits = rng.uniform(-50, 50, size=(7, 13, 11)).astype(np.float32)
        a = K.softmax_entropy_numba(logits)
        b = K.softmax_entropy_numpy(logits)
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("dtype", [np.float32, np.float64])
    def test_bin_counts(self, rng, dtype):
        edges = np.linspace(-2.5, 2.5, 65)
        scores = rng.normal(size=5000).astype(dtype)
        scores[:10] = edges[0]
        scores[10:20] = edges[-1]
        labels = rng.choice([0, 1, 255], size=5000).astype(np.uint8)
        out_a = [np.zeros(64, np.int64), np.zeros(64, np.int64),
                 np.zeros(5, np.int64)]
        out_b = [np.zeros(64, np.int64), np.zeros(64, np.int64),
                 np.zeros(5, np.int64)]
        K.bin_counts_numba(scores, labels, edges, *out_a)
        K.bin_counts_numpy(scores, labels, edges, *out_b)
        for a, b in zip(out_a, out_b):
            assert np.array_equal(a, b)


class TestEnvFlag:
    def test_flag_disables_numba(self):
        env = dict(os.environ, ANOMSEG_NUMBA="0")
        code = ("import anomseg._kernels as K; "
                "print(K.NUMBA_ENABLED, K.channel_max is K.channel_max_numpy)")
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        assert out.stdout.split() == ["False", "True"]

    def test_default_dispatch_is_consistent(self):
        if K.NUMBA_ENABLED:
            assert K.channel_max is K.channel_max_numba
            assert K.bin_counts is K.bin_counts_numba
        else:
            assert K.channel_max is K.channel_max_numpy
            assert K.bin_counts is K.bin_counts_numpy
