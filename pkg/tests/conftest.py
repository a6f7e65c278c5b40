import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anomseg._kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay JIT compile / cache-load cost once, outside any timed section
    warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_logits(rng, shape=(5, 4, 6), lo=-3.0, hi=3.0):
    return rng.uniform(lo, hi, size=shape).astype(np.float32)
