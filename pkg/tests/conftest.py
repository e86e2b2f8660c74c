import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rel_gap(a: float, b: float) -> float:
    """Relative gap that treats an exact 0 == 0 match as zero."""
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale
