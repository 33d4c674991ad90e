import numpy as np
import pytest

from heavypaths.cadlag import CadlagStep


def random_step(rng: np.random.Generator, max_jumps: int = 12,
                heavy: bool = False) -> CadlagStep:
    """Random canonical step function with well-separated jump times."""
    k = int(rng.integers(0, max_jumps + 1))
    times = np.sort(rng.random(k))
    if len(times):
        times = times[np.concatenate(([times[0] > 1e-6],
                                      np.diff(times) > 1e-6))]
    if heavy:
        vals = rng.standard_cauchy(len(times)).cumsum()
    else:
        vals = rng.normal(0.0, 1.0, len(times)).cumsum()
    return CadlagStep(times, vals, float(rng.normal()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
