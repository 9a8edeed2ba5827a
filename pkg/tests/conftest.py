from fractions import Fraction

import pytest

from sixvertex.asymptotics import exact_log_Z_sequence


@pytest.fixture(scope="session")
def log_Z():
    """Exact ln Z_N (256-bit rounding) for N <= 129 at the three reference x values."""
    cache = {}

    def get(x):
        x = Fraction(x)
        if x not in cache:
            cache[x] = exact_log_Z_sequence(129, x)
        return cache[x]

    return get
