import numpy as np
import pytest

from sparseqi.quasi_interp import builtin_scheme


@pytest.fixture(scope="session")
def faber():
    return builtin_scheme("faber")


@pytest.fixture(scope="session")
def cubic():
    return builtin_scheme("cubic")


def cox_de_boor(ell: int, x: float) -> float:
    """Independent recursion oracle for the cardinal spline on knots 0..ell."""

    def b(j, order, t):
        if order == 1:
            return 1.0 if j <= t < j + 1 else 0.0
        left = (t - j) / (order - 1) * b(j, order - 1, t)
        right = (j + order - t) / (order - 1) * b(j + 1, order - 1, t)
        return left + right

    return b(0, ell, x)


def rng_points(n, d, seed=0):
    return np.random.default_rng(seed).random((n, d))
