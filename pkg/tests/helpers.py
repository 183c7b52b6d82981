import numpy as np
from hypothesis import strategies as st

from qudit_qnc.core import DensityMatrix, StateVector, make_state

SMALL_D = (2, 3, 5)


def random_state(d: int, rng: np.random.Generator, n: int = 1) -> StateVector:
    size = d**n
    return make_state(d, rng.standard_normal(size) + 1j * rng.standard_normal(size))


def random_density(d: int, rng: np.random.Generator, n: int = 1) -> DensityMatrix:
    size = d**n
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    rho = g @ g.conj().T
    return DensityMatrix(d, rho / np.trace(rho))


def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def binomial_3sigma(count: int, n: int, p: float) -> bool:
    sigma = np.sqrt(n * p * (1 - p))
    return abs(count - n * p) <= 3 * sigma


dims = st.sampled_from([2, 3, 4, 5])
seeds = st.integers(min_value=0, max_value=2**32 - 1)
