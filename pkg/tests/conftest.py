import functools

import pytest

from kpplab.pde import simulate_cauchy

B_TWO_MODE = "cos(2*pi*x)+sin(4*pi*x)"

# front-propagation corpus shared by the PDE unit tests and the acceptance suite
PDE_CORPUS = {
    "logistic": ("1", "0"),
    "drift": ("4", "1"),
    "flip_plus": ("2+2*sin(2*pi*x)", B_TWO_MODE),
    "flip_minus": ("2+2*sin(2*pi*x)", f"-({B_TWO_MODE})"),
    "mirror_pair": (f"2+{B_TWO_MODE}", B_TWO_MODE),
}


@functools.lru_cache(maxsize=None)
def _cached_run(r, b, T):
    return simulate_cauchy(r, b, T=T)


@pytest.fixture(scope="session")
def pde_run():
    """simulate_cauchy(r, b, T=T) with default settings, memoised for the session."""
    return _cached_run
