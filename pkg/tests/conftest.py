import numpy as np
import pytest

from atomdecon import ModelSpec, NormalFamily, Sample, draw_sample


@pytest.fixture
def normal_model():
    return ModelSpec(0.1, NormalFamily(3.0, 9.0), 1.0)


@pytest.fixture
def small_sample(normal_model):
    return draw_sample(normal_model, 100, 11)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_sample(seed, n=100, sigma=1.0):
    model = ModelSpec(0.1, NormalFamily(3.0, 9.0), sigma)
    return draw_sample(model, n, seed)


@pytest.fixture
def sample_factory():
    return make_sample


@pytest.fixture
def point_sample():
    return Sample(np.zeros(1), 1.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
