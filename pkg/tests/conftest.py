import numpy as np
import pytest
from hypothesis import strategies as st

from repeaterlab.bell import BellVector, ErrorModel


@st.composite
def bell_vectors(draw, min_weight=0.0):
    raw = draw(st.lists(st.floats(min_value=min_weight, max_value=1.0), min_size=4, max_size=4))
    if sum(raw) <= 0:
        raw = [1.0, 0.0, 0.0, 0.0]
    return BellVector.from_weights(raw)


error_models = st.builds(
    ErrorModel,
    p=st.floats(min_value=0.9, max_value=1.0),
    eta=st.floats(min_value=0.9, max_value=1.0),
)


def random_bell(rng) -> BellVector:
    return BellVector.from_weights(rng.dirichlet(np.ones(4)).tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(20260415)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
