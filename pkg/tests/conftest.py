import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phasespace.fields import build_field

ORDERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}


@pytest.fixture(scope="session")
def fields():
    return {d: build_field(*pm) for d, pm in ORDERS.items()}


def field_of(d):
    return build_field(*ORDERS[d])


finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def density_matrices(draw, d):
    """Random full-rank-ish density matrix built from a bounded Ginibre draw."""
    re = draw(arrays(np.float64, (d, d), elements=finite))
    im = draw(arrays(np.float64, (d, d), elements=finite))
    g = re + 1j * im + 1e-3 * np.eye(d)
    rho = g @ g.conj().T
    return rho / np.trace(rho)


@st.composite
def bloch_vectors(draw):
    v = np.array(draw(arrays(np.float64, (3,), elements=finite)))
    n = np.linalg.norm(v)
    return v / n if n > 1 else v


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
