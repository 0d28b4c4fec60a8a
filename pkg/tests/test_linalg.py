import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasespace.errors import NotRankOneProjector, ShapeMismatch, UsageError
from phasespace.linalg import (
    check_density,
    extract_pure_state,
    fidelity,
    hs_inner,
    is_density,
    mat_algebra,
    psd_projection,
    random_density,
    tensor,
    trace,
    trace_distance,
)

from conftest import density_matrices


def test_tensor_ordering():
    a = np.diag([1, 2])
    b = np.diag([1, 10])
    assert np.array_equal(np.diag(tensor(a, b)), [1, 10, 2, 20])
    assert tensor().shape == (1, 1)


def test_shape_errors():
    with pytest.raises(ShapeMismatch):
        mat_algebra("mul", np.eye(2), np.eye(3))
    with pytest.raises(ShapeMismatch):
        mat_algebra("add", np.eye(2), np.eye(3))
    with pytest.raises(ShapeMismatch):
        trace(np.ones((2, 3)))
    with pytest.raises(UsageError):
        mat_algebra("svd", np.eye(2))


def test_hs_inner_conjugates_left():
    a = np.array([[1j, 0], [0, 0]])
    assert hs_inner(a, a) == 1
    assert hs_inner(a, np.eye(2)) == -1j


@given(st.integers(2, 5), st.data())
@settings(max_examples=40, deadline=None)
def test_extract_pure_state_roundtrip(d, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v /= np.linalg.norm(v)
    out = extract_pure_state(np.outer(v, v.conj()))
    assert np.abs(np.outer(out, out.conj()) - np.outer(v, v.conj())).max() < 1e-10
    lead = out[np.flatnonzero(np.abs(out) > 1e-8)[0]]
    assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_extract_rejects_mixed():
    with pytest.raises(NotRankOneProjector):
        extract_pure_state(np.eye(2) / 2)


@given(density_matrices(3))
@settings(max_examples=40, deadline=None)
def test_density_metrics(rho):
    assert is_density(rho, 1e-9)
    assert abs(fidelity(rho, rho) - 1) < 1e-7
    assert trace_distance(rho, rho) < 1e-9
    sigma = np.eye(3) / 3
    assert 0 <= trace_distance(rho, sigma) <= 1
    assert 0 <= fidelity(rho, sigma) <= 1 + 1e-9


@given(st.integers(2, 4), st.data())
@settings(max_examples=40, deadline=None)
def test_psd_projection_returns_density(d, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (h + h.conj().T) / 2
    h += (1 - np.trace(h).real) / d * np.eye(d)
    out = psd_projection(h)
    assert is_density(out, 1e-9)


def test_psd_projection_fixes_density():
    rho = random_density(3, np.random.default_rng(0))
    assert np.abs(psd_projection(rho) - rho).max() < 1e-12


def test_check_density_rejects():
    with pytest.raises(UsageError):
        check_density(np.diag([1.5, -0.5]))
