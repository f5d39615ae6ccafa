import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matconvex.errors import DomainViolationError, HermiticityError
from matconvex.linalg import (
    SpectrumWindow,
    apply_function,
    hermitian,
    is_psd,
    loewner_leq,
    matrix_power_psd,
    min_eigenvalue,
    op_norm,
    spectral_decompose,
    tensor,
)


def test_hermitian_symmetrizes_roundoff():
    a = np.array([[1.0, 0.5 + 1e-14], [0.5, 2.0]])
    h = hermitian(a)
    np.testing.assert_allclose(h, h.conj().T)


def test_hermitian_rejects_asymmetric():
    with pytest.raises(HermiticityError):
        hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_window_validation():
    with pytest.raises(ValueError):
        SpectrumWindow(2.0, 1.0)
    w = SpectrumWindow(0.0, 1.0)
    assert w.contains(0.5)
    assert not w.contains(0.0)  # open interval
    with pytest.raises(DomainViolationError):
        w.check_spectrum(np.array([0.5, 1.5]))


def test_window_shrunk():
    inner = SpectrumWindow(0.0, 10.0).shrunk(0.05)
    assert inner.a == pytest.approx(0.5)
    assert inner.b == pytest.approx(9.5)


def test_apply_function_matches_direct_eigencalc():
    rng = np.random.default_rng(0)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = hermitian(g + g.conj().T)
    shifted = h + 10.0 * np.eye(4)
    out = apply_function(shifted, math.sqrt, SpectrumWindow(0.0, math.inf))
    np.testing.assert_allclose(out @ out, shifted, atol=1e-10)


def test_apply_function_domain_violation_names_source():
    with pytest.raises(DomainViolationError, match="A0"):
        apply_function(
            np.diag([-1.0, 2.0]), math.sqrt, SpectrumWindow(0.0, math.inf),
            source="A0",
        )


def test_matrix_power_psd_zero_eigenvalue():
    # 0^p = 0 for p > 0, and clipping keeps tiny negatives out of the power
    a = np.diag([0.0, 4.0])
    np.testing.assert_allclose(matrix_power_psd(a, 0.5), np.diag([0.0, 2.0]))


def test_loewner_order_helpers():
    assert is_psd(np.diag([0.0, 1.0]))
    assert loewner_leq(np.eye(2), 2.0 * np.eye(2))
    assert not loewner_leq(2.0 * np.eye(2), np.eye(2))
    assert min_eigenvalue(np.diag([3.0, -2.0])) == pytest.approx(-2.0)
    assert op_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)


def test_tensor_is_kron():
    a, b = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
    np.testing.assert_allclose(tensor(a, b), np.kron(a, b))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_spectral_decompose_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = hermitian(0.5 * (g + g.conj().T))
    w, u = spectral_decompose(h)
    np.testing.assert_allclose((u * w) @ u.conj().T, h, atol=1e-10)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-10)
    assert np.all(np.diff(w) >= 0)
