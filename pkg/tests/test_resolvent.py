"""Resolvent calculus: exact derivatives, the two evaluation routes of a
representation, and input validation."""

import numpy as np
import pytest

from matconvex.convexity import (
    ScalarFunction,
    default_fd_step,
    second_derivative_fd,
)
from matconvex.errors import ConditioningError, DomainViolationError
from matconvex.linalg import SpectrumWindow
from matconvex.rand import (
    RandomSpec,
    random_direction,
    random_in_window,
)
from matconvex.resolvent import (
    PickRepresentation,
    ResolventPoint,
    certify_representation,
    elementary_decomposition_residual,
    pick_eval_matrix,
    pick_eval_scalar,
    pick_scalar_function,
    pick_second_derivative,
    resolvent_identity_residual,
    resolvent_second_derivative,
    resolvent_value,
)

WINDOW = SpectrumWindow(0.1, 5.0)


def test_point_sign_and_scalar():
    below = ResolventPoint(-1.0, WINDOW)
    above = ResolventPoint(7.0, WINDOW)
    assert below.sign == -1 and above.sign == 1
    assert below.scalar(1.0) == pytest.approx(0.5)      # -1/(-1-1)
    assert above.scalar(1.0) == pytest.approx(1.0 / 6.0)


def test_point_inside_window_rejected():
    with pytest.raises(ValueError, match="outside"):
        ResolventPoint(2.0, WINDOW)


def test_resolvent_value_matches_scalar_calculus():
    a = np.diag([1.0, 2.0]) + 0.0j
    p = ResolventPoint(-1.0, WINDOW)
    np.testing.assert_allclose(
        resolvent_value(a, p), np.diag([p.scalar(1.0), p.scalar(2.0)]), atol=1e-14
    )


def test_resolvent_near_singular_refused():
    a = np.diag([1.0, 5.0 - 1e-13]) + 0.0j
    with pytest.raises(ConditioningError):
        resolvent_value(a, ResolventPoint(5.0, WINDOW))


def test_resolvent_spectrum_check():
    with pytest.raises(DomainViolationError):
        resolvent_value(np.diag([6.0, 1.0]) + 0.0j, ResolventPoint(7.0, WINDOW))


@pytest.mark.parametrize("u", [-1.0, 7.0])
def test_second_derivative_psd_both_branches(u):
    for t in range(20):
        spec = RandomSpec(10, t)
        a = random_in_window(3, WINDOW, spec)
        q = random_direction(3, spec.stream(1000 + t))
        d2 = resolvent_second_derivative(a, q, ResolventPoint(u, WINDOW))
        assert np.linalg.eigvalsh(d2).min() >= -1e-10


@pytest.mark.parametrize("u", [-1.0, 7.0])
def test_second_derivative_matches_fd(u):
    spec = RandomSpec(11)
    a = random_in_window(3, WINDOW, spec)
    q = random_direction(3, spec.stream(1))
    point = ResolventPoint(u, WINDOW)
    exact = resolvent_second_derivative(a, q, point)
    f = ScalarFunction("f_u", point.scalar, WINDOW)
    fd = second_derivative_fd(f, a, q, default_fd_step(a))
    rel = np.linalg.norm(exact - fd) / np.linalg.norm(exact)
    assert rel < 1e-4


def test_resolvent_identity_exact():
    spec = RandomSpec(12)
    a = random_in_window(4, WINDOW, spec) + 6.0 * np.eye(4)
    delta = 0.01 * random_direction(4, spec.stream(1))
    assert resolvent_identity_residual(a, delta) < 1e-12


@pytest.mark.parametrize("u", [-2.0, -0.5, 6.0, 20.0])
def test_elementary_decomposition_exact(u):
    rng = RandomSpec(13).rng()
    for _ in range(100):
        c = float(rng.uniform(0.2, 4.8))
        z = float(rng.uniform(0.2, 4.8))
        assert elementary_decomposition_residual(u, c, z, WINDOW) < 1e-12


REP = PickRepresentation(
    alpha=0.5, beta=-0.2, gamma=0.3, c=1.0, window=WINDOW,
    atoms=((-1.0, 0.4), (7.0, 0.25)),
)


def test_representation_validation():
    with pytest.raises(ValueError, match="gamma"):
        PickRepresentation(0.0, 0.0, -1.0, 1.0, WINDOW)
    with pytest.raises(ValueError, match="center"):
        PickRepresentation(0.0, 0.0, 0.0, 9.0, WINDOW)
    with pytest.raises(ValueError, match="inside the window"):
        PickRepresentation(0.0, 0.0, 0.0, 1.0, WINDOW, atoms=((2.0, 1.0),))
    with pytest.raises(ValueError, match="weight"):
        PickRepresentation(0.0, 0.0, 0.0, 1.0, WINDOW, atoms=((-1.0, -0.1),))


def test_scalar_eval_at_pole_free_point():
    # hand value at z = 0.5: alpha + beta z + gamma z^2 + atom terms
    z = 0.5
    expect = 0.5 - 0.2 * z + 0.3 * z * z
    expect += 0.4 * (z - 1.0) * (1.0 - z) / (-1.0 - z)
    expect += 0.25 * (1.0 - z) * (1.0 + 7.0 * z) / (z - 7.0)
    assert pick_eval_scalar(REP, z) == pytest.approx(expect)
    with pytest.raises(DomainViolationError):
        pick_eval_scalar(REP, 6.0)


def test_matrix_routes_agree():
    for t in range(10):
        a = random_in_window(4, WINDOW, RandomSpec(14, t))
        via_spectral = pick_eval_matrix(REP, a, via="spectral")
        via_atoms = pick_eval_matrix(REP, a, via="atoms")
        np.testing.assert_allclose(via_spectral, via_atoms, atol=1e-10)
    with pytest.raises(ValueError, match="route"):
        pick_eval_matrix(REP, np.eye(2) + 0.0j, via="magic")


def test_matrix_route_commuting_case_matches_scalar():
    a = np.diag([0.5, 2.0, 4.0]) + 0.0j
    out = pick_eval_matrix(REP, a, via="atoms")
    expect = np.diag([pick_eval_scalar(REP, x) for x in (0.5, 2.0, 4.0)])
    np.testing.assert_allclose(out, expect, atol=1e-12)


def test_exact_second_derivative_psd_and_matches_fd():
    spec = RandomSpec(15)
    m = random_in_window(3, WINDOW, spec)
    q = random_direction(3, spec.stream(1))
    exact = pick_second_derivative(REP, m, q)
    assert np.linalg.eigvalsh(exact).min() >= -1e-10
    f = pick_scalar_function(REP)
    fd = second_derivative_fd(f, m, q, default_fd_step(m))
    assert np.linalg.norm(exact - fd) / np.linalg.norm(exact) < 1e-4


def test_certify_representation():
    verdict = certify_representation(REP, 4, 100, RandomSpec(16))
    assert verdict.status == "certified"


def test_certify_needs_bounded_window():
    rep = PickRepresentation(0.0, 1.0, 0.0, 1.0, SpectrumWindow(0.0, np.inf))
    with pytest.raises(ValueError, match="bounded"):
        certify_representation(rep, 3, 10, RandomSpec(0))


def test_pure_quadratic_representation_is_x2_like():
    # gamma alone represents alpha + beta z + gamma z^2; second derivative 2 gamma Q^2
    rep = PickRepresentation(0.0, 0.0, 1.5, 1.0, WINDOW)
    q = np.array([[0.0, 1.0], [1.0, 0.0]])
    d2 = pick_second_derivative(rep, np.eye(2), q)
    np.testing.assert_allclose(d2, 3.0 * np.eye(2), atol=1e-14)
