"""Joint concavity machinery for several matrix variables.

Parallel sums come with an exact Hessian certificate: the second derivative
along any tuple of directions factors through a block projection, so negative
semidefiniteness is structural, not numerical luck.  Tensor products of
fractional powers are handled twice, by direct spectral calculus and by an
integral of parallel-sum-type resolvents over the positive orthant; the two
routes cross-check each other.  On top of these sit the Lieb trace functional,
the skew-information form, and operator perspectives with their discrete
Loewner-representation evaluator.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Callable, Sequence

import numpy as np

from .convexity import ScalarFunction, Verdict, _aggregate
from .errors import ConditioningError, DimensionMismatchError, UnsupportedArityError
from .linalg import (
    apply_function,
    matrix_power_psd,
    max_eigenvalue,
    min_eigenvalue,
    op_norm,
    spectral_decompose,
    tensor,
)
from .quadrature import QuadratureConfig, orthant_rule
from .rand import RandomSpec

#: Entries of a concavity-domain tuple must clear this eigenvalue floor.
POSITIVITY_FLOOR = 1e-8

#: Default verdict thresholds for finite-difference concavity margins.
TOL_CERT_FD = 1e-5
TOL_VIOL_FD = 1e-4


def _check_tuple(mats: Sequence[np.ndarray], floor: float = POSITIVITY_FLOOR):
    if not mats:
        raise ValueError("empty matrix tuple")
    n = mats[0].shape[0]
    for j, a in enumerate(mats):
        if a.shape != (n, n):
            raise DimensionMismatchError(
                f"tuple entry {j} has shape {a.shape}, expected ({n}, {n})"
            )
        lo = min_eigenvalue(a)
        if lo < floor:
            raise ConditioningError(
                f"tuple entry {j} has min eigenvalue {lo:.3e} below floor {floor:.0e}"
            )


def _inv_sqrt(a: np.ndarray) -> np.ndarray:
    w, u = spectral_decompose(a)
    return (u * (1.0 / np.sqrt(w.real))) @ u.conj().T


def normalize_directions(dirs: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Scale a direction tuple so the largest operator norm equals one."""
    scale = max(op_norm(q) for q in dirs)
    if scale == 0.0:
        return [np.array(q) for q in dirs]
    return [q / scale for q in dirs]


def parallel_sum(mats: Sequence[np.ndarray]) -> np.ndarray:
    """(sum_j A_j^(-1))^(-1); dominated by every A_j in the Loewner order."""
    _check_tuple(mats)
    r = sum(np.linalg.inv(a) for a in mats)
    return np.linalg.inv(r)


def parallel_sum_hessian(
    mats: Sequence[np.ndarray], dirs: Sequence[np.ndarray]
) -> np.ndarray:
    """Exact d^2/dt^2 of the parallel sum along A_j + t Q_j.

    Equals -2 sum_jm Y_j* (delta_jm - T_jm) Y_m with
    Y_j = A_j^(-1/2) Q_j A_j^(-1) R^(-1) and T_jm = A_j^(-1/2) R^(-1) A_m^(-1/2),
    R = sum_j A_j^(-1).  Negative semidefinite because T is a projection.
    """
    _check_tuple(mats)
    if len(dirs) != len(mats):
        raise DimensionMismatchError("direction tuple length must match matrix tuple")
    invs = [np.linalg.inv(a) for a in mats]
    r_inv = np.linalg.inv(sum(invs))
    roots = [_inv_sqrt(a) for a in mats]
    ys = [roots[j] @ dirs[j] @ invs[j] @ r_inv for j in range(len(mats))]
    total = np.zeros_like(mats[0])
    for j, m in itertools.product(range(len(mats)), repeat=2):
        t_jm = roots[j] @ r_inv @ roots[m]
        delta = np.eye(mats[0].shape[0]) if j == m else 0.0
        total = total + ys[j].conj().T @ (delta - t_jm) @ ys[m]
    h = -2.0 * total
    return 0.5 * (h + h.conj().T)


def projection_block_matrix(mats: Sequence[np.ndarray]) -> np.ndarray:
    """The kn x kn block matrix T with blocks A_j^(-1/2) R^(-1) A_m^(-1/2)."""
    _check_tuple(mats)
    invs = [np.linalg.inv(a) for a in mats]
    r_inv = np.linalg.inv(sum(invs))
    roots = [_inv_sqrt(a) for a in mats]
    k, n = len(mats), mats[0].shape[0]
    big = np.zeros((k * n, k * n), dtype=complex)
    for j, m in itertools.product(range(k), repeat=2):
        big[j * n:(j + 1) * n, m * n:(m + 1) * n] = roots[j] @ r_inv @ roots[m]
    return big


def projection_residuals(mats: Sequence[np.ndarray]) -> tuple[float, float]:
    """Frobenius norms (||T - T*||, ||T^2 - T||) of the block projection."""
    t = projection_block_matrix(mats)
    return (
        float(np.linalg.norm(t - t.conj().T)),
        float(np.linalg.norm(t @ t - t)),
    )


def tuple_second_difference(
    map_fn: Callable[[Sequence[np.ndarray]], np.ndarray],
    mats: Sequence[np.ndarray],
    dirs: Sequence[np.ndarray],
    h: float,
):
    """Central second difference of a tuple map along (Q_1, ..., Q_k)."""
    plus = map_fn([a + h * q for a, q in zip(mats, dirs)])
    mid = map_fn(list(mats))
    minus = map_fn([a - h * q for a, q in zip(mats, dirs)])
    return (plus - 2.0 * mid + minus) / (h * h)


def joint_concavity_test(
    map_fn: Callable[[Sequence[np.ndarray]], np.ndarray],
    sampler: Callable[[int, int, np.random.Generator], list[np.ndarray]],
    k: int,
    n: int,
    trials: int,
    spec: RandomSpec,
    h: float | None = None,
    mode: str = "fd",
    scalar: bool = False,
    tol_cert: float = TOL_CERT_FD,
    tol_viol: float = TOL_VIOL_FD,
) -> Verdict:
    """Randomized joint-concavity test of a tuple map.

    mode "fd": the second difference along random directions must be negative
    (semi)definite.  mode "midpoint": the definitional gap
    F((A+B)/2) - (F(A) + F(B))/2 must be positive semidefinite.  For trace
    functionals pass scalar=True; margins then compare real numbers instead of
    eigenvalues.
    """
    from .rand import random_hermitian_from  # local to avoid import cycle noise

    margins, witnesses = [], []
    for t in range(trials):
        rng = spec.stream(t).rng()
        mats = sampler(k, n, rng)
        if mode == "fd":
            dirs = normalize_directions(
                [random_hermitian_from(n, rng) for _ in range(k)]
            )
            step = h if h is not None else (
                (1.0 + max(op_norm(a) for a in mats)) * np.finfo(float).eps ** 0.25
            )
            d2 = tuple_second_difference(map_fn, mats, dirs, step)
            margin = -float(np.real(d2)) if scalar else -max_eigenvalue(d2)
            witnesses.append(
                {"kind": "joint_fd", "matrices": mats, "directions": dirs,
                 "h": step, "stream_id": t, "margin": margin}
            )
        elif mode == "midpoint":
            other = sampler(k, n, rng)
            gap = map_fn([0.5 * (a + b) for a, b in zip(mats, other)]) - 0.5 * (
                map_fn(list(mats)) + map_fn(list(other))
            )
            margin = float(np.real(gap)) if scalar else min_eigenvalue(gap)
            witnesses.append(
                {"kind": "joint_midpoint", "matrices": mats, "others": other,
                 "stream_id": t, "margin": margin}
            )
        else:
            raise ValueError(f"unknown mode {mode!r}")
        margins.append(margin)
    return _aggregate(margins, witnesses, tol_cert, tol_viol)


# ---------------------------------------------------------------------------
# Tensor products of fractional powers.


def check_power_vector(p: Sequence[float]) -> list[float]:
    ps = [float(x) for x in p]
    if any(x < 0.0 for x in ps):
        raise ValueError(f"powers must be nonnegative, got {ps}")
    if sum(ps) > 1.0 + 1e-12:
        raise ValueError(f"powers must sum to at most 1, got {ps}")
    return ps


def tensor_power_direct(mats: Sequence[np.ndarray], p: Sequence[float]) -> np.ndarray:
    """Kronecker product of spectral fractional powers A_j^(p_j) (A^0 = I)."""
    ps = check_power_vector(p)
    if len(ps) != len(mats):
        raise DimensionMismatchError("power vector length must match tuple length")
    _check_tuple(mats)
    out = np.eye(1)
    for a, pj in zip(mats, ps):
        out = tensor(out, matrix_power_psd(a, pj))
    return out


def _embedded_inverses(mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Inverses of I x ... x A_j x ... x I on the full tensor space."""
    eyes = [np.eye(a.shape[0]) for a in mats]
    out = []
    for j, a in enumerate(mats):
        factors = [np.linalg.inv(a) if m == j else eyes[m] for m in range(len(mats))]
        big = np.eye(1)
        for f in factors:
            big = tensor(big, f)
        out.append(big)
    return out


def tensor_power_integral(
    mats: Sequence[np.ndarray],
    p: Sequence[float],
    quad: QuadratureConfig = QuadratureConfig(),
) -> np.ndarray:
    """Tensor power via the resolvent integral over the positive orthant.

    Approximates A_1^(p_1) x ... x A_k^(p_k) for strictly positive p_j summing
    to one, k in {2, 3}, by quadrature of
    (A~_1^(-1) + u_2 A~_2^(-1) + ... + u_k A~_k^(-1))^(-1) against the measure
    prod u_j^(p_j) du_j / u_j, normalized by the constant evaluated on the
    same grid (so commuting tuples are reproduced to roundoff).
    """
    ps = check_power_vector(p)
    k = len(mats)
    if len(ps) != k:
        raise DimensionMismatchError("power vector length must match tuple length")
    if any(x <= 0.0 for x in ps) or abs(sum(ps) - 1.0) > 1e-12:
        raise ValueError("integral route needs all p_j > 0 with sum exactly 1")
    if k not in (2, 3):
        raise UnsupportedArityError(
            f"integral route supports k in {{2, 3}}, got k={k}; "
            "use tensor_power_direct for other arities"
        )
    _check_tuple(mats)
    inv_tilde = _embedded_inverses(mats)
    points, weights = orthant_rule(ps[1:], quad.nodes_per_axis)

    total = np.zeros_like(inv_tilde[0])
    norm = 0.0
    for us, weight in zip(points, weights):
        stack = inv_tilde[0] + sum(u * g for u, g in zip(us, inv_tilde[1:]))
        total = total + weight * np.linalg.inv(stack)
        norm += weight / (1.0 + us.sum())
    return total / norm


def c_constant(
    p: Sequence[float], quad: QuadratureConfig = QuadratureConfig()
) -> float:
    """The normalizing constant of the tensor-power integral representation.

    A (k-1)-dimensional integral of 1/(1 + u_2 + ... + u_k) against
    prod u_j^(p_j) du_j / u_j; equals the product of Gamma(p_j) when the p_j
    sum to one, which the independent gamma_quadrature oracle verifies.
    """
    ps = check_power_vector(p)
    if len(ps) < 2:
        raise ValueError("the constant is defined for k >= 2")
    if any(x <= 0.0 for x in ps):
        raise ValueError("integral diverges when some p_j = 0; drop that axis")
    points, weights = orthant_rule(ps[1:], quad.nodes_per_axis)
    return float(np.sum(weights / (1.0 + points.sum(axis=1))))


# ---------------------------------------------------------------------------
# Lieb functional, skew information, perspectives.


def _check_exponents(p: float, r: float):
    if p < 0.0 or r < 0.0 or p + r > 1.0 + 1e-12:
        raise ValueError(f"need p, r >= 0 with p + r <= 1, got p={p}, r={r}")


def lieb_functional(
    a: np.ndarray, b: np.ndarray, k: np.ndarray, p: float, r: float
) -> float:
    """Tr[A^p K* B^r K]; real for this sandwiched form, jointly concave in (A, B)."""
    _check_exponents(p, r)
    _check_tuple([a])
    _check_tuple([b])
    ap = matrix_power_psd(a, p)
    br = matrix_power_psd(b, r)
    return float(np.trace(ap @ k.conj().T @ br @ k).real)


def vec_columns(k: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(k).flatten(order="F")


def vectorization_residual(
    a: np.ndarray, b: np.ndarray, k: np.ndarray, p: float, r: float
) -> float:
    """|trace form - bilinear form| for the vectorized Lieb functional.

    With column stacking the transpose lands on the A factor:
    Tr[A^p K* B^r K] = <vec K| (A^p)^T x B^r |vec K>, fixed by an index-level
    expansion of both sides.
    """
    trace_form = lieb_functional(a, b, k, p, r)
    ap = matrix_power_psd(a, p)
    br = matrix_power_psd(b, r)
    v = vec_columns(k)
    bilinear = float((v.conj() @ tensor(ap.T, br) @ v).real)
    return abs(trace_form - bilinear)


def wyd_skew_information(
    rho: np.ndarray, k: np.ndarray, p: float, floor: float = 1e-12
) -> float:
    """Tr[K rho^p K rho^(1-p)] - Tr[K rho K]; zero iff [rho, K] = 0, else < 0.

    The conventionally normalized skew information is the negation of this
    value.  Eigenvalues of rho below ``floor`` are lifted to ``floor`` with
    trace renormalization before the fractional powers are taken.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"skew exponent must lie in (0, 1), got {p}")
    w, u = spectral_decompose(rho)
    w = np.clip(w.real, floor, None)
    w = w / w.sum()
    rho_p = (u * w**p) @ u.conj().T
    rho_q = (u * w ** (1.0 - p)) @ u.conj().T
    rho_r = (u * w) @ u.conj().T
    cross = np.trace(k @ rho_p @ k @ rho_q).real
    plain = np.trace(k @ rho_r @ k).real
    return float(cross - plain)


def perspective(f: ScalarFunction, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """B^(1/2) f(B^(-1/2) A B^(-1/2)) B^(1/2); degree-one homogeneous in (A, B)."""
    _check_tuple([b])
    w, u = spectral_decompose(b)
    b_half = (u * np.sqrt(w.real)) @ u.conj().T
    b_inv_half = (u * (1.0 / np.sqrt(w.real))) @ u.conj().T
    core = b_inv_half @ a @ b_inv_half
    core = 0.5 * (core + core.conj().T)
    val = b_half @ apply_function(core, f.fn, f.domain, source="B^-1/2 A B^-1/2") @ b_half
    return 0.5 * (val + val.conj().T)


@dataclasses.dataclass(frozen=True)
class KuboAndoRepresentation:
    """Discrete Loewner representation of an operator mean: a A + b B plus
    positive weights on harmonic-mean kernels at locations t_j > 0."""

    a: float
    b: float
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        for t, nu in self.atoms:
            if t <= 0.0:
                raise ValueError(f"atom location must be positive, got t={t}")
            if nu <= 0.0:
                raise ValueError(f"atom weight must be positive, got nu={nu}")

    def scalar_function(self) -> ScalarFunction:
        """The induced scalar function (set B = 1, A = x)."""

        def f(x: float) -> float:
            total = self.a * x + self.b
            for t, nu in self.atoms:
                total += nu * (t * x / (1.0 + t * x)) * (1.0 + t) / t
            return total

        from .linalg import SpectrumWindow

        return ScalarFunction("kubo_ando_scalar", f, SpectrumWindow(0.0, np.inf))


def kubo_ando_eval(
    rep: KuboAndoRepresentation, a: np.ndarray, b: np.ndarray
) -> np.ndarray:
    """a A + b B + sum_j nu_j ((t_j A)^(-1) + B^(-1))^(-1) (1 + t_j)/t_j."""
    _check_tuple([a])
    _check_tuple([b])
    total = rep.a * a + rep.b * b
    for t, nu in rep.atoms:
        total = total + nu * parallel_sum([t * a, b]) * (1.0 + t) / t
    return 0.5 * (total + total.conj().T)
