"""Seedable random ensembles: GUE-like Hermitian matrices, spectra confined to
a window, Haar unitaries, unit directions, and random density operators.

Reproducibility contract: every draw is a pure function of a
:class:`RandomSpec`, and streams split by ``stream_id`` never share generator
state, so parallel trial loops are bit-stable.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import UnboundedWindowError
from .linalg import SpectrumWindow, op_norm

#: Margin fraction kept clear of each window edge when sampling spectra.
WINDOW_MARGIN = 0.05


@dataclasses.dataclass(frozen=True)
class RandomSpec:
    """Seed plus stream identifier; identical pairs reproduce draws bit-exactly."""

    seed: int
    stream_id: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((self.seed, self.stream_id)))
        )

    def stream(self, stream_id: int) -> "RandomSpec":
        return RandomSpec(self.seed, stream_id)


def _complex_gaussian(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def haar_unitary_from(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with the
    phase-of-diagonal correction."""
    q, r = np.linalg.qr(_complex_gaussian(n, n, rng))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_unitary(n: int, spec: RandomSpec) -> np.ndarray:
    return haar_unitary_from(n, spec.rng())


def random_hermitian_from(n: int, rng: np.random.Generator) -> np.ndarray:
    g = _complex_gaussian(n, n, rng)
    return 0.5 * (g + g.conj().T)


def random_hermitian(n: int, spec: RandomSpec) -> np.ndarray:
    """GUE-like sample (G + G*)/2 with G complex standard Gaussian."""
    return random_hermitian_from(n, spec.rng())


def random_in_window_from(
    n: int, window: SpectrumWindow, rng: np.random.Generator
) -> np.ndarray:
    if not window.is_bounded:
        raise UnboundedWindowError(
            "random_in_window needs a bounded window; pass a compact sub-window"
        )
    inner = window.shrunk(WINDOW_MARGIN)
    lam = rng.uniform(inner.a, inner.b, size=n)
    u = haar_unitary_from(n, rng)
    return (u * lam) @ u.conj().T


def random_in_window(n: int, window: SpectrumWindow, spec: RandomSpec) -> np.ndarray:
    """U diag(lambda) U* with lambda uniform on the 5%-shrunk window and U Haar."""
    return random_in_window_from(n, window, spec.rng())


def random_direction_from(n: int, rng: np.random.Generator) -> np.ndarray:
    q = random_hermitian_from(n, rng)
    return q / op_norm(q)


def random_direction(n: int, spec: RandomSpec) -> np.ndarray:
    """Random Hermitian matrix normalized to unit operator norm."""
    return random_direction_from(n, spec.rng())


def random_density_from(n: int, rng: np.random.Generator) -> np.ndarray:
    g = _complex_gaussian(n, n, rng)
    w = g @ g.conj().T
    return w / np.trace(w).real


def random_density(n: int, spec: RandomSpec) -> np.ndarray:
    """Hilbert-Schmidt ensemble: G G* / Tr(G G*), G complex Gaussian."""
    return random_density_from(n, spec.rng())


def random_pure_density(n: int, spec: RandomSpec) -> np.ndarray:
    """Rank-one projector onto a Haar-random unit vector."""
    rng = spec.rng()
    v = _complex_gaussian(n, 1, rng)[:, 0]
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_simplex(k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform probability vector on the k-simplex."""
    e = rng.exponential(size=k)
    return e / e.sum()
