"""Dense complex linear algebra and seeded randomness.

Hermitian eigensolves, generator exponentials, Haar-random unitaries,
commutators, and norm/trace helpers. All randomness in the package flows
through counter-based Philox generators addressed by an explicit 64-bit
seed plus an integer stream path, so every stochastic result is
reproducible from its arguments alone.
"""

from typing import NamedTuple

import numpy as np

_MASK64 = (1 << 64) - 1

# Hermiticity check: max |M_ij - conj(M_ji)| <= tol * (1 + ||M||_F)
HERMITIAN_TOL = 1e-12


class QspecError(Exception):
    """Base class for computation errors raised by this package."""


class NotHermitian(QspecError):
    """Matrix fails the Hermiticity tolerance."""


class NoConvergence(QspecError):
    """Eigensolver did not converge."""


class DimMismatch(QspecError):
    """Operands have missing or incompatible dimensions."""


def rng_stream(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for a 64-bit seed and an optional stream path.

    Distinct stream paths yield statistically independent streams for the
    same seed; experiments use them to give each role (data, init, model,
    shuffling) its own stream without seed arithmetic.
    """
    key = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                 spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(key))


def derive_seed(seed: int, *stream: int) -> int:
    """Fold a seed and a stream path into a fresh 64-bit seed."""
    key = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                 spawn_key=tuple(int(s) for s in stream))
    lo, hi = key.generate_state(2, dtype=np.uint32)
    return (int(lo) | (int(hi) << 32)) & _MASK64


def complex_gaussians(gen: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussians via the Box-Muller map on uniforms."""
    # 1 - U keeps the log argument inside (0, 1]
    radial = np.sqrt(-np.log(1.0 - gen.random(shape)))
    return radial * np.exp(2j * np.pi * gen.random(shape))


def require_square(m) -> np.ndarray:
    """Coerce to a complex 2-D square array or raise DimMismatch."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = require_square(m)
    bound = tol * (1.0 + float(np.linalg.norm(m)))
    return float(np.max(np.abs(m - m.conj().T))) <= bound


class HermitianEigen(NamedTuple):
    values: np.ndarray   # real, ascending
    vectors: np.ndarray  # orthonormal columns, vectors[:, k] for values[k]


def eig_hermitian(h) -> HermitianEigen:
    """Full eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order with matching orthonormal
    eigenvector columns, so h = vectors @ diag(values) @ vectors.conj().T.
    Raises NotHermitian when the input fails the symmetry tolerance and
    NoConvergence if the underlying solver gives up.
    """
    h = require_square(h)
    if not is_hermitian(h):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermitianEigen(values=values, vectors=vectors)


def unitary_from_generator(h, theta: float) -> np.ndarray:
    """exp(-i * theta * h) for Hermitian h, via eigendecomposition."""
    values, vectors = eig_hermitian(h)
    phases = np.exp(-1j * float(theta) * values)
    return (vectors * phases) @ vectors.conj().T


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed n x n unitary, deterministic in the seed.

    QR of a complex Ginibre matrix, with the R diagonal renormalized to
    unit-modulus phases; without that correction QR output is not Haar.
    """
    n = int(n)
    if n < 1:
        raise DimMismatch("dimension must be at least 1")
    z = complex_gaussians(rng_stream(seed), (n, n))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    mags = np.abs(diag)
    phases = np.where(mags > 0, diag / np.where(mags > 0, mags, 1.0), 1.0)
    return q * phases


def commutator(a, b) -> np.ndarray:
    """Matrix commutator [a, b] = a @ b - b @ a."""
    a = require_square(a)
    b = require_square(b)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def frob_trace(m) -> tuple[float, complex]:
    """Frobenius norm and trace of a square matrix, as (norm, trace)."""
    m = require_square(m)
    return float(np.linalg.norm(m)), complex(np.trace(m))
