"""Lie-algebraic diagnostics for generator sets.

Closure of {i * H_j} under commutators, center (commutant within the
algebra), derived subalgebra, and the trace-concentration metric
eta(G) = |Tr G| / ||G||_F that separates identity-like generators from
traceless ones.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .linalg import (DimMismatch, NotHermitian, QspecError, commutator,
                     is_hermitian, require_square)

CLOSURE_TOL = 1e-8

# Frobenius norms at or below this count as the zero matrix
ZERO_FLOOR = 1e-300


class ZeroMatrix(QspecError):
    """eta of the zero matrix is undefined."""


class DimCap(QspecError):
    """Closure dimension would exceed the requested cap."""


@dataclass(frozen=True, eq=False)
class LieBasis:
    """Orthonormal basis (real inner product Re Tr(A^dag B)) of a matrix
    Lie algebra; elements are anti-Hermitian N x N arrays."""

    dim_matrix: int
    elements: tuple

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class DlaReport:
    """Closure dimension, center/derived dimensions, and per-generator eta."""

    dim: int
    center_dim: int
    derived_dim: int
    eta_per_generator: tuple


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real part of the Frobenius inner product Tr(A^dag B)."""
    return float(np.real(np.sum(a.conj() * b)))


def _orthonormalize(basis, cand: np.ndarray, tol: float):
    """Project cand off an orthonormal basis; None when dependent.

    Modified Gram-Schmidt with one re-orthogonalization pass, so residuals
    of nearly dependent candidates are not lost to cancellation.
    """
    v = cand
    for _ in range(2):
        for b in basis:
            v = v - _inner(b, v) * b
    nrm = float(np.sqrt(_inner(v, v)))
    if nrm <= tol:
        return None
    return v / nrm


def lie_closure(generators, tol: float = CLOSURE_TOL, max_dim: int | None = None) -> LieBasis:
    """Orthonormal basis of the real Lie algebra generated by {i * H_j}.

    Breadth-first bracket search: each accepted element is queued against
    everything accepted before it, so the basis is independent of how the
    span is presented. max_dim defaults to N^2 (the ambient u(N) bound);
    exceeding it raises DimCap.
    """
    gens = [require_square(g) for g in generators]
    if not gens:
        raise DimMismatch("need at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape[0] != n:
            raise DimMismatch("generators must share one dimension")
        if not is_hermitian(g):
            raise NotHermitian("generators must be Hermitian")
    cap = n * n if max_dim is None else int(max_dim)
    if cap < 1:
        raise DimCap("max_dim must be at least 1")

    basis: list = []
    queue: deque = deque()

    def accept(cand: np.ndarray) -> None:
        v = _orthonormalize(basis, cand, tol)
        if v is None:
            return
        if len(basis) + 1 > cap:
            raise DimCap(f"closure dimension exceeds cap {cap}")
        basis.append(v)
        new = len(basis) - 1
        for k in range(new):
            queue.append((k, new))

    for g in gens:
        accept(1j * g)
    while queue:
        i, j = queue.popleft()
        accept(commutator(basis[i], basis[j]))
    return LieBasis(dim_matrix=n, elements=tuple(basis))


def _structure_rows(elements) -> np.ndarray:
    """Adjoint action as a (m^2, m) matrix: rows (j, k), columns i give
    the coefficient of basis element k in [X_i, X_j]."""
    m = len(elements)
    c = np.zeros((m, m, m))
    for i in range(m):
        for j in range(i + 1, m):
            br = commutator(elements[i], elements[j])
            for k in range(m):
                v = _inner(elements[k], br)
                c[i, j, k] = v
                c[j, i, k] = -v
    return np.transpose(c, (1, 2, 0)).reshape(m * m, m)


def center_basis(g: LieBasis, tol: float = CLOSURE_TOL) -> list:
    """Orthonormal basis of the center {X in g : [X, Y] = 0 for all Y}.

    Computed as the null space (singular values <= tol) of the adjoint
    action expressed in basis coordinates.
    """
    els = list(g.elements)
    if not els:
        return []
    rows = _structure_rows(els)
    _, svals, vh = np.linalg.svd(rows, full_matrices=True)
    out = []
    for idx in range(len(els)):
        sv = svals[idx] if idx < svals.shape[0] else 0.0
        if sv <= tol:
            coeff = vh[idx]
            out.append(sum(c * e for c, e in zip(coeff, els)))
    return out


def derived_algebra(g: LieBasis, tol: float = CLOSURE_TOL) -> list:
    """Orthonormal basis of span{[X, Y] : X, Y in g} inside g."""
    els = list(g.elements)
    out: list = []
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            v = _orthonormalize(out, commutator(els[i], els[j]), tol)
            if v is not None:
                out.append(v)
    return out


def eta(g) -> float:
    """Trace concentration |Tr G| / ||G||_F; sqrt(N) iff G is a nonzero
    multiple of the identity, 0 iff G is traceless.

    Evaluated as sqrt(|Tr G|^2 / ||G||_F^2) on a peak-rescaled copy: the
    squared ratio keeps integer cases (identity, Pauli strings) exact and
    the rescale keeps tiny norms away from underflow.
    """
    g = require_square(g)
    peak = float(np.max(np.abs(g)))
    if not np.isfinite(peak):
        raise ZeroMatrix("eta is undefined for non-finite matrices")
    if peak == 0.0:
        raise ZeroMatrix("eta is undefined for the zero matrix")
    gs = g / peak
    fro_sq = float(np.real(np.vdot(gs, gs)))   # >= 1 by construction
    if peak * float(np.sqrt(fro_sq)) <= ZERO_FLOOR:
        raise ZeroMatrix("eta is undefined for the zero matrix")
    tr = complex(np.trace(gs))
    return float(np.sqrt((tr.real * tr.real + tr.imag * tr.imag) / fro_sq))


def dla_report(generators, tol: float = CLOSURE_TOL, max_dim: int | None = None) -> DlaReport:
    """Closure, center, derived dimensions plus eta per generator."""
    basis = lie_closure(generators, tol=tol, max_dim=max_dim)
    return DlaReport(
        dim=len(basis.elements),
        center_dim=len(center_basis(basis, tol=tol)),
        derived_dim=len(derived_algebra(basis, tol=tol)),
        eta_per_generator=tuple(eta(g) for g in generators),
    )
