"""Exact state-vector simulation of the experiment circuit family.

Circuit layout for n qubits (qubit 0 is the leftmost, most significant
bit of a basis index):

    |psi(theta, x)> = e^{-i theta_L H_L} ... e^{-i theta_1 H_1}
                      * U_ent * RY(x)^{tensor n} |0...0>

with RY(x) = exp(-i (x/2) Y) encoding the scalar input on every qubit and
U_ent a CNOT ring 0->1, 1->2, ..., n-1->0 (a single CNOT for n = 2,
nothing for n = 1). The default observable is Z on qubit 0. Generator
eigensystems are cached on the circuit description, so repeated forward
passes cost one small matmul chain per layer.
"""

import numpy as np

from .linalg import (DimMismatch, HermitianEigen, eig_hermitian, haar_unitary,
                     require_square)

DEDUP_TOL = 1e-9
FD_STEP = 1e-4

MAX_QUBITS = 12

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. "ZI" = Z on qubit 0."""
    label = label.strip().upper()
    if not label or any(ch not in PAULI_1Q for ch in label):
        raise ValueError(f"invalid Pauli label {label!r}; use characters I, X, Y, Z")
    out = PAULI_1Q[label[0]]
    for ch in label[1:]:
        out = np.kron(out, PAULI_1Q[ch])
    return out


def _entangler_perm(n: int, pairs) -> np.ndarray:
    """Basis permutation of the CNOT sequence: index b maps to perm[b]."""
    perm = np.arange(1 << n)
    for c, t in pairs:
        cmask = 1 << (n - 1 - c)
        tmask = 1 << (n - 1 - t)
        # target bit flips exactly on the indices whose control bit is set
        perm = np.where(perm & cmask != 0, perm ^ tmask, perm)
    return perm


def default_entangler(n: int) -> tuple:
    """CNOT ring pairs: 0->1, ..., n-1->0; one CNOT for n = 2, none for 1."""
    if n == 1:
        return ()
    if n == 2:
        return ((0, 1),)
    return tuple((q, (q + 1) % n) for q in range(n))


class CircuitSpec:
    """Immutable circuit description with cached generator eigensystems.

    n: qubit count; generators: one Hermitian 2^n x 2^n matrix per layer;
    entangler: CNOT (control, target) pairs applied once after encoding;
    observable: Hermitian matrix, default Z on qubit 0.
    """

    __slots__ = ("n", "dim", "generators", "entangler", "observable",
                 "_eigs", "_perm", "_obs_diag")

    def __init__(self, n: int, generators, entangler=None, observable=None):
        self.n = int(n)
        if self.n < 1 or self.n > MAX_QUBITS:
            raise DimMismatch(f"qubit count must be in 1..{MAX_QUBITS}")
        self.dim = 1 << self.n

        gens = tuple(require_square(g) for g in generators)
        if not gens:
            raise DimMismatch("need at least one layer generator")
        for g in gens:
            if g.shape[0] != self.dim:
                raise DimMismatch(f"generator shape {g.shape} != ({self.dim}, {self.dim})")
        self.generators = gens
        self._eigs = tuple(eig_hermitian(g) for g in gens)

        if entangler is None:
            entangler = default_entangler(self.n)
        pairs = tuple((int(c), int(t)) for c, t in entangler)
        for c, t in pairs:
            if not (0 <= c < self.n and 0 <= t < self.n) or c == t:
                raise DimMismatch(f"invalid CNOT pair ({c}, {t}) for n = {self.n}")
        self.entangler = pairs
        self._perm = _entangler_perm(self.n, pairs)

        if observable is None:
            # Z on qubit 0: +1 when the most significant bit is 0
            zdiag = 1.0 - 2.0 * ((np.arange(self.dim) >> (self.n - 1)) & 1)
            observable = np.diag(zdiag.astype(complex))
        obs = require_square(observable)
        if obs.shape[0] != self.dim:
            raise DimMismatch(f"observable shape {obs.shape} != ({self.dim}, {self.dim})")
        if not np.allclose(obs, obs.conj().T, atol=1e-12):
            raise DimMismatch("observable must be Hermitian")
        self.observable = obs
        offdiag = obs - np.diag(np.diagonal(obs))
        self._obs_diag = (np.real(np.diagonal(obs)).copy()
                          if float(np.max(np.abs(offdiag))) == 0.0 else None)

    @property
    def depth(self) -> int:
        return len(self.generators)

    def layer_eigs(self, layer: int) -> HermitianEigen:
        return self._eigs[layer]


def encode_inputs(spec: CircuitSpec, xs) -> np.ndarray:
    """Post-encoding states for a batch of scalar inputs, shape (B, 2^n).

    RY(x) = exp(-i (x/2) Y) turns each qubit of |0...0> into
    (cos(x/2), sin(x/2)); the entangler permutation is applied afterwards.
    Precompute this once per dataset: it does not depend on theta.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.ndim != 1:
        raise DimMismatch("inputs must be scalars or a 1-D batch")
    c, s = np.cos(xs / 2.0), np.sin(xs / 2.0)
    qubit = np.stack([c, s], axis=1)                        # (B, 2)
    states = np.ones((xs.shape[0], 1), dtype=complex)
    for _ in range(spec.n):
        # append the next qubit as the least significant index bit
        states = (states[:, :, None] * qubit[:, None, :]).reshape(xs.shape[0], -1)
    out = np.empty_like(states)
    out[:, spec._perm] = states
    return out


def circuit_forward_encoded(spec: CircuitSpec, thetas, encoded) -> np.ndarray:
    """Expectation values for V parameter vectors x B encoded states.

    thetas has shape (V, depth); encoded is the output of encode_inputs,
    shape (B, 2^n). Returns a real (V, B) array. This is the batched
    engine behind forward passes and finite differences.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != spec.depth:
        raise DimMismatch(f"thetas shape {thetas.shape} != (V, {spec.depth})")
    states = np.broadcast_to(encoded[None, :, :],
                             (thetas.shape[0],) + encoded.shape).copy()
    for layer in range(spec.depth):
        lam, vecs = spec._eigs[layer]
        phases = np.exp(-1j * np.outer(thetas[:, layer], lam))   # (V, N)
        # state rows: psi' = V diag(phases) V^dag psi
        states = (states @ vecs.conj()) * phases[:, None, :] @ vecs.T
    if spec._obs_diag is not None:
        dens = states.real * states.real + states.imag * states.imag
        return dens @ spec._obs_diag
    return np.real(np.einsum("vbn,nm,vbm->vb", states.conj(), spec.observable, states))


def circuit_forward_batch(spec: CircuitSpec, theta, xs) -> np.ndarray:
    """Expectation <psi(theta, x)| O |psi(theta, x)> over a batch of x."""
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape[0] != spec.depth:
        raise DimMismatch(f"theta has length {theta.shape[0]}, expected {spec.depth}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return circuit_forward_encoded(spec, theta[None, :], encode_inputs(spec, xs))[0]


def circuit_forward(spec: CircuitSpec, theta, x: float) -> float:
    """Expectation value for a single parameter vector and input."""
    return float(circuit_forward_batch(spec, theta, [float(x)])[0])


def grad_fd(spec: CircuitSpec, theta, x: float, step: float = FD_STEP) -> np.ndarray:
    """Central-difference gradient of the expectation in theta.

    O(step^2) accurate: halving the step shrinks the error about 4x.
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape[0] != spec.depth:
        raise DimMismatch(f"theta has length {theta.shape[0]}, expected {spec.depth}")
    if not np.isfinite(step) or step <= 0:
        raise ValueError("step must be positive")
    eye = np.eye(spec.depth)
    stacked = np.vstack([theta[None, :] + step * eye, theta[None, :] - step * eye])
    vals = circuit_forward_encoded(spec, stacked, encode_inputs(spec, [float(x)]))[:, 0]
    return (vals[:spec.depth] - vals[spec.depth:]) / (2.0 * step)


def trig_poly_coeffs(h, phi, obs, tol: float = DEDUP_TOL) -> dict:
    """Fourier coefficients of f(t) = <phi| e^{itH} O e^{-itH} |phi>.

    The accessible modes are eigenvalue gaps w = lam_q - lam_p of H; the
    coefficient of e^{-i t w} is the sum over pairs at that gap of
    conj(<p|phi>) <q|phi> O_pq in the eigenbasis. Gaps within tol are
    merged. Returns a dict mapping the real gap to its complex
    coefficient; conjugate symmetry a_{-w} = conj(a_w) holds for
    Hermitian O and the coefficients reconstruct direct simulation.
    """
    lam, vecs = eig_hermitian(h)
    phi = np.asarray(phi, dtype=complex).ravel()
    if phi.shape[0] != lam.shape[0]:
        raise DimMismatch(f"state length {phi.shape[0]} != dimension {lam.shape[0]}")
    obs = require_square(obs)
    if obs.shape[0] != lam.shape[0]:
        raise DimMismatch(f"observable shape {obs.shape} != generator dimension")

    w = vecs.conj().T @ phi                 # eigenbasis amplitudes
    ot = vecs.conj().T @ obs @ vecs
    amp = np.outer(w.conj(), w) * ot        # amp[p, q]
    gaps = (lam[None, :] - lam[:, None]).ravel()
    vals = amp.ravel()

    order = np.argsort(gaps, kind="stable")
    gaps = gaps[order]
    vals = vals[order]
    splits = np.where(np.diff(gaps) > tol)[0] + 1
    coeffs = {}
    for run_g, run_v in zip(np.split(gaps, splits), np.split(vals, splits)):
        coeffs[float(run_g.mean())] = complex(run_v.sum())
    return coeffs


def make_generator(n_dim: int, b_max: float, seed: int) -> np.ndarray:
    """Random Hermitian with eigenvalues exactly linspace(-b_max, b_max).

    Conjugates the known diagonal by a Haar unitary, so the gap structure
    is controlled while the eigenbasis is generic. Deterministic in seed.
    """
    n_dim = int(n_dim)
    if n_dim < 2:
        raise DimMismatch("dimension must be at least 2")
    b_max = float(b_max)
    if not np.isfinite(b_max) or b_max < 0:
        raise ValueError("b_max must be finite and nonnegative")
    lam = np.linspace(-b_max, b_max, n_dim)
    u = haar_unitary(n_dim, seed)
    h = (u * lam) @ u.conj().T
    return (h + h.conj().T) / 2.0


def grad_analytic_1p(h, theta: float, obs, state) -> float:
    """Exact derivative d/dt <s| e^{itH} O e^{-itH} |s> at t = theta.

    Equals 2 Im(<psi| O H |psi>) with |psi> = e^{-i theta H}|s>.
    """
    lam, vecs = eig_hermitian(h)
    state = np.asarray(state, dtype=complex).ravel()
    obs = require_square(obs)
    if state.shape[0] != lam.shape[0] or obs.shape[0] != lam.shape[0]:
        raise DimMismatch("state/observable dimension mismatch")
    amps = vecs.conj().T @ state
    psi = vecs @ (np.exp(-1j * float(theta) * lam) * amps)
    return float(2.0 * np.imag(psi.conj() @ (obs @ (h @ psi))))


def grad_analytic_1p_batch(h, thetas, obs, state) -> np.ndarray:
    """grad_analytic_1p over a batch of theta values (one eigensolve)."""
    lam, vecs = eig_hermitian(h)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    state = np.asarray(state, dtype=complex).ravel()
    obs = require_square(obs)
    if state.shape[0] != lam.shape[0] or obs.shape[0] != lam.shape[0]:
        raise DimMismatch("state/observable dimension mismatch")
    amps = vecs.conj().T @ state
    phases = np.exp(-1j * np.outer(thetas, lam))            # (B, N)
    psis = (phases * amps[None, :]) @ vecs.T                # rows are psi^T
    m = obs @ np.asarray(h, dtype=complex)
    return 2.0 * np.imag(np.einsum("bi,ij,bj->b", psis.conj(), m, psis))
