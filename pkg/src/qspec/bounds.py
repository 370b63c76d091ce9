"""Sobolev machinery on the d-torus for approximation bounds.

Finite Fourier series with coefficients indexed by integer frequency
vectors, Sobolev norms, truncation errors, annulus witnesses that realize
the minimax lower bound, log-log rate fitting, the Jackson-type upper
bound, and the large-d limit probe.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import QspecError, complex_gaussians, rng_stream

# coefficients below this magnitude are dropped at construction
PRUNE_FLOOR = 1e-300


class EmptyAnnulus(QspecError):
    """Requested annulus contains no integer points."""


class DomainError(QspecError):
    """Parameters outside the valid domain (e.g. smoothness r <= d/2)."""


@dataclass(frozen=True)
class SobolevParams:
    """Torus dimension d and smoothness r; requires r > d/2."""

    d: int
    r: float

    def __post_init__(self):
        if int(self.d) < 1:
            raise DomainError("dimension d must be at least 1")
        if not np.isfinite(self.r) or self.r <= self.d / 2:
            raise DomainError(f"need smoothness r > d/2 = {self.d / 2}, got r = {self.r}")


class FourierSeries:
    """Finite Fourier series sum_s b_s e^{i s.x} on the d-torus.

    coeffs maps integer tuples s of length d to complex b_s; entries with
    |b_s| < PRUNE_FLOOR are dropped at construction.
    """

    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: dict):
        self.d = int(d)
        if self.d < 1:
            raise DomainError("dimension d must be at least 1")
        clean = {}
        for s, b in coeffs.items():
            key = tuple(int(v) for v in (s if isinstance(s, tuple) else (s,)))
            if len(key) != self.d:
                raise DomainError(f"frequency {key} has length {len(key)}, expected {self.d}")
            b = complex(b)
            if abs(b) >= PRUNE_FLOOR:
                clean[key] = b
        self.coeffs = clean

    def __len__(self):
        return len(self.coeffs)

    def evaluate(self, x) -> complex:
        """Pointwise value sum_s b_s e^{i s.x} at a point x in R^d."""
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.d:
            raise DomainError(f"point has length {x.shape[0]}, expected {self.d}")
        total = 0j
        for s, b in self.coeffs.items():
            total += b * np.exp(1j * float(np.dot(s, x)))
        return total


def _norm_sq(s: tuple) -> int:
    return sum(v * v for v in s)


def sobolev_norm(h: FourierSeries, r: float) -> float:
    """Weighted l2 norm sqrt(sum (1 + |s|^2)^r |b_s|^2)."""
    if not np.isfinite(r) or r < 0:
        raise DomainError("smoothness r must be finite and nonnegative")
    total = 0.0
    for s, b in h.coeffs.items():
        total += (1.0 + _norm_sq(s)) ** r * (b.real * b.real + b.imag * b.imag)
    return float(np.sqrt(total))


def truncation_error(h: FourierSeries, k: float) -> float:
    """l2 mass of the coefficients strictly outside the ball |s| <= k."""
    if not np.isfinite(k) or k < 0:
        raise DomainError("truncation radius must be finite and nonnegative")
    ksq = float(k) ** 2
    total = 0.0
    for s, b in h.coeffs.items():
        if _norm_sq(s) > ksq:
            total += b.real * b.real + b.imag * b.imag
    return float(np.sqrt(total))


def annulus_points(d: int, k: float) -> list:
    """Integer points s with k < |s| <= 2k, as a sorted list of tuples."""
    if int(d) < 1:
        raise DomainError("dimension d must be at least 1")
    lo = float(k) ** 2
    hi = 4.0 * float(k) ** 2
    m = int(np.floor(2.0 * float(k)))
    pts = [s for s in itertools.product(range(-m, m + 1), repeat=int(d))
           if lo < _norm_sq(s) <= hi]
    pts.sort()
    return pts


def annulus_witness(p: SobolevParams, k: float) -> FourierSeries:
    """Unit-Sobolev-norm series supported on the annulus k < |s| <= 2k.

    Coefficients c0 (1 + |s|^2)^{-r/2} with c0 = |A|^{-1/2} make the
    Sobolev norm exactly 1, while every coefficient survives truncation at
    radius k; this is the witness behind the minimax lower bound.
    """
    if not np.isfinite(k) or k < 1:
        raise DomainError("annulus radius k must be at least 1")
    pts = annulus_points(p.d, k)
    if not pts:
        raise EmptyAnnulus(f"no integer points in the annulus ({k}, {2 * k}] for d = {p.d}")
    c0 = 1.0 / np.sqrt(len(pts))
    coeffs = {s: c0 * (1.0 + _norm_sq(s)) ** (-p.r / 2) for s in pts}
    return FourierSeries(p.d, coeffs)


def minimax_lower_curve(p: SobolevParams, k_list) -> tuple[np.ndarray, float, float]:
    """Witness truncation errors over k with a fitted log-log slope.

    Returns (errors, fitted_slope, reference_exponent) where the slope is
    the ordinary least-squares line through (log k, log error) and the
    reference exponent d/2 - r is reported alongside for comparison; the
    measured decay follows -r, not the reference exponent.
    """
    ks = [float(k) for k in k_list]
    if len(ks) < 3:
        raise DomainError("need at least 3 truncation radii")
    if any(b <= a for a, b in zip(ks, ks[1:])) or ks[0] < 1:
        raise DomainError("radii must be strictly increasing and at least 1")
    errors = np.array([truncation_error(annulus_witness(p, k), k) for k in ks])
    slope = float(np.polyfit(np.log(ks), np.log(errors), 1)[0])
    return errors, slope, p.d / 2 - p.r


def jackson_upper(h: FourierSeries, p: SobolevParams, k: float) -> tuple[float, float]:
    """Upper bound on the truncation error of a Sobolev-smooth series.

    Returns (rigorous, reference): the rigorous bound
    (1 + k^2)^{-r/2} * sobolev_norm(h, r), valid for every k >= 1, and the
    looser reference form k^{d/2 - r} * sobolev_norm(h, r) reported for
    comparison.
    """
    if h.d != p.d:
        raise DomainError(f"series dimension {h.d} != parameter dimension {p.d}")
    if not np.isfinite(k) or k < 1:
        raise DomainError("truncation radius k must be at least 1")
    w = sobolev_norm(h, p.r)
    rigorous = (1.0 + float(k) ** 2) ** (-p.r / 2) * w
    reference = float(k) ** (p.d / 2 - p.r) * w
    return rigorous, reference


def limit_probe(pairs) -> np.ndarray:
    """Value of d^{d/2 - r} for (r, d) pairs, computed in log space.

    Probes the large-d behavior of the reference exponent; requires
    r > d/2 for every pair (DomainError otherwise).
    """
    out = []
    for r, d in pairs:
        r = float(r)
        d = int(d)
        if d < 1:
            raise DomainError("dimension d must be at least 1")
        if not np.isfinite(r) or r <= d / 2:
            raise DomainError(f"need r > d/2 = {d / 2}, got r = {r}")
        # log-space form stays finite for large d; log(1) = 0 gives 1 at d = 1
        out.append(float(np.exp(-(r - d / 2) * np.log(d))))
    return np.array(out, dtype=float)


def random_unit_ball_series(p: SobolevParams, max_freq: int, modes: int, seed: int) -> FourierSeries:
    """Random series rescaled to unit Sobolev norm.

    Draws `modes` integer frequencies uniformly from [-max_freq, max_freq]^d
    (duplicates merge), gives each a standard complex Gaussian coefficient,
    and rescales so sobolev_norm(., r) = 1. Used to exercise the upper
    bound on the boundary of the unit ball.
    """
    if max_freq < 0 or modes < 1:
        raise DomainError("need max_freq >= 0 and modes >= 1")
    gen = rng_stream(seed)
    freqs = gen.integers(-max_freq, max_freq + 1, size=(modes, p.d))
    amps = complex_gaussians(gen, modes)
    coeffs = {}
    for row, a in zip(freqs, amps):
        s = tuple(int(v) for v in row)
        coeffs[s] = coeffs.get(s, 0j) + complex(a)
    h = FourierSeries(p.d, coeffs)
    scale = sobolev_norm(h, p.r)
    if scale < PRUNE_FLOOR:
        raise DomainError("degenerate draw: zero Sobolev norm")
    return FourierSeries(p.d, {s: b / scale for s, b in h.coeffs.items()})
