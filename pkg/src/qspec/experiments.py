"""Spectrum-matching training and gradient-variance experiments.

Two numerical studies with analytic oracles:

* spectrum_matching_experiment: a random-generator target circuit with
  eigenvalue bound b = 10 is fit by models whose generators have
  b in {0.1, 1, 10}; only the spectrum-matched model can represent the
  target's frequency content, and its RMSE wins across seeds (exact
  signed-rank test on the b = 1 vs b = 10 pairing).

* variance_sweep: for H(w) = w (Y on qubit 1) + identity on two qubits,
  the gradient variance over theta ~ U[-2pi, 2pi] grows with the spectral
  width 2w while the trace-concentration eta falls; closed forms for both
  are available as oracles.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .dla import eta
from .linalg import QspecError, derive_seed, rng_stream
from .qsim import (CircuitSpec, circuit_forward_encoded, encode_inputs,
                   grad_analytic_1p_batch, make_generator, pauli_matrix)

class AllZeroDifferences(QspecError):
    """Signed-rank test is undefined when every difference is zero."""


# stream roles hung off the experiment seed
_TARGET, _DATA, _MODEL, _INIT = 0, 1, 2, 3

_FAST_OVERRIDES = dict(dataset_size=200, epochs=100, seeds=tuple(range(6)))

MAX_WILCOXON_N = 20


@dataclass(frozen=True)
class TrainConfig:
    """Configuration of the spectrum-matching study (defaults = full scale)."""

    n: int = 3
    depth: int = 5
    dataset_size: int = 1000
    lr: float = 1e-5
    epochs: int = 500
    batch_size: int = 32
    fd_step: float = 1e-4
    seeds: tuple = tuple(range(10))
    b_target: float = 10.0
    b_models: tuple = (0.1, 1.0, 10.0)
    share_generator_basis: bool = False

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "b_models", tuple(float(b) for b in self.b_models))
        if self.n < 1 or self.depth < 1 or self.dataset_size < 1:
            raise ValueError("n, depth and dataset_size must be positive")
        if self.lr <= 0 or self.epochs < 1 or self.batch_size < 1 or self.fd_step <= 0:
            raise ValueError("lr, epochs, batch_size and fd_step must be positive")
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be nonempty and distinct")
        if not self.b_models or any(b <= 0 for b in self.b_models):
            raise ValueError("model eigenvalue bounds must be positive")
        if self.b_target <= 0:
            raise ValueError("target eigenvalue bound must be positive")

    @classmethod
    def fast(cls, **overrides) -> "TrainConfig":
        """Reduced profile: 200 samples, 100 epochs, 6 seeds."""
        merged = dict(_FAST_OVERRIDES)
        merged.update(overrides)
        return cls(**merged)


def fast_profile(cfg: TrainConfig) -> TrainConfig:
    """Apply the reduced-profile overrides to an existing config."""
    return replace(cfg, **_FAST_OVERRIDES)


def load_train_config(path: str) -> TrainConfig:
    """TrainConfig from a file: one JSON object, or key = value lines.

    Unknown keys are rejected; list values become tuples. Lines starting
    with # are comments in the key = value form.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.strip()
    if not stripped:
        return TrainConfig()
    if stripped.startswith("{"):
        data = json.loads(stripped)
    else:
        data = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, value = line.partition("=")
            try:
                data[key.strip()] = json.loads(value.strip())
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: unparseable value {value.strip()!r}") from exc
    known = {f.name for f in fields(TrainConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    for key in ("seeds", "b_models"):
        if key in data:
            data[key] = tuple(data[key])
    return TrainConfig(**data)


@dataclass(frozen=True, eq=False)
class TrainReport:
    """Per-seed RMSE by model bound, summary stats, and the paired test."""

    config: TrainConfig
    seeds: tuple
    b_models: tuple
    rmse: dict         # b -> tuple of per-seed final RMSE, seed order
    theta_init: dict   # b -> tuple of per-seed initial parameter tuples
    means: dict        # b -> mean RMSE
    stds: dict         # b -> sample std of RMSE (0 for a single seed)
    wilcoxon_p: float | None  # b=1 vs b=10 pairing when both present

    def to_dict(self) -> dict:
        cfg = {f.name: getattr(self.config, f.name) for f in fields(TrainConfig)}
        return {
            "config": cfg,
            "seeds": list(self.seeds),
            "b_models": list(self.b_models),
            "rmse": {repr(b): list(v) for b, v in self.rmse.items()},
            "means": {repr(b): v for b, v in self.means.items()},
            "stds": {repr(b): v for b, v in self.stds.items()},
            "wilcoxon_p": self.wilcoxon_p,
        }


def build_circuit(n: int, depth: int, b_max: float, seed: int, stream: tuple) -> CircuitSpec:
    """Circuit whose layer generators are drawn from one seed stream."""
    gens = [make_generator(1 << n, b_max, derive_seed(seed, *stream, layer))
            for layer in range(depth)]
    return CircuitSpec(n, gens)


def gen_dataset(target: CircuitSpec, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """(xs, ys): inputs uniform on [-1, 1], labels from the target circuit
    evaluated at all-ones parameters."""
    if count < 1:
        raise ValueError("count must be positive")
    xs = rng_stream(seed).uniform(-1.0, 1.0, int(count))
    ys = np.asarray(
        circuit_forward_encoded(target, np.ones((1, target.depth)), encode_inputs(target, xs))[0])
    return xs, ys


def _as_xy(data) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(data, tuple) and len(data) == 2:
        xs, ys = data
    else:
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("data must be (xs, ys) arrays or a list of (x, y) pairs")
        xs, ys = arr[:, 0], arr[:, 1]
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.shape != ys.shape or xs.size == 0:
        raise ValueError("inputs and labels must be nonempty and the same length")
    return xs, ys


def _rmse(spec: CircuitSpec, theta: np.ndarray, enc: np.ndarray, ys: np.ndarray) -> float:
    pred = circuit_forward_encoded(spec, theta[None, :], enc)[0]
    return float(np.sqrt(np.mean((pred - ys) ** 2)))


def adam_train(model: CircuitSpec, data, cfg: TrainConfig, seed: int,
               theta0=None) -> tuple[np.ndarray, float]:
    """Minimize mean squared error with Adam; returns (theta, final RMSE).

    Minibatch finite-difference gradients: each epoch shuffles the data
    (stream (seed, 1)) and walks batches of cfg.batch_size; a batch step
    evaluates the 2L + 1 stacked parameter variants in one pass. theta0
    defaults to a uniform draw from [-pi, pi) on stream (seed,).
    Adam moments use bias correction with beta1 = 0.9, beta2 = 0.999,
    eps = 1e-8.
    """
    xs, ys = _as_xy(data)
    depth = model.depth
    if theta0 is None:
        theta = rng_stream(seed).uniform(-np.pi, np.pi, depth)
    else:
        theta = np.array(theta0, dtype=float).ravel()
        if theta.shape[0] != depth:
            raise ValueError(f"theta0 has length {theta.shape[0]}, expected {depth}")
    enc = encode_inputs(model, xs)

    shuffler = rng_stream(seed, 1)
    eye = np.eye(depth)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m = np.zeros(depth)
    v = np.zeros(depth)
    step_count = 0
    n_samples = xs.shape[0]
    batch = min(cfg.batch_size, n_samples)

    for _ in range(cfg.epochs):
        order = shuffler.permutation(n_samples)
        for start in range(0, n_samples, batch):
            idx = order[start:start + batch]
            enc_b = enc[idx]
            ys_b = ys[idx]
            stacked = np.vstack([theta[None, :],
                                 theta[None, :] + cfg.fd_step * eye,
                                 theta[None, :] - cfg.fd_step * eye])
            vals = circuit_forward_encoded(model, stacked, enc_b)   # (2L+1, B)
            resid = vals[0] - ys_b
            dfs = (vals[1:depth + 1] - vals[depth + 1:]) / (2.0 * cfg.fd_step)
            grad = np.mean(2.0 * resid[None, :] * dfs, axis=1)

            step_count += 1
            m = beta1 * m + (1.0 - beta1) * grad
            v = beta2 * v + (1.0 - beta2) * grad * grad
            mhat = m / (1.0 - beta1 ** step_count)
            vhat = v / (1.0 - beta2 ** step_count)
            theta = theta - cfg.lr * mhat / (np.sqrt(vhat) + eps)

    return theta, _rmse(model, theta, enc, ys)


def _run_one_seed(cfg: TrainConfig, seed: int) -> dict:
    """All model bounds for one seed: {b: (rmse, theta_init_tuple)}."""
    target = build_circuit(cfg.n, cfg.depth, cfg.b_target, seed, (_TARGET,))
    data = gen_dataset(target, cfg.dataset_size, derive_seed(seed, _DATA))
    out = {}
    for bi, b in enumerate(cfg.b_models):
        model_stream = (_MODEL, 0) if cfg.share_generator_basis else (_MODEL, bi)
        model = build_circuit(cfg.n, cfg.depth, b, seed, model_stream)
        init_seed = derive_seed(seed, _INIT, bi)
        theta0 = rng_stream(init_seed).uniform(-np.pi, np.pi, cfg.depth)
        _, rmse = adam_train(model, data, cfg, init_seed, theta0=theta0)
        out[b] = (rmse, tuple(float(t) for t in theta0))
    return out


def worker_count(requested: int | None = None) -> int:
    """Worker pool size: the request capped by the QSPEC_THREADS env var."""
    env = os.environ.get("QSPEC_THREADS", "").strip()
    cap = max(1, int(env)) if env else 1
    if requested is None:
        return cap
    return max(1, min(int(requested), cap))


def spectrum_matching_experiment(cfg: TrainConfig | None = None,
                                 workers: int | None = None) -> TrainReport:
    """Train every model bound on every seed and pair-test the outcome.

    Per-seed work is independent; with workers > 1 seeds run in a thread
    pool. The report is assembled in sorted-seed order either way, so the
    worker count never changes the result.
    """
    cfg = cfg or TrainConfig()
    nworkers = worker_count(workers)
    seeds = sorted(cfg.seeds)
    if nworkers > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            by_seed = dict(zip(seeds, pool.map(lambda s: _run_one_seed(cfg, s), seeds)))
    else:
        by_seed = {s: _run_one_seed(cfg, s) for s in seeds}

    rmse = {b: tuple(by_seed[s][b][0] for s in seeds) for b in cfg.b_models}
    inits = {b: tuple(by_seed[s][b][1] for s in seeds) for b in cfg.b_models}
    means = {b: float(np.mean(v)) for b, v in rmse.items()}
    stds = {b: float(np.std(v, ddof=1)) if len(v) > 1 else 0.0 for b, v in rmse.items()}

    p = None
    if 1.0 in cfg.b_models and 10.0 in cfg.b_models and len(seeds) >= 1:
        try:
            p = wilcoxon_exact(list(zip(rmse[1.0], rmse[10.0])))
        except AllZeroDifferences:
            p = 1.0
    return TrainReport(config=cfg, seeds=tuple(seeds), b_models=cfg.b_models,
                       rmse=rmse, theta_init=inits, means=means, stds=stds,
                       wilcoxon_p=p)


@dataclass(frozen=True, eq=False)
class VarianceSweepReport:
    """Gradient variance and eta against the spectral-width weight."""

    weights: tuple
    variances: tuple
    etas: tuple
    samples: int

    def to_dict(self) -> dict:
        return {"weights": list(self.weights), "variances": list(self.variances),
                "etas": list(self.etas), "samples": self.samples}


def _variance_operators(w: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = float(w) * pauli_matrix("IY") + pauli_matrix("II")
    obs = pauli_matrix("IZ")
    state = np.zeros(4, dtype=complex)
    state[0] = 1.0
    return h, obs, state


def analytic_variance_oracle(w: float) -> float:
    """Closed-form Var_theta[dC/dtheta] for theta ~ U[-2pi, 2pi].

    The cost is C(theta) = cos(2 w theta), so the derivative is
    -2w sin(2 w theta) and the variance integrates to
    4 w^2 (1/2 - sin(8 pi w) / (16 pi w)), with the w = 0 limit 0.
    """
    w = float(w)
    if not np.isfinite(w) or w < 0:
        raise ValueError("weight must be finite and nonnegative")
    if w == 0.0:
        return 0.0
    return 4.0 * w * w * (0.5 - np.sin(8.0 * np.pi * w) / (16.0 * np.pi * w))


def variance_sweep(weights, samples: int, seed: int,
                   workers: int | None = None) -> VarianceSweepReport:
    """Monte-Carlo gradient variance and eta over a weight grid.

    For each weight w (sorted ascending), draws `samples` values of theta
    uniform on [-2pi, 2pi] from stream (seed, index) and evaluates the
    exact one-parameter gradient of <00| U^dag (Z on qubit 1) U |00> for
    the generator H(w) = w (Y on qubit 1) + identity. Sample variance
    (ddof = 1) except for a single sample, where the variance is 0.
    """
    ws = sorted(float(w) for w in weights)
    if not ws:
        raise ValueError("need at least one weight")
    if any(not np.isfinite(w) or w < 0.0 or w > 1.0 for w in ws):
        raise ValueError("weights must lie in [0, 1]")
    samples = int(samples)
    if samples < 1:
        raise ValueError("need at least one sample")

    def one(idx_w: tuple) -> tuple[float, float]:
        idx, w = idx_w
        h, obs, state = _variance_operators(w)
        thetas = rng_stream(seed, idx).uniform(-2.0 * np.pi, 2.0 * np.pi, samples)
        grads = grad_analytic_1p_batch(h, thetas, obs, state)
        var = float(np.var(grads, ddof=1)) if samples > 1 else 0.0
        return var, float(eta(h))

    nworkers = worker_count(workers)
    items = list(enumerate(ws))
    if nworkers > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(it) for it in items]
    return VarianceSweepReport(weights=tuple(ws),
                               variances=tuple(r[0] for r in results),
                               etas=tuple(r[1] for r in results),
                               samples=samples)


def _average_ranks(vals: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    order = np.argsort(vals, kind="stable")
    ranks = np.empty(vals.shape[0])
    sv = vals[order]
    i = 0
    while i < sv.shape[0]:
        j = i
        while j + 1 < sv.shape[0] and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_exact(pairs) -> float:
    """Exact two-sided signed-rank p-value by full sign enumeration.

    Differences a - b per pair; zero differences are dropped (error if
    none remain); tied |differences| share average ranks. The statistic is
    the sum of ranks of the positive differences, and the two-sided p
    doubles the smaller exact tail (capped at 1). Enumeration covers all
    2^n sign assignments, realized as a meet-in-the-middle subset-sum
    table; n is capped at 20 pairs.
    """
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError("pairs must be a nonempty list of (a, b) pairs")
    if arr.shape[0] > MAX_WILCOXON_N:
        raise ValueError(f"exact enumeration capped at {MAX_WILCOXON_N} pairs")
    d = arr[:, 0] - arr[:, 1]
    d = d[d != 0.0]
    if d.size == 0:
        raise AllZeroDifferences("every difference is zero")

    ranks = _average_ranks(np.abs(d))
    w_plus = float(np.sum(ranks[d > 0]))

    def subset_sums(vals: np.ndarray) -> np.ndarray:
        sums = np.zeros(1)
        for v in vals:
            sums = np.concatenate([sums, sums + v])
        return sums

    half = d.size // 2
    left = subset_sums(ranks[:half])
    right = subset_sums(ranks[half:])
    all_sums = (left[:, None] + right[None, :]).ravel()
    total = all_sums.shape[0]
    # ranks are multiples of 1/2, so these comparisons are exact in floats
    p_le = float(np.count_nonzero(all_sums <= w_plus)) / total
    p_ge = float(np.count_nonzero(all_sums >= w_plus)) / total
    return min(1.0, 2.0 * min(p_le, p_ge))
