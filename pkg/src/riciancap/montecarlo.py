"""Monte-Carlo oracle for the mutual-information distribution.

Randomness comes from a Philox counter-based stream keyed by the master
seed.  Trial ``i`` always reads the same fixed block of counters, so any
batching or worker layout reproduces identical samples.  Normals are
produced by inverse-CDF from 53-bit uniforms on the open interval (0, 1),
which keeps the per-trial consumption fixed.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import ndtri

from .channel import ChannelSpec
from .errors import MissingQuantile
from .linalg import check_hermitian, hermitian_sqrt, logdet_hpd

MAX_RETAINED = 10_000_000
_PHILOX_WORDS = 4  # uint64 outputs per counter increment


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    master_seed: int = 0
    batch: int = 20_000

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean_nats: float
    var_nats2: float
    stderr_mean: float
    quantiles: dict = field(default_factory=dict)
    trials: int = 0
    master_seed: int = 0

    @property
    def std_nats(self) -> float:
        return math.sqrt(self.var_nats2)


def _philox_key(master_seed: int) -> NDArray[np.uint64]:
    # SeedSequence is a well-mixed hash of the seed; Philox takes a 128-bit key.
    return np.random.SeedSequence(master_seed).generate_state(2, dtype=np.uint64)


def _blocks_per_trial(n_r: int, n_t: int) -> int:
    return -(-2 * n_r * n_t // _PHILOX_WORDS)


def standard_complex_normals(
    master_seed: int, start: int, count: int, n_r: int, n_t: int
) -> NDArray[np.complex128]:
    """H_w for trials ``start .. start+count-1``, shape (count, n_r, n_t).

    Entries are CN(0, 1): real and imaginary parts each have variance 1/2.
    """
    blocks = _blocks_per_trial(n_r, n_t)
    words = blocks * _PHILOX_WORDS
    bitgen = np.random.Philox(counter=start * blocks, key=_philox_key(master_seed))
    raw = bitgen.random_raw(count * words).reshape(count, words)[:, : 2 * n_r * n_t]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    g = ndtri(u) * math.sqrt(0.5)
    return (g[:, 0::2] + 1j * g[:, 1::2]).reshape(count, n_r, n_t)


class _Sampler:
    """Precomputed square roots for drawing H or H Q^{1/2}."""

    def __init__(self, spec: ChannelSpec, q: ArrayLike | None = None):
        self.spec = spec
        self.r_half = hermitian_sqrt(spec.r_corr)
        t_half = hermitian_sqrt(spec.t_corr)
        if q is None:
            self.h_bar, self.right = spec.h_bar, t_half
        else:
            q_half = hermitian_sqrt(q)
            self.h_bar, self.right = spec.h_bar @ q_half, t_half @ q_half

    def draw(self, master_seed: int, start: int, count: int) -> NDArray[np.complex128]:
        hw = standard_complex_normals(master_seed, start, count, self.spec.n_r, self.spec.n_t)
        return self.h_bar + self.r_half @ hw @ self.right


def sample_channel(spec: ChannelSpec, seed: int, trial: int = 0) -> NDArray[np.complex128]:
    """One realization H = H_bar + R^{1/2} H_w T^{1/2} for (seed, trial)."""
    return _Sampler(spec).draw(seed, trial, 1)[0]


def sample_channels(spec: ChannelSpec, seed: int, start: int, count: int) -> NDArray[np.complex128]:
    return _Sampler(spec).draw(seed, start, count)


def _batched_mi(g: NDArray[np.complex128]) -> NDArray[np.float64]:
    """ln det(I + G G^H) for a stack, factoring the smaller Gram matrix."""
    n_r, n_t = g.shape[-2:]
    if n_r <= n_t:
        gram = g @ np.swapaxes(g, -1, -2).conj()
    else:
        gram = np.swapaxes(g, -1, -2).conj() @ g
    gram += np.eye(gram.shape[-1])
    return np.maximum(logdet_hpd(gram), 0.0)


def mutual_information(h: ArrayLike, q: ArrayLike) -> float:
    """ln det(I + H Q H^H) in nats."""
    hm = np.asarray(h, dtype=np.complex128)
    g = hm @ hermitian_sqrt(check_hermitian(q))
    return float(_batched_mi(g[None])[0])


def _merge(a, b):
    """Chan et al. pairwise merge of (count, mean, M2)."""
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def estimate(
    spec: ChannelSpec,
    q: ArrayLike,
    cfg: McConfig,
    quantile_probs: ArrayLike = (0.1, 0.5, 0.9),
    workers: int = 1,
) -> McEstimate:
    """Sample mean, variance and quantiles of I(H) over `cfg.trials` draws.

    Batches are fixed by ``cfg.batch`` and merged in trial order, so the
    result does not depend on `workers`.  Up to 10**7 samples are kept for
    quantiles; above that every k-th trial is kept, which is still an iid
    sample of the same distribution.
    """
    probs = [float(p) for p in np.atleast_1d(quantile_probs)]
    if any(not 0.0 < p < 1.0 for p in probs):
        raise ValueError("quantile probabilities must lie in (0, 1)")
    sampler = _Sampler(spec, check_hermitian(q))
    stride = max(1, -(-cfg.trials // MAX_RETAINED))
    starts = list(range(0, cfg.trials, cfg.batch))

    def run(start):
        count = min(cfg.batch, cfg.trials - start)
        mi = _batched_mi(sampler.draw(cfg.master_seed, start, count))
        mean = float(mi.mean())
        m2 = float(np.sum((mi - mean) ** 2))
        first = (-start) % stride
        return (count, mean, m2), mi[first::stride]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]

    acc = parts[0][0]
    for moments, _ in parts[1:]:
        acc = _merge(acc, moments)
    n, mean, m2 = acc
    var = m2 / (n - 1) if n > 1 else 0.0
    kept = np.sort(np.concatenate([p[1] for p in parts]))
    quantiles = {p: float(np.quantile(kept, p, method="lower")) for p in probs}
    return McEstimate(
        mean_nats=mean,
        var_nats2=var,
        stderr_mean=math.sqrt(var / n),
        quantiles=quantiles,
        trials=n,
        master_seed=cfg.master_seed,
    )


def empirical_outage(est: McEstimate, epsilon: float) -> float:
    """Empirical epsilon-quantile of I(H) (lower order statistic)."""
    for p, value in est.quantiles.items():
        if math.isclose(p, epsilon, rel_tol=0.0, abs_tol=1e-15):
            return value
    raise MissingQuantile(f"quantile {epsilon} was not estimated")
