"""Reproducible Monte Carlo for the winner problem.

Determinism contract: every estimator maps trial t to a fixed range of
positions in a counter-based Philox stream keyed by (seed, stream_id).
Trial t with d draws per trial owns positions [t*d, (t+1)*d).  Chunked
and multi-threaded execution merely partition the trial range, position
each chunk's generator at its own counter offset, and sum integer win
counts, so the estimates are bit-identical to serial execution for any
chunk size, worker count, or scheduling order.

Group maxima are sampled directly through the uniform quantile
transform M = sigma * Phi^{-1}(u^{1/n}) (one uniform per group per
trial), which is exact in distribution for any real n >= 1 and is the
only practical route once n reaches 1e16.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .limits import finite_n_winner, two_group_limit
from .normal import LOG_HALF, std_normal_quantile, upper_tail_quantile
from .scaling import GroupSpec, critical_n1, kappa

__all__ = [
    "RngStream",
    "McEstimate",
    "StudyRow",
    "ArgmaxIdentityCheck",
    "sample_group_max",
    "sample_gumbel",
    "mc_two_group",
    "mc_multi",
    "mc_argmax_identity",
    "mc_limit_pair",
    "convergence_study",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_CHUNK_DRAWS = 1 << 21  # ~2M doubles per chunk keeps memory modest
_TINY_U = 0.5**53  # replacement for the measure-zero u == 0 draw


def _mix64(z: int) -> int:
    """SplitMix64 finalizer; bijective on 64-bit words."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """Identifier of one reproducible random stream.

    (seed, stream_id) is the Philox key: the pair fully determines the
    sequence, and distinct pairs give statistically independent streams.
    """

    seed: int
    stream_id: int = 0

    def generator(self, draw_offset: int = 0) -> np.random.Generator:
        """Generator positioned at an absolute draw offset in this stream.

        Philox advances its counter once per 4 output words, so the
        counter encodes offsets in multiples of 4; the remainder is
        consumed by the caller (see _uniforms).
        """
        if draw_offset % 4 != 0:
            raise ValueError("draw_offset must be a multiple of 4")
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        counter = np.array([draw_offset // 4, 0, 0, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def substream(self, index: int) -> "RngStream":
        """Derived independent stream; hashing keeps distinct indexes disjoint."""
        if index < 0:
            raise ValueError("substream index must be >= 0")
        derived = _mix64((self.stream_id + (index + 1) * _GOLDEN) & _MASK64)
        return RngStream(seed=self.seed, stream_id=derived)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo probability estimate with binomial standard error."""

    p_hat: float
    trials: int
    std_err: float
    successes: int | None = None

    @classmethod
    def from_counts(cls, successes: int, trials: int) -> "McEstimate":
        p = successes / trials
        return cls(
            p_hat=p,
            trials=trials,
            std_err=math.sqrt(p * (1.0 - p) / trials),
            successes=successes,
        )


@dataclass(frozen=True)
class StudyRow:
    """One grid point of a convergence study (simulated or bootstrap)."""

    n2: float
    n1: float
    sigma: float
    c: float
    p_hat: float
    std_err: float
    p_limit: float
    p_exact_finite_n: float | None = None


@dataclass(frozen=True)
class ArgmaxIdentityCheck:
    """One group's two sides of the exchangeability identity.

    lhs = n_k * P(overall argmax is the group's first element),
    rhs = P(the group's maximum wins); the two must agree within
    Monte Carlo error.
    """

    group: int
    size: int
    lhs: float
    lhs_std_err: float
    rhs: float
    rhs_std_err: float
    trials: int


def _uniforms(stream: RngStream, start_trial: int, n_trials: int, per_trial: int) -> np.ndarray:
    """Uniform draws for trials [start_trial, start_trial + n_trials).

    Returns an (n_trials, per_trial) matrix of open-interval (0, 1)
    uniforms taken from the stream positions owned by those trials.
    """
    offset = start_trial * per_trial
    aligned = offset - (offset % 4)
    g = stream.generator(aligned)
    u = g.random(n_trials * per_trial + (offset - aligned))
    u = u[offset - aligned:]
    u[u == 0.0] = _TINY_U  # keep the open-interval contract, measure-zero event
    return u.reshape(n_trials, per_trial)


def _sum_chunks(stream, trials, per_trial, chunk_fn, *, workers=1, chunk_trials=None):
    """Deterministic reduction of integer count vectors over trial chunks."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if chunk_trials is None:
        chunk_trials = max(1, _CHUNK_DRAWS // max(per_trial, 1))
    spans = [(t0, min(chunk_trials, trials - t0)) for t0 in range(0, trials, chunk_trials)]

    def run(span):
        t0, m = span
        return np.asarray(chunk_fn(_uniforms(stream, t0, m, per_trial)), dtype=np.int64)

    if workers <= 1 or len(spans) == 1:
        parts = [run(s) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    return np.sum(parts, axis=0)


def sample_group_max(n, sigma, u):
    """Maximum of n iid N(0, sigma^2) variables from one uniform draw.

    Computes M = sigma * Phi^{-1}(u^{1/n}) so that P(M <= x) equals
    Phi(x/sigma)^n exactly, for any real n >= 1.  The upper-tail
    probability 1 - u^{1/n} is formed in log space via expm1, so the
    transform survives n ~ 1e16 where the direct difference underflows.
    """
    scalar_in = np.ndim(u) == 0
    u_arr = np.asarray(u, dtype=float)
    if not (np.isfinite(n) and n >= 1.0):
        raise ValueError(f"n must be a finite real >= 1, got {n}")
    if not (np.isfinite(sigma) and sigma > 0.0):
        raise ValueError(f"sigma must be a finite real > 0, got {sigma}")
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    log_p = np.log(u_arr) / n
    log_q = np.log(-np.expm1(log_p))
    x = np.empty_like(log_q)
    tail = log_q <= LOG_HALF
    if np.any(tail):
        x[tail] = upper_tail_quantile(log_q[tail])
    if np.any(~tail):
        x[~tail] = std_normal_quantile(np.exp(log_p[~tail]))
    out = sigma * x
    return float(out) if scalar_in else out


def sample_gumbel(u):
    """Gumbel draw -log(-log u); exact inverse of the Gumbel CDF."""
    scalar_in = np.ndim(u) == 0
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    out = -np.log(-np.log(u_arr))
    return float(out) if scalar_in else out


def mc_two_group(
    g1: GroupSpec,
    g2: GroupSpec,
    trials: int,
    rng: RngStream,
    *,
    workers: int = 1,
) -> McEstimate:
    """Winner frequency of group 1 over independent paired max draws.

    Trial t consumes stream positions 2t (group 1) and 2t+1 (group 2);
    identical draws and comparisons as the K=2 case of :func:`mc_multi`.
    """

    def count_wins(u):
        m1 = sample_group_max(g1.size, g1.sigma, u[:, 0])
        m2 = sample_group_max(g2.size, g2.sigma, u[:, 1])
        return [np.count_nonzero(m1 > m2)]

    wins = _sum_chunks(rng, trials, 2, count_wins, workers=workers)
    return McEstimate.from_counts(int(wins[0]), trials)


def mc_multi(
    groups: Sequence[GroupSpec],
    trials: int,
    rng: RngStream,
    *,
    workers: int = 1,
) -> list[McEstimate]:
    """Per-group winning frequencies; exactly one winner per trial.

    Ties (a probability-zero event for continuous draws) break toward
    the lowest group index, so the success counts always partition the
    trial count exactly.
    """
    groups = list(groups)
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    k = len(groups)

    def count_wins(u):
        maxima = np.empty_like(u)
        for j, g in enumerate(groups):
            maxima[:, j] = sample_group_max(g.size, g.sigma, u[:, j])
        winner = np.argmax(maxima, axis=1)
        return np.bincount(winner, minlength=k)

    counts = _sum_chunks(rng, trials, k, count_wins, workers=workers)
    return [McEstimate.from_counts(int(c), trials) for c in counts]


def mc_argmax_identity(
    groups: Sequence[GroupSpec],
    trials: int,
    rng: RngStream,
    *,
    workers: int = 1,
) -> list[ArgmaxIdentityCheck]:
    """Simulate every individual variable and test the exchangeability identity.

    For each group k this reports n_k * P_hat(overall argmax is the
    group's first element) against P_hat(group k wins).  Sizes must be
    small integers: this is the one estimator that cannot use the
    max-transform shortcut.
    """
    groups = list(groups)
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    sizes = []
    for g in groups:
        if g.size != int(g.size):
            raise ValueError(f"argmax identity requires integer sizes, got {g.size}")
        sizes.append(int(g.size))
    if max(sizes) > 1000:
        raise ValueError("argmax identity caps group sizes at 1000 (full-vector simulation)")
    total = sum(sizes)
    starts = np.cumsum([0] + sizes)
    sigmas = np.concatenate([np.full(n, g.sigma) for n, g in zip(sizes, groups)])

    def count(u):
        draws = std_normal_quantile(u) * sigmas
        arg = np.argmax(draws, axis=1)
        first = np.array([np.count_nonzero(arg == starts[j]) for j in range(len(groups))])
        wins = np.array(
            [np.count_nonzero((arg >= starts[j]) & (arg < starts[j + 1])) for j in range(len(groups))]
        )
        return np.concatenate([first, wins])

    counts = _sum_chunks(rng, trials, total, count, workers=workers)
    first, wins = counts[: len(groups)], counts[len(groups):]
    out = []
    for j, n in enumerate(sizes):
        p_first = first[j] / trials
        p_win = wins[j] / trials
        out.append(
            ArgmaxIdentityCheck(
                group=j,
                size=n,
                lhs=n * p_first,
                lhs_std_err=n * math.sqrt(p_first * (1.0 - p_first) / trials),
                rhs=p_win,
                rhs_std_err=math.sqrt(p_win * (1.0 - p_win) / trials),
                trials=trials,
            )
        )
    return out


def mc_limit_pair(
    c: float,
    sigma: float,
    trials: int,
    rng: RngStream,
    *,
    workers: int = 1,
) -> McEstimate:
    """Simulate the limit law directly: P(L1 > sigma^2 (L2 - kappa(C, sigma))).

    Independent Gumbel pairs via inversion; this is the model-free
    cross-check for :func:`gausswinner.limits.two_group_limit`.
    """
    k = kappa(c, sigma)
    if not math.isfinite(k):
        raise ValueError(f"kappa(c={c}, sigma={sigma}) is not finite")
    s2 = sigma * sigma

    def count_wins(u):
        lam1 = sample_gumbel(u[:, 0])
        lam2 = sample_gumbel(u[:, 1])
        return [np.count_nonzero(lam1 > s2 * (lam2 - k))]

    wins = _sum_chunks(rng, trials, 2, count_wins, workers=workers)
    return McEstimate.from_counts(int(wins[0]), trials)


def convergence_study(
    sigma: float,
    c_values: Sequence[float],
    n2_grid: Sequence[float],
    trials: int,
    rng: RngStream,
    *,
    exact: bool = False,
    workers: int = 1,
) -> list[StudyRow]:
    """Simulated winning probabilities along the critical law vs their limits.

    For each (C, n2) the first-group size comes from the critical law
    (floored when the floor is exactly representable, real-valued
    otherwise), p_hat from :func:`mc_two_group` on a dedicated substream
    indexed by row, and p_limit from the quadrature.  Rows are emitted
    in deterministic (C outer, n2 inner) order.
    """
    c_values = list(c_values)
    n2_grid = list(n2_grid)
    if not c_values or not n2_grid:
        raise ValueError("c_values and n2_grid must be nonempty")
    rows = []
    row_index = 0
    for c in c_values:
        p_limit = two_group_limit(c, sigma).value
        for n2 in n2_grid:
            size = critical_n1(n2, sigma, c)
            n1 = float(size.floor_value) if size.floor_value is not None else size.real_value
            est = mc_two_group(
                GroupSpec(n1, 1.0),
                GroupSpec(n2, sigma),
                trials,
                rng.substream(row_index),
                workers=workers,
            )
            p_exact = None
            if exact:
                p_exact = finite_n_winner(GroupSpec(n1, 1.0), GroupSpec(n2, sigma)).value
            rows.append(
                StudyRow(
                    n2=float(n2),
                    n1=n1,
                    sigma=float(sigma),
                    c=float(c),
                    p_hat=est.p_hat,
                    std_err=est.std_err,
                    p_limit=p_limit,
                    p_exact_finite_n=p_exact,
                )
            )
            row_index += 1
    return rows
