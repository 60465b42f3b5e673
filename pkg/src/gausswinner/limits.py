"""Numerical evaluation of the winner-probability formulas.

Three families of integrals live here:

* the two-group limit law  int_0^inf exp(-y - e^{-kappa} y^{1/sigma^2}) dy,
* its K-group generalization with per-group integrands
  (e^{-kappa_k}/sigma_k^2) x^{1/sigma_k^2 - 1} exp(-sum_j e^{-kappa_j} x^{1/sigma_j^2}),
* the exact finite-n probability
  int_R exp(n2 log Phi(x/sigma2) + (n1-1) log Phi(x/sigma1)) (n1/sigma1) phi(x/sigma1) dx,
  which serves as the brute-force oracle for everything else.

The [0, inf) integrals are evaluated after the substitution y = e^u,
which removes the endpoint singularity and leaves a log-concave
integrand on the whole line; the finite-n integrand is log-concave as
it stands.  All exponents are assembled in log space (n log Phi can
reach -1e15) and exponentiated once per node inside the quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr

from .quadrature import QuadResult, concave_log_quad
from .scaling import GroupSpec, kappa

__all__ = [
    "LimitSpecK",
    "two_group_limit",
    "two_group_limit_from_kappa",
    "multi_group_limits",
    "finite_n_winner",
    "finite_n_winner_multi",
    "solve_c_for_target",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LimitSpecK:
    """Multi-group limit parameters: one (c, sigma) pair per group.

    Exactly one group is the baseline with (c, sigma) = (1, 1); every
    other group must have sigma > 1 and 0 < c < inf.  The baseline fixes
    the normalization kappa_1 = 0.
    """

    groups: tuple[tuple[float, float], ...]

    def __post_init__(self):
        groups = tuple((float(c), float(s)) for c, s in self.groups)
        object.__setattr__(self, "groups", groups)
        if len(groups) < 2:
            raise ValueError("a limit spec needs at least 2 groups")
        baselines = [i for i, (c, s) in enumerate(groups) if s == 1.0]
        if len(baselines) != 1:
            raise ValueError(f"exactly one baseline group with sigma = 1 required, found {len(baselines)}")
        b = baselines[0]
        if groups[b][0] != 1.0:
            raise ValueError(f"baseline group must have c = 1, got {groups[b][0]}")
        for i, (c, s) in enumerate(groups):
            if i == b:
                continue
            if not (math.isfinite(s) and s > 1.0):
                raise ValueError(f"group {i}: sigma must be a finite real > 1, got {s}")
            if math.isnan(c) or c <= 0.0:
                raise ValueError(f"group {i}: c must lie in (0, +inf], got {c}")

    @property
    def baseline(self) -> int:
        return next(i for i, (_, s) in enumerate(self.groups) if s == 1.0)

    def kappas(self) -> tuple[float, ...]:
        return tuple(kappa(c, s) for c, s in self.groups)


def _limit_component(alphas, kappas, k, *, tol, note=None) -> QuadResult:
    """p_k as a u-space integral, u = log x.

    log integrand: log(alpha_k) - kappa_k + alpha_k u - sum_j exp(alpha_j u - kappa_j).
    """
    alphas = np.asarray(alphas, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    log_pref = math.log(alphas[k]) - kappas[k]
    a_k = alphas[k]

    def log_f(u):
        with np.errstate(over="ignore", under="ignore"):
            total = np.exp(np.outer(u, alphas) - kappas).sum(axis=1)
            return log_pref + a_k * u - total

    # mass sits where the dominating exponential sum is O(1)
    center = min(0.0, float(np.min(kappas / alphas)))
    return concave_log_quad(log_f, center - 8.0, 8.0, tol=tol, note=note)


def two_group_limit_from_kappa(kappa_value: float, sigma: float, *, tol: float = 1e-10) -> QuadResult:
    """Limiting winning probability parameterized directly by kappa.

    Evaluates int_0^inf exp(-y - e^{-kappa} y^{1/sigma^2}) dy for finite
    kappa; the conventions kappa = -inf -> 0 and kappa = +inf -> 1 are
    returned exactly without quadrature.  ``sigma`` >= 1 is allowed here
    (sigma = 1 is the exchangeable boundary with value 1/(1 + e^-kappa)).
    """
    if not (math.isfinite(sigma) and sigma >= 1.0):
        raise ValueError(f"sigma must be a finite real >= 1, got {sigma}")
    if math.isnan(kappa_value):
        raise ValueError("kappa is NaN")
    if kappa_value == -math.inf:
        return QuadResult(value=0.0, abs_err=0.0, evaluations=0, note="degenerate")
    if kappa_value == math.inf:
        return QuadResult(value=1.0, abs_err=0.0, evaluations=0, note="degenerate")
    return _limit_component([1.0, 1.0 / (sigma * sigma)], [0.0, kappa_value], 0, tol=tol)


def two_group_limit(c: float, sigma: float, *, tol: float = 1e-10) -> QuadResult:
    """Limiting probability that the unit-variance group wins, at (C, sigma).

    The degenerate endpoints C = 0 and C = +inf return exactly 0 and 1.
    """
    if not (math.isfinite(sigma) and sigma > 1.0):
        raise ValueError(f"sigma must be a finite real > 1, got {sigma}")
    if math.isnan(c) or c < 0.0:
        raise ValueError(f"c must lie in [0, +inf], got {c}")
    return two_group_limit_from_kappa(kappa(c, sigma), sigma, tol=tol)


def multi_group_limits(spec: LimitSpecK, *, tol: float = 1e-9) -> list[QuadResult]:
    """All K limiting winning probabilities for a multi-group spec.

    Every kappa_k must be finite: a partially degenerate configuration
    has no joint limit law of this form and is rejected.  The integrands sum to the exact
    derivative of -exp(-sum_j e^{-kappa_j} x^{1/sigma_j^2}), so the
    returned values sum to 1 up to quadrature error.
    """
    kappas = spec.kappas()
    if not all(math.isfinite(k) for k in kappas):
        raise ValueError(f"all kappa values must be finite, got {kappas}")
    sigmas = [s for _, s in spec.groups]
    alphas = [1.0 / (s * s) for s in sigmas]
    non_baseline = [s for i, s in enumerate(sigmas) if i != spec.baseline]
    note = None
    if len(set(non_baseline)) < len(non_baseline):
        note = "repeated sigma among non-baseline groups"
    return [
        _limit_component(alphas, kappas, k, tol=tol, note=note)
        for k in range(len(spec.groups))
    ]


def _winner_log_integrand(groups: Sequence[GroupSpec], k: int):
    sizes = np.array([g.size for g in groups], dtype=float)
    sigmas = np.array([g.sigma for g in groups], dtype=float)
    weights = sizes.copy()
    weights[k] -= 1.0  # the champion variable contributes the density factor
    log_pref = math.log(sizes[k]) - math.log(sigmas[k])
    s_k = sigmas[k]

    def log_f(x):
        total = np.full_like(x, log_pref)
        for w, s in zip(weights, sigmas):
            if w != 0.0:
                total += w * log_ndtr(x / s)
        z = x / s_k
        total += -0.5 * z * z - _LOG_SQRT_2PI
        return total

    return log_f, sizes, sigmas


def finite_n_winner_multi(groups: Sequence[GroupSpec], k: int, *, tol: float = 1e-9) -> QuadResult:
    """Exact P(group k attains the overall maximum) for finite sizes.

    ``k`` is a zero-based index.  Sizes may be any reals >= 1; all
    probability powers are assembled as n * log Phi, never by repeated
    multiplication.
    """
    groups = list(groups)
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    if not 0 <= k < len(groups):
        raise ValueError(f"group index {k} out of range for {len(groups)} groups")
    log_f, sizes, sigmas = _winner_log_integrand(groups, k)
    span = 8.0 * float(np.max(sigmas))
    hi = 0.0
    for n, s in zip(sizes, sigmas):
        if n >= 2.0:
            hi = max(hi, s * math.sqrt(2.0 * math.log(n)))
    return concave_log_quad(log_f, -span, hi + span, tol=tol)


def finite_n_winner(g1: GroupSpec, g2: GroupSpec, *, tol: float = 1e-10) -> QuadResult:
    """Exact P(max of group 1 > max of group 2) for finite real sizes."""
    return finite_n_winner_multi([g1, g2], 0, tol=tol)


def solve_c_for_target(p_target: float, sigma: float, *, tol: float = 1e-9) -> float:
    """Invert the limit law: find C with two_group_limit(C, sigma) = p_target.

    The map C -> p is strictly increasing from 0 to 1, so bisection on
    log C over [-60, 60] is exact bookkeeping; raises if the target is
    not bracketed there.
    """
    if not 0.0 < p_target < 1.0:
        raise ValueError(f"p_target must lie in (0, 1), got {p_target}")
    if not (math.isfinite(sigma) and sigma > 1.0):
        raise ValueError(f"sigma must be a finite real > 1, got {sigma}")
    lo, hi = -60.0, 60.0
    p_lo = two_group_limit(math.exp(lo), sigma).value
    p_hi = two_group_limit(math.exp(hi), sigma).value
    if not (p_lo < p_target < p_hi):
        raise ValueError(
            f"p_target={p_target} not bracketed by log C in [-60, 60] "
            f"(p({math.exp(lo):.3g})={p_lo:.3g}, p({math.exp(hi):.3g})={p_hi:.3g})"
        )
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        p_mid = two_group_limit(math.exp(mid), sigma).value
        if abs(p_mid - p_target) <= tol:
            break
        if p_mid < p_target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return math.exp(mid)
