"""Adaptive trapezoid quadrature for log-concave integrands.

Every integral in this package has the form ``int exp(L(x)) dx`` with L
concave (winner-probability integrands are products of Gaussian CDFs and
densities, all log-concave; the limit-law integrands become log-concave
after the substitution y = e^u, which also absorbs the x^{a-1} endpoint
singularity of the multi-group representation into plain exponential
decay).  Concavity makes a simple strategy rigorous:

1. scan a seed window and expand it geometrically until the endpoint
   log values sit ``drop`` below the running maximum (the integrand mass
   outside is then a negligible exponential tail),
2. trim to the region above the cutoff,
3. refine an equispaced trapezoid rule by repeated halving until two
   consecutive refinements agree within tol/2.

For analytic integrands the trapezoid rule converges geometrically in
the step size, so the doubling loop terminates after a handful of
levels; the last inter-level difference is reported as the error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["QuadResult", "QuadratureError", "concave_log_quad"]


@dataclass(frozen=True)
class QuadResult:
    """Numerical integral value with an absolute error estimate.

    ``note`` carries optional metadata flags (e.g. repeated sigma values
    in a multi-group spec); it never affects the numbers.
    """

    value: float
    abs_err: float
    evaluations: int
    note: str | None = None


class QuadratureError(RuntimeError):
    """Raised when refinement stalls; carries the partial estimate."""

    def __init__(self, message: str, partial: QuadResult | None = None):
        super().__init__(message)
        self.partial = partial


def concave_log_quad(
    log_f,
    lo: float,
    hi: float,
    *,
    tol: float = 1e-10,
    drop: float = 46.0,
    n_scan: int = 65,
    n_start: int = 129,
    max_levels: int = 14,
    max_expansions: int = 400,
    note: str | None = None,
) -> QuadResult:
    """Integrate exp(log_f) over the real line for concave log_f.

    Parameters
    ----------
    log_f : callable
        Vectorized log-integrand; may return -inf where the integrand
        underflows, never NaN.
    lo, hi : float
        Seed window.  It does not need to contain the peak; the
        expansion stage walks outward until the tails are resolved.
    tol : float
        Absolute tolerance on the integral value.
    drop : float
        Window is grown until log_f at both ends is at least this far
        below the maximum (e^-46 ~ 1e-20 leaves truncation far below tol).

    Returns
    -------
    QuadResult

    Raises
    ------
    QuadratureError
        If the window cannot be resolved or refinement does not settle
        within ``max_levels`` doublings.
    """
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"invalid seed window [{lo}, {hi}]")

    evaluations = 0

    def sample(points):
        nonlocal evaluations
        vals = np.asarray(log_f(np.asarray(points, dtype=float)), dtype=float)
        evaluations += len(points)
        if np.any(np.isnan(vals)):
            raise QuadratureError("log integrand returned NaN")
        return vals

    ys = sample(np.linspace(lo, hi, n_scan))
    ymax = float(np.max(ys))

    # grow each side until its endpoint is deep below the running peak
    for side in (-1, +1):
        step = (hi - lo) / 4.0
        end = lo if side < 0 else hi
        end_val = ys[0] if side < 0 else ys[-1]
        expansions = 0
        while not (end_val <= ymax - drop):
            end += side * step
            step *= 1.5
            end_val = float(sample([end])[0])
            ymax = max(ymax, end_val)
            expansions += 1
            if expansions > max_expansions:
                raise QuadratureError("window expansion did not resolve the integrand tail")
        if side < 0:
            lo = end
        else:
            hi = end

    if not np.isfinite(ymax):
        raise QuadratureError("integrand is zero everywhere in the resolved window")

    # trim to the region that actually carries mass
    xs = np.linspace(lo, hi, 4 * n_scan + 1)
    ys = sample(xs)
    ymax = float(np.max(ys))
    above = np.nonzero(ys > ymax - drop)[0]
    lo = xs[max(above[0] - 1, 0)]
    hi = xs[min(above[-1] + 1, len(xs) - 1)]

    # trapezoid refinement; accept after two consecutive small differences
    n = n_start
    prev = None
    best = None
    diff = np.inf
    settled = 0
    for _ in range(max_levels):
        xs = np.linspace(lo, hi, n)
        ys = sample(xs)
        m = float(np.max(ys))
        h = (hi - lo) / (n - 1)
        with np.errstate(under="ignore"):
            scaled = np.exp(ys - m)
        total = (np.sum(scaled) - 0.5 * (scaled[0] + scaled[-1])) * h * np.exp(m)
        if prev is not None:
            diff = abs(total - prev)
            if diff <= 0.5 * tol:
                settled += 1
                if settled >= 2:
                    tail = (hi - lo) * (np.exp(ys[0] - m) + np.exp(ys[-1] - m)) * np.exp(m)
                    best = QuadResult(
                        value=float(total),
                        abs_err=float(diff + tail),
                        evaluations=evaluations,
                        note=note,
                    )
                    return best
            else:
                settled = 0
        prev = total
        n = 2 * n - 1

    partial = QuadResult(value=float(prev), abs_err=float(diff), evaluations=evaluations, note=note)
    raise QuadratureError(
        f"trapezoid refinement did not reach tol={tol:g} (last diff {diff:.3g})",
        partial=partial,
    )
