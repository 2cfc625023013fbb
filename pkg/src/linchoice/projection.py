"""Uniform projection rule: the lottery whose mean candidate minimizes the
KL divergence from the uniform simplex center to the candidate convex hull.

Minimizing KL(mu || x) over the hull equals minimizing f(x) = -sum_i mu_i ln x_i,
a smooth convex function, so Frank-Wolfe over the lottery simplex applies: the
linear minimization oracle is an argmin over candidates, each iterate carries
the lottery weights the rule must output, and the duality gap
max_c <mu/x, c> - 1 is exactly the first-order condition that certifies the
welfare floor <v, x> >= 1/d for every hull vector v.

Coordinates no candidate touches are removed up front and mu is re-uniformized
over the d' surviving coordinates (the divergence is infinite there otherwise,
and 1/d' >= 1/d keeps the floor valid). Steps pair the Frank-Wolfe vertex with
an away vertex (largest gradient among active weights); with exact line search
this converges linearly where the plain step zigzags, while remaining a
sequence of lottery-simplex vertex exchanges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import CandidateSet, Lottery, VoterSet, validate_candidates

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 10_000
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class ProjectionResult:
    lottery: Lottery
    point: np.ndarray  # lottery-weighted candidate combination, full dimension
    kl_value: float  # divergence from the (support-reduced) uniform vector
    fw_gap: float  # final duality gap = first-order condition residual
    iterations: int
    converged: bool
    history: tuple[float, ...] | None = None


def _line_search_derivative(mu, x, direction, gamma):
    denom = x + gamma * direction
    if np.any(denom <= 0.0):
        return np.inf
    return float(-np.sum(mu * direction / denom))


def _exact_line_search(mu, x, direction, gamma_max):
    """Bisection for the zero of the convex 1-d derivative on [0, gamma_max]."""
    if _line_search_derivative(mu, x, direction, gamma_max) <= 0.0:
        return gamma_max
    lo, hi = 0.0, gamma_max
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _line_search_derivative(mu, x, direction, mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return lo


def uproj(
    candidates: CandidateSet,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    track_history: bool = False,
) -> ProjectionResult:
    """Project the uniform vector onto the candidate hull; return the witnessing lottery."""
    validate_candidates(candidates).raise_if_invalid("candidate set")
    c_full = candidates.vectors
    m, d = c_full.shape
    support = np.flatnonzero(c_full.max(axis=0) > 0.0)
    cs = np.ascontiguousarray(c_full[:, support])
    d_eff = support.size
    mu = np.full(d_eff, 1.0 / d_eff)

    p = np.full(m, 1.0 / m)
    x = p @ cs
    history: list[float] = []
    converged = False
    it = 0
    for it in range(max_iterations):
        ratio = mu / x
        scores = cs @ ratio  # <mu/x, c_j> per candidate
        gap = float(scores.max() - 1.0)
        if track_history:
            history.append(float(np.sum(mu * np.log(mu / x))))
        if gap <= tolerance:
            converged = True
            break
        fw = int(np.argmax(scores))
        active = np.flatnonzero(p > 0.0)
        away = int(active[np.argmin(scores[active])])
        if away != fw and p[away] > 0.0:
            direction = cs[fw] - cs[away]
            slope = _line_search_derivative(mu, x, direction, 0.0)
            if slope < 0.0:
                gamma = _exact_line_search(mu, x, direction, p[away])
                p[fw] += gamma
                p[away] = max(p[away] - gamma, 0.0)
                x = x + gamma * direction
                continue
        direction = cs[fw] - x
        gamma = _exact_line_search(mu, x, direction, 1.0)
        p *= 1.0 - gamma
        p[fw] += gamma
        x = x + gamma * direction
    else:
        it = max_iterations

    p[p < WEIGHT_FLOOR] = 0.0
    p /= p.sum()
    x = p @ cs
    kl = float(np.sum(mu * np.log(mu / x)))
    gap = float((cs @ (mu / x)).max() - 1.0)
    point = np.zeros(d)
    point[support] = x
    return ProjectionResult(
        lottery=Lottery(p),
        point=point,
        kl_value=kl,
        fw_gap=gap,
        iterations=it + 1 if not converged else it,
        converged=converged,
        history=tuple(history) if track_history else None,
    )


def uproj_welfare_floor(result: ProjectionResult, voters: VoterSet) -> float:
    """min over voters of their utility for the projected point.

    At least 1/d - tolerance whenever the voters lie in the candidate hull.
    """
    if voters.d != result.point.shape[0]:
        raise ValidationError("voter dimension differs from projection point")
    return float((voters.vectors @ result.point).min())
