"""Feasible average-voter regions, instance distortion of candidates and
lotteries, empirical distortion, and the instance-optimal rules via column
generation with a separation oracle.

The region of average voters consistent with a profile is the Minkowski
average of per-voter polytopes {v in the simplex : <c_a - c_b, v> >= 0 for
each reported comparison}. A linear objective therefore decomposes: it is
minimized voter by voter, and voters sharing one preference record share one
LP. Each group keeps a warm simplex tableau, and every minimizer ever found
is remembered in a witness pool, so later searches usually find violated
constraints by a single matrix product instead of fresh LP solves.

Coverage levels beta (the largest beta in [0,1] with
min over the region of <chosen - beta * challenger, avg voter> >= 0; the
distortion contribution is 1/beta) are computed by Newton-type iterations on
that concave root problem: each LP minimizer tightens beta to the ratio it
witnesses, and the final level is certified by one more nonnegative solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .errors import LpFailure, RealizabilityError, ValidationError
from .model import CandidateSet, Lottery, PairwisePrefs, Profile, Ranking

DEFAULT_EPSILON = 1e-6
VIOLATION_TOL = 1e-9
CG_MAX_ITERATIONS = 500
WITNESS_POOL_LIMIT = 4096


class _VoterGroup:
    """One distinct preference record: its constraint rows and warm LP state."""

    def __init__(self, weight: float, rows: list[lp.Constraint], nvars: int, hull_basis: np.ndarray | None):
        self.weight = weight
        self.nvars = nvars
        self.raw_rows = rows
        self.hull_basis = hull_basis  # candidate matrix when optimizing over hull weights
        self.solver = lp.StandardFormSolver(rows, nvars)

    def minimize(self, objective: np.ndarray) -> tuple[float, np.ndarray]:
        if self.hull_basis is not None:
            value, alpha = self.solver.minimize(self.hull_basis @ objective)
            return value, alpha @ self.hull_basis
        return self.solver.minimize(objective)


@dataclass
class FeasibleRegion:
    """Average-voter polytope for one profile, with a warm witness pool."""

    candidates: CandidateSet
    include_hull: bool
    groups: list[_VoterGroup]
    feasible_point: np.ndarray
    n_voters: int

    def __post_init__(self):
        self._pool: list[np.ndarray] = [self.feasible_point]
        self._pool_matrix: np.ndarray | None = None
        self.lp_solves = 0

    @property
    def d(self) -> int:
        return self.candidates.d

    def minimize(self, objective: np.ndarray) -> tuple[float, np.ndarray]:
        """min over the region of <objective, avg voter>, with its argmin."""
        total = 0.0
        vbar = np.zeros(self.d)
        for g in self.groups:
            value, point = g.minimize(objective)
            total += g.weight * value
            vbar += g.weight * point
        self.lp_solves += len(self.groups)
        self.note_witness(vbar)
        return total, vbar

    def note_witness(self, vbar: np.ndarray) -> None:
        self._pool.append(vbar)
        if len(self._pool) > WITNESS_POOL_LIMIT:
            del self._pool[1 : 1 + len(self._pool) // 4]
        self._pool_matrix = None

    def witness_pool(self) -> np.ndarray:
        if self._pool_matrix is None or self._pool_matrix.shape[0] != len(self._pool):
            self._pool_matrix = np.array(self._pool)
        return self._pool_matrix

    def contains_average(self, vbar: np.ndarray, tol: float = 1e-6) -> bool:
        """LP membership check for an average-voter vector (test support)."""
        d = self.d
        width = self.candidates.m if self.include_hull else d
        nvars = len(self.groups) * width
        rows: list[lp.Constraint] = []
        for i, g in enumerate(self.groups):
            base = i * width
            for coefs, rel, rhs in g.raw_rows:
                row = np.zeros(nvars)
                row[base : base + width] = coefs
                rows.append((row, rel, rhs))
        for j in range(d):
            row = np.zeros(nvars)
            for i, g in enumerate(self.groups):
                base = i * width
                if self.include_hull:
                    row[base : base + width] = g.weight * self.candidates.vectors[:, j]
                else:
                    row[base + j] = g.weight
            rows.append((row, lp.LESS, float(vbar[j]) + tol))
            rows.append((row, lp.GREATER, float(vbar[j]) - tol))
        sol = lp.solve(lp.LinearProgram(np.zeros(nvars), rows))
        return sol.ok


@dataclass(frozen=True)
class DistortionReport:
    value: float  # worst-case welfare ratio, possibly math.inf
    beta: float  # certified coverage level; value = 1 / beta
    witness: np.ndarray | None  # average voter approximately attaining the ratio
    per_challenger_betas: np.ndarray | None
    iterations: int  # LP solves spent
    epsilon: float
    converged: bool = True

    def to_json_dict(self) -> dict:
        return {
            "value": "inf" if math.isinf(self.value) else self.value,
            "beta": self.beta,
            "witness": None if self.witness is None else self.witness.tolist(),
            "per_challenger_betas": None
            if self.per_challenger_betas is None
            else self.per_challenger_betas.tolist(),
            "iterations": self.iterations,
            "epsilon": self.epsilon,
            "converged": self.converged,
        }


def _record_key(rec) -> tuple:
    if isinstance(rec, Ranking):
        return ("r", rec.order)
    return ("p", tuple(sorted(rec.pairs)))


def build_feasible_region(
    profile: Profile, candidates: CandidateSet, include_hull: bool = False
) -> FeasibleRegion:
    """Translate a profile into its average-voter region; phase-1 certified.

    Raises RealizabilityError when some voter's reported comparisons admit no
    consistent vector (possible only with the hull constraint or degenerate
    embeddings: the uniform vector satisfies every ordinal row otherwise).
    """
    if profile.m != candidates.m:
        raise ValidationError("profile and candidate set disagree on m")
    cvec = candidates.vectors
    m, d = cvec.shape
    counts: dict[tuple, int] = {}
    reps: dict[tuple, object] = {}
    for rec in profile.records:
        key = _record_key(rec)
        counts[key] = counts.get(key, 0) + 1
        reps[key] = rec

    groups: list[_VoterGroup] = []
    feasible = np.zeros(d)
    for key in sorted(counts):
        rec = reps[key]
        weight = counts[key] / profile.n
        width = m if include_hull else d
        rows: list[lp.Constraint] = [(np.ones(width), lp.EQUAL, 1.0)]
        for a, b in rec.preference_pairs():
            diff = cvec[a] - cvec[b]
            coefs = cvec @ diff if include_hull else diff
            rows.append((coefs, lp.GREATER, 0.0))
        try:
            group = _VoterGroup(weight, rows, width, cvec if include_hull else None)
        except lp.InfeasibleProgram as exc:
            raise RealizabilityError(
                f"preference record {key[1]} admits no consistent voter vector"
                + (" inside the candidate hull" if include_hull else "")
            ) from exc
        start = lp.find_feasible(rows, width)
        point = start.point if start.ok else group.solver.minimize(np.zeros(width))[1]
        feasible += weight * (point @ cvec if include_hull else point)
        groups.append(group)
    return FeasibleRegion(
        candidates=candidates,
        include_hull=include_hull,
        groups=groups,
        feasible_point=feasible,
        n_voters=profile.n,
    )


# ---------------------------------------------------------------------------
# Coverage levels (beta) and distortion reports
# ---------------------------------------------------------------------------


def _certified_beta(
    region: FeasibleRegion,
    point: np.ndarray,
    challenger_vec: np.ndarray,
    epsilon: float,
    start: float = 1.0,
) -> tuple[float, np.ndarray | None, int]:
    """Largest beta in [0,1] with min <point - beta * challenger, vbar> >= 0.

    Newton-type descent on the concave piecewise-linear root problem: each
    minimizer vbar pins beta to the ratio <point,vbar>/<challenger,vbar>,
    and the loop ends with a solve certifying nonnegativity at the returned
    level. Returns (beta, worst witness, lp sweeps used).
    """
    beta = min(1.0, max(0.0, start))
    witness = None
    solves = 0
    for _ in range(100):
        value, vbar = region.minimize(point - beta * challenger_vec)
        solves += 1
        if value >= -VIOLATION_TOL:
            return beta, witness, solves
        witness = vbar
        num = float(point @ vbar)
        den = float(challenger_vec @ vbar)
        if den <= VIOLATION_TOL or num <= VIOLATION_TOL * den:
            return 0.0, vbar, solves  # ratio is unbounded over the region
        beta = min(num / den, beta - 1e-12)
        if beta <= 0.0:
            return 0.0, vbar, solves
    # Newton stalled (numerically flat kink); fall back to plain bisection
    lo, hi = 0.0, beta
    while hi - lo > epsilon:
        mid = 0.5 * (lo + hi)
        value, vbar = region.minimize(point - mid * challenger_vec)
        solves += 1
        if value >= -VIOLATION_TOL:
            lo = mid
        else:
            witness = vbar
            hi = mid
    return lo, witness, solves


def _pool_start(region: FeasibleRegion, point: np.ndarray, challenger_vec: np.ndarray) -> float:
    """Upper bound on beta from the witness pool (free of LP solves)."""
    pool = region.witness_pool()
    num = pool @ point
    den = pool @ challenger_vec
    mask = den > VIOLATION_TOL
    if not mask.any():
        return 1.0
    return float(min(1.0, (num[mask] / den[mask]).min()))


def pair_beta(
    chosen: int, challenger: int, region: FeasibleRegion, epsilon: float = DEFAULT_EPSILON
) -> float:
    """Certified coverage of one candidate against one challenger."""
    cvec = region.candidates.vectors
    point, chall = cvec[chosen], cvec[challenger]
    start = _pool_start(region, point, chall)
    beta, _, _ = _certified_beta(region, point, chall, epsilon, start=start)
    return beta


def _point_report(
    point: np.ndarray, region: FeasibleRegion, epsilon: float, converged: bool = True
) -> DistortionReport:
    m = region.candidates.m
    cvec = region.candidates.vectors
    betas = np.zeros(m)
    witnesses: list[np.ndarray | None] = []
    solves = 0
    for c in range(m):
        start = _pool_start(region, point, cvec[c])
        beta, witness, used = _certified_beta(region, point, cvec[c], epsilon, start=start)
        betas[c] = beta
        witnesses.append(witness)
        solves += used
    worst = int(np.argmin(betas))
    beta = float(betas[worst])
    witness = witnesses[worst] if witnesses[worst] is not None else region.feasible_point
    value = math.inf if beta <= epsilon else 1.0 / beta
    return DistortionReport(
        value=value,
        beta=beta,
        witness=witness,
        per_challenger_betas=betas,
        iterations=solves,
        epsilon=epsilon,
        converged=converged,
    )


def instance_distortion_candidate(
    candidate: int, region: FeasibleRegion, epsilon: float = DEFAULT_EPSILON
) -> DistortionReport:
    """Worst welfare ratio of a fixed candidate over the region."""
    if not 0 <= candidate < region.candidates.m:
        raise IndexError(f"candidate index {candidate} out of range")
    return _point_report(region.candidates.vectors[candidate], region, epsilon)


def instance_distortion_lottery(
    lottery: Lottery,
    candidates: CandidateSet,
    region: FeasibleRegion,
    epsilon: float = DEFAULT_EPSILON,
) -> DistortionReport:
    """Worst welfare ratio of a lottery, via its mean candidate vector."""
    if lottery.m != candidates.m:
        raise ValidationError("lottery length differs from candidate count")
    return _point_report(lottery.mean_vector(candidates), region, epsilon)


def separation_oracle(
    point: np.ndarray,
    beta: float,
    region: FeasibleRegion,
    candidates: CandidateSet | None = None,
) -> np.ndarray | None:
    """First challenger-violating average voter at the given coverage level.

    For each challenger c (by ascending index) solves
    min <point - beta * c, vbar>; returns the first vbar with value below
    -1e-9, or None when the level is certified for every challenger.
    """
    cvec = (candidates or region.candidates).vectors
    for c in range(cvec.shape[0]):
        value, vbar = region.minimize(point - beta * cvec[c])
        if value < -VIOLATION_TOL:
            return vbar
    return None


def _violations_from_pool(
    region: FeasibleRegion, point: np.ndarray, beta: float
) -> list[tuple[int, np.ndarray]]:
    """Pool-only violation scan: (challenger, witness) pairs, no LP solves."""
    pool = region.witness_pool()
    cvec = region.candidates.vectors
    vals = (pool @ point)[:, None] - beta * (pool @ cvec.T)  # (P, m)
    out = []
    for c in np.flatnonzero(vals.min(axis=0) < -VIOLATION_TOL):
        out.append((int(c), pool[int(np.argmin(vals[:, c]))]))
    return out


def _certify_sweep(
    region: FeasibleRegion, point: np.ndarray, beta: float
) -> list[tuple[int, np.ndarray]]:
    """Full separation sweep; returns every challenger violation found."""
    cvec = region.candidates.vectors
    found = []
    for c in range(cvec.shape[0]):
        value, vbar = region.minimize(point - beta * cvec[c])
        if value < -VIOLATION_TOL:
            found.append((c, vbar))
    return found


# ---------------------------------------------------------------------------
# Instance-optimal rules (column generation)
# ---------------------------------------------------------------------------


def optimal_deterministic(
    profile: Profile,
    candidates: CandidateSet,
    epsilon: float = DEFAULT_EPSILON,
    region: FeasibleRegion | None = None,
    max_iterations: int = CG_MAX_ITERATIONS,
) -> tuple[int, DistortionReport]:
    """Candidate minimizing worst-case distortion, by per-candidate column generation.

    For each candidate, the restricted master over the discovered average
    voters reduces to a running minimum of welfare ratios; the separation
    sweep then either certifies the level or supplies new witnesses. Ties in
    the final selection go to the lowest candidate index.
    """
    if region is None:
        region = build_feasible_region(profile, candidates)
    cvec = region.candidates.vectors
    m = cvec.shape[0]
    betas = np.zeros(m)
    converged = True
    for k in range(m):
        point = cvec[k]
        beta = 1.0
        certified = False
        for _ in range(max_iterations):
            pooled = _violations_from_pool(region, point, beta)
            if pooled:
                for viol_c, viol_v in pooled:
                    beta = min(beta, _ratio(point, cvec[viol_c], viol_v))
                continue
            sweep = _certify_sweep(region, point, beta)
            if not sweep:
                certified = True
                break
            for viol_c, viol_v in sweep:
                beta = min(beta, _ratio(point, cvec[viol_c], viol_v))
        if not certified:
            converged = False
        betas[k] = max(beta, 0.0)
    winner = int(np.argmax(betas))
    report = _point_report(cvec[winner], region, epsilon, converged=converged)
    return winner, report


def _ratio(point: np.ndarray, challenger_vec: np.ndarray, vbar: np.ndarray) -> float:
    num = float(point @ vbar)
    den = float(challenger_vec @ vbar)
    if den <= VIOLATION_TOL:
        return 1.0
    return max(num / den, 0.0)


def optimal_randomized(
    profile: Profile,
    candidates: CandidateSet,
    epsilon: float = DEFAULT_EPSILON,
    region: FeasibleRegion | None = None,
    max_iterations: int = CG_MAX_ITERATIONS,
) -> tuple[Lottery, DistortionReport]:
    """Distortion-minimizing lottery via column generation.

    Alternates the restricted master (maximize the coverage level beta over
    lotteries, subject to the constraints induced by the average voters found
    so far) with the separation sweep, until no challenger violation worse
    than -1e-9 remains.
    """
    if region is None:
        region = build_feasible_region(profile, candidates)
    cvec = region.candidates.vectors
    m = cvec.shape[0]
    constraints: list[np.ndarray] = []  # one stored average voter per master row

    def add_vbar(vbar: np.ndarray) -> None:
        for existing in constraints:
            if np.allclose(existing, vbar, atol=1e-12):
                return
        constraints.append(vbar)

    add_vbar(region.feasible_point)
    probs = np.full(m, 1.0 / m)
    beta_hat = 0.0
    converged = False
    for _ in range(max_iterations):
        beta_hat, probs = _solve_randomized_master(cvec, constraints)
        point = probs @ cvec
        pooled = _violations_from_pool(region, point, beta_hat)
        if pooled:
            for _, vbar in pooled[:8]:
                add_vbar(vbar)
            continue
        sweep = _certify_sweep(region, point, beta_hat)
        if not sweep:
            converged = True
            break
        for _, vbar in sweep[:8]:
            add_vbar(vbar)
    lottery = Lottery(np.clip(probs, 0.0, None) / np.clip(probs, 0.0, None).sum())
    report = _point_report(lottery.mean_vector(region.candidates), region, epsilon, converged=converged)
    return lottery, report


def _solve_randomized_master(
    cvec: np.ndarray, constraints: list[np.ndarray]
) -> tuple[float, np.ndarray]:
    m = cvec.shape[0]
    nvars = m + 1  # p, then beta
    objective = np.zeros(nvars)
    objective[-1] = 1.0
    rows: list[lp.Constraint] = []
    for vbar in constraints:
        gains = cvec @ vbar  # <c_i, vbar> per candidate
        best = float(gains.max())
        rows.append((np.concatenate([gains, [-best]]), lp.GREATER, 0.0))
    rows.append((np.concatenate([np.ones(m), [0.0]]), lp.EQUAL, 1.0))
    bounds = [(0.0, np.inf)] * m + [(0.0, 1.0)]
    sol = lp.solve(lp.LinearProgram(objective, rows, sense="max", bounds=bounds))
    if not sol.ok:
        raise LpFailure(f"randomized master ended with status {sol.status}")
    return float(sol.value), sol.point[:m]


def empirical_distortion(lottery: Lottery, utilities) -> float:
    """Best single-candidate welfare over the lottery's expected welfare."""
    from .model import UtilityProfile, expected_welfare, welfare_vector

    if not isinstance(utilities, UtilityProfile):
        utilities = UtilityProfile(utilities)
    best = float(welfare_vector(utilities).max())
    achieved = expected_welfare(utilities, lottery)
    if achieved <= 0.0:
        return math.inf
    return best / achieved
