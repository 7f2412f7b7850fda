"""Multistart maximization of ``|a_n|`` over the atomic family.

Each local search runs a Nelder-Mead simplex over
``(log r_1, ..., log r_N, theta_2, ..., theta_N)``.  The first angle is
held fixed because ``|a_n|`` is invariant under a common rotation of all
atoms; the rotation is chosen afterwards so that ``a_n > 0``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import minimize, root

from .checker import HOROWITZ_BOUND, ConditionReport, Tolerances, check_conditions, necessary_conditions
from .measure import (
    TWO_PI,
    AtomicMeasure,
    Candidate,
    _circular_gap,
    candidate_from_measure,
    normalize_rotation,
)

logger = logging.getLogger(__name__)

MIN_MASS = 1e-8
COLLISION_TOL = 1e-12
CLUSTER_TOL = 1e-4
COINCIDE_TOL = 1e-6
INITIAL_STEP = 0.3


class BoundViolation(AssertionError):
    """An objective value exceeded the Horowitz bound; this cannot happen for valid input."""


@dataclass(frozen=True)
class SearchOptions:
    restarts: int = 200
    max_iters: int = 2000
    step_tol: float = 1e-10
    f_tol: float = 1e-12
    seed: int = 0
    parallel: bool = False

    def __post_init__(self):
        if self.restarts < 0 or self.max_iters < 1:
            raise ValueError("restarts must be >= 0 and max_iters >= 1")
        if not (self.step_tol > 0 and self.f_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class RestartRecord:
    start_index: int
    N: int
    converged: bool
    value: float
    iterations: int


@dataclass
class LocalSearchResult:
    candidate: Candidate
    value: float
    converged: bool
    iterations: int
    events: list[str] = field(default_factory=list)


@dataclass
class SearchResult:
    n: int
    best: Candidate | None
    value: float
    converged: bool
    per_N: dict[int, float] = field(default_factory=dict)
    history: list[RestartRecord] = field(default_factory=list)
    cluster_count: int = 0

    @property
    def defined(self) -> bool:
        return self.best is not None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "value": self.value if self.defined else None,
            "value_defined": self.defined,
            "converged": self.converged,
            "cluster_count": self.cluster_count,
            "per_N": {str(k): v for k, v in sorted(self.per_N.items())},
            "restarts": len(self.history),
            "best": self.best.to_dict() if self.best is not None else None,
        }

    def history_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["start_index", "N", "converged", "value", "iterations"])
        for rec in self.history:
            writer.writerow([rec.start_index, rec.N, int(rec.converged), repr(rec.value), rec.iterations])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# objective


@numba.njit(cache=True)
def _abs_coefficient(x, theta0, n, N):
    b = np.empty(n + 1, np.complex128)
    r = np.exp(x[:N])
    b[0] = -np.sum(r)
    for k in range(1, n + 1):
        acc = r[0] * np.exp(1j * k * theta0)
        for j in range(1, N):
            acc += r[j] * np.exp(1j * k * x[N + j - 1])
        b[k] = -2.0 * acc
    a = np.empty(n + 1, np.complex128)
    a[0] = np.exp(b[0].real)
    for m in range(1, n + 1):
        acc = 0j
        for j in range(1, m + 1):
            acc += j * b[j] * a[m - j]
        a[m] = acc / m
    return abs(a[n])


def _gradient(x: np.ndarray, theta0: float, n: int, N: int) -> np.ndarray:
    """Gradient of ``|a_n|`` in the packed coordinates.

    With ``P(z) = a_n + 2 sum_k a_{n-k} z^k``, moving mass ``r_j`` changes
    ``a_n`` by ``-P(alpha_j)`` and turning atom ``j`` by ``-i r_j alpha_j P'(alpha_j)``.
    """
    mu = _unpack(x, theta0, N)
    a = candidate_from_measure(mu, n, n).f.coeffs
    if a[n] == 0:
        # |a_n| is not differentiable there; report a flat point
        return np.zeros_like(x)
    unit = np.conj(a[n]) / abs(a[n])
    p = 2.0 * a[n::-1].copy()
    p[0] = a[n]
    dp = np.polynomial.polynomial.polyder(p)
    alpha = mu.points
    r = np.asarray(mu.masses)
    P = np.polynomial.polynomial.polyval(alpha, p)
    dP = np.polynomial.polynomial.polyval(alpha, dp)
    d_log_r = r * np.real(unit * -P)
    d_theta = np.real(unit * (-1j * r * alpha * dP))
    return np.concatenate([d_log_r, d_theta[1:]])


def _polish(x: np.ndarray, theta0: float, n: int, N: int) -> np.ndarray:
    """Refine a simplex maximizer by solving the stationarity equations.

    A simplex stops within about sqrt(machine epsilon) of the maximizer in
    parameter space; root finding on the exact gradient recovers full precision.
    The refinement is kept only if it lowers the gradient without lowering ``|a_n|``.
    """
    g0 = np.linalg.norm(_gradient(x, theta0, n, N))
    try:
        sol = root(_gradient, x, args=(theta0, n, N), method="hybr", options={"xtol": 1e-15})
    except (ValueError, np.linalg.LinAlgError):
        return x
    y = sol.x
    if not np.all(np.isfinite(y)) or np.max(np.abs(y - x)) > 1e-4:
        return x
    if np.linalg.norm(_gradient(y, theta0, n, N)) >= g0:
        return x
    if _search_value(y, theta0, n, N) < _search_value(x, theta0, n, N) - 1e-13:
        return x
    return y


def _is_strict_local_max(x: np.ndarray, theta0: float, n: int, N: int) -> bool:
    """Zero gradient and a negative definite (finite-difference) Hessian."""
    if np.linalg.norm(_gradient(x, theta0, n, N)) > 1e-10:
        return False
    h = 1e-5
    rows = [
        (_gradient(x + h * e, theta0, n, N) - _gradient(x - h * e, theta0, n, N)) / (2 * h)
        for e in np.eye(x.size)
    ]
    hess = np.array(rows)
    return bool(np.max(np.linalg.eigvalsh((hess + hess.T) / 2)) < -1e-6)


def objective(mu: AtomicMeasure, n: int) -> float:
    """``|a_n|`` for the function generated by ``mu``."""
    return float(abs(candidate_from_measure(mu, n, n).f[n]))


def _pack(mu: AtomicMeasure) -> tuple[np.ndarray, float]:
    x = np.concatenate([np.log(mu.masses), np.asarray(mu.angles[1:])])
    return x, mu.angles[0]


def _unpack(x: np.ndarray, theta0: float, N: int) -> AtomicMeasure:
    return AtomicMeasure(tuple(np.exp(x[:N])), (theta0,) + tuple(x[N:]))


def _search_value(x, theta0, n, N) -> float:
    v = _abs_coefficient(x, theta0, n, N)
    if v > HOROWITZ_BOUND:
        raise BoundViolation(f"|a_{n}| = {v!r} exceeds the Horowitz bound")
    return v


def _simplex(x: np.ndarray, step: float) -> np.ndarray:
    d = x.size
    return np.vstack([x, x + step * np.eye(d)])


def _degeneracy(x: np.ndarray, theta0: float, N: int):
    """Return ``('drop', j)``, ``('merge', (i, j))`` or None."""
    for j in range(N):
        if math.exp(x[j]) < MIN_MASS:
            return "drop", j
    angles = [theta0] + list(x[N:])
    for i in range(N):
        for j in range(i + 1, N):
            if _circular_gap(angles[i], angles[j]) <= COLLISION_TOL:
                return "merge", (i, j)
    return None


def _merge_coincident(x: np.ndarray, theta0: float, N: int):
    """Merge one pair of converged atoms sitting at (numerically) the same point.

    Two atoms at one angle leave the split of their mass undetermined, so the
    simplex stops anywhere along a flat direction; the merged measure is the
    actual critical point.  Returns None when no pair is close.
    """
    angles = [theta0] + list(x[N:])
    masses = list(np.exp(x[:N]))
    for i in range(N):
        for j in range(i + 1, N):
            gap = _circular_gap(angles[i], angles[j])
            if gap <= COINCIDE_TOL:
                # signed offset of j from i, so the weighted mean respects wrap-around
                d = (angles[j] - angles[i] + math.pi) % TWO_PI - math.pi
                m = masses[i] + masses[j]
                angles[i] = angles[i] + d * masses[j] / m
                masses[i] = m
                del masses[j], angles[j]
                return AtomicMeasure(tuple(masses), tuple(angles))
    return None


def local_search(start: AtomicMeasure, n: int, opts: SearchOptions = SearchOptions()) -> LocalSearchResult:
    """Nelder-Mead ascent of ``|a_n|`` from ``start``; output rotated so ``a_n > 0``."""
    if start.size > n:
        raise ValueError(f"start has {start.size} atoms, more than n = {n}")
    mu = start
    events: list[str] = []
    collisions = 0
    iterations = 0
    converged = False
    x0, theta0 = _pack(mu)
    if _search_value(x0, theta0, n, mu.size) > 0 and _is_strict_local_max(x0, theta0, n, mu.size):
        cand = normalize_rotation(candidate_from_measure(mu, n))
        return LocalSearchResult(cand, float(cand.f[n].real), True, 0, ["start is a strict local maximum"])
    while True:
        N = mu.size
        x0, theta0 = _pack(mu)
        res = minimize(
            lambda x: -_search_value(x, theta0, n, N),
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": max(opts.max_iters - iterations, 1),
                "xatol": opts.step_tol,
                "fatol": opts.f_tol,
                "initial_simplex": _simplex(x0, INITIAL_STEP),
                "adaptive": x0.size > 4,
            },
        )
        iterations += int(res.nit)
        x = res.x
        issue = _degeneracy(x, theta0, N)
        if issue is None:
            converged = bool(res.status == 0)
            if converged:
                x = _polish(x, theta0, n, N)
                merged = _merge_coincident(x, theta0, N)
                while merged is not None:
                    events.append("merged coincident atoms after convergence")
                    N = merged.size
                    x, theta0 = _pack(merged)
                    x = _polish(x, theta0, n, N)
                    merged = _merge_coincident(x, theta0, N)
            mu = _unpack(x, theta0, N)
            break
        kind, where = issue
        masses = list(np.exp(x[:N]))
        angles = [theta0] + list(x[N:])
        if kind == "drop" and N > 1:
            events.append(f"dropped atom with mass {masses[where]:.3e}")
            del masses[where], angles[where]
        elif kind == "merge":
            collisions += 1
            events.append("merged colliding atoms")
        mu = AtomicMeasure(tuple(masses), tuple(angles))
        if collisions >= 2 or iterations >= opts.max_iters or (kind == "drop" and N == 1):
            converged = False
            break
    cand = normalize_rotation(candidate_from_measure(mu, n))
    return LocalSearchResult(cand, float(cand.f[n].real), converged, iterations, events)


# ---------------------------------------------------------------------------
# multistart


def _starts(n: int, N: int, opts: SearchOptions) -> list[AtomicMeasure]:
    rng = np.random.default_rng(np.random.SeedSequence([opts.seed, N]))
    out = []
    for _ in range(opts.restarts):
        masses = rng.uniform(0.1 / N, 2.0 / N, N)
        angles = rng.uniform(0.0, TWO_PI, N)
        out.append(AtomicMeasure(tuple(masses), tuple(angles)))
    return out


def _run_start(args) -> LocalSearchResult:
    start, n, opts = args
    return local_search(start, n, opts)


def worker_count() -> int:
    env = os.environ.get("KRZYZ_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_all(starts, n: int, opts: SearchOptions) -> list[LocalSearchResult]:
    jobs = [(s, n, opts) for s in starts]
    workers = worker_count()
    if opts.parallel and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map yields in submission order, so merging is deterministic
            return list(pool.map(_run_start, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_run_start(job) for job in jobs]


def parameter_distance(c1: Candidate, c2: Candidate) -> float:
    """Max mass/angle mismatch after aligning atoms, up to rotations preserving ``a_n``.

    Both candidates are assumed rotated so that ``a_n >= 0``; the remaining
    freedom is a rotation by a multiple of ``2 pi / n`` and a relabelling.
    """
    m1, m2 = c1.measure, c2.measure
    if m1.size != m2.size:
        return math.inf
    n, N = c1.n, m1.size
    order1 = np.argsort(m1.angles)
    t1 = np.asarray(m1.angles)[order1]
    r1 = np.asarray(m1.masses)[order1]
    best = math.inf
    for k in range(n):
        t2 = (np.asarray(m2.angles) + TWO_PI * k / n) % TWO_PI
        order2 = np.argsort(t2)
        t2s, r2s = t2[order2], np.asarray(m2.masses)[order2]
        for shift in range(N):
            tt = np.roll(t2s, shift)
            rr = np.roll(r2s, shift)
            dt = np.abs(t1 - tt) % TWO_PI
            dt = np.minimum(dt, TWO_PI - dt)
            best = min(best, float(max(np.max(dt), np.max(np.abs(r1 - rr)))))
    return best


def count_clusters(candidates: list[Candidate], tol: float = CLUSTER_TOL) -> int:
    reps: list[Candidate] = []
    for c in candidates:
        if all(parameter_distance(c, r) > tol for r in reps):
            reps.append(c)
    return len(reps)


def _assemble(n: int, runs: list[tuple[int, LocalSearchResult]]) -> SearchResult:
    history = [
        RestartRecord(i, r.candidate.measure.size, r.converged, r.value, r.iterations) for i, r in runs
    ]
    if not runs:
        return SearchResult(n, None, math.nan, False, {}, history, 0)
    pool = [r for _, r in runs if r.converged] or [r for _, r in runs]
    best = max(pool, key=lambda r: r.value)  # first maximum wins, in start order
    converged_cands = [r.candidate for _, r in runs if r.converged]
    return SearchResult(
        n, best.candidate, best.value, best.converged, {}, history, count_clusters(converged_cands)
    )


def multistart(n: int, N: int, opts: SearchOptions = SearchOptions()) -> SearchResult:
    """Local searches from ``opts.restarts`` seeded random starts with ``N`` atoms."""
    if not 1 <= N <= n:
        raise ValueError(f"need 1 <= N <= n, got N={N}, n={n}")
    runs = _run_all(_starts(n, N, opts), n, opts)
    result = _assemble(n, list(enumerate(runs)))
    if result.defined:
        result.per_N = {N: result.value}
    logger.info("n=%d N=%d: best %.12f over %d restarts", n, N, result.value, opts.restarts)
    return result


def sweep_N(n: int, opts: SearchOptions = SearchOptions()) -> SearchResult:
    """Run :func:`multistart` for every atom count ``N = 1..n`` and keep the overall best."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    runs: list[tuple[int, LocalSearchResult]] = []
    per_N: dict[int, float] = {}
    for N in range(1, n + 1):
        sub = _run_all(_starts(n, N, opts), n, opts)
        part = _assemble(n, list(enumerate(sub)))
        if part.defined:
            per_N[N] = part.value
        runs.extend((len(runs) + i, r) for i, r in enumerate(sub))
    result = _assemble(n, runs)
    result.per_N = per_N
    if result.defined:
        # the per-N maxima and the overall maximum come from the same runs
        result.value = max(per_N.values())
    return result


def verify_extremality(r: SearchResult, tol: Tolerances = Tolerances()) -> ConditionReport:
    """Condition report for the best candidate plus the necessary-condition battery."""
    if r.best is None or not r.converged:
        raise ValueError("verify_extremality needs a converged search result")
    report = check_conditions(r.best, tol)
    report.necessary = necessary_conditions(r.best, tol)
    return report


def wrap_candidate(c: Candidate) -> SearchResult:
    """Present a known candidate as a converged single-run search result."""
    c = normalize_rotation(c)
    v = float(c.f[c.n].real)
    return SearchResult(c.n, c, v, True, {c.measure.size: v}, [RestartRecord(0, c.measure.size, True, v, 0)], 1)


__all__ = [
    "BoundViolation",
    "LocalSearchResult",
    "RestartRecord",
    "SearchOptions",
    "SearchResult",
    "count_clusters",
    "local_search",
    "multistart",
    "objective",
    "parameter_distance",
    "sweep_N",
    "verify_extremality",
    "wrap_candidate",
]
