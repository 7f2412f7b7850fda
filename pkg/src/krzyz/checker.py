"""Extremality diagnostics for a candidate.

:func:`check_conditions` evaluates the seventeen equivalent extremality
conditions (a)-(q) independently of one another, each from the raw
coefficient data, and attaches the first-order variational residuals and a
suite of coefficient inequalities valid for the whole class.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import semigroup
from .measure import Candidate, blaschke_of_exponent, conjectured_extremal
from .polyroot import (
    RootFindingError,
    find_roots,
    inner_deficiency,
    krzyz_coefficients,
    real_part_on_circle,
)
from .series import ComplexSeries, compress, wiener_transform

CONDITION_KEYS = tuple("abcdefghijklmnopq")

HOLDS = "holds"
FAILS = "fails"
APPROXIMATE = "approximate"

TWO_OVER_E = 2.0 / math.e
HOROWITZ_BOUND = 1.0 - 1.0 / (3.0 * math.pi) + (4.0 / math.pi) * math.sin(1.0 / 12.0)
ERMERS_BOUND = 0.9991
PERETZ_A0_BOUND = math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class Tolerances:
    eq_tol: float = 1e-7
    root_tol: float = 1e-6
    grid_tol: float = 1e-8

    def __post_init__(self):
        if not (self.eq_tol > 0 and self.root_tol > 0 and self.grid_tol > 0):
            raise ValueError("tolerances must be strictly positive")


@dataclass
class ConditionResult:
    verdict: str
    residual: float
    note: str = ""

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "residual": self.residual, "note": self.note}


@dataclass
class ConditionReport:
    conditions: dict[str, ConditionResult]
    variational: dict[str, dict] = field(default_factory=dict)
    inequalities: dict[str, dict] = field(default_factory=dict)
    necessary: dict[str, dict] = field(default_factory=dict)

    def verdicts(self) -> dict[str, str]:
        return {k: v.verdict for k, v in self.conditions.items()}

    @property
    def all_hold(self) -> bool:
        return all(v.verdict == HOLDS for v in self.conditions.values())

    @property
    def any_fail(self) -> bool:
        return any(v.verdict == FAILS for v in self.conditions.values())

    def to_dict(self) -> dict:
        out = {
            "conditions": {k: v.to_dict() for k, v in self.conditions.items()},
            "variational": self.variational,
            "inequalities": self.inequalities,
        }
        if self.necessary:
            out["necessary"] = self.necessary
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> ConditionReport:
        conds = {
            k: ConditionResult(v["verdict"], float(v["residual"]), v.get("note", ""))
            for k, v in data["conditions"].items()
        }
        return cls(
            conds,
            data.get("variational", {}),
            data.get("inequalities", {}),
            data.get("necessary", {}),
        )


def _verdict(residual: float, tol: float, approximate: bool = False) -> str:
    if not residual <= tol:
        return FAILS
    return APPROXIMATE if approximate else HOLDS


def roots_of_minus_one(n: int) -> np.ndarray:
    return np.exp(1j * np.pi * (2 * np.arange(n) + 1) / n)


def hausdorff(x: np.ndarray, y: np.ndarray) -> float:
    d = np.abs(np.asarray(x)[:, None] - np.asarray(y)[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def disk_grid(radial: int, angular: int, radius: float) -> np.ndarray:
    r = np.linspace(0.0, radius, radial)
    t = 2 * np.pi * np.arange(angular) / angular
    return np.outer(r, np.exp(1j * t)).ravel()


def aligned_distance(f: ComplexSeries, target: ComplexSeries, grid: int = 4096) -> tuple[float, float]:
    """Min over z-rotations ``psi`` of ``max_k |f_k e^{ik psi} - target_k|``.

    Grid search over ``psi`` followed by Newton steps on the squared l2
    distance while they keep improving.  Returns ``(distance, psi)``.
    """
    k = np.arange(f.degree + 1)
    fc, tc = f.coeffs, target.coeffs
    psis = 2 * np.pi * np.arange(grid) / grid
    rotated = fc[:, None] * np.exp(1j * np.outer(k, psis))
    dist = np.max(np.abs(rotated - tc[:, None]), axis=0)
    j = int(np.argmin(dist))
    best, psi = float(dist[j]), float(psis[j])
    for _ in range(5):
        w = np.conj(tc) * fc * np.exp(1j * k * psi)
        d1 = np.real(np.sum(1j * k * w))
        d2 = np.real(np.sum(-(k**2) * w))
        if d2 >= 0:
            break
        psi2 = psi - d1 / d2
        d = float(np.max(np.abs(fc * np.exp(1j * k * psi2) - tc)))
        if d >= best:
            break
        best, psi = d, psi2
    return best, psi


def _zero_set(values: np.ndarray, n: int, eq_tol: float) -> tuple[set[int], bool]:
    mags = np.abs(values[1:n])
    zero = {i + 1 for i, m in enumerate(mags) if m < eq_tol}
    borderline = bool(np.any((mags >= eq_tol / 10) & (mags < eq_tol * 10)))
    return zero, borderline


def _inductive_condition(values: np.ndarray, n: int, eq_tol: float, test, label: str) -> ConditionResult:
    zero, borderline = _zero_set(values, n, eq_tol)
    ok = test(zero, n)
    note = (
        f"{label} = {sorted(zero)}; n {'not in' if ok else 'in'} G({label}) "
        "(sufficient criterion)"
    )
    if borderline:
        note += "; coefficients within 10x of the zero threshold"
    residual = 0.0 if ok else 1.0
    return ConditionResult(_verdict(residual, 0.5, borderline), residual, note)


def blaschke_exponent_check(g: ComplexSeries, n: int) -> float:
    h = blaschke_of_exponent(g)
    k = math.ceil(n / 2)
    return float(np.max(np.abs(h.coeffs[:k]))) if k else 0.0


def check_conditions(c: Candidate, tol: Tolerances = Tolerances()) -> ConditionReport:
    n = c.n
    a, b = c.a, c.b
    a0, an = a[0], a[n]
    eq = tol.eq_tol
    conds: dict[str, ConditionResult] = {}

    conds["a"] = ConditionResult(_verdict(abs(an - 2 * a0), eq), float(abs(an - 2 * a0)))

    res_b = float(np.max(np.abs(a[1:n]))) if n > 1 else 0.0
    conds["b"] = ConditionResult(_verdict(res_b, eq), res_b)

    res_c, psi = aligned_distance(c.f, conjectured_extremal(n, c.M).f)
    conds["c"] = ConditionResult(_verdict(res_c, eq), res_c, f"best z-rotation psi = {psi:.12g}")

    conds["d"] = _inductive_condition(a, n, eq, semigroup.is_inductive, "I")
    conds["e"] = _inductive_condition(b, n, eq, semigroup.is_exp_inductive, "J")

    res_f = blaschke_exponent_check(c.g, n)
    conds["f"] = ConditionResult(
        _verdict(res_f, eq), res_f, f"(g+1)/(g-1) vanishes to order >= {math.ceil(n / 2)}"
    )

    p = krzyz_coefficients(a, n)
    try:
        lam = find_roots(p)
        root_note, root_approx = "", False
    except RootFindingError as exc:
        lam = exc.roots
        root_note, root_approx = f"root finder: {exc}", True
    res_g = float(abs((-1) ** n * np.prod(lam) - 1))
    res_h = float(np.max(np.abs(np.abs(lam) - 1)))
    res_i = hausdorff(lam, roots_of_minus_one(n))
    conds["g"] = ConditionResult(_verdict(res_g, eq, root_approx), res_g, root_note)
    conds["h"] = ConditionResult(_verdict(res_h, tol.root_tol, root_approx), res_h, root_note)
    conds["i"] = ConditionResult(_verdict(res_i, tol.root_tol, root_approx), res_i, root_note)

    res_j = float(abs(b[0].real * an.real + a0.real * b[n].real))
    conds["j"] = ConditionResult(_verdict(res_j, eq), res_j)
    res_k = float(abs(np.real(np.sum(a[1:n] * b[n - 1 : 0 : -1])))) if n > 1 else 0.0
    conds["k"] = ConditionResult(_verdict(res_k, eq), res_k)
    res_l = float(abs(an - a0 * b[n].real))
    conds["l"] = ConditionResult(_verdict(res_l, eq), res_l)

    masses = np.asarray(c.measure.masses)
    spread = float(masses.max() - masses.min())
    carath = float(abs(b[n].real - 2 * abs(b[0])))
    count = 0.0 if c.measure.size == n else math.inf
    res_m = max(spread, carath, count)
    conds["m"] = ConditionResult(
        _verdict(res_m, eq), res_m, f"N = {c.measure.size}, mass spread {spread:.3e}"
    )

    H = compress(wiener_transform(c.f, n), n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        deficiency = inner_deficiency(H)
    flagged = deficiency.near_circle_count > 0 or deficiency.truncation_warning
    res_n = abs(deficiency.B0_root_estimate - 1.0)
    conds["n"] = ConditionResult(
        _verdict(res_n, eq, flagged or res_n * 100 > eq),
        res_n,
        f"B0 estimate {deficiency.B0_root_estimate:.6g} from {deficiency.zero_count_inside} zeros "
        f"certified in |z| < {deficiency.certified_radius:.3f}; "
        f"{deficiency.unresolved_count} unresolved truncation zeros",
    )
    rad = deficiency.certified_radius
    hmin = float(np.min(np.abs(H(disk_grid(64, 64, rad))))) if rad > 0 else 0.0
    res_o = float(max(deficiency.zero_count_inside, 0 if hmin > tol.grid_tol else 1))
    conds["o"] = ConditionResult(
        _verdict(res_o, 0.0, flagged),
        res_o,
        f"min |H| = {hmin:.3e} on the disk |z| <= {rad:.3f}; zero-free region beyond it not certified",
    )

    res_p = float(np.max(np.abs(c.f.coeffs - wiener_transform(c.f, n).coeffs)))
    conds["p"] = ConditionResult(_verdict(res_p, eq), res_p)
    res_q = float(np.max(np.abs(c.g.coeffs - wiener_transform(c.g, n).coeffs)))
    conds["q"] = ConditionResult(_verdict(res_q, eq), res_q)

    report = ConditionReport({k: conds[k] for k in CONDITION_KEYS})
    report.variational = variational_residuals(c, tol)
    report.inequalities = inequality_suite(c, B0=deficiency.B0_root_estimate)
    return report


# ---------------------------------------------------------------------------
# first-order conditions at a maximum


def variational_test(c: Candidate, u: ComplexSeries, radius: float = 0.5, grid: int = 32) -> float:
    """``Re sum_{k=0}^n a_{n-k} u_k`` for a test function ``u`` with ``Re u < 0``.

    ``Re u < 0`` is checked on a ``grid x grid`` polar sample of ``|z| <= radius``
    (the truncated series is only trusted well inside the disk).
    """
    n = c.n
    if u.degree < n:
        raise ValueError(f"test series needs degree >= {n}")
    if np.max(u(disk_grid(grid, grid, radius)).real) >= 0:
        raise ValueError("test function does not have negative real part on the sample grid")
    return float(np.real(np.sum(c.a[n::-1] * u.coeffs[: n + 1])))


def atom_boundary_test(c: Candidate) -> np.ndarray:
    """``Re P(alpha_k)`` at each atom point."""
    p = krzyz_coefficients(c.a, c.n)
    return np.polynomial.polynomial.polyval(c.measure.points, p).real


def cayley_test_series(n: int, M: int) -> ComplexSeries:
    """Series of ``(z^n - 1)/(z^n + 1) = -1 + 2z^n - 2z^{2n} + ...``."""
    coeffs = np.zeros(M + 1, dtype=np.complex128)
    coeffs[0] = -1.0
    for j in range(1, M // n + 1):
        coeffs[j * n] = 2.0 * (-1) ** (j + 1)
    return ComplexSeries(coeffs)


def variational_residuals(c: Candidate, tol: Tolerances = Tolerances()) -> dict[str, dict]:
    s_a = variational_test(c, cayley_test_series(c.n, c.M))
    s_b = abs(float(np.real(np.sum(c.a[c.n :: -1] * c.b[: c.n + 1]))))
    s_e = float(np.max(np.abs(atom_boundary_test(c))))
    return {
        "var_a": {"value": s_a, "holds": s_a <= tol.eq_tol},
        "var_b": {"value": s_b, "holds": s_b <= tol.eq_tol},
        "var_e": {"value": s_e, "holds": s_e <= tol.eq_tol},
    }


# ---------------------------------------------------------------------------
# inequalities valid on the whole class


def _check(margin: float, tol: float, approximate: bool = False) -> dict:
    return {"passed": bool(margin >= -tol), "margin": float(margin), "approximate": approximate}


def inequality_suite(c: Candidate, B0: float | None = None, tol: float = 1e-9) -> dict[str, dict]:
    a, b = c.a, c.b
    n, M = c.n, c.M
    m = abs(b[0])
    out: dict[str, dict] = {}
    out["caratheodory"] = _check(2.0 - float(np.max(np.abs(b[1:]))) / m, tol)
    ks = np.arange(1, M // 2 + 1)
    if ks.size:
        liv = np.abs(b[2 * ks] / m + b[ks] ** 2 / (2 * m * m))
        out["livingston"] = _check(2.0 - float(np.max(liv)), tol)
    out["schwarz"] = _check(1.0 - abs(a[0]) ** 2 - float(np.max(np.abs(a[1:]))), tol)
    out["first_coefficient"] = _check(TWO_OVER_E - abs(a[1]), tol)
    if B0 is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            B0 = inner_deficiency(compress(wiener_transform(c.f, n), n)).B0_root_estimate
    wiener_margin = math.inf if B0 == 0 else 1.0 + 1.0 / B0 - float(a[n].real / a[0].real)
    out["wiener"] = _check(wiener_margin, tol, approximate=True)
    out["horowitz"] = _check(HOROWITZ_BOUND - abs(a[n]), tol)
    out["ermers"] = _check(ERMERS_BOUND - abs(a[n]), tol)
    return out


# ---------------------------------------------------------------------------


def necessary_conditions(c: Candidate, tol: Tolerances = Tolerances(), gridsize: int = 4096) -> dict[str, dict]:
    """Inequalities every extremal satisfies; meaningful only at a converged optimum."""
    n = c.n
    a0, an = float(c.a[0].real), float(c.a[n].real)
    p = krzyz_coefficients(c.a, n)
    _, re_min = real_part_on_circle(p, max(gridsize, 4 * n + 1))
    lam = find_roots(p)
    prod = complex((-1) ** n * np.prod(lam))
    return {
        "an_ge_2a0": {"value": an - 2 * a0, "passed": an - 2 * a0 >= -10 * tol.eq_tol},
        "re_P_grid_min": {"value": re_min, "passed": re_min >= -tol.grid_tol},
        "roots_outside_disk": {
            "value": float(np.min(np.abs(lam))),
            "passed": bool(np.min(np.abs(lam)) >= 1 - tol.root_tol),
        },
        "root_product": {"value": prod.real, "imag": prod.imag, "passed": prod.real >= 1 - tol.eq_tol},
        "a0_bound": {"value": a0, "passed": a0 <= PERETZ_A0_BOUND + tol.eq_tol},
        "a0_minus_inv_e": {"value": a0 - math.exp(-1.0), "passed": True},
    }
