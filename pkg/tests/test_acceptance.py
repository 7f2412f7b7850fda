"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion k: PASS|FAIL`` line; the lines are
repeated in the pytest terminal summary.
"""

import contextlib
import io
import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import random_measure
from krzyz.checker import APPROXIMATE, HOLDS, Tolerances, check_conditions, disk_grid
from krzyz.cli import main
from krzyz.measure import Candidate, candidate_from_measure, conjectured_extremal, exponent_series
from krzyz.optimizer import SearchResult, objective, parameter_distance, verify_extremality
from krzyz.polyroot import TrigPolynomial, fejer_factorize, find_roots, poly_from_roots
from krzyz.semigroup import density, interval_semigroup, is_inductive
from krzyz.series import ComplexSeries, evaluate_monomials, exp_series, log_series, structural_polynomial

TWO_OVER_E = 2 / math.e
ARTIFACTS = Path(__file__).resolve().parents[1] / "artifacts"


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


@pytest.fixture(scope="module")
def proved_cases():
    """``optimize --n n --restarts 200`` for n = 1..5, with timings."""
    out = {}
    for n in range(1, 6):
        buf = io.StringIO()
        t0 = time.perf_counter()
        with contextlib.redirect_stdout(buf):
            code = main(["optimize", "--n", str(n), "--restarts", "200"])
        out[n] = (code, json.loads(buf.getvalue()), time.perf_counter() - t0)
    return out


def as_result(data: dict) -> SearchResult:
    best = Candidate.from_dict(data["best"])
    return SearchResult(data["n"], best, data["value"], data["converged"])


def test_criterion_1_proved_cases(proved_cases, criterion):
    errs = {n: abs(d["value"] - TWO_OVER_E) for n, (_, d, _) in proved_cases.items()}
    times = {n: t for n, (_, _, t) in proved_cases.items()}
    codes = {n: c for n, (c, _, _) in proved_cases.items()}
    ok = all(e <= 1e-6 for e in errs.values()) and all(c == 0 for c in codes.values())
    detail = "max |value - 2/e| = {:.2e}; slowest n took {:.1f}s".format(max(errs.values()), max(times.values()))
    assert criterion(1, ok, detail), (errs, codes)
    assert max(times.values()) < 60


def test_criterion_2_parameter_recovery(proved_cases, criterion):
    dists = {}
    for n, (_, data, _) in proved_cases.items():
        dists[n] = parameter_distance(as_result(data).best, conjectured_extremal(n))
    ok = all(d <= 1e-4 for d in dists.values())
    assert criterion(2, ok, f"max mass/angle mismatch after rotation = {max(dists.values()):.2e}"), dists


def test_criterion_3_seventeen_conditions(criterion):
    worst, bad = 0.0, []
    for n in range(1, 7):
        report = check_conditions(conjectured_extremal(n))
        for key, r in report.conditions.items():
            if key in "no":
                good = r.verdict in (HOLDS, APPROXIMATE) and r.residual <= 1e-4
            else:
                good = r.verdict == HOLDS and r.residual <= 1e-7
                worst = max(worst, r.residual)
            if not good:
                bad.append((n, key, r.verdict, r.residual))
    assert criterion(3, not bad, f"n = 1..6, largest residual {worst:.2e}"), bad


def test_criterion_4_necessary_conditions(proved_cases, criterion):
    failures = []
    for n, (_, data, _) in proved_cases.items():
        report = verify_extremality(as_result(data), Tolerances(eq_tol=1e-7, root_tol=1e-6, grid_tol=1e-8))
        nec = report.necessary
        checks = {
            "a_n >= 2a_0 - 1e-6": nec["an_ge_2a0"]["value"] >= -1e-6,
            "min Re P >= -1e-8": nec["re_P_grid_min"]["value"] >= -1e-8,
            "|lambda| >= 1 - 1e-6": nec["roots_outside_disk"]["value"] >= 1 - 1e-6,
            "(-1)^n prod lambda >= 1 - 1e-6": nec["root_product"]["value"] >= 1 - 1e-6,
            "a_0 <= sqrt2 - 1 + 1e-9": nec["a0_bound"]["value"] <= math.sqrt(2) - 1 + 1e-9,
            "|a_0 - 1/e| <= 1e-6": abs(nec["a0_minus_inv_e"]["value"]) <= 1e-6,
        }
        failures += [(n, name) for name, passed in checks.items() if not passed]
    assert criterion(4, not failures, "six necessary conditions at each n <= 5 optimum"), failures


def test_criterion_5_class_inequalities(criterion):
    rng = np.random.default_rng(5)
    grid = disk_grid(64, 64, 0.999)
    violations = {"caratheodory": 0, "livingston": 0, "schwarz": 0, "first": 0, "re_g": 0}
    for _ in range(10_000):
        mu = random_measure(rng, max_atoms=8, max_mass=4.0)
        M = int(rng.integers(1, 33))
        b = exponent_series(mu, M).coeffs
        a = exp_series(ComplexSeries(b)).coeffs
        m = abs(b[0])
        if np.max(np.abs(b[1:])) > 2 * m * (1 + 1e-12):
            violations["caratheodory"] += 1
        ks = np.arange(1, M // 2 + 1)
        if ks.size and np.max(np.abs(b[2 * ks] / m + b[ks] ** 2 / (2 * m * m))) > 2 + 1e-9:
            violations["livingston"] += 1
        if np.max(np.abs(a[1:])) > 1 - abs(a[0]) ** 2 + 1e-12:
            violations["schwarz"] += 1
        if abs(a[1]) > TWO_OVER_E + 1e-12:
            violations["first"] += 1
        if np.max(mu.exponent(grid).real) >= 0:
            violations["re_g"] += 1
    total = sum(violations.values())
    assert criterion(5, total == 0, f"10^4 random measures, violations {violations}"), violations


def test_criterion_6_oracles(criterion):
    rng = np.random.default_rng(6)
    worst = {}

    err = 0.0
    for _ in range(1000):
        M = int(rng.integers(0, 33))
        b = 2 * np.sqrt(rng.uniform(0, 1, M + 1)) * np.exp(1j * rng.uniform(0, 2 * np.pi, M + 1))
        err = max(err, np.max(np.abs(log_series(exp_series(ComplexSeries(b))).coeffs - b)))
    worst["exp/log"] = (err, 1e-9)

    err = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        b = rng.uniform(-2, 2, n + 1) + 1j * rng.uniform(-2, 2, n + 1)
        a = exp_series(ComplexSeries(b))
        err = max(err, abs(a[0] * evaluate_monomials(structural_polynomial(n, "P"), b[1:]) - a[n]))
    worst["structural"] = (err, 1e-10)

    err = 0.0
    t = 2 * np.pi * np.arange(1024) / 1024
    for _ in range(200):
        d = int(rng.integers(0, 11))
        gamma = (rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)) / math.sqrt(d + 1)
        corr = np.array([np.sum(gamma[k:] * np.conj(gamma[: d + 1 - k])) for k in range(d + 1)])
        T = TrigPolynomial(np.concatenate([[corr[0].real], 2 * corr[1:].real]), np.concatenate([[0], -2 * corr[1:].imag]))
        got = fejer_factorize(T)
        sq = lambda g: np.abs(np.polynomial.polynomial.polyval(np.exp(1j * t), g)) ** 2  # noqa: E731
        err = max(err, np.max(np.abs(sq(got) - sq(gamma))))
    worst["fejer"] = (err, 1e-8)

    mismatches = 0
    for _ in range(10_000):
        n = int(rng.integers(2, 61))
        I = {int(i) for i in np.flatnonzero(rng.random(n - 1) < rng.random()) + 1}
        gens = [x for x in range(1, n) if x not in I]
        reach, frontier = set(), {0}
        while frontier:
            frontier = {x + g for x in frontier for g in gens if x + g <= n} - reach
            reach |= frontier
        mismatches += is_inductive(I, n) != (n not in reach)
    worst["semigroup"] = (float(mismatches), 0.0)

    err = 0.0
    for _ in range(500):
        d = int(rng.integers(1, 13))
        c = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        rebuilt = poly_from_roots(find_roots(c), c[-1])
        err = max(err, np.max(np.abs(rebuilt - c)) / np.max(np.abs(c)))
    worst["roots"] = (err, 1e-7)

    ok = all(e <= tol for e, tol in worst.values())
    detail = ", ".join(f"{k} {e:.1e}" for k, (e, _) in worst.items())
    assert criterion(6, ok, detail), worst


def test_criterion_7_semigroup_facts(criterion):
    facts = {
        "{1,3} inductive for 5": is_inductive({1, 3}, 5),
        "{1,2,3} inductive for 6": is_inductive({1, 2, 3}, 6),
        "empty set not inductive for 2": not is_inductive(set(), 2),
        "G_{4,5} up to 11": interval_semigroup(4, 5, 11).members == [4, 5, 8, 9, 10],
        "density 1/2": density({1, 2, 3, 6, 7}, 11) == Fraction(1, 2),
    }
    failed = [k for k, v in facts.items() if not v]
    assert criterion(7, not failed, "5 exact semigroup facts"), failed


@pytest.mark.slow
def test_criterion_8_conjecture_consistency(capsys, criterion):
    ARTIFACTS.mkdir(exist_ok=True)
    summary = {}
    t0 = time.perf_counter()
    for n in range(6, 11):
        out = ARTIFACTS / f"optimize_n{n}.json"
        code, _ = run_cli(
            capsys, "optimize", "--n", n, "--restarts", 500, "--max-iters", 10000,
            "--parallel", "--out", out, "--csv", ARTIFACTS / f"optimize_n{n}.csv",
        )
        data = json.loads(out.read_text())
        summary[n] = {"value": data["value"], "cluster_count": data["cluster_count"], "exit": code}
    elapsed = time.perf_counter() - t0
    exceed = {n: s for n, s in summary.items() if s["value"] > TWO_OVER_E + 1e-6}
    (ARTIFACTS / "conjecture_consistency.json").write_text(json.dumps(summary, indent=2) + "\n")
    if exceed:
        (ARTIFACTS / "CONJECTURE_EXCEEDANCE.json").write_text(json.dumps(exceed, indent=2) + "\n")
    detail = "; ".join(
        f"n={n} {s['value']:.10f} clusters={s['cluster_count']}" for n, s in summary.items()
    ) + f"; {elapsed:.0f}s"
    assert criterion(8, not exceed, detail), f"values above 2/e + 1e-6: {exceed}"
    assert elapsed < 600


def test_criterion_9_negative_controls(criterion):
    rng = np.random.default_rng(9)
    bad = []
    for i in range(100):
        n = int(rng.integers(2, 7))
        mu = random_measure(rng, max_atoms=n, max_mass=1.5)
        report = check_conditions(candidate_from_measure(mu, n))
        value = objective(mu, n)
        rb, rc = report.conditions["b"].residual, report.conditions["c"].residual
        if not (report.conditions["b"].verdict == "fails" and report.conditions["c"].verdict == "fails"
                and rb > 1e-3 and rc > 1e-3 and value < TWO_OVER_E - 1e-3):
            bad.append((i, rb, rc, value))
    assert criterion(9, not bad, "100 seeded random candidates fail (b) and (c)"), bad


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
