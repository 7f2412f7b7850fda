"""The atomic extremal family.

Functions of the form ``f = exp(g)`` with

    g(z) = sum_j r_j (alpha_j z + 1) / (alpha_j z - 1),  r_j > 0, alpha_j = exp(i theta_j)

are non-vanishing and bounded by one on the disk; every extremal function for
the coefficient problem has this shape with at most ``n`` atoms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .series import ComplexSeries, div_series, exp_series

TWO_PI = 2.0 * math.pi
ANGLE_MERGE_TOL = 1e-12


def _circular_gap(x: float, y: float) -> float:
    d = abs(x - y) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class AtomicMeasure:
    """Point masses ``r_j`` at unimodular points ``exp(i theta_j)``.

    Angles are reduced mod 2*pi; atoms whose angles agree to within 1e-12
    are merged by adding their masses.
    """

    masses: tuple[float, ...]
    angles: tuple[float, ...]

    def __post_init__(self):
        masses = [float(m) for m in self.masses]
        angles = [float(t) % TWO_PI for t in self.angles]
        if len(masses) != len(angles):
            raise ValueError("masses and angles must have equal length")
        if not masses:
            raise ValueError("a measure needs at least one atom")
        if any(not (m > 0 and math.isfinite(m)) for m in masses):
            raise ValueError("all masses must be finite and strictly positive")
        if any(not math.isfinite(t) for t in angles):
            raise ValueError("angles must be finite")
        merged_m: list[float] = []
        merged_t: list[float] = []
        for m, t in zip(masses, angles):
            for i, u in enumerate(merged_t):
                if _circular_gap(t, u) <= ANGLE_MERGE_TOL:
                    merged_m[i] += m
                    break
            else:
                merged_m.append(m)
                merged_t.append(t)
        object.__setattr__(self, "masses", tuple(merged_m))
        object.__setattr__(self, "angles", tuple(merged_t))

    @classmethod
    def from_atoms(cls, atoms) -> AtomicMeasure:
        atoms = list(atoms)
        return cls(tuple(m for m, _ in atoms), tuple(t for _, t in atoms))

    @property
    def size(self) -> int:
        return len(self.masses)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.angles))

    def exponent(self, z):
        """Closed-form value of ``g`` at points of the open disk."""
        z = np.asarray(z, dtype=np.complex128)
        out = np.zeros(z.shape, dtype=np.complex128)
        for r, a in zip(self.masses, self.points):
            out += r * (a * z + 1) / (a * z - 1)
        return out

    def function(self, z):
        return np.exp(self.exponent(z))


@dataclass(frozen=True)
class Candidate:
    """An atomic measure together with its exponent ``g`` and ``f = exp(g)``."""

    measure: AtomicMeasure
    n: int
    g: ComplexSeries
    f: ComplexSeries

    @property
    def M(self) -> int:
        return self.f.degree

    @property
    def a(self) -> np.ndarray:
        return self.f.coeffs

    @property
    def b(self) -> np.ndarray:
        return self.g.coeffs

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "M": self.M,
            "atoms": [
                {"mass": m, "angle": t}
                for m, t in zip(self.measure.masses, self.measure.angles)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Candidate:
        try:
            n = int(data["n"])
            M = int(data.get("M", 8 * n))
            atoms = [(float(a["mass"]), float(a["angle"])) for a in data["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed candidate: {exc}") from exc
        return candidate_from_measure(AtomicMeasure.from_atoms(atoms), n, M)


def exponent_series(mu: AtomicMeasure, M: int) -> ComplexSeries:
    """``b_0 = -sum r_j`` and ``b_k = -2 sum r_j alpha_j^k`` for ``1 <= k <= M``."""
    r = np.asarray(mu.masses)
    theta = np.asarray(mu.angles)
    b = np.empty(M + 1, dtype=np.complex128)
    b[0] = -mu.total_mass
    if M:
        k = np.arange(1, M + 1)
        b[1:] = -2.0 * (np.exp(1j * np.outer(k, theta)) @ r)
    return ComplexSeries(b)


def candidate_from_measure(mu: AtomicMeasure, n: int, M: int | None = None) -> Candidate:
    if n < 1:
        raise ValueError("n must be a positive integer")
    if M is None:
        M = 8 * n
    if M < n:
        raise ValueError(f"degree bound M={M} is below the target index n={n}")
    g = exponent_series(mu, M)
    return Candidate(mu, n, g, exp_series(g))


def conjectured_extremal(n: int, M: int | None = None) -> Candidate:
    """``exp((z^n - 1)/(z^n + 1))``: n equal masses 1/n at the n-th roots of -1."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    mu = AtomicMeasure(
        tuple(1.0 / n for _ in range(n)),
        tuple((2 * k + 1) * math.pi / n for k in range(n)),
    )
    return candidate_from_measure(mu, n, M)


def rotate_candidate(c: Candidate, psi: float) -> Candidate:
    """The candidate for ``f(exp(i psi) z)``.

    Coefficient ``k`` of ``f`` and ``g`` picks up ``exp(i k psi)``; each atom
    point ``alpha_j`` becomes ``alpha_j exp(i psi)``.
    """
    mu = AtomicMeasure(c.measure.masses, tuple(t + psi for t in c.measure.angles))
    phase = np.exp(1j * psi * np.arange(c.M + 1))
    # exp(i*0*psi) is exactly 1, so a_0 and b_0 are untouched
    return Candidate(mu, c.n, ComplexSeries(c.g.coeffs * phase), ComplexSeries(c.f.coeffs * phase))


def normalize_rotation(c: Candidate) -> Candidate:
    """Rotate so that ``a_n`` is real and non-negative."""
    an = c.f[c.n]
    if an == 0:
        return c
    return rotate_candidate(c, -np.angle(an) / c.n)


def blaschke_of_exponent(g: ComplexSeries) -> ComplexSeries:
    """Series of ``B = (g + 1) / (g - 1)``; a finite Blaschke product for atomic ``g``."""
    if g[0] == 1:
        raise ValueError("g(0) = 1 puts a pole of B at the origin")
    return div_series(g + 1.0, g - 1.0)


def load_candidate(path: str | Path) -> Candidate:
    with open(path, encoding="utf-8") as fh:
        return Candidate.from_dict(json.load(fh))


def dump_candidate(c: Candidate, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(c.to_dict(), fh, indent=2)
        fh.write("\n")
