"""Polynomial roots, the Krzyz polynomial, and Fejer factorization.

Coefficient sequences are in ascending order: ``(c_0, c_1, ..., c_d)``
stands for ``c_0 + c_1 z + ... + c_d z^d``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .measure import Candidate
from .series import ComplexSeries

EPS = np.finfo(float).eps
TRIM_RTOL = 1e-14
MAX_ITERATIONS = 500


class RootFindingError(RuntimeError):
    """Simultaneous iteration failed; carries the best iterate and its residual."""

    def __init__(self, message: str, roots: np.ndarray, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.roots = roots
        self.residual = residual


class FejerError(ValueError):
    pass


def _trim(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.complex128).ravel()
    if c.size == 0 or not np.any(c):
        raise ValueError("zero polynomial has no well-defined roots")
    scale = np.max(np.abs(c))
    nz = np.nonzero(np.abs(c) >= TRIM_RTOL * scale)[0]
    return c[: nz[-1] + 1]


def _horner_with_derivative(c: np.ndarray, z: np.ndarray):
    p = np.full(z.shape, c[-1], dtype=np.complex128)
    dp = np.zeros(z.shape, dtype=np.complex128)
    for ck in c[-2::-1]:
        dp = dp * z + p
        p = p * z + ck
    return p, dp


def _rounding_bound(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    absz = np.abs(z)
    return np.polynomial.polynomial.polyval(absz, np.abs(c))


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    d = c.size - 1
    radius = (abs(c[0]) / abs(c[-1])) ** (1.0 / d) if c[0] != 0 else 1.0
    radius = radius if radius > 0 else 1.0
    k = np.arange(d)
    return radius * np.exp(1j * (2 * np.pi * k / d + 0.4))


def _aberth(c: np.ndarray, z: np.ndarray):
    for it in range(1, MAX_ITERATIONS + 1):
        p, dp = _horner_with_derivative(c, z)
        small = np.abs(p) <= 4 * EPS * _rounding_bound(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(small, 0, p / dp)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0)
            repulsion = inv.sum(axis=1)
            w = ratio / (1 - ratio * repulsion)
        w = np.where(np.isfinite(w), w, 0)
        z = z - w
        if np.all(small) or np.all(np.abs(w) <= 2 * EPS * np.maximum(1, np.abs(z))):
            return z, True, it
    return z, False, MAX_ITERATIONS


def _newton_polish(c: np.ndarray, z: np.ndarray, steps: int = 3) -> np.ndarray:
    for _ in range(steps):
        p, dp = _horner_with_derivative(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        ok = np.isfinite(step) & (np.abs(p) > 4 * EPS * _rounding_bound(c, z))
        z = np.where(ok, z - step, z)
    return z


def _residual(c: np.ndarray, z: np.ndarray) -> float:
    """Worst ``|p(z)|`` relative to ``sum |c_k| max(1,|z|)^d``."""
    if z.size == 0:
        return 0.0
    p = np.polynomial.polynomial.polyval(z, c)
    scale = np.sum(np.abs(c)) * np.maximum(1.0, np.abs(z)) ** (c.size - 1)
    return float(np.max(np.abs(p) / scale))


def find_roots(coeffs, tol: float = 1e-8) -> np.ndarray:
    """All complex roots of a polynomial, with multiplicity.

    Aberth-Ehrlich simultaneous iteration, falling back to companion-matrix
    eigenvalues (then Newton polish) if the iteration does not settle.
    """
    c = _trim(coeffs)
    lead_zeros = int(np.argmax(c != 0))
    c = c[lead_zeros:]
    zero_roots = np.zeros(lead_zeros, dtype=np.complex128)
    d = c.size - 1
    if d == 0:
        return zero_roots
    if d == 1:
        return np.concatenate([zero_roots, [-c[0] / c[1]]])
    z, converged, _ = _aberth(c, _initial_guesses(c))
    if converged and _residual(c, z) <= tol:
        return np.concatenate([zero_roots, z])
    companion = np.zeros((d, d), dtype=np.complex128)
    companion[1:, :-1] = np.eye(d - 1)
    companion[:, -1] = -c[:-1] / c[-1]
    z2 = _newton_polish(c, np.linalg.eigvals(companion))
    best = min((z, z2), key=lambda r: _residual(c, r))
    res = _residual(c, best)
    if res > tol:
        raise RootFindingError(
            f"no convergence after {MAX_ITERATIONS} iterations", best, res
        )
    return np.concatenate([zero_roots, best])


def poly_from_roots(roots, leading: complex = 1.0) -> np.ndarray:
    """Ascending coefficients of ``leading * prod (z - root)``."""
    return leading * np.poly(np.asarray(roots, dtype=np.complex128))[::-1]


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KrzyzPolynomial:
    """``P(z) = a_n + 2 a_{n-1} z + ... + 2 a_0 z^n`` and its zeros."""

    n: int
    coeffs: np.ndarray
    roots: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


def krzyz_coefficients(a, n: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.size < n + 1:
        raise ValueError(f"need coefficients a_0..a_{n}, got {a.size}")
    p = 2.0 * a[n::-1].copy()
    p[0] = a[n]
    return p


def krzyz_polynomial(c: Candidate) -> KrzyzPolynomial:
    p = krzyz_coefficients(c.f.coeffs, c.n)
    return KrzyzPolynomial(c.n, p, find_roots(p))


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """``T(t) = sum_k (cos_k cos(kt) + sin_k sin(kt))``; ``sin_0`` is always 0."""

    cos: np.ndarray
    sin: np.ndarray

    def __post_init__(self):
        cs = np.asarray(self.cos, dtype=float).copy()
        sn = np.zeros_like(cs)
        given = np.asarray(self.sin, dtype=float)
        if given.size == cs.size - 1:
            sn[1:] = given
        elif given.size == cs.size:
            sn[1:] = given[1:]
        else:
            raise ValueError("sine coefficients must have length n or n+1")
        object.__setattr__(self, "cos", cs)
        object.__setattr__(self, "sin", sn)

    @property
    def degree(self) -> int:
        return self.cos.size - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(self.degree + 1)
        kt = np.multiply.outer(t, k)
        return np.cos(kt) @ self.cos + np.sin(kt) @ self.sin

    def laurent(self) -> np.ndarray:
        """Coefficients ``tau_{-d} .. tau_d`` of ``T`` as a Laurent polynomial in ``e^{it}``."""
        pos = (self.cos - 1j * self.sin) / 2
        pos[0] = self.cos[0]
        return np.concatenate([np.conj(pos[:0:-1]), pos])


def real_part_on_circle(P: KrzyzPolynomial | np.ndarray, gridsize: int = 4096):
    """``Re P(e^{it})`` as a trigonometric polynomial, plus its minimum over a uniform grid."""
    coeffs = P.coeffs if isinstance(P, KrzyzPolynomial) else np.asarray(P, dtype=np.complex128)
    n = coeffs.size - 1
    if gridsize < 4 * n + 1:
        raise ValueError(f"grid size must be at least 4n+1 = {4 * n + 1}")
    T = TrigPolynomial(coeffs.real, -coeffs.imag)
    t = 2 * np.pi * np.arange(gridsize) / gridsize
    return T, float(np.min(T(t)))


def _cluster(points: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage clusters of nearby points."""
    n = points.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def fejer_factorize(
    T: TrigPolynomial, circle_tol: float = 1e-6, cluster_tol: float = 1e-5
) -> np.ndarray:
    """Coefficients ``gamma_0 .. gamma_n`` with ``T(t) = |sum gamma_k e^{ikt}|^2``.

    Roots of the Laurent polynomial come in pairs ``rho, 1/conj(rho)``; one of
    each pair inside the disk is kept, and roots on the circle (which have even
    multiplicity) are split evenly.  Scaling matches the mean value ``cos_0``.
    """
    n = T.degree
    grid = 2 * np.pi * np.arange(max(16 * n, 16)) / max(16 * n, 16)
    tmin = float(np.min(T(grid)))
    if tmin < -1e-6:
        raise FejerError(f"trigonometric polynomial is negative somewhere (min {tmin:.3e})")
    if tmin < -1e-10:
        warnings.warn(f"trigonometric polynomial slightly negative on grid ({tmin:.3e})")
    gamma = np.zeros(n + 1, dtype=np.complex128)
    if T.cos[0] <= 0:
        return gamma
    tau = T.laurent()
    scale = np.max(np.abs(tau))
    d = n
    while d > 0 and abs(tau[n + d]) < TRIM_RTOL * scale:
        d -= 1
    if d == 0:
        gamma[0] = math.sqrt(T.cos[0])
        return gamma
    q = tau[n - d : n + d + 1]
    roots = find_roots(q)
    mods = np.abs(roots)
    on_circle = np.abs(mods - 1) <= circle_tol
    chosen = list(roots[~on_circle & (mods < 1)])
    ring = roots[on_circle]
    for group in _cluster(ring, cluster_tol):
        if len(group) % 2:
            raise FejerError(
                "ill-conditioned factorization: a root cluster on the circle has odd multiplicity"
            )
        centre = np.mean(ring[group])
        centre /= abs(centre)
        chosen.extend([centre] * (len(group) // 2))
    if len(chosen) != d:
        raise FejerError(f"selected {len(chosen)} roots for a degree-{d} factor")
    monic = poly_from_roots(chosen)
    lead = math.sqrt(T.cos[0] / np.sum(np.abs(monic) ** 2))
    gamma[: d + 1] = lead * monic
    return gamma


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InnerDeficiency:
    """Blaschke-part diagnostics of a bounded series ``H``.

    ``B0_root_estimate`` is ``prod |rho|`` over zeros certified (by Rouche)
    to lie in ``|z| < certified_radius``; ``near_circle_count`` counts
    truncation zeros within ``delta`` of the unit circle.
    """

    B0_root_estimate: float
    zero_count_inside: int
    modulus_estimate: float
    certified_radius: float
    near_circle_count: int
    unresolved_count: int
    truncation_warning: bool
    roots_inside: tuple[complex, ...] = ()


def _tail_bound(radius, degree: int):
    # |H| <= 1 gives sum |h_k|^2 <= 1; Cauchy-Schwarz on the tail past `degree`
    radius = np.asarray(radius, dtype=float)
    return radius ** (degree + 1) / np.sqrt(1 - radius**2)


def certified_radius(H: ComplexSeries, delta: float = 1e-3, radii: int = 400, samples: int = 512) -> float:
    """Largest grid radius ``rho <= 1 - delta`` on which ``|H_M| > tail bound``.

    On such a circle the truncation and any bounded function with these
    leading coefficients have the same number of zeros inside (Rouche).
    """
    M = H.degree
    t = 2 * np.pi * np.arange(max(samples, 8 * M)) / max(samples, 8 * M)
    circle = np.exp(1j * t)
    best = 0.0
    for rho in np.linspace(1 - delta, 0, radii, endpoint=False):
        if np.min(np.abs(H(rho * circle))) > _tail_bound(rho, M):
            best = float(rho)
            break
    return best


def inner_deficiency(H: ComplexSeries, delta: float = 1e-3, circle_samples: int = 4096) -> InnerDeficiency:
    if not np.any(H.coeffs):
        raise ValueError("inner_deficiency: H is identically zero")
    roots = find_roots(H.coeffs) if H.degree else np.zeros(0, dtype=np.complex128)
    mods = np.abs(roots)
    radius = certified_radius(H, delta)
    inside = roots[mods < radius]
    near = int(np.sum(np.abs(mods - 1) < delta))
    unresolved = int(np.sum((mods >= radius) & (mods < 1 - delta)))
    t = 2 * np.pi * np.arange(circle_samples) / circle_samples
    with np.errstate(divide="ignore"):
        mean_log = float(np.mean(np.log(np.abs(H(np.exp(1j * t))))))
    h0 = abs(H[0])
    modulus = h0 / math.exp(mean_log) if math.isfinite(mean_log) else math.inf
    warn = H.degree < 4 * near
    if warn:
        warnings.warn(
            f"truncation degree {H.degree} is small for {near} near-circle zeros",
            stacklevel=2,
        )
    return InnerDeficiency(
        B0_root_estimate=float(np.prod(np.abs(inside))) if inside.size else 1.0,
        zero_count_inside=int(inside.size),
        modulus_estimate=modulus,
        certified_radius=radius,
        near_circle_count=near,
        unresolved_count=unresolved,
        truncation_warning=warn,
        roots_inside=tuple(complex(r) for r in inside),
    )
