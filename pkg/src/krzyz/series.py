"""Truncated complex power series.

A :class:`ComplexSeries` holds the coefficients ``c_0 .. c_M`` of a power
series cut off at degree ``M``.  Every operation here is closed in degree:
the result is truncated to the degree bound of its inputs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

MonomialMap = dict[tuple[int, ...], float]

MAX_STRUCTURAL_DEGREE = 8


@dataclass(frozen=True, eq=False)
class ComplexSeries:
    """Coefficients ``c_0 .. c_M`` of a truncated power series."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size == 0:
            raise ValueError("a series needs at least the constant coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, degree: int) -> ComplexSeries:
        return cls(np.zeros(degree + 1, dtype=np.complex128))

    @classmethod
    def monomial(cls, k: int, degree: int, value: complex = 1.0) -> ComplexSeries:
        c = np.zeros(degree + 1, dtype=np.complex128)
        if k <= degree:
            c[k] = value
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self) -> str:
        return f"ComplexSeries(degree={self.degree}, coeffs={self.coeffs!r})"

    def __neg__(self) -> ComplexSeries:
        return ComplexSeries(-self.coeffs)

    def __add__(self, other) -> ComplexSeries:
        if isinstance(other, ComplexSeries):
            _check_degrees(self, other)
            return ComplexSeries(self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += other
        return ComplexSeries(c)

    __radd__ = __add__

    def __sub__(self, other) -> ComplexSeries:
        return self + (-other)

    def __rsub__(self, other) -> ComplexSeries:
        return (-self) + other

    def __mul__(self, other) -> ComplexSeries:
        if isinstance(other, ComplexSeries):
            return mul_series(self, other)
        return ComplexSeries(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> ComplexSeries:
        if isinstance(other, ComplexSeries):
            return div_series(self, other)
        return ComplexSeries(self.coeffs / other)

    def resized(self, degree: int) -> ComplexSeries:
        """Truncate or zero-pad to a new degree bound."""
        c = np.zeros(degree + 1, dtype=np.complex128)
        m = min(degree, self.degree) + 1
        c[:m] = self.coeffs[:m]
        return ComplexSeries(c)

    def __call__(self, z):
        """Evaluate the truncated series (a polynomial) at ``z``."""
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def allclose(self, other: ComplexSeries, atol: float = 1e-10) -> bool:
        return self.degree == other.degree and bool(
            np.all(np.abs(self.coeffs - other.coeffs) <= atol)
        )


def _check_degrees(a: ComplexSeries, b: ComplexSeries) -> None:
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} != {b.degree}")


def exp_series(b: ComplexSeries) -> ComplexSeries:
    """Coefficients of ``exp(g)`` from those of ``g``.

    Uses the Leibniz recursion ``a_n = sum_{j=1}^n (j/n) a_{n-j} b_j`` with
    ``a_0 = exp(b_0)``, so ``a_n`` depends only on ``b_0 .. b_n``.
    """
    bc = b.coeffs
    M = b.degree
    a = np.empty(M + 1, dtype=np.complex128)
    a[0] = np.exp(bc[0])
    jb = np.arange(1, M + 1) * bc[1:]
    for n in range(1, M + 1):
        a[n] = jb[:n] @ a[n - 1 :: -1] / n
    return ComplexSeries(a)


def log_series(a: ComplexSeries) -> ComplexSeries:
    """Inverse of :func:`exp_series`; ``b_0`` is the principal logarithm of ``a_0``."""
    ac = a.coeffs
    if ac[0] == 0:
        raise ValueError("log_series: constant coefficient is zero")
    M = a.degree
    b = np.empty(M + 1, dtype=np.complex128)
    b[0] = np.log(ac[0])
    jb = np.zeros(M + 1, dtype=np.complex128)
    for n in range(1, M + 1):
        s = jb[1:n] @ ac[n - 1 : 0 : -1] / n if n > 1 else 0.0
        b[n] = (ac[n] - s) / ac[0]
        jb[n] = n * b[n]
    return ComplexSeries(b)


def mul_series(a: ComplexSeries, b: ComplexSeries) -> ComplexSeries:
    """Cauchy product truncated at the common degree."""
    _check_degrees(a, b)
    return ComplexSeries(np.convolve(a.coeffs, b.coeffs)[: a.degree + 1])


def div_series(a: ComplexSeries, b: ComplexSeries) -> ComplexSeries:
    """Quotient ``a / b``; requires ``b_0 != 0``."""
    _check_degrees(a, b)
    ac, bc = a.coeffs, b.coeffs
    if bc[0] == 0:
        raise ValueError("div_series: divisor has zero constant coefficient")
    M = a.degree
    q = np.empty(M + 1, dtype=np.complex128)
    for n in range(M + 1):
        s = bc[1 : n + 1] @ q[n - 1 :: -1] if n else 0.0
        q[n] = (ac[n] - s) / bc[0]
    return ComplexSeries(q)


def wiener_transform(f: ComplexSeries, n: int) -> ComplexSeries:
    """Average of ``f`` over rotations by the n-th roots of unity.

    Computed by index selection: coefficients with index divisible by ``n``
    are kept, all others are set to exactly zero.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    c = np.zeros_like(f.coeffs)
    c[::n] = f.coeffs[::n]
    return ComplexSeries(c)


def compress(f: ComplexSeries, n: int) -> ComplexSeries:
    """Series ``H`` with ``H_k = f_{nk}``, of degree ``floor(M / n)``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return ComplexSeries(f.coeffs[::n])


def expand(h: ComplexSeries, n: int, degree: int | None = None) -> ComplexSeries:
    """Substitute ``z**n`` for ``z``; inverse of :func:`compress` on its image."""
    if degree is None:
        degree = h.degree * n
    c = np.zeros(degree + 1, dtype=np.complex128)
    m = min(h.degree, degree // n) + 1
    c[: n * (m - 1) + 1 : n] = h.coeffs[:m]
    return ComplexSeries(c)


# ---------------------------------------------------------------------------
# Structural polynomials P_n (a_n / a_0 in terms of b) and Q_n (b_n in terms of a)


def _times_variable(poly: Mapping[tuple[int, ...], Fraction], index: int, scale: Fraction):
    out = {}
    for key, c in poly.items():
        out[tuple(sorted(key + (index,)))] = c * scale
    return out


def _accumulate(target: defaultdict, poly: Mapping[tuple[int, ...], Fraction]) -> None:
    for key, c in poly.items():
        target[key] += c


def _structural_exact(n: int, kind: str) -> dict[tuple[int, ...], Fraction]:
    # kind "P": P_n = b_n + sum_k (n-k)/n P_k b_{n-k}
    # kind "Q" (a_0 = 1): Q_n = a_n - sum_j (j/n) Q_j a_{n-j}
    polys: list[dict[tuple[int, ...], Fraction]] = [{}]
    for m in range(1, n + 1):
        acc: defaultdict = defaultdict(Fraction)
        acc[(m,)] += Fraction(1)
        for k in range(1, m):
            if kind == "P":
                term = _times_variable(polys[k], m - k, Fraction(m - k, m))
            else:
                term = _times_variable(polys[k], m - k, Fraction(-k, m))
            _accumulate(acc, term)
        polys.append({key: c for key, c in acc.items() if c != 0})
    return polys[n]


def structural_polynomial(n: int, kind: str = "P", a0: float = 1.0) -> MonomialMap:
    """Monomial expansion of ``P_n`` or ``Q_n``.

    ``kind="P"`` gives ``a_n / a_0`` as a polynomial in ``b_1 .. b_n``.
    ``kind="Q"`` gives ``b_n`` as a polynomial in ``a_1 .. a_n`` for a fixed
    positive constant term ``a0``; a monomial with ``m`` factors carries
    ``a0**-m``.  Keys are non-decreasing index tuples summing to ``n``.
    """
    if kind not in ("P", "Q"):
        raise ValueError("kind must be 'P' or 'Q'")
    if not 1 <= n <= MAX_STRUCTURAL_DEGREE:
        raise ValueError(f"structural_polynomial supports 1 <= n <= {MAX_STRUCTURAL_DEGREE}")
    if kind == "Q" and not a0 > 0:
        raise ValueError("a0 must be positive")
    exact = _structural_exact(n, kind)
    if kind == "P":
        return {key: float(c) for key, c in exact.items()}
    return {key: float(c) * a0 ** (-len(key)) for key, c in exact.items()}


def evaluate_monomials(poly: Mapping[tuple[int, ...], float], values: Iterable[complex]) -> complex:
    """Evaluate a monomial map at ``values[i-1]`` for variable index ``i``."""
    v = list(values)
    total = 0j
    for key, c in poly.items():
        term = complex(c)
        for i in key:
            term *= v[i - 1]
        total += term
    return total
