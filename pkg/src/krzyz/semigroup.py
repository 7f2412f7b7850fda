"""Additive semigroups deciding inductive index sets.

For ``K`` inside ``{1, ..., n-1}``, ``G(K)`` is the additive semigroup
generated by every positive integer outside ``K`` and other than ``n``.
An index set ``I`` of vanishing coefficients forces ``a_n = a_0 b_n``
exactly when ``n`` is not in ``G(I)``; the same test decides exponential
inductivity for vanishing exponent coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


@dataclass(frozen=True)
class SemigroupTable:
    """Membership of ``1..bound`` in a semigroup; ``member[0]`` is unused."""

    bound: int
    member: tuple[bool, ...]
    generators: tuple[int, ...]

    def __contains__(self, x: int) -> bool:
        return 1 <= x <= self.bound and self.member[x]

    @property
    def members(self) -> list[int]:
        return [x for x in range(1, self.bound + 1) if self.member[x]]


def closure(generators: Iterable[int], bound: int) -> SemigroupTable:
    """Additive closure of a generator set, restricted to ``1..bound``."""
    gens = sorted({g for g in generators if 1 <= g <= bound})
    gen_set = set(gens)
    member = [False] * (bound + 1)
    for x in range(1, bound + 1):
        if x in gen_set:
            member[x] = True
            continue
        # x is a sum of members iff x = g + y with g a generator and y a member
        member[x] = any(member[x - g] for g in gens if g < x)
    return SemigroupTable(bound, tuple(member), tuple(gens))


def _check_subset(K: Iterable[int], n: int) -> frozenset[int]:
    K = frozenset(int(k) for k in K)
    if n < 1:
        raise ValueError("n must be a positive integer")
    bad = sorted(k for k in K if not 1 <= k <= n - 1)
    if bad:
        raise ValueError(f"elements {bad} lie outside 1..{n - 1}")
    return K


def generate(K: Iterable[int], n: int, bound: int | None = None) -> SemigroupTable:
    """``G(K)``: the semigroup generated by the positive integers outside ``K`` and ``{n}``."""
    K = _check_subset(K, n)
    if bound is None:
        bound = n
    if bound < n:
        raise ValueError("bound must be at least n")
    gens = [x for x in range(1, bound + 1) if x not in K and x != n]
    return closure(gens, bound)


def is_inductive(I: Iterable[int], n: int) -> bool:
    """Sufficient criterion for ``I`` to be n-inductive: ``n`` not in ``G(I)``."""
    return n not in generate(I, n, n)


def is_exp_inductive(J: Iterable[int], n: int) -> bool:
    """Sufficient criterion for exponential n-inductivity; same test as :func:`is_inductive`."""
    return is_inductive(J, n)


def interval_semigroup(a: int, b: int, bound: int) -> SemigroupTable:
    """Semigroup generated by ``a..b``; equals the union of ``[l*a, l*b]`` over ``l >= 1``."""
    if a <= 1:
        raise ValueError("a must exceed 1 (a = 1 generates every positive integer)")
    if b < a:
        raise ValueError("need a <= b")
    member = [False] * (bound + 1)
    ell = 1
    while ell * a <= bound:
        for x in range(ell * a, min(ell * b, bound) + 1):
            member[x] = True
        ell += 1
    return SemigroupTable(bound, tuple(member), tuple(range(a, min(b, bound) + 1)))


def density(I: Iterable[int], n: int) -> Fraction:
    """Proportion of ``{1..n-1}`` occupied by ``I``."""
    I = _check_subset(I, n)
    if n < 2:
        raise ValueError("density needs n >= 2")
    return Fraction(len(I), n - 1)


def interval_example(a: int, b: int) -> tuple[int, frozenset[int]] | None:
    """For ``k*b + 2 == (k+1)*a`` with ``k > 1``: ``n = k*b + 1`` and the index set
    ``{1..n-1}`` minus ``G_{a,b}``.  Returns None when no such ``k`` exists."""
    for k in range(2, b + 2):
        if k * b + 2 == (k + 1) * a:
            n = k * b + 1
            G = interval_semigroup(a, b, n - 1)
            return n, frozenset(x for x in range(1, n) if x not in G)
    return None
