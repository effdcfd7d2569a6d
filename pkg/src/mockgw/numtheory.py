"""Dedekind eta, Hurwitz class numbers and unary theta series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Tuple

from .qseries import QSeries

ETA_OFFSET = Fraction(1, 24)


def _pentagonal(bound: Fraction) -> Dict[int, int]:
    """Euler's pentagonal expansion of prod(1 - q^n), exponents < bound."""
    out = {0: 1}
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 >= bound:
            break
        sign = -1 if k % 2 else 1
        out[g1] = sign
        g2 = k * (3 * k + 1) // 2
        if g2 < bound:
            out[g2] = sign
        k += 1
    return out


def euler_product(cutoff, method: str = "pentagonal") -> QSeries:
    """``prod_{n>=1} (1 - q^n)`` below ``cutoff``."""
    cutoff = Fraction(cutoff)
    if method == "pentagonal":
        return QSeries(_pentagonal(cutoff).items(), cutoff)
    if method == "product":
        n_max = math.ceil(cutoff)
        coeffs = [0] * max(n_max, 1)
        coeffs[0] = 1
        for n in range(1, n_max):
            for m in range(n_max - 1, n - 1, -1):
                coeffs[m] -= coeffs[m - n]
        return QSeries(((m, c) for m, c in enumerate(coeffs)), cutoff)
    raise ValueError(f"unknown method {method!r}")


def eta(cutoff, method: str = "pentagonal") -> QSeries:
    """q-expansion of the Dedekind eta function, correct below ``cutoff``."""
    cutoff = Fraction(cutoff)
    if cutoff <= ETA_OFFSET:
        raise ValueError("eta cutoff must exceed 1/24")
    return euler_product(cutoff - ETA_OFFSET, method).shift(ETA_OFFSET)


# -- Hurwitz class numbers -------------------------------------------------


def _reduced_forms(N: int) -> Iterator[Tuple[int, int, int]]:
    """Reduced positive definite forms (a, b, c) with b^2 - 4ac = -N."""
    a = 1
    while 3 * a * a <= N:
        for b in range(-a + 1, a + 1):
            num = b * b + N
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            yield a, b, c
        a += 1


def _form_weight(a: int, b: int, c: int) -> Fraction:
    if a == b == c:
        return Fraction(1, 3)
    if b == 0 and a == c:
        return Fraction(1, 2)
    return Fraction(1)


def hurwitz(N: int) -> Fraction:
    """Hurwitz class number H(N), with H(0) = -1/12 and H(N) = 0 for N < 0."""
    if N < 0:
        return Fraction(0)
    if N == 0:
        return Fraction(-1, 12)
    if N % 4 in (1, 2):
        return Fraction(0)
    return sum((_form_weight(*f) for f in _reduced_forms(N)), Fraction(0))


class HurwitzTable:
    """H(0..max) filled once; ``table[N]`` looks values up (0 for N < 0)."""

    def __init__(self, max_n: int):
        if max_n < 0:
            raise ValueError("max must be nonnegative")
        self.max = max_n
        self.values = [hurwitz(n) for n in range(max_n + 1)]

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        if n > self.max:
            raise IndexError(f"H({n}) beyond table max {self.max}")
        return self.values[n]

    def rows(self):
        return enumerate(self.values)


# -- theta series ----------------------------------------------------------


@dataclass(frozen=True)
class ThetaSpec:
    """``sum_{n in Z + mu} q^{scale * n^2 / 2}``."""

    mu: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        object.__setattr__(self, "scale", Fraction(self.scale))
        if not 0 <= self.mu < 1:
            raise ValueError("theta shift mu must lie in [0, 1)")
        if self.scale <= 0:
            raise ValueError("theta scale must be positive")


def theta_terms(spec: ThetaSpec, bound) -> Iterator[Tuple[Fraction, int]]:
    """Yield ``(frequency, multiplicity)`` for frequencies <= bound, ascending."""
    bound = Fraction(bound)
    half = spec.scale / 2
    # n = j + mu for j in Z; |n| grows with |j - (-mu)|, so walk nonnegative and
    # negative branches in order of |n|
    pos = spec.mu  # smallest nonnegative n
    neg = spec.mu - 1  # largest negative n
    counts: Dict[Fraction, int] = {}
    while True:
        freq_p, freq_n = half * pos * pos, half * neg * neg
        lo = min(freq_p, freq_n)
        if lo > bound:
            break
        if freq_p <= freq_n:
            counts[freq_p] = counts.get(freq_p, 0) + 1
            pos += 1
        else:
            counts[freq_n] = counts.get(freq_n, 0) + 1
            neg -= 1
    yield from sorted(counts.items())


def theta_qexp(spec: ThetaSpec, cutoff) -> QSeries:
    cutoff = Fraction(cutoff)
    if cutoff <= 0:
        raise ValueError("theta cutoff must be positive")
    return QSeries(
        ((f, m) for f, m in theta_terms(spec, cutoff) if f < cutoff), cutoff
    )


__all__ = [
    "eta",
    "euler_product",
    "hurwitz",
    "HurwitzTable",
    "ThetaSpec",
    "theta_terms",
    "theta_qexp",
]
