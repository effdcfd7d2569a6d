"""Vafa-Witten / log Gromov-Witten generating series of P^2 and BPS inversion.

Series are indexed by ``(r, c1)`` and carry the invariant of charge
``(r, c1, c2)`` on the exponent ``c2 - (r-1) c1^2 / (2r) - r/8`` (the
discriminant of the charge shifted by ``-r chi(P^2)/24``), which makes
``h_{r,c1} = h_{r,c1+r}`` an identity of q-series.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .numtheory import HurwitzTable, eta
from .qseries import QSeries, mul, pow_int
from .toricgeo import (
    ChernData,
    CurveClass,
    as_chern,
    contact_order,
    curve_class,
    fiber_class,
)

BUILTIN_RANKS = (1, 2)
SOURCES = ("builtin-rank1", "builtin-rank2", "external-rank3")


class MissingDataError(LookupError):
    """Raised when rank-3 coefficients (or BPS divisor data) are unavailable."""


def exponent_offset(r: int, c1: int) -> Fraction:
    return -Fraction((r - 1) * c1 * c1, 2 * r) - Fraction(r, 8)


def charge_exponent(gamma) -> Fraction:
    g = as_chern(gamma)
    return g.c2 + exponent_offset(g.r, g.c1)


def reduce_c1(r: int, c1: int) -> int:
    """Representative of ``c1`` in ``[0, r)``."""
    return c1 % r


def reduce_c1_nonpositive(r: int, c1: int) -> int:
    """Representative of ``c1`` in ``(-r, 0]``."""
    c = c1 % r
    return c - r if c else 0


def moduli_dim(gamma) -> int:
    return as_chern(gamma).dim_s


def sign(gamma) -> int:
    return as_chern(gamma).sign


@dataclass(frozen=True)
class SeriesSpec:
    r: int
    c1: int
    order: int
    source: Optional[str] = None

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("rank must be positive")
        if self.order <= 0:
            raise ValueError("order must be positive")
        src = self.source or ("external-rank3" if self.r == 3 else f"builtin-rank{self.r}")
        if src not in SOURCES:
            raise ValueError(f"unknown source {src!r}")
        if src.startswith("builtin") and self.r not in BUILTIN_RANKS:
            raise ValueError(f"builtin series exist only for r in {BUILTIN_RANKS}")
        if src == "external-rank3" and self.r != 3:
            raise ValueError("external data is rank 3")
        object.__setattr__(self, "source", src)

    @property
    def c1_reduced(self) -> int:
        return reduce_c1(self.r, self.c1)

    @property
    def leading_exponent(self) -> Fraction:
        return exponent_offset(self.r, self.c1_reduced)

    @property
    def cutoff(self) -> Fraction:
        return self.leading_exponent + self.order


# -- rank-3 data -----------------------------------------------------------


def parse_rank3(data: Mapping) -> Tuple[int, QSeries]:
    """Validate a decoded rank-3 data file; return ``(c1, f_{3,c1})``.

    The stored terms are exact and the series is taken to be known up to the
    optional ``cutoff`` field, or one integer step past the last term.
    """
    c1 = int(data["c1"])
    if c1 not in (0, 1, 2):
        raise ValueError("rank-3 c1 must be 0, 1 or 2")
    terms = [
        (Fraction(int(en), int(ed)), Fraction(int(cn), int(cd)))
        for en, ed, cn, cd in data["terms"]
    ]
    exps = [e for e, _ in terms]
    if any(b <= a for a, b in zip(exps, exps[1:])):
        raise ValueError("rank-3 exponents must be strictly increasing")
    if len({e % 1 for e in exps}) > 1:
        raise ValueError("rank-3 exponents must share one class mod 1")
    if "cutoff" in data:
        cutoff = Fraction(int(data["cutoff"][0]), int(data["cutoff"][1]))
    else:
        cutoff = (exps[-1] + 1) if exps else Fraction(0)
    return c1, QSeries(terms, cutoff)


def load_rank3(paths: Iterable[str]) -> Dict[int, QSeries]:
    out = {}
    for path in paths:
        with open(path) as fh:
            c1, f = parse_rank3(json.load(fh))
        out[c1] = f
    return out


def rank3_to_dict(c1: int, f: QSeries) -> dict:
    def pair(x):
        return [str(x.numerator), str(x.denominator)]

    return {
        "c1": c1,
        "cutoff": pair(f.cutoff),
        "terms": [pair(e) + pair(c) for e, c in f.terms()],
    }


# -- building blocks -------------------------------------------------------


@lru_cache(maxsize=None)
def _hurwitz_table(max_n: int) -> HurwitzTable:
    return HurwitzTable(max_n)


@lru_cache(maxsize=64)
def eta_power(k: int, cutoff: Fraction) -> QSeries:
    """``eta**k`` correct below ``cutoff``."""
    # inversion and powering lose at most |k|/24 + 1/12 of relative precision
    base = eta(cutoff + Fraction(abs(k), 24) + Fraction(1, 12) + 1)
    out = pow_int(base, k)
    return out.truncate(cutoff)


def f2(c1: int, order: int) -> QSeries:
    """``3 * sum_{n>=0} H(4n - c1) q^{n - c1/4}`` for ``n < order``."""
    if c1 not in (0, 1):
        raise ValueError("f2 is defined for c1 in {0, 1}")
    table = _hurwitz_table(max(4 * order, 0))
    shift = Fraction(c1, 4)
    return QSeries(
        ((n - shift, 3 * table[4 * n - c1]) for n in range(order)), order - shift
    )


def h_vw(spec: SeriesSpec, rank3: Optional[Mapping[int, QSeries]] = None) -> QSeries:
    """q-expansion of the Vafa-Witten series ``h_{r,c1}`` to ``spec.order`` steps."""
    r, c1 = spec.r, spec.c1_reduced
    target = spec.cutoff
    if r == 1:
        return eta_power(-3, target)
    if r == 2:
        # f2 val >= -1/4 and eta^-6 val = -1/4, so one extra step is ample
        f = f2(c1, spec.order + 1)
        return mul(f, eta_power(-6, target + 1)).truncate(target)
    if r == 3:
        if not rank3 or c1 not in rank3:
            raise MissingDataError("rank-3 coefficients not loaded")
        f = rank3[c1]
        v = f.valuation() if not f.is_zero() else f.cutoff
        h = mul(f, eta_power(-9, target - v + Fraction(9, 24) + 1))
        if h.cutoff < target:
            raise MissingDataError(
                f"rank-3 data for c1={c1} reaches only exponent {h.cutoff}, need {target}"
            )
        return h.truncate(target)
    raise ValueError(f"no series for rank {r}")


# -- invariants ------------------------------------------------------------


@dataclass(frozen=True)
class InvariantRecord:
    gamma: ChernData
    vw: Fraction
    gw: Fraction

    @property
    def v(self) -> Tuple[int, int]:
        return contact_order(self.gamma)

    def csv_row(self) -> list:
        g = self.gamma
        return [
            g.r, g.c1, g.c2, g.chi, g.dim_s, g.sign,
            self.vw.numerator, self.vw.denominator,
            self.gw.numerator, self.gw.denominator,
            *self.v,
        ]


CSV_HEADER = [
    "r", "c1", "c2", "chi", "dim_s", "sign",
    "vw_num", "vw_den", "gw_num", "gw_den", "v_x", "v_y",
]


def _c2_window(r: int, c1: int, lo: Fraction, hi: Fraction) -> range:
    """Integers c2 with ``lo <= charge exponent < hi``."""
    off = exponent_offset(r, c1)
    return range(math.ceil(lo - off), math.ceil(hi - off))


def extract_invariants(
    spec: SeriesSpec,
    c2_range: Iterable[int],
    rank3: Optional[Mapping[int, QSeries]] = None,
    series: Optional[QSeries] = None,
) -> List[InvariantRecord]:
    h = series if series is not None else h_vw(spec, rank3)
    out = []
    for c2 in c2_range:
        g = ChernData(spec.r, spec.c1, int(c2))
        e = charge_exponent(g)
        coef = h.coefficient(e)  # raises beyond the cutoff
        vw = g.sign * coef
        out.append(InvariantRecord(g, vw, g.sign * vw))
    return out


def vw_invariant(gamma, rank3: Optional[Mapping[int, QSeries]] = None) -> Fraction:
    g = as_chern(gamma)
    spec0 = SeriesSpec(g.r, g.c1, 1)
    e = charge_exponent(g)
    if e < spec0.leading_exponent:
        return Fraction(0)
    order = int(math.floor(e - spec0.leading_exponent)) + 1
    if rank3:
        h = h_vw(SeriesSpec(g.r, g.c1, order), rank3)
    else:
        h = _builtin_h_vw(g.r, spec0.c1_reduced, max(16, 1 << (order - 1).bit_length()))
    return g.sign * h.coefficient(e)


@lru_cache(maxsize=64)
def _builtin_h_vw(r: int, c1: int, order: int) -> QSeries:
    return h_vw(SeriesSpec(r, c1, order))


@dataclass(frozen=True)
class GwTerm:
    gamma: ChernData
    v: Tuple[int, int]
    beta: CurveClass
    gw: Fraction
    exponent: Fraction


def gw_terms(
    spec: SeriesSpec, rank3: Optional[Mapping[int, QSeries]] = None
) -> Tuple[List[GwTerm], Fraction]:
    """Log GW invariants ``GW_{v_gamma, beta_gamma}`` feeding ``h^GW_{r,c1}``.

    Every invariant is obtained from the VW invariant of the same charge via
    the sign ``(-1)^dim``; the charge is taken with ``-r < c1 <= 0``.
    """
    r = spec.r
    c1 = reduce_c1_nonpositive(r, spec.c1)
    vw_series = h_vw(SeriesSpec(r, c1, spec.order, spec.source), rank3)
    lo = spec.leading_exponent
    if not vw_series.is_zero():
        lo = min(lo, vw_series.valuation())
    window = _c2_window(r, c1, lo, vw_series.cutoff)
    records = extract_invariants(
        SeriesSpec(r, c1, spec.order, spec.source), window, series=vw_series
    )
    base = curve_class((r, c1, 0))
    fib = fiber_class()
    v0 = (r, r + 3 * c1)
    out = []
    for rec in records:
        g = rec.gamma
        v = contact_order(g)
        beta = curve_class(g)
        if v != v0:
            raise AssertionError(f"contact order of {g} depends on c2")
        if beta != base + g.c2 * fib:
            raise AssertionError(f"curve class of {g} is not beta_(r,c1,0) + c2 F")
        gw = g.sign * rec.vw
        out.append(GwTerm(g, v, beta, gw, charge_exponent(g)))
    return out, vw_series.cutoff


def h_gw(spec: SeriesSpec, rank3: Optional[Mapping[int, QSeries]] = None) -> QSeries:
    """Log GW generating series, assembled term by term from the correspondence."""
    terms, cutoff = gw_terms(spec, rank3)
    return QSeries(((t.exponent, t.gw) for t in terms), cutoff)


def gw_vector(r: int, order: int, indexing: str = "nonpositive", rank3=None) -> Dict[int, QSeries]:
    """``{c1: h^GW_{r,c1}}`` over ``(-r, 0]`` or ``[0, r)``."""
    if indexing == "nonpositive":
        c1s = range(-r + 1, 1)
    elif indexing == "nonnegative":
        c1s = range(0, r)
    else:
        raise ValueError("indexing must be 'nonpositive' or 'nonnegative'")
    return {c1: h_gw(SeriesSpec(r, c1, order), rank3) for c1 in c1s}


# -- BPS invariants --------------------------------------------------------

Triple = Tuple[int, int, Fraction]


def to_lattice(gamma) -> Triple:
    g = as_chern(gamma)
    return (g.r, g.c1, Fraction(g.c1 * g.c1, 2) - g.c2)


def from_lattice(t: Triple) -> ChernData:
    r, c1, ch2 = t
    c2 = Fraction(c1 * c1, 2) - Fraction(ch2)
    if c2.denominator != 1:
        raise ValueError(f"{t} is not the Chern character of an integral charge")
    return ChernData(r, c1, int(c2))


def _divide(t: Triple, k: int) -> Optional[Triple]:
    r, c1, ch2 = t
    if r % k or c1 % k:
        return None
    s = (r // k, c1 // k, Fraction(ch2) / k)
    if (Fraction(s[1] * s[1], 2) - s[2]).denominator != 1:
        return None
    return s


def divisors(t: Triple) -> List[Tuple[int, Triple]]:
    """``(k, t/k)`` for every ``k >= 1`` with ``t/k`` an integral charge."""
    r, c1, ch2 = t
    bound = max(abs(r), abs(c1), abs(2 * Fraction(ch2).numerator), 1)
    out = []
    for k in range(1, bound + 1):
        s = _divide(t, k)
        if s is not None:
            out.append((k, s))
    return out


def mobius(n: int) -> int:
    if n == 1:
        return 1
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    return -res if m > 1 else res


@dataclass
class BpsLattice:
    """Rational DT invariants keyed by Chern character ``(r, c1, ch2)``."""

    data: Dict[Triple, Fraction]

    @classmethod
    def from_charges(cls, values: Mapping) -> "BpsLattice":
        return cls({to_lattice(g): Fraction(x) for g, x in values.items()})


def _missing(data, keys) -> List[Triple]:
    return sorted({s for s in keys if s not in data}, key=lambda s: (s[0], s[1], s[2]))


def bps_invert(
    lattice: BpsLattice, queries: Optional[Iterable[Triple]] = None
) -> Dict[Triple, Fraction]:
    """``Omega_g = sum_{k | g} mu(k) / k^2 * Omegabar_{g/k}``."""
    data = lattice.data
    queries = list(data) if queries is None else [tuple(q) for q in queries]
    needed = [s for t in queries for _, s in divisors(t)]
    missing = _missing(data, needed)
    if missing:
        raise MissingDataError(f"missing divisor data for {missing}")
    out = {}
    for t in queries:
        out[t] = sum(
            (Fraction(mobius(k), k * k) * data[s] for k, s in divisors(t)), Fraction(0)
        )
    return out


def bps_forward(omega: Mapping[Triple, Fraction]) -> Dict[Triple, Fraction]:
    """Multiple cover sum ``Omegabar_g = sum_{k | g} Omega_{g/k} / k^2``."""
    out = {}
    for t in omega:
        needed = [s for _, s in divisors(t)]
        missing = _missing(omega, needed)
        if missing:
            raise MissingDataError(f"missing divisor data for {missing}")
        out[t] = sum((omega[s] / (k * k) for k, s in divisors(t)), Fraction(0))
    return out


def builtin_lattice(r: int, c1: int, c2max: int, c2min: int = 0) -> Tuple[BpsLattice, List[Triple]]:
    """VW data for ``(r, c1, c2)``, ``c2min <= c2 <= c2max``, closed under divisors."""
    if r not in BUILTIN_RANKS:
        raise ValueError(f"builtin data exists only for r in {BUILTIN_RANKS}")
    queries = [to_lattice((r, c1, c2)) for c2 in range(c2min, c2max + 1)]
    data = {}
    for t in queries:
        for _, s in divisors(t):
            if s not in data:
                data[s] = vw_invariant(from_lattice(s))
    return BpsLattice(data), queries


@dataclass(frozen=True)
class IntegralityProbe:
    gamma: ChernData
    omegabar: Fraction
    omega: Fraction

    @property
    def integral(self) -> bool:
        return self.omega.denominator == 1


def integrality_probe(r: int, c1: int, c2max: int, c2min: int = 0):
    """BPS invariants from builtin data plus a diagnostic if any is non-integral."""
    lattice, queries = builtin_lattice(r, c1, c2max, c2min)
    omega = bps_invert(lattice, queries)
    rows = [IntegralityProbe(from_lattice(t), lattice.data[t], omega[t]) for t in queries]
    bad = [p for p in rows if not p.integral]
    diagnostic = None
    if bad:
        diagnostic = (
            f"{len(bad)} non-integral BPS invariants, first at {bad[0].gamma.as_tuple()}; "
            "divisibility is taken in (r, c1, ch2) coordinates, which may not be the "
            "lattice the multiple cover formula intends"
        )
    return rows, diagnostic
