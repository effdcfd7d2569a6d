"""Truncated formal q-series with exact rational exponents and coefficients.

A :class:`QSeries` stores finitely many terms ``c * q**e`` together with a
cutoff ``C``: the series is asserted correct for every exponent ``e < C``.
Exponents are arbitrary reduced fractions, so products of ``q**(1/24)``,
``q**(-1/8)`` and ``q**(3/4)`` mix freely.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Iterator, Tuple, Union

Number = Union[int, Fraction]

__all__ = [
    "QSeries",
    "TruncationError",
    "make",
    "add",
    "mul",
    "inv",
    "pow_int",
    "coefficient",
    "monomial",
    "one",
    "to_json",
    "from_json",
]


class TruncationError(ValueError):
    """Raised when a coefficient at or beyond the cutoff is requested."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not allowed in exact series")
    return Fraction(x)


class QSeries:
    """Immutable truncated series ``sum c_e q**e`` valid below ``cutoff``."""

    __slots__ = ("_exps", "_coeffs", "_cutoff")

    def __init__(self, terms: Iterable[Tuple[Number, Number]] = (), cutoff: Number = 0):
        cutoff = _frac(cutoff)
        data = {}
        for e, c in terms:
            e, c = _frac(e), _frac(c)
            if e in data:
                raise ValueError(f"duplicate exponent {e}")
            data[e] = c
        items = sorted((e, c) for e, c in data.items() if c != 0 and e < cutoff)
        self._exps = tuple(e for e, _ in items)
        self._coeffs = tuple(c for _, c in items)
        self._cutoff = cutoff

    @classmethod
    def _from_dict(cls, data: dict, cutoff: Fraction) -> "QSeries":
        # internal constructor: merges already-summed terms, no duplicate check
        obj = cls.__new__(cls)
        items = sorted((e, c) for e, c in data.items() if c != 0 and e < cutoff)
        obj._exps = tuple(e for e, _ in items)
        obj._coeffs = tuple(c for _, c in items)
        obj._cutoff = cutoff
        return obj

    # -- accessors -----------------------------------------------------------

    @property
    def cutoff(self) -> Fraction:
        return self._cutoff

    @property
    def exponents(self) -> Tuple[Fraction, ...]:
        return self._exps

    @property
    def coefficients(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    def terms(self) -> Iterator[Tuple[Fraction, Fraction]]:
        return zip(self._exps, self._coeffs)

    def is_zero(self) -> bool:
        return not self._exps

    def valuation(self) -> Fraction | None:
        """Smallest stored exponent, or ``None`` for the zero series."""
        return self._exps[0] if self._exps else None

    def __len__(self) -> int:
        return len(self._exps)

    def __iter__(self):
        return self.terms()

    def coefficient(self, e: Number) -> Fraction:
        e = _frac(e)
        if e >= self._cutoff:
            raise TruncationError(f"exponent {e} is beyond truncation (cutoff {self._cutoff})")
        lo, hi = 0, len(self._exps)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._exps[mid] < e:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self._exps) and self._exps[lo] == e:
            return self._coeffs[lo]
        return Fraction(0)

    __getitem__ = coefficient

    # -- transformations -----------------------------------------------------

    def truncate(self, cutoff: Number) -> "QSeries":
        cutoff = _frac(cutoff)
        if cutoff > self._cutoff:
            raise TruncationError(f"cannot extend cutoff {self._cutoff} to {cutoff}")
        return QSeries._from_dict(dict(self.terms()), cutoff)

    def shift(self, e: Number) -> "QSeries":
        """Multiply by ``q**e``."""
        e = _frac(e)
        return QSeries._from_dict({x + e: c for x, c in self.terms()}, self._cutoff + e)

    def scale(self, c: Number) -> "QSeries":
        c = _frac(c)
        return QSeries._from_dict({e: c * x for e, x in self.terms()}, self._cutoff)

    def __neg__(self) -> "QSeries":
        return self.scale(-1)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return add(self, -other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return mul(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QSeries":
        return pow_int(self, k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self._cutoff == other._cutoff
            and self._exps == other._exps
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self._exps, self._coeffs, self._cutoff))

    def agrees_with(self, other: "QSeries") -> bool:
        """Termwise equality below the smaller of the two cutoffs."""
        c = min(self._cutoff, other._cutoff)
        return self.truncate(c) == other.truncate(c)

    def __repr__(self) -> str:
        shown = " + ".join(f"({c})q^({e})" for e, c in list(self.terms())[:6])
        more = " + ..." if len(self) > 6 else ""
        return f"QSeries({shown or '0'}{more}, cutoff={self._cutoff})"


def make(terms: Iterable[Tuple[Number, Number]], cutoff: Number) -> QSeries:
    return QSeries(terms, cutoff)


def one(cutoff: Number) -> QSeries:
    return QSeries([(0, 1)], cutoff)


def monomial(e: Number, c: Number = 1, cutoff: Number | None = None) -> QSeries:
    e = _frac(e)
    return QSeries([(e, c)], e + 1 if cutoff is None else cutoff)


def add(a: QSeries, b: QSeries) -> QSeries:
    out = dict(a.terms())
    for e, c in b.terms():
        out[e] = out.get(e, 0) + c
    return QSeries._from_dict(out, min(a.cutoff, b.cutoff))


def mul(a: QSeries, b: QSeries) -> QSeries:
    # a zero series is O(q**cutoff), so its effective valuation is its cutoff
    va = a.valuation() if not a.is_zero() else a.cutoff
    vb = b.valuation() if not b.is_zero() else b.cutoff
    cutoff = min(a.cutoff + vb, b.cutoff + va)
    out: dict = {}
    bt = list(b.terms())
    for ea, xa in a.terms():
        for eb, xb in bt:
            e = ea + eb
            if e >= cutoff:
                break
            out[e] = out.get(e, 0) + xa * xb
    return QSeries._from_dict(out, cutoff)


def _monoid_below(gaps, bound: Fraction):
    """All finite sums of positive ``gaps`` strictly below ``bound`` (0 included)."""
    seen = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for s in frontier:
            for g in gaps:
                t = s + g
                if t < bound and t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(seen)


def inv(a: QSeries) -> QSeries:
    """Multiplicative inverse, valid to relative precision ``cutoff - val(a)``."""
    if a.is_zero():
        raise ZeroDivisionError("series is not invertible (zero series)")
    e0 = a.valuation()
    c0 = a.coefficients[0]
    rel = a.cutoff - e0
    gaps = [(e - e0, c) for e, c in a.terms()][1:]
    support = _monoid_below([g for g, _ in gaps], rel)
    # solve c0*b[s] + sum_g a_g b[s-g] = delta_{s,0} in increasing s
    b: dict = {}
    for s in support:
        acc = Fraction(1) if s == 0 else Fraction(0)
        for g, c in gaps:
            if g > s:
                break
            prev = b.get(s - g)
            if prev:
                acc -= c * prev
        b[s] = acc / c0
    return QSeries._from_dict({s - e0: c for s, c in b.items()}, rel - e0)


def pow_int(a: QSeries, k: int) -> QSeries:
    if k < 0:
        return pow_int(inv(a), -k)
    if k == 0:
        # cutoff of a**0 inherits the relative precision of a
        v = a.valuation()
        return one(a.cutoff - v if v is not None else a.cutoff)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def coefficient(a: QSeries, e: Number) -> Fraction:
    return a.coefficient(e)


# -- JSON ------------------------------------------------------------------


def _pair(x: Fraction):
    return [str(x.numerator), str(x.denominator)]


def to_dict(a: QSeries) -> dict:
    return {
        "cutoff": _pair(a.cutoff),
        "terms": [_pair(e) + _pair(c) for e, c in a.terms()],
    }


def from_dict(d: dict) -> QSeries:
    cutoff = Fraction(int(d["cutoff"][0]), int(d["cutoff"][1]))
    terms = [
        (Fraction(int(en), int(ed)), Fraction(int(cn), int(cd)))
        for en, ed, cn, cd in d["terms"]
    ]
    return QSeries(terms, cutoff)


def to_json(a: QSeries, **kwargs) -> str:
    return json.dumps(to_dict(a), **kwargs)


def from_json(text: str) -> QSeries:
    return from_dict(json.loads(text))
