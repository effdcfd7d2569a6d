"""Fan of the toric model, blow-up data and the charge -> (contact order, class) map.

The toric surface has nine rays; three of them carry a (-1)-curve, and blowing
up one point on each of those makes the whole boundary a cycle of nine
(-2)-curves. A charge ``gamma = (r, c1, c2)`` determines a dimension vector
``(n1, n2, n3)``, a contact order ``v = (r, r + 3 c1)`` and a curve class
given by its intersection numbers with the nine boundary divisors together
with the multiplicities of the three exceptional curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

Vec = Tuple[int, int]

# counterclockwise, starting on the positive x-axis
RAYS: Tuple[Vec, ...] = (
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-2, 1),
    (-1, 0),
    (0, -1),
    (1, -2),
    (1, -1),
)

# rays carrying the blown-up points, in the order of E1, E2, E3
BLOWUP_RAYS: Tuple[Vec, Vec, Vec] = ((1, 1), (-2, 1), (1, -2))


class FanError(ValueError):
    pass


def det(u: Vec, w: Vec) -> int:
    return u[0] * w[1] - u[1] * w[0]


def _index(w: Vec) -> int:
    try:
        return RAYS.index(tuple(w))
    except ValueError:
        raise FanError(f"{w} is not a ray of the fan") from None


def neighbours(w: Vec) -> Tuple[Vec, Vec]:
    """(clockwise, counterclockwise) neighbours of ``w``."""
    i = _index(w)
    return RAYS[i - 1], RAYS[(i + 1) % len(RAYS)]


def self_intersection(w: Vec) -> int:
    """Self-intersection of the boundary divisor of ray ``w``.

    Uses ``w_prev + w_next = -s * w``.
    """
    prev, nxt = neighbours(w)
    sx, sy = prev[0] + nxt[0], prev[1] + nxt[1]
    w = tuple(w)
    # w is primitive so one of its coordinates is nonzero
    if w[0]:
        if sx % w[0]:
            raise FanError(f"malformed fan at {w}")
        k = sx // w[0]
    else:
        if sy % w[1]:
            raise FanError(f"malformed fan at {w}")
        k = sy // w[1]
    if (k * w[0], k * w[1]) != (sx, sy):
        raise FanError(f"malformed fan at {w}: neighbour sum not a multiple")
    return -k


def cones():
    """Two-dimensional cones as ``(w1, w2)``, ``w2`` the clockwise neighbour of ``w1``."""
    return [(RAYS[i], RAYS[i - 1]) for i in range(len(RAYS))]


def cone_decompose(v: Vec) -> Tuple[Vec, Vec, int, int]:
    """Write ``v = a*w1 + b*w2`` with ``w1, w2`` spanning a cone and ``a, b >= 0``."""
    v = (int(v[0]), int(v[1]))
    if v == (0, 0):
        w1, w2 = cones()[0]
        return w1, w2, 0, 0
    for w1, w2 in cones():
        # det(w2, w1) = 1 on a smooth fan, so Cramer's rule stays integral
        d = det(w2, w1)
        a_num, b_num = det(w2, v), det(v, w1)
        if a_num * d < 0 or b_num * d < 0:
            continue
        if a_num % d or b_num % d:
            raise FanError(f"non-integral cone decomposition of {v}")
        a, b = a_num // d, b_num // d
        # rays shared by two cones: keep the cone where v = a*w1
        if a == 0:
            continue
        return w1, w2, a, b
    raise FanError(f"no cone contains {v}")  # pragma: no cover - fan is complete


@dataclass(frozen=True)
class ChernData:
    r: int
    c1: int
    c2: int

    @property
    def chi(self) -> int:
        return self.r + self.c1 * (self.c1 + 3) // 2 - self.c2

    @property
    def nvec(self) -> Tuple[int, int, int]:
        return dimension_vector(self)

    @property
    def dim_s(self) -> int:
        r, c1 = self.r, self.c1
        return r * r + c1 * c1 + 3 * r * c1 - 2 * self.chi * r + 1

    @property
    def sign(self) -> int:
        return -1 if self.dim_s % 2 else 1

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.r, self.c1, self.c2)


def as_chern(gamma) -> ChernData:
    if isinstance(gamma, ChernData):
        return gamma
    return ChernData(*(int(x) for x in gamma))


def dimension_vector(gamma) -> Tuple[int, int, int]:
    g = as_chern(gamma)
    chi = g.chi
    return (-chi, g.r + g.c1 - chi, g.r + 2 * g.c1 - chi)


def contact_order(gamma) -> Vec:
    """``v = (r, r + 3 c1)``, cross-checked against tropical balancing."""
    g = as_chern(gamma)
    v = (g.r, g.r + 3 * g.c1)
    n = dimension_vector(g)
    bal = [0, 0]
    for ni, w in zip(n, BLOWUP_RAYS):
        bal[0] -= ni * w[0]
        bal[1] -= ni * w[1]
    if tuple(bal) != v:
        raise AssertionError(f"balancing gives {tuple(bal)}, formula gives {v}")
    return v


def toric_curve_class(gamma) -> Dict[Vec, int]:
    """Intersection numbers of the toric class with each boundary divisor."""
    g = as_chern(gamma)
    profile = {w: 0 for w in RAYS}
    for ni, w in zip(dimension_vector(g), BLOWUP_RAYS):
        profile[w] += ni
    w1, w2, a, b = cone_decompose(contact_order(g))
    profile[w1] += a
    profile[w2] += b
    if balance(profile) != (0, 0):
        raise FanError(f"profile for {g.as_tuple()} is not balanced")
    return profile


def balance(profile: Dict[Vec, int]) -> Vec:
    return (
        sum(m * w[0] for w, m in profile.items()),
        sum(m * w[1] for w, m in profile.items()),
    )


@dataclass(frozen=True)
class CurveClass:
    """Pullback of a toric class minus exceptional multiples."""

    profile: Tuple[Tuple[Vec, int], ...]
    exc: Tuple[int, int, int]

    @classmethod
    def build(cls, profile: Dict[Vec, int], exc) -> "CurveClass":
        return cls(tuple((w, int(profile.get(w, 0))) for w in RAYS), tuple(int(x) for x in exc))

    @property
    def profile_map(self) -> Dict[Vec, int]:
        return dict(self.profile)

    def __add__(self, other: "CurveClass") -> "CurveClass":
        p, q = self.profile_map, other.profile_map
        return CurveClass.build(
            {w: p[w] + q[w] for w in RAYS},
            tuple(x + y for x, y in zip(self.exc, other.exc)),
        )

    def __rmul__(self, k: int) -> "CurveClass":
        return CurveClass.build(
            {w: k * m for w, m in self.profile}, tuple(k * x for x in self.exc)
        )

    @classmethod
    def zero(cls) -> "CurveClass":
        return cls.build({}, (0, 0, 0))


def curve_class(gamma) -> CurveClass:
    g = as_chern(gamma)
    return CurveClass.build(toric_curve_class(g), dimension_vector(g))


def anticanonical_degree(c: CurveClass) -> int:
    return sum(m for _, m in c.profile) - sum(c.exc)


def fiber_class() -> CurveClass:
    return curve_class((0, 0, 1))


def correspondence_record(gamma) -> dict:
    """JSON-ready summary of everything attached to ``gamma``."""
    g = as_chern(gamma)
    v = contact_order(g)
    w1, w2, a, b = cone_decompose(v)
    cc = curve_class(g)
    return {
        "gamma": list(g.as_tuple()),
        "chi": g.chi,
        "nvec": list(dimension_vector(g)),
        "v": list(v),
        "cone": {"w1": list(w1), "w2": list(w2), "a": a, "b": b},
        "profile": {f"{w[0]},{w[1]}": m for w, m in cc.profile},
        "exc": list(cc.exc),
        "anticanonical_degree": anticanonical_degree(cc),
        "dim_s": g.dim_s,
        "sign": g.sign,
    }


def fan_table():
    return [(w, self_intersection(w)) for w in RAYS]
