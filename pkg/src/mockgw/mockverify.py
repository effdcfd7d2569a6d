"""Numerical evaluation, Eichler-integral completions and transformation fits.

All floating point work runs in mpmath at a configurable working precision.
Along the completion path ``v = -conj(tau) + i t`` the factor ``-i(v + tau)``
equals ``2 Im(tau) + t``, so every power is taken on the positive real axis
or, for a general start point, on the right half-plane where the principal
branch is continuous.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath as mp

from .numtheory import ThetaSpec, theta_terms
from .qseries import QSeries

DEFAULT_DPS = 34

# |tau| and Im(tau) window for S-transformation samples
S_BAND_ABS = (0.8, 1.25)
S_BAND_IM = (0.7, 1.3)


class NumericalError(RuntimeError):
    pass


class TruncationTooShort(NumericalError):
    """Tail bound of a truncated series exceeds the requested precision."""


class BackendDisagreement(NumericalError):
    pass


class DegenerateSampleError(NumericalError):
    pass


@dataclass(frozen=True, order=True)
class TauPoint:
    re: float
    im: float

    def __post_init__(self):
        if not self.im > 0:
            raise ValueError("tau must lie in the upper half-plane")

    @property
    def value(self):
        return mp.mpc(mp.mpf(self.re), mp.mpf(self.im))

    def s_floor(self) -> float:
        """``Im(-1/tau)``."""
        return self.im / (self.re ** 2 + self.im ** 2)

    def to_list(self):
        return [self.re, self.im]


def _as_mpc(tau):
    if isinstance(tau, TauPoint):
        return tau.value
    return mp.mpc(tau)


# -- series evaluation -----------------------------------------------------


@dataclass(frozen=True)
class GrowthEnvelope:
    """``|c| <= A * exp(B * sqrt(n))`` for the coefficient ``n`` steps past the leading one."""

    A: float
    B: float
    classes: int = 1

    @classmethod
    def calibrate(cls, s: QSeries, safety: float = 1.5) -> "GrowthEnvelope":
        if s.is_zero():
            return cls(0.0, 0.0)
        v = s.valuation()
        A = max(1.0, abs(float(s.coefficients[0])))
        B = 0.0
        for e, c in s.terms():
            n = float(e - v)
            if n >= 1 and c:
                B = max(B, (math.log(abs(float(c))) - math.log(A)) / math.sqrt(n))
        classes = len({e % 1 for e in s.exponents})
        return cls(A * safety, B * safety + 0.5, classes)

    def tail(self, start: float, x) -> mp.mpf:
        """Bound on ``sum_{n >= start} A exp(B sqrt n) x^n`` for ``0 <= x < 1``."""
        x = mp.mpf(x)
        if self.A == 0:
            return mp.mpf(0)
        n = max(int(math.ceil(start)), 0)
        total = mp.mpf(0)
        A, B = mp.mpf(self.A), mp.mpf(self.B)
        for _ in range(100000):
            t = A * mp.exp(B * mp.sqrt(n)) * x ** n
            ratio = mp.exp(B * (mp.sqrt(n + 1) - mp.sqrt(n))) * x
            if ratio < 1 and t * ratio / (1 - ratio) < total * mp.mpf(10) ** (-5):
                return (total + t / (1 - ratio)) * self.classes
            total += t
            n += 1
        raise TruncationTooShort("growth envelope tail does not converge at this tau")


def eval_series(
    s: QSeries,
    tau,
    tol: Optional[float] = None,
    envelope: Optional[GrowthEnvelope] = None,
):
    """``(value, tail_bound)`` of ``sum c q^e`` at ``q = exp(2 pi i tau)``."""
    t = _as_mpc(tau)
    two_pi_i = 2j * mp.pi
    total = mp.mpc(0)
    for e, c in s.terms():
        total += mp.mpf(c.numerator) / c.denominator * mp.exp(two_pi_i * t * mp.mpf(e.numerator) / e.denominator)
    env = envelope or GrowthEnvelope.calibrate(s)
    if s.is_zero():
        bound = mp.mpf(0)
    else:
        v = s.valuation()
        x = mp.exp(-2 * mp.pi * t.imag)
        start = float(s.cutoff - v)
        bound = env.tail(start, x) * x ** (mp.mpf(v.numerator) / v.denominator)
    if tol is not None and bound > tol:
        raise TruncationTooShort(
            f"tail bound {mp.nstr(bound, 5)} exceeds {tol}: increase truncation"
        )
    return total, bound


def series_function(s: QSeries, tol: Optional[float] = None) -> Callable:
    env = GrowthEnvelope.calibrate(s)
    return lambda tau: eval_series(s, tau, tol, env)[0]


# -- Eichler integrals -----------------------------------------------------


def _theta_list(shadow: ThetaSpec, im_start, eps) -> List[Tuple[mp.mpf, int]]:
    """Theta terms whose contribution exceeds ``eps`` for a start point of height ``im_start``."""
    nu_max = mp.log(1 / eps) / (2 * mp.pi * im_start) + 1
    return [
        (mp.mpf(f.numerator) / f.denominator, m)
        for f, m in theta_terms(shadow, Fraction(int(mp.ceil(nu_max))))
    ]


def theta_eval(shadow: ThetaSpec, v, eps=None):
    v = mp.mpc(v)
    eps = eps or mp.mpf(10) ** (-mp.mp.dps - 5)
    return sum(
        (m * mp.exp(2j * mp.pi * nu * v) for nu, m in _theta_list(shadow, v.imag, eps)),
        mp.mpc(0),
    )


def _eichler_gamma(terms, k, tau, w):
    """Termwise closed form through upper incomplete gamma functions."""
    A = -1j * (w + tau)
    total = mp.mpc(0)
    for nu, m in terms:
        if nu == 0:
            J = A ** (1 - k) / (k - 1)
        else:
            x = 2 * mp.pi * nu
            J = mp.exp(x * A) * x ** (k - 1) * mp.gammainc(1 - k, x * A)
        total += m * mp.exp(2j * mp.pi * nu * w) * J
    return 1j * total


def _eichler_quad(terms, k, tau, w, eps):
    """Adaptive Gauss-Legendre on ``v = w + i s``, constant term's tail in closed form."""
    A = -1j * (w + tau)
    m0 = sum(m for nu, m in terms if nu == 0)
    nu_min = min((nu for nu, _ in terms if nu > 0), default=mp.mpf(1))
    # beyond T the oscillating part is below eps
    T = max(mp.mpf(1), mp.log(1 / eps) / (2 * mp.pi * nu_min) - w.imag)

    def integrand(s):
        z = A + s
        if not z.real > 0:
            raise NumericalError("principal branch left the right half-plane")
        u = w + 1j * s
        th = sum((m * mp.exp(2j * mp.pi * nu * u) for nu, m in terms), mp.mpc(0))
        return th * z ** (-k)

    body = mp.quad(integrand, _doubling_nodes(T), method="gauss-legendre")
    tail = m0 * (A + T) ** (1 - k) / (k - 1)
    return 1j * (body + tail)


def _doubling_nodes(T):
    nodes = [mp.mpf(0)]
    step = mp.mpf(1) / 4
    while nodes[-1] + step < T:
        nodes.append(nodes[-1] + step)
        step *= 2
    nodes.append(T)
    return nodes


def _mpf(x):
    if isinstance(x, mp.mpf):
        return x
    x = Fraction(x)
    return mp.mpf(x.numerator) / x.denominator


def eichler_terms(terms, k, tau, w=None, tol: float = 1e-10, check: bool = True):
    """Eichler integral of ``sum m q^nu`` over explicit ``(nu, m)`` pairs.

    Returns the incomplete-gamma value; with ``check`` the adaptive quadrature
    is also run and the two must agree to ``tol`` (relative to max(1, |value|)).
    """
    tau = _as_mpc(tau)
    w = -mp.conj(tau) if w is None else mp.mpc(w)
    if not w.imag > 0:
        raise ValueError("integration start must lie in the upper half-plane")
    k = _mpf(k)
    terms = [(_mpf(nu), m) for nu, m in terms]
    ref = _eichler_gamma(terms, k, tau, w)
    if check:
        alt = _eichler_quad(terms, k, tau, w, mp.mpf(10) ** (-mp.mp.dps + 4))
        if abs(alt - ref) > tol * max(1, abs(ref)):
            raise BackendDisagreement(
                f"integral backends disagree at tau={mp.nstr(tau, 8)}: "
                f"|diff| = {mp.nstr(abs(alt - ref), 5)}"
            )
    return ref


def eichler_depth1(shadow: ThetaSpec, k, tau, w=None, tol: float = 1e-10, check: bool = True):
    """``int_w^{i inf} theta(v) (-i(v + tau))^{-k} dv``, default ``w = -conj(tau)``."""
    tau = _as_mpc(tau)
    w = -mp.conj(tau) if w is None else mp.mpc(w)
    if not w.imag > 0:
        raise ValueError("integration start must lie in the upper half-plane")
    terms = _theta_list(shadow, w.imag, mp.mpf(10) ** (-mp.mp.dps + 4))
    return eichler_terms(terms, k, tau, w, tol, check)


def eichler_backends(terms, k, tau, w=None):
    """``(quadrature, incomplete gamma)`` values, for diagnostics."""
    tau = _as_mpc(tau)
    w = -mp.conj(tau) if w is None else mp.mpc(w)
    k = _mpf(k)
    if isinstance(terms, ThetaSpec):
        terms = _theta_list(terms, w.imag, mp.mpf(10) ** (-mp.mp.dps + 4))
    terms = [(_mpf(nu), m) for nu, m in terms]
    return _eichler_quad(terms, k, tau, w, mp.mpf(10) ** (-mp.mp.dps + 4)), _eichler_gamma(terms, k, tau, w)


# -- completions -----------------------------------------------------------


@dataclass(frozen=True)
class CompletionSpec:
    """``f + prefactor * int theta(v) [inner] (-i(v+tau))^{-weight} dv``.

    ``prefactor`` may be a number or a zero-argument callable evaluated at
    the working precision. ``inner`` is ``(series, CompletionSpec)`` for the
    depth-one completion appearing inside a depth-two integrand.
    """

    weight: Fraction
    prefactor: object
    shadow: ThetaSpec
    inner: Optional[Tuple[QSeries, "CompletionSpec"]] = None

    def prefactor_value(self):
        p = self.prefactor
        return mp.mpc(p() if callable(p) else p)


def _f2_prefactor():
    return -3j / (4 * mp.sqrt(2) * mp.pi)


def _f3_prefactor():
    return -1j / mp.pi * mp.power(mp.mpf(3) / 2, mp.mpf(3) / 2)


def f2_completion(c1: int) -> CompletionSpec:
    """Completion data of the rank-2 Hurwitz series; shadow ``sum_{n in Z+c1/2} q^{n^2}``."""
    return CompletionSpec(Fraction(3, 2), _f2_prefactor, ThetaSpec(Fraction(c1, 2), 2))


def f3_completion_terms(order: int) -> List[CompletionSpec]:
    """The two integrals of the depth-two completion of ``f_{3,0}``."""
    from .genseries import f2

    return [
        CompletionSpec(
            Fraction(3, 2),
            _f3_prefactor,
            ThetaSpec(Fraction(j, 2), 6),
            inner=(f2(j, order), f2_completion(j)),
        )
        for j in (0, 1)
    ]


def complete_depth1(f: QSeries, spec: CompletionSpec, tau, tol: float = 1e-10, check: bool = True):
    tau = _as_mpc(tau)
    value = eval_series(f, tau)[0]
    p = spec.prefactor_value()
    if p == 0:
        return value
    return value + p * eichler_depth1(spec.shadow, spec.weight, tau, tol=tol, check=check)


def _depth2_integral(spec: CompletionSpec, tau, inner_override=None):
    """``int_{-conj tau}^{i inf} fhat_inner(tau; start v) theta(v) (-i(v+tau))^{-k} dv``."""
    k = _mpf(spec.weight)
    y = tau.imag
    w0 = -mp.conj(tau)
    eps = mp.mpf(10) ** (-mp.mp.dps + 4)
    outer = _theta_list(spec.shadow, y, eps)
    m0 = sum(m for nu, m in outer if nu == 0)

    if inner_override is not None:
        f_tau = mp.mpc(inner_override)
        inner = None
        inner_m0 = 0
        p2 = mp.mpc(0)
    else:
        series, ispec = spec.inner
        f_tau = eval_series(series, tau)[0]
        inner = ispec
        p2 = ispec.prefactor_value()
        inner_m0 = sum(m for f, m in theta_terms(ispec.shadow, 0) if f == 0)
    ki = k if inner is None else _mpf(inner.weight)

    def inner_value(v):
        if inner is None:
            return f_tau
        return f_tau + p2 * _eichler_gamma(_theta_list(inner.shadow, v.imag, eps), ki, tau, v)

    nu_min = min(
        [nu for nu, _ in outer if nu > 0]
        + ([mp.mpf(f.numerator) / f.denominator for f, _ in theta_terms(inner.shadow, 2) if f > 0] if inner else []),
        default=mp.mpf(1),
    )
    T = max(mp.mpf(1), mp.log(1 / eps) / (2 * mp.pi * nu_min) - y)

    def integrand(t):
        v = w0 + 1j * t
        z = 2 * y + t
        th = sum((m * mp.exp(2j * mp.pi * nu * v) for nu, m in outer), mp.mpc(0))
        if th == 0:
            return mp.mpc(0)
        return inner_value(v) * th * z ** (-k)

    body = mp.quad(integrand, _doubling_nodes(T), method="gauss-legendre")
    # past T only the constant parts survive:
    # m0 * [f(tau) + p2 * i * inner_m0 * (2y+t)^{1-ki}/(ki-1)] * (2y+t)^{-k}
    zT = 2 * y + T
    tail = m0 * f_tau * zT ** (1 - k) / (k - 1)
    if inner is not None and inner_m0:
        e = (1 - ki) - k
        tail += m0 * p2 * 1j * inner_m0 / (ki - 1) * (-(zT ** (e + 1)) / (e + 1))
    return 1j * (body + tail)


def complete_depth2(
    f3: QSeries,
    specs: Sequence[CompletionSpec],
    tau,
    inner_override=None,
):
    """Depth-two completion ``f3 + sum_j prefactor_j * int fhat_j(tau; v) theta_j(v) ...``.

    ``inner_override`` replaces every inner completion by a constant, which
    reduces each integral to a depth-one Eichler integral.
    """
    if f3 is None:
        from .genseries import MissingDataError

        raise MissingDataError("rank-3 coefficients not loaded")
    tau = _as_mpc(tau)
    value = eval_series(f3, tau)[0]
    for spec in specs:
        value += spec.prefactor_value() * _depth2_integral(spec, tau, inner_override)
    return value


# -- transformation fits ---------------------------------------------------


@dataclass
class TransformReport:
    element: str
    weight: Fraction
    fit_points: List[TauPoint]
    holdout_points: List[TauPoint]
    fitted_matrix: list
    fit_residual: float
    holdout_residual: float
    truncation_order: int
    tolerance: float
    precision: int = DEFAULT_DPS
    labels: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.holdout_residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "weight": str(self.weight),
            "labels": self.labels,
            "matrix": [[[float(mp.re(x)), float(mp.im(x))] for x in row] for row in self.fitted_matrix],
            "fit_residual": self.fit_residual,
            "holdout_residual": self.holdout_residual,
            "fit_points": [p.to_list() for p in self.fit_points],
            "holdout_points": [p.to_list() for p in self.holdout_points],
            "truncation_order": self.truncation_order,
            "precision": self.precision,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def act(element: str, tau):
    if element == "S":
        return -1 / tau
    if element == "T":
        return tau + 1
    raise ValueError(f"unknown element {element!r}")


def automorphy(element: str, tau, k):
    if element == "S":
        return mp.power(tau, k)
    return mp.mpc(1)


def _residual(components, element, k, M, points):
    num = mp.mpf(0)
    den = mp.mpf(0)
    d = len(components)
    for p in points:
        t = p.value
        F = [c(t) for c in components]
        G = [c(act(element, t)) for c in components]
        fac = automorphy(element, t, k)
        for i in range(d):
            pred = fac * sum(M[i][j] * F[j] for j in range(d))
            num = max(num, abs(G[i] - pred))
            den = max(den, abs(G[i]))
    return float(num / den) if den else float(num)


def fit_transformation(
    components: Sequence[Callable],
    element: str,
    weight,
    fit_points: Sequence[TauPoint],
    holdout_points: Sequence[TauPoint],
    tolerance: float = 1e-6,
    truncation_order: int = 0,
    s_floor: float = 0.3,
    labels: Optional[List[str]] = None,
) -> TransformReport:
    """Least-squares constant matrix ``M`` with ``F(g tau) = j(g, tau)^k M F(tau)``."""
    d = len(components)
    fit_points = sorted(fit_points)
    holdout_points = sorted(holdout_points)
    if len(fit_points) < d:
        raise DegenerateSampleError("need at least as many fit points as components")
    if set(fit_points) & set(holdout_points):
        raise ValueError("fit and holdout points must be disjoint")
    if element == "S":
        # both tau and -1/tau are evaluated from q-expansions
        low = [p for p in list(fit_points) + list(holdout_points) if min(p.im, p.s_floor()) < s_floor]
        if low:
            raise ValueError(f"points below the S floor {s_floor}: {low}")
    k = _mpf(weight)
    n = len(fit_points)
    A = mp.matrix(n, d)
    B = mp.matrix(n, d)
    for r, p in enumerate(fit_points):
        t = p.value
        fac = automorphy(element, t, k)
        gt = act(element, t)
        for j, c in enumerate(components):
            A[r, j] = c(t)
            B[r, j] = c(gt) / fac
    sv = mp.svd_c(A, compute_uv=False)
    smax = max(abs(x) for x in sv)
    smin = min(abs(x) for x in sv)
    if smax == 0 or smin / smax < mp.mpf(10) ** (-mp.mp.dps // 2):
        raise DegenerateSampleError("degenerate sample set")
    Mt = []
    for i in range(d):
        x, _ = mp.qr_solve(A, B.column(i))
        Mt.append([x[j] for j in range(d)])
    M = Mt  # row i gives G_i = fac * sum_j M[i][j] F_j
    return TransformReport(
        element=element,
        weight=Fraction(weight),
        fit_points=list(fit_points),
        holdout_points=list(holdout_points),
        fitted_matrix=M,
        fit_residual=_residual(components, element, k, M, fit_points),
        holdout_residual=_residual(components, element, k, M, holdout_points),
        truncation_order=truncation_order,
        tolerance=tolerance,
        precision=mp.mp.dps,
        labels=labels or [],
    )


def exact_t_phases(series: Sequence[QSeries]) -> List[Fraction]:
    """Exponent class mod 1 of each series; raises if a series mixes classes."""
    out = []
    for s in series:
        classes = {e % 1 for e in s.exponents}
        if len(classes) != 1:
            raise ValueError(f"series exponents span classes {sorted(classes)}")
        out.append(classes.pop())
    return out


def sample_points(n: int, seed: int, element: str = "S") -> List[TauPoint]:
    """Deterministic sample of ``n`` points; S samples lie in the S band."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        if element == "S":
            im = rng.uniform(*S_BAND_IM)
            lo, hi = S_BAND_ABS
            rmax = math.sqrt(max(hi * hi - im * im, 0.0))
            rmin = math.sqrt(max(lo * lo - im * im, 0.0))
            if rmin > rmax:
                continue
            re = rng.choice((-1, 1)) * rng.uniform(rmin, rmax)
        else:
            im = rng.uniform(*S_BAND_IM)
            re = rng.uniform(-0.5, 0.5)
        p = TauPoint(round(re, 6), round(im, 6))
        if p not in out:
            out.append(p)
    return out


def matrix_distance(M1, M2) -> float:
    return float(max(abs(a - b) for r1, r2 in zip(M1, M2) for a, b in zip(r1, r2)))


def stability_check(
    components: Sequence[Callable],
    element: str,
    weight,
    sample_sets: Sequence[Tuple[Sequence[TauPoint], Sequence[TauPoint]]],
    tolerance: float = 1e-6,
    truncation_order: int = 0,
    labels=None,
):
    """Fit on each ``(fit, holdout)`` pair; return reports and max pairwise matrix distance."""
    reports = [
        fit_transformation(components, element, weight, fit, hold, tolerance, truncation_order, labels=labels)
        for fit, hold in sample_sets
    ]
    spread = 0.0
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            spread = max(spread, matrix_distance(reports[i].fitted_matrix, reports[j].fitted_matrix))
    return reports, spread
