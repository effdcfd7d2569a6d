from fractions import Fraction as F

import mpmath as mp
import pytest

from mockgw import mockverify as mv
from mockgw.genseries import f2
from mockgw.numtheory import ThetaSpec, eta, theta_qexp

from oracles import eta_direct


@pytest.fixture(autouse=True)
def _precision():
    mp.mp.dps = 34
    yield


def test_tau_point_validation():
    with pytest.raises(ValueError):
        mv.TauPoint(0.1, -0.2)
    p = mv.TauPoint(0.3, 0.9)
    assert p.to_list() == [0.3, 0.9]
    assert mv.TauPoint(0.1, 1) < mv.TauPoint(0.2, 1)


def test_eval_series_bound_is_honest():
    s = eta(40)
    tau = mp.mpc(0.1, 0.8)
    val, bound = mv.eval_series(s, tau)
    assert abs(val - eta_direct(tau)) <= bound + mp.mpf(10) ** -30


def test_eval_series_rejects_short_truncation():
    with pytest.raises(mv.TruncationTooShort):
        mv.eval_series(eta(3), mp.mpc(0, 0.3), tol=1e-20)


def test_theta_eval_matches_qexp():
    spec = ThetaSpec(F(1, 2), 2)
    tau = mp.mpc(0.2, 1.1)
    a = mv.theta_eval(spec, tau)
    b, _ = mv.eval_series(theta_qexp(spec, 40), tau)
    assert abs(a - b) < 1e-25


@pytest.mark.parametrize("mu", [0, F(1, 2)])
def test_backends_agree(mu):
    quad, gam = mv.eichler_backends(ThetaSpec(mu, 2), F(3, 2), mp.mpc(-0.3, 0.9))
    assert abs(quad - gam) < 1e-20


def test_backend_disagreement_raised():
    # check=True compares both backends; a sane input must not raise
    mv.eichler_depth1(ThetaSpec(0, 2), F(3, 2), mp.mpc(0.2, 1.0), check=True)


def test_constant_term_spot_value():
    val = mv.eichler_terms([(0, 1)], F(3, 2), mp.mpc(0, 1))
    assert abs(val - 1j * mp.sqrt(2)) < 1e-25


def test_completion_prefactor():
    spec = mv.f2_completion(0)
    expected = -3j / (4 * mp.sqrt(2) * mp.pi)
    assert abs(spec.prefactor_value() - expected) < 1e-30
    assert spec.shadow == ThetaSpec(0, 2)


def test_act_and_automorphy():
    tau = mp.mpc(0.3, 0.8)
    assert mv.act("T", tau) == tau + 1
    assert abs(mv.act("S", tau) * tau + 1) < 1e-30
    with pytest.raises(ValueError):
        mv.act("U", tau)


def test_eta_transformations_fit():
    e = mv.series_function(eta(61))
    rep = mv.fit_transformation(
        [e], "S", F(1, 2), mv.sample_points(4, 1), mv.sample_points(3, 2), truncation_order=60
    )
    assert rep.passed
    assert abs(rep.fitted_matrix[0][0] - mp.exp(-1j * mp.pi / 4)) < 1e-20
    rep = mv.fit_transformation(
        [e], "T", F(1, 2), mv.sample_points(4, 1, "T"), mv.sample_points(3, 2, "T")
    )
    assert abs(rep.fitted_matrix[0][0] - mp.exp(1j * mp.pi / 12)) < 1e-20


def test_fit_rejects_overlap_and_degenerate():
    e = mv.series_function(eta(40))
    pts = mv.sample_points(3, 4)
    with pytest.raises(ValueError):
        mv.fit_transformation([e], "S", F(1, 2), pts, pts[:1])
    with pytest.raises(mv.DegenerateSampleError):
        mv.fit_transformation([e, e], "S", F(1, 2), pts, mv.sample_points(2, 5))


def test_s_floor_enforced():
    e = mv.series_function(eta(40))
    low = [mv.TauPoint(0.0, 0.2)]
    with pytest.raises(ValueError):
        mv.fit_transformation([e], "S", F(1, 2), low, mv.sample_points(2, 5))


def test_sample_points_deterministic_and_in_band():
    a = mv.sample_points(8, 3)
    assert a == mv.sample_points(8, 3)
    for p in a:
        assert 0.7 <= p.im <= 1.3
        assert 0.8 <= abs(complex(p.re, p.im)) <= 1.25


def test_exact_t_phases():
    assert mv.exact_t_phases([f2(0, 5), f2(1, 5)]) == [0, F(3, 4)]


def test_report_json():
    e = mv.series_function(eta(40))
    rep = mv.fit_transformation([e], "T", F(1, 2), mv.sample_points(2, 1, "T"), mv.sample_points(2, 9, "T"))
    d = rep.to_dict()
    assert d["element"] == "T" and d["weight"] == "1/2"
    assert isinstance(rep.to_json(), str)


def test_depth2_reduces_to_depth1_with_constant_inner():
    f3 = f2(0, 20)
    specs = mv.f3_completion_terms(20)
    tau = mp.mpc(0.3, 1.1)
    v1 = mv.complete_depth2(f3, specs, tau, inner_override=1)
    ref = mv.eval_series(f3, tau)[0] + sum(
        s.prefactor_value() * mv.eichler_depth1(s.shadow, F(3, 2), tau) for s in specs
    )
    assert abs(v1 - ref) < 1e-20
    v0 = mv.complete_depth2(f3, specs, tau, inner_override=0)
    assert abs(v0 - mv.eval_series(f3, tau)[0]) < 1e-30
