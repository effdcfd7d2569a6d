import json
import random
from fractions import Fraction as F

import pytest

from mockgw import genseries as gs
from mockgw.numtheory import eta
from mockgw.qseries import QSeries, TruncationError
from mockgw.toricgeo import ChernData

from oracles import euler_product_power


def test_rank1_leading_coefficients():
    h = gs.h_vw(gs.SeriesSpec(1, 0, 6))
    assert h.valuation() == F(-1, 8)
    assert [h.coefficient(n - F(1, 8)) for n in range(6)] == [1, 3, 9, 22, 51, 108]


def test_rank1_against_convolution():
    h = gs.h_vw(gs.SeriesSpec(1, 0, 30))
    ref = euler_product_power(-3, 30)
    assert [h.coefficient(n - F(1, 8)) for n in range(30)] == ref


def test_rank1_is_independent_of_c1():
    assert gs.h_vw(gs.SeriesSpec(1, 5, 8)) == gs.h_vw(gs.SeriesSpec(1, 0, 8))


def test_f2_values():
    f0 = gs.f2(0, 5)
    assert list(f0.terms()) == [(0, F(-1, 4)), (1, F(3, 2)), (2, 3), (3, 4), (4, F(9, 2))]
    f1 = gs.f2(1, 4)
    assert list(f1.terms()) == [(F(3, 4), 1), (F(7, 4), 3), (F(11, 4), 3)]
    with pytest.raises(ValueError):
        gs.f2(2, 3)


def test_rank2_exponent_classes():
    h0 = gs.h_vw(gs.SeriesSpec(2, 0, 10))
    h1 = gs.h_vw(gs.SeriesSpec(2, 1, 10))
    assert {e % 1 for e in h0.exponents} == {F(3, 4)}
    assert {e % 1 for e in h1.exponents} == {F(1, 2)}
    assert h1.valuation() == F(1, 2)
    assert [h1.coefficient(F(1, 2) + n) for n in range(3)] == [1, 9, 48]


def test_rank2_product_identity():
    spec = gs.SeriesSpec(2, 0, 12)
    h = gs.h_vw(spec)
    e6 = eta(20) ** 6
    assert (h * e6).agrees_with(gs.f2(0, 20))


def test_exponent_convention():
    # h_{r,c1} = sum VW q^{c2 - (r-1) c1^2/(2r) - r/8}
    assert gs.exponent_offset(1, 0) == F(-1, 8)
    assert gs.exponent_offset(2, 1) == F(-1, 4) - F(1, 4)
    assert gs.charge_exponent((2, 1, 1)) == F(1, 2)


def test_periodicity_in_c1():
    for r in (1, 2):
        for c1 in range(-4, 5):
            a = gs.h_vw(gs.SeriesSpec(r, c1, 6))
            b = gs.h_vw(gs.SeriesSpec(r, c1 + r, 6))
            assert a == b


def test_spec_validation():
    with pytest.raises(ValueError):
        gs.SeriesSpec(0, 0, 5)
    with pytest.raises(ValueError):
        gs.SeriesSpec(3, 0, 5, "builtin-rank1")
    with pytest.raises(ValueError):
        gs.SeriesSpec(4, 0, 5)


def test_rank3_missing_data():
    with pytest.raises(gs.MissingDataError, match="rank-3 coefficients not loaded"):
        gs.h_vw(gs.SeriesSpec(3, 0, 4))


def test_rank3_ingest_round_trip(tmp_path):
    f = QSeries([(F(-1, 3), 1), (F(2, 3), F(5, 2))], F(11, 3))
    path = tmp_path / "r3.json"
    path.write_text(json.dumps(gs.rank3_to_dict(0, f)))
    data = gs.load_rank3([str(path)])
    assert data == {0: f}
    h = gs.h_vw(gs.SeriesSpec(3, 0, 2), data)
    assert h.valuation() == F(-1, 3) - F(9, 24)


def test_rank3_too_short(tmp_path):
    f = QSeries([(F(-1, 3), 1)], F(0))
    with pytest.raises(gs.MissingDataError):
        gs.h_vw(gs.SeriesSpec(3, 0, 10), {0: f})


def test_rank3_parse_validation():
    with pytest.raises(ValueError):
        gs.parse_rank3({"c1": 0, "terms": [["1", "3", "1", "1"], ["0", "1", "1", "1"]]})
    with pytest.raises(ValueError):
        gs.parse_rank3({"c1": 0, "terms": [["0", "1", "1", "1"], ["1", "2", "1", "1"]]})


def test_invariants_and_truncation():
    spec = gs.SeriesSpec(1, 0, 5)
    recs = gs.extract_invariants(spec, range(0, 3))
    assert [r.vw for r in recs] == [1, 3, 9]
    assert all(r.gw == r.gamma.sign * r.vw for r in recs)
    with pytest.raises(TruncationError):
        gs.extract_invariants(spec, range(0, 8))


@pytest.mark.parametrize("r,c1", [(1, 0), (2, 0), (2, 1), (2, -1)])
def test_gw_equals_vw(r, c1):
    spec = gs.SeriesSpec(r, c1, 15)
    assert gs.h_gw(spec) == gs.h_vw(spec)


def test_gw_vector_indexing():
    neg = gs.gw_vector(2, 6)
    pos = gs.gw_vector(2, 6, indexing="nonnegative")
    assert set(neg) == {-1, 0} and set(pos) == {0, 1}
    assert neg[-1] == pos[1]


def test_gw_terms_carry_contact_order_and_class():
    terms, _ = gs.gw_terms(gs.SeriesSpec(2, 1, 4))
    assert {t.v for t in terms} == {(2, -1)}
    assert all(t.gamma.c1 == -1 for t in terms)


# -- BPS -------------------------------------------------------------------


def test_mobius():
    assert [gs.mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_lattice_round_trip():
    for g in [(1, 0, 3), (2, -1, 4), (3, 2, 0)]:
        assert gs.from_lattice(gs.to_lattice(g)).as_tuple() == g


def test_divisors():
    t = gs.to_lattice((2, 0, 2))
    ks = [k for k, _ in gs.divisors(t)]
    assert ks == [1, 2]
    assert dict(gs.divisors(t))[2] == (1, 0, F(-1))


def _random_lattice(rng, size=25):
    omega = {}
    for _ in range(size):
        r = rng.randint(1, 6)
        c1 = rng.randint(-6, 6)
        c2 = rng.randint(0, 8)
        omega[gs.to_lattice((r, c1, c2))] = F(rng.randint(-20, 20), rng.randint(1, 3))
    # close under divisors
    for t in list(omega):
        for _, s in gs.divisors(t):
            omega.setdefault(s, F(rng.randint(-5, 5)))
    return omega


def test_bps_round_trip_random():
    rng = random.Random(7)
    for _ in range(20):
        omega = _random_lattice(rng)
        bar = gs.bps_forward(omega)
        assert gs.bps_invert(gs.BpsLattice(bar)) == omega


def test_bps_missing_divisor():
    lat = gs.BpsLattice({gs.to_lattice((2, 0, 2)): F(1)})
    with pytest.raises(gs.MissingDataError):
        gs.bps_invert(lat)


def test_integrality_probe_rank1():
    rows, diag = gs.integrality_probe(1, 0, 8)
    assert diag is None
    assert [p.omega for p in rows] == [p.omegabar for p in rows]
    assert all(isinstance(p.gamma, ChernData) for p in rows)
