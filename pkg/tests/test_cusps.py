import pytest

from conftest import P
from morsejets import in_ideal
from morsejets.cusps import (CuspPair, milnor2_normalize, cusp_form, cone_directions,
                             adapt_coordinates, exceptional_check, cusp_curves,
                             cusp_ideal_check, cusp_straighten, cusp_normalize,
                             cusp_equivalent, model_f, model_generators)
from morsejets.errors import NotMorse, NotInIdeal, NotEquivalent, NotExceptional
from morsejets.jet import DiffeoJet
from morsejets.moser import preserving_field, exp_diffeo

K = 7
F = "x**3+y**2+z**2"
G = "2*x**3+3*y**2+5*z**2"


def Q(expr, K=K, mode="exact"):
    return P(expr, 3, K, mode)


def pair(eps="0", K=K):
    return CuspPair.from_jets(Q(F, K), Q(G + "+" + eps, K))


def test_milnor2_identity():
    assert milnor2_normalize(Q(F)).equals(DiffeoJet.identity(3, K))


def test_milnor2_absorbs_cubic():
    f = Q(F + "+y**3")
    assert milnor2_normalize(f).pullback(f).equals(model_f(K))


def test_milnor2_general_coordinates():
    A = DiffeoJet([Q("x+y+z**2"), Q("-y+x*z"), Q("z+y+x**2")])
    f = A.pullback(Q(F))
    assert milnor2_normalize(f).pullback(f).equals(model_f(K))


def test_milnor2_rejects_quartic():
    with pytest.raises(NotMorse) as e:
        milnor2_normalize(Q("x**4+y**2+z**2"))
    assert e.value.witness["valuation"] == 4


@pytest.mark.parametrize("eps,expected", [("0", True), ("y**3", True),
                                          ("y**2*z+x**4*y", True), ("x**2*y", False),
                                          ("x*y**3", False)])
def test_exceptional(eps, expected):
    assert bool(exceptional_check(pair(eps))) is expected


def test_split_example_reports_directions():
    rep = exceptional_check(pair("x**2*y"))
    assert any("y-axis splits into two curves" in r for r in rep.reasons)
    dirs = [d["direction"] for d in rep.split_directions]
    assert ["2/3", "1", "0"] in dirs and ["0", "1", "0"] in dirs


def test_cone_directions_double():
    cone = cone_directions(pair("y**3"))
    assert all(c["double"] for c in cone)


def test_adapted_coordinates_remove_x_monomials():
    p = pair("y**2*z")
    c = {(0, 1): Q("1"), (1, 2): Q("x")}
    psi = exp_diffeo(preserving_field(model_f(K), c, K), K)
    q = CuspPair.from_jets(model_f(K), psi.pullback(p.g))
    assert not q.eps3.diff(0).is_zero()
    phi, a = adapt_coordinates(q)
    assert a.eps3.diff(0).is_zero()
    assert phi.pullback(model_f(K)).equals(model_f(K))
    rep = exceptional_check(q)
    assert rep.exceptional and rep.notes


def test_model_ideal_certificate():
    cert = cusp_ideal_check(pair())
    assert len(cert.model_in_tangency) == 3 and len(cert.tangency_in_model) == 3


def test_exceptional_ideal_certificate():
    cusp_ideal_check(pair("y**3"))


def test_split_pair_breaks_containment():
    with pytest.raises(NotInIdeal):
        cusp_ideal_check(pair("x**2*y"))


def test_curves_of_model_are_axes():
    for tc in cusp_curves(pair()):
        assert all(c.is_zero() for k, c in enumerate(tc.curve.components) if k != tc.axis)
    assert [tc.multiplicity for tc in cusp_curves(pair())] == [1, 2, 2]


def test_straighten_identity_when_straight():
    assert cusp_straighten(pair()).equals(DiffeoJet.identity(3, K))


def test_straighten_then_ideal():
    p = pair("y**2*z+x**4*y")
    phi = cusp_straighten(p)
    assert phi.pullback(p.f).equals(p.f)
    q = CuspPair.from_jets(p.f, phi.pullback(p.g))
    cusp_ideal_check(q)


def test_straighten_pushed_model():
    c = {(0, 1): Q("x*z+y"), (0, 2): Q("y**2+x"), (1, 2): Q("x**2+y*z+z")}
    psi = exp_diffeo(preserving_field(model_f(K), c, K), K)
    p = CuspPair.from_jets(model_f(K), psi.pullback(Q(G + "+y**3")))
    N = cusp_normalize(p.f, p.g)
    for tc in cusp_curves(N.pair):
        assert all(x.is_zero() for k, x in enumerate(tc.curve.components) if k != tc.axis)


def test_equivalent_round_trip():
    f, g = Q(F), Q(G + "+y**2*z+x**4*y")
    c = {(0, 1): Q("x*z+y"), (0, 2): Q("y**2+x"), (1, 2): Q("x**2+y*z+z")}
    psi = exp_diffeo(preserving_field(f, c, K), K)
    g1 = psi.pullback(g)
    phi = cusp_equivalent((f, g), (f, g1))
    assert phi.pullback(f).equals(f) and phi.pullback(g).equals(g1)


def test_equivalent_general_coordinates():
    f, g = Q(F), Q(G + "+y**2*z+x**4*y")
    A = DiffeoJet([Q("x+y+z**2"), Q("-y+x*z"), Q("z+y+x**2")])
    f1, g1 = A.pullback_many([f, g])
    phi = cusp_equivalent((f, g), (f1, g1))
    assert phi.pullback(f).equals(f1) and phi.pullback(g).equals(g1)


def test_equivalent_float_mode():
    f, g = Q(F, mode="float"), Q(G + "+y**2*z", mode="float")
    A = DiffeoJet([Q("x+y+z**2", mode="float"), Q("-y+x*z", mode="float"),
                   Q("z+y+x**2", mode="float")])
    f1, g1 = A.pullback_many([f, g])
    phi = cusp_equivalent((f, g), (f1, g1))
    assert phi.pullback(g).equals(g1)


def test_not_equivalent_coefficients():
    with pytest.raises(NotEquivalent) as e:
        cusp_equivalent((Q(F), Q(G)), (Q(F), Q("2*x**3+3*y**2+7*z**2")))
    assert e.value.witness["stage"] == "invariants"


@pytest.mark.parametrize("eps,axis,degree", [("x**5", "x", 5), ("y**4", "y", 4)])
def test_not_equivalent_restrictions(eps, axis, degree):
    with pytest.raises(NotEquivalent) as e:
        cusp_equivalent((Q(F), Q(G)), (Q(F), Q(G + "+" + eps)))
    w = e.value.witness
    assert (w["stage"], w["axis"], w["degree"]) == ("invariants", axis, degree)


def test_non_exceptional_rejected():
    with pytest.raises(NotExceptional):
        cusp_equivalent((Q(F), Q(G)), (Q(F), Q(G + "+x**2*y")))


def test_model_generators_span():
    f, g = Q(F), Q(G)
    from morsejets.tangency import tangency_generators
    hs = tangency_generators(f, g).generators()
    for m in model_generators(K):
        assert in_ideal(m, [h.truncate(K) for h in hs], K)
