from fractions import Fraction

import pytest

from conftest import P, random_diffeo
from morsejets import coeff as C
from morsejets.classify import (r_invariants, r_equivalent, involution, holonomy_composite,
                                f_invariant, f_equivalent, sigma_curves, sigma_multiplicity,
                                a_equivalent, q_normal_form, cone_restriction_form,
                                fold_normalize)
from morsejets.errors import (NotEquivalent, NotGeneric, NotQGeneric, NotAFold,
                              FieldExtensionRequired)
from morsejets.jet import Jet, DiffeoJet, CurveJet, compose

F2 = "x**2+y**2"
G2 = "x**2+4*y**2+x**3-y**3/2"


def test_r_invariants_quadratic():
    inv = r_invariants(P("x**2+y**2+z**2", 3), P("x**2+2*y**2+3*z**2", 3))
    for rec, lam in zip(inv.records, (1, 2, 3)):
        assert rec.lam == lam
        assert rec.v.equals(P("x**2", 1) * lam)


def test_r_invariants_cubic():
    inv = r_invariants(P(F2), P(G2))
    assert [r.v.coeff((3,)) for r in inv.records] == [1, Fraction(1, 2)]


def test_r_invariants_round_trip(rng):
    f, g = P(F2), P(G2)
    psi = random_diffeo(rng, 2, 8)
    assert r_invariants(f, g) == r_invariants(*psi.pullback_many([f, g]))


def test_r_equivalent_round_trip(rng):
    f, g = P(F2), P(G2)
    psi = random_diffeo(rng, 2, 8)
    f1, g1 = psi.pullback_many([f, g])
    phi = r_equivalent((f, g), (f1, g1))
    assert phi.pullback(f).equals(f1) and phi.pullback(g).equals(g1)


def test_r_equivalent_different_lambdas():
    with pytest.raises(NotEquivalent):
        r_equivalent((P(F2), P(G2)), (P(F2), P("x**2+3*y**2+x**3-y**3/2")))


def test_r_equivalent_different_alpha():
    with pytest.raises(NotEquivalent) as e:
        r_equivalent((P(F2), P(G2)), (P(F2), P("x**2+4*y**2+x**3-y**3/3")))
    assert e.value.witness


def test_involution_quadratic():
    assert involution(P("x**2", 1)).equals(P("-x", 1))


def test_involution_cubic():
    f = P("x**2+x**3", 1)
    i = involution(f)
    assert i.coeff((1,)) == -1 and i.coeff((2,)) == -1
    assert compose(f, [i]).equals(f)
    assert compose(i, [i]).equals(P("x", 1))


def test_involution_rejects_cube():
    with pytest.raises(NotGeneric):
        involution(P("x**3", 1))


def test_holonomy_linear_part_float():
    phi = holonomy_composite(P(F2, mode="float"), P("x**2+2*y**2", mode="float"), 1)
    assert abs(phi.coeff((1,)) ** 2 - 0.5) < 1e-12


def test_holonomy_needs_extension_in_exact_mode():
    with pytest.raises(FieldExtensionRequired):
        holonomy_composite(P(F2), P("x**2+2*y**2"), 1)


def test_holonomy_reconstruction():
    f, g = P(F2), P("x**2+4*y**2+x**3")
    phi = holonomy_composite(f, g, 1)
    assert phi.coeff((1,)) ** 2 == Fraction(1, 4)
    vj, vn = P("x**2+x**3", 1), P("4*x**2", 1)
    assert compose(vn, [phi]).equals(vj)


def test_f_equivalent_identity():
    p = (P(F2), P(G2))
    assert f_equivalent(p, p).equals(P("x", 1).truncate(7))


def test_f_equivalent_round_trip(rng):
    f, g = P(F2), P(G2)
    psi = random_diffeo(rng, 2, 8)
    f_equivalent((f, g), tuple(psi.pullback_many([f, g])))


def test_f_equivalent_ratio_mismatch():
    with pytest.raises(NotEquivalent):
        f_equivalent((P(F2), P(G2)), (P(F2), P("x**2+9*y**2+x**3-y**3/2")))


def test_f_invariant_is_formal():
    inv = f_invariant(P(F2), P(G2))
    assert inv.order == 7 and "formal" in inv.to_dict()["note"]


def test_sigma_curves_quadratic():
    cs = sigma_curves(P(F2), P("x**2+2*y**2"))
    assert [c.multiplicity for c in cs] == [2, 2]
    assert cs[0].curve.components[1].equals(P("x**2", 1))
    assert cs[1].curve.components[1].equals(P("2*x**2", 1))


def test_sigma_curves_cubic():
    cs = sigma_curves(P(F2), P(G2))
    assert cs[0].curve.components[1].coeff((3,)) == 1


def test_sigma_multiplicity():
    t3 = P("x**3", 1)
    assert sigma_multiplicity(CurveJet([t3, t3])) == 3


def test_a_equivalent_identity():
    p = (P(F2), P(G2))
    phi, Psi = a_equivalent(p, p)
    assert phi.pullback(p[0]).equals(p[0])


def test_a_equivalent_round_trip(rng):
    f, g = P(F2), P(G2)
    psi = random_diffeo(rng, 2, 8, linear=False)
    Psi = DiffeoJet([P("-4*x+5*y+x*y"), P("2*y-x**2")])
    f1, g1 = (compose(c, psi.pullback_many([f, g])) for c in Psi.components)
    phi, Psi1 = a_equivalent((f, g), (f1, g1))
    a, b = (compose(c, [f, g]) for c in Psi1.components)
    assert phi.pullback(a).equals(f1) and phi.pullback(b).equals(g1)


def test_a_equivalent_incompatible_cones():
    f4 = P("x1**2+x2**2+x3**2+x4**2", 4, 4)
    g = P("x1**2+2*x2**2+3*x3**2+5*x4**2", 4, 4)
    h = P("x1**2+2*x2**2+3*x3**2+7*x4**2", 4, 4)
    with pytest.raises(NotEquivalent):
        a_equivalent((f4, g), (f4, h), 4)


def test_q_normal_form_of_normal_form():
    q = q_normal_form(P(F2), P(G2))
    assert q.pairs == [(1, 1), (4, Fraction(-1, 2))]


def test_q_normal_form_round_trip(rng):
    f, g = P(F2), P(G2)
    psi = random_diffeo(rng, 2, 8)
    unit = P("1+x-y**2/2")
    f1, g1 = (unit * h for h in psi.pullback_many([f, g]))
    assert q_normal_form(f1, g1) == q_normal_form(f, g)


def test_q_normal_form_needs_alpha():
    with pytest.raises(NotQGeneric):
        q_normal_form(P(F2), P("x**2+4*y**2+x**3"))


def test_cone_restriction():
    f, g = P("x**2+y**2+z**2", 3), P("x**2+2*y**2+3*z**2", 3)
    assert cone_restriction_form(f, g) == [-2, -1]
    assert cone_restriction_form(f, g + P("x**3-y*z**2+7*x*y*z", 3)) == [-2, -1]


def test_cone_restriction_precondition():
    f = P("x**2+y**2+z**2", 3)
    with pytest.raises(NotGeneric):
        cone_restriction_form(f, f * 2)


def test_fold_normal_already():
    f, g = P("x"), P("x**3+y**2")
    phi, Phi = fold_normalize(f, g)
    assert phi.equals(P("x**3", 1)) and Phi.equals(DiffeoJet.identity(2, 8))


def test_fold_square_root_series():
    f, g = P("x"), P("x**2+y**2+x*y**2")
    phi, Phi = fold_normalize(f, g)
    assert phi.equals(P("x**2", 1))
    assert Phi.pullback(f).equals(f)
    assert Phi.pullback(g).equals(P("x**2+y**2"))


def test_fold_rejects_non_reduced_tangency():
    with pytest.raises(NotAFold):
        fold_normalize(P("x"), P("x**2+y**3"))
