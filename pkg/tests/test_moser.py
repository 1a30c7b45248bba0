import cmath
from fractions import Fraction

import pytest

from conftest import P, random_poly
from morsejets.errors import NotInIdeal, HypothesisFailed, NotQGeneric
from morsejets.jet import JetError
from morsejets.jet import Jet, DiffeoJet
from morsejets.moser import (decompose_in_ideal, in_ideal, path_decomposition, homotopy_field,
                             HomotopyField, flow_to_time_one, conjugate_by_path,
                             conjugate_preserving, preserving_field, exp_diffeo,
                             conjugate_quotient, euler_defect, verify_numeric)
from morsejets.tangency import tangency_generators


def test_decompose_monomial():
    w = decompose_in_ideal(P("8*x**2*y"), [P("4*x*y")])
    assert list(w.r.values())[0].equals(P("2*x"))


def test_decompose_obstruction_degree():
    with pytest.raises(NotInIdeal) as e:
        decompose_in_ideal(P("x**2"), [P("4*x*y")])
    assert e.value.degree == 2


def test_decompose_in_cusp_ideal():
    I = tangency_generators(P("x**3+y**2+z**2", 3), P("2*x**3+3*y**2+5*z**2+y**3", 3))
    gens = [I.gens[(0, 1)] * Fraction(1, 6), I.gens[(0, 2)] * Fraction(1, 18),
            I.gens[(1, 2)] * Fraction(1, 8)]
    a = P("x**2*y+y*z", 3)
    w = decompose_in_ideal(a, gens, 8)
    r = [w.r[k] for k in sorted(w.r)]
    assert [x.constant() for x in r] == [1, 0, 1]


def test_decompose_rejects_order_above_target():
    f, g = P("x**2+y**2"), P("x**2+2*y**2")
    with pytest.raises(JetError):
        decompose_in_ideal(P("x**2*y**2", K=6), tangency_generators(f, g), 8)


def test_homotopy_field_trivial_path():
    f, g = P("x**2+y**2"), P("x**2+2*y**2")
    wit = path_decomposition(f, g, g, 8)
    X = homotopy_field(f, g, g, wit)
    assert all(c.is_zero() for c in X.components)


def test_homotopy_field_annihilates():
    f, g0 = P("x**2+y**2"), P("x**2+2*y**2")
    g1 = g0 + P("x**2*y**2")
    X = homotopy_field(f, g0, g1, path_decomposition(f, g0, g1, 8))
    assert X.apply(f).truncate(7).is_zero()
    t = Jet.param(0, 2, 8, "exact")
    gt = g0.with_params(1) + t * (g1 - g0).with_params(1)
    assert X.apply(gt).truncate(7).is_zero()


def test_homotopy_field_regular_f_rejected():
    f, g0 = P("x"), P("y")
    g1 = g0 + Jet.const(1, 2, 8)
    with pytest.raises(HypothesisFailed) as e:
        homotopy_field(f, g0, g1, path_decomposition(f, g0, g1, 8))
    assert e.value.witness["which"] == "f-regular"


def test_flow_of_d_dt_is_identity():
    X = HomotopyField([Jet.zero(2, 8, "exact", 1)] * 2, 8)
    assert flow_to_time_one(X).equals(DiffeoJet.identity(2, 8))


def test_flow_of_linear_rotation():
    c = 2.0
    t = Jet.param(0, 2, 6, "float")
    x, y = Jet.var(0, 2, 6, "float", 1), Jet.var(1, 2, 6, "float", 1)
    X = HomotopyField([t * y * (1 / c), t * x * (-1 / c)], 6)
    phi = flow_to_time_one(X)
    th = -1 / (2 * c)
    M = phi.linear_matrix()
    want = [[cmath.cos(th), cmath.sin(th)], [-cmath.sin(th), cmath.cos(th)]]
    for i in range(2):
        for j in range(2):
            assert abs(M[i][j] - want[i][j]) < 1e-9


def test_path_method_identity():
    f, g = P("x**2+y**2"), P("x**2+2*y**2")
    assert conjugate_by_path(f, g, g).equals(DiffeoJet.identity(2, 8))


def test_path_method_quartic():
    f, g0 = P("x**2+y**2"), P("x**2+2*y**2")
    g1 = g0 + P("x**2*y**2")
    phi = conjugate_by_path(f, g0, g1)
    assert phi.pullback(f).equals(f) and phi.pullback(g0).equals(g1)


def test_path_method_rejects_non_member():
    f, g0 = P("x**2+y**2"), P("x**2+2*y**2")
    with pytest.raises(HypothesisFailed):
        conjugate_by_path(f, g0, g0 + P("x**3"))


def test_path_method_random_3d(rng):
    f, g0 = P("x**2+y**2+z**2", 3), P("x**2+2*y**2+3*z**2", 3)
    I = tangency_generators(f, g0).generators()
    # an element of I^2 leaves the tangency ideal unchanged
    a = sum((random_poly(rng, 3, 0, 2, 8, 0.3, 2) * h * k for h in I for k in I),
            Jet.zero(3, 8))
    phi = conjugate_by_path(f, g0, g0 + a)
    assert phi.pullback(f).equals(f) and phi.pullback(g0).equals(g0 + a)


def test_preserving_field_keeps_f():
    f = P("x**3+y**2+z**2", 3)
    Y = preserving_field(f, {(0, 1): P("x+z", 3), (1, 2): P("y", 3)}, 8)
    df = f.gradient()
    assert sum((a * b for a, b in zip(Y, df)), Jet.zero(3, 8)).truncate(7).is_zero()
    assert exp_diffeo(Y, 8).pullback(f).equals(f)


def test_preserving_conjugation_round_trip():
    f = P("x**2+y**2")
    g = P("x**2+2*y**2+x**3+y**3")
    psi = exp_diffeo(preserving_field(f, {(0, 1): P("x*y+x", 2)}, 8), 8)
    g1 = psi.pullback(g)
    phi = conjugate_preserving(f, g, g1)
    assert phi.pullback(f).equals(f) and phi.pullback(g).equals(g1)


def test_quotient_identity():
    f, g = P("x**2+y**2"), P("x**2+2*y**2+x**3+y**3")
    assert conjugate_quotient(f, g, f, g).equals(DiffeoJet.identity(2, 8))


def test_quotient_perturbation():
    f, g = P("x**2+y**2"), P("x**2+2*y**2+x**3+y**3")
    g1 = g + f * P("x**4-x*y**3")
    phi = conjugate_quotient(f, g, f, g1, 6)
    a, b = phi.with_order(8).pullback_many([g, f])
    assert (a * f - g1 * b).truncate(8).is_zero()


def test_quotient_needs_q_generic():
    f, g = P("x**2+y**2"), P("x**2+2*y**2+y**3")
    with pytest.raises(NotQGeneric):
        conjugate_quotient(f, g, f, g + f * P("x**4"))


def test_euler_identity():
    f = P("x**2+y**2+z**2", 3)
    g = P("x**2+2*y**2-z**2+x**3-y*z**2+x**2*y**3", 3)
    assert euler_defect(f, g).is_zero()


def test_verify_identity_and_corruption():
    f, g = P("x**2+y**2"), P("x**2+2*y**2")
    I = DiffeoJet.identity(2, 8)
    r = verify_numeric((f.to_float(), g.to_float()), (f.to_float(), g.to_float()), I.to_float())
    assert r.max_residual == 0 and not r.flagged
    bad = DiffeoJet([P("x+y/10"), P("y")]).to_float()
    r = verify_numeric((f.to_float(), g.to_float()), (f.to_float(), g.to_float()), bad)
    assert r.flagged and r.max_residual > 1e-6
