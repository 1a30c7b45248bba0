import pytest

from conftest import P, random_diffeo
from morsejets import coeff as C
from morsejets import linalg as LA
from morsejets.errors import NotDiagonalizable, NotGeneric, NotMorse
from morsejets.jet import Jet, DiffeoJet
from morsejets.normal_forms import (block_diagonalize_pencil, quadratic_matrix, morse_normalize,
                                    diagonalize_pair, genericity_class, separable_realize,
                                    linear_morse)


def _mat(rows):
    return LA.convert_matrix(rows, "exact")


def _congruent(P_, S):
    return LA.matmul(LA.matmul(LA.transpose(P_), S), P_)


def test_pencil_jordan_block():
    form = block_diagonalize_pencil(_mat([[0, 1], [1, 0]]), _mat([[0, 1], [1, 1]]))
    assert form.blocks == [(1, 2)]
    assert not form.diagonalizable


def test_pencil_diagonal():
    Sf, Sg = _mat([[1, 0], [0, 1]]), _mat([[1, 0], [0, 2]])
    form = block_diagonalize_pencil(Sf, Sg)
    assert form.diagonalizable and form.eigenvalues == [1, 2]
    assert _congruent(form.P, Sf) == Sf


def test_pencil_identical_forms():
    I = _mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    form = block_diagonalize_pencil(I, I)
    assert form.blocks == [(1, 1)] * 3


def test_pencil_congruence_general():
    A = _mat([[1, 1, 0], [0, 1, 2], [1, 0, 1]])
    Sf = LA.matmul(LA.transpose(A), A)
    Sg = LA.matmul(LA.matmul(LA.transpose(A), _mat([[1, 0, 0], [0, 3, 0], [0, 0, -2]])), A)
    form = block_diagonalize_pencil(Sf, Sg)
    F, G = _congruent(form.P, Sf), _congruent(form.P, Sg)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert C.is_zero(F[i][j]) and C.is_zero(G[i][j])
        assert C.is_zero(F[i][i] - 1)


def test_morse_identity():
    f = P("x**2+y**2+z**2", 3)
    assert morse_normalize(f).equals(DiffeoJet.identity(3, 8))


def test_morse_absorbs_cubic():
    f = P("x**2+y**2+y**3")
    phi = morse_normalize(f)
    assert phi.pullback(f).equals(P("x**2+y**2"))


def test_morse_xy():
    f = P("x*y")
    assert morse_normalize(f).pullback(f).equals(P("x**2+y**2"))


def test_morse_random(rng):
    # the linear part stays trivial: a rational congruence to the identity is
    # only searched along the completion of squares
    f = P("x**2+y**2-z**2+x*y*z+y**4", 3)
    psi = random_diffeo(rng, 3, 8, linear=False)
    F = psi.pullback(f)
    assert morse_normalize(F).pullback(F).equals(P("x**2+y**2+z**2", 3))


def test_morse_rejects_degenerate():
    with pytest.raises(NotMorse):
        morse_normalize(P("x**2+y**3"))


def test_diagonalize_figure_pair():
    phi, lams = diagonalize_pair(P("x**2+y**2"), P("x**2+2*y**2"))
    assert lams == [1, 2]
    assert phi.equals(DiffeoJet.identity(2, 8))


def test_diagonalize_not_diagonalizable():
    with pytest.raises(NotDiagonalizable):
        diagonalize_pair(P("2*x*y"), P("2*x*y+y**2"))


def test_diagonalize_repeated_eigenvalue():
    with pytest.raises(NotGeneric) as e:
        diagonalize_pair(P("x**2+y**2"), P("x**2+y**2"))
    assert e.value.witness["indices"] == [1, 2]


def test_diagonalize_composition(rng):
    psi = random_diffeo(rng, 2, 8)
    f, g = psi.pullback_many([P("x**2+y**2+x**3"), P("3*x**2-y**2+y**3")])
    phi, lams = diagonalize_pair(f, g)
    F, G = phi.pullback_many([f, g])
    assert F.equals(P("x**2+y**2"))
    assert G.degree_part(2).equals(P("x**2", K=8) * lams[0] + P("y**2") * lams[1])


def test_genericity_all_true():
    r = genericity_class(P("x**2+y**2"), P("x**2+2*y**2+x**3+3*y**3"))
    assert r.R_generic and r.Q_generic and r.F_generic and r.A_generic


def test_genericity_vanishing_alpha():
    r = genericity_class(P("x**2+y**2"), P("x**2+2*y**2+x**3"))
    assert r.R_generic and not r.Q_generic
    assert r.witnesses["vanishing_alpha"] == [2]


def test_genericity_repeated_lambda():
    r = genericity_class(P("x**2+y**2"), P("x**2+y**2+x**3"))
    assert not r.R_generic


def test_realize_quadratic():
    t2 = P("x**2", 1)
    f, g = separable_realize([([1, 0], t2, t2), ([0, 1], t2, P("2*x**2", 1))])
    assert f.equals(P("x**2+y**2")) and g.equals(P("x**2+2*y**2"))


def test_realize_cubic_normal_form():
    curves = [([1, 0], P("x**2", 1), P("x**2+x**3", 1)),
              ([0, 1], P("x**2", 1), P("3*x**2-x**3/2", 1))]
    f, g = separable_realize(curves)
    assert g.equals(P("x**2+3*y**2+x**3-y**3/2"))


def test_realize_restriction_round_trip():
    u = [P("x**2+x**3", 1), P("x**2-x**4", 1)]
    v = [P("2*x**2+x**5", 1), P("-x**2+x**3", 1)]
    dirs = [[1, 2], [1, -1]]
    f, g = separable_realize(list(zip(dirs, u, v)))
    for d, uj, vj in zip(dirs, u, v):
        line = [P("x", 1) * d[0], P("x", 1) * d[1]]
        assert f.compose(line).equals(uj) and g.compose(line).equals(vj)


def test_linear_morse_non_square_pivots(rng):
    # L^T L for random integer L: completing squares meets non-square pivots
    for n in (2, 3):
        for _ in range(20):
            while True:
                L = _mat([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
                if LA.det(L, "exact") != 0:
                    break
            S = LA.matmul(LA.transpose(L), L)
            assert _congruent(linear_morse(S), S) == LA.identity(n, "exact")


def test_morse_random_linear_part_3d(rng):
    f = P("x**2+y**2+z**2+x*y*z", 3)
    psi = DiffeoJet.from_matrix(_mat([[1, 2, 0], [0, 1, -1], [3, 0, 1]]), 8)
    f1 = psi.pullback(f)
    assert morse_normalize(f1).pullback(f1).equals(P("x**2+y**2+z**2", 3))
