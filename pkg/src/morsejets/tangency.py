"""Tangency ideals, tangency curves, straightening and the radical certificate."""

from dataclasses import dataclass, field
from itertools import combinations

from . import coeff as C
from . import linalg as LA
from .coeff import EXACT
from .errors import NotGeneric, LiftFailure, HypothesisFailed, JetError
from .jet import Jet, DiffeoJet, CurveJet, solve_implicit, solve_implicit_system, _deg
from .normal_forms import quadratic_matrix


@dataclass
class IdealPresentation:
    """Generators h_ij (i < j) of the tangency ideal, keyed by the pair."""
    gens: dict
    nvars: int
    order: int
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def pairs(self):
        return sorted(self.gens)

    def generators(self):
        return [self.gens[p] for p in self.pairs]

    def __len__(self):
        return len(self.gens)

    def __getitem__(self, pair):
        i, j = pair
        if i < j:
            return self.gens[(i, j)]
        return -self.gens[(j, i)]


def from_generators(gens):
    """Wrap an arbitrary generator list (keys are (0, k))."""
    gens = list(gens)
    return IdealPresentation({(0, k + 1): g for k, g in enumerate(gens)},
                             gens[0].nvars, min(g.order for g in gens))


def tangency_generators(f, g):
    """h_ij = d_i f d_j g - d_j f d_i g for i < j."""
    if f.nvars != g.nvars:
        raise JetError("variable-count mismatch")
    df, dg = f.gradient(), g.gradient()
    n = f.nvars
    gens = {}
    for i, j in combinations(range(n), 2):
        gens[(i, j)] = df[i] * dg[j] - df[j] * dg[i]
    order = min(f.order, g.order) - 1
    return IdealPresentation(gens, n, order)


@dataclass
class TangencyCurve:
    curve: CurveJet
    axis: int
    multiplicity: int = 1

    def alphas(self):
        """alpha_i(t) with curve component i = t^2 alpha_i(t) (i != axis)."""
        out = {}
        for i, c in enumerate(self.curve.components):
            if i != self.axis:
                out[i] = c.divide_monomial((2,))
        return out


def _is_diagonal(S, mode):
    n = len(S)
    return all(C.is_zero(S[i][j], mode) for i in range(n) for j in range(n) if i != j)


def _check_diagonal_pair(f, g):
    mode = f.mode
    Sf, Sg = quadratic_matrix(f), quadratic_matrix(g)
    n = f.nvars
    if not (_is_diagonal(Sf, mode) and _is_diagonal(Sg, mode)):
        raise HypothesisFailed("quadratic parts are not diagonal; call diagonalize_pair first",
                               stage="tangency")
    if not all(C.is_zero(Sf[i][i] - 1, mode) for i in range(n)):
        raise HypothesisFailed("quadratic part of f is not sum x_i^2", stage="tangency")
    lams = [Sg[i][i] for i in range(n)]
    for i, j in combinations(range(n), 2):
        if C.is_zero(lams[i] - lams[j], mode):
            raise NotGeneric("repeated eigenvalue", {"indices": [i + 1, j + 1]})
    return lams


def lift_axis_curve(hs, j, n, K, mode):
    """Curve x_j = t, x_i = t y_i(t) solving h_{jk}(curve) = 0, k != j.

    ``hs`` maps k to the generator h_{jk} at working order; the blown-up system
    h(t, t y) / t^2 is solved by the implicit function theorem.
    """
    others = [k for k in range(n) if k != j]
    m = n  # ring: (t, y_others...)
    W = min(h.order for h in hs.values())
    tvar = Jet.var(0, m, W + 1, mode)
    subst = [None] * n
    subst[j] = tvar
    for pos, k in enumerate(others):
        subst[k] = tvar * Jet.var(pos + 1, m, W + 1, mode)
    eqs = []
    for k in others:
        H = hs[k].compose(subst)
        try:
            H = H.divide_monomial((2,) + (0,) * (m - 1))
        except JetError:
            raise LiftFailure("generator does not vanish to order 2 along axis %d" % (j + 1),
                              {"axis": j + 1}) from None
        eqs.append(H)
    try:
        ys = solve_implicit_system(eqs, list(range(1, m)))
    except JetError as exc:
        raise LiftFailure("cannot lift the tangency curve along axis %d: %s" % (j + 1, exc),
                          {"axis": j + 1}) from None
    t = Jet.var(0, 1, K, mode)
    comps = [None] * n
    comps[j] = t
    for pos, k in enumerate(others):
        comps[k] = (ys[pos].with_order(K - 1) * t).with_order(K)
    return CurveJet(comps)


def _curves_work(f, g, K):
    """Tangency curves at order K from f, g treated as polynomials."""
    n, mode = f.nvars, f.mode
    W = K + 2
    F, G = f.promote(W), g.promote(W)
    ideal = tangency_generators(F, G)
    out = []
    for j in range(n):
        hs = {k: ideal[(j, k)] for k in range(n) if k != j}
        curve = lift_axis_curve(hs, j, n, K, mode)
        out.append(TangencyCurve(curve, j, 1))
    for tc in out:
        for h in ideal.generators():
            r = tc.curve.pullback(h.truncate(K + 1))
            if not r.truncate(K).equals(Jet.zero(1, K, mode)):
                raise LiftFailure("lifted curve %d is not contained in the tangency locus"
                                  % (tc.axis + 1),
                                  {"axis": tc.axis + 1, "degree": r.valuation()})
    return out


def tangency_curves(f, g, order=None):
    """The n tangency curves of a diagonalized R-generic pair.

    Curve j is x_j = t, x_i = t^2 alpha_i(t).  Inputs are read as polynomials, so
    the curves are exact through the requested order.
    """
    K = min(f.order, g.order) if order is None else order
    _check_diagonal_pair(f, g)
    return _curves_work(f, g, K)


def restrict(F, curve):
    """F along a parametrized curve, as a jet in t."""
    if isinstance(curve, TangencyCurve):
        curve = curve.curve
    return curve.pullback(F)


def straighten_axis_map(f_rest, j, c, p, n, W, mode):
    """Map x -> (x_i - c_i(x_j), (1 + u) x_j) preserving x_j^p + R(x').

    ``f_rest`` is R as a jet in all n variables (not involving x_j), ``c`` the
    curve components (jets in t, c_j unused) vanishing to order p.  The
    returned map sends the curve {x_i = c_i(x_j)} onto the x_j axis.
    """
    xj = [Jet.var(j, n, W, mode)]
    xs = [Jet.var(k, n, W, mode) for k in range(n)]
    shifted = list(xs)
    for k in range(n):
        if k != j:
            shifted[k] = xs[k] - c[k].promote(W).compose(xj)
    R0 = f_rest.promote(W)
    R1 = R0.compose(shifted)
    ej = [0] * n
    ej[j] = p
    try:
        Q = (R0 - R1).divide_monomial(ej)
    except JetError:
        raise LiftFailure("curve does not have contact order %d with axis %d" % (p, j + 1),
                          {"axis": j + 1}) from None
    # (1 + u)^p - 1 - Q(x) = 0
    u = Jet.var(n, n + 1, Q.order, mode)
    lhs = (u + 1) ** p - 1 - Q.embed(n + 1, list(range(n))).promote(Q.order)
    sol = solve_implicit(lhs, u_index=n).promote(W)
    comps = list(shifted)
    comps[j] = xs[j] + (sol * xs[j])
    return DiffeoJet([c_.promote(W) for c_ in comps], check=False)


def straighten(f, g, order=None, return_work=False):
    """Diffeomorphism phi with f o phi = f whose transformed tangency curves are the axes.

    Requires f = sum x_i^2 and (f, g) R-generic with diagonal quadratic parts.
    Axes are processed from the last to the first.
    """
    n, mode = f.nvars, f.mode
    K = min(f.order, g.order) if order is None else order
    _check_diagonal_pair(f, g)
    target = sum((Jet.var(i, n, K, mode) ** 2 for i in range(n)), Jet.zero(n, K, mode))
    if not f.with_order(K).equals(target):
        raise HypothesisFailed("straighten needs f = sum x_i^2 through the order", stage="tangency")
    W = K + 2   # dividing by x_j^2 loses two orders
    F = sum((Jet.var(i, n, W, mode) ** 2 for i in range(n)), Jet.zero(n, W, mode))
    G = g.promote(W)
    total = DiffeoJet.identity(n, W, mode)
    for j in reversed(range(n)):
        Gcur = total.pullback(G).promote(W)
        curves = _curves_work(F, Gcur, W)
        c = list(curves[j].curve.components)
        if all(ck.is_zero() for k, ck in enumerate(c) if k != j):
            continue
        rest = F - Jet.var(j, n, W, mode) ** 2
        step = straighten_axis_map(rest, j, c, 2, n, W, mode)
        sigma = step.inverse().promote(W)
        total = total.compose(sigma).promote(W)
    phi = total.truncate(K)
    if not phi.pullback(f.with_order(K)).equals(f.with_order(K)):
        raise AssertionError("straighten self-check failed: f o phi != f")
    Gw = total.pullback(G)
    for tc in _curves_work(F, Gw.promote(Gw.order), K):
        for k, ck in enumerate(tc.curve.components):
            if k != tc.axis and not ck.equals(Jet.zero(1, K, mode)):
                raise AssertionError("straighten self-check failed: curve %d not straight"
                                     % (tc.axis + 1))
    if return_work:
        return phi, total
    return phi


@dataclass
class RadicalCertificate:
    A: list          # rows: generators (i, j); columns: monomials x_k x_l; jets
    Lambda: list     # constant part of A (diagonal)
    B: list          # A - Lambda, entries in the maximal ideal
    pairs: list
    determinant: object

    def to_dict(self):
        return {"pairs": [[i + 1, j + 1] for i, j in self.pairs],
                "Lambda_diagonal": [str(self.Lambda[k][k]) for k in range(len(self.pairs))],
                "determinant": str(self.determinant)}


def radical_certificate(f, g, order=None):
    """Write h = A (x_k x_l) with A = Lambda + B, Lambda diagonal invertible.

    Each monomial of h_ij is assigned to the first pair (k, l) of distinct
    variables dividing it.
    """
    K = min(f.order, g.order) if order is None else order
    lams = _check_diagonal_pair(f, g)
    n, mode = f.nvars, f.mode
    ideal = tangency_generators(f.with_order(K), g.with_order(K))
    pairs = ideal.pairs
    index = {p: a for a, p in enumerate(pairs)}
    m = len(pairs)
    A = [[Jet.zero(n, ideal.order - 2, mode) for _ in range(m)] for _ in range(m)]
    for a, p in enumerate(pairs):
        buckets = [dict() for _ in range(m)]
        for e, c in ideal.gens[p].terms.items():
            support = [k for k in range(n) if e[k]]
            if len(support) < 2:
                raise HypothesisFailed("generator h_%d%d does not vanish on the axes"
                                       % (p[0] + 1, p[1] + 1), stage="radical",
                                       witness={"monomial": list(e)})
            k, l = support[0], support[1]
            q = list(e)
            q[k] -= 1
            q[l] -= 1
            buckets[index[(k, l)]][tuple(q)] = c
        for b in range(m):
            A[a][b] = Jet(n, ideal.order - 2, buckets[b], mode)
    Lam = [[A[a][b].constant() for b in range(m)] for a in range(m)]
    for a, (i, j) in enumerate(pairs):
        expect = 4 * (lams[j] - lams[i])
        for b in range(m):
            want = expect if a == b else 0
            if not C.is_zero(Lam[a][b] - want, mode):
                raise HypothesisFailed("constant part of A is not diag(4(lambda_j - lambda_i))",
                                       stage="radical")
    det = LA.det(Lam, mode)
    if C.is_zero(det, mode):
        bad = [[i + 1, j + 1] for (i, j) in pairs if C.is_zero(lams[i] - lams[j], mode)]
        raise NotGeneric("Lambda is singular", {"pairs": bad})
    Bm = [[A[a][b] - Lam[a][b] for b in range(m)] for a in range(m)]
    return RadicalCertificate(A, Lam, Bm, pairs, det)
