"""Exceptional pairs of three-dimensional cusps.

Pairs are brought to f = x^3 + y^2 + z^2, g = lam x^3 + mu y^2 + nu z^2 + eps
with eps of order three and no x^3 term.  Such a pair is exceptional when its
two double tangency curves (tangent to the y and z axes) do not split; the
tangency ideal is then <x^2 y, x^2 z, yz> once the curves are straightened.
"""

from dataclasses import dataclass, field
from itertools import product
import cmath
from fractions import Fraction

import sympy

from . import coeff as C
from . import linalg as LA
from .coeff import EXACT, FLOAT
from .errors import (HypothesisFailed, NotMorse, NotGeneric, NotExceptional, NotEquivalent,
                     LiftFailure, NotInIdeal, FieldExtensionRequired, JetError)
from .jet import Jet, DiffeoJet, CurveJet, solve_implicit_system, invert_scalar_jet
from .moser import Decomposer, DecompositionWitness, conjugate_by_path, conjugate_preserving
from .normal_forms import quadratic_matrix, parametrized_morse, block_diagonalize_pencil
from .tangency import TangencyCurve, tangency_generators, straighten_axis_map

AXES = "xyz"
XY, XZ, YZ = (0, 1), (0, 2), (1, 2)


def _nil(J, ref=None):
    """J vanishes; in float mode up to the tolerance scaled by the size of ``ref``."""
    if J.mode == EXACT:
        return J.is_zero()
    refs = [J] if ref is None else [J, ref]
    scale = max([1.0] + [abs(c) for r in refs for c in r.terms.values()])
    return all(C.is_zero(c / scale, FLOAT) for c in J.terms.values())


def model_f(order, mode=EXACT):
    x, y, z = (Jet.var(i, 3, order, mode) for i in range(3))
    return x ** 3 + y ** 2 + z ** 2


def model_generators(order, mode=EXACT):
    """x^2 y, x^2 z, yz."""
    x, y, z = (Jet.var(i, 3, order, mode) for i in range(3))
    return [x * x * y, x * x * z, y * z]


@dataclass
class CuspPair:
    f: Jet
    g: Jet
    lam: object
    mu: object
    nu: object
    eps: Jet
    order: int

    @property
    def mode(self):
        return self.f.mode

    @property
    def eps3(self):
        return self.eps.degree_part(3)

    @classmethod
    def from_jets(cls, f, g, order=None):
        """Check the cusp form and split g into its model part and eps."""
        K = min(f.order, g.order) if order is None else order
        if f.nvars != 3 or g.nvars != 3:
            raise HypothesisFailed("cusp pairs live in three variables", stage="cusp")
        mode = f.mode
        f, g = f.with_order(K), g.with_order(K)
        if not f.equals(model_f(K, mode)):
            raise HypothesisFailed("f is not x^3 + y^2 + z^2; run milnor2_normalize first",
                                   stage="cusp")
        for d in (0, 1):
            if not g.degree_part(d).is_zero():
                raise HypothesisFailed("g must vanish to second order", stage="cusp")
        q = g.degree_part(2)
        mu, nu = q.coeff((0, 2, 0)), q.coeff((0, 0, 2))
        x, y, z = (Jet.var(i, 3, K, mode) for i in range(3))
        if not (q - y * y * mu - z * z * nu).is_zero():
            raise HypothesisFailed("quadratic part of g is not mu y^2 + nu z^2", stage="cusp",
                                   witness={"quadratic": q.to_str()})
        lam = g.coeff((3, 0, 0))
        eps = g - x ** 3 * lam - y * y * mu - z * z * nu
        vals = {"lambda": lam, "mu": mu, "nu": nu}
        for a, b in ((lam, mu), (lam, nu), (mu, nu)):
            if C.is_zero(a - b, mode):
                raise NotGeneric("lambda, mu, nu must be pairwise distinct", vals)
        if any(C.is_zero(v, mode) for v in vals.values()):
            raise NotGeneric("lambda, mu, nu must be nonzero", vals)
        return cls(f, g, lam, mu, nu, eps, K)

    def to_dict(self):
        return {"lambda": str(self.lam), "mu": str(self.mu), "nu": str(self.nu),
                "eps": self.eps.to_str(), "eps3": self.eps3.to_str()}


# normalization ------------------------------------------------------------------------

def milnor2_normalize(f, order=None):
    """phi with f o phi = x^3 + y^2 + z^2 through the order.

    The kernel of the Hessian becomes the x direction, the parametrized Morse
    lemma completes the squares in y and z, and the remaining function of x
    is turned into x^3 by a cube root.
    """
    if f.nvars != 3:
        raise HypothesisFailed("milnor2_normalize works in three variables", stage="morse")
    K = f.order if order is None else order
    mode = f.mode
    if not C.is_zero(f.constant(), mode) or not f.degree_part(1).is_zero():
        raise NotMorse("f must have a critical point at 0 with f(0) = 0")
    S = quadratic_matrix(f)
    rk = LA.rank(S, mode)
    if rk != 2:
        raise NotMorse("the Hessian has rank %d, a Milnor-number-2 point needs rank 2" % rk,
                       {"rank": rk})
    k = LA.nullspace(S, 3, mode)[0]
    cols = None
    for a, b in ((1, 2), (0, 2), (0, 1)):
        M = [[k[i], 1 if i == a else 0, 1 if i == b else 0] for i in range(3)]
        M = LA.convert_matrix(M, mode)
        if not C.is_zero(LA.det(M, mode), mode):
            cols = M
            break
    W = K + 3
    L = DiffeoJet.from_matrix(cols, W, mode)
    F = L.pullback(f.promote(W))
    phi2, rest = parametrized_morse(F, [1, 2], W)
    r1 = Jet(1, W, {(e[0],): c for e, c in rest.terms.items() if e[1] == 0 and e[2] == 0},
             mode)
    v = r1.truncate(K).valuation()
    if v != 3:
        raise NotMorse("the residual function of x has valuation %s, not 3 (Milnor number "
                       "is not 2)" % v, {"valuation": v})
    U = r1.divide_monomial((3,))
    try:
        root = U.unit_power(Fraction(1, 3))
    except JetError:
        raise FieldExtensionRequired("the cube root of %s is outside Q(i); use float mode"
                                     % U.constant(), {"coefficient": str(U.constant())}) from None
    s = (Jet.var(0, 1, W, mode) * root.promote(W)).with_order(W)
    psi = invert_scalar_jet(s)
    comps = [psi.compose([Jet.var(0, 3, W, mode)])] + [Jet.var(i, 3, W, mode) for i in (1, 2)]
    phi = L.compose(phi2).compose(DiffeoJet(comps)).truncate(K)
    if not phi.pullback(f.with_order(K)).equals(model_f(K, mode)):
        raise AssertionError("milnor2_normalize self-check failed")
    return phi


def _swap_yz(order, mode):
    return DiffeoJet([Jet.var(i, 3, order, mode) for i in (0, 2, 1)])


def cusp_form(f, g, order=None):
    """(phi, CuspPair) with (f o phi, g o phi) in cusp form, mu before nu."""
    K = min(f.order, g.order) if order is None else order
    mode = f.mode
    phi = milnor2_normalize(f, K)
    G = phi.pullback(g.with_order(K))
    Sg = quadratic_matrix(G)
    if any(not C.is_zero(Sg[0][j], mode) for j in range(3)):
        raise HypothesisFailed("the Hessian of g does not vanish in the kernel direction of "
                               "the Hessian of f", stage="cusp",
                               witness={"row": [str(c) for c in Sg[0]]})
    B = [[Sg[1][1], Sg[1][2]], [Sg[2][1], Sg[2][2]]]
    if not C.is_zero(B[0][1], mode):
        form = block_diagonalize_pencil(LA.identity(2, mode), B, mode)
        P = form.P
        R = [[C.convert(1, mode), 0 * P[0][0], 0 * P[0][0]],
             [0 * P[0][0], P[0][0], P[0][1]], [0 * P[0][0], P[1][0], P[1][1]]]
        phi = phi.compose(DiffeoJet.from_matrix(R, K, mode))
        G = phi.pullback(g.with_order(K))
    pair = CuspPair.from_jets(phi.pullback(f.with_order(K)), G, K)
    if C.lex_key(pair.nu) < C.lex_key(pair.mu):
        phi = phi.compose(_swap_yz(K, mode))
        pair = CuspPair.from_jets(*phi.pullback_many([f.with_order(K), g.with_order(K)]), K)
    return phi, pair


# tangency curves ----------------------------------------------------------------------

def _blown_up(h, j, power, W, mode):
    """h(x_j = t, x_k = t V_k) / t^power as a jet in (t, V...)."""
    t = Jet.var(0, 3, W, mode)
    subst = [None] * 3
    subst[j] = t
    pos = 1
    for k in range(3):
        if k != j:
            subst[k] = t * Jet.var(pos, 3, W, mode)
            pos += 1
    H = h.promote(W).compose(subst)
    try:
        return H.divide_monomial((power, 0, 0))
    except JetError:
        raise LiftFailure("generator does not vanish to order %d along the %s-axis"
                          % (power, AXES[j]), {"axis": AXES[j]}) from None


def _cone_quadratic(pair, j):
    """Coefficients (A, B, C0) of A X^2 - B X - C0, whose roots X give the cone
    directions (X, 1, 0) (j = 1) or (X, 0, 1) (j = 2) of the double curve."""
    D = pair.eps3.diff(0)
    e2, e1, e0 = [0, 0, 0], [0, 0, 0], [0, 0, 0]
    e2[0] = 2
    e1[0], e1[j] = 1, 1
    e0[j] = 2
    c = pair.mu if j == 1 else pair.nu
    return (3 * (c - pair.lam) - D.coeff(tuple(e2)), D.coeff(tuple(e1)), D.coeff(tuple(e0)))


def cone_directions(pair):
    """Per double curve: its tangent directions in the cone and whether they coincide.

    The tangency cone lies in {yz = 0}; in the plane z = 0 (resp. y = 0) its
    points besides the x-axis are the roots of a quadratic.  A double root is
    the direction of an unsplit double curve, two roots mean it splits.
    """
    mode = pair.mode
    out = []
    for j in (1, 2):
        A, B, C0 = _cone_quadratic(pair, j)
        disc = B * B + 4 * A * C0
        double = bool(C.is_zero(disc, mode))
        if double:
            roots = [B / (2 * A)]
        else:
            X = sympy.Symbol("X")
            poly = sympy.Poly(_sym(A) * X ** 2 - _sym(B) * X - _sym(C0), X)
            roots = [sympy.simplify(r) if mode == EXACT else complex(sympy.N(r))
                     for r in sympy.roots(poly, multiple=True)]
        dirs = []
        for r in roots:
            pt = ["0", "0", "0"]
            pt[0], pt[j] = str(r), "1"
            dirs.append(pt)
        out.append({"axis": AXES[j], "double": double, "directions": dirs,
                    "root": roots[0] if double else None})
    return out


def adapt_coordinates(pair):
    """f-preserving (phi, pair') whose double curves are tangent to the y and z axes.

    A shear exp(Y) with linear part x -> x + a y + b z moves the double
    directions onto the axes, then a rotation x (z d/dy - y d/dz) removes the
    xyz term of eps.  In the result d/dx of the cubic part of eps vanishes.
    """
    from .moser import preserving_field, exp_diffeo
    K, mode = pair.order, pair.mode
    cone = cone_directions(pair)
    bad = [c for c in cone if not c["double"]]
    if bad:
        raise NotExceptional("the double curve along the %s-axis splits at the tangent cone"
                             % bad[0]["axis"], {"cone": cone})
    f = model_f(K, mode)
    coeffs = {}
    for j, c in zip((1, 2), cone):
        if not C.is_zero(c["root"], mode):
            coeffs[(0, j)] = Jet.const(-c["root"] / 2, 3, K, mode)
    phi = DiffeoJet.identity(3, K, mode)
    g = pair.g.with_order(K)
    if coeffs:
        phi = exp_diffeo(preserving_field(f, coeffs, K), K)
        g = phi.pullback(pair.g.with_order(K))
    kappa = g.coeff((1, 1, 1))
    if not C.is_zero(kappa, mode):
        alpha = kappa / (4 * (pair.mu - pair.nu))
        rot = exp_diffeo(preserving_field(f, {(1, 2): Jet.var(0, 3, K, mode) * alpha}, K), K)
        phi = phi.compose(rot).truncate(K)
        g = phi.pullback(pair.g.with_order(K))
    out = CuspPair.from_jets(f, g, K)
    if not _nil(out.eps3.diff(0), out.g):
        raise AssertionError("adapt_coordinates left x-monomials in eps3")
    return phi, out


def _sym(c):
    if isinstance(c, complex):
        return sympy.Float(c.real) + sympy.I * sympy.Float(c.imag)
    re, im = C.re_im(c)
    return sympy.Rational(int(re.numerator), int(re.denominator)) + \
        sympy.I * sympy.Rational(int(im.numerator), int(im.denominator))


def _curve_from(V, j, K, mode):
    t = Jet.var(0, 1, K, mode)
    comps = [None] * 3
    comps[j] = t
    pos = 0
    for k in range(3):
        if k != j:
            comps[k] = (t * V[pos].with_order(K)).with_order(K)
            pos += 1
    return CurveJet(comps)


def _solve(eqs, what):
    try:
        return solve_implicit_system(eqs, [1, 2])
    except JetError as e:
        raise LiftFailure("cannot lift the %s: %s" % (what, e), {"curve": what}) from None


def _cusp_curves_work(F, G, K, split_order=None):
    """The simple x-curve and the two double curves, exact through K.

    Splitting is decided through t^split_order of h_xy / t^3 along the
    double curve (default K - 3, the part fixed by the K-jet of g).
    """
    split_order = K - 3 if split_order is None else split_order
    mode = F.mode
    W = K + 4
    ideal = tangency_generators(F.promote(W + 1), G.promote(W + 1))
    h = ideal.gens
    out = []
    # simple curve: x = t, y = t Y, z = t Z, cut out by h_xy / t^3 and h_xz / t^3
    eqs = [_blown_up(h[XY], 0, 3, W, mode), _blown_up(h[XZ], 0, 3, W, mode)]
    V = _solve(eqs, "simple curve along the x-axis")
    cx = _curve_from(V, 0, K, mode)
    for k in (1, 2):
        lead = cx.components[k].truncate(min(2, K))
        if not _nil(lead, G):
            raise LiftFailure("the simple curve is not tangent to order 2 to the x-axis",
                              {"curve": "x", "component": AXES[k]})
    out.append(TangencyCurve(cx, 0, 1))
    # double curves, chart x = t X, (y or z) = t V: on the surface h_yz = 0,
    # h_xy / t^3 (resp. h_xz) must have a double root in X
    for j, hq in ((1, h[XY]), (2, h[XZ])):
        what = "double curve along the %s-axis" % AXES[j]
        E1 = _blown_up(h[YZ], j, 2, W, mode)
        Q = _blown_up(hq, j, 3, W, mode)
        try:
            zeta = solve_implicit_system([E1], [2])[0]
        except JetError as e:
            raise LiftFailure("cannot lift the %s: %s" % (what, e), {"curve": AXES[j]}) from None
        t2, X2 = Jet.var(0, 2, W, mode), Jet.var(1, 2, W, mode)
        R = Q.compose([t2, X2, zeta])
        if not C.is_zero(R.diff(1).constant(), mode):
            raise LiftFailure("the %s splits at the tangent cone" % what,
                              {"curve": AXES[j], "degree": 1})
        try:
            xi = solve_implicit_system([R.diff(1)], [1])[0]
        except JetError as e:
            raise LiftFailure("cannot lift the %s: %s" % (what, e), {"curve": AXES[j]}) from None
        t1 = Jet.var(0, 1, xi.order, mode)
        # a change of g in degree K + 1 moves h_xy / t^3 at t^(K - 2)
        B = R.compose([t1, xi]).truncate(max(split_order, 0))
        if not _nil(B, R):
            raise LiftFailure("the %s splits into two branches" % what,
                              {"curve": AXES[j], "degree": B.valuation() + 1})
        Zt = zeta.compose([t1, xi])
        out.append(TangencyCurve(_curve_from([xi, Zt], j, K, mode), j, 2))
    for tc in out:
        for p, hp in h.items():
            top = K if tc.multiplicity == 1 else min(K, split_order + 3)
            r = tc.curve.pullback(hp.truncate(K + 1)).truncate(top)
            if not _nil(r, hp):
                raise LiftFailure("lifted %s-curve leaves the tangency locus" % AXES[tc.axis],
                                  {"curve": AXES[tc.axis], "degree": r.valuation()})
    return out


def _determined(curves, K):
    """Double curves move at t^(K - 1) when g changes in degree K + 1; drop that part."""
    out = []
    for tc in curves:
        if tc.multiplicity == 2:
            comps = [c.truncate(K - 2) for c in tc.curve.components]
            tc = TangencyCurve(CurveJet(comps), tc.axis, 2)
        out.append(tc)
    return out


def cusp_curves(pair, order=None):
    """Simple x-curve exact through K; double curves through K - 2."""
    K = pair.order if order is None else order
    return _determined(_cusp_curves_work(pair.f, pair.g, K), K)


@dataclass
class ExceptionalReport:
    exceptional: bool
    reasons: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    cone: list = field(default_factory=list)
    curves: list = None
    adapted: DiffeoJet = None

    def __bool__(self):
        return self.exceptional

    @property
    def split_directions(self):
        return [{"axis": c["axis"], "direction": d} for c in self.cone if not c["double"]
                for d in c["directions"]]

    def to_dict(self):
        out = {"exceptional": self.exceptional, "reasons": self.reasons, "notes": self.notes,
               "split_directions": self.split_directions}
        if self.curves is not None:
            out["curves"] = [{"axis": AXES[c.axis], "multiplicity": c.multiplicity,
                              "components": [x.to_str(["t"]) for x in c.curve.components]}
                             for c in self.curves]
        return out


def _monomial_list(J):
    return ", ".join(Jet(3, 3, {e: 1}, EXACT).to_str().replace("1*", "")
                     for e in sorted(J.terms))


def exceptional_check(pair, order=None):
    """Do the double tangency curves stay unsplit?

    First at the tangent cone (each double curve must have a single
    direction), then, in adapted coordinates where d/dx of the cubic part of
    eps vanishes, by lifting the three curves: a split double curve is
    reported with the degree where its two branches separate.
    """
    K = pair.order if order is None else order
    reasons, notes = [], []
    cone = cone_directions(pair)
    xm = {e: c for e, c in pair.eps3.terms.items()
          if e[0] > 0 and not C.is_zero(c, pair.mode)}
    for c in cone:
        if not c["double"]:
            d = [pt for pt in c["directions"] if pt[0] != "0"]
            reasons.append("the %s-axis splits into two curves; one is tangent to (x:y:z) = "
                           "(%s)" % (c["axis"], ":".join(d[0] if d else c["directions"][0])))
    if reasons:
        return ExceptionalReport(False, reasons, notes, cone)
    if xm:
        notes.append("the cubic part of eps has x-monomials (%s); an f-preserving change "
                     "of coordinates removes them" % _monomial_list(Jet(3, 3, xm, pair.mode)))
    phi, ap = adapt_coordinates(pair)
    curves = None
    try:
        curves = _determined(_cusp_curves_work(ap.f, ap.g, K), K)
    except LiftFailure as e:
        reasons.append(str(e))
    return ExceptionalReport(not reasons, reasons, notes, cone, curves, phi)


# ideal and straightening --------------------------------------------------------------

@dataclass
class CuspIdealCertificate:
    """Two-way membership between the tangency generators and <x^2 y, x^2 z, yz>."""
    model_in_tangency: list      # DecompositionWitness per model generator
    tangency_in_model: list      # DecompositionWitness per tangency generator
    order: int

    def to_dict(self):
        def rows(ws):
            return [{k: r.to_str() for k, r in sorted(w.r.items())} for w in ws]
        return {"order": self.order,
                "model_in_tangency": [{"%d%d" % (i + 1, j + 1): v for (i, j), v in d.items()}
                                      for d in rows(self.model_in_tangency)],
                "tangency_in_model": [{"m%d" % j: v for (_, j), v in d.items()}
                                      for d in rows(self.tangency_in_model)]}


def cusp_ideal_check(pair, order=None):
    """Certificate that I(f, g) = <x^2 y, x^2 z, yz> through the order."""
    K = pair.order if order is None else order
    mode = pair.mode
    ideal = tangency_generators(pair.f.promote(K + 1), pair.g.promote(K + 1))
    keys = sorted(ideal.gens)
    hs = {k: ideal.gens[k].truncate(K) for k in keys}
    model = model_generators(K, mode)
    mdict = {(0, j + 1): m for j, m in enumerate(model)}
    fwd, back = [], []
    dec = Decomposer([hs[k] for k in keys], K)
    for j, m in enumerate(model):
        try:
            r = dec.solve(m)
        except NotInIdeal as e:
            raise NotInIdeal("model generator %s is not in the tangency ideal"
                             % m.to_str(), degree=e.degree, residual=e.residual,
                             witness={"generator": m.to_str()}) from None
        fwd.append(DecompositionWitness(dict(zip(keys, r)), m, hs, K))
    dec = Decomposer(model, K)
    for k in keys:
        try:
            r = dec.solve(hs[k])
        except NotInIdeal as e:
            raise NotInIdeal("tangency generator h_%d%d is not in <x^2 y, x^2 z, yz>"
                             % (k[0] + 1, k[1] + 1), degree=e.degree, residual=e.residual,
                             witness={"generator": [k[0] + 1, k[1] + 1]}) from None
        back.append(DecompositionWitness({(0, j + 1): rj for j, rj in enumerate(r)}, hs[k],
                                         mdict, K))
    return CuspIdealCertificate(fwd, back, K)


def cusp_straighten(pair, order=None):
    """phi with f o phi = f whose transformed tangency curves are the axes.

    Axis x_j is handled by x -> (x_i - c_i(x_j), (1 + u) x_j), where u solves
    (1 + u)^p - 1 = (R - R(x_i - c_i)) / x_j^p for the remaining part R of f,
    with p = 3 on the x-axis and p = 2 on the other two.
    """
    K = pair.order if order is None else order
    mode = pair.mode
    W = K + 4
    F = model_f(W, mode)
    G = pair.g.promote(W)
    total = DiffeoJet.identity(3, W, mode)
    for j in (2, 1, 0):
        Gcur = total.pullback(G).promote(W)
        curves = _cusp_curves_work(F, Gcur, W - 2, K - 3)
        c = list(next(tc for tc in curves if tc.axis == j).curve.components)
        if all(_nil(ck) for k, ck in enumerate(c) if k != j):
            continue
        p = 3 if j == 0 else 2
        rest = F - Jet.var(j, 3, W, mode) ** p
        step = straighten_axis_map(rest, j, [ck.promote(W) for ck in c], p, 3, W, mode)
        total = total.compose(step.inverse().promote(W)).promote(W)
    phi = total.truncate(K)
    fK = model_f(K, mode)
    if not phi.pullback(fK).equals(fK):
        raise AssertionError("cusp_straighten self-check failed: f o phi != f")
    for tc in _cusp_curves_work(F, total.pullback(G), K, K - 3):
        for k, ck in enumerate(tc.curve.components):
            if k != tc.axis and not _nil(ck, G):
                raise AssertionError("cusp_straighten self-check failed: %s-curve not straight"
                                     % AXES[tc.axis])
    return phi


# equivalence ----------------------------------------------------------------------

@dataclass
class CuspNormal:
    phi: DiffeoJet        # p o phi is the straightened pair
    pair: CuspPair
    restrictions: list    # g along the x, y, z axes (jets in t)


def axis_restrictions(g, order):
    mode = g.mode
    t = Jet.var(0, 1, order, mode)
    zero = Jet.zero(1, order, mode)
    out = []
    for j in range(3):
        subst = [zero, zero, zero]
        subst[j] = t
        out.append(g.with_order(order).compose(subst))
    return out


def cusp_normalize(f, g, order=None):
    K = min(f.order, g.order) if order is None else order
    phi, pair = cusp_form(f, g, K)
    rep = exceptional_check(pair, K)
    if not rep:
        raise NotExceptional("not an exceptional pair of cusps: " + "; ".join(rep.reasons),
                             {"reasons": rep.reasons, "split": rep.split_directions})
    phi = phi.compose(rep.adapted).truncate(K)
    pair = CuspPair.from_jets(*phi.pullback_many([f.with_order(K), g.with_order(K)]), K)
    s = cusp_straighten(pair, K)
    phi = phi.compose(s).truncate(K)
    pair = CuspPair.from_jets(*phi.pullback_many([f.with_order(K), g.with_order(K)]), K)
    return CuspNormal(phi, pair, axis_restrictions(pair.g, K))


def _unit_roots(mode):
    if mode == EXACT:
        return [C.convert(1, mode)]
    return [cmath.exp(2j * cmath.pi * k / 3) for k in range(3)]


def _scaled(v, s):
    return Jet(1, v.order, {e: c * s ** e[0] for e, c in v.terms.items()}, v.mode)


def _first_difference(a, b):
    d = (a - b)
    if _nil(d, a):
        return None
    return min(e[0] for e, c in d.terms.items() if not _nil(Jet(1, d.order, {e: c}, d.mode), a))


def cusp_equivalent(p0, p1, order=None):
    """phi with (f0 o phi, g0 o phi) = (f1, g1) through the order, or NotEquivalent.

    Both pairs are normalized and straightened; the coefficients lam, mu, nu
    and the restrictions of g to the three axes are compared up to the
    symmetries x -> w x (w^3 = 1), y -> -y, z -> -z.  The remaining
    conjugacy is found with the path method when g1 - g0 lies in a common
    tangency ideal, otherwise by successive f-preserving corrections.
    """
    (f0, g0), (f1, g1) = p0, p1
    K = min(f0.order, g0.order, f1.order, g1.order) if order is None else order
    N0, N1 = cusp_normalize(f0, g0, K), cusp_normalize(f1, g1, K)
    mode = N0.pair.mode
    a, b = N0.pair, N1.pair
    for name in ("lam", "mu", "nu"):
        if not C.is_zero(getattr(a, name) - getattr(b, name), mode):
            raise NotEquivalent("the cusp pairs have different %s" % name,
                                {"stage": "invariants", name: [str(getattr(a, name)),
                                                               str(getattr(b, name))]})
    signs = {0: _unit_roots(mode), 1: [1, -1], 2: [1, -1]}
    chosen = []
    for j in range(3):
        r0, r1 = N0.restrictions[j], N1.restrictions[j]
        best = None
        for s in signs[j]:
            d = _first_difference(r0, _scaled(r1, s))
            if d is None:
                chosen.append(s)
                break
            best = d if best is None else max(best, d)
        else:
            raise NotEquivalent("the restrictions of g to the %s-axis differ" % AXES[j],
                                {"stage": "invariants", "axis": AXES[j], "degree": best})
    S = DiffeoJet([Jet.var(j, 3, K, mode) * C.convert(chosen[j], mode) for j in range(3)])
    Sinv = DiffeoJet([Jet.var(j, 3, K, mode) * (1 / C.convert(chosen[j], mode))
                      for j in range(3)])
    fK = model_f(K, mode)
    gA = a.g.with_order(K)
    gB = S.pullback(b.g.with_order(K))
    try:
        chi = conjugate_by_path(fK, gA, gB, K)
    except (HypothesisFailed, JetError):
        try:
            chi = conjugate_preserving(fK, gA, gB, K)
        except HypothesisFailed as e:
            raise NotEquivalent("no f-preserving conjugacy through order %d: %s" % (K, e),
                                {"stage": "conjugation", "degree": e.witness.get("degree"),
                                 "formal": True}) from None
    phi = N0.phi.compose(chi).compose(Sinv).compose(N1.phi.inverse()).truncate(K)
    pf, pg = phi.pullback_many([f0.with_order(K), g0.with_order(K)])
    if not pf.equals(f1.with_order(K)) or not pg.equals(g1.with_order(K)):
        raise AssertionError("cusp_equivalent self-check failed")
    return phi
