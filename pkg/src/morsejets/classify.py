"""Invariants and equivalence tests for generic pairs of Morse functions.

All pairs are first brought to a normalized form: f = sum x_i^2, g with
diagonal quadratic part and the coordinate axes as tangency curves.  The
restriction of g to the axes then carries the invariants.  Every decision is
formal: it holds through the working order K and says nothing beyond it.
"""

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np
import sympy

from . import coeff as C
from . import linalg as LA
from .coeff import EXACT, FLOAT
from .errors import (NotEquivalent, NotQGeneric, NotAFold, FieldExtensionRequired,
                     HypothesisFailed, JetError, NotGeneric)
from .jet import Jet, DiffeoJet, CurveJet, compose, solve_implicit, invert_scalar_jet
from .normal_forms import diagonalize_pair
from .tangency import straighten


# normalization --------------------------------------------------------------------

@dataclass
class NormalizedPair:
    """phi with f o phi = F = sum x_i^2 and g o phi = G whose tangency curves are the axes."""
    phi: DiffeoJet
    F: Jet
    G: Jet
    lams: list
    order: int

    @property
    def n(self):
        return self.F.nvars

    @property
    def mode(self):
        return self.F.mode

    def axis_restriction(self, j):
        """G along the j-th axis, as a jet in t."""
        n = self.n
        terms = {}
        for e, c in self.G.terms.items():
            if all(e[k] == 0 for k in range(n) if k != j):
                terms[(e[j],)] = c
        return Jet(1, self.order, terms, self.mode)


def normalize_pair(f, g, order=None):
    K = min(f.order, g.order) if order is None else order
    phi1, lams = diagonalize_pair(f, g, K)
    n, mode = f.nvars, f.mode
    F = sum((Jet.var(i, n, K, mode) ** 2 for i in range(n)), Jet.zero(n, K, mode))
    g1 = phi1.pullback(g.with_order(K))
    phi2 = straighten(F, g1, K)
    phi = phi1.compose(phi2)
    G = phi.pullback(g.with_order(K))
    return NormalizedPair(phi, F, G, list(lams), K)


def _flip(v):
    """v(-t)."""
    return Jet(1, v.order, {e: (-c if e[0] % 2 else c) for e, c in v.terms.items()}, v.mode)


def canonical_sign(v):
    """(sign, v(sign t)) with the lowest odd coefficient lexicographically positive."""
    for e in sorted(v.terms):
        if e[0] % 2:
            if C.lex_positive(v.terms[e], v.mode):
                return 1, v
            return -1, _flip(v)
    return 1, v


def _sort_key(lam, mode):
    if mode == FLOAT:
        c = C.to_complex(lam)
        return (round(c.real, 8), round(c.imag, 8))
    return C.lex_key(lam)


def _coeff_list(v):
    return [v.coeff((k,)) for k in range(v.order + 1)]


# R-classification -----------------------------------------------------------------

@dataclass
class RRecord:
    axis: int
    lam: object
    u: Jet
    v: Jet
    sign: int = 1

    def to_dict(self):
        return {"axis": self.axis + 1, "lambda": str(self.lam),
                "u": _jet_coeffs(self.u), "v": _jet_coeffs(self.v)}


def _jet_coeffs(v):
    fmt = C.format_exact if v.mode == EXACT else C.format_float
    return [fmt(c) for c in _coeff_list(v)]


@dataclass
class RInvariant:
    records: list
    order: int
    mode: str = EXACT

    def key(self):
        return [tuple(_coeff_list(r.v)) for r in self.records]

    def __eq__(self, other):
        if not isinstance(other, RInvariant) or len(self.records) != len(other.records):
            return False
        return self.first_difference(other) is None

    def first_difference(self, other):
        """None, or (record index, degree, value here, value there)."""
        K = min(self.order, other.order)
        for i, (a, b) in enumerate(zip(self.records, other.records)):
            for k in range(K + 1):
                x, y = a.v.coeff((k,)), b.v.coeff((k,))
                if not C.is_zero(x - y, self.mode):
                    return (i, k, x, y)
        return None

    def to_dict(self):
        return {"order": self.order, "records": [r.to_dict() for r in self.records]}


def _records(np_):
    recs = []
    t2 = Jet(1, np_.order, {(2,): 1}, np_.mode)
    for j in range(np_.n):
        s, v = canonical_sign(np_.axis_restriction(j))
        recs.append(RRecord(j, np_.lams[j], t2, v, s))
    recs.sort(key=lambda r: _sort_key(r.lam, np_.mode))
    return recs


def r_invariants(f, g, order=None):
    """Canonical restrictions (t^2, v_j) of the pair to its tangency curves."""
    np_ = normalize_pair(f, g, order)
    return RInvariant(_records(np_), np_.order, np_.mode)


def r_equivalent(p0, p1, order=None, return_parts=False):
    """phi with (f0 o phi, g0 o phi) = (f1, g1) through the order.

    Raises NotEquivalent naming the first differing axis and coefficient.
    """
    from .moser import conjugate_by_path
    (f0, g0), (f1, g1) = p0, p1
    K = min(f0.order, g0.order, f1.order, g1.order) if order is None else order
    if f0.nvars != f1.nvars:
        raise NotEquivalent("different dimensions", witness={"n": [f0.nvars, f1.nvars]})
    N0, N1 = normalize_pair(f0, g0, K), normalize_pair(f1, g1, K)
    R0, R1 = _records(N0), _records(N1)
    mode, n = N0.mode, N0.n
    for a, b in zip(R0, R1):
        if not C.is_zero(a.lam - b.lam, mode):
            raise NotEquivalent("eigenvalue multisets differ",
                                witness={"lambda0": [str(r.lam) for r in R0],
                                         "lambda1": [str(r.lam) for r in R1]})
    diff = RInvariant(R0, K, mode).first_difference(RInvariant(R1, K, mode))
    if diff is not None:
        i, k, x, y = diff
        raise NotEquivalent("restrictions differ on the curve with lambda = %s" % R0[i].lam,
                            witness={"curve": i + 1, "lambda": str(R0[i].lam),
                                     "degree": k, "coefficient0": str(x),
                                     "coefficient1": str(y)})
    # S: axis a of N0 -> axis b of N1 with sign s0 * s1
    M = [[C.convert(0, mode)] * n for _ in range(n)]
    for a, b in zip(R0, R1):
        M[b.axis][a.axis] = C.convert(a.sign * b.sign, mode)
    S = DiffeoJet.from_matrix(M, K, mode)
    G1s = S.pullback(N1.G)
    psi = conjugate_by_path(N0.F, N0.G, G1s, K)
    Sinv = DiffeoJet.from_matrix(LA.transpose(M), K, mode)
    phi = N0.phi.compose(psi).compose(Sinv).compose(N1.phi.inverse())
    ff, gg = phi.pullback_many([f0.with_order(K), g0.with_order(K)])
    if not ff.equals(f1.with_order(K), K) or not gg.equals(g1.with_order(K), K):
        raise AssertionError("r_equivalent: composition check failed")
    if return_parts:
        return phi, {"normal0": N0, "normal1": N1, "path": psi}
    return phi


# involutions and holonomy ----------------------------------------------------------

def involution(f1d, order=None):
    """The other root i(t) of f(i(t)) = f(t): i(0) = 0, i'(0) = -1."""
    if f1d.nvars != 1:
        raise JetError("involution needs a one-variable jet")
    if f1d.valuation() != 2 or not C.is_zero(f1d.constant(), f1d.mode):
        raise NotGeneric("involution needs a Morse germ in one variable (valuation 2)",
                         witness={"valuation": f1d.valuation()})
    K = f1d.order if order is None else order
    mode = f1d.mode
    W = K + 1
    # Q(t, s) = (f(s) - f(t)) / (s - t)
    terms = {}
    for (k,), c in f1d.with_order(W).terms.items():
        for a in range(k):
            e = (a, k - 1 - a)
            terms[e] = terms.get(e, 0) + c
    Q = Jet(2, K, terms, mode)
    i = solve_implicit(Q, u_index=1).truncate(K)
    if not compose(f1d.with_order(K), [i]).equals(f1d.with_order(K), K):
        raise AssertionError("involution self-check failed: f o i != f")
    if not compose(i, [i]).equals(Jet.var(0, 1, K, mode), K):
        raise AssertionError("involution self-check failed: i o i != id")
    return i


def _holonomy(vj, vn, order, branch=1):
    """u(t) solving v_n(u(t)) = v_j(branch * t) with u'(0) principal.

    This is (phi^G_nj)^{-1} o phi^F_nj in coordinates where f = t^2 on both
    curves, so that g(alpha_j(t)) = g(phi_njn(alpha_n(t))).
    """
    mode = vj.mode
    K = order
    lj, ln = vj.coeff((2,)), vn.coeff((2,))
    rho = C.principal_sqrt(lj / ln, mode)
    if rho is None:
        raise FieldExtensionRequired("the holonomy linear part sqrt(%s) is not in Q(i); "
                                     "use float mode" % (lj / ln),
                                     witness={"ratio": str(lj / ln)})
    W = K + 2
    if branch == -1:
        vj = _flip(vj)
    t = Jet.var(0, 2, W, mode)
    z = Jet.var(1, 2, W, mode)
    lhs = compose(vn.with_order(W), [t * (z + rho)]) - compose(vj.with_order(W), [t])
    F = lhs.divide_monomial((2, 0))
    zt = solve_implicit(F, u_index=1)
    tt = Jet.var(0, 1, K, mode)
    return (tt * (zt.promote(K) + rho)).truncate(K)


def _canonical_curves(np_):
    """Axis indices of a normalized pair in canonical (lambda-sorted) order."""
    return sorted(range(np_.n), key=lambda j: _sort_key(np_.lams[j], np_.mode))


def holonomy_composite(f, g, j, order=None, branch=1):
    """phi_njn on the last curve T_n, for the curve T_j (1-based, canonical order)."""
    np_ = normalize_pair(f, g, order)
    idx = _canonical_curves(np_)
    n = np_.n
    if not 1 <= j < n:
        raise ValueError("curve index must be between 1 and n-1")
    vj = np_.axis_restriction(idx[j - 1])
    vn = np_.axis_restriction(idx[-1])
    return _holonomy(vj, vn, np_.order, branch)


@dataclass
class FInvariant:
    i_f: Jet
    i_g: Jet
    composites: dict
    ratios: dict
    last: int
    order: int

    def to_dict(self):
        return {"last_curve": self.last + 1, "order": self.order,
                "i_f": _jet_coeffs(self.i_f), "i_g": _jet_coeffs(self.i_g),
                "composites": {str(j + 1): _jet_coeffs(v) for j, v in self.composites.items()},
                "ratios": {str(j + 1): str(r) for j, r in self.ratios.items()},
                "note": "formal invariant: equivalence is decided through the order only"}


def _f_invariant_np(np_, last, branches=None):
    n = np_.n
    vn = np_.axis_restriction(last)
    t2 = Jet(1, np_.order, {(2,): 1}, np_.mode)
    i_f = involution(t2)
    i_g = involution(vn)
    comps, ratios = {}, {}
    for j in range(n):
        if j == last:
            continue
        b = 1 if branches is None else branches[j]
        vj = np_.axis_restriction(j)
        comps[j] = _holonomy(vj, vn, np_.order, b)
        ratios[j] = np_.lams[j] / np_.lams[last]
    # the top coefficient of each map depends on degree K + 1 of g
    Kv = np_.order - 1
    comps = {j: v.truncate(Kv) for j, v in comps.items()}
    return FInvariant(i_f.truncate(Kv), i_g.truncate(Kv), comps, ratios, last, Kv)


def f_invariant(f, g, order=None):
    """Inv = ((i_f, i_g) on T_n, (phi_njn)_{j<n}), T_n last in canonical order.

    The maps are reported through order K - 1: their degree-K coefficients
    would need the (K + 1)-jet of the pair.
    """
    np_ = normalize_pair(f, g, order)
    return _f_invariant_np(np_, _canonical_curves(np_)[-1])


def _to_sym(c):
    if isinstance(c, complex):
        return sympy.Float(c.real) + sympy.I * sympy.Float(c.imag)
    re, im = C.re_im(c)
    re = sympy.Rational(int(re.numerator), int(re.denominator))
    im = sympy.Rational(int(im.numerator), int(im.denominator))
    return re + sympy.I * im


def _sym_exact(x):
    """Exact Q(i) coefficient from a sympy number (floats are rationalized)."""
    x = sympy.expand(sympy.sympify(x))
    if x.has(sympy.Float):
        x = sympy.nsimplify(x, rational=True)
    return C.to_exact(x)


def _canon(x):
    return _to_sym(_sym_exact(x))


def _series_mul(a, b, K):
    out = [sympy.Integer(0)] * (K + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(min(len(b), K + 1 - i)):
            if b[j] != 0:
                out[i + j] += x * b[j]
    return out


def _series_compose(b, psi, K):
    """b(psi(t)) through t^K for coefficient lists (psi[0] = 0)."""
    out = [sympy.Integer(0)] * (K + 1)
    power = [sympy.Integer(1)] + [sympy.Integer(0)] * K
    for m in range(1, K + 1):
        power = _series_mul(power, psi, K)
        if m < len(b) and b[m] != 0:
            for k in range(K + 1):
                out[k] += b[m] * power[k]
    return out


def _pick_root(constraints, c1, mode):
    """A nonzero common root of the constraint numerators, or None."""
    if not constraints:
        return sympy.Integer(1)
    if mode == EXACT:
        g = None
        for _, p in constraints:
            g = p if g is None else sympy.gcd(g, p)
        g = sympy.Poly(g, c1)
        while g.degree() > 0 and g.eval(0) == 0:
            g = sympy.Poly(sympy.quo(g.as_expr(), c1), c1)
        if g.degree() <= 0:
            return None
        _, facs = sympy.factor_list(g.as_expr(), c1, gaussian=True)
        for fac, _ in facs:
            fp = sympy.Poly(fac, c1)
            if fp.degree() == 1:
                a, b = fp.all_coeffs()
                return _canon(-b / a)
        raise FieldExtensionRequired("the conjugating map needs an irrational linear "
                                     "coefficient", witness={"polynomial": str(g.as_expr())})
    first = sympy.Poly(constraints[0][1], c1)
    for r in first.nroots():
        if abs(complex(r)) < 1e-12:
            continue
        if all(abs(complex(p.subs(c1, r))) <= 1e-6 * max(1.0, float(sum(
                abs(complex(x)) for x in sympy.Poly(p, c1).all_coeffs())))
               for _, p in constraints):
            return r
    return None


def conjugate_maps(maps, order):
    """psi with B o psi = psi o A for every pair (A, B) of one-variable jets.

    Solved degree by degree; the linear coefficient stays symbolic until the
    end (the equations are linear in every higher coefficient).  Raises
    NotEquivalent with the first obstructed degree.
    """
    K = order
    mode = maps[0][0].mode
    c1 = sympy.Symbol("c1")
    A = [[_to_sym(a.coeff((k,))) for k in range(K + 1)] for a, _ in maps]
    B = [[_to_sym(b.coeff((k,))) for k in range(K + 1)] for _, b in maps]
    tol = C.get_tolerance()

    def zero(x):
        if mode == EXACT:
            return x == 0
        return abs(complex(x)) <= tol * 1e3

    for a, b in zip(A, B):
        if not zero(a[1] - b[1]):
            raise NotEquivalent("linear parts differ", witness={"degree": 1,
                                "linear0": str(a[1]), "linear1": str(b[1])})
    psi = [sympy.Integer(0), c1]
    constraints = []
    for k in range(2, K + 1):
        ck = sympy.Symbol("c%d" % k)
        trial = psi + [ck]
        eqs = []
        for a, b in zip(A, B):
            lhs = _series_compose(b, trial, k)[k]
            rhs = _series_compose(trial, a, k)[k]
            e = sympy.expand(lhs - rhs)
            eqs.append((sympy.expand(e.coeff(ck)), sympy.expand(e.subs(ck, 0))))
        val = None
        for co, rest in eqs:
            if not zero(co):
                val = sympy.cancel(-rest / co)
                break
        if val is None:
            val = sympy.Integer(0)
        for co, rest in eqs:
            res = sympy.cancel(co * val + rest)
            num = sympy.numer(sympy.together(res))
            num = sympy.expand(num)
            if num != 0 and not (mode == FLOAT and all(
                    zero(x) for x in sympy.Poly(num, c1).all_coeffs())):
                constraints.append((k, num))
                if _pick_root(constraints, c1, mode) is None:
                    raise NotEquivalent("conjugacy equations obstructed at degree %d" % k,
                                        witness={"degree": k})
        psi.append(val)
    root = _pick_root(constraints, c1, mode)
    if root is None:
        raise NotEquivalent("no admissible linear coefficient", witness={"degree": 1})
    coeffs = [_canon(sympy.cancel(x.subs(c1, root)))
              if mode == EXACT else complex(sympy.N(x.subs(c1, root))) for x in psi]
    terms = {(k,): (C.to_exact(c) if mode == EXACT else c) for k, c in enumerate(coeffs)
             if k > 0}
    out = Jet(1, K, terms, mode)
    for a, b in maps:
        if not compose(b.with_order(K), [out]).equals(compose(out, [a.with_order(K)]), K):
            raise AssertionError("conjugate_maps self-check failed")
    return out


def f_equivalent(p0, p1, order=None):
    """psi on T_n with psi^{-1} o Inv_1 o psi = Inv_0 through order K - 1.

    One psi conjugates both involutions and all holonomy composites at once.
    Every choice of the last curve of p1 and every branch of the holonomy
    transports of p1 is tried; the decision is formal (jet level) only.
    """
    (f0, g0), (f1, g1) = p0, p1
    K = min(f0.order, g0.order, f1.order, g1.order) if order is None else order
    N0, N1 = normalize_pair(f0, g0, K), normalize_pair(f1, g1, K)
    n, mode = N0.n, N0.mode
    if N1.n != n:
        raise NotEquivalent("different dimensions")
    last0 = _canonical_curves(N0)[-1]
    inv0 = _f_invariant_np(N0, last0)
    first_err = None
    for last1 in range(n):
        # match curves through the ratios lambda_j / lambda_n
        others1 = [j for j in range(n) if j != last1]
        match = {}
        for j, r0 in inv0.ratios.items():
            hit = [k for k in others1
                   if C.is_zero(N1.lams[k] / N1.lams[last1] - r0, mode)]
            if len(hit) != 1:
                match = None
                break
            match[j] = hit[0]
        if match is None:
            if first_err is None:
                first_err = NotEquivalent("the ratios lambda_j/lambda_n differ",
                                          witness={"degree": 1})
            continue
        for signs in product((1, -1), repeat=n - 1):
            branches = dict(zip(others1, signs))
            try:
                inv1 = _f_invariant_np(N1, last1, branches)
                maps = [(inv0.i_f, inv1.i_f), (inv0.i_g, inv1.i_g)]
                maps += [(inv0.composites[j], inv1.composites[match[j]]) for j in inv0.composites]
                return conjugate_maps(maps, K - 1)
            except NotEquivalent as e:
                if first_err is None or e.witness.get("degree", 0) > \
                        first_err.witness.get("degree", 0):
                    first_err = e
    raise NotEquivalent("the F-invariants are not conjugate through order %d (%s)"
                        % (K - 1, first_err), witness=dict(first_err.witness,
                                                       formal=True))


# A-classification ---------------------------------------------------------------

@dataclass
class SigmaCurve:
    """Image t -> (f, g)(curve(t)) of a tangency curve in the target plane."""
    curve: CurveJet
    multiplicity: int
    lam: object = None
    axis: int = None

    def tangent_cone(self):
        """Direction (1, lambda) of the leading t^m terms."""
        m = self.multiplicity
        a, b = (c.coeff((m,)) for c in self.curve.components)
        return (a, b)

    def to_dict(self):
        return {"axis": None if self.axis is None else self.axis + 1,
                "lambda": str(self.lam), "multiplicity": self.multiplicity,
                "components": [_jet_coeffs(c) for c in self.curve.components]}


def sigma_multiplicity(curve):
    """Valuation of a parametrized plane curve."""
    return curve.valuation()


def sigma_curves(f, g, order=None):
    np_ = normalize_pair(f, g, order)
    K, mode = np_.order, np_.mode
    t2 = Jet(1, K, {(2,): 1}, mode)
    out = []
    for j in _canonical_curves(np_):
        cv = CurveJet([t2, np_.axis_restriction(j)])
        out.append(SigmaCurve(cv, sigma_multiplicity(cv), np_.lams[j], j))
    return out


def _sym_list(v, K):
    return [_to_sym(v.coeff((k,))) for k in range(K + 1)]


class _ATarget:
    """Bookkeeping for psi o sigma0_i = sigma1_{pi(i)} o r_i, coefficientwise."""

    def __init__(self, v0, v1, K):
        self.K = K
        self.v0 = v0        # sympy coefficient lists of the source curves
        self.v1 = v1        # target curves already permuted
        n = len(v0)
        self.n = n
        # P[i][(a, b)] = t^(2a) * v0_i^b as coefficient list
        self.P = [dict() for _ in range(n)]

    def power(self, i, a, b):
        key = (a, b)
        got = self.P[i].get(key)
        if got is not None:
            return got
        K = self.K
        if b == 0:
            out = [sympy.Integer(0)] * (K + 1)
            if 2 * a <= K:
                out[2 * a] = sympy.Integer(1)
        else:
            out = _series_mul(self.power(i, a, b - 1), self.v0[i], K)
        self.P[i][key] = out
        return out

    def evaluate(self, psi, i, upto):
        out = [sympy.Integer(0)] * (self.K + 1)
        for (a, b), c in psi.items():
            if c == 0 or 2 * (a + b) > upto:
                continue
            p = self.power(i, a, b)
            for k in range(upto + 1):
                if p[k] != 0:
                    out[k] += c * p[k]
        return out

    def residuals(self, psi1, psi2, rho, upto):
        """Coefficient lists of psi2(sigma0_i) - v1_i(r_i), r_i^2 = psi1(sigma0_i)."""
        res = []
        for i in range(self.n):
            S1 = self.evaluate(psi1, i, upto)
            r = [sympy.Integer(0), rho[i]]
            for k in range(2, upto):
                acc = S1[k + 1] - sum((r[a] * r[k + 1 - a] for a in range(2, k)),
                                      sympy.Integer(0))
                r.append(sympy.expand(acc / (2 * rho[i])))
            r += [sympy.Integer(0)] * (self.K + 1 - len(r))
            S2 = self.evaluate(psi2, i, upto)
            V = _series_compose(self.v1[i], r[:upto + 1], upto)
            res.append([sympy.expand(S2[k] - V[k]) for k in range(upto + 1)])
        return res


def _monos(d):
    return [(d - b, b) for b in range(d + 1)]


def _from_sym(x, mode):
    if mode == EXACT:
        return (_sym_exact(x))
    return complex(sympy.N(x))


def _u_roots(P, u, mode):
    """Roots of a univariate polynomial lying in the coefficient field."""
    P = sympy.expand(P)
    if P == 0:
        return [sympy.Integer(k) for k in (0, 1, -1, 2, -2)]
    poly = sympy.Poly(P, u)
    if poly.degree() <= 0:
        return []
    if mode == FLOAT:
        cs = [complex(sympy.N(c)) for c in poly.all_coeffs()]
        return [sympy.sympify(complex(r)) for r in np.roots(cs)]
    out = []
    for fac, _ in sympy.factor_list(P, u, gaussian=True)[1]:
        fp = sympy.Poly(fac, u)
        if fp.degree() == 1:
            a1, a0 = fp.all_coeffs()
            out.append(_canon(-a0 / a1))
    return out


def _linear_stage(lam0, mu, A, B, mode):
    """Linear parts (a, b, c, d) and speeds rho_i matching cones and cubic terms.

    psi = (a X + b Y, c X + d Y) must send the cone of each source curve onto
    the matched target cone (linear in a, b, c, d), and the cubic terms force
    (d - mu_i b) A_i = B_i rho_i^3 with rho_i^2 = a + b lam_i.  On the
    nullspace of the linear conditions only a scale and at most one
    projective parameter remain; both come from the cubic equations.
    """
    n = len(lam0)
    zero = lambda x: C.is_zero(x, mode)
    one = C.convert(1, mode)
    nil = C.convert(0, mode)
    rows = [[-mu[i], -mu[i] * lam0[i], one, lam0[i]] for i in range(n)]
    cubic = []
    for i in range(n):
        if zero(A[i]) and not zero(B[i]):
            return
        if zero(B[i]) and not zero(A[i]):
            rows.append([nil, -mu[i], nil, one])
        elif not zero(A[i]):
            cubic.append(i)
    N = LA.nullspace(rows, 4, mode)
    if not N:
        return
    S = _to_sym
    Ns = [[S(x) for x in v] for v in N]
    if len(Ns) == 1:
        hats = [Ns[0]]
    else:
        u = sympy.Symbol("u")
        line = [Ns[0][k] + u * Ns[1][k] for k in range(4)]
        if len(cubic) >= 2:
            def nd(i):
                return ((line[3] - S(mu[i]) * line[1]) ** 2 * S(A[i]) ** 2,
                        S(B[i]) ** 2 * (line[0] + line[1] * S(lam0[i])) ** 3)
            (n1, d1), (n2, d2) = nd(cubic[0]), nd(cubic[1])
            us = _u_roots(n1 * d2 - n2 * d1, u, mode)
        else:
            us = _u_roots(sympy.Integer(0), u, mode)
        hats = [[sympy.expand(x.subs(u, r)) for x in line] for r in us] + [Ns[1]]
    for hat in hats:
        Lh = [_from_sym(x, mode) for x in hat]
        a, b, c, d = Lh
        if zero(a * d - b * c):
            continue
        if cubic:
            scales = []
            for i in cubic:
                den = B[i] ** 2 * (a + b * lam0[i]) ** 3
                if zero(den):
                    scales = None
                    break
                scales.append((d - mu[i] * b) ** 2 * A[i] ** 2 / den)
            if not scales or zero(scales[0]) or \
                    not all(zero(x - scales[0]) for x in scales):
                continue
            choices = [scales[0]]
        else:
            choices = [one] + [one / (a + b * l) for l in lam0 if not zero(a + b * l)]
        for s in choices:
            L = [s * x for x in Lh]
            a, b, c, d = L
            cones = [a + b * l for l in lam0]
            if any(zero(x) for x in cones):
                continue
            rho = [None] * n
            for i in cubic:
                rho[i] = (d - mu[i] * b) * A[i] / (B[i] * cones[i])
            free = [i for i in range(n) if rho[i] is None]
            roots = {i: C.principal_sqrt(cones[i], mode) for i in free}
            if any(r is None for r in roots.values()):
                continue
            for signs in product((1, -1), repeat=len(free)):
                for i, sg in zip(free, signs):
                    rho[i] = sg * roots[i]
                yield L, list(rho)


def _solve_target(v0, v1, lam0, mu, K, mode):
    """All linear stages, each extended degree by degree; yields (psi1, psi2)."""
    n = len(v0)
    tgt = _ATarget(v0, v1, K)
    a, b, c, d = sympy.symbols("a b c d")
    rho = list(sympy.symbols("r1:%d" % (n + 1)))
    conv = lambda x: _from_sym(x, mode)
    cube = lambda v: conv(v[3]) if K >= 3 else C.convert(0, mode)
    A = [cube(v) for v in v0]
    B = [cube(v) for v in v1]
    found = False
    for L, rv in _linear_stage([conv(x) for x in lam0], [conv(x) for x in mu], A, B, mode):
        found = True
        vals = dict(zip([a, b, c, d] + rho, [_to_sym(x) for x in L + rv]))
        yield from _extend_target(tgt, vals, a, b, c, d, rho, K, mode)
    if not found:
        raise NotEquivalent("unmatchable tangent cones", witness={"degree": 1})


def _extend_target(tgt, vals, a, b, c, d, rho, K, mode):
    n = tgt.n
    psi1 = {(1, 0): vals[a], (0, 1): vals[b]}
    psi2 = {(1, 0): vals[c], (0, 1): vals[d]}
    rv = [vals[r] for r in rho]
    for deg in range(2, K // 2 + 1):
        ps = {m: sympy.Symbol("p_%d_%d" % m) for m in _monos(deg)}
        qs = {m: sympy.Symbol("q_%d_%d" % m) for m in _monos(deg)}
        t1, t2 = dict(psi1), dict(psi2)
        t1.update(ps)
        t2.update(qs)
        top = min(2 * deg + 1, K)
        res = tgt.residuals(t1, t2, rv, top)
        eqs = [res[i][k] for i in range(n) for k in range(2 * deg, top + 1)]
        syms = list(ps.values()) + list(qs.values())
        A, rhs = sympy.linear_eq_to_matrix(eqs, syms)
        sol = _particular(A, rhs, mode)
        if sol is None:
            return
        for k, m in enumerate(_monos(deg)):
            psi1[m] = sol[k]
            psi2[m] = sol[len(ps) + k]
    res = tgt.residuals(psi1, psi2, rv, K)
    for i in range(n):
        for k in range(K + 1):
            v = res[i][k]
            if (mode == EXACT and sympy.simplify(v) != 0) or \
                    (mode == FLOAT and abs(complex(sympy.N(v))) > 1e-8):
                return
    yield psi1, psi2


def _particular(A, rhs, mode):
    """Solution of A x = rhs with free unknowns set to zero (None if inconsistent)."""
    rows, cols = A.shape
    if mode == EXACT:
        M = [[(_sym_exact(A[i, j])) for j in range(cols)] for i in range(rows)]
        b = [(_sym_exact(rhs[i])) for i in range(rows)]
    else:
        M = [[complex(sympy.N(A[i, j])) for j in range(cols)] for i in range(rows)]
        b = [complex(sympy.N(rhs[i])) for i in range(rows)]
    x = LA.lstsq_min_norm(M, b, mode)
    if x is None:
        return None
    return [_to_sym(v) for v in x]


def _psi_jets(psi1, psi2, K, mode):
    conv = (lambda v: (_sym_exact(v))) if mode == EXACT else \
        (lambda v: complex(sympy.N(v)))
    comps = []
    for psi in (psi1, psi2):
        comps.append(Jet(2, K, {m: conv(v) for m, v in psi.items() if v != 0}, mode))
    return DiffeoJet(comps)


def a_equivalent(p0, p1, order=None):
    """(phi, psi) with psi o (f0, g0) o phi = (f1, g1) through the order.

    psi is searched so that it carries the sigma-curves of p0 onto those of
    p1: every matching of the curves is tried, the linear stage (tangent
    cones, reparametrization speeds and the cubic terms) is solved
    exactly, and higher degrees are solved linearly, free coefficients set to
    zero.  The source map then comes from r_equivalent.
    """
    (f0, g0), (f1, g1) = p0, p1
    K = min(f0.order, g0.order, f1.order, g1.order) if order is None else order
    N0, N1 = normalize_pair(f0, g0, K), normalize_pair(f1, g1, K)
    n, mode = N0.n, N0.mode
    if N1.n != n:
        raise NotEquivalent("different dimensions")
    v0 = [_sym_list(N0.axis_restriction(j), K) for j in range(n)]
    v1 = [_sym_list(N1.axis_restriction(j), K) for j in range(n)]
    lam0 = [_to_sym(l) for l in N0.lams]
    lam1 = [_to_sym(l) for l in N1.lams]
    last = None
    for perm in permutations(range(n)):
        try:
            for psi1, psi2 in _solve_target(v0, [v1[k] for k in perm], lam0,
                                            [lam1[k] for k in perm], K, mode):
                Psi = _psi_jets(psi1, psi2, K, mode)
                q0 = [compose(P, [f0.with_order(K), g0.with_order(K)]) for P in Psi.components]
                try:
                    phi = r_equivalent((q0[0], q0[1]), (f1, g1), K)
                except (NotEquivalent, HypothesisFailed, FieldExtensionRequired) as e:
                    last = e
                    continue
                return phi, Psi
        except NotEquivalent as e:
            last = e
    raise NotEquivalent("no plane diffeomorphism matches the sigma-curves through order %d"
                        % K, witness={"reason": str(last) if last else "no matching",
                                      "formal": True})


# Q-classification ----------------------------------------------------------------

@dataclass
class QNormalForm:
    pairs: list        # [(lambda_i, alpha_i)]
    normalized: bool = True

    def key(self):
        return tuple((C.lex_key(l), C.lex_key(a)) for l, a in self.pairs)

    def __eq__(self, other):
        if not isinstance(other, QNormalForm) or len(self.pairs) != len(other.pairs):
            return False
        mode = FLOAT if any(isinstance(x, complex) for p in self.pairs for x in p) else EXACT
        return all(C.is_zero(a - c, mode) and C.is_zero(b - d, mode)
                   for (a, b), (c, d) in zip(self.pairs, other.pairs))

    def to_dict(self):
        return {"lambda": [str(l) for l, _ in self.pairs],
                "alpha": [str(a) for _, a in self.pairs],
                "alpha1_normalized": self.normalized,
                "residual_symmetry": "sign of each alpha_i (i > 1) chosen lexicographically least"}


def q_normal_form(f, g, order=None):
    """(lambda_i, alpha_i) with h = g/f ~ sum(lambda x^2 + alpha x^3) / sum x^2, alpha_1 = 1."""
    K = 3 if order is None else min(order, 3)
    K = max(K, 3)
    inv = r_invariants(f.with_order(max(f.order, K)).truncate(K),
                       g.with_order(max(g.order, K)).truncate(K), K)
    mode = inv.mode
    lams = [r.lam for r in inv.records]
    alphas = [r.v.coeff((3,)) for r in inv.records]
    for i, a in enumerate(alphas):
        if C.is_zero(a, mode):
            raise NotQGeneric("alpha_%d vanishes" % (i + 1),
                              witness={"i": i + 1, "lambda": str(lams[i])})
    a1 = alphas[0]
    out = [(lams[0], C.convert(1, mode))]
    for l, a in zip(lams[1:], alphas[1:]):
        x = a / a1
        if C.lex_key(-x) < C.lex_key(x):
            x = -x
        out.append((l, x))
    return QNormalForm(out)


# restriction to the cone f = 0 ----------------------------------------------------

def cone_restriction_form(f, g):
    """mu_i = lambda_i - lambda_n (i < n), sorted: g on {f = 0} ~ sum mu_i x_i^2."""
    _, lams = diagonalize_pair(f.truncate(2), g.truncate(2), 2)
    mode = f.mode
    lams = sorted(lams, key=lambda l: _sort_key(l, mode))
    ln = lams[-1]
    mus = [l - ln for l in lams[:-1]]
    return sorted(mus, key=lambda m: _sort_key(m, mode))


# folds ---------------------------------------------------------------------------

def fold_normalize(f, g, order=None):
    """(phi, Phi) with f o Phi = x_1 and g o Phi = phi(x_1) + sum_{i>1} x_i^2."""
    from .normal_forms import parametrized_morse
    from .errors import NotMorse
    K = min(f.order, g.order) if order is None else order
    n, mode = f.nvars, f.mode
    lin = [f.coeff(tuple(1 if k == i else 0 for k in range(n))) for i in range(n)]
    if all(C.is_zero(c, mode) for c in lin):
        raise NotAFold("f is singular at 0", witness={"df0": [str(c) for c in lin]})
    if not C.is_zero(f.constant(), mode) or not C.is_zero(g.constant(), mode):
        raise NotAFold("f and g must vanish at 0")
    k = next(i for i, c in enumerate(lin) if not C.is_zero(c, mode))
    # coordinates (f, x_others) -> x
    comps = [f.with_order(K)] + [Jet.var(i, n, K, mode) for i in range(n) if i != k]
    Phi1 = DiffeoJet(comps).inverse()
    g1 = Phi1.pullback(g.with_order(K))
    if n == 1:
        return g1, Phi1
    others = list(range(1, n))
    for i in others:
        if not C.is_zero(g1.diff(i).constant(), mode):
            raise NotAFold("the tangency locus does not pass through 0",
                           witness={"variable": i + 1})
    try:
        Phi2, rest = parametrized_morse(g1, others, K)
    except NotMorse as e:
        raise NotAFold("the tangency locus is not a simple smooth curve transverse to "
                       "{f = 0} (degenerate Hessian in the fibre directions)",
                       witness=e.witness) from None
    except FieldExtensionRequired as e:
        raise FieldExtensionRequired("fibre Hessian is not congruent to the identity over "
                                     "Q(i); use float mode", witness=e.witness) from None
    Phi = Phi1.compose(Phi2)
    phi = Jet(1, K, {(e[0],): c for e, c in rest.terms.items()
                     if all(x == 0 for x in e[1:])}, mode)
    x1 = Jet.var(0, n, K, mode)
    target = compose(phi, [x1]) + sum((Jet.var(i, n, K, mode) ** 2 for i in others),
                                      Jet.zero(n, K, mode))
    ff, gg = Phi.pullback_many([f.with_order(K), g.with_order(K)])
    if not ff.equals(x1, K) or not gg.equals(target, K):
        raise AssertionError("fold_normalize self-check failed")
    return phi, Phi


def fold_foliation_form(phi):
    """For a regular g (phi'(0) != 0) the foliation pair is (x_1, x_1 + sum x_i^2)."""
    return not C.is_zero(phi.coeff((1,)), phi.mode)
