"""The path-method engine: ideal membership, homotopy fields and their flows."""

from dataclasses import dataclass, field
import random

import numpy as np

from . import coeff as C
from . import linalg as LA
from .coeff import EXACT, FLOAT
from .errors import NotInIdeal, HypothesisFailed, NotQGeneric, JetError
from .jet import Jet, DiffeoJet, monomials, compose, compose_many, _deg
from .tangency import IdealPresentation, tangency_generators, from_generators


# ideal membership -----------------------------------------------------------------

class Decomposer:
    """Solves a = sum r_p h_p through order K for a fixed generator list.

    The graded solve fixes r degree by degree from the lowest forms of the
    generators, taking the minimum-norm solution of each graded system.  When
    that fails (the lowest forms need not generate the lowest forms of the
    ideal) the full truncated system is eliminated instead, which also
    identifies the first obstructed degree.
    """

    def __init__(self, gens, order):
        gens = list(gens)
        if not gens:
            raise ValueError("empty generator list")
        self.n = gens[0].nvars
        self.mode = gens[0].mode
        self.K = order
        self.gens = [g.with_order(max(g.order, order)).truncate(order) for g in gens]
        self.vals = [g.valuation() for g in self.gens]
        self._graded = {}
        self._full = None

    # unknown r_p monomials of degree k
    def _cols(self, d):
        cols = []
        for p, v in enumerate(self.vals):
            k = d - v
            if k >= 0:
                cols += [(p, m) for m in monomials(self.n, k)]
        return cols

    def _graded_system(self, d):
        got = self._graded.get(d)
        if got is not None:
            return got
        rows = monomials(self.n, d)
        ridx = {m: i for i, m in enumerate(rows)}
        cols = self._cols(d)
        A = [[C.convert(0, self.mode)] * len(cols) for _ in rows]
        lead = [g.degree_part(v) for g, v in zip(self.gens, self.vals)]
        for c, (p, m) in enumerate(cols):
            for e, val in lead[p].terms.items():
                key = tuple(a + b for a, b in zip(e, m))
                A[ridx[key]][c] = val
        got = (rows, cols, A)
        self._graded[d] = got
        return got

    def _mono_jet(self, m):
        return Jet(self.n, self.K, {m: 1}, self.mode)

    def solve_graded(self, a):
        K, n, mode = self.K, self.n, self.mode
        r = [dict() for _ in self.gens]
        resid = a.truncate(K)
        vmin = min(self.vals)
        for d in range(vmin, K + 1):
            part = resid.degree_part(d)
            if part.is_zero():
                continue
            rows, cols, A = self._graded_system(d)
            if not cols:
                return None
            b = [part.coeff(m) for m in rows]
            x = LA.lstsq_min_norm(A, b, mode)
            if x is None:
                return None
            upd = [dict() for _ in self.gens]
            for (p, m), val in zip(cols, x):
                if not C.is_zero(val, mode):
                    upd[p][m] = val
                    r[p][m] = val
            for p, terms in enumerate(upd):
                if terms:
                    resid = resid - Jet(n, K, terms, mode) * self.gens[p]
            if mode == FLOAT:
                resid = Jet(n, K, {e: c for e, c in resid.terms.items() if _deg(e, n) > d},
                            mode)
        if not resid.is_zero():
            return None
        return [Jet(n, K, t, mode) for t in r]

    def solve_full(self, a):
        """Eliminate the whole truncated system degree by degree."""
        K, n, mode = self.K, self.n, self.mode
        a = a.truncate(K)
        cols = []
        for d in range(min(self.vals), K + 1):
            cols += self._cols(d)
        cidx = {c: i for i, c in enumerate(cols)}
        # row (result monomial) -> {column: value}
        rows = {}
        for (p, m), ci in cidx.items():
            g = self.gens[p]
            dm = sum(m)
            for e, val in g.terms.items():
                if _deg(e, n) + dm > K:
                    continue
                key = tuple(x + y for x, y in zip(e, m))
                rows.setdefault(key, {})[ci] = val
        if mode == FLOAT:
            return self._solve_full_float(a, cols, rows)
        elim = LA.Eliminator(mode)
        for d in range(0, K + 1):
            for mono in monomials(n, d):
                row = rows.get(mono, {})
                rhs = a.coeff(mono)
                left = elim.add_row(row, rhs)
                if left is not None and not C.is_zero(left, mode):
                    raise NotInIdeal("not in the ideal: obstruction at degree %d" % d,
                                     degree=d, residual=str(left),
                                     witness={"monomial": list(mono)})
        sol = elim.solution()
        r = [dict() for _ in self.gens]
        for ci, val in sol.items():
            p, m = cols[ci]
            r[p][m] = val
        return [Jet(n, K, t, mode) for t in r]

    def _solve_full_float(self, a, cols, rows):
        K, n, mode = self.K, self.n, self.mode
        allrows = [m for d in range(K + 1) for m in monomials(n, d)]
        A = np.zeros((len(allrows), len(cols)), dtype=complex)
        b = np.zeros(len(allrows), dtype=complex)
        for i, m in enumerate(allrows):
            for ci, val in rows.get(m, {}).items():
                A[i, ci] = complex(val)
            b[i] = complex(a.coeff(m))
        x, *_ = np.linalg.lstsq(A, b, rcond=None) if len(cols) else (np.zeros(0),)
        res = A @ x - b if len(cols) else -b
        scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))
        bad = np.nonzero(np.abs(res) > 1e3 * C.get_tolerance() * scale)[0]
        if len(bad):
            i = int(bad[0])
            d = sum(allrows[i])
            raise NotInIdeal("not in the ideal (float): obstruction at degree %d" % d,
                             degree=d, residual=complex(res[i]),
                             witness={"monomial": list(allrows[i])})
        r = [dict() for _ in self.gens]
        for ci, val in enumerate(x):
            if abs(val) > 0:
                p, m = cols[ci]
                r[p][m] = complex(val)
        return [Jet(n, K, t, mode) for t in r]

    def solve(self, a):
        r = self.solve_graded(a)
        if r is None:
            r = self.solve_full(a)
        return r


@dataclass
class DecompositionWitness:
    """a = sum r[p] * gens[p] through ``order`` (checked on construction)."""
    r: dict
    target: Jet
    gens: dict
    order: int

    def __post_init__(self):
        total = None
        for p, rp in self.r.items():
            term = rp.mul_to(self.gens[p].with_order(max(self.gens[p].order, self.order)),
                             self.order)
            total = term if total is None else total + term
        target = self.target.with_order(self.order)
        if total is None:
            total = Jet.zero(target.nvars, self.order, target.mode, target.nparams)
        if not total.equals(target, self.order):
            raise AssertionError("decomposition witness does not reproduce its target")


def _as_gen_dict(gens):
    if isinstance(gens, IdealPresentation):
        return dict(gens.gens)
    gens = list(gens)
    return {(0, k + 1): g for k, g in enumerate(gens)}


def decompose_in_ideal(a, gens, order=None):
    """Write a = sum r_ij h_ij through the order; raises NotInIdeal otherwise."""
    gd = _as_gen_dict(gens)
    keys = sorted(gd)
    K = a.order if order is None else order
    if K > a.order:
        raise JetError("the target is known only through order %d, not %d" % (a.order, K))
    dec = Decomposer([gd[k] for k in keys], K)
    r = dec.solve(a)
    return DecompositionWitness({k: rk for k, rk in zip(keys, r)}, a, gd, K)


def in_ideal(a, gens, order=None):
    try:
        decompose_in_ideal(a, gens, order)
        return True
    except NotInIdeal:
        return False


def decompose_polynomial_path(a_coeffs, gen_coeffs, order, max_terms=None):
    """Decompose a(t) = sum_p r_p(t) h_p(t) with h_p(t) = sum_s t^s gen_coeffs[s][p].

    ``a_coeffs`` lists the t-coefficients of the target.  The t-coefficients of
    r are found one after another:
    r_e * H_0 = a_e - sum_{s >= 1} r_{e-s} * H_s.
    Terminates once the right-hand side vanishes through the order; raises
    HypothesisFailed if it does not (leading forms varying along the path).
    """
    H0 = gen_coeffs[0]
    dec = Decomposer(H0, order)
    n, mode = H0[0].nvars, H0[0].mode
    P = len(H0)
    rs = []
    max_terms = (order + 2) * max(1, len(gen_coeffs)) if max_terms is None else max_terms
    e = 0
    while True:
        rhs = a_coeffs[e].with_order(order) if e < len(a_coeffs) else Jet.zero(n, order, mode)
        for s in range(1, len(gen_coeffs)):
            if e - s >= 0:
                for p in range(P):
                    rhs = rhs - rs[e - s][p].mul_to(gen_coeffs[s][p].with_order(
                        max(order, gen_coeffs[s][p].order)), order)
        if rhs.is_zero() and e >= len(a_coeffs) and \
                all(all(x.is_zero() for x in rs[e - s]) for s in range(1, len(gen_coeffs))
                    if e - s >= 0):
            break
        if e >= max_terms:
            raise HypothesisFailed("decomposition along the path does not terminate; the "
                                   "leading forms of the generators vary with t",
                                   stage="path-method", witness={"which": "ideal-mismatch"})
        if rhs.is_zero():
            rs.append([Jet.zero(n, order, mode) for _ in range(P)])
        else:
            rs.append(dec.solve(rhs))
        e += 1
    while rs and all(x.is_zero() for x in rs[-1]):
        rs.pop()
    out = []
    for p in range(P):
        terms = {}
        for e, row in enumerate(rs):
            for ex, c in row[p].terms.items():
                terms[ex + (e,)] = c
        out.append(Jet(n, order, terms, mode, nparams=1))
    return out


# homotopy fields and flows ----------------------------------------------------------

@dataclass
class HomotopyField:
    """X = sum X_i d/dx_i + d/dt with components polynomial in t (one parameter)."""
    components: list
    order: int

    @property
    def n(self):
        return len(self.components)

    @property
    def mode(self):
        return self.components[0].mode

    def apply(self, F):
        """X.F for a jet F in (x, t)."""
        F = F.with_params(1)
        out = F.diff(F.nvars).truncate(self.order)
        for i, Xi in enumerate(self.components):
            out = out + Xi.with_params(1).mul_to(F.diff(i), self.order)
        return out.truncate(self.order)

    def valuation(self):
        vals = [X.valuation() for X in self.components if not X.is_zero()]
        return min(vals) if vals else None


def _path(g0, g1):
    return g0.with_params(1) + Jet.param(0, g0.nvars, g0.order, g0.mode) * (g1 - g0).with_params(1)


def path_generators(f, g0, g1):
    """t-coefficients [H0, H1] of h_ij(f, g_t) together with the sorted pairs."""
    I0 = tangency_generators(f, g0)
    I1 = tangency_generators(f, g1)
    pairs = sorted(I0.gens)
    H0 = [I0.gens[p] for p in pairs]
    H1 = [I1.gens[p] - I0.gens[p] for p in pairs]
    return pairs, H0, H1


def path_decomposition(f, g0, g1, order):
    """DecompositionWitness of g1 - g0 over h_ij(f, g_t), coefficients in (x, t)."""
    pairs, H0, H1 = path_generators(f, g0, g1)
    a = (g1 - g0).truncate(order)
    gen_coeffs = [H0] if all(h.is_zero() for h in H1) else [H0, H1]
    r = decompose_polynomial_path([a], gen_coeffs, order)
    gens_t = {p: h0.with_params(1) + Jet.param(0, h0.nvars, h0.order, h0.mode) * h1.with_params(1)
              for p, h0, h1 in zip(pairs, H0, H1)}
    return DecompositionWitness(dict(zip(pairs, r)), a.with_params(1), gens_t, order)


def homotopy_field(f, g0, g1, witness, check=True):
    """Assemble X_i = sum_{j>i} r_ij d_j f - sum_{l<i} r_li d_l f, plus d/dt.

    Then X.f = 0 and X.g_t = -(sum r_ij h_ij) + (g1 - g0) = 0.
    """
    n = f.nvars
    K = witness.order
    mode = f.mode
    df = [d.with_params(1) for d in f.gradient()]
    comps = [Jet.zero(n, K, mode, 1) for _ in range(n)]
    for (i, j), r in witness.r.items():
        r = r.with_params(1)
        comps[i] = comps[i] + r.mul_to(df[j], K)
        comps[j] = comps[j] - r.mul_to(df[i], K)
    comps = [c.truncate(K) for c in comps]
    X = HomotopyField(comps, K)
    if any(c.constant() != 0 if mode == EXACT else abs(c.constant()) > C.get_tolerance()
           for c in (cc.eval_param(0) for cc in comps)) or \
            any(any(sum(e[:n]) == 0 for e in c.terms) for c in comps):
        raise HypothesisFailed("the field does not vanish along the t-axis: f is regular "
                               "and the coefficients r_ij do not vanish at 0",
                               stage="path-method",
                               witness={"which": "f-regular"})
    if check:
        Kc = K - 1
        gt = _path(g0, g1)
        if not X.apply(f.with_params(1)).truncate(Kc).is_zero() and \
                not X.apply(f.with_params(1)).equals(Jet.zero(n, Kc, mode, 1), Kc):
            raise ValueError("witness inconsistent with (f, g0, g1): X.f does not vanish")
        if not X.apply(gt).equals(Jet.zero(n, Kc, mode, 1), Kc):
            raise ValueError("witness inconsistent with (f, g0, g1): X.g does not vanish")
    return X


def _drop_small(J):
    tol = C.get_tolerance() * 1e-3
    return Jet(J.nvars, J.order, {e: c for e, c in J.terms.items() if abs(c) > tol},
               J.mode, J.nparams, _clean=True)


def flow_to_time_one(X, order=None, max_iter=200):
    """phi with F(., 0) o phi = F(., 1) for every first integral F of X.

    psi(x, t) solves d psi/dt = X(psi, t) with psi(x, 1) = x, i.e.
    psi = x - int_t^1 X(psi(x, s), s) ds, and phi = psi(., 0).  Picard
    iteration: exact when X vanishes to second order (each pass fixes one more
    degree), otherwise run in float mode until it settles.
    """
    n = X.n
    K = X.order if order is None else min(order, X.order)
    mode = X.mode
    comps = [c.truncate(K) for c in X.components]
    if all(c.is_zero() for c in comps):
        return DiffeoJet.identity(n, K, mode)
    ident = [Jet.var(i, n, K, mode, 1) for i in range(n)]
    one = C.convert(1, mode)

    def step(psi, k):
        vals = compose_many(comps, [p.with_order(k) for p in psi], k)
        out = []
        for i, v in enumerate(vals):
            I = v.integrate_param()
            span = I.eval_param(one) - I
            out.append((ident[i].truncate(k) - span))
        return out

    v = X.valuation()
    if v is None:
        return DiffeoJet.identity(n, K, mode)
    if v >= 2:
        psi = [p.truncate(1) for p in ident]
        for k in range(2, K + 1):
            psi = step(psi, k)
    else:
        if mode == EXACT:
            raise JetError("exact flow needs a field vanishing to second order at 0; "
                           "the linear part gives a transcendental flow (use float mode)")
        psi = ident
        for _ in range(max_iter):
            new = [_drop_small(p) for p in step(psi, K)]
            if all(a.equals(b, K) for a, b in zip(new, psi)):
                psi = new
                break
            psi = new
        else:
            raise JetError("float flow iteration did not converge")
    phi = [p.eval_param(0).with_params(0).with_order(K) for p in psi]
    return DiffeoJet(phi)


def _ideal_contains(gens_a, gens_b, K):
    """Every generator of b lies in the ideal spanned by a, through K."""
    dec = Decomposer(gens_a, K)
    for h in gens_b:
        if h.truncate(K).is_zero():
            continue
        dec.solve(h.truncate(K))


def conjugate_by_path(f, g0, g1, order=None):
    """phi with f o phi = f and g0 o phi = g1 through the order, by the path method."""
    K = min(f.order, g0.order, g1.order) if order is None else order
    mode = f.mode
    W = K + 2
    f, g0, g1 = (h.promote(W) if h.order < W else h.truncate(W) for h in (f, g0, g1))
    n = f.nvars
    if (g1 - g0).truncate(K).is_zero():
        return DiffeoJet.identity(n, K, mode)
    if n < 2:
        raise HypothesisFailed("a one-variable tangency ideal is zero; g1 - g0 is not in it",
                               stage="path-method", witness={"which": "not-in-ideal"})
    I0 = tangency_generators(f, g0)
    I1 = tangency_generators(f, g1)
    L0 = [I0.gens[p] for p in sorted(I0.gens)]
    L1 = [I1.gens[p] for p in sorted(I1.gens)]
    try:
        _ideal_contains(L0, L1, K)
        _ideal_contains(L1, L0, K)
    except NotInIdeal as e:
        raise HypothesisFailed("the tangency ideals of (f, g0) and (f, g1) differ "
                               "(obstruction at degree %s)" % e.degree, stage="path-method",
                               witness={"which": "ideal-mismatch", "degree": e.degree,
                                        "residual": str(e.residual)})
    try:
        decompose_in_ideal((g1 - g0).truncate(K), I0, K)
    except NotInIdeal as e:
        raise HypothesisFailed("g1 - g0 is not in the tangency ideal (obstruction at degree "
                               "%s)" % e.degree, stage="path-method",
                               witness={"which": "not-in-ideal", "degree": e.degree,
                                        "residual": str(e.residual)})
    wit = path_decomposition(f, g0, g1, K)
    X = homotopy_field(f, g0, g1, wit)
    phi = flow_to_time_one(X, K)
    fK, g0K, g1K = f.truncate(K), g0.truncate(K), g1.truncate(K)
    pf, pg = phi.pullback_many([fK, g0K])
    if not pf.equals(fK, K) or not pg.equals(g1K, K):
        raise AssertionError("conjugate_by_path: composition check failed")
    return phi


# f-preserving conjugation by successive corrections --------------------------------

def preserving_field(f, coeffs, order):
    """Y = -sum c_ij (d_j f d_i - d_i f d_j), so Y.f = 0 and Y.g = sum c_ij h_ij(f, g)."""
    n, mode = f.nvars, f.mode
    df = f.gradient()
    comps = [Jet.zero(n, order, mode) for _ in range(n)]
    for (i, j), c in coeffs.items():
        comps[i] = comps[i] - c.mul_to(df[j], order)
        comps[j] = comps[j] + c.mul_to(df[i], order)
    return comps


def _apply_field(Y, F, order):
    out = Jet.zero(F.nvars, order, F.mode)
    for i, Yi in enumerate(Y):
        out = out + Yi.mul_to(F.diff(i), order)
    return out


def lie_exp(Y, F, order, max_terms=None):
    """F o exp(Y) = sum Y^m F / m! through the order (Y with nilpotent linear part)."""
    cap = max_terms or 4 * (order + 1) * max(1, len(Y))
    out = F.truncate(order)
    term = out
    for m in range(1, cap + 1):
        term = _apply_field(Y, term, order) / m
        if term.is_zero():
            return out
        out = out + term
    raise JetError("Lie series did not terminate: the field has a non-nilpotent linear part")


def exp_diffeo(Y, order):
    n, mode = len(Y), Y[0].mode
    return DiffeoJet([lie_exp(Y, Jet.var(i, n, order, mode), order) for i in range(n)])


def conjugate_preserving(f, g0, g1, order=None, max_steps=None):
    """phi with f o phi = f and g0 o phi = g1, built one correction at a time.

    At each step the lowest-degree part of the residual g1 - g0 o phi is
    written in the tangency ideal of (f, g0 o phi); the matching f-preserving
    field is exponentiated and composed into phi.  Unlike the path method it
    does not need the two tangency ideals to agree.
    """
    K = min(f.order, g0.order, g1.order) if order is None else order
    n, mode = f.nvars, f.mode
    fK, g0K, g1K = (h.with_order(K) for h in (f, g0, g1))
    phi = DiffeoJet.identity(n, K, mode)
    G = g0K
    steps = max_steps or 3 * K
    last, stall = None, 0
    for _ in range(steps):
        r = (g1K - G).truncate(K)
        if r.is_zero():
            break
        d = r.valuation()
        stall = stall + 1 if d == last else 0
        if stall > n + 1:
            raise HypothesisFailed("corrections stall at degree %d" % d, stage="conjugation",
                                   witness={"degree": d})
        last = d
        gens = tangency_generators(fK, G)
        keys = sorted(gens.gens)
        try:
            c = Decomposer([gens.gens[k] for k in keys], d).solve(r.truncate(d))
        except NotInIdeal as e:
            raise NotInIdeal("residual of degree %d is not in the tangency ideal" % d,
                             degree=d, residual=e.residual) from None
        Y = preserving_field(fK, {k: ck.with_order(K) for k, ck in zip(keys, c)}, K)
        step = exp_diffeo(Y, K)
        phi = phi.compose(step).truncate(K)
        G = phi.pullback(g0K)
    else:
        if not (g1K - G).truncate(K).is_zero():
            raise HypothesisFailed("corrections did not converge", stage="conjugation")
    pf, pg = phi.pullback_many([fK, g0K])
    if not pf.equals(fK, K) or not pg.equals(g1K, K):
        raise AssertionError("conjugate_preserving: composition check failed")
    return phi


# quotients --------------------------------------------------------------------------

def omega_components(f, g):
    """omega_i = g d_i f - f d_i g."""
    return [g.mul_to(df, df.order) - f.mul_to(dg, dg.order)
            for df, dg in zip(f.gradient(), g.gradient())]


def euler_defect(f, g):
    """(1/2) sum x_i omega_i - f (g - (1/2) sum x_i d_i g); zero whenever the
    quadratic part of f is sum x_i^2 and f has no higher terms."""
    n = f.nvars
    om = omega_components(f, g)
    K = om[0].order
    half = C.convert(C.to_mpq(1) / 2, f.mode) if f.mode == EXACT else 0.5
    lhs = Jet.zero(n, K, f.mode)
    radial = Jet.zero(n, K, f.mode)
    for i in range(n):
        xi = Jet.var(i, n, K, f.mode)
        lhs = lhs + xi.mul_to(om[i], K)
        radial = radial + xi.mul_to(g.diff(i), K)
    rhs = f.mul_to(g.with_order(K) - radial.scale(half), K)
    return (lhs.scale(half) - rhs).truncate(K)


def _cubic_coefficients(f, g):
    from .normal_forms import diagonalize_pair
    phi, lams = diagonalize_pair(f.truncate(3), g.truncate(3), 3)
    gd = phi.pullback(g.truncate(3))
    n = f.nvars
    alphas = []
    for i in range(n):
        e = [0] * n
        e[i] = 3
        alphas.append(gd.coeff(tuple(e)))
    return lams, alphas


def check_q_generic(f, g):
    """Raise NotQGeneric unless the 3-jet of (f, g) is Q-generic; returns (lams, alphas)."""
    lams, alphas = _cubic_coefficients(f, g)
    for i, a in enumerate(alphas):
        if C.is_zero(a, f.mode):
            raise NotQGeneric("cubic coefficient alpha_%d vanishes" % (i + 1),
                              witness={"i": i + 1, "lambdas": [str(l) for l in lams]})
    return lams, alphas


def conjugate_quotient(f0, g0, f1, g1, order=None):
    """phi with g0 o phi * f1 = g1 * f0 o phi through order + 2.

    Path f_t, g_t linear in t; omega = g df - f dg = omega_x + r dt with
    r = g0 (f1 - f0) - f0 (g1 - g0).  Solving sum X_i omega_i = -r gives a field
    along which g/f is constant; its backward flow is the conjugacy.
    """
    K = min(h.order for h in (f0, g0, f1, g1)) if order is None else order
    mode = f0.mode
    n = f0.nvars
    for a, b, name in ((f0, f1, "f"), (g0, g1, "g")):
        if not (a.truncate(3) - b.truncate(3)).is_zero() and \
                not a.truncate(3).equals(b.truncate(3), 3):
            raise HypothesisFailed("the 3-jets of %s0 and %s1 differ" % (name, name),
                                   stage="quotient", witness={"which": "3-jet-mismatch"})
    check_q_generic(f0, g0)
    W = K + 4
    f0, g0, f1, g1 = (h.promote(W) if h.order < W else h.truncate(W) for h in (f0, g0, f1, g1))
    df, dg = f1 - f0, g1 - g0
    if df.truncate(K + 2).is_zero() and dg.truncate(K + 2).is_zero():
        return DiffeoJet.identity(n, K, mode)
    Kd = K + 3
    G0 = omega_components(f0, g0)
    G2 = omega_components(df, dg)
    mixed = [dgv.mul_to(a, Kd) + g0.mul_to(b, Kd) - df.mul_to(c, Kd) - f0.mul_to(d, Kd)
             for dgv, a, b, c, d in zip([dg] * n, f0.gradient(), df.gradient(),
                                        g0.gradient(), dg.gradient())]
    r = (g0.mul_to(df, Kd) - f0.mul_to(dg, Kd)).truncate(Kd)
    gen_coeffs = [[h.truncate(Kd) for h in G] for G in (G0, mixed, G2)]
    while len(gen_coeffs) > 1 and all(h.is_zero() for h in gen_coeffs[-1]):
        gen_coeffs.pop()
    try:
        coeffs = decompose_polynomial_path([-r], gen_coeffs, Kd)
    except NotInIdeal as e:
        raise HypothesisFailed("the time derivative of the path is not in I(omega_x) "
                               "(obstruction at degree %s)" % e.degree, stage="quotient",
                               witness={"which": "not-in-ideal", "degree": e.degree})
    X = HomotopyField([c.truncate(K) for c in coeffs], K)
    phi = flow_to_time_one(X, K)
    Kc = K + 2
    a0, b0 = phi.with_order(Kc).pullback_many([g0.truncate(Kc), f0.truncate(Kc)])
    lhs = a0.mul_to(f1.truncate(Kc), Kc)
    rhs = g1.truncate(Kc).mul_to(b0, Kc)
    if not lhs.equals(rhs, Kc):
        raise AssertionError("conjugate_quotient: cross-multiplied check failed")
    return phi


# numeric cross-check ------------------------------------------------------------------

@dataclass
class ResidualReport:
    samples: int
    radius: float
    order: int
    f_residual: float
    g_residual: float
    bound: float
    flagged: bool

    @property
    def max_residual(self):
        return max(self.f_residual, self.g_residual)

    def to_dict(self):
        return {"samples": self.samples, "radius": self.radius, "order": self.order,
                "f_residual": self.f_residual, "g_residual": self.g_residual,
                "truncation_bound": self.bound, "flagged": self.flagged}


def verify_numeric(pair0, pair1, phi, samples=50, radius=1e-2, seed=0, quotient=False):
    """Evaluate f0 o phi - f1 and g0 o phi - g1 at random complex points.

    The truncation bound is radius^(K+1) times a crude coefficient scale;
    residuals far above it are flagged.  With quotient=True the
    cross-multiplied residual g0(phi) f1 - g1 f0(phi) is reported as g_residual.
    """
    f0, g0 = pair0
    f1, g1 = pair1
    K = phi.order
    rng = random.Random(seed)
    n = phi.n
    fr = gr = 0.0
    for _ in range(samples):
        pt = []
        for _ in range(n):
            rho = radius * rng.random() ** (1.0 / 2)
            ang = rng.uniform(0, 2 * np.pi)
            pt.append(complex(rho * np.cos(ang), rho * np.sin(ang)) / np.sqrt(n))
        y = phi.evaluate(pt)
        if quotient:
            val = g0.evaluate(y) * f1.evaluate(pt) - g1.evaluate(pt) * f0.evaluate(y)
            gr = max(gr, abs(val))
        else:
            fr = max(fr, abs(f0.evaluate(y) - f1.evaluate(pt)))
            gr = max(gr, abs(g0.evaluate(y) - g1.evaluate(pt)))
    scale = 1.0
    for J in list(phi.components) + [f0, g0, f1, g1]:
        for c in J.terms.values():
            scale = max(scale, abs(C.to_complex(c)))
    top = K + 1 + (2 if quotient else 0)
    bound = scale ** 2 * 10 * radius ** top
    flagged = max(fr, gr) > 1e3 * bound + 1e-14
    return ResidualReport(samples, radius, K, fr, gr, bound, flagged)
