"""Quadratic pencils, Morse normalization and simultaneous diagonalization."""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import random

import numpy as np

from . import coeff as C
from . import linalg as LA
from .coeff import EXACT, FLOAT, mpq
from .errors import (NotDiagonalizable, NotGeneric, NotMorse, DegenerateForm,
                     FieldExtensionRequired, JetError)
from .jet import Jet, DiffeoJet, solve_implicit, _deg


# quadratic forms ---------------------------------------------------------------

def quadratic_matrix(f):
    """Symmetric S with (degree-2 part of f)(x) = x^T S x."""
    n = f.nvars
    S = [[C.convert(0, f.mode)] * n for _ in range(n)]
    half = mpq(1, 2) if f.mode == EXACT else 0.5
    for e, c in f.degree_part(2).terms.items():
        idx = [i for i in range(n) for _ in range(e[i])]
        i, j = idx
        if i == j:
            S[i][i] = c
        else:
            S[i][j] = c * half
            S[j][i] = c * half
    return S


def quadratic_jet(S, order, mode=EXACT):
    n = len(S)
    terms = {}
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            c = S[i][j] if i == j else 2 * S[i][j]
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
    return Jet(n, order, terms, mode)


def _bil_any(S, u, v):
    total = 0
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        row = S[i]
        for j, vj in enumerate(v):
            if vj == 0:
                continue
            total = total + ui * row[j] * vj
    return total


# pencils ----------------------------------------------------------------------

@dataclass
class PencilForm:
    """Result of :func:`block_diagonalize_pencil`.

    ``P`` has the new basis vectors as columns; ``blocks`` lists (lambda, size)
    in the order the columns appear.
    """
    P: list
    blocks: list
    mode: str = EXACT

    @property
    def diagonalizable(self):
        return all(k == 1 for _, k in self.blocks)

    @property
    def eigenvalues(self):
        return [lam for lam, k in self.blocks for _ in range(k)]


def _sym(x):
    import sympy
    re, im = C.re_im(x)
    return sympy.Rational(int(re.numerator), int(re.denominator)) + \
        sympy.I * sympy.Rational(int(C.to_mpq(im).numerator), int(C.to_mpq(im).denominator))


def pencil_eigenvalues(M, mode=EXACT):
    """Eigenvalues of M with algebraic multiplicities, sorted by (re, im).

    Exact mode factors the characteristic polynomial over Q(i) and raises
    FieldExtensionRequired when a factor is not linear.
    """
    n = len(M)
    if mode == FLOAT:
        ev = np.linalg.eigvals(np.array([[complex(c) for c in r] for r in M], dtype=complex))
        groups = []
        tol = max(1e-7, 1e3 * C.get_tolerance())
        for z in ev:
            for g in groups:
                if abs(g[0] - z) <= tol * max(1.0, abs(z)):
                    g[1].append(z)
                    break
            else:
                groups.append([z, [z]])
        out = [(complex(np.mean(g[1])), len(g[1])) for g in groups]
        out.sort(key=lambda p: (round(p[0].real, 9), round(p[0].imag, 9)))
        return out
    import sympy
    lam = sympy.Symbol("lam")
    Ms = sympy.Matrix(n, n, lambda i, j: _sym(M[i][j]))
    p = Ms.charpoly(lam).as_expr()
    _, factors = sympy.factor_list(p, lam, gaussian=True)
    out = []
    for fac, mult in factors:
        poly = sympy.Poly(fac, lam)
        if poly.degree() == 0:
            continue
        if poly.degree() > 1:
            raise FieldExtensionRequired(
                "pencil eigenvalues are roots of %s, outside Q(i); use float mode" % fac,
                {"factor": str(fac)})
        a, b = poly.all_coeffs()
        out.append((C.to_exact(sympy.expand(sympy.radsimp(-b / a))), mult))
    out.sort(key=lambda p: C.lex_key(p[0]))
    return out


def _mat_sub_scalar(M, lam):
    n = len(M)
    return [[M[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]


def _nullspace(A, mode):
    if mode == FLOAT:
        Mx = np.array([[complex(c) for c in r] for r in A], dtype=complex)
        u, s, vh = np.linalg.svd(Mx)
        scale = max(1.0, float(s[0]) if len(s) else 1.0)
        tol = max(1e-8, 1e3 * C.get_tolerance()) * scale
        r = int(np.sum(s > tol))
        return [[complex(c) for c in vh[k].conj()] for k in range(r, Mx.shape[1])]
    return LA.nullspace(A, len(A[0]), mode)


def _matpow(M, k, mode):
    R = LA.identity(len(M), mode)
    for _ in range(k):
        R = LA.matmul(R, M)
    return R


def jordan_structure(Sf, Sg, mode=EXACT):
    """[(lambda, [block sizes])] for the pencil M = Sf^{-1} Sg, sorted by lambda."""
    try:
        Sinv = LA.inverse(Sf, mode)
    except LA.SingularMatrix:
        raise DegenerateForm("q_f is degenerate") from None
    M = LA.matmul(Sinv, Sg)
    out = []
    n = len(M)
    for lam, mult in pencil_eigenvalues(M, mode):
        N = _mat_sub_scalar(M, lam)
        ranks = [n]
        Nk = LA.identity(n, mode)
        while True:
            Nk = LA.matmul(Nk, N)
            ranks.append(LA.rank(Nk, mode))
            if ranks[-1] == ranks[-2] or len(ranks) > n + 1:
                break
        sizes = []
        # blocks of size >= k: ranks[k-1] - ranks[k]
        ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
        for k in range(1, len(ge)):
            cnt = ge[k - 1] - ge[k]
            sizes += [k] * cnt
        sizes.sort(reverse=True)
        out.append((lam, sizes))
    return out, M


def _candidates(r, mode, rng):
    """Coefficient vectors to try when searching a subspace for a good vector."""
    one = C.convert(1, mode)
    for i in range(r):
        v = [C.convert(0, mode)] * r
        v[i] = one
        yield v
    scal = [1, -1, 2, -2, mpq(1, 2)]
    if mode == EXACT:
        scal += [C.gauss(0, 1), C.gauss(0, -1), C.gauss(1, 1)]
    for i, j in itertools.combinations(range(r), 2):
        for c in scal:
            v = [C.convert(0, mode)] * r
            v[i] = one
            v[j] = C.convert(c, mode)
            yield v
    for _ in range(200):
        yield [C.convert(rng.randint(-3, 3), mode) for _ in range(r)]


def _normalize_chain(Sf, N, w, k, mode):
    """Replace w by A(N) w so that the chain Gram matrix is anti-diagonal ones."""
    c = []
    v = list(w)
    for m in range(k):
        c.append(_bil_any(Sf, w, v))
        v = LA.matvec(N, v)
    chat = Jet(1, k - 1, {(j,): c[k - 1 - j] for j in range(k)}, mode)
    try:
        A = chat.unit_power(Fraction(-1, 2))
    except JetError:
        return None
    out = [C.convert(0, mode)] * len(w)
    v = list(w)
    for m in range(k):
        a = A.coeff((m,))
        out = [o + a * x for o, x in zip(out, v)]
        v = LA.matvec(N, v)
    return out


def block_diagonalize_pencil(Sf, Sg, mode=EXACT, seed=0):
    """Congruence P with P^T Sf P, P^T Sg P in the standard block shapes.

    A block of size k with eigenvalue lambda has ones on the anti-diagonal of
    the f-form, lambda on the anti-diagonal and ones just below it for the
    g-form.
    """
    n = len(Sf)
    Sf = LA.convert_matrix(Sf, mode)
    Sg = LA.convert_matrix(Sg, mode)
    structure, M = jordan_structure(Sf, Sg, mode)
    rng = random.Random(seed)
    cols, blocks = [], []
    for lam, sizes in structure:
        N = _mat_sub_scalar(M, lam)
        mult = sum(sizes)
        U = _nullspace(_matpow(N, mult, mode), mode)
        while U:
            # nilpotency index on span(U)
            k = 1
            while True:
                Nk = _matpow(N, k, mode)
                if all(all(C.is_zero(x, mode) for x in LA.matvec(Nk, b)) for b in U):
                    break
                k += 1
            Nk1 = _matpow(N, k - 1, mode)
            chosen = None
            nonzero_seen = False
            for a in _candidates(len(U), mode, rng):
                w = [sum((a[i] * U[i][t] for i in range(len(U))), C.convert(0, mode))
                     for t in range(n)]
                val = _bil_any(Sf, w, LA.matvec(Nk1, w))
                if C.is_zero(val, mode):
                    continue
                nonzero_seen = True
                w2 = _normalize_chain(Sf, N, w, k, mode)
                if w2 is not None:
                    chosen = w2
                    break
            if chosen is None:
                if nonzero_seen:
                    raise FieldExtensionRequired(
                        "normalizing the pencil needs a square root outside Q(i); use float mode",
                        {"eigenvalue": str(lam)})
                raise DegenerateForm("q_f degenerate on a generalized eigenspace")
            chain = []
            v = chosen
            for _ in range(k):
                chain.append(v)
                v = LA.matvec(N, v)
            chain.reverse()   # p_0 = N^{k-1} w, ..., p_{k-1} = w
            chain = [_canon_sign(p, mode) if k == 1 else p for p in chain]
            cols += chain
            blocks.append((lam, k))
            # q_f-orthogonal complement inside span(U)
            Cm = [[_bil_any(Sf, b, p) for b in U] for p in chain]
            coeffs = _nullspace(Cm, mode) if Cm else []
            U = [[sum((a[i] * U[i][t] for i in range(len(U))), C.convert(0, mode))
                  for t in range(n)] for a in coeffs]
            if mode == FLOAT:
                U = _orthonormal(U)
    P = [[cols[j][i] for j in range(n)] for i in range(n)]
    form = PencilForm(P, blocks, mode)
    _check_pencil(Sf, Sg, form)
    return form


def _orthonormal(U):
    if not U:
        return U
    A = np.array(U, dtype=complex).T
    q, _ = np.linalg.qr(A)
    return [list(q[:, k]) for k in range(q.shape[1])]


def _canon_sign(p, mode):
    for x in p:
        if not C.is_zero(x, mode):
            return p if C.lex_positive(x, mode) else [-y for y in p]
    return p


def standard_blocks(blocks, mode=EXACT):
    """The target (F, G) matrices for a block list."""
    n = sum(k for _, k in blocks)
    z = C.convert(0, mode)
    F = [[z] * n for _ in range(n)]
    G = [[z] * n for _ in range(n)]
    off = 0
    for lam, k in blocks:
        for i in range(k):
            for j in range(k):
                if i + j == k - 1:
                    F[off + i][off + j] = C.convert(1, mode)
                    G[off + i][off + j] = C.convert(lam, mode)
                elif i + j == k:
                    G[off + i][off + j] = C.convert(1, mode)
        off += k
    return F, G


def _check_pencil(Sf, Sg, form):
    mode = form.mode
    P = form.P
    PT = LA.transpose(P)
    F, G = standard_blocks(form.blocks, mode)
    A = LA.matmul(LA.matmul(PT, Sf), P)
    B = LA.matmul(LA.matmul(PT, Sg), P)
    tol = 1e-7
    for X, Y in ((A, F), (B, G)):
        for r1, r2 in zip(X, Y):
            for a, b in zip(r1, r2):
                if mode == EXACT:
                    if a != b:
                        raise AssertionError("pencil congruence check failed")
                elif abs(complex(a) - complex(b)) > tol:
                    raise AssertionError("pencil congruence check failed (float)")


# Morse lemma --------------------------------------------------------------------

def _check_critical(f):
    n = f.nvars
    if not C.is_zero(f.constant(), f.mode):
        raise NotMorse("f(0) != 0", {"value": str(f.constant())})
    if not f.degree_part(1).is_zero():
        raise NotMorse("df(0) != 0 (f is regular at 0)")


def linear_morse(S, mode=EXACT):
    """P with P^T S P = I (exact when S is congruent to I over Q(i))."""
    try:
        return block_diagonalize_pencil(S, S, mode).P
    except FieldExtensionRequired:
        if mode != EXACT:
            raise
    S = LA.convert_matrix(S, mode)
    n = len(S)
    basis = _orthonormal_exact(S)
    P = [[basis[j][i] for j in range(n)] for i in range(n)]
    if LA.matmul(LA.matmul(LA.transpose(P), S), P) != LA.identity(n, mode):
        raise AssertionError("orthonormal basis check failed")
    return P


def _small_vectors(n, bound):
    """Integer vectors ordered by height."""
    for h in range(1, bound + 1):
        for v in itertools.product(range(-h, h + 1), repeat=n):
            if max(abs(x) for x in v) == h:
                yield v


def _orthonormal_exact(S, bound=5):
    """Orthonormal basis for the form S over Q(i), by Witt cancellation.

    Small integer vectors, projected off the vectors already chosen, are
    tried until one has a square value; the last plane has square
    discriminant, so it is hyperbolic and is split directly.
    """
    n = len(S)
    z = C.convert(0, EXACT)
    chosen = []

    def project(w):
        for u in chosen:
            c = _bil_any(S, w, u)
            w = [x - c * y for x, y in zip(w, u)]
        return w

    while len(chosen) < n:
        if n - len(chosen) == 2:
            Cm = [[_bil_any(S, e, u) for e in LA.identity(n, EXACT)] for u in chosen]
            U = LA.nullspace(Cm, n, EXACT) if Cm else LA.identity(n, EXACT)
            G = [[_bil_any(S, U[i], U[j]) for j in range(2)] for i in range(2)]
            plane = _hyperbolic_plane(G)
            if plane is not None:
                chosen += [[sum((a[i] * U[i][t] for i in range(2)), z) for t in range(n)]
                           for a in plane]
                break
        for v in _small_vectors(n, bound):
            w = project([C.convert(x, EXACT) for x in v])
            q = _bil_any(S, w, w)
            if C.is_zero(q, EXACT):
                continue
            root = C.exact_sqrt(q)
            if root is not None:
                chosen.append([x / root for x in w])
                break
        else:
            raise FieldExtensionRequired(
                "no vector with square value found over Q(i); use float mode")
    return chosen


def _hyperbolic_plane(G):
    """Coefficients of an orthonormal basis of a binary form, if hyperbolic."""
    (a, b), (_, c) = G
    root = C.exact_sqrt(b * b - a * c)
    if root is None or C.is_zero(root, EXACT):
        return None
    one, z = C.convert(1, EXACT), C.convert(0, EXACT)
    if C.is_zero(a, EXACT):
        e = [one, z]
    else:
        e = [(root - b) / a, one]
    bil = lambda u, v: sum((u[i] * G[i][j] * v[j] for i in range(2) for j in range(2)), z)
    f = next(v for v in ([z, one], [one, z]) if not C.is_zero(bil(e, v), EXACT))
    f = [x / bil(e, f) for x in f]
    qf = bil(f, f)
    f = [y - qf / 2 * x for x, y in zip(e, f)]
    i = C.gauss(0, 1)
    u1 = [x + y / 2 for x, y in zip(e, f)]
    u2 = [i * (x - y / 2) for x, y in zip(e, f)]
    return [u1, u2]


def parametrized_morse(f, variables, order=None):
    """Completion of squares in the given variables, the others as parameters.

    Returns (phi, rest) with f o phi = sum_{i in variables} x_i^2 + rest, where
    rest does not involve the listed variables.  Everything holds through
    ``order`` (default f.order).
    """
    n, mode = f.nvars, f.mode
    K = f.order if order is None else order
    variables = list(variables)
    W = K + 2 + len(variables)
    F = f.promote(W)
    if not C.is_zero(F.constant(), mode):
        raise NotMorse("f(0) != 0")
    for i in variables:
        if not F.diff(i).degree_part(0).is_zero():
            raise NotMorse("f is regular in the Morse variables")
    S = quadratic_matrix(F)
    Ssub = [[S[i][j] for j in variables] for i in variables]
    if C.is_zero(LA.det(Ssub, mode), mode):
        raise NotMorse("degenerate Hessian", {"variables": variables})
    Psub = linear_morse(Ssub, mode)
    L = LA.identity(n, mode)
    for a, i in enumerate(variables):
        for b, j in enumerate(variables):
            L[i][j] = Psub[a][b]
    total = DiffeoJet.from_matrix(L, W, mode)
    F = total.pullback(F)
    for i in variables:
        others = [k for k in range(n) if k != i]
        xi = solve_implicit(F.diff(i), u_index=i).promote(W)
        comps = [Jet.var(k, n, W, mode) for k in range(n)]
        comps[i] = comps[i] + xi.embed(n, others)
        shift = DiffeoJet(comps, check=False)
        F1 = shift.pullback(F).promote(W)
        rest = F1.substitute(i, 0)
        D = F1 - rest
        e2 = [0] * n
        e2[i] = 2
        drop = {e: c for e, c in D.terms.items() if e[i] == 1}
        if mode == EXACT and drop:
            raise AssertionError("completion of squares left a linear term")
        D = Jet(n, D.order, {e: c for e, c in D.terms.items() if e[i] != 1}, mode)
        U = D.divide_monomial(e2)
        c0 = U.constant()
        if not C.is_zero(c0 - 1, mode):
            raise AssertionError("unexpected leading coefficient in completion of squares")
        s = U.sqrt_unit().promote(W)
        # solve u * s(x with x_i = u) = y_i
        pos = [k if k != i else n for k in range(n)]
        s_emb = s.embed(n + 1, pos)
        uvar = Jet.var(n, n + 1, W, mode)
        eq = uvar * s_emb - Jet.var(i, n + 1, W, mode)
        u = solve_implicit(eq, u_index=n).promote(W)
        comps = [Jet.var(k, n, W, mode) for k in range(n)]
        comps[i] = u
        step = DiffeoJet(comps, check=False)
        total = total.compose(shift.compose(step)).promote(W)
        F = (rest + Jet.var(i, n, W, mode) ** 2).promote(W)
    phi = total.truncate(K)
    rest = F.truncate(K)
    for i in variables:
        rest = rest - Jet.var(i, n, K, mode) ** 2
    return phi, rest


def morse_normalize(f, order=None):
    """Diffeomorphism phi with f o phi = sum x_i^2 through the order."""
    _check_critical(f)
    K = f.order if order is None else order
    try:
        phi, rest = parametrized_morse(f, range(f.nvars), K)
    except FieldExtensionRequired as exc:
        raise FieldExtensionRequired(
            "the Hessian is not congruent to the identity over Q(i); use float mode",
            exc.witness) from None
    target = sum((Jet.var(i, f.nvars, K, f.mode) ** 2 for i in range(f.nvars)),
                 Jet.zero(f.nvars, K, f.mode))
    if not phi.pullback(f.with_order(K)).equals(target):
        raise AssertionError("morse_normalize self-check failed")
    return phi


def _diag_target(lams, n, K, mode):
    return sum((Jet.var(i, n, K, mode) ** 2 * lams[i] for i in range(n)), Jet.zero(n, K, mode))


def diagonalize_pair(f, g, order=None):
    """(phi, lambdas) with quadratic parts of (f o phi, g o phi) = (sum x^2, sum lam x^2)."""
    if f.nvars != g.nvars or f.mode != g.mode:
        raise JetError("f and g live in different rings")
    K = min(f.order, g.order) if order is None else order
    mode, n = f.mode, f.nvars
    _check_critical(f)
    _check_critical(g)
    Sf, Sg = quadratic_matrix(f), quadratic_matrix(g)
    if C.is_zero(LA.det(Sf, mode), mode):
        raise NotMorse("f has a degenerate Hessian")
    if C.is_zero(LA.det(Sg, mode), mode):
        raise NotMorse("g has a degenerate Hessian")
    structure, _ = jordan_structure(Sf, Sg, mode)
    big = [(lam, s) for lam, s in structure if max(s) > 1]
    if big:
        raise NotDiagonalizable("pencil has a Jordan block of size %d" % max(big[0][1]),
                                {"eigenvalue": str(big[0][0]), "sizes": big[0][1]})
    idx = 0
    for lam, sizes in structure:
        if len(sizes) > 1:
            raise NotGeneric("repeated eigenvalue %s" % lam,
                             {"indices": list(range(idx + 1, idx + len(sizes) + 1)),
                              "eigenvalue": str(lam)})
        idx += len(sizes)
    phi1 = morse_normalize(f, K)
    g1 = phi1.pullback(g.with_order(K))
    form = block_diagonalize_pencil(LA.identity(n, mode), quadratic_matrix(g1), mode)
    phi = phi1.compose(DiffeoJet.from_matrix(form.P, K, mode))
    lams = form.eigenvalues
    if mode == EXACT:
        q = phi.pullback(g.with_order(K)).degree_part(2)
        if not q.equals(_diag_target(lams, n, K, mode).degree_part(2)):
            raise AssertionError("diagonalize_pair self-check failed")
    return phi, lams


@dataclass
class GenericityReport:
    R_generic: bool
    Q_generic: bool
    F_generic: bool
    A_generic: bool
    eigenvalues: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)

    def to_dict(self):
        return {"R_generic": self.R_generic, "Q_generic": self.Q_generic,
                "F_generic": self.F_generic, "A_generic": self.A_generic,
                "eigenvalues": [str(x) for x in self.eigenvalues],
                "alphas": [str(x) for x in self.alphas],
                "witnesses": {k: (str(v) if not isinstance(v, (list, int)) else v)
                              for k, v in self.witnesses.items()}}


def genericity_class(f, g, order=None):
    """Genericity flags for a Morse pair, with a witness for every failure.

    F- and A-genericity coincide with R-genericity for Morse pairs.
    """
    from .classify import r_invariants
    K = min(f.order, g.order) if order is None else order
    wit = {}
    lams = []
    try:
        _, lams = diagonalize_pair(f, g, K)
        r_ok = True
    except NotDiagonalizable as exc:
        r_ok = False
        wit["not_diagonalizable"] = exc.witness.get("eigenvalue")
    except NotGeneric as exc:
        r_ok = False
        wit["repeated_eigenvalue"] = exc.witness.get("indices")
    alphas = []
    q_ok = False
    if r_ok:
        if K < 3:
            wit["order_too_small"] = K
        else:
            inv = r_invariants(f, g, K)
            alphas = [rec.v.coeff((3,)) for rec in inv.records]
            zero = [i + 1 for i, a in enumerate(alphas) if C.is_zero(a, f.mode)]
            q_ok = not zero
            if zero:
                wit["vanishing_alpha"] = zero
    return GenericityReport(r_ok, q_ok, r_ok, r_ok, lams, alphas, wit)


def separable_realize(curves, order=None):
    """Pair (sum u_j(x_j), sum v_j(x_j)) carried to the given tangent directions.

    ``curves`` is a list of (direction, u, v) with one-variable Morse jets u, v.
    The returned pair restricts to (u_j, v_j) along the line t * direction_j.
    """
    n = len(curves)
    if n == 0:
        raise ValueError("no curves given")
    mode = curves[0][1].mode
    K = min(min(u.order, v.order) for _, u, v in curves) if order is None else order
    D = [[C.convert(curves[j][0][i], mode) for j in range(n)] for i in range(n)]
    if C.is_zero(LA.det(D, mode), mode):
        raise HypothesisFailed_("tangent directions are dependent")
    for j, (_, u, v) in enumerate(curves):
        for name, w in (("u", u), ("v", v)):
            if w.nvars != 1 or w.valuation() != 2 or not C.is_zero(w.constant(), mode):
                raise NotMorse("%s_%d is not a one-variable Morse germ" % (name, j + 1))
    f = Jet.zero(n, K, mode)
    g = Jet.zero(n, K, mode)
    for j, (_, u, v) in enumerate(curves):
        xj = [Jet.var(j, n, K, mode)]
        f = f + u.with_order(K).compose(xj)
        g = g + v.with_order(K).compose(xj)
    Linv = DiffeoJet.from_matrix(LA.inverse(D, mode), K, mode)
    return Linv.pullback(f), Linv.pullback(g)


def HypothesisFailed_(msg):
    from .errors import HypothesisFailed
    return HypothesisFailed(msg, stage="realize")
