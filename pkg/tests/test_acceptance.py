"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with pytest, or directly as a script to print the eight lines.
"""
import random
import sys
import time
from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from conftest import P, random_poly, random_diffeo  # noqa: E402

from morsejets import coeff as C  # noqa: E402
from morsejets.classify import (normalize_pair, r_equivalent, r_invariants, involution,  # noqa: E402
                                holonomy_composite, sigma_curves, q_normal_form,
                                cone_restriction_form, fold_normalize)
from morsejets.cusps import CuspPair, cusp_ideal_check, exceptional_check  # noqa: E402
from morsejets.errors import HypothesisFailed, NotDiagonalizable  # noqa: E402
from morsejets.jet import Jet, DiffeoJet, compose, monomials  # noqa: E402
from morsejets.moser import conjugate_by_path, euler_defect, verify_numeric  # noqa: E402
from morsejets.normal_forms import diagonalize_pair  # noqa: E402
from morsejets.tangency import tangency_curves, tangency_generators  # noqa: E402

K = 8


# independent oracles ---------------------------------------------------------------

def to_sympy(J, xs):
    out = sympy.Integer(0)
    for e, c in J.terms.items():
        re, im = (C.to_mpq(v) for v in C.re_im(c))
        coef = sympy.Rational(int(re.numerator), int(re.denominator)) + \
            sympy.I * sympy.Rational(int(im.numerator), int(im.denominator))
        out += coef * sympy.prod([x ** k for x, k in zip(xs, e)])
    return out


def sym_minors(f, g, xs):
    """2x2 minors of the Jacobian of (f, g), computed by sympy."""
    df = [sympy.diff(f, x) for x in xs]
    dg = [sympy.diff(g, x) for x in xs]
    return [sympy.expand(df[i] * dg[j] - df[j] * dg[i])
            for i, j in combinations(range(len(xs)), 2)]


def coeff_row(expr, xs, mons, order):
    row = [QQ(0)] * len(mons)
    if expr == 0:
        return row
    for e, c in sympy.Poly(expr, *xs).terms():
        if sum(e) <= order:
            c = sympy.Rational(c)
            row[mons[e]] = QQ(int(c.p), int(c.q))
    return row


def span_rows(gens, xs, order):
    """Rows spanning <gens> + m^(order+1) modulo m^(order+1)."""
    n = len(xs)
    mons = {tuple(e): k for k, e in enumerate(e for d in range(order + 1)
                                               for e in monomials(n, d))}
    rows = []
    for h in gens:
        if h == 0:
            continue
        terms = [(e, sympy.Rational(c)) for e, c in sympy.Poly(h, *xs).terms()]
        for beta in mons:
            row = [QQ(0)] * len(mons)
            for e, c in terms:
                m = tuple(a + b for a, b in zip(e, beta))
                if sum(m) <= order:
                    row[mons[m]] = QQ(int(c.p), int(c.q))
            rows.append(row)
    return rows, mons


def rank(rows, ncols):
    rows = [r for r in rows if any(rows_ for rows_ in r)]
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), ncols), QQ).rank()


def span_contains(A_rows, extra_rows, ncols):
    return rank(A_rows + extra_rows, ncols) == rank(A_rows, ncols)


def oracle_prechecks(f, g0, g1, order=K):
    """(ideals agree, g1 - g0 in the ideal), by linear algebra over sympy polynomials."""
    n = f.nvars
    xs = sympy.symbols("x0:%d" % n)
    F, G0, G1 = (to_sympy(h, xs) for h in (f, g0, g1))
    I0 = sym_minors(F, G0, xs)
    I1 = sym_minors(F, G1, xs)
    R0, mons = span_rows(I0, xs, order)
    R1, _ = span_rows(I1, xs, order)
    N = len(mons)
    same = span_contains(R0, R1, N) and span_contains(R1, R0, N)
    member = span_contains(R0, [coeff_row(sympy.expand(G1 - G0), xs, mons, order)], N)
    return same, member


def ident(n):
    return [Jet.var(i, n, K) for i in range(n)]


def quad(lams, n):
    x = ident(n)
    return sum((Fraction(l) * xi ** 2 for l, xi in zip(lams, x)), Jet.zero(n, K))


# criteria ----------------------------------------------------------------------------

def criterion_1():
    """Worked examples, exact mode, K=8, under 10 s."""
    checks = {}
    try:
        diagonalize_pair(P("2*x*y"), P("2*x*y+y**2"))
        checks["not-diagonalizable"] = False
    except NotDiagonalizable:
        checks["not-diagonalizable"] = True
    f, g = P("x**2+y**2"), P("x**2+2*y**2")
    _, lams = diagonalize_pair(f, g)
    checks["lambda"] = list(lams) == [1, 2]
    curves = tangency_curves(f, g)
    checks["axes"] = all(c.is_zero() for tc in curves
                         for k, c in enumerate(tc.curve.components) if k != tc.axis)
    t2 = P("x**2", 1)
    sc = sigma_curves(f, g)
    checks["sigma"] = (len(sc) == 2
                       and all(c.multiplicity == 2 for c in sc)
                       and all(c.curve.components[0].equals(t2) for c in sc)
                       and sc[0].curve.components[1].equals(t2)
                       and sc[1].curve.components[1].equals(t2 * 2))
    fc, gc = P("x**3+y**2+z**2", 3), P("2*x**3+3*y**2+5*z**2", 3)
    cert = cusp_ideal_check(CuspPair.from_jets(fc, gc))
    xs = sympy.symbols("x y z")
    model = [xs[0] ** 2 * xs[1], xs[0] ** 2 * xs[2], xs[1] * xs[2]]
    Rm, mons = span_rows(model, xs, K)
    Rt, _ = span_rows(sym_minors(to_sympy(fc, xs), to_sympy(gc, xs), xs), xs, K)
    N = len(mons)
    checks["cusp-certificate"] = (len(cert.model_in_tangency) == 3
                                  and len(cert.tangency_in_model) == 3
                                  and span_contains(Rm, Rt, N) and span_contains(Rt, Rm, N))
    rep = exceptional_check(CuspPair.from_jets(fc, gc + P("x**2*y", 3)))
    checks["x2y-non-exceptional"] = not rep.exceptional
    ok = all(checks.values())
    return ok, ", ".join("%s=%s" % kv for kv in checks.items())


def _path_instances(rng, count=20):
    out = []
    for k in range(count):
        n = 2 if k % 2 == 0 else 3
        lams = rng.sample([1, 2, 3, -1, -2, 5], n)
        f = quad([1] * n, n) + random_poly(rng, n, 3, 4, K, 0.3, 2)
        g0 = quad(lams, n) + random_poly(rng, n, 3, 4, K, 0.3, 2)
        if k % 4 < 2:
            # polynomial inputs, so the generators are exact at any order
            I = tangency_generators(f.promote(K + 1), g0.promote(K + 1)).generators()
            a = sum((random_poly(rng, n, 0, 1, K, 0.4, 2) * h * h2
                     for h in I for h2 in I), Jet.zero(n, K)).truncate(K)
        else:
            a = random_poly(rng, n, 3, 5, K, 0.3, 2)
        out.append((f, g0, (g0 + a).truncate(K)))
    return out


_PATH_OUTPUTS = []


def criterion_2():
    """Path method on 20 random instances: succeeds iff the prechecks pass."""
    rng = random.Random(2024)
    t0 = time.time()
    agree = succeeded = 0
    t_oracle = 0.0
    bad = []
    _PATH_OUTPUTS.clear()
    for idx, (f, g0, g1) in enumerate(_path_instances(rng)):
        t1 = time.time()
        same, member = oracle_prechecks(f, g0, g1)
        t_oracle += time.time() - t1
        try:
            phi = conjugate_by_path(f, g0, g1, K)
            ok = phi.pullback(f).equals(f, K) and phi.pullback(g0).equals(g1, K)
            if ok:
                _PATH_OUTPUTS.append((f, g0, g1, phi))
        except HypothesisFailed:
            ok = False
        succeeded += ok
        if ok == (same and member):
            agree += 1
        else:
            bad.append(idx)
    dt = time.time() - t0 - t_oracle
    passed = agree == 20 and dt < 60 and succeeded >= 10
    return passed, ("%d/20 agree with the oracle, %d succeeded, mismatches %s, "
                    "engine %.1f s (oracle %.1f s)" % (agree, succeeded, bad, dt, t_oracle))


def criterion_3():
    """R-equivalence round trips and invariant equality, 20 instances."""
    rng = random.Random(3)
    good = 0
    bad = []
    for idx in range(20):
        n = 2 if idx % 2 == 0 else 3
        lams = rng.sample([1, 2, 3, 4, -1, -2, -3], n)
        f = quad([1] * n, n) + random_poly(rng, n, 3, 4, K, 0.3, 2)
        g = quad(lams, n) + random_poly(rng, n, 3, 4, K, 0.3, 2)
        psi = random_diffeo(rng, n, K)
        f1, g1 = psi.pullback_many([f, g])
        try:
            phi = r_equivalent((f, g), (f1, g1), K)
            ok = phi.pullback(f).equals(f1, K) and phi.pullback(g).equals(g1, K)
            ok = ok and r_invariants(f, g, K) == r_invariants(f1, g1, K)
        except Exception as e:  # report, do not hide
            ok = False
            bad.append((idx, type(e).__name__))
        good += ok
    return good == 20, "%d/20 round trips exact, failures %s" % (good, bad)


def _q_instance(rng, n):
    lams = rng.sample([1, 2, 3, 5, -1, -2, -4], n)
    alphas = [Fraction(rng.choice([1, 2, 3, -1, -2]), rng.choice([1, 2, 3])) for _ in range(n)]
    return lams, alphas


def _q_pair(lams, alphas, n, rng):
    x = ident(n)
    f = quad([1] * n, n)
    g = quad(lams, n) + sum((a * xi ** 3 for a, xi in zip(alphas, x)), Jet.zero(n, K))
    return f, g + random_poly(rng, n, 4, 5, K, 0.3, 2)


def criterion_4():
    """Q normal form invariance, sensitivity and the Euler identity, 20 instances."""
    rng = random.Random(4)
    inv = sens = euler = 0
    for idx in range(20):
        n = 2 if idx % 2 == 0 else 3
        lams, alphas = _q_instance(rng, n)
        f, g = _q_pair(lams, alphas, n, rng)
        q0 = q_normal_form(f, g)
        psi = random_diffeo(rng, n, K)
        unit = Jet.const(1, n, K) + random_poly(rng, n, 1, 2, K, 0.5, 2)
        f1, g1 = (unit * h for h in psi.pullback_many([f, g]))
        inv += q_normal_form(f1, g1) == q0
        changed = True
        for i in range(n):
            for which in ("lam", "alpha"):
                l2, a2 = list(lams), list(alphas)
                if which == "lam":
                    l2[i] = max(lams) + 7
                else:
                    a2[i] = alphas[i] + Fraction(1, 5)
                fp, gp = _q_pair(l2, a2, n, random.Random(idx))
                changed = changed and q_normal_form(fp, gp) != q0
        sens += changed
        xs = sympy.symbols("x0:%d" % n)
        F, G = to_sympy(f, xs), to_sympy(g, xs)
        om = [G * sympy.diff(F, x) - F * sympy.diff(G, x) for x in xs]
        lhs = sum(x * w for x, w in zip(xs, om)) / 2
        rhs = F * (G - sum(x * sympy.diff(G, x) for x in xs) / 2)
        euler += euler_defect(f, g).is_zero() and sympy.expand(lhs - rhs) == 0
    ok = inv == sens == euler == 20
    return ok, "invariant %d/20, perturbation detected %d/20, Euler %d/20" % (inv, sens, euler)


def _restrict(g, alpha):
    return compose(g, list(alpha))


def criterion_5():
    """Involution and holonomy laws, 50 instances each."""
    rng = random.Random(5)
    inv_ok = 0
    for _ in range(50):
        c = rng.choice([1, 2, -3, Fraction(1, 2), 5])
        f1 = P("x**2", 1) * c + random_poly(rng, 1, 3, K, K, 0.6, 3)
        i = involution(f1)
        t = P("x", 1)
        inv_ok += compose(i, [i]).equals(t, K) and compose(f1, [i]).equals(f1, K)
    ratios = [4, 9, Fraction(1, 4), Fraction(4, 9), Fraction(9, 4), -4, Fraction(-1, 9), 16]
    lit = derived = recon = 0
    for _ in range(50):
        r = rng.choice(ratios)
        ln = rng.choice([1, 2, -3, Fraction(1, 2)])
        lj = r * ln
        f = quad([1, 1], 2) + random_poly(rng, 2, 3, 5, K, 0.3, 2)
        g = quad([lj, ln], 2) + random_poly(rng, 2, 3, 5, K, 0.3, 2)
        np_ = normalize_pair(f, g, K)
        order = sorted(range(2), key=lambda k: C.lex_key(np_.lams[k]))
        jj, nn = order
        phi = holonomy_composite(f, g, 1, K)
        lam_j, lam_n = np_.lams[jj], np_.lams[nn]
        s = phi.coeff((1,)) ** 2
        lit += s == lam_n / lam_j
        derived += s == lam_j / lam_n
        t = P("x", 1)
        zero = Jet.zero(1, K)
        alpha_j = [compose(c_, [t if k == jj else zero for k in range(2)])
                   for c_ in np_.phi.components]
        alpha_n = [compose(c_, [t if k == nn else zero for k in range(2)])
                   for c_ in np_.phi.components]
        t2 = P("x**2", 1)
        assert _restrict(f, alpha_j).equals(t2, K) and _restrict(f, alpha_n).equals(t2, K)
        lhs = _restrict(g, alpha_j)
        rhs = compose(_restrict(g, alpha_n), [phi])
        recon += lhs.equals(rhs, K)
    ok = inv_ok == 50 and lit == 50 and recon == 50
    return ok, ("i o i = id and f o i = f: %d/50; square = lambda_n/lambda_j: %d/50 "
                "(square = lambda_j/lambda_n: %d/50); reconstruction: %d/50"
                % (inv_ok, lit, derived, recon))


def criterion_6():
    """Cone restriction form under g + lambda f and cubic perturbations, 20 each."""
    rng = random.Random(6)
    a_ok = b_ok = 0
    for _ in range(20):
        n = 3
        lams = rng.sample([1, 2, 3, 5, -1, -2, 7], n)
        L = random_diffeo(rng, n, K, hi=1)
        f = L.pullback(quad([1] * n, n)) + random_poly(rng, n, 3, 4, K, 0.3, 2)
        g = L.pullback(quad(lams, n)) + random_poly(rng, n, 3, 4, K, 0.3, 2)
        mu = cone_restriction_form(f, g)
        top = max(lams)
        expect = sorted(l - top for l in lams if l != top)
        base = [C.to_mpq(m) for m in mu] == expect
        # keep g + shift * f Morse
        shift = rng.choice([s for s in (Fraction(1, 2), Fraction(-2, 5), Fraction(3, 2), 4)
                            if -s not in lams])
        a_ok += base and cone_restriction_form(f, g + f * shift) == mu
        cub = random_poly(rng, n, 3, 3, K, 0.8, 5)
        b_ok += base and cone_restriction_form(f, g + cub) == mu
    return a_ok == b_ok == 20, "g + lambda f: %d/20, cubic perturbation: %d/20" % (a_ok, b_ok)


def criterion_7():
    """Fold normal form: s^3 for (x, x^3 + y^2) and 10 round trips."""
    phi, _ = fold_normalize(P("x"), P("x**3+y**2"))
    first = phi.equals(P("x**3", 1), K)
    rng = random.Random(7)
    good = 0
    for idx in range(10):
        n = 2 if idx % 2 == 0 else 3
        phi0 = random_poly(rng, 1, 2, K, K, 0.6, 3)
        if phi0.is_zero():
            phi0 = P("x**2", 1)
        x = ident(n)
        f = x[0]
        g = compose(phi0, [x[0]]) + sum((xi ** 2 for xi in x[1:]), Jet.zero(n, K))
        psi = random_diffeo(rng, n, K)
        f1, g1 = psi.pullback_many([f, g])
        rec, Phi = fold_normalize(f1, g1, K)
        good += rec.equals(phi0, K)
    return first and good == 10, "x^3 + y^2 gives s^3: %s; recovered %d/10" % (first, good)


def criterion_8():
    """Float residuals of the path-method outputs, plus a corrupted control."""
    if not _PATH_OUTPUTS:
        criterion_2()
    worst = 0.0
    control = []
    for f, g0, g1, phi in _PATH_OUTPUTS:
        p0 = (f.to_float(), g0.to_float())
        p1 = (f.to_float(), g1.to_float())
        ph = phi.to_float()
        r = verify_numeric(p0, p1, ph, samples=100, radius=1e-2)
        worst = max(worst, r.f_residual, r.g_residual)
        comps = list(ph.components)
        comps[0] = comps[0] + Jet.var(0, ph.n, ph.order, "float").scale(0.1)
        bad = verify_numeric(p0, p1, DiffeoJet(comps, check=False), samples=100, radius=1e-2)
        control.append(max(bad.f_residual, bad.g_residual))
    ok = bool(_PATH_OUTPUTS) and worst < 1e-12 and min(control) > 1e-6
    return ok, "%d outputs; max residual %.2e; smallest corrupted residual %.2e" % (
        len(_PATH_OUTPUTS), worst, min(control) if control else float("nan"))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


def run_one(k):
    t0 = time.time()
    ok, detail = CRITERIA[k - 1]()
    line = "CRITERION %d: %s  %s  (%.1f s)" % (k, "PASS" if ok else "FAIL", detail,
                                               time.time() - t0)
    return ok, line


@pytest.mark.parametrize("k", range(1, 9))
def test_criterion(k, capsys):
    ok, line = run_one(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_one(k) for k in range(1, 9)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
