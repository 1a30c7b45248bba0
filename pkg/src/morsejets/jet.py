"""Truncated multivariate power series ("jets").

A :class:`Jet` stores a sparse map from exponent tuples to coefficients and a
truncation order ``order``: every stored monomial has total degree at most
``order`` in the ``nvars`` truncated variables.  A jet may additionally carry
``nparams`` polynomial parameters (used for the homotopy time ``t``); their
exponents follow the variable exponents in each key and are never truncated.

Jets are immutable values.  Binary operations truncate to the smaller order.
"""

from itertools import combinations_with_replacement
from fractions import Fraction

from . import coeff as C
from .coeff import EXACT, FLOAT, mpq


class JetError(ValueError):
    """Shape, order or invertibility violation on a jet operation."""


def _deg(e, n):
    return sum(e[:n])


def monomials(nvars, degree):
    """Exponent tuples of the given total degree, degree-lex (descending x_1)."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


class Jet:
    __slots__ = ("nvars", "order", "terms", "mode", "nparams")

    def __init__(self, nvars, order, terms=None, mode=EXACT, nparams=0, _clean=False):
        if nvars < 1:
            raise JetError("a jet needs at least one variable")
        if order < 0:
            raise JetError("negative truncation order")
        self.nvars = nvars
        self.order = order
        self.mode = mode
        self.nparams = nparams
        if _clean:
            self.terms = terms
            return
        width = nvars + nparams
        out = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != width:
                raise JetError("exponent %r has wrong length (expected %d)" % (e, width))
            if min(e, default=0) < 0:
                raise JetError("negative exponent %r" % (e,))
            if _deg(e, nvars) > order:
                continue
            c = C.convert(c, mode)
            if not C.is_zero(c, mode):
                out[e] = out.get(e, 0) + c
        self.terms = {e: c for e, c in out.items() if not C.is_zero(c, mode)}

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, nvars, order, mode=EXACT, nparams=0):
        return cls(nvars, order, {}, mode, nparams, _clean=True)

    @classmethod
    def const(cls, c, nvars, order, mode=EXACT, nparams=0):
        return cls(nvars, order, {(0,) * (nvars + nparams): c}, mode, nparams)

    @classmethod
    def var(cls, i, nvars, order, mode=EXACT, nparams=0):
        e = [0] * (nvars + nparams)
        e[i] = 1
        return cls(nvars, order, {tuple(e): 1}, mode, nparams)

    @classmethod
    def param(cls, k, nvars, order, mode=EXACT, nparams=1):
        e = [0] * (nvars + nparams)
        e[nvars + k] = 1
        return cls(nvars, order, {tuple(e): 1}, mode, nparams)

    def _new(self, terms, order=None, nparams=None):
        return Jet(self.nvars, self.order if order is None else order, terms,
                   self.mode, self.nparams if nparams is None else nparams, _clean=True)

    # inspection -------------------------------------------------------------
    def __repr__(self):
        return "Jet(nvars=%d, order=%d, mode=%s, terms=%s)" % (
            self.nvars, self.order, self.mode, self.to_str())

    def to_str(self, names=None):
        if not self.terms:
            return "0"
        names = names or default_names(self.nvars + self.nparams, self.nvars)
        parts = []
        for e in sorted(self.terms, key=lambda e: (_deg(e, self.nvars), [-k for k in e])):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else "%s^%d" % (names[i], k)
                for i, k in enumerate(e) if k)
            cs = str(c) if self.mode == EXACT else repr(c)
            if isinstance(c, C.GaussQ):
                cs = "(%s)" % cs
            parts.append(cs if not mono else ("%s*%s" % (cs, mono)))
        return " + ".join(parts)

    def coeff(self, e):
        return self.terms.get(tuple(e), mpq(0) if self.mode == EXACT else 0j)

    def constant(self):
        return self.coeff((0,) * (self.nvars + self.nparams))

    def is_zero(self):
        return not self.terms

    def valuation(self):
        """Lowest total degree present (order + 1 when zero)."""
        if not self.terms:
            return self.order + 1
        n = self.nvars
        return min(_deg(e, n) for e in self.terms)

    def degree_part(self, d):
        n = self.nvars
        return self._new({e: c for e, c in self.terms.items() if _deg(e, n) == d})

    def lowest_part(self):
        return self.degree_part(self.valuation())

    def truncate(self, order):
        """Drop terms of degree above ``order`` and lower the truncation order."""
        order = min(order, self.order)
        n = self.nvars
        return self._new({e: c for e, c in self.terms.items() if _deg(e, n) <= order}, order)

    def promote(self, order):
        """Reinterpret the stored polynomial at a higher truncation order."""
        return self._new(dict(self.terms), max(order, self.order))

    def with_order(self, order):
        return self.truncate(order) if order <= self.order else self.promote(order)

    def _check(self, other):
        if not isinstance(other, Jet):
            raise TypeError("expected a Jet")
        if other.nvars != self.nvars:
            raise JetError("variable-count mismatch: %d vs %d" % (self.nvars, other.nvars))
        if other.mode != self.mode:
            raise JetError("mode mismatch: %s vs %s" % (self.mode, other.mode))

    def _align(self, other):
        self._check(other)
        a, b = self, other
        if a.nparams != b.nparams:
            p = max(a.nparams, b.nparams)
            a, b = a.with_params(p), b.with_params(p)
        return a, b

    def with_params(self, nparams):
        if nparams == self.nparams:
            return self
        if nparams < self.nparams:
            if any(any(e[self.nvars + nparams:]) for e in self.terms):
                raise JetError("cannot drop a parameter the jet depends on")
            cut = self.nvars + nparams
            return Jet(self.nvars, self.order, {e[:cut]: c for e, c in self.terms.items()},
                       self.mode, nparams, _clean=True)
        pad = (0,) * (nparams - self.nparams)
        return Jet(self.nvars, self.order, {e + pad: c for e, c in self.terms.items()},
                   self.mode, nparams, _clean=True)

    # ring operations --------------------------------------------------------
    def _scalar(self, c):
        return C.convert(c, self.mode)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return self + Jet.const(other, self.nvars, self.order, self.mode, self.nparams)
        a, b = self._align(other)
        order = min(a.order, b.order)
        n = a.nvars
        out = {e: c for e, c in a.terms.items() if _deg(e, n) <= order} \
            if a.order > order else dict(a.terms)
        mode = a.mode
        for e, c in b.terms.items():
            if b.order > order and _deg(e, n) > order:
                continue
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if C.is_zero(v, mode):
                    del out[e]
                else:
                    out[e] = v
        return a._new(out, order)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return self + (-self._scalar(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self._scalar(c)
        if C.is_zero(c, self.mode):
            return self._new({})
        mode = self.mode
        out = {}
        for e, v in self.terms.items():
            w = v * c
            if not C.is_zero(w, mode):
                out[e] = w
        return self._new(out)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        a, b = self._align(other)
        return _mul(a, b, min(a.order, b.order))

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        if isinstance(c, Jet):
            return self * c.unit_inverse()
        c = self._scalar(c)
        return self.scale(1 / c)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise JetError("only nonnegative integer powers")
        out = Jet.const(1, self.nvars, self.order, self.mode, self.nparams)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def mul_to(self, other, order):
        """Product truncated at ``order`` (which may exceed either operand's order
        only when both are exact polynomials; used internally)."""
        a, b = self._align(other)
        return _mul(a, b, order)

    # comparisons -------------------------------------------------------------
    def equals(self, other, order=None):
        """Equality through ``order`` (default: the common order), via the tolerance
        in float mode."""
        a, b = self._align(other)
        if order is None:
            order = min(a.order, b.order)
        d = (a.truncate(order) - b.truncate(order))
        if a.mode == EXACT:
            return d.is_zero()
        scale = max([1.0] + [abs(c) for c in a.terms.values()] + [abs(c) for c in b.terms.values()])
        tol = C.get_tolerance() * scale
        return all(abs(c) <= tol for c in d.terms.values())

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        if (self.nvars, self.order, self.mode, self.nparams) != \
                (other.nvars, other.order, other.mode, other.nparams):
            return False
        if self.mode == EXACT:
            return self.terms == other.terms
        return self.equals(other)

    __hash__ = None

    def residual_degree(self):
        """Lowest degree of a nonzero term (None when the jet vanishes)."""
        return None if not self.terms else self.valuation()

    # calculus ---------------------------------------------------------------
    def diff(self, i):
        """Partial derivative in variable ``i`` (or a parameter when i >= nvars);
        differentiating a truncated variable lowers the order by one."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * k
        order = self.order - 1 if i < self.nvars else self.order
        return self._new(out, max(order, 0))

    def gradient(self):
        return [self.diff(i) for i in range(self.nvars)]

    def integrate_param(self, k=0):
        """Antiderivative in parameter ``k`` vanishing at parameter = 0."""
        idx = self.nvars + k
        out = {}
        for e, c in self.terms.items():
            f = list(e)
            f[idx] += 1
            out[tuple(f)] = c / (e[idx] + 1) if self.mode == FLOAT else c * mpq(1, e[idx] + 1)
        return self._new(out)

    def eval_param(self, value, k=0):
        """Substitute a scalar for parameter ``k``; the result keeps the parameter
        slot (with exponent zero)."""
        idx = self.nvars + k
        value = self._scalar(value)
        out = {}
        mode = self.mode
        for e, c in self.terms.items():
            f = list(e)
            p = f[idx]
            f[idx] = 0
            f = tuple(f)
            out[f] = out.get(f, 0) + c * (value ** p)
        return self._new({e: c for e, c in out.items() if not C.is_zero(c, mode)})

    def param_degree(self, k=0):
        idx = self.nvars + k
        return max((e[idx] for e in self.terms), default=0)

    def param_coefficients(self, k=0):
        """List of parameter-free jets ``[c_0, c_1, ...]`` with jet = sum t^m c_m."""
        idx = self.nvars + k
        deg = self.param_degree(k)
        out = [dict() for _ in range(deg + 1)]
        for e, c in self.terms.items():
            f = list(e)
            m = f.pop(idx)
            out[m][tuple(f)] = c
        return [Jet(self.nvars, self.order, d, self.mode, self.nparams - 1, _clean=True)
                for d in out]

    def divide_monomial(self, e):
        """Exact division by the monomial x^e; raises if some term is not divisible.

        The order drops by deg(e)."""
        e = tuple(e) + (0,) * (self.nvars + self.nparams - len(e))
        out = {}
        for f, c in self.terms.items():
            g = tuple(a - b for a, b in zip(f, e))
            if min(g) < 0:
                raise JetError("term %r not divisible by x^%r" % (f, e))
            out[g] = c
        return self._new(out, self.order - _deg(e, self.nvars))

    def times_monomial(self, e, order=None):
        e = tuple(e) + (0,) * (self.nvars + self.nparams - len(e))
        order = self.order + _deg(e, self.nvars) if order is None else order
        n = self.nvars
        out = {}
        for f, c in self.terms.items():
            g = tuple(a + b for a, b in zip(f, e))
            if _deg(g, n) <= order:
                out[g] = c
        return self._new(out, order)

    # unit series --------------------------------------------------------------
    def unit_power(self, p):
        """(self)^p for a unit jet and rational p, using the principal root of the
        constant term.  Raises JetError when that root leaves the field."""
        p = Fraction(p)
        c0 = self.constant()
        if C.is_zero(c0, self.mode):
            raise JetError("unit_power needs a nonzero constant term")
        if p.denominator == 1:
            k = p.numerator
            base = self if k >= 0 else self.unit_inverse()
            return base ** abs(k)
        root = C.principal_root(c0, p.denominator, self.mode)
        if root is None:
            raise JetError("root of %s is outside the coefficient field; use float mode" % (c0,))
        lead = root ** p.numerator if p.numerator >= 0 else 1 / (root ** (-p.numerator))
        u = self.scale(1 / c0) - 1  # self = c0 (1 + u)
        out = _binomial_series(u, p)
        return out.scale(lead)

    def unit_inverse(self):
        c0 = self.constant()
        if C.is_zero(c0, self.mode):
            raise JetError("not a unit: zero constant term")
        if self.nparams and any(any(e[self.nvars:]) for e in self.terms
                                if _deg(e, self.nvars) == 0):
            raise JetError("unit_inverse with parameter-dependent constant term")
        inv0 = 1 / c0
        u = self.scale(inv0) - 1
        # 1/(1+u) = sum (-u)^k
        out = Jet.const(1, self.nvars, self.order, self.mode, self.nparams)
        term = out
        for _ in range(self.order):
            term = -(term * u)
            if term.is_zero():
                break
            out = out + term
        return out.scale(inv0)

    def sqrt_unit(self):
        return self.unit_power(Fraction(1, 2))

    # substitution -------------------------------------------------------------
    def compose(self, subst, order=None):
        """Formal substitution ``self(subst_1, ..., subst_n)``.

        Substituted jets must have zero constant term in their own variables.
        Parameters of ``self`` pass through to the result.
        """
        return compose(self, subst, order)

    def __call__(self, *subst):
        return compose(self, list(subst))

    def evaluate(self, point, params=()):
        """Evaluate the stored polynomial at a complex point (float)."""
        vals = [complex(C.to_complex(v)) for v in list(point) + list(params)]
        total = 0j
        for e, c in self.terms.items():
            m = C.to_complex(c)
            for v, k in zip(vals, e):
                if k:
                    m *= v ** k
            total += m
        return total

    def to_float(self):
        if self.mode == FLOAT:
            return self
        return Jet(self.nvars, self.order, {e: C.to_complex(c) for e, c in self.terms.items()},
                   FLOAT, self.nparams)

    def substitute(self, i, value):
        """Set variable ``i`` to a scalar (typically 0); stays in the same ring."""
        value = self._scalar(value)
        mode = self.mode
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k and C.is_zero(value, mode):
                continue
            f = list(e)
            f[i] = 0
            f = tuple(f)
            out[f] = out.get(f, 0) + c * (value ** k if k else 1)
        return self._new({e: c for e, c in out.items() if not C.is_zero(c, mode)})

    def embed(self, nvars, positions):
        """View as a jet in ``nvars`` variables, variable k going to positions[k]."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * (nvars + self.nparams)
            for k, p in enumerate(positions):
                f[p] += e[k]
            for k in range(self.nparams):
                f[nvars + k] = e[self.nvars + k]
            out[tuple(f)] = c
        return Jet(nvars, self.order, out, self.mode, self.nparams, _clean=True)


def default_names(width, nvars):
    if nvars <= 3 and width == nvars:
        return list("xyz")[:nvars]
    names = ["x%d" % (i + 1) for i in range(nvars)]
    names += ["t" if width - nvars == 1 else "t%d" % k for k in range(width - nvars)]
    return names


def _pack_base(a, b, order):
    top = 0
    for t in (a.terms, b.terms):
        m = 0
        for e in t:
            for k in e:
                if k > m:
                    m = k
        top += m
    return max(order, top) + 1


def _mul(a, b, order):
    if not a.terms or not b.terms:
        return a._new({}, order)
    n = a.nvars
    width = n + a.nparams
    if len(a.terms) > len(b.terms):
        a, b = b, a
    B = _pack_base(a, b, order)
    weights = [B ** i for i in range(width)]

    def pack(e):
        return sum(k * w for k, w in zip(e, weights))

    bb = sorted(((sum(e[:n]), pack(e), c) for e, c in b.terms.items()), key=lambda t: t[0])
    out = {}
    get = out.get
    for ea, ca in a.terms.items():
        lim = order - sum(ea[:n])
        if lim < 0:
            continue
        ka = pack(ea)
        for db, kb, cb in bb:
            if db > lim:
                break
            k = ka + kb
            v = get(k)
            out[k] = ca * cb if v is None else v + ca * cb
    mode = a.mode
    terms = {}
    for k, c in out.items():
        if C.is_zero(c, mode):
            continue
        e = []
        for _ in range(width):
            k, r = divmod(k, B)
            e.append(r)
        terms[tuple(e)] = c
    return Jet(a.nvars, order, terms, mode, a.nparams, _clean=True)


def _binomial_series(u, p):
    """(1 + u)^p for a jet u with zero constant term."""
    out = Jet.const(1, u.nvars, u.order, u.mode, u.nparams)
    term = out
    coef = Fraction(1)
    for k in range(1, u.order + 1):
        coef = coef * (p - (k - 1)) / k
        term = term * u
        if term.is_zero():
            break
        c = mpq(coef.numerator, coef.denominator) if u.mode == EXACT else complex(float(coef))
        out = out + term.scale(c)
    return out


def compose(F, subst, order=None):
    return compose_many([F], subst, order)[0]


def compose_many(Fs, subst, order=None):
    """Compose several jets (same variable count) with one substitution,
    sharing the cached powers of the substituted jets."""
    Fs = list(Fs)
    F = Fs[0]
    subst = list(subst)
    if len(subst) != F.nvars:
        raise JetError("compose: expected %d substitutions, got %d" % (F.nvars, len(subst)))
    if not subst:
        raise JetError("compose: empty substitution")
    m = subst[0].nvars
    mode = F.mode
    p = max([G.nparams for G in Fs] + [s.nparams for s in subst])
    for s in subst:
        if s.nvars != m:
            raise JetError("compose: substitutions live in different variable counts")
        if s.mode != mode:
            raise JetError("compose: mode mismatch")
        for e in s.terms:
            if _deg(e, m) == 0:
                raise JetError("compose: substituted jet has a nonzero constant term")
    subst = [s.with_params(p) for s in subst]
    out_order = min([F.order] + [s.order for s in subst])
    if order is not None:
        out_order = min(out_order, order)
    nF = F.nvars
    width = m + p
    # all work happens on exponents packed into integers with a common base
    maxp_s = max([0] + [max(e[m:], default=0) for s in subst for e in s.terms])
    for G in Fs:
        if G.nvars != nF or G.mode != mode:
            raise JetError("compose: jets to substitute into differ in shape")
    maxp_F = max([0] + [max(e[nF:], default=0) for G in Fs for e in G.terms])
    out_order = min([out_order] + [G.order for G in Fs])
    B = max(out_order, out_order * maxp_s + maxp_F) + 1
    weights = [B ** i for i in range(width)]

    def pack(e):
        return sum(k * w for k, w in zip(e, weights))

    packed = []
    for s in subst:
        lst = [(sum(e[:m]), pack(e), c) for e, c in s.terms.items()]
        lst.sort(key=lambda t: t[0])
        packed.append(lst)
    degof = {}
    zero_key = 0
    degof[zero_key] = 0
    cache = {(0,) * nF: {zero_key: C.convert(1, mode)}}

    def mono(alpha):
        got = cache.get(alpha)
        if got is not None:
            return got
        last = max(i for i in range(nF) if alpha[i])
        prev = list(alpha)
        prev[last] -= 1
        base = mono(tuple(prev))
        res = {}
        get = res.get
        sl = packed[last]
        for ka, ca in base.items():
            lim = out_order - degof[ka]
            for db, kb, cb in sl:
                if db > lim:
                    break
                k = ka + kb
                v = get(k)
                if v is None:
                    res[k] = ca * cb
                    degof[k] = degof[ka] + db
                else:
                    res[k] = v + ca * cb
        res = {k: c for k, c in res.items() if c != 0}
        cache[alpha] = res
        return res

    return [_compose_one(G, nF, m, p, out_order, mode, mono, weights, B) for G in Fs]


def _compose_one(F, nF, m, p, out_order, mode, mono, weights, B):
    width = m + p
    out = {}
    get = out.get
    groups = {}
    for e, c in F.terms.items():
        alpha = e[:nF]
        if sum(alpha) > out_order:
            continue
        groups.setdefault(alpha, []).append((e[nF:], c))
    for alpha in sorted(groups, key=sum):
        mj = mono(alpha)
        for beta, c in groups[alpha]:
            shift = sum(k * weights[m + i] for i, k in enumerate(beta)) if beta else 0
            for k, v in mj.items():
                k = k + shift
                w = get(k)
                out[k] = c * v if w is None else w + c * v
    terms = {}
    for k, c in out.items():
        if C.is_zero(c, mode):
            continue
        e = []
        for _ in range(width):
            k, r = divmod(k, B)
            e.append(r)
        terms[tuple(e)] = c
    return Jet(m, out_order, terms, mode, p, _clean=True)


def jet_arith(a, b, op):
    """Binary jet arithmetic: op in {"add", "sub", "mul", "scale"} (for "scale",
    ``b`` is a scalar)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError("unknown op %r" % (op,))


def jet_compose(F, subst):
    return compose(F, subst)


class DiffeoJet:
    """A map germ (C^n, 0) -> (C^n, 0) stored as n component jets."""

    __slots__ = ("components",)

    def __init__(self, components, check=True):
        comps = list(components)
        if not comps:
            raise JetError("a diffeomorphism needs components")
        n = len(comps)
        order = min(c.order for c in comps)
        mode = comps[0].mode
        for c in comps:
            if c.nvars != n:
                raise JetError("component in %d variables, expected %d" % (c.nvars, n))
            if c.mode != mode:
                raise JetError("mixed modes in a diffeomorphism")
        comps = [c.truncate(order) for c in comps]
        for c in comps:
            if any(_deg(e, n) == 0 for e in c.terms):
                raise JetError("diffeomorphism components must vanish at 0")
        self.components = tuple(comps)
        if check:
            from .linalg import det
            if C.is_zero(det(self.linear_matrix(), mode), mode):
                raise JetError("singular linear part")

    @classmethod
    def identity(cls, n, order, mode=EXACT, nparams=0):
        return cls([Jet.var(i, n, order, mode, nparams) for i in range(n)], check=False)

    @classmethod
    def from_matrix(cls, M, order, mode=EXACT):
        """Linear map x -> M x."""
        n = len(M)
        comps = []
        for i in range(n):
            terms = {}
            for j in range(n):
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = M[i][j]
            comps.append(Jet(n, order, terms, mode))
        return cls(comps)

    @property
    def n(self):
        return len(self.components)

    @property
    def order(self):
        return self.components[0].order

    @property
    def mode(self):
        return self.components[0].mode

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __repr__(self):
        return "DiffeoJet(%s)" % ", ".join(c.to_str() for c in self.components)

    def linear_matrix(self):
        n = self.n
        M = []
        for c in self.components:
            row = []
            for j in range(n):
                e = [0] * (n + c.nparams)
                e[j] = 1
                row.append(c.coeff(e))
            M.append(row)
        return M

    def linear_part(self):
        return DiffeoJet([c.degree_part(1) for c in self.components])

    def truncate(self, order):
        return DiffeoJet([c.truncate(order) for c in self.components], check=False)

    def promote(self, order):
        return DiffeoJet([c.promote(order) for c in self.components], check=False)

    def with_order(self, order):
        return DiffeoJet([c.with_order(order) for c in self.components], check=False)

    def pullback(self, F):
        """F o self."""
        return compose(F, self.components)

    def pullback_many(self, Fs):
        return compose_many(Fs, self.components)

    def compose(self, other):
        """self o other."""
        return DiffeoJet(compose_many(self.components, other.components), check=False)

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        return invert_diffeo(self)

    def equals(self, other, order=None):
        return all(a.equals(b, order) for a, b in zip(self.components, other.components))

    def __eq__(self, other):
        if not isinstance(other, DiffeoJet):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def to_float(self):
        return DiffeoJet([c.to_float() for c in self.components], check=False)

    def evaluate(self, point):
        return [c.evaluate(point) for c in self.components]


def invert_diffeo(phi):
    """Compositional inverse through the order of ``phi`` (Newton iteration)."""
    from .linalg import inverse, SingularMatrix
    n, K, mode = phi.n, phi.order, phi.mode
    try:
        Linv = inverse(phi.linear_matrix(), mode)
    except SingularMatrix:
        raise JetError("singular linear part") from None
    comps = list(phi.components)
    x = [Jet.var(i, n, K, mode) for i in range(n)]
    zero = Jet.zero(n, K, mode)

    def apply_linv(vec):
        return [sum((vec[j].scale(Linv[i][j]) for j in range(n)
                     if not C.is_zero(Linv[i][j], mode)), zero) for i in range(n)]

    L = phi.linear_part()
    jac = [[comps[i].diff(j).promote(K) for j in range(n)] for i in range(n)]
    jac_nl = [[jac[i][j] - L[i].diff(j).promote(K) for j in range(n)] for i in range(n)]
    flat = [jac_nl[i][j] for i in range(n) for j in range(n)]
    psi = apply_linv(x)
    k = 1
    while k < K:
        k2 = min(2 * k + 1, K)
        vals = compose_many(comps + flat, psi, order=k2)
        err = [vals[i].promote(K) - x[i] for i in range(n)]
        if all(e.is_zero() for e in err):
            # exact through k2 only; higher degrees may still be wrong
            k = k2
            continue
        # A = L^{-1} (D phi(psi) - L), needed through degree k2 - k - 1
        dk = max(k2 - k - 1, 0)
        E = [[vals[n + i * n + j].truncate(dk) for j in range(n)] for i in range(n)]
        A = [[sum((E[l][j].scale(Linv[i][l]) for l in range(n)
                   if not C.is_zero(Linv[i][l], mode)), Jet.zero(n, dk, mode))
              for j in range(n)] for i in range(n)]
        v = apply_linv(err)
        w = list(v)
        for _ in range(dk):
            v = [-sum((A[i][j].mul_to(v[j], k2) for j in range(n)), Jet.zero(n, k2, mode)).promote(K)
                 for i in range(n)]
            if all(c.is_zero() for c in v):
                break
            w = [a + b for a, b in zip(w, v)]
        psi = [(p_ - w_).truncate(k2).promote(K) for p_, w_ in zip(psi, w)]
        k = k2
    return DiffeoJet(psi, check=False)


def invert_scalar_jet(v):
    """Compositional inverse of a one-variable jet with v(0) = 0, v'(0) != 0."""
    if v.nvars != 1:
        raise JetError("invert_scalar_jet needs a one-variable jet")
    if C.is_zero(v.coeff((1,) + (0,) * v.nparams), v.mode):
        raise JetError("zero linear coefficient")
    return invert_diffeo(DiffeoJet([v], check=False)).components[0]


def solve_implicit(F, u_index=None):
    """Solve F(x, u(x)) = 0 for u with u(0) = 0.

    ``F`` is a jet in m+1 variables; the unknown is variable ``u_index``
    (default the last one).  Returns a jet in the remaining m variables.
    """
    return solve_implicit_system([F], [F.nvars - 1 if u_index is None else u_index])[0]


def solve_implicit_system(Fs, unknowns):
    """Solve F_k(x, u(x)) = 0 for the unknown variables ``unknowns``.

    Every F_k lives in the same ring; the Jacobian of (F_k) in the unknowns at
    0 must be invertible.  Returns jets u_k in the remaining variables.
    """
    from .linalg import inverse, SingularMatrix
    F0 = Fs[0]
    N, K, mode, p = F0.nvars, F0.order, F0.mode, F0.nparams
    unknowns = list(unknowns)
    if len(Fs) != len(unknowns):
        raise JetError("need as many equations as unknowns")
    known = [i for i in range(N) if i not in unknowns]
    m = len(known)
    if m == 0:
        raise JetError("nothing to solve for: no independent variables left")
    zero_e = (0,) * (N + p)
    for F in Fs:
        if not C.is_zero(F.coeff(zero_e), mode):
            raise JetError("F(0) must vanish")
    J = []
    for F in Fs:
        row = []
        for u in unknowns:
            d = F.diff(u)
            e = list(zero_e)
            row.append(d.coeff(e))
        J.append(row)
    for F in Fs:
        for u in unknowns:
            d = F.diff(u)
            if any(_deg(e, N) == 0 and any(e[N:]) for e in d.terms):
                raise JetError("derivative in the unknowns depends on a parameter at 0")
    try:
        Jinv = inverse(J, mode)
    except SingularMatrix:
        raise JetError("degenerate derivative in the unknowns") from None
    xs = [Jet.var(k, m, K, mode, p) for k in range(m)]
    us = [Jet.zero(m, K, mode, p) for _ in unknowns]
    k = len(unknowns)
    # pass d makes u exact through degree d + 1
    for d in range(K):
        subst = [None] * N
        for pos, i in enumerate(known):
            subst[i] = xs[pos]
        for pos, i in enumerate(unknowns):
            subst[i] = us[pos]
        vals = [v.promote(K) for v in compose_many(Fs, subst, order=d + 1)]
        us = [us[a] - sum((vals[b].scale(Jinv[a][b]) for b in range(k)), Jet.zero(m, K, mode, p))
              for a in range(k)]
    return us


class CurveJet:
    """A parametrized curve germ t -> (gamma_1(t), ..., gamma_n(t))."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = list(components)
        if not comps:
            raise JetError("a curve needs components")
        order = min(c.order for c in comps)
        for c in comps:
            if c.nvars != 1:
                raise JetError("curve components are one-variable jets")
            if not C.is_zero(c.constant(), c.mode):
                raise JetError("curve components must vanish at 0")
        comps = [c.truncate(order) for c in comps]
        if all(c.is_zero() for c in comps):
            raise JetError("curve is identically zero through its order")
        self.components = tuple(comps)

    @property
    def n(self):
        return len(self.components)

    @property
    def order(self):
        return self.components[0].order

    @property
    def mode(self):
        return self.components[0].mode

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __repr__(self):
        return "CurveJet(%s)" % ", ".join(c.to_str(["t"]) for c in self.components)

    def pullback(self, F):
        """F o gamma as a jet in t."""
        return compose(F, self.components)

    def tangent(self):
        return [c.coeff((1,)) for c in self.components]

    def valuation(self):
        return min(c.valuation() for c in self.components)

    def map(self, phi):
        """phi o gamma."""
        return CurveJet([compose(c, self.components) for c in phi.components])

    def reparametrize(self, s):
        """gamma o s for a one-variable jet s(t)."""
        return CurveJet([compose(c, [s]) for c in self.components])
