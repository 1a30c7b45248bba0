"""Scalar coefficients.

Exact mode works over the Gaussian rationals Q(i).  Real values are plain
``gmpy2.mpq``; values with a nonzero imaginary part are :class:`GaussQ`.
Arithmetic between the two mixes transparently and always collapses back to
``mpq`` when the imaginary part cancels.

Float mode uses Python ``complex`` and compares through a single global
tolerance (see :func:`set_tolerance`).
"""

from fractions import Fraction
import cmath
import numbers

import gmpy2
from gmpy2 import mpq

EXACT = "exact"
FLOAT = "float"

_TOL = [1e-10]


def set_tolerance(tol):
    """Set the global float-mode comparison tolerance."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    _TOL[0] = float(tol)


def get_tolerance():
    return _TOL[0]


class GaussQ:
    """Gaussian rational ``re + im*i`` with ``im != 0``.

    Never construct directly; use :func:`gauss`, which returns a plain mpq
    when the imaginary part is zero.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    def __add__(self, o):
        if isinstance(o, GaussQ):
            return gauss(self.re + o.re, self.im + o.im)
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            return GaussQ(self.re + o, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        if isinstance(o, GaussQ):
            return gauss(self.re - o.re, self.im - o.im)
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            return GaussQ(self.re - o, self.im)
        return NotImplemented

    def __rsub__(self, o):
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            return GaussQ(o - self.re, -self.im)
        return NotImplemented

    def __mul__(self, o):
        if isinstance(o, GaussQ):
            return gauss(self.re * o.re - self.im * o.im,
                         self.re * o.im + self.im * o.re)
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            if o == 0:
                return mpq(0)
            return GaussQ(self.re * o, self.im * o)
        return NotImplemented

    __rmul__ = __mul__

    def _inv(self):
        n = self.re * self.re + self.im * self.im
        return GaussQ(self.re / n, -self.im / n)

    def __truediv__(self, o):
        if isinstance(o, GaussQ):
            return self * o._inv()
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            return GaussQ(self.re / o, self.im / o)
        return NotImplemented

    def __rtruediv__(self, o):
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            return self._inv() * o
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (self._inv()) ** (-k)
        out = mpq(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, GaussQ):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, type(mpq(0)), Fraction)):
            return False
        if isinstance(o, complex):
            return complex(self) == o
        return NotImplemented

    def __ne__(self, o):
        r = self.__eq__(o)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return GaussQ(self.re, -self.im)

    def __repr__(self):
        return "GaussQ(%s, %s)" % (self.re, self.im)

    def __str__(self):
        return format_exact(self)


_MPQ = type(mpq(0))


def gauss(re, im=0):
    """Build an exact coefficient from real and imaginary parts."""
    re = to_mpq(re)
    im = to_mpq(im)
    if im == 0:
        return re
    return GaussQ(re, im)


def to_mpq(x):
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    if isinstance(x, numbers.Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        raise TypeError("floats are not exact coefficients; use float mode")
    # gmpy2 mpz and friends
    return mpq(x)


def to_exact(x):
    """Convert a Python/gmpy/sympy number to an exact coefficient."""
    if isinstance(x, (GaussQ, _MPQ)):
        return x
    if isinstance(x, complex):
        raise TypeError("complex floats are not exact coefficients")
    try:
        import sympy
        if isinstance(x, sympy.Basic):
            re, im = x.as_real_imag()
            return gauss(mpq(int(sympy.fraction(re)[0]), int(sympy.fraction(re)[1])),
                         mpq(int(sympy.fraction(im)[0]), int(sympy.fraction(im)[1])))
    except ImportError:  # pragma: no cover
        pass
    return to_mpq(x)


def to_complex(c):
    if isinstance(c, complex):
        return c
    if isinstance(c, GaussQ):
        return complex(c)
    return complex(float(c))


def convert(c, mode):
    return to_complex(c) if mode == FLOAT else to_exact(c)


def re_im(c):
    if isinstance(c, GaussQ):
        return c.re, c.im
    if isinstance(c, complex):
        return c.real, c.imag
    return c, 0


def conj(c):
    if isinstance(c, (GaussQ, complex)):
        return c.conjugate()
    return c


def is_zero(c, mode=EXACT):
    if mode == FLOAT:
        return abs(c) <= _TOL[0]
    return c == 0


def lex_key(c):
    """Sort key ordering scalars by (re, im) lexicographically."""
    re, im = re_im(c)
    return (float(re), float(im)) if isinstance(c, complex) else (re, im)


def lex_positive(c, mode=EXACT):
    """True when (re, im) is lexicographically positive."""
    re, im = re_im(c)
    if mode == FLOAT:
        tol = _TOL[0]
        if abs(re) > tol:
            return re > 0
        return im > tol
    if re != 0:
        return re > 0
    return im > 0


def _rational_root(q, n):
    """n-th root of a rational if it is rational, else None (q >= 0 for even n)."""
    q = to_mpq(q)
    if q == 0:
        return mpq(0)
    sign = 1
    if q < 0:
        if n % 2 == 0:
            return None
        sign, q = -1, -q
    num, den = q.numerator, q.denominator
    rn, ex_n = gmpy2.iroot(num, n)
    rd, ex_d = gmpy2.iroot(den, n)
    if not (ex_n and ex_d):
        return None
    return sign * mpq(rn, rd)


def exact_sqrt(c):
    """Principal square root in Q(i), or None when c is not a square there.

    The principal root has (re, im) lexicographically positive.
    """
    if isinstance(c, GaussQ):
        a, b = c.re, c.im
        m = _rational_root(a * a + b * b, 2)
        if m is None:
            return None
        x = _rational_root((a + m) / 2, 2)
        y = _rational_root((m - a) / 2, 2)
        if x is None or y is None:
            return None
        if b < 0:
            y = -y
        r = gauss(x, y)
    else:
        c = to_mpq(c)
        if c >= 0:
            r = _rational_root(c, 2)
        else:
            s = _rational_root(-c, 2)
            r = None if s is None else gauss(0, s)
        if r is None:
            return None
    if not lex_positive(r):
        r = -r
    return r


def exact_root(c, n):
    """An n-th root of c in Q(i) (n = 2 principal; odd n: real roots only)."""
    if n == 1:
        return c
    if n == 2:
        return exact_sqrt(c)
    if isinstance(c, GaussQ):
        # small search among obvious candidates: c = (a i^k)^n for rational a
        for unit in (gauss(0, 1), gauss(0, -1)):
            q = c / (unit ** n)
            if not isinstance(q, GaussQ):
                r = _rational_root(q, n)
                if r is not None:
                    return unit * r
        return None
    return _rational_root(c, n)


def principal_sqrt(c, mode):
    if mode == FLOAT:
        r = cmath.sqrt(to_complex(c))
        if not lex_positive(r, FLOAT):
            r = -r
        return r
    return exact_sqrt(c)


def principal_root(c, n, mode):
    if mode == FLOAT:
        c = to_complex(c)
        if n % 2 == 1 and abs(c.imag) <= _TOL[0] and c.real < 0:
            return -((-c.real) ** (1.0 / n)) + 0j
        r = c ** (1.0 / n)
        return r
    return exact_root(c, n)


def format_exact(c):
    """Germ-file text for an exact coefficient: ``p/q [+ r/s i]``."""
    re, im = re_im(c)
    re = to_mpq(re)
    im = to_mpq(im)
    s = "%d/%d" % (re.numerator, re.denominator)
    if im != 0:
        s += " + %d/%d i" % (im.numerator, im.denominator)
    return s


def parse_exact(text):
    text = text.strip()
    if "+" in text and text.endswith("i"):
        re_txt, im_txt = text[:-1].rsplit("+", 1)
        if not re_txt.strip():
            re_txt = "0"
        return gauss(Fraction(re_txt.strip()), Fraction(im_txt.strip()))
    if text.endswith("i"):
        return gauss(0, Fraction(text[:-1].strip()))
    return to_mpq(Fraction(text))


def format_float(c):
    c = to_complex(c)
    s = repr(c.real)
    if c.imag != 0:
        s += " + %r i" % c.imag
    return s


def parse_float(text):
    text = text.strip()
    if text.endswith("i"):
        body = text[:-1]
        # split on the last '+' that is not part of an exponent
        idx = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] == "+" and body[k - 1] not in "eE":
                idx = k
                break
        if idx is None:
            return complex(0.0, float(body))
        return complex(float(body[:idx]), float(body[idx + 1:]))
    return complex(float(text), 0.0)
