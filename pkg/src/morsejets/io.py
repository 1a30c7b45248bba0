"""Germ file formats and a small expression parser.

Text format::

    vars=2 order=8 mode=exact
    2 0 : 1/1
    0 2 : 1/1
    1 1 : 0/1 + 1/2 i

Lines starting with ``#`` are comments.  A pair file holds two germ blocks
separated by a line containing only ``---``.  The JSON form is
``{"vars": n, "order": K, "mode": m, "terms": [{"exp": [...], "re": .., "im": ..}]}``
with exact values written as ``"p/q"`` strings.
"""

import json
import re

from . import coeff as C
from .coeff import EXACT, FLOAT
from .jet import Jet, DiffeoJet


class GermFormatError(ValueError):
    pass


_HEADER = re.compile(r"^\s*vars\s*=\s*(\d+)\s+order\s*=\s*(\d+)\s+mode\s*=\s*(exact|float)\s*$")


def _fmt_coeff(c, mode):
    return C.format_exact(c) if mode == EXACT else C.format_float(c)


def _sorted_terms(jet):
    n = jet.nvars
    return sorted(jet.terms.items(), key=lambda kv: (sum(kv[0][:n]), [-k for k in kv[0]]))


def format_germ(jet):
    if jet.nparams:
        raise GermFormatError("parameter-dependent jets have no germ file form")
    lines = ["vars=%d order=%d mode=%s" % (jet.nvars, jet.order, jet.mode)]
    for e, c in _sorted_terms(jet):
        lines.append("%s : %s" % (" ".join(str(k) for k in e), _fmt_coeff(c, jet.mode)))
    return "\n".join(lines) + "\n"


def parse_germ(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GermFormatError("empty germ block")
    m = _HEADER.match(lines[0])
    if not m:
        raise GermFormatError("bad header line: %r" % lines[0])
    n, K, mode = int(m.group(1)), int(m.group(2)), m.group(3)
    if n < 1:
        raise GermFormatError("vars must be positive")
    terms = {}
    for ln in lines[1:]:
        if ":" not in ln:
            raise GermFormatError("bad term line: %r" % ln)
        left, right = ln.split(":", 1)
        try:
            e = tuple(int(k) for k in left.split())
        except ValueError:
            raise GermFormatError("bad exponents: %r" % ln) from None
        if len(e) != n:
            raise GermFormatError("term %r has %d exponents, expected %d" % (ln, len(e), n))
        if min(e) < 0:
            raise GermFormatError("negative exponent in %r" % ln)
        if sum(e) > K:
            raise GermFormatError("term %r exceeds order %d" % (ln, K))
        try:
            c = C.parse_exact(right) if mode == EXACT else C.parse_float(right)
        except (ValueError, ZeroDivisionError):
            raise GermFormatError("bad coefficient in %r" % ln) from None
        if e in terms:
            raise GermFormatError("duplicate exponent %r" % (e,))
        terms[e] = c
    return Jet(n, K, terms, mode)


def germ_to_json(jet):
    out = []
    for e, c in _sorted_terms(jet):
        re_, im = C.re_im(c)
        if jet.mode == EXACT:
            out.append({"exp": list(e), "re": C.format_exact(re_),
                        "im": C.format_exact(im)})
        else:
            out.append({"exp": list(e), "re": float(re_), "im": float(im)})
    return {"vars": jet.nvars, "order": jet.order, "mode": jet.mode, "terms": out}


def germ_from_json(obj):
    try:
        n, K, mode = int(obj["vars"]), int(obj["order"]), obj["mode"]
        if mode not in (EXACT, FLOAT):
            raise GermFormatError("bad mode %r" % mode)
        terms = {}
        for t in obj["terms"]:
            e = tuple(int(k) for k in t["exp"])
            if len(e) != n or sum(e) > K or min(e) < 0:
                raise GermFormatError("bad exponent %r" % (e,))
            if mode == EXACT:
                c = C.gauss(C.parse_exact(str(t["re"])), C.parse_exact(str(t.get("im", "0"))))
            else:
                c = complex(float(t["re"]), float(t.get("im", 0.0)))
            terms[e] = c
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GermFormatError):
            raise
        raise GermFormatError("malformed JSON germ: %s" % exc) from None
    return Jet(n, K, terms, mode)


def _split_blocks(text):
    blocks, cur = [], []
    for ln in text.splitlines():
        if ln.strip() == "---":
            blocks.append("\n".join(cur))
            cur = []
        else:
            cur.append(ln)
    blocks.append("\n".join(cur))
    return [b for b in blocks if b.strip()]


def loads(text):
    """Parse one file's contents into a list of jets (text or JSON)."""
    s = text.strip()
    if s.startswith("{") or s.startswith("["):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise GermFormatError("invalid JSON: %s" % exc) from None
        if isinstance(obj, dict) and "terms" in obj:
            return [germ_from_json(obj)]
        if isinstance(obj, dict) and "germs" in obj:
            obj = obj["germs"]
        if isinstance(obj, list):
            return [germ_from_json(o) for o in obj]
        raise GermFormatError("unrecognized JSON layout")
    return [parse_germ(b) for b in _split_blocks(text)]


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def dumps_pair(f, g):
    return format_germ(f) + "---\n" + format_germ(g)


def dumps_diffeo(phi):
    return "---\n".join(format_germ(c) for c in phi.components)


def load_diffeo(path):
    return DiffeoJet(load(path))


def parse_expr(expr, nvars, order, mode=EXACT, names=None):
    """Build a jet from a polynomial expression string, e.g. ``"x**2 + 2*y**2"``.

    Variables are ``x, y, z`` for n <= 3 (also ``x1, x2, ...``); ``I`` is the
    imaginary unit.
    """
    import sympy
    if names is None:
        names = ["x%d" % (i + 1) for i in range(nvars)]
        alias = list("xyz")[:nvars] if nvars <= 3 else []
    else:
        alias = []
    syms = sympy.symbols(names)
    if not isinstance(syms, (list, tuple)):
        syms = [syms]
    local = {nm: s for nm, s in zip(names, syms)}
    local.update({nm: s for nm, s in zip(alias, syms)})
    local["I"] = sympy.I
    e = sympy.sympify(expr, locals=local, rational=True)
    poly = sympy.Poly(sympy.expand(e), *syms)
    terms = {}
    for mono, c in poly.terms():
        if sum(mono) > order:
            continue
        if mode == EXACT:
            terms[tuple(mono)] = C.to_exact(c)
        else:
            terms[tuple(mono)] = complex(c)
    return Jet(nvars, order, terms, mode)
