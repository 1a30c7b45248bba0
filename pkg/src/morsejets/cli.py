"""Command-line interface.

Every command prints a report, as text or as JSON with the keys
``command, inputs, order, mode, result, witnesses, residuals``.  Exit
status: 0 success or equivalent, 1 a decided negative, 2 a failed
hypothesis, 3 bad input.
"""

import argparse
import json
import sys

from . import coeff as C
from . import io
from .coeff import EXACT, FLOAT
from .errors import MorseJetsError, NegativeResult, HypothesisFailed
from .jet import Jet, DiffeoJet, JetError

EXIT_OK, EXIT_NEGATIVE, EXIT_HYPOTHESIS, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class Report:
    def __init__(self, command, inputs, order, mode):
        self.data = {"command": command, "inputs": list(inputs), "order": order, "mode": mode,
                     "result": None, "witnesses": [], "residuals": []}

    def __getitem__(self, key):
        return self.data[key]

    def __setitem__(self, key, value):
        self.data[key] = value

    def text(self):
        d = self.data
        lines = ["%s (order %s, %s)" % (d["command"], d["order"], d["mode"])]
        lines += _text_lines(d["result"], "  ")
        for w in d["witnesses"]:
            lines.append("  witness:")
            lines += _text_lines(w, "    ")
        for r in d["residuals"]:
            lines.append("  residual:")
            lines += _text_lines(r, "    ")
        return "\n".join(lines)


def _text_lines(obj, indent):
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                out.append("%s%s:" % (indent, k))
                out += _text_lines(v, indent + "  ")
            else:
                out.append("%s%s: %s" % (indent, k, _short(v)))
        return out
    if isinstance(obj, list):
        out = []
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                out.append(indent + "-")
                out += _text_lines(v, indent + "  ")
            else:
                out.append("%s- %s" % (indent, _short(v)))
        return out
    return ["%s%s" % (indent, _short(obj))]


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _short(v):
    if isinstance(v, list):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return str(v)


# input ---------------------------------------------------------------------------

def _load_germs(paths, count, mode):
    germs = []
    for p in paths:
        try:
            germs += io.load(p)
        except OSError as e:
            raise InputError("cannot read %s: %s" % (p, e)) from None
        except (io.GermFormatError, JetError) as e:
            raise InputError("%s: %s" % (p, e)) from None
    if len(germs) != count:
        raise InputError("expected %d germs, found %d in %s" % (count, len(germs),
                                                                 ", ".join(paths)))
    if mode == FLOAT:
        germs = [g.to_float() for g in germs]
    elif any(g.mode == FLOAT for g in germs):
        raise InputError("float germs need --mode float")
    n = germs[0].nvars
    if any(g.nvars != n for g in germs):
        raise InputError("germs have different numbers of variables")
    return germs


def _at(germs, K):
    return [g.with_order(K) for g in germs]


def _jet(J):
    return J.to_str()


def _diffeo(phi):
    return [_jet(c) for c in phi.components]


def _emit(phi, path):
    if path:
        with open(path, "w") as fh:
            fh.write(io.dumps_diffeo(phi))


def _residuals(pairs, phi, K):
    """Exact composition residuals (lowest nonzero degree or None)."""
    out = []
    for name, (a, b) in pairs.items():
        d = (phi.pullback(a.with_order(K)) - b.with_order(K)).truncate(K)
        zero = d.is_zero() if d.mode == EXACT else d.equals(Jet.zero(d.nvars, K, d.mode))
        out.append({"check": name, "zero_through_order": zero,
                    "lowest_degree": None if zero else d.valuation()})
    return out


# commands ------------------------------------------------------------------------

def cmd_normalize(args, rep, K, mode):
    from . import normal_forms as NF, classify as CL, cusps as CU
    kind = args.kind
    if kind == "morse":
        (f,) = _at(_load_germs(args.files, 1, mode), K)
        phi = NF.morse_normalize(f, K)
        rep["result"] = {"phi": _diffeo(phi), "normal_form": _jet(phi.pullback(f))}
    elif kind == "diagonalize":
        f, g = _at(_load_germs(args.files, 2, mode), K)
        phi, lams = NF.diagonalize_pair(f, g, K)
        rep["result"] = {"phi": _diffeo(phi), "lambda": [str(x) for x in lams],
                         "genericity": NF.genericity_class(f, g, K).to_dict()}
    elif kind == "fold":
        f, g = _at(_load_germs(args.files, 2, mode), K)
        phi, Phi = CL.fold_normalize(f, g, K)
        rep["result"] = {"phi": phi.to_str(["s"]), "Phi": _diffeo(Phi),
                         "foliation_form": bool(CL.fold_foliation_form(phi))}
    else:
        (f,) = _at(_load_germs(args.files, 1, mode), K)
        phi = CU.milnor2_normalize(f, K)
        rep["result"] = {"phi": _diffeo(phi), "normal_form": _jet(phi.pullback(f))}
    if args.emit_diffeo:
        _emit(phi if kind != "fold" else Phi, args.emit_diffeo)


def _is_cusp(f):
    from .normal_forms import quadratic_matrix
    from . import linalg as LA
    return f.nvars == 3 and LA.rank(quadratic_matrix(f), f.mode) == 2


def cmd_tangency(args, rep, K, mode):
    from . import tangency as T, normal_forms as NF, cusps as CU
    f, g = _at(_load_germs(args.files, 2, mode), K)
    what = args.what
    if what == "generators":
        ideal = T.tangency_generators(f, g)
        res = {"generators": {"h%d%d" % (i + 1, j + 1): _jet(h.truncate(K - 1))
                              for (i, j), h in sorted(ideal.gens.items())}}
        if _is_cusp(f):
            try:
                pair = CU.CuspPair.from_jets(f, g, K)
                cert = CU.cusp_ideal_check(pair, K)
                res["model_ideal"] = "<x^2*y, x^2*z, y*z>"
                res["certificate"] = cert.to_dict()
            except MorseJetsError as e:
                res["model_ideal_check"] = e.to_dict()
        rep["result"] = res
        return
    if _is_cusp(f):
        phi, pair = CU.cusp_form(f, g, K)
        if what == "curves":
            rep_ = CU.exceptional_check(pair, K)
            res = rep_.to_dict()
            res["phi"] = _diffeo(phi)
            rep["result"] = res
            return
        N = CU.cusp_normalize(f, g, K)
        rep["result"] = {"phi": _diffeo(N.phi), "g": _jet(N.pair.g)}
        _emit(N.phi, args.emit_diffeo)
        return
    phi, lams = NF.diagonalize_pair(f, g, K)
    F, G = phi.pullback_many([f, g])
    if what == "curves":
        curves = T.tangency_curves(F, G, K)
        rep["result"] = {"phi": _diffeo(phi), "lambda": [str(x) for x in lams],
                         "curves": [{"axis": tc.axis + 1,
                                     "components": [c.to_str(["t"]) for c in tc.curve.components]}
                                    for tc in curves]}
        return
    s = T.straighten(F, G, K)
    total = phi.compose(s).truncate(K)
    rep["result"] = {"phi": _diffeo(total), "lambda": [str(x) for x in lams],
                     "g": _jet(total.pullback(g))}
    _emit(total, args.emit_diffeo)


def cmd_invariants(args, rep, K, mode):
    from . import classify as CL
    f, g = _at(_load_germs(args.files, 2, mode), K)
    kind = args.kind
    if kind == "r":
        rep["result"] = CL.r_invariants(f, g, K).to_dict()
        rep["result"]["sigma_curves"] = [s.to_dict() for s in CL.sigma_curves(f, g, K)]
    elif kind == "f":
        rep["result"] = CL.f_invariant(f, g, K).to_dict()
    elif kind == "a":
        rep["result"] = {"sigma_curves": [s.to_dict() for s in CL.sigma_curves(f, g, K)],
                         "note": "A-equivalence is decided by equiv a"}
    elif kind == "q":
        rep["result"] = CL.q_normal_form(f, g, K).to_dict()
    else:
        rep["result"] = {"mu": [str(m) for m in CL.cone_restriction_form(f, g)]}


def cmd_equiv(args, rep, K, mode):
    from . import classify as CL, cusps as CU, moser as M
    files = args.files
    f0, g0, f1, g1 = _at(_load_germs(files, 4, mode), K)
    p0, p1 = (f0, g0), (f1, g1)
    kind = args.kind
    res = {"equivalent": True}
    phi = None
    if kind == "r":
        phi = CL.r_equivalent(p0, p1, K)
        rep["residuals"] = _residuals({"f": (f0, f1), "g": (g0, g1)}, phi, K)
    elif kind == "f":
        psi = CL.f_equivalent(p0, p1, K)
        res["psi"] = psi.to_str(["t"])
        res["note"] = "formal: decided through order %d" % (K - 1)
    elif kind == "a":
        phi, Psi = CL.a_equivalent(p0, p1, K)
        res["psi"] = [c.to_str(["u", "v"]) for c in Psi.components]
    elif kind == "q":
        q0, q1 = CL.q_normal_form(f0, g0, K), CL.q_normal_form(f1, g1, K)
        res["normal_forms"] = [q0.to_dict(), q1.to_dict()]
        if q0 != q1:
            raise _not_equivalent("the Q normal forms differ", q0, q1)
        phi = M.conjugate_quotient(f0, g0, f1, g1, K)
    else:
        phi = CU.cusp_equivalent(p0, p1, K)
        rep["residuals"] = _residuals({"f": (f0, f1), "g": (g0, g1)}, phi, K)
    if phi is not None:
        res["phi"] = _diffeo(phi)
        _emit(phi, args.emit_diffeo)
    rep["result"] = res


def _not_equivalent(msg, q0, q1):
    from .errors import NotEquivalent
    return NotEquivalent(msg, {"stage": "invariants", "first": q0.to_dict(),
                               "second": q1.to_dict()})


def cmd_conjugate(args, rep, K, mode):
    from . import moser as M
    f, g0, g1 = _at(_load_germs(args.files, 3, mode), K)
    phi = M.conjugate_by_path(f, g0, g1, K)
    rep["result"] = {"phi": _diffeo(phi)}
    rep["residuals"] = _residuals({"f": (f, f), "g": (g0, g1)}, phi, K)
    _emit(phi, args.emit_diffeo)


def cmd_verify(args, rep, K, mode):
    from . import moser as M
    f0, g0, f1, g1 = _load_germs(args.files, 4, mode)
    try:
        phi = io.load_diffeo(args.diffeo)
    except (OSError, io.GermFormatError, JetError) as e:
        raise InputError("%s: %s" % (args.diffeo, e)) from None
    phi = phi.to_float()
    pairs = [tuple(x.to_float() for x in p) for p in ((f0, g0), (f1, g1))]
    r = M.verify_numeric(pairs[0], pairs[1], phi, samples=args.samples, radius=args.radius,
                         seed=args.seed, quotient=args.quotient)
    rep["residuals"] = [r.to_dict()]
    rep["result"] = {"max_residual": r.max_residual, "flagged": r.flagged}
    if r.flagged:
        raise _Flagged(r)


class _Flagged(NegativeResult):
    def __init__(self, r):
        super().__init__("residual %.3g exceeds the truncation bound %.3g"
                         % (r.max_residual, r.bound), {"stage": "verify"})


def cmd_realize(args, rep, K, mode):
    from . import normal_forms as NF
    try:
        with open(args.files[0]) as fh:
            data = json.load(fh)
        curves = []
        for c in data["curves"]:
            u = io.parse_expr(c["u"], 1, K, mode, names=["t"])
            v = io.parse_expr(c["v"], 1, K, mode, names=["t"])
            curves.append(([C.parse_exact(str(x)) if mode == EXACT else complex(x)
                            for x in c["direction"]], u, v))
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InputError("bad curve data in %s: %s" % (args.files[0], e)) from None
    f, g = NF.separable_realize(curves, K)
    rep["result"] = {"f": _jet(f), "g": _jet(g)}
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(io.dumps_pair(f, g))


COMMANDS = {"normalize": cmd_normalize, "tangency": cmd_tangency,
            "invariants": cmd_invariants, "equiv": cmd_equiv, "conjugate": cmd_conjugate,
            "verify": cmd_verify, "realize": cmd_realize}


def build_parser():
    p = argparse.ArgumentParser(prog="morsejets", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", "-K", type=int, default=8, help="jet order (default 8)")
    common.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    common.add_argument("--tol", type=float, default=None, help="float-mode tolerance")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("normalize", parents=[common], help="normal forms of germs and pairs")
    s.add_argument("kind", choices=["morse", "diagonalize", "fold", "milnor2"])
    s.add_argument("files", nargs="+")
    s.add_argument("--emit-diffeo")

    s = sub.add_parser("tangency", parents=[common], help="tangency ideal and curves")
    s.add_argument("what", choices=["generators", "curves", "straighten"])
    s.add_argument("files", nargs="+")
    s.add_argument("--emit-diffeo")

    s = sub.add_parser("invariants", parents=[common], help="classification invariants")
    s.add_argument("kind", choices=["r", "f", "a", "q", "cone"])
    s.add_argument("files", nargs="+")

    s = sub.add_parser("equiv", parents=[common], help="decide equivalence of two pairs")
    s.add_argument("kind", choices=["r", "f", "a", "q", "cusp"])
    s.add_argument("files", nargs="+")
    s.add_argument("--emit-diffeo")

    s = sub.add_parser("conjugate", parents=[common],
                       help="path method: phi with f o phi = f, g0 o phi = g1")
    s.add_argument("files", nargs="+", help="f, g0, g1 (one file or several)")
    s.add_argument("--emit-diffeo")

    s = sub.add_parser("verify", parents=[common], help="numeric residuals of a diffeo")
    s.add_argument("files", nargs="+", help="the two pairs")
    s.add_argument("--diffeo", required=True)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--radius", type=float, default=1e-2)
    s.add_argument("--quotient", action="store_true", help="check g/f instead of (f, g)")

    s = sub.add_parser("realize", parents=[common],
                       help="separable pair from curve data (JSON)")
    s.add_argument("files", nargs=1)
    s.add_argument("--output", "-o")
    return p


def run(argv=None, out=None):
    """Run one command; returns (exit status, report dict)."""
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    K, mode = args.order, args.mode
    rep = Report(args.command, args.files, K, mode)
    status = EXIT_OK
    saved = C.get_tolerance()
    try:
        if K < 2:
            raise InputError("the order must be at least 2")
        if args.tol is not None:
            C.set_tolerance(args.tol)
        COMMANDS[args.command](args, rep, K, mode)
    except InputError as e:
        status = EXIT_INPUT
        rep["result"] = {"error": "InputError", "message": str(e)}
    except (NegativeResult, HypothesisFailed) as e:
        status = EXIT_NEGATIVE if isinstance(e, NegativeResult) else EXIT_HYPOTHESIS
        d = e.to_dict()
        rep["result"] = {"error": d["error"], "stage": d["stage"], "message": d["message"]}
        if isinstance(e, NegativeResult) and args.command == "equiv":
            rep["result"]["equivalent"] = False
        rep["witnesses"].append(d["witness"])
    except (JetError, ValueError) as e:
        status = EXIT_INPUT
        rep["result"] = {"error": type(e).__name__, "message": str(e)}
    finally:
        C.set_tolerance(saved)
    if args.json:
        out.write(json.dumps(rep.data, indent=2, default=str) + "\n")
    else:
        out.write(rep.text() + "\n")
    return status, rep.data


def main(argv=None):
    status, _ = run(argv)
    return status


if __name__ == "__main__":
    sys.exit(main())
