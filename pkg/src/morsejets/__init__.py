"""Jets of pairs of holomorphic function germs: normal forms, invariants and
explicit conjugating diffeomorphisms at finite order."""

from .coeff import EXACT, FLOAT, set_tolerance, get_tolerance
from .jet import Jet, DiffeoJet, CurveJet, JetError
from .io import parse_expr, load, loads, format_germ, parse_germ
from .errors import (MorseJetsError, NegativeResult, HypothesisFailed, NotEquivalent,
                     NotDiagonalizable, NotGeneric, NotQGeneric, NotMorse, NotInIdeal,
                     LiftFailure, NotAFold, NotExceptional, FieldExtensionRequired)
from .normal_forms import (morse_normalize, diagonalize_pair, genericity_class,
                           separable_realize, block_diagonalize_pencil)
from .tangency import tangency_generators, tangency_curves, straighten, radical_certificate
from .moser import (decompose_in_ideal, in_ideal, conjugate_by_path, conjugate_preserving,
                    conjugate_quotient, euler_defect, verify_numeric)
from .classify import (r_invariants, r_equivalent, involution, holonomy_composite,
                       f_invariant, f_equivalent, sigma_curves, a_equivalent, q_normal_form,
                       cone_restriction_form, fold_normalize)
from .cusps import (milnor2_normalize, cusp_form, exceptional_check, cusp_ideal_check,
                    cusp_straighten, cusp_normalize, cusp_equivalent, CuspPair)

__version__ = "0.1.0"
