"""Regular O-trees and O-forests: terms, values, structurings and description schemes."""
from .arrangement import Arrangement, RegularArrangement, arrangement_of, bounded_window
from .mso import RelStructure, encode_S, encode_term, eval_mso, parse_formula
from .oforest import OForest, OForestError, validate_oforest
from .schemes import (
    DescriptionScheme, GoodLabelling, SchemeError, describes, extract_scheme, extract_scheme_regular,
    find_labelling, scheme_equiv, unfold_scheme,
)
from .structuring import (
    SOAForest, StructCut, StructuringError, TailMark, build_structuring, cuts, u_plus,
    validate_structuring,
)
from .terms import (
    OMEGA, SOA_SIGNATURE, EquationSystem, Term, TermError, parse_system, parse_term, print_system,
    print_term, truncate,
)
from .values import approx_val, soa_iso, term_of, val_algebraic, val_direct

__version__ = "0.1.0"
