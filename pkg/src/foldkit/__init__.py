"""Stallings graphs, reducible two-complexes and immersion scans for free and one-relator groups."""
from types import ModuleType as _ModuleType

from .complexes import (
    TwoComplex,
    find_staggering,
    has_proper_powers,
    is_bireducible,
    is_collapsible,
    is_reducible,
    parse_complex,
    presentation_complex,
    reduce,
)
from .errors import (
    AlphabetError,
    BudgetExceeded,
    ConfigError,
    DegenerateInputError,
    FoldkitError,
    NotApplicable,
    ParseError,
    PreconditionError,
)
from .graphs import GraphMorphism, SerreGraph, canonical_form, core, fold, pullback, rose
from .homology import homology, smith_normal_form
from .immersions import (
    bireducible_pullback_check,
    enumerate_graph_immersions,
    npi_scan,
    ntpi_scan,
    pullback_cycles,
    wnpi_scan,
)
from .kernels import BACKEND
from .presentations import (
    Presentation,
    coxeter_coherence_predicate,
    hierarchy,
    moldavanskii_step,
    normal_closure_membership,
    parse_presentation,
)
from .results import Answer, Check, Outcome
from .subgroups import StallingsAutomaton, double_coset_sum, hn_verdict, intersect, shnc_check
from .words import Alphabet, Word, cyclic_reduce, format_word, parse_word

__version__ = "0.1.0"

__all__ = sorted(
    name for name, value in globals().items() if not name.startswith("_") and not isinstance(value, _ModuleType)
)
