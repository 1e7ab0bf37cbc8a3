"""Toolkit for intuitionistic layered graph logic: a labelled-tableau
prover with countermodel extraction, model checkers for the graph,
relational, algebraic, and predicate semantics, and cross-validation
suites tying them together."""

from .formula import Formula, ParseError, parse, render, subformulas
from .graph import (LayeredGraphModel, load_model, satisfies,
                    valid_in_model, validate_model)
from .relational import rel_satisfies, rel_valid_upto
from .tableaux import Limits, prove

__all__ = [
    "Formula", "ParseError", "parse", "render", "subformulas",
    "LayeredGraphModel", "load_model", "satisfies", "valid_in_model",
    "validate_model", "rel_satisfies", "rel_valid_upto", "Limits", "prove",
]
__version__ = "0.1.0"
