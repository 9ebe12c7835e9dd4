"""Weakest-precondition front end for SMT-LIB.

Scripts may use (wp p Q), (box p Q), (dia p Q) over abstract WHILE programs,
(old t) inside contracts, and (assert-counterexample pre p post).  The
package parses these, eliminates them by symbolic execution of the
predicate-transformer rules, and prints plain first-order SMT-LIB, optionally
driving a backend solver.
"""
from .errors import (ElabError, OracleError, ParseError, ToolError, UsageError,
                     VcError)
from .sexpr import Atom, SList, parse_sexprs, print_script, print_sexpr
from .surface import Script, SymbolTable, parse_script, script_to_text
from .vcgen import (find_extension_heads, lower_assert_counterexample,
                    lower_term, process_script, reduce)

__version__ = "0.1.0"

__all__ = [
    "Atom", "SList", "parse_sexprs", "print_script", "print_sexpr",
    "Script", "SymbolTable", "parse_script", "script_to_text",
    "process_script", "reduce", "lower_term", "lower_assert_counterexample",
    "find_extension_heads",
    "ToolError", "ParseError", "ElabError", "VcError", "OracleError",
    "UsageError",
    "__version__",
]
