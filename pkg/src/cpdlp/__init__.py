"""Parsing, model checking, translations and pebble games for conjunctive PDL."""

from . import ast
from .errors import CpdlpError
from .evaluator import eval_conj, eval_expr, eval_formula, eval_program, eval_untc
from .measures import classify_dialect, measures, reverse, subexpressions, underlying_graphs
from .structures import Structure, UGraph, load, save
from .syntax import parse, parse_formula, parse_program, parse_untc, to_text

__version__ = "0.1.0"
