"""Monadic datalog on labeled trees and words.

Evaluation with proof trees and canonical models, containment and
equivalence against unions of conjunctive queries, boundedness deciders
over words and ranked trees, and a brute-force oracle for cross-checking.
"""

from .syntax import Label, Program, Rule, parse_program, print_program, classify
from .structures import (
    TreeStructure,
    WordStructure,
    make_tree,
    parse_tree,
    parse_word,
    tree_to_sexpr,
    word_to_text,
    universal_tree,
)
from .evaluation import evaluate, extract_proof_tree, proof_tree_satisfiable

__all__ = [
    "Label",
    "Program",
    "Rule",
    "parse_program",
    "print_program",
    "classify",
    "TreeStructure",
    "WordStructure",
    "make_tree",
    "parse_tree",
    "parse_word",
    "tree_to_sexpr",
    "word_to_text",
    "universal_tree",
    "evaluate",
    "extract_proof_tree",
    "proof_tree_satisfiable",
]

__version__ = "0.1.0"
