from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from .errors import RelbnError, SpecSyntaxError
from .model import (FALSE, TRUE, And, Assessment, Atom, Definition, Eq, Exists, ForAll, GroundAtom,
                    Iff, Implies, Not, Or, Query, RelationalSpec, Relation, Var)

logger = logging.getLogger(__name__)

_COMMON = r"""
IDENT: /[A-Za-z_][A-Za-z0-9_]*\??/
INT: /[0-9]+/
DECIMAL.2: /[0-9]+\.[0-9]+/
COMMENT: /#[^\n]*/

rational: INT ("/" INT)?
        | DECIMAL

%import common.WS
%ignore WS
%ignore COMMENT
"""

# Precedence, tightest first: ! & | -> <->. Quantifier bodies extend as far
# right as possible: LALR resolves the resulting shift/reduce choices by
# shifting.
SPEC_GRAMMAR = r"""
start: statement*

?statement: decl | assess | define
decl: "relation" IDENT "/" INT "."
assess: "prob" atom "=" rational "."
define: "def" atom ":=" formula "."

?formula: iff
?iff: imp ("<->" imp)*
?imp: or_ ("->" imp)?
?or_: and_ ("|" and_)*
?and_: unary ("&" unary)*
?unary: "!" unary -> negation
      | "forall" IDENT ":" formula -> forall
      | "exists" IDENT ":" formula -> exists
      | "(" formula ")"
      | atom
      | term "=" term -> equality
      | "true" -> true
      | "false" -> false

atom: IDENT "(" arguments? ")"
arguments: term ("," term)*
term: IDENT -> var
    | INT -> individual
""" + _COMMON

QUERY_GRAMMAR = r"""
start: section ("|" section)? gamma?
section: (literal ("," literal)*)?
gamma: ";" "gamma" "=" rational
literal: qatom "=" INT
qatom: IDENT ("(" (INT ("," INT)*)? ")")?
""" + _COMMON

PLATE_GRAMMAR = r"""
start: pvar*
pvar: "var" IDENT "(" names? ")" parents? "=" rational+ "."
parents: "|" IDENT ("," IDENT)*
names: IDENT ("," IDENT)*
""" + _COMMON

PRM_GRAMMAR = r"""
start: item*
?item: class_decl | assoc_decl | attr_decl
class_decl: "class" IDENT "."
assoc_decl: "assoc" IDENT "(" IDENT "," IDENT ")" "."
attr_decl: "attr" IDENT "(" IDENT ")" prm_parents? "=" rational+ "."
prm_parents: "|" prm_parent ("," prm_parent)*
prm_parent: IDENT ("via" IDENT)?
""" + _COMMON

SKELETON_GRAMMAR = r"""
start: fact*
fact: IDENT "(" INT ("," INT)* ")" "."
""" + _COMMON


@lru_cache(maxsize=None)
def _lark(grammar: str) -> Lark:
    return Lark(grammar, parser="lalr", start="start")


def _position_of_end(text: str) -> Tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def _describe_expected(parser: Lark, names) -> List[str]:
    described = []
    for name in names or ():
        try:
            pattern = parser.get_terminal(name).pattern
        except KeyError:
            described.append(name)
            continue
        described.append(f'"{pattern.value}"' if pattern.type == "str" else name)
    return described


def _run(grammar: str, transformer: Transformer, text: str):
    parser = _lark(grammar)
    try:
        tree = parser.parse(text)
    except UnexpectedInput as e:
        expected = getattr(e, "expected", None) or getattr(e, "allowed", None)
        line, column = getattr(e, "line", -1), getattr(e, "column", -1)
        at_end = getattr(getattr(e, "token", None), "type", None) == "$END"
        if isinstance(e, UnexpectedEOF) or at_end or line is None or line < 1:
            line, column = _position_of_end(text)
            message = "unexpected end of input"
        else:
            token = getattr(e, "token", None)
            shown = token if token is not None else text[e.pos_in_stream:e.pos_in_stream + 1]
            message = f"unexpected {str(shown)!r}"
        raise SpecSyntaxError(message, line, column, _describe_expected(parser, expected))
    try:
        return transformer.transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, RelbnError):
            raise e.orig_exc
        raise
    except RecursionError:
        raise SpecSyntaxError("formula nested too deeply", 1, 1)


def _token_error(token: Token, message: str) -> SpecSyntaxError:
    return SpecSyntaxError(message, token.line, token.column)


class _Common(Transformer):

    def rational(self, children):
        if len(children) == 2:
            numerator, denominator = children
            if int(denominator) == 0:
                raise _token_error(denominator, "zero denominator")
            return Fraction(int(numerator), int(denominator))
        return Fraction(str(children[0]))


class SpecTransformer(_Common):

    def start(self, statements):
        declared = [s for s in statements if isinstance(s, Relation)]
        entries = tuple(s for s in statements if not isinstance(s, Relation))
        relations = set(declared)
        named = {r.name for r in declared}
        for entry in entries:
            if entry.relation not in named:
                relations.add(Relation(entry.relation, len(entry.logvars)))
                named.add(entry.relation)
        return RelationalSpec(frozenset(relations), entries)

    def decl(self, children):
        name, arity = children
        return Relation(str(name), int(arity))

    def assess(self, children):
        head, probability = children
        return Assessment(head.relation, head.args, probability)

    def define(self, children):
        head, body = children
        return Definition(head.relation, head.args, body)

    def iff(self, children):
        result = children[0]
        for right in children[1:]:
            result = Iff(result, right)
        return result

    def imp(self, children):
        return Implies(children[0], children[1])

    def or_(self, children):
        return Or(tuple(children))

    def and_(self, children):
        return And(tuple(children))

    def negation(self, children):
        return Not(children[0])

    def forall(self, children):
        return ForAll(Var(str(children[0])), children[1])

    def exists(self, children):
        return Exists(Var(str(children[0])), children[1])

    def equality(self, children):
        return Eq(children[0], children[1])

    def true(self, _):
        return TRUE

    def false(self, _):
        return FALSE

    def atom(self, children):
        args = tuple(children[1]) if len(children) > 1 else ()
        return Atom(str(children[0]), args)

    def arguments(self, children):
        return list(children)

    def var(self, children):
        return Var(str(children[0]))

    def individual(self, children):
        token = children[0]
        if int(token) < 1:
            raise _token_error(token, "individuals are numbered from 1")
        return int(token)


class QueryTransformer(_Common):

    def start(self, children):
        sections = [c for c in children if isinstance(c, list)]
        gamma = next((c for c in children if isinstance(c, Fraction)), None)
        query = sections[0] if sections else []
        evidence = sections[1] if len(sections) > 1 else []
        return Query.build(query, evidence, gamma)

    def section(self, literals):
        return list(literals)

    def gamma(self, children):
        return children[0]

    def literal(self, children):
        atom, value = children
        if str(value) not in ("0", "1"):
            raise _token_error(value, f"assignment must be 0 or 1, got {value}")
        return (atom, str(value) == "1")

    def qatom(self, children):
        args = []
        for token in children[1:]:
            if int(token) < 1:
                raise _token_error(token, "individuals are numbered from 1")
            args.append(int(token))
        return GroundAtom(str(children[0]), tuple(args))


def parse_spec(text: str) -> RelationalSpec:
    """Parse `.rbn` text; semantic checks are left to validate_spec."""
    spec = _run(SPEC_GRAMMAR, SpecTransformer(), text)
    logger.debug("parsed %d relation(s), %d entr(ies)", len(spec.relations), len(spec.entries))
    return spec


def parse_query(text: str) -> Query:
    """Parse `.rbq` text: `Q literals | E literals ; gamma=p/q`."""
    return _run(QUERY_GRAMMAR, QueryTransformer(), text)


def parse_formula(text: str):
    """Parse a single body formula (used for tests and the cli)."""
    spec = parse_spec(f"def __formula__() := {text}.")
    return spec.entries[0].body


def parse_with(grammar: str, transformer: Transformer, text: str):
    return _run(grammar, transformer, text)
