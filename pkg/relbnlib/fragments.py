# fragments.py
"""
Fragment classification of relational specifications.

Labels are tried in this order and the first one that admits every
definition wins:

    PropAnd < PropOr < PropAndNot < DLLiteNF < DLLiteNFWithPrimitiveNegation
    < EL < ALC < QF < FFFOk < FFFO

Prop labels need every relation to be a proposition. DL labels need unary
defined relations and binary relations that are all assessed (roles). FFFOk
counts distinct logvar symbols per axiom (head plus body) and reports the
maximum; above the configured bound the label is plain FFFO.
"""
from __future__ import annotations

import logging
from typing import Callable, Optional

from .config import InferenceConfig, resolve
from .model import (And, Atom, Constant, Exists, ForAll, Formula, FragmentKind, FragmentLabel,
                    Implies, Not, Or, RelationalSpec, Var, has_quantifier, logvar_symbols)

logger = logging.getLogger(__name__)


def _built_from(f: Formula, allowed: tuple) -> bool:
    if isinstance(f, Atom):
        return True
    if not isinstance(f, allowed):
        return False
    parts = f.parts if isinstance(f, (And, Or)) else (f.body, )
    return all(_built_from(p, allowed) for p in parts)


class _DlShape:
    """Recursive concept checks against the spec's roles and primitives."""

    def __init__(self, spec: RelationalSpec):
        self.spec = spec

    def unary(self, f: Formula, v: Var) -> bool:
        return isinstance(f, Atom) and f.args == (v, ) and self.spec.arity(f.relation) == 1

    def primitive(self, f: Formula, v: Var) -> bool:
        return self.unary(f, v) and self.spec.is_assessed(f.relation)

    def role(self, f: Formula, a, b) -> bool:
        return (isinstance(f, Atom) and f.args == (a, b) and self.spec.arity(f.relation) == 2
                and self.spec.is_assessed(f.relation))

    def dllite(self, f: Formula, v: Var, negation: bool) -> bool:
        if isinstance(f, And):
            return all(self.dllite(p, v, negation) for p in f.parts)
        if isinstance(f, Exists):
            return f.var != v and (self.role(f.body, v, f.var) or self.role(f.body, f.var, v))
        if isinstance(f, Not):
            return negation and self.primitive(f.body, v)
        return self.unary(f, v)

    def _qualified(self, body: Formula, v: Var, y: Var, concept: Callable) -> bool:
        """r(v,y) alone, or a conjunction holding r(v,y) once plus concepts over y."""
        if self.role(body, v, y):
            return True
        if not isinstance(body, And):
            return False
        roles = [p for p in body.parts if self.role(p, v, y)]
        rest = [p for p in body.parts if not self.role(p, v, y)]
        return len(roles) == 1 and all(concept(p, y) for p in rest)

    def el(self, f: Formula, v: Var) -> bool:
        if f == Constant(True):
            return True
        if isinstance(f, And):
            return all(self.el(p, v) for p in f.parts)
        if isinstance(f, Exists):
            return f.var != v and self._qualified(f.body, v, f.var, self.el)
        return self.unary(f, v)

    def alc(self, f: Formula, v: Var) -> bool:
        if isinstance(f, Constant):
            return True
        if isinstance(f, (And, Or)):
            return all(self.alc(p, v) for p in f.parts)
        if isinstance(f, Not):
            return self.alc(f.body, v)
        if isinstance(f, Exists):
            return f.var != v and self._qualified(f.body, v, f.var, self.alc)
        if isinstance(f, ForAll):
            body = f.body
            return (f.var != v and isinstance(body, Implies) and self.role(body.left, v, f.var)
                    and self.alc(body.right, f.var))
        return self.unary(f, v)


def _dl_vocabulary(spec: RelationalSpec) -> bool:
    for r in spec.relations:
        if r.arity not in (1, 2):
            return False
        if r.arity == 2 and not spec.is_assessed(r.name):
            return False
    return True


def max_logvars(spec: RelationalSpec) -> int:
    best = 0
    for d in spec.definitions():
        best = max(best, len(set(d.logvars) | logvar_symbols(d.body)))
    for a in spec.assessments():
        best = max(best, len(set(a.logvars)))
    return best


def classify_fragment(spec: RelationalSpec,
                      config: Optional[InferenceConfig] = None) -> FragmentLabel:
    """Most specific label admitting every definition of a valid spec."""
    config = resolve(config)
    definitions = spec.definitions()
    bodies = [d.body for d in definitions]

    if all(r.arity == 0 for r in spec.relations):
        for kind, allowed in ((FragmentKind.PROP_AND, (And, )), (FragmentKind.PROP_OR, (Or, )),
                              (FragmentKind.PROP_AND_NOT, (And, Not))):
            if all(_built_from(b, allowed) for b in bodies):
                return FragmentLabel(kind)

    if _dl_vocabulary(spec) and all(len(d.logvars) == 1 for d in definitions):
        shape = _DlShape(spec)
        checks = [
            (FragmentKind.DLLITE_NF, lambda d: shape.dllite(d.body, d.logvars[0], False)),
            (FragmentKind.DLLITE_NF_NEG, lambda d: shape.dllite(d.body, d.logvars[0], True)),
            (FragmentKind.EL, lambda d: shape.el(d.body, d.logvars[0])),
            (FragmentKind.ALC, lambda d: shape.alc(d.body, d.logvars[0])),
        ]
        for kind, check in checks:
            if all(check(d) for d in definitions):
                return FragmentLabel(kind)

    if not any(has_quantifier(b) for b in bodies):
        return FragmentLabel(FragmentKind.QF)

    k = max_logvars(spec)
    if k <= config.fffo_bound:
        return FragmentLabel(FragmentKind.FFFO_K, k)
    logger.debug("spec uses %d logvars in one axiom, above bound %d", k, config.fffo_bound)
    return FragmentLabel(FragmentKind.FFFO)
