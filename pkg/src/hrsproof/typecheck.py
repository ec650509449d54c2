"""Signatures and the typing rules for terms and rewrites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    TypeMismatch,
    UnboundVariable,
    UnknownConstant,
    UnknownRuleSymbol,
)
from .terms import App, Bound, Con, Lam, Rule, Seq, Term, Var
from .typesys import Arrow, Type

Env = tuple[Type, ...]


@dataclass(frozen=True)
class Signature:
    """Types of constants, rule symbols and declared free variables."""

    consts: Mapping[str, Type] = field(default_factory=dict)
    rules: Mapping[str, Type] = field(default_factory=dict)
    vars: Mapping[str, Type] = field(default_factory=dict)

    def with_vars(self, ctx: Mapping[str, Type] | None) -> "Signature":
        if not ctx:
            return self
        merged = dict(self.vars)
        merged.update(ctx)
        return Signature(self.consts, self.rules, merged)

    def atom_type(self, node: Term, env: Env = ()) -> Type:
        if isinstance(node, Bound):
            if node.index >= len(env):
                raise UnboundVariable(f"loose bound index {node.index}")
            return env[node.index]
        if isinstance(node, Var):
            try:
                return self.vars[node.name]
            except KeyError:
                raise UnboundVariable(node.name) from None
        if isinstance(node, Con):
            try:
                return self.consts[node.name]
            except KeyError:
                raise UnknownConstant(node.name) from None
        if isinstance(node, Rule):
            try:
                return self.rules[node.name]
            except KeyError:
                raise UnknownRuleSymbol(node.name) from None
        raise TypeError(f"not an atom: {node!r}")


def infer(t: Term, sig: Signature, env: Env = ()) -> Type:
    """Type of a term or rewrite. ``Seq`` only checks that both sides agree."""
    if isinstance(t, Lam):
        return Arrow(t.ty, infer(t.body, sig, (t.ty,) + env))
    if isinstance(t, App):
        fty = infer(t.fun, sig, env)
        aty = infer(t.arg, sig, env)
        if not isinstance(fty, Arrow):
            raise TypeMismatch(f"application of non-function of type {fty}")
        if fty.dom != aty:
            raise TypeMismatch(f"argument of type {aty} where {fty.dom} expected")
        return fty.cod
    if isinstance(t, Seq):
        a = infer(t.first, sig, env)
        b = infer(t.second, sig, env)
        if a != b:
            raise TypeMismatch(f"composition of types {a} and {b}")
        return a
    return sig.atom_type(t, env)


def type_of(ctx: Mapping[str, Type], t: Term, sig: Signature) -> Type:
    """Type of ``t`` under the variable context ``ctx``."""
    return infer(t, sig.with_vars(ctx))
