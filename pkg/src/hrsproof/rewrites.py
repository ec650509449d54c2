"""Rewrites (proof terms): endpoints, type checking and substitutions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import NonComposable, UnknownRuleSymbol
from .hrs import Hrs
from .normalize import beq
from .terms import App, Lam, Rule, Seq, Term, is_term, show, subst_var
from .typecheck import Env, infer
from .typesys import Type


def _endpoint(rw: Term, hrs: Hrs, source: bool) -> Term:
    if isinstance(rw, Rule):
        rule = hrs.rules.get(rw.name)
        if rule is None:
            raise UnknownRuleSymbol(rw.name)
        return rule.closed_src if source else rule.closed_tgt
    if isinstance(rw, Lam):
        return Lam(rw.ty, _endpoint(rw.body, hrs, source), rw.hint)
    if isinstance(rw, App):
        return App(_endpoint(rw.fun, hrs, source), _endpoint(rw.arg, hrs, source))
    if isinstance(rw, Seq):
        return _endpoint(rw.first if source else rw.second, hrs, source)
    return rw


def rsrc(rw: Term, hrs: Hrs) -> Term:
    """Syntactic source: rule symbols become their closed left-hand sides."""
    return _endpoint(rw, hrs, True)


def rtgt(rw: Term, hrs: Hrs) -> Term:
    """Syntactic target; a composition takes the target of its second part."""
    return _endpoint(rw, hrs, False)


def refl(t: Term) -> Term:
    """The unit rewrite on ``t`` is ``t`` itself."""
    if not is_term(t):
        raise ValueError("refl expects a term")
    return t


@dataclass(frozen=True)
class RewriteJudgment:
    ctx: Mapping[str, Type]
    rw: Term
    src: Term
    tgt: Term
    ty: Type

    def __str__(self) -> str:
        return f"{show(self.rw)} : {show(self.src)} -> {show(self.tgt)} : {self.ty}"


def _check_seqs(rw: Term, hrs: Hrs, env: Env) -> None:
    if isinstance(rw, Lam):
        _check_seqs(rw.body, hrs, (rw.ty,) + env)
    elif isinstance(rw, App):
        _check_seqs(rw.fun, hrs, env)
        _check_seqs(rw.arg, hrs, env)
    elif isinstance(rw, Seq):
        _check_seqs(rw.first, hrs, env)
        _check_seqs(rw.second, hrs, env)
        left, right = rtgt(rw.first, hrs), rsrc(rw.second, hrs)
        if not beq(left, right):
            raise NonComposable(
                f"target {show(left)} of {show(rw.first)} differs from "
                f"source {show(right)} of {show(rw.second)}"
            )


def check_rewrite(
    ctx: Mapping[str, Type] | None, rw: Term, hrs: Hrs
) -> RewriteJudgment:
    """Type-check ``rw`` and return its judgment with syntactic endpoints."""
    ctx = dict(ctx or {})
    ty = infer(rw, hrs.sig.with_vars(ctx))
    _check_seqs(rw, hrs, ())
    return RewriteJudgment(ctx, rw, rsrc(rw, hrs), rtgt(rw, hrs), ty)


def subt(rw: Term, x: str, s: Term) -> Term:
    """Rewrite/term substitution ``rw{x:=s}``."""
    return subst_var(rw, x, s)


def subtr(s: Term, x: str, rw: Term) -> Term:
    """Term/rewrite substitution ``s<x:=rw>``: every occurrence of ``x`` performs ``rw``."""
    if not is_term(s):
        raise ValueError("subtr expects a term on the left")
    return subst_var(s, x, rw)


def subrr(rw: Term, x: str, sub: Term, hrs: Hrs) -> Term:
    """Rewrite/rewrite substitution ``rw{{x:=sub}} = rw{x:=src sub} ; tgt(rw)<x:=sub>``."""
    return Seq(subt(rw, x, rsrc(sub, hrs)), subtr(rtgt(rw, hrs), x, sub))
