"""Beta/eta normal forms.

``flat_nf`` is the beta-normal eta-short form (the flat form of a multistep);
``long_nf`` is the beta-normal eta-long form used as canonical representative
of terms modulo beta-eta; ``etalong_nf`` performs restricted eta-expansion
without beta.
"""

from __future__ import annotations

from .errors import NotBetaNormal, TypeMismatch
from .terms import (
    App,
    Bound,
    Lam,
    Seq,
    Term,
    Var,
    instantiate,
    mk_app,
    occurs_bound,
    shift,
    spine,
)
from .typecheck import Env, Signature, infer
from .typesys import Arrow, Type, uncurry


def beta_nf(t: Term) -> Term:
    """Beta-normal form. Rule symbols and constants are inert heads."""
    if isinstance(t, App):
        f = beta_nf(t.fun)
        a = beta_nf(t.arg)
        if isinstance(f, Lam):
            return beta_nf(instantiate(f.body, a))
        return App(f, a)
    if isinstance(t, Lam):
        return Lam(t.ty, beta_nf(t.body), t.hint)
    if isinstance(t, Seq):
        return Seq(beta_nf(t.first), beta_nf(t.second))
    return t


def eta_short(t: Term) -> Term:
    """Bottom-up eta-reduction; on beta-normal input gives the beta-eta-nf."""
    if isinstance(t, Lam):
        body = eta_short(t.body)
        if (
            isinstance(body, App)
            and body.arg == Bound(0)
            and not occurs_bound(body.fun, 0)
        ):
            return shift(body.fun, -1)
        return Lam(t.ty, body, t.hint)
    if isinstance(t, App):
        return App(eta_short(t.fun), eta_short(t.arg))
    if isinstance(t, Seq):
        return Seq(eta_short(t.first), eta_short(t.second))
    return t


def flat_nf(t: Term) -> Term:
    """Beta-normal, eta-short form."""
    return eta_short(beta_nf(t))


def beq(s: Term, t: Term) -> bool:
    """Decide ``s =βη t`` by comparing normal forms."""
    return s == t or flat_nf(s) == flat_nf(t)


def _expand_nf(t: Term, sig: Signature, env: Env) -> Term:
    # t is beta-normal and Seq-free
    if isinstance(t, Lam):
        return Lam(t.ty, _expand_nf(t.body, sig, (t.ty,) + env), t.hint)
    head, args = spine(t)
    if isinstance(head, (Lam, App, Seq)):
        raise NotBetaNormal("expected a beta-normal multistep")
    ty = sig.atom_type(head, env)
    new_args = []
    for a in args:
        if not isinstance(ty, Arrow):
            raise TypeMismatch("too many arguments")
        new_args.append(_expand_nf(a, sig, env))
        ty = ty.cod
    if not isinstance(ty, Arrow):
        return mk_app(head, new_args)
    doms, _ = uncurry(ty)
    n = len(doms)
    inner = tuple(reversed(doms)) + env
    extra = [_expand_nf(Bound(n - 1 - i), sig, inner) for i in range(n)]
    body = mk_app(shift(head, n), [shift(a, n) for a in new_args] + extra)
    for d in reversed(doms):
        body = Lam(d, body, "x")
    return body


def long_nf(t: Term, sig: Signature, env: Env = ()) -> Term:
    """Beta-normal eta-long form of a term or multistep."""
    return _expand_nf(beta_nf(t), sig, env)


def beta_eta_nf(t: Term, sig: Signature, ctx: dict[str, Type] | None = None) -> Term:
    infer(t, sig.with_vars(ctx))
    return long_nf(t, sig.with_vars(ctx))


def _eta_bar(t: Term, sig: Signature, env: Env, fpos: bool) -> tuple[Term, Type]:
    if isinstance(t, Lam):
        body, bty = _eta_bar(t.body, sig, (t.ty,) + env, False)
        return Lam(t.ty, body, t.hint), Arrow(t.ty, bty)
    if isinstance(t, App):
        f, fty = _eta_bar(t.fun, sig, env, True)
        a, _ = _eta_bar(t.arg, sig, env, False)
        if not isinstance(fty, Arrow):
            raise TypeMismatch("application of non-function")
        r, ty = App(f, a), fty.cod
    elif isinstance(t, Seq):
        a, ty = _eta_bar(t.first, sig, env, fpos)
        b, _ = _eta_bar(t.second, sig, env, fpos)
        return Seq(a, b), ty
    else:
        r, ty = t, sig.atom_type(t, env)
    if fpos or not isinstance(ty, Arrow):
        return r, ty
    doms, _ = uncurry(ty)
    n = len(doms)
    inner = tuple(reversed(doms)) + env
    extra = [_eta_bar(Bound(n - 1 - i), sig, inner, False)[0] for i in range(n)]
    body = mk_app(shift(r, n), extra)
    for d in reversed(doms):
        body = Lam(d, body, "x")
    return body, ty


def etalong_nf(t: Term, sig: Signature, env: Env = ()) -> Term:
    """Normal form of restricted eta-expansion (no beta steps).

    A subterm is expanded when it has arrow type, is neither an abstraction
    nor a composition, and does not occur in function position (function
    position is inherited by both sides of a composition).
    """
    return _eta_bar(t, sig, env, False)[0]


def is_beta_normal(t: Term) -> bool:
    if isinstance(t, App):
        return not isinstance(t.fun, Lam) and is_beta_normal(t.fun) and is_beta_normal(t.arg)
    if isinstance(t, Lam):
        return is_beta_normal(t.body)
    if isinstance(t, Seq):
        return is_beta_normal(t.first) and is_beta_normal(t.second)
    return True


def is_pattern(t: Term, metavars: set[str] | frozenset[str]) -> bool:
    """Every free metavariable occurrence is applied to distinct bound variables."""
    if not is_beta_normal(t):
        raise NotBetaNormal("is_pattern expects a beta-normal term")

    def ok(node: Term, depth: int) -> bool:
        if isinstance(node, Lam):
            return ok(node.body, depth + 1)
        head, args = spine(node)
        if isinstance(head, Var) and head.name in metavars:
            seen = set()
            for a in args:
                a = eta_short(a)
                if not isinstance(a, Bound) or a.index >= depth or a.index in seen:
                    return False
                seen.add(a.index)
            return True
        return all(ok(a, depth) for a in args)

    return ok(t, 0)
