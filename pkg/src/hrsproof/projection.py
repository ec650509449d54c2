"""Projection (residuals) of multisteps and rewrites, and deciding permutation equivalence."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import MatchFailure, NotCoinitial, NotCompatible
from .flattening import FlatRewrite, flatten, fsrc
from .hrs import Hrs, RewriteRule, match_rule
from .normalize import flat_nf, long_nf
from .rewrites import check_rewrite
from .terms import Lam, Rule, Term, has_rules, mk_app, show, spine


def _src_table(hrs: Hrs) -> dict[Term, RewriteRule]:
    return {r.closed_src: r for r in hrs.rules.values()}


def _head_kind(head: Term, nargs: int, srcs: dict[Term, RewriteRule]) -> tuple[str, object]:
    if isinstance(head, Rule):
        return "rule", head.name
    rule = srcs.get(head)
    if rule is not None and nargs <= len(rule.metavars):
        return "src", rule.name
    if isinstance(head, Lam):
        return "lam", head
    return "atom", head


def compatible(mu: Term, nu: Term, hrs: Hrs) -> bool:
    """Is ``mu`` aligned with ``nu`` (equal heads, or a rule facing its own source)?"""
    try:
        weak_project(mu, nu, hrs)
    except NotCompatible:
        return False
    return True


def weak_project(mu: Term, nu: Term, hrs: Hrs) -> Term:
    """The multistep ``xi`` with ``mu / nu => xi`` for a compatible pair."""
    srcs = _src_table(hrs)

    def go(m: Term, n: Term) -> Term:
        if isinstance(m, Lam) and isinstance(n, Lam):
            if m.ty != n.ty:
                raise NotCompatible("binder types differ")
            return Lam(m.ty, go(m.body, n.body), m.hint)
        hm, am = spine(m)
        hn, an = spine(n)
        if len(am) != len(an):
            raise NotCompatible(f"{show(m)} and {show(n)} have different arities")
        km, kn = _head_kind(hm, len(am), srcs), _head_kind(hn, len(an), srcs)
        args = [go(a, b) for a, b in zip(am, an)]
        if km[0] == "atom" and km == kn:
            head = hm
        elif km[0] in ("rule", "src") and kn[0] in ("rule", "src") and km[1] == kn[1]:
            rule = hrs.rules[km[1]]  # type: ignore[index]
            if km[0] == "rule" and kn[0] == "src":
                head = hm
            elif kn[0] == "rule":
                head = rule.closed_tgt
            else:
                head = rule.closed_src
        else:
            raise NotCompatible(f"{show(m)} does not line up with {show(n)}")
        return mk_app(head, args)

    return go(mu, nu)


def _require_coinitial(mu: Term, nu: Term, hrs: Hrs) -> None:
    a, b = fsrc(mu, hrs), fsrc(nu, hrs)
    if a != b:
        raise NotCoinitial(f"sources {show(a)} and {show(b)} differ")


def compatibilize(mu: Term, nu: Term, hrs: Hrs, reverse: bool = False) -> tuple[Term, Term]:
    """Align two coinitial multisteps so that every rule faces its own source.

    Both sides are brought to beta-normal eta-long form; wherever a rule
    symbol meets a non-rule head, the other side is matched against the
    left-hand side and rewritten as the closed source applied to the matched
    arguments. ``reverse`` processes arguments right to left.
    """
    _require_coinitial(mu, nu, hrs)
    sig = hrs.sig

    def expose(rule: RewriteRule, t: Term) -> tuple[Term, list[Term]]:
        theta = match_rule(rule, t)
        if theta is None:
            raise MatchFailure(f"{show(t)} is not an instance of {rule.name}")
        return rule.closed_src, [theta[mv] for mv, _ in rule.metavars]

    def go(m: Term, n: Term) -> tuple[Term, Term]:
        if isinstance(m, Lam) and isinstance(n, Lam):
            a, b = go(m.body, n.body)
            return Lam(m.ty, a, m.hint), Lam(n.ty, b, n.hint)
        hm, am = spine(m)
        hn, an = spine(n)
        if isinstance(hm, Rule) and isinstance(hn, Rule):
            if hm != hn:
                raise MatchFailure(f"rules {hm.name} and {hn.name} overlap")
        elif isinstance(hm, Rule):
            hn, an = expose(hrs.rules[hm.name], n)
        elif isinstance(hn, Rule):
            hm, am = expose(hrs.rules[hn.name], m)
        elif hm != hn or len(am) != len(an):
            raise MatchFailure(f"{show(m)} and {show(n)} have different sources")
        if len(am) != len(an):
            raise MatchFailure("arity mismatch")
        idx = range(len(am))
        pairs: dict[int, tuple[Term, Term]] = {}
        for i in reversed(idx) if reverse else idx:
            pairs[i] = go(am[i], an[i])
        return mk_app(hm, [pairs[i][0] for i in idx]), mk_app(hn, [pairs[i][1] for i in idx])

    return go(long_nf(mu, sig), long_nf(nu, sig))


def project_ms(mu: Term, nu: Term, hrs: Hrs, reverse: bool = False) -> Term:
    """``mu / nu``: the flat multistep left of ``mu`` after ``nu``."""
    m, n = compatibilize(mu, nu, hrs, reverse)
    return flat_nf(weak_project(m, n, hrs))


def project_flat(rho: Sequence[Term], sigma: Sequence[Term], hrs: Hrs) -> FlatRewrite:
    """Projection of a flat rewrite over a coinitial flat rewrite."""
    if not rho or not sigma:
        raise ValueError("flat rewrites are non-empty")
    _require_coinitial(rho[0], sigma[0], hrs)
    cur = tuple(rho)
    for nu in sigma:
        out = []
        for mu in cur:
            out.append(project_ms(mu, nu, hrs))
            nu = project_ms(nu, mu, hrs)
        cur = tuple(out)
    return cur


def project(rho: Term, sigma: Term, hrs: Hrs) -> FlatRewrite:
    """``rho // sigma`` for arbitrary rewrites."""
    return project_flat(flatten(rho, hrs), flatten(sigma, hrs), hrs)


@dataclass(frozen=True)
class Witness:
    direction: str  # "left//right" or "right//left"
    index: int
    step: Term

    def __str__(self) -> str:
        return f"{self.direction}[{self.index}] = {show(self.step)}"


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    witnesses: tuple[Witness, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.equivalent


def _witnesses(flat: FlatRewrite, direction: str) -> list[Witness]:
    return [Witness(direction, i, m) for i, m in enumerate(flat) if has_rules(m)]


def decide_permeq(rho: Term, sigma: Term, hrs: Hrs, ctx=None) -> Verdict:
    """Permutation equivalence: both projections consist of empty multisteps."""
    check_rewrite(ctx, rho, hrs)
    check_rewrite(ctx, sigma, hrs)
    frho, fsigma = flatten(rho, hrs), flatten(sigma, hrs)
    _require_coinitial(frho[0], fsigma[0], hrs)
    wit = _witnesses(project_flat(frho, fsigma, hrs), "left//right")
    wit += _witnesses(project_flat(fsigma, frho, hrs), "right//left")
    return Verdict(not wit, tuple(wit))


def cube_check(mu: Term, nu: Term, xi: Term, hrs: Hrs) -> bool:
    """``(mu/nu)/(xi/nu) == (mu/xi)/(nu/xi)``."""
    left = project_ms(project_ms(mu, nu, hrs), project_ms(xi, nu, hrs), hrs)
    right = project_ms(project_ms(mu, xi, hrs), project_ms(nu, xi, hrs), hrs)
    return left == right
