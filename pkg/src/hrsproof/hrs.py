"""Higher-order rewriting systems: loading, pattern matching and redexes."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    HrsError,
    IllTypedRule,
    NotAPattern,
    NotBaseType,
    NotLeftLinear,
    OverlappingOccurrences,
    ParseError,
    StaleOccurrence,
    VariableEscape,
)
from .normalize import beta_nf, eta_short, is_pattern, long_nf
from .parser import parse_expr, parse_rule_sides, parse_type, show_reparsable
from .terms import (
    App,
    Bound,
    Con,
    Lam,
    Path,
    Rule,
    Term,
    Var,
    abstract,
    arg_path,
    free_vars,
    iter_nodes,
    mk_app,
    remap_bound,
    replace_at,
    show,
    spine,
    subst_vars,
    subterm_at,
)
from .typecheck import Env, Signature, infer
from .typesys import Base, Type, arrows


@dataclass(frozen=True)
class RewriteRule:
    """A rule ``lhs => rhs`` together with its closed (rule symbol) form."""

    name: str
    metavars: tuple[tuple[str, Type], ...]
    lhs: Term
    rhs: Term
    rule_type: Type
    closed_src: Term
    closed_tgt: Term
    meta_paths: tuple[Path, ...]

    @property
    def metaset(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.metavars)


@dataclass
class Hrs:
    consts: dict[str, Type] = field(default_factory=dict)
    rules: dict[str, RewriteRule] = field(default_factory=dict)
    vars: dict[str, Type] = field(default_factory=dict)

    @property
    def sig(self) -> Signature:
        return Signature(
            self.consts,
            {name: r.rule_type for name, r in self.rules.items()},
            self.vars,
        )

    def parse(self, text: str, ctx: Mapping[str, Type] | None = None) -> Term:
        """Parse a term or rewrite in this system."""
        return parse_expr(text, self.sig, ctx)

    def show(self, t: Term) -> str:
        """Print so that :meth:`parse` gives ``t`` back."""
        return show_reparsable(t, self.sig)

    def src_of(self, name: str) -> Term:
        return self.rules[name].closed_src

    def tgt_of(self, name: str) -> Term:
        return self.rules[name].closed_tgt


@dataclass(frozen=True)
class RedexOccurrence:
    position: Path
    rule: str
    match: tuple[tuple[str, Term], ...] = field(compare=False, default=())

    @property
    def subst(self) -> dict[str, Term]:
        return dict(self.match)


# ---------------------------------------------------------------------------
# Loading


def _metavar_paths(lhs: Term, metas: set[str]) -> dict[str, Path]:
    paths: dict[str, Path] = {}

    def go(node: Term, path: Path) -> None:
        if isinstance(node, Lam):
            go(node.body, path + (0,))
            return
        head, args = spine(node)
        if isinstance(head, Var) and head.name in metas:
            paths.setdefault(head.name, path)
            return
        for i, a in enumerate(args):
            go(a, path + arg_path(len(args), i))

    go(lhs, ())
    return paths


def make_rule(name: str, lhs_text: str, rhs_text: str, sig: Signature) -> RewriteRule:
    try:
        lhs, rhs, metas, ty = parse_rule_sides(lhs_text, rhs_text, sig)
        local = sig.with_vars(metas)
        infer(lhs, local)
        infer(rhs, local)
    except ParseError:
        raise
    except HrsError as exc:
        raise IllTypedRule(f"rule {name}: {exc}") from exc
    if not isinstance(ty, Base):
        raise NotBaseType(f"rule {name}: sides have type {ty}, expected a base type")
    lhs = long_nf(lhs, local)
    rhs = long_nf(rhs, local)
    head, _ = spine(lhs)
    if isinstance(head, Var):
        raise NotAPattern(f"rule {name}: left-hand side is headed by a metavariable")
    if not is_pattern(lhs, set(metas)):
        raise NotAPattern(f"rule {name}: left-hand side is not a pattern")
    order: list[str] = []
    counts: dict[str, int] = {}
    for node in iter_nodes(lhs):
        if isinstance(node, Var):
            counts[node.name] = counts.get(node.name, 0) + 1
            if node.name not in order:
                order.append(node.name)
    for mv, c in counts.items():
        if c != 1:
            raise NotLeftLinear(f"rule {name}: metavariable {mv} occurs {c} times")
    escaped = free_vars(rhs) - set(order)
    if escaped:
        raise VariableEscape(f"rule {name}: {sorted(escaped)} not bound by the left-hand side")
    metavars = tuple((mv, metas[mv]) for mv in order)

    def close(side: Term) -> Term:
        for mv, mty in reversed(metavars):
            side = Lam(mty, abstract(side, mv), mv.lower())
        return side

    paths = _metavar_paths(lhs, set(order))
    return RewriteRule(
        name=name,
        metavars=metavars,
        lhs=lhs,
        rhs=rhs,
        rule_type=arrows([t for _, t in metavars], ty),
        closed_src=close(lhs),
        closed_tgt=close(rhs),
        meta_paths=tuple(paths[mv] for mv, _ in metavars),
    )


def load_hrs(text: str) -> Hrs:
    """Read the line-oriented ``.hrs`` format (``sig``, ``var`` and ``rule`` lines)."""
    hrs = Hrs()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.endswith("."):
            raise ParseError(f"line {lineno}: statement must end with '.'")
        line = line[:-1].strip()
        keyword, _, rest = line.partition(" ")
        name, colon, body = rest.partition(":")
        name = name.strip()
        if not colon or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise ParseError(f"line {lineno}: expected '{keyword} <name> : ...'")
        if name in hrs.consts or name in hrs.rules or name in hrs.vars:
            raise ParseError(f"line {lineno}: {name} declared twice")
        try:
            if keyword == "sig":
                hrs.consts[name] = parse_type(body)
            elif keyword == "var":
                hrs.vars[name] = parse_type(body)
            elif keyword == "rule":
                lhs_text, arrow, rhs_text = body.partition("=>")
                if not arrow:
                    raise ParseError("rule without '=>'")
                sig = Signature(hrs.consts, {}, {})
                hrs.rules[name] = make_rule(name, lhs_text, rhs_text, sig)
            else:
                raise ParseError(f"unknown statement {keyword!r}")
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return hrs


def dump_hrs(hrs: Hrs) -> str:
    lines = [f"sig {n} : {t}." for n, t in hrs.consts.items()]
    lines += [f"var {n} : {t}." for n, t in hrs.vars.items()]
    for r in hrs.rules.values():
        lines.append(f"rule {r.name} : {show(r.lhs)} => {show(r.rhs)}.")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Miller pattern matching


class _Fail(Exception):
    pass


def pattern_match(
    lhs: Term, metavars: Iterable[str], candidate: Term, env: Env = ()
) -> dict[str, Term] | None:
    """Match a left-linear pattern against a beta-normal eta-long candidate.

    The candidate may have loose bound variables (its enclosing context);
    the returned values live in that same context.
    """
    metas = frozenset(metavars)
    theta: dict[str, Term] = {}

    def go(p: Term, t: Term, k: int, penv: tuple[Type, ...]) -> None:
        if isinstance(p, Lam):
            if not isinstance(t, Lam) or t.ty != p.ty:
                raise _Fail
            go(p.body, t.body, k + 1, (p.ty,) + penv)
            return
        ph, pargs = spine(p)
        if isinstance(ph, Var) and ph.name in metas:
            idx: list[int] = []
            for a in pargs:
                b = eta_short(a)
                if not isinstance(b, Bound) or b.index >= k or b.index in idx:
                    raise _Fail
                idx.append(b.index)
            n = len(idx)

            def ren(j: int) -> int:
                if j < k:
                    if j not in idx:
                        raise _Fail
                    return n - 1 - idx.index(j)
                return j - k + n

            value = remap_bound(t, ren)
            for j in reversed(idx):
                value = Lam(penv[j], value, "x")
            if ph.name in theta and theta[ph.name] != value:
                raise _Fail
            theta[ph.name] = value
            return
        th, targs = spine(t)
        if len(pargs) != len(targs) or isinstance(t, Lam):
            raise _Fail
        if isinstance(ph, Bound):
            if ph.index >= k or th != ph:
                raise _Fail
        elif isinstance(ph, Con):
            if th != ph:
                raise _Fail
        else:
            raise _Fail
        for pa, ta in zip(pargs, targs):
            go(pa, ta, k, penv)

    try:
        go(lhs, candidate, 0, ())
    except _Fail:
        return None
    return theta


def match_rule(rule: RewriteRule, candidate: Term) -> dict[str, Term] | None:
    head, _ = spine(rule.lhs)
    chead, _ = spine(candidate)
    if head != chead:
        return None
    return pattern_match(rule.lhs, rule.metaset, candidate)


def instantiate_side(side: Term, theta: Mapping[str, Term]) -> Term:
    """``θ side`` followed by beta-normalization."""
    return beta_nf(subst_vars(side, dict(theta)))


# ---------------------------------------------------------------------------
# Redexes


def find_redexes(t: Term, hrs: Hrs) -> list[RedexOccurrence]:
    """All redex occurrences of a beta-normal eta-long term, leftmost-outermost."""
    out: list[RedexOccurrence] = []

    def walk(node: Term, path: Path) -> None:
        if isinstance(node, Lam):
            walk(node.body, path + (0,))
            return
        head, args = spine(node)
        for rule in hrs.rules.values():
            theta = match_rule(rule, node)
            if theta is not None:
                out.append(
                    RedexOccurrence(path, rule.name, tuple((mv, theta[mv]) for mv, _ in rule.metavars))
                )
        for i, a in enumerate(args):
            walk(a, path + arg_path(len(args), i))

    walk(t, ())
    return out


def step(t: Term, occ: RedexOccurrence, hrs: Hrs) -> Term:
    """Contract one redex and return the beta-normal eta-long result."""
    t = long_nf(t, hrs.sig)
    rule = hrs.rules.get(occ.rule)
    try:
        sub = subterm_at(t, occ.position)
    except KeyError:
        raise StaleOccurrence(f"no subterm at {occ.position}") from None
    theta = match_rule(rule, sub) if rule else None
    if theta is None:
        raise StaleOccurrence(f"{occ.rule} does not match at {occ.position}")
    return long_nf(replace_at(t, occ.position, instantiate_side(rule.rhs, theta)), hrs.sig)


def mark_redexes(t: Term, occs: Iterable[RedexOccurrence], hrs: Hrs) -> Term:
    """Multistep contracting the given redexes of ``t`` (eta-long result)."""
    return mark_redexes_tracked(t, occs, hrs)[0]


def mark_redexes_tracked(
    t: Term, occs: Iterable[RedexOccurrence], hrs: Hrs
) -> tuple[Term, list[Path]]:
    """Like :func:`mark_redexes`, also returning the marked positions of ``t``
    in the preorder of the rule symbols of the result."""
    marks: dict[Path, str] = {}
    for o in occs:
        if o.position in marks and marks[o.position] != o.rule:
            raise OverlappingOccurrences(f"two rules at {o.position}")
        marks[o.position] = o.rule
    visited: set[Path] = set()
    order: list[Path] = []

    def mark(node: Term, pos: Path) -> Term:
        if pos in marks:
            rule = hrs.rules[marks[pos]]
            theta = match_rule(rule, node)
            if theta is None:
                raise StaleOccurrence(f"{rule.name} does not match at {pos}")
            visited.add(pos)
            order.append(pos)
            args = []
            for (mv, _), q in zip(rule.metavars, rule.meta_paths):
                value = theta[mv]
                lams: list[Lam] = []
                while isinstance(value, Lam):
                    lams.append(value)
                    value = value.body
                inner = mark(value, pos + q)
                for lm in reversed(lams):
                    inner = Lam(lm.ty, inner, lm.hint)
                args.append(inner)
            return mk_app(Rule(rule.name), args)
        if isinstance(node, Lam):
            return Lam(node.ty, mark(node.body, pos + (0,)), node.hint)
        head, args = spine(node)
        n = len(args)
        return mk_app(head, [mark(a, pos + arg_path(n, i)) for i, a in enumerate(args)])

    result = mark(t, ())
    missing = set(marks) - visited
    if missing:
        raise OverlappingOccurrences(f"occurrences inside another pattern: {sorted(missing)}")
    return result, order
