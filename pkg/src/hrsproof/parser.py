"""Concrete syntax for types, terms and rewrites.

Grammar (``;`` binds weakest and associates to the right; abstraction bodies
extend as far as possible but stop at ``;``)::

    expr  ::= lexpr (";" expr)?
    lexpr ::= "\\" binder+ "." lexpr | app
    app   ::= atom+ ("\\" ...)?
    atom  ::= ident | "(" expr ")" | "refl" atom
    binder ::= ident | "(" ident ":" type ")"

``\\x : T. body`` is also accepted for a single annotated binder.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ParseError, TypeMismatch, UnboundVariable
from .terms import App, Bound, Con, Lam, Rule, Seq, Term, Var, is_term, show
from .typecheck import Signature
from .typesys import Arrow, Base, Type

_TOKEN = re.compile(
    r"\s*(?:(?P<comment>#[^\n]*)|(?P<arrow>->)|(?P<darrow>=>)|(?P<lam>\\|λ)"
    r"|(?P<punct>[().;:])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        if m.lastgroup == "comment" or m.lastgroup is None:
            continue
        tokens.append("\\" if m.lastgroup == "lam" else m.group(m.lastgroup))
    return tokens


# ---------------------------------------------------------------------------
# Raw syntax


@dataclass(frozen=True)
class RName:
    name: str


@dataclass(frozen=True)
class RLam:
    name: str
    ty: Type | None
    body: "Raw"


@dataclass(frozen=True)
class RApp:
    fun: "Raw"
    arg: "Raw"


@dataclass(frozen=True)
class RSeq:
    first: "Raw"
    second: "Raw"


@dataclass(frozen=True)
class RRefl:
    body: "Raw"


Raw = Union[RName, RLam, RApp, RSeq, RRefl]


class _Stream:
    def __init__(self, tokens: list[str]) -> None:
        self.toks = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, found {got!r}")

    def at_end(self) -> bool:
        return self.i >= len(self.toks)


def _is_ident(tok: str | None) -> bool:
    return tok is not None and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) is not None


def _type(s: _Stream) -> Type:
    left = _type_atom(s)
    if s.peek() == "->":
        s.next()
        return Arrow(left, _type(s))
    return left


def _type_atom(s: _Stream) -> Type:
    tok = s.next()
    if tok == "(":
        ty = _type(s)
        s.expect(")")
        return ty
    if not _is_ident(tok):
        raise ParseError(f"expected a type, found {tok!r}")
    return Base(tok)


def _expr(s: _Stream) -> Raw:
    left = _lexpr(s)
    if s.peek() == ";":
        s.next()
        return RSeq(left, _expr(s))
    return left


def _lexpr(s: _Stream) -> Raw:
    if s.peek() == "\\":
        return _lambda(s)
    return _app(s)


def _lambda(s: _Stream) -> Raw:
    s.expect("\\")
    binders: list[tuple[str, Type | None]] = []
    while True:
        tok = s.peek()
        if tok == "(":
            s.next()
            name = s.next()
            s.expect(":")
            binders.append((name, _type(s)))
            s.expect(")")
        elif _is_ident(tok) and tok != "refl":
            binders.append((s.next(), None))
            if s.peek() == ":":
                s.next()
                binders[-1] = (binders[-1][0], _type(s))
                break
        else:
            break
    if not binders:
        raise ParseError("abstraction without binder")
    s.expect(".")
    body = _lexpr(s)
    for name, ty in reversed(binders):
        body = RLam(name, ty, body)
    return body


_STOP = {None, ")", ";", ".", "=>", ":", "->"}


def _app(s: _Stream) -> Raw:
    head = _atom(s)
    while s.peek() not in _STOP:
        if s.peek() == "\\":
            head = RApp(head, _lambda(s))
            break
        head = RApp(head, _atom(s))
    return head


def _atom(s: _Stream) -> Raw:
    tok = s.next()
    if tok == "(":
        e = _expr(s)
        s.expect(")")
        return e
    if tok == "refl":
        return RRefl(_atom(s))
    if _is_ident(tok):
        return RName(tok)
    raise ParseError(f"unexpected token {tok!r}")


def parse_raw(text: str) -> Raw:
    s = _Stream(tokenize(text))
    e = _expr(s)
    if not s.at_end():
        raise ParseError(f"trailing input starting at {s.peek()!r}")
    return e


def parse_type(text: str) -> Type:
    s = _Stream(tokenize(text))
    ty = _type(s)
    if not s.at_end():
        raise ParseError(f"trailing input in type: {s.peek()!r}")
    return ty


# ---------------------------------------------------------------------------
# Resolution and type inference


@dataclass(frozen=True)
class TVar:
    id: int


class _Infer:
    def __init__(self, sig: Signature, metavars: bool) -> None:
        self.sig = sig
        self.metavars = metavars
        self.meta: dict[str, object] = {}
        self.subst: dict[int, object] = {}
        self.counter = itertools.count()

    def fresh(self) -> TVar:
        return TVar(next(self.counter))

    def walk(self, ty: object) -> object:
        while isinstance(ty, TVar) and ty.id in self.subst:
            ty = self.subst[ty.id]
        return ty

    def occurs(self, v: TVar, ty: object) -> bool:
        ty = self.walk(ty)
        if ty == v:
            return True
        if isinstance(ty, Arrow):
            return self.occurs(v, ty.dom) or self.occurs(v, ty.cod)
        return False

    def unify(self, a: object, b: object) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if isinstance(a, TVar):
            if self.occurs(a, b):
                raise TypeMismatch("cyclic type")
            self.subst[a.id] = b
        elif isinstance(b, TVar):
            self.unify(b, a)
        elif isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom)
            self.unify(a.cod, b.cod)
        else:
            raise TypeMismatch(f"cannot match type {self.show(a)} with {self.show(b)}")

    def zonk(self, ty: object, what: str) -> Type:
        ty = self.walk(ty)
        if isinstance(ty, TVar):
            raise TypeMismatch(f"cannot infer the type of {what}")
        if isinstance(ty, Arrow):
            return Arrow(self.zonk(ty.dom, what), self.zonk(ty.cod, what))
        return ty  # type: ignore[return-value]

    def show(self, ty: object) -> str:
        ty = self.walk(ty)
        if isinstance(ty, TVar):
            return f"?{ty.id}"
        if isinstance(ty, Arrow):
            return f"({self.show(ty.dom)} -> {self.show(ty.cod)})"
        return str(ty)

    def lookup(self, name: str, bound: list[tuple[str, object]]) -> tuple[Term, object]:
        for i, (bname, bty) in enumerate(bound):
            if bname == name:
                return Bound(i), bty
        if name in self.sig.vars:
            return Var(name), self.sig.vars[name]
        if self.metavars and name[:1].isupper():
            if name not in self.meta:
                self.meta[name] = self.fresh()
            return Var(name), self.meta[name]
        if name in self.sig.consts:
            return Con(name), self.sig.consts[name]
        if name in self.sig.rules:
            return Rule(name), self.sig.rules[name]
        raise UnboundVariable(f"unknown identifier {name!r}")

    def run(self, raw: Raw, bound: list[tuple[str, object]]) -> tuple[Term, object]:
        if isinstance(raw, RName):
            return self.lookup(raw.name, bound)
        if isinstance(raw, RLam):
            ty = raw.ty if raw.ty is not None else self.fresh()
            body, bty = self.run(raw.body, [(raw.name, ty)] + bound)
            return Lam(ty, body, raw.name), Arrow(ty, bty)  # type: ignore[arg-type]
        if isinstance(raw, RApp):
            f, fty = self.run(raw.fun, bound)
            a, aty = self.run(raw.arg, bound)
            res = self.fresh()
            self.unify(fty, Arrow(aty, res))  # type: ignore[arg-type]
            return App(f, a), res
        if isinstance(raw, RSeq):
            a, aty = self.run(raw.first, bound)
            b, bty = self.run(raw.second, bound)
            self.unify(aty, bty)
            return Seq(a, b), aty
        if isinstance(raw, RRefl):
            t, ty = self.run(raw.body, bound)
            if not is_term(t):
                raise ParseError("refl expects a term")
            return t, ty
        raise TypeError(raw)

    def finish(self, t: Term) -> Term:
        if isinstance(t, Lam):
            return Lam(self.zonk(t.ty, f"binder {t.hint}"), self.finish(t.body), t.hint)
        if isinstance(t, App):
            return App(self.finish(t.fun), self.finish(t.arg))
        if isinstance(t, Seq):
            return Seq(self.finish(t.first), self.finish(t.second))
        return t


def parse_expr(
    text: str,
    sig: Signature,
    ctx: Mapping[str, Type] | None = None,
    expected: Type | None = None,
) -> Term:
    """Parse and type a term or rewrite in the given signature."""
    inf = _Infer(sig.with_vars(ctx), metavars=False)
    t, ty = inf.run(parse_raw(text), [])
    if expected is not None:
        inf.unify(ty, expected)
    return inf.finish(t)


def parse_rule_sides(
    lhs_text: str, rhs_text: str, sig: Signature
) -> tuple[Term, Term, dict[str, Type], Type]:
    """Parse the two sides of a rule; uppercase identifiers become metavariables."""
    inf = _Infer(sig, metavars=True)
    lhs, lty = inf.run(parse_raw(lhs_text), [])
    rhs, rty = inf.run(parse_raw(rhs_text), [])
    inf.unify(lty, rty)
    metas = {name: inf.zonk(ty, f"metavariable {name}") for name, ty in inf.meta.items()}
    return inf.finish(lhs), inf.finish(rhs), metas, inf.zonk(lty, "rule side")


def show_reparsable(t: Term, sig: Signature, ctx: Mapping[str, Type] | None = None) -> str:
    """Plain rendering when it parses back to ``t``, else one with typed binders."""
    plain = show(t)
    try:
        if parse_expr(plain, sig, ctx) == t:
            return plain
    except (ParseError, TypeMismatch, UnboundVariable):
        pass
    return show(t, typed=True)
