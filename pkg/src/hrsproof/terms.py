"""Syntax shared by terms, multisteps and rewrites.

Bound variables use de Bruijn indices, so structural equality is
alpha-equivalence. Binders carry their type (Church style) and a naming
hint used only for printing. A term is a rewrite without ``Rule`` or ``Seq``
nodes; a multistep is a rewrite without ``Seq`` nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Union

from .typesys import Type

Path = tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Var:
    """Free (named) variable."""

    name: str


@dataclass(frozen=True, slots=True)
class Bound:
    """Bound variable as a de Bruijn index."""

    index: int


@dataclass(frozen=True, slots=True)
class Con:
    name: str


@dataclass(frozen=True, slots=True)
class Rule:
    """Rule symbol."""

    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    ty: Type
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Seq:
    first: "Term"
    second: "Term"


Term = Union[Var, Bound, Con, Rule, Lam, App, Seq]
Rewrite = Term
Multistep = Term

ATOMS = (Var, Bound, Con, Rule)


# ---------------------------------------------------------------------------
# de Bruijn plumbing


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Add ``d`` to every bound index ``>= cutoff``."""
    if d == 0:
        return t
    if isinstance(t, Bound):
        return Bound(t.index + d) if t.index >= cutoff else t
    if isinstance(t, Lam):
        return Lam(t.ty, shift(t.body, d, cutoff + 1), t.hint)
    if isinstance(t, App):
        return App(shift(t.fun, d, cutoff), shift(t.arg, d, cutoff))
    if isinstance(t, Seq):
        return Seq(shift(t.first, d, cutoff), shift(t.second, d, cutoff))
    return t


def subst_bound(t: Term, j: int, s: Term) -> Term:
    """Replace ``Bound(j)`` by ``s`` and close the gap left by ``j``.

    ``s`` lives in the scope just outside the binder being eliminated.
    """
    if isinstance(t, Bound):
        if t.index == j:
            return shift(s, j)
        if t.index > j:
            return Bound(t.index - 1)
        return t
    if isinstance(t, Lam):
        return Lam(t.ty, subst_bound(t.body, j + 1, s), t.hint)
    if isinstance(t, App):
        return App(subst_bound(t.fun, j, s), subst_bound(t.arg, j, s))
    if isinstance(t, Seq):
        return Seq(subst_bound(t.first, j, s), subst_bound(t.second, j, s))
    return t


def instantiate(body: Term, s: Term) -> Term:
    """``body`` is the body of a binder; substitute ``s`` for its variable."""
    return subst_bound(body, 0, s)


def subst_var(t: Term, name: str, s: Term, depth: int = 0) -> Term:
    """Capture-avoiding substitution of the free variable ``name``."""
    if isinstance(t, Var):
        return shift(s, depth) if t.name == name else t
    if isinstance(t, Lam):
        return Lam(t.ty, subst_var(t.body, name, s, depth + 1), t.hint)
    if isinstance(t, App):
        return App(subst_var(t.fun, name, s, depth), subst_var(t.arg, name, s, depth))
    if isinstance(t, Seq):
        return Seq(subst_var(t.first, name, s, depth), subst_var(t.second, name, s, depth))
    return t


def subst_vars(t: Term, mapping: dict[str, Term], depth: int = 0) -> Term:
    """Simultaneous version of :func:`subst_var`."""
    if not mapping:
        return t
    if isinstance(t, Var):
        s = mapping.get(t.name)
        return t if s is None else shift(s, depth)
    if isinstance(t, Lam):
        return Lam(t.ty, subst_vars(t.body, mapping, depth + 1), t.hint)
    if isinstance(t, App):
        return App(subst_vars(t.fun, mapping, depth), subst_vars(t.arg, mapping, depth))
    if isinstance(t, Seq):
        return Seq(subst_vars(t.first, mapping, depth), subst_vars(t.second, mapping, depth))
    return t


def abstract(t: Term, name: str, depth: int = 0) -> Term:
    """Turn free ``Var(name)`` into the variable of a new enclosing binder."""
    if isinstance(t, Var):
        return Bound(depth) if t.name == name else t
    if isinstance(t, Bound):
        return Bound(t.index + 1) if t.index >= depth else t
    if isinstance(t, Lam):
        return Lam(t.ty, abstract(t.body, name, depth + 1), t.hint)
    if isinstance(t, App):
        return App(abstract(t.fun, name, depth), abstract(t.arg, name, depth))
    if isinstance(t, Seq):
        return Seq(abstract(t.first, name, depth), abstract(t.second, name, depth))
    return t


def lam(name: str, ty: Type, body: Term) -> Lam:
    """Named-binder convenience constructor."""
    return Lam(ty, abstract(body, name), name)


def remap_bound(t: Term, f: Callable[[int], int], depth: int = 0) -> Term:
    """Rename loose bound indices (those ``>= depth``) through ``f``."""
    if isinstance(t, Bound):
        if t.index >= depth:
            return Bound(f(t.index - depth) + depth)
        return t
    if isinstance(t, Lam):
        return Lam(t.ty, remap_bound(t.body, f, depth + 1), t.hint)
    if isinstance(t, App):
        return App(remap_bound(t.fun, f, depth), remap_bound(t.arg, f, depth))
    if isinstance(t, Seq):
        return Seq(remap_bound(t.first, f, depth), remap_bound(t.second, f, depth))
    return t


def loose_bounds(t: Term, depth: int = 0) -> set[int]:
    """Loose de Bruijn indices of ``t`` (relative to its root)."""
    if isinstance(t, Bound):
        return {t.index - depth} if t.index >= depth else set()
    if isinstance(t, Lam):
        return loose_bounds(t.body, depth + 1)
    if isinstance(t, App):
        return loose_bounds(t.fun, depth) | loose_bounds(t.arg, depth)
    if isinstance(t, Seq):
        return loose_bounds(t.first, depth) | loose_bounds(t.second, depth)
    return set()


def occurs_bound(t: Term, j: int) -> bool:
    if isinstance(t, Bound):
        return t.index == j
    if isinstance(t, Lam):
        return occurs_bound(t.body, j + 1)
    if isinstance(t, App):
        return occurs_bound(t.fun, j) or occurs_bound(t.arg, j)
    if isinstance(t, Seq):
        return occurs_bound(t.first, j) or occurs_bound(t.second, j)
    return False


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    for node in iter_nodes(t):
        if isinstance(node, Var):
            out.add(node.name)
    return out


def iter_nodes(t: Term) -> Iterator[Term]:
    """Preorder traversal."""
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Lam):
            stack.append(node.body)
        elif isinstance(node, App):
            stack.append(node.arg)
            stack.append(node.fun)
        elif isinstance(node, Seq):
            stack.append(node.second)
            stack.append(node.first)


def has_rules(t: Term) -> bool:
    return any(isinstance(n, Rule) for n in iter_nodes(t))


def has_seq(t: Term) -> bool:
    return any(isinstance(n, Seq) for n in iter_nodes(t))


def is_term(t: Term) -> bool:
    return not any(isinstance(n, (Rule, Seq)) for n in iter_nodes(t))


def is_multistep(t: Term) -> bool:
    return not has_seq(t)


def size(t: Term) -> int:
    return sum(1 for _ in iter_nodes(t))


# ---------------------------------------------------------------------------
# Spines and positions


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Decompose ``h a1 ... an`` into ``(h, [a1, ..., an])``."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def mk_app(head: Term, args: list[Term] | tuple[Term, ...]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def arg_path(n: int, i: int) -> Path:
    """Path from a spine root with ``n`` arguments to argument ``i``."""
    return (0,) * (n - 1 - i) + (1,)


def subterm_at(t: Term, path: Path) -> Term:
    for step in path:
        if isinstance(t, Lam) and step == 0:
            t = t.body
        elif isinstance(t, App):
            t = t.fun if step == 0 else t.arg
        elif isinstance(t, Seq):
            t = t.first if step == 0 else t.second
        else:
            raise KeyError(path)
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    step, rest = path[0], path[1:]
    if isinstance(t, Lam) and step == 0:
        return Lam(t.ty, replace_at(t.body, rest, new), t.hint)
    if isinstance(t, App):
        if step == 0:
            return App(replace_at(t.fun, rest, new), t.arg)
        return App(t.fun, replace_at(t.arg, rest, new))
    if isinstance(t, Seq):
        if step == 0:
            return Seq(replace_at(t.first, rest, new), t.second)
        return Seq(t.first, replace_at(t.second, rest, new))
    raise KeyError(path)


def binder_depth(t: Term, path: Path) -> int:
    """Number of binders crossed on the way to ``path``."""
    depth = 0
    for step in path:
        if isinstance(t, Lam):
            depth += 1
            t = t.body
        elif isinstance(t, App):
            t = t.fun if step == 0 else t.arg
        elif isinstance(t, Seq):
            t = t.first if step == 0 else t.second
        else:
            raise KeyError(path)
    return depth


def rule_occurrences(t: Term, prefix: Path = ()) -> list[tuple[Path, str]]:
    """Rule-symbol occurrences in preorder, with their paths."""
    out: list[tuple[Path, str]] = []

    def go(node: Term, path: Path) -> None:
        if isinstance(node, Rule):
            out.append((path, node.name))
        elif isinstance(node, Lam):
            go(node.body, path + (0,))
        elif isinstance(node, (App, Seq)):
            a, b = (node.fun, node.arg) if isinstance(node, App) else (node.first, node.second)
            go(a, path + (0,))
            go(b, path + (1,))

    go(t, prefix)
    return out


def seq_leaves(t: Term) -> list[Term]:
    """Left-to-right leaves of the top-level composition tree."""
    if isinstance(t, Seq):
        return seq_leaves(t.first) + seq_leaves(t.second)
    return [t]


def mk_seq(parts: list[Term]) -> Term:
    """Right-nested composition of a non-empty list."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Seq(p, out)
    return out


# ---------------------------------------------------------------------------
# Printing

_LETTERS = ["x", "y", "z", "u", "v", "w"]


def _fresh(hint: str, taken: set[str]) -> str:
    if hint and hint not in taken and hint != "refl":
        return hint
    start = _LETTERS.index(hint) + 1 if hint in _LETTERS else 0
    for name in _LETTERS[start:] + _LETTERS[:start]:
        if name not in taken:
            return name
    base = hint or "x"
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def show(t: Term, names: list[str] | None = None, typed: bool = False) -> str:
    """Render with readable, capture-free binder names.

    ``names`` gives printable names for loose bound indices (innermost first);
    ``typed`` annotates every binder with its type.
    """
    globals_ = {n.name for n in iter_nodes(t) if isinstance(n, (Var, Con, Rule))}
    env = list(names or [])

    def go(node: Term, level: int, env: list[str]) -> str:
        if isinstance(node, (Var, Con, Rule)):
            return node.name
        if isinstance(node, Bound):
            if node.index < len(env):
                return env[node.index]
            return f"#{node.index - len(env)}"
        if isinstance(node, Seq):
            s = f"{go(node.first, 1, env)} ; {go(node.second, 0, env)}"
            return f"({s})" if level > 0 else s
        if isinstance(node, Lam):
            name = _fresh(node.hint, globals_ | set(env))
            binder = f"({name} : {node.ty})" if typed else name
            s = f"\\{binder}. {go(node.body, 1, [name] + env)}"
            return f"({s})" if level > 1 else s
        head_s = go(node.fun, 2, env)
        arg_s = go(node.arg, 3, env)
        s = f"{head_s} {arg_s}"
        return f"({s})" if level > 2 else s

    return go(t, 0, env)
