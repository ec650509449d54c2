"""Flattening: pushing compositions to the top level.

``flatten`` computes the normal form compositionally. ``reduce_traced`` runs
the small-step system (rules Abs, App1, App2, App3, BetaM, EtaM) literally,
with a selectable strategy and a per-step measure log; the two agree by
confluence and the test suite checks that they do.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import InternalBudgetExceeded
from .hrs import Hrs
from .normalize import beta_nf, flat_nf
from .rewrites import rsrc, rtgt
from .terms import (
    App,
    Bound,
    Lam,
    Path,
    Seq,
    Term,
    has_seq,
    instantiate,
    mk_seq,
    occurs_bound,
    replace_at,
    seq_leaves,
    shift,
    show,
    subterm_at,
)

FlatRewrite = tuple[Term, ...]

FLATTEN_BUDGET = 10**6


def _compose(
    fun: list[Term], arg: list[Term], hrs: Hrs, norm: Callable[[Term], Term]
) -> list[Term]:
    n, p = len(fun), len(arg)
    if n == 1 and p == 1:
        return [norm(App(fun[0], arg[0]))]
    if p == 1:
        s = rsrc(arg[0], hrs)
        return [norm(App(m, s)) for m in fun[:-1]] + [norm(App(fun[-1], arg[0]))]
    if n == 1:
        t = rtgt(fun[0], hrs)
        return [norm(App(fun[0], arg[0]))] + [norm(App(t, k)) for k in arg[1:]]
    s = rsrc(arg[0], hrs)
    t = rtgt(fun[-1], hrs)
    return [norm(App(m, s)) for m in fun] + [norm(App(t, k)) for k in arg]


def _flatten(rw: Term, hrs: Hrs, norm: Callable[[Term], Term]) -> list[Term]:
    if not has_seq(rw):
        return [norm(rw)]
    if isinstance(rw, Seq):
        return _flatten(rw.first, hrs, norm) + _flatten(rw.second, hrs, norm)
    if isinstance(rw, Lam):
        return [norm(Lam(rw.ty, m, rw.hint)) for m in _flatten(rw.body, hrs, norm)]
    assert isinstance(rw, App)
    return _compose(_flatten(rw.fun, hrs, norm), _flatten(rw.arg, hrs, norm), hrs, norm)


def flatten(rw: Term, hrs: Hrs) -> FlatRewrite:
    """Flat normal form as the left-to-right sequence of flat multisteps."""
    return tuple(_flatten(rw, hrs, flat_nf))


def flatten_noeta(rw: Term, hrs: Hrs) -> FlatRewrite:
    """Normal form without the EtaM rule (multisteps beta-normal, maybe eta-short or not)."""
    return tuple(_flatten(rw, hrs, beta_nf))


def as_rewrite(flat: FlatRewrite) -> Term:
    return mk_seq(list(flat))


def show_flat(flat: FlatRewrite) -> str:
    return " ; ".join(show(m) for m in flat)


def fsrc(rw: Term, hrs: Hrs) -> Term:
    return flat_nf(rsrc(rw, hrs))


def ftgt(rw: Term, hrs: Hrs) -> Term:
    return flat_nf(rtgt(rw, hrs))


# ---------------------------------------------------------------------------
# Measures


def heavy(rw: Term) -> int:
    """Number of applications whose both sides contain a composition."""
    if isinstance(rw, Lam):
        return heavy(rw.body)
    if isinstance(rw, App):
        extra = 1 if has_seq(rw.fun) and has_seq(rw.arg) else 0
        return heavy(rw.fun) + heavy(rw.arg) + extra
    if isinstance(rw, Seq):
        return heavy(rw.first) + heavy(rw.second)
    return 0


def weight(rw: Term) -> int:
    if isinstance(rw, Lam):
        return 2 * weight(rw.body)
    if isinstance(rw, App):
        return 2 * weight(rw.fun) + 2 * weight(rw.arg)
    if isinstance(rw, Seq):
        return 1 + weight(rw.first) + weight(rw.second)
    return 0


def measure(rw: Term) -> tuple[int, int]:
    return heavy(rw), weight(rw)


# ---------------------------------------------------------------------------
# Literal small-step system

STRUCTURAL = ("Abs", "App1", "App2", "App3")


def contract(node: Term, hrs: Hrs, eta: bool = True) -> tuple[str, Term] | None:
    """Fire the flattening rule whose left-hand side is ``node``, if any."""
    if isinstance(node, Lam):
        body = node.body
        if isinstance(body, Seq):
            return "Abs", Seq(Lam(node.ty, body.first, node.hint), Lam(node.ty, body.second, node.hint))
        if (
            eta
            and isinstance(body, App)
            and body.arg == Bound(0)
            and not occurs_bound(body.fun, 0)
            and not has_seq(body.fun)
        ):
            return "EtaM", shift(body.fun, -1)
        return None
    if isinstance(node, App):
        f, a = node.fun, node.arg
        if isinstance(f, Seq) and isinstance(a, Seq):
            left = App(f, rsrc(a.first, hrs))
            right = App(rtgt(f.second, hrs), a)
            return "App3", Seq(left, right)
        if isinstance(f, Seq) and not has_seq(a):
            return "App1", Seq(App(f.first, rsrc(a, hrs)), App(f.second, a))
        if isinstance(a, Seq) and not has_seq(f):
            return "App2", Seq(App(f, a.first), App(rtgt(f, hrs), a.second))
        if isinstance(f, Lam) and not has_seq(f) and not has_seq(a):
            return "BetaM", instantiate(f.body, a)
    return None


def _positions(t: Term, path: Path, post: bool) -> Iterator[Path]:
    if not post:
        yield path
    if isinstance(t, Lam):
        yield from _positions(t.body, path + (0,), post)
    elif isinstance(t, App):
        yield from _positions(t.fun, path + (0,), post)
        yield from _positions(t.arg, path + (1,), post)
    elif isinstance(t, Seq):
        yield from _positions(t.first, path + (0,), post)
        yield from _positions(t.second, path + (1,), post)
    if post:
        yield path


def _find(t: Term, hrs: Hrs, eta: bool, post: bool, kinds: tuple[str, ...] | None):
    for p in _positions(t, (), post):
        hit = contract(subterm_at(t, p), hrs, eta)
        if hit is not None and (kinds is None or hit[0] in kinds):
            return p, hit
    return None


@dataclass(frozen=True)
class TraceStep:
    rule: str
    path: Path
    before: tuple[int, int]
    after: tuple[int, int]


def reduce_traced(
    rw: Term,
    hrs: Hrs,
    strategy: str = "default",
    eta: bool = True,
    budget: int = FLATTEN_BUDGET,
) -> tuple[Term, list[TraceStep]]:
    """Normalize by single rule firings.

    Strategies: ``outermost`` and ``innermost`` treat all rules alike;
    ``default`` fires structural rules leftmost-outermost first and the
    BetaM/EtaM rules innermost afterwards.
    """
    trace: list[TraceStep] = []
    cur = rw
    for _ in range(budget):
        if strategy == "default":
            hit = _find(cur, hrs, eta, False, STRUCTURAL) or _find(cur, hrs, eta, True, None)
        elif strategy == "outermost":
            hit = _find(cur, hrs, eta, False, None)
        elif strategy == "innermost":
            hit = _find(cur, hrs, eta, True, None)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if hit is None:
            return cur, trace
        path, (name, new) = hit
        before = measure(cur)
        cur = replace_at(cur, path, new)
        trace.append(TraceStep(name, path, before, measure(cur)))
    raise InternalBudgetExceeded(f"flattening did not finish within {budget} firings")


def normal_leaves(rw: Term, hrs: Hrs, strategy: str = "default", eta: bool = True) -> FlatRewrite:
    nf, _ = reduce_traced(rw, hrs, strategy, eta)
    return tuple(seq_leaves(nf))
