"""Splitting multisteps, merging them back, unfoldings and depth."""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping, Sequence

from .errors import (
    BadChoices,
    BudgetExceeded,
    MatchFailure,
    NonComposable,
    OverlappingOccurrences,
    StaleOccurrence,
)
from .flattening import fsrc, ftgt
from .hrs import Hrs, RedexOccurrence, find_redexes, mark_redexes, mark_redexes_tracked, match_rule
from .normalize import flat_nf, long_nf
from .projection import project_ms
from .rewrites import rsrc
from .terms import (
    App,
    Lam,
    Path,
    Rule,
    Term,
    arg_path,
    has_rules,
    has_seq,
    rule_occurrences,
    show,
    spine,
    subterm_at,
)

Choices = Mapping[Path, str]

UNFOLD_BUDGET = 64


def occurrences(mu: Term) -> list[Path]:
    """Rule-symbol occurrence paths in preorder."""
    return [p for p, _ in rule_occurrences(mu)]


def _normalize_choices(mu: Term, choices: Choices | Sequence[str]) -> dict[Path, str]:
    paths = occurrences(mu)
    if isinstance(choices, Mapping):
        table = dict(choices)
    else:
        if len(choices) != len(paths):
            raise BadChoices(f"{len(choices)} choices for {len(paths)} occurrences")
        table = dict(zip(paths, choices))
    if set(table) != set(paths):
        raise BadChoices(f"choices must cover exactly the occurrences {paths}")
    bad = {v for v in table.values() if v not in ("L", "R")}
    if bad:
        raise BadChoices(f"choices must be L or R, got {sorted(bad)}")
    return table


def split(mu: Term, choices: Choices | Sequence[str], hrs: Hrs) -> tuple[Term, Term]:
    """Route each rule occurrence to the first (L) or the second (R) multistep."""
    if has_seq(mu):
        raise BadChoices("split expects a multistep")
    table = _normalize_choices(mu, choices)

    def go(node: Term, path: Path) -> tuple[Term, Term]:
        if isinstance(node, Rule):
            rule = hrs.rules[node.name]
            if table[path] == "L":
                return node, rule.closed_tgt
            return rule.closed_src, node
        if isinstance(node, Lam):
            a, b = go(node.body, path + (0,))
            return Lam(node.ty, a, node.hint), Lam(node.ty, b, node.hint)
        if isinstance(node, App):
            f1, f2 = go(node.fun, path + (0,))
            a1, a2 = go(node.arg, path + (1,))
            return App(f1, a1), App(f2, a2)
        return node, node

    return go(mu, ())


def enumerate_splits(mu: Term, hrs: Hrs) -> Iterator[tuple[dict[Path, str], Term, Term]]:
    """Every split of ``mu``; choice vectors in preorder, L before R."""
    paths = occurrences(mu)
    for combo in itertools.product("LR", repeat=len(paths)):
        choices = dict(zip(paths, combo))
        m1, m2 = split(mu, choices, hrs)
        yield choices, m1, m2


def is_empty(mu: Term) -> bool:
    return not has_rules(mu)


# ---------------------------------------------------------------------------
# Merging


def _check_composable(mu1: Term, mu2: Term, hrs: Hrs) -> Term:
    t, s = ftgt(mu1, hrs), fsrc(mu2, hrs)
    if t != s:
        raise NonComposable(f"target {show(t)} differs from source {show(s)}")
    return long_nf(rsrc(mu1, hrs), hrs.sig)


def _subset_order(required: list[int], others: list[int]) -> Iterator[tuple[int, ...]]:
    for k in range(len(others) + 1):
        group = [tuple(sorted(required + list(c))) for c in itertools.combinations(others, k)]
        yield from sorted(group)


def _locate(mu: Term, s: Term, hrs: Hrs) -> list[tuple[Path, str]]:
    """Positions in the long source ``s`` of the redexes fired by ``mu``."""
    out: list[tuple[Path, str]] = []

    def go(m: Term, t: Term, pos: Path) -> None:
        if isinstance(m, Lam):
            go(m.body, t.body, pos + (0,))  # type: ignore[union-attr]
            return
        head, args = spine(m)
        if isinstance(head, Rule):
            rule = hrs.rules[head.name]
            out.append((pos, head.name))
            theta = match_rule(rule, t)
            assert theta is not None, "multistep does not fit its source"
            for (_, _), q, a in zip(rule.metavars, rule.meta_paths, args):
                body = a
                while isinstance(body, Lam):
                    body = body.body
                go(body, subterm_at(t, q), pos + q)
            return
        _, targs = spine(t)
        n = len(args)
        for i, (a, b) in enumerate(zip(args, targs)):
            go(a, b, pos + arg_path(n, i))

    go(long_nf(mu, hrs.sig), s, ())
    return out


def merge(mu1: Term, mu2: Term, hrs: Hrs) -> Term | None:
    """A single flat multistep doing the work of ``mu1 ; mu2``, if one exists.

    Searches the same candidates as :func:`merge_bruteforce`, restricted to
    redex sets containing those fired by ``mu1`` (routed L, all others R).
    """
    s = _check_composable(mu1, mu2, hrs)
    target1, target2 = flat_nf(mu1), flat_nf(mu2)
    redexes = find_redexes(s, hrs)
    index = {(o.position, o.rule): i for i, o in enumerate(redexes)}
    fired = _locate(mu1, s, hrs)
    required = sorted(index[f] for f in fired)
    left = {redexes[i].position for i in required}
    others = [i for i in range(len(redexes)) if i not in required]
    for subset in _subset_order(required, others):
        try:
            c, order = mark_redexes_tracked(s, [redexes[i] for i in subset], hrs)
        except (OverlappingOccurrences, StaleOccurrence):
            continue
        choices = {p: ("L" if pos in left else "R") for p, pos in zip(occurrences(c), order)}
        c1, c2 = split(c, choices, hrs)
        if flat_nf(c1) == target1 and flat_nf(c2) == target2:
            return flat_nf(c)
    return None


def merge_bruteforce(mu1: Term, mu2: Term, hrs: Hrs) -> Term | None:
    """Exhaustive search over all marked multisteps of the source and all their splits."""
    s = _check_composable(mu1, mu2, hrs)
    target1, target2 = flat_nf(mu1), flat_nf(mu2)
    redexes = find_redexes(s, hrs)
    for subset in _subset_order([], list(range(len(redexes)))):
        try:
            c = flat_nf(mark_redexes(s, [redexes[i] for i in subset], hrs))
        except (OverlappingOccurrences, StaleOccurrence):
            continue
        for _, c1, c2 in enumerate_splits(c, hrs):
            if flat_nf(c1) == target1 and flat_nf(c2) == target2:
                return c
    return None


# ---------------------------------------------------------------------------
# Unfoldings and depth


def single_steps(mu: Term, hrs: Hrs) -> list[tuple[RedexOccurrence, Term]]:
    """Single-redex multisteps (flat) whose work is contained in ``mu``.

    A step is contained when its projection over ``mu`` is empty. A step
    overlapping a redex of ``mu`` cannot be aligned with it and is skipped.
    """
    s = long_nf(rsrc(mu, hrs), hrs.sig)
    out = []
    for occ in find_redexes(s, hrs):
        one = flat_nf(mark_redexes(s, [occ], hrs))
        try:
            rest = project_ms(one, mu, hrs)
        except MatchFailure:
            continue
        if is_empty(rest):
            out.append((occ, one))
    return out


def _innermost_leftmost(cands: list[tuple[RedexOccurrence, Term]]) -> tuple[RedexOccurrence, Term]:
    # a candidate is innermost when no other candidate sits strictly below it
    positions = [o.position for o, _ in cands]
    for occ, one in cands:
        p = occ.position
        if not any(q != p and q[: len(p)] == p for q in positions):
            return occ, one
    return cands[0]


def unfold(mu: Term, hrs: Hrs, budget: int = UNFOLD_BUDGET) -> list[Term]:
    """Decompose ``mu`` into non-empty single-redex steps, innermost-leftmost first."""
    cur = flat_nf(mu)
    out: list[Term] = []
    while not is_empty(cur):
        if len(out) >= budget:
            raise BudgetExceeded(
                f"unfolding exceeded {budget} steps", emitted=len(out), current=show(cur)
            )
        cands = single_steps(cur, hrs)
        if not cands:
            raise BudgetExceeded("no contained single step", current=show(cur))
        _, one = _innermost_leftmost(cands)
        out.append(one)
        cur = project_ms(cur, one, hrs)
    return out


def depth(mu: Term, hrs: Hrs, budget: int = UNFOLD_BUDGET) -> int | None:
    """Length of the longest unfolding of ``mu``; None when it exceeds ``budget``."""
    memo: dict[Term, int] = {}
    active: set[Term] = set()

    class _Stop(Exception):
        pass

    def go(m: Term, level: int) -> int:
        if is_empty(m):
            return 0
        if m in memo:
            return memo[m]
        if m in active or level > budget:
            raise _Stop
        active.add(m)
        best = 0
        for _, one in single_steps(m, hrs):
            best = max(best, 1 + go(project_ms(m, one, hrs), level + 1))
            if best > budget:
                raise _Stop
        active.discard(m)
        memo[m] = best
        return best

    try:
        return go(flat_nf(mu), 0)
    except _Stop:
        return None
