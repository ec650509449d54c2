"""Seeded generators, a bounded equivalence search, shrinking and the case corpus."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Callable, Iterator, Sequence

from .errors import OverlappingOccurrences, StaleOccurrence
from .flattening import FlatRewrite, as_rewrite, flatten, ftgt, normal_leaves
from .hrs import Hrs, dump_hrs, find_redexes, load_hrs, mark_redexes
from .normalize import flat_nf, long_nf
from .rewrites import rsrc
from .splitting import enumerate_splits, is_empty, merge_bruteforce, split
from .terms import App, Bound, Con, Var, Lam, Seq, Term, mk_app, rule_occurrences, shift, show, spine
from .typecheck import Env, infer
from .typesys import Arrow, Base, Type, uncurry


# ---------------------------------------------------------------------------
# Terms


def _heads(hrs: Hrs, env: Env, ty: Base) -> list[tuple[Term, list[Type]]]:
    out: list[tuple[Term, list[Type]]] = []
    for i, bty in enumerate(env):
        doms, cod = uncurry(bty)
        if cod == ty:
            out.append((Bound(i), doms))
    for name, cty in hrs.consts.items():
        doms, cod = uncurry(cty)
        if cod == ty:
            out.append((Con(name), doms))
    for name, vty in hrs.vars.items():
        doms, cod = uncurry(vty)
        if cod == ty:
            out.append((Var(name), doms))
    return out


def _instance(rng: random.Random, hrs: Hrs, env: Env, ty: Base, size: int) -> Term | None:
    rules = [r for r in hrs.rules.values() if uncurry(r.rule_type)[1] == ty]
    if not rules:
        return None
    rule = rng.choice(rules)
    args = [gen_term(rng, hrs, env, mty, size - 1) for _, mty in rule.metavars]
    return long_nf(mk_app(rule.closed_src, args), hrs.sig, env)


def gen_term(
    rng: random.Random, hrs: Hrs, env: Env, ty: Type, size: int, redex_bias: float = 0.4
) -> Term:
    """A random beta-normal eta-long term of type ``ty`` in ``env``."""
    if isinstance(ty, Arrow):
        return Lam(ty.dom, gen_term(rng, hrs, (ty.dom,) + env, ty.cod, size, redex_bias))
    if size > 0 and rng.random() < redex_bias:
        inst = _instance(rng, hrs, env, ty, size)
        if inst is not None:
            return inst
    heads = _heads(hrs, env, ty)
    if not heads:
        raise ValueError(f"no term of type {ty}")
    if size <= 0:
        leaves = [h for h in heads if not h[1]]
        heads = leaves or sorted(heads, key=lambda h: len(h[1]))[:1]
    head, doms = rng.choice(heads)
    args = [gen_term(rng, hrs, env, d, size - 1, redex_bias) for d in doms]
    return mk_app(head, args)


def base_types(hrs: Hrs) -> list[Base]:
    seen: list[Base] = []
    for ty in list(hrs.consts.values()):
        cod = uncurry(ty)[1]
        if cod not in seen:
            seen.append(cod)  # type: ignore[arg-type]
    return seen


# ---------------------------------------------------------------------------
# Multisteps and rewrites


def gen_multistep(
    rng: random.Random, hrs: Hrs, src: Term, density: float = 0.5, env: Env = ()
) -> Term:
    """Mark a random set of non-overlapping redexes of ``src``."""
    s = long_nf(src, hrs.sig, env)
    chosen = []
    for occ in find_redexes(s, hrs):
        if rng.random() < density:
            try:
                mark_redexes(s, chosen + [occ], hrs)
            except (OverlappingOccurrences, StaleOccurrence):
                continue
            chosen.append(occ)
    return flat_nf(mark_redexes(s, chosen, hrs))


def gen_rewrite(
    rng: random.Random,
    hrs: Hrs,
    src: Term,
    length: int = 2,
    density: float = 0.5,
    env: Env = (),
) -> Term:
    """A random rewrite from ``src``: compositions, abstractions, applications and beta-redexes."""
    src = long_nf(src, hrs.sig, env)
    if length <= 1:
        roll = rng.random()
        if isinstance(src, Lam) and roll < 0.3:
            body = gen_rewrite(rng, hrs, src.body, 1, density, (src.ty,) + env)
            return Lam(src.ty, body, src.hint)
        head, args = spine(src)
        if args and roll < 0.5:
            i = rng.randrange(len(args))
            inner = gen_rewrite(rng, hrs, args[i], rng.choice([1, 2]), density, env)
            if rng.random() < 0.5:
                aty = infer(args[i], hrs.sig, env)
                body = mk_app(
                    shift(head, 1),
                    [Bound(0) if j == i else shift(a, 1) for j, a in enumerate(args)],
                )
                return App(Lam(aty, body, "x"), inner)
            return mk_app(head, [inner if j == i else a for j, a in enumerate(args)])
        return gen_multistep(rng, hrs, src, density, env)
    k = rng.randrange(1, length)
    first = gen_rewrite(rng, hrs, src, k, density, env)
    mid = ftgt(first, hrs)
    return Seq(first, gen_rewrite(rng, hrs, mid, length - k, density, env))


def _has_leaf(hrs: Hrs, ty: Base) -> bool:
    return any(not doms for _, doms in _heads(hrs, (), ty))


def gen_source(rng: random.Random, hrs: Hrs, size: int = 3) -> Term:
    """A closed source term; base types without closed leaves get ``ty -> ty``."""
    ty: Type = rng.choice(base_types(hrs))
    if not _has_leaf(hrs, ty):  # type: ignore[arg-type]
        ty = Arrow(ty, ty)
    return gen_term(rng, hrs, (), ty, size)


def gen_coinitial(
    rng: random.Random, hrs: Hrs, size: int = 3, length: int = 2, density: float = 0.5
) -> tuple[Term, Term]:
    s = gen_source(rng, hrs, size)
    return (
        gen_rewrite(rng, hrs, s, rng.randint(1, length), density),
        gen_rewrite(rng, hrs, s, rng.randint(1, length), density),
    )


def random_split_chain(rng: random.Random, mu: Term, hrs: Hrs, depth: int = 3) -> list[Term]:
    """Break ``mu`` into a chain of flat multisteps by random splits."""
    mu = flat_nf(mu)
    occ = rule_occurrences(mu)
    if depth <= 0 or len(occ) == 0:
        return [mu]
    choices = [rng.choice("LR") for _ in occ]
    m1, m2 = (flat_nf(x) for x in split(mu, choices, hrs))
    if is_empty(m1) or is_empty(m2):
        return [mu]
    return random_split_chain(rng, m1, hrs, depth - 1) + random_split_chain(rng, m2, hrs, depth - 1)


def gen_equivalent(
    rng: random.Random, hrs: Hrs, size: int = 3, density: float = 0.7
) -> tuple[Term, Term]:
    """Two different split chains of the same multistep."""
    mu = gen_multistep(rng, hrs, gen_source(rng, hrs, size), density)
    return as_rewrite(random_split_chain(rng, mu, hrs)), as_rewrite(random_split_chain(rng, mu, hrs))


# ---------------------------------------------------------------------------
# Bounded search over the permutation axioms


def _neighbours(state: FlatRewrite, hrs: Hrs) -> Iterator[FlatRewrite]:
    n = len(state)
    for i, m in enumerate(state):
        if is_empty(m) and n > 1:
            yield state[:i] + state[i + 1 :]
        for _, m1, m2 in enumerate_splits(m, hrs):
            a, b = flat_nf(m1), flat_nf(m2)
            if a != m and b != m:
                yield state[:i] + (a, b) + state[i + 1 :]
    for i in range(n - 1):
        merged = merge_bruteforce(state[i], state[i + 1], hrs)
        if merged is not None:
            yield state[:i] + (merged,) + state[i + 2 :]


def bounded_permeq_search(
    rho: Term, sigma: Term, hrs: Hrs, depth_bound: int = 6, max_states: int = 20000
) -> bool | None:
    """Semi-decide permutation equivalence by bidirectional breadth-first search.

    Both rewrites are flattened with the literal engine; moves split a step
    (non-trivially), merge two adjacent steps, or delete an empty step. Returns True when the
    searches meet within ``depth_bound`` moves, None otherwise.
    """
    a = normal_leaves(rho, hrs)
    b = normal_leaves(sigma, hrs)
    if a == b:
        return True
    seen = [{a: 0}, {b: 0}]
    frontier = [deque([a]), deque([b])]
    levels = [0, 0]
    while levels[0] + levels[1] < depth_bound and (frontier[0] or frontier[1]):
        side = 0 if (levels[0] <= levels[1] and frontier[0]) or not frontier[1] else 1
        nxt: deque[FlatRewrite] = deque()
        for state in frontier[side]:
            for succ in _neighbours(state, hrs):
                if succ in seen[1 - side]:
                    return True
                if succ not in seen[side]:
                    seen[side][succ] = levels[side] + 1
                    nxt.append(succ)
                    if len(seen[0]) + len(seen[1]) > max_states:
                        return None
        frontier[side] = nxt
        levels[side] += 1
    return None


# ---------------------------------------------------------------------------
# Cases


@dataclass
class Case:
    hrs_text: str
    left: str
    right: str
    expect: str  # "equivalent" or "inequivalent"
    seed: int | None = None
    name: str = ""

    @property
    def hrs(self) -> Hrs:
        return load_hrs(self.hrs_text)

    def rewrites(self) -> tuple[Term, Term]:
        h = self.hrs
        return h.parse(self.left), h.parse(self.right)


def dump_case(case: Case) -> str:
    lines = []
    if case.seed is not None:
        lines.append(f"# seed: {case.seed}")
    lines.append(case.hrs_text.rstrip())
    lines.append(f"left : {case.left}.")
    lines.append(f"right : {case.right}.")
    lines.append(f"expect : {case.expect}.")
    return "\n".join(lines) + "\n"


def load_case(text: str, name: str = "") -> Case:
    hrs_lines, fields, seed = [], {}, None
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# seed:"):
            seed = int(line.split(":", 1)[1])
            continue
        key = line.split(" ", 1)[0]
        if key in ("left", "right", "expect"):
            value = line.split(":", 1)[1].strip()
            fields[key] = value[:-1].strip() if value.endswith(".") else value
        else:
            hrs_lines.append(raw)
    missing = {"left", "right", "expect"} - set(fields)
    if missing:
        raise ValueError(f"case {name or '?'} lacks {sorted(missing)}")
    return Case("\n".join(hrs_lines).strip() + "\n", fields["left"], fields["right"], fields["expect"], seed, name)


def load_corpus(directory: str | FsPath) -> list[Case]:
    d = FsPath(directory)
    return [load_case(p.read_text(), p.stem) for p in sorted(d.glob("*.case"))]


def persist_failure(case: Case, directory: str | FsPath) -> FsPath:
    """Write a failing case (with its seed) to the corpus directory."""
    d = FsPath(directory)
    d.mkdir(parents=True, exist_ok=True)
    stem = case.name or f"seed-{case.seed}"
    path = d / f"{stem}.case"
    path.write_text(dump_case(case))
    return path


def make_case(hrs: Hrs, rho: Term, sigma: Term, expect: str, seed: int | None = None) -> Case:
    return Case(dump_hrs(hrs), show(rho), show(sigma), expect, seed)


# ---------------------------------------------------------------------------
# Shrinking


def _smaller_rewrites(rw: Term, hrs: Hrs) -> Iterator[Term]:
    flat = flatten(rw, hrs)
    for k in range(1, len(flat)):
        yield as_rewrite(list(flat[:k]))
    last = flat[-1]
    occs = rule_occurrences(last)
    for idx in range(len(occs)):
        choices = ["L" if j != idx else "R" for j in range(len(occs))]
        first, _ = split(last, choices, hrs)
        yield as_rewrite(list(flat[:-1]) + [flat_nf(first)])


def shrink_candidates(case: Case) -> Iterator[Case]:
    hrs = case.hrs
    rho, sigma = case.rewrites()
    for smaller in _smaller_rewrites(rho, hrs):
        yield Case(case.hrs_text, show(smaller), case.right, case.expect, case.seed, case.name)
    for smaller in _smaller_rewrites(sigma, hrs):
        yield Case(case.hrs_text, case.left, show(smaller), case.expect, case.seed, case.name)


def shrink(case: Case, still_failing: Callable[[Case], bool], rounds: int = 50) -> Case:
    """Greedily replace the case by a smaller one on which ``still_failing`` holds."""
    for _ in range(rounds):
        for cand in shrink_candidates(case):
            if still_failing(cand):
                case = cand
                break
        else:
            return case
    return case


def sources_agree(rewrites: Sequence[Term], hrs: Hrs) -> bool:
    srcs = {flat_nf(rsrc(r, hrs)) for r in rewrites}
    return len(srcs) == 1
