"""Sequential rewrites and standardization by the Del and Pull rules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import BudgetExceeded, NotCoinitial
from .flattening import FlatRewrite, flatten, fsrc, ftgt
from .hrs import Hrs
from .normalize import flat_nf
from .projection import Verdict, Witness, decide_permeq
from .rewrites import check_rewrite
from .splitting import UNFOLD_BUDGET, depth, enumerate_splits, is_empty, merge
from .terms import Term, show

STANDARDIZE_BUDGET = 10**4


@dataclass(frozen=True)
class SequentialRewrite:
    """Flat multisteps followed by a unit (rule-free) terminator."""

    steps: tuple[Term, ...]
    terminator: Term

    def __post_init__(self) -> None:
        if not is_empty(self.terminator):
            raise ValueError("the terminator must be rule-free")

    def __len__(self) -> int:
        return len(self.steps)

    def flat(self) -> FlatRewrite:
        return self.steps + (self.terminator,)

    def __str__(self) -> str:
        return " ; ".join([show(m) for m in self.steps] + [f"refl ({show(self.terminator)})"])


SRMeasure = tuple[int, tuple[int, ...]]


def sequentialize(rho: Sequence[Term] | SequentialRewrite, hrs: Hrs) -> SequentialRewrite:
    """Append the target of the last step as terminator."""
    if isinstance(rho, SequentialRewrite):
        return rho
    steps = tuple(rho)
    if not steps:
        raise ValueError("empty flat rewrite")
    return SequentialRewrite(steps, ftgt(steps[-1], hrs))


def del_step(s: SequentialRewrite) -> SequentialRewrite | None:
    for i, m in enumerate(s.steps):
        if is_empty(m):
            return SequentialRewrite(s.steps[:i] + s.steps[i + 1 :], s.terminator)
    return None


def _pull_at(mu1: Term, mu23: Term, hrs: Hrs) -> tuple[Term, Term] | None:
    splits = list(enumerate_splits(mu23, hrs))
    order = sorted(range(len(splits)), key=lambda k: (-list(splits[k][0].values()).count("L"), k))
    for k in order:
        _, c1, c2 = splits[k]
        c1 = flat_nf(c1)
        if is_empty(c1):
            continue
        merged = merge(mu1, c1, hrs)
        if merged is not None:
            return merged, flat_nf(c2)
    return None


def pull_step(s: SequentialRewrite, hrs: Hrs) -> SequentialRewrite | None:
    """Anticipate work of a step into its predecessor (leftmost pair, maximal L)."""
    steps = s.steps
    for i in range(len(steps) - 1):
        hit = _pull_at(steps[i], steps[i + 1], hrs)
        if hit is not None:
            return SequentialRewrite(steps[:i] + hit + steps[i + 2 :], s.terminator)
    return None


def successors(s: SequentialRewrite, hrs: Hrs) -> list[tuple[str, SequentialRewrite]]:
    """Every one-step Del or Pull reduct, not only the one the strategy picks."""
    out: list[tuple[str, SequentialRewrite]] = []
    steps = s.steps
    for i, m in enumerate(steps):
        if is_empty(m):
            out.append(("Del", SequentialRewrite(steps[:i] + steps[i + 1 :], s.terminator)))
    for i in range(len(steps) - 1):
        for _, c1, c2 in enumerate_splits(steps[i + 1], hrs):
            c1 = flat_nf(c1)
            if is_empty(c1):
                continue
            merged = merge(steps[i], c1, hrs)
            if merged is not None:
                new = steps[:i] + (merged, flat_nf(c2)) + steps[i + 2 :]
                out.append(("Pull", SequentialRewrite(new, s.terminator)))
    return out


def sr_measure(s: SequentialRewrite, hrs: Hrs, budget: int = UNFOLD_BUDGET) -> SRMeasure:
    """Length first, then the step depths from last to first."""
    depths = []
    for i, m in enumerate(s.steps):
        d = depth(m, hrs, budget)
        if d is None:
            raise BudgetExceeded(f"depth of step {i} exceeds {budget}", index=i, step=show(m))
        depths.append(d)
    return len(s.steps), tuple(reversed(depths))


@dataclass(frozen=True)
class TraceEntry:
    rule: str
    result: SequentialRewrite
    before: SRMeasure | None = None
    after: SRMeasure | None = None


@dataclass
class Standardization:
    result: SequentialRewrite
    trace: list[TraceEntry] = field(default_factory=list)


def standardize_step(s: SequentialRewrite, hrs: Hrs) -> tuple[str, SequentialRewrite] | None:
    nxt = del_step(s)
    if nxt is not None:
        return "Del", nxt
    nxt = pull_step(s, hrs)
    if nxt is not None:
        return "Pull", nxt
    return None


def standardize_traced(
    rw: Term | SequentialRewrite,
    hrs: Hrs,
    budget: int = STANDARDIZE_BUDGET,
    depth_budget: int = UNFOLD_BUDGET,
    measure: bool = False,
) -> Standardization:
    """Run Del (first) and Pull to a normal form.

    Every step is first probed for a finite unfolding depth; a step whose
    depth exceeds ``depth_budget`` makes the run fail with BudgetExceeded.
    """
    cur = rw if isinstance(rw, SequentialRewrite) else sequentialize(flatten(rw, hrs), hrs)
    for i, m in enumerate(cur.steps):
        if depth(m, hrs, depth_budget) is None:
            raise BudgetExceeded(
                "finiteness condition fails: a step has unbounded unfoldings",
                index=i,
                step=show(m),
            )
    out = Standardization(cur)
    for _ in range(budget):
        fired = standardize_step(cur, hrs)
        if fired is None:
            out.result = cur
            return out
        rule, nxt = fired
        if measure:
            before, after = sr_measure(cur, hrs, depth_budget), sr_measure(nxt, hrs, depth_budget)
            out.trace.append(TraceEntry(rule, nxt, before, after))
        else:
            out.trace.append(TraceEntry(rule, nxt))
        cur = nxt
    raise BudgetExceeded(
        f"standardization did not finish within {budget} steps",
        steps=budget,
        current=str(cur),
    )


def standardize(
    rw: Term | SequentialRewrite, hrs: Hrs, budget: int = STANDARDIZE_BUDGET
) -> SequentialRewrite:
    return standardize_traced(rw, hrs, budget).result


def strong_equiv(s1: SequentialRewrite, s2: SequentialRewrite, hrs: Hrs) -> bool:
    """Equal length, equal terminators and componentwise permutation equivalence."""
    if len(s1) != len(s2) or s1.terminator != s2.terminator:
        return False
    for a, b in zip(s1.steps, s2.steps):
        try:
            if not decide_permeq(a, b, hrs):
                return False
        except NotCoinitial:
            return False
    return True


def decide_permeq_std(
    rho: Term, sigma: Term, hrs: Hrs, budget: int = STANDARDIZE_BUDGET, ctx=None
) -> Verdict:
    """Permutation equivalence via strong equivalence of standard forms."""
    check_rewrite(ctx, rho, hrs)
    check_rewrite(ctx, sigma, hrs)
    a, b = fsrc(rho, hrs), fsrc(sigma, hrs)
    if a != b:
        raise NotCoinitial(f"sources {show(a)} and {show(b)} differ")
    s1, s2 = standardize(rho, hrs, budget), standardize(sigma, hrs, budget)
    if strong_equiv(s1, s2, hrs):
        return Verdict(True)
    wit = [Witness("left", i, m) for i, m in enumerate(s1.flat())]
    wit += [Witness("right", i, m) for i, m in enumerate(s2.flat())]
    return Verdict(False, tuple(wit))
