"""The seven acceptance criteria, each timed against its limit."""

import random
import time
from contextlib import contextmanager

import pytest

from hrsproof.errors import BudgetExceeded, NotCoinitial
from hrsproof.flattening import (
    STRUCTURAL,
    as_rewrite,
    flatten,
    fsrc,
    ftgt,
    normal_leaves,
    reduce_traced,
    show_flat,
)
from hrsproof.hrs import Hrs
from hrsproof.normalize import flat_nf
from hrsproof.projection import cube_check, decide_permeq, project, project_flat, project_ms
from hrsproof.splitting import is_empty, split, unfold
from hrsproof.standardization import (
    decide_permeq_std,
    sequentialize,
    standardize,
    standardize_traced,
    strong_equiv,
    successors,
)
from hrsproof.terms import App, Lam, Seq, abstract, mk_seq
from hrsproof.testkit import (
    base_types,
    bounded_permeq_search,
    gen_coinitial,
    gen_equivalent,
    gen_multistep,
    gen_rewrite,
    gen_source,
    gen_term,
    load_corpus,
)
from hrsproof.typecheck import infer
from hrsproof.typesys import Arrow

from conftest import FIXTURES, ORTHOGONAL, load_fixture, seeded

R1 = r"mu (\x. theta x) ; rho (\x. g x)"
R2 = r"rho (\x. f x) ; f (mu (\x. theta x)) ; theta (mu (\x. g x))"


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(n: int, limit: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            if elapsed > limit:
                ok = False
            with capsys.disabled():
                verdict = "PASS" if ok else "FAIL"
                print(f"\n{verdict} criterion {n} ({elapsed:.2f}s, limit {limit:.0f}s)")
        assert elapsed <= limit, f"criterion {n} took {elapsed:.1f}s"

    return run


def test_criterion_1_worked_examples(criterion, cd, mu, std, erase):
    with criterion(1, 5):
        assert show_flat(flatten(cd.parse(r"(\x. (x ; x)) rho"), cd)) == "c ; rho"
        assert flatten(mu.parse(R1), mu) == (mu.parse("mu theta"), mu.parse("rho g"))
        m1, m2 = split(mu.parse("rho theta"), "RL", mu)
        assert m1 == mu.parse(r"(\x. mu (\y. x y)) theta")
        assert m2 == mu.parse(r"rho (\x. g x)")
        assert project_ms(mu.parse(r"\x. (\x. f x) x"), mu.parse(r"\x. theta x"), mu) == mu.parse("g")
        r1, r2 = mu.parse(R1), mu.parse(R2)
        assert decide_permeq(r1, r2, mu) and decide_permeq_std(r1, r2, mu)
        run = standardize_traced(std.parse("d (varrho f) ; d vartheta ; varrho g"), std)
        assert [e.rule for e in run.trace] == ["Pull", "Del", "Pull"]
        res = run.result
        assert res.steps == (std.parse("varrho (varrho f)"), std.parse(r"\x. vartheta (vartheta x)"))
        assert is_empty(res.terminator)
        a = standardize(erase.parse("varrho vartheta"), erase)
        b = standardize(erase.parse("varrho e"), erase)
        assert strong_equiv(a, b, erase)


def _with_free_var(hrs: Hrs, ty) -> Hrs:
    return Hrs(dict(hrs.consts), dict(hrs.rules), {**hrs.vars, "x0": ty})


def test_criterion_2_residual_laws(criterion):
    n = 500
    with criterion(2, 120):
        for _, rng, hrs in seeded(n):
            s = gen_source(rng, hrs, 3)
            m, v, xi = (gen_multistep(rng, hrs, s, 0.6) for _ in range(3))
            src, tgt = fsrc(m, hrs), ftgt(m, hrs)
            assert project_ms(m, m, hrs) == tgt
            assert project_ms(m, src, hrs) == flat_nf(m)
            assert project_ms(src, m, hrs) == tgt
            assert cube_check(m, v, xi, hrs)
            rho = flatten(gen_rewrite(rng, hrs, s, 3), hrs)
            sigma = flatten(gen_rewrite(rng, hrs, s, 3), hrs)
            assert len(project_flat(rho, sigma, hrs)) == len(rho)

        # abstraction: a free variable x0 is bound on both sides
        for _, rng, hrs in seeded(n):
            ty = rng.choice(base_types(hrs))
            hx = _with_free_var(hrs, ty)
            s = gen_term(rng, hx, (), infer(gen_source(rng, hrs, 1), hrs.sig), 3)
            m, v = gen_multistep(rng, hx, s, 0.6), gen_multistep(rng, hx, s, 0.6)
            lm, lv = Lam(ty, abstract(m, "x0"), "x"), Lam(ty, abstract(v, "x0"), "x")
            expected = flat_nf(Lam(ty, abstract(project_ms(m, v, hx), "x0"), "x"))
            assert project_ms(lm, lv, hrs) == expected

        # application: a function-typed pair applied to an argument pair
        for _, rng, hrs in seeded(n):
            arg = gen_source(rng, hrs, 2)
            aty = infer(arg, hrs.sig)
            cod = infer(gen_source(rng, hrs, 1), hrs.sig)
            fun = gen_term(rng, hrs, (), Arrow(aty, cod), 3)
            m1, v1 = gen_multistep(rng, hrs, fun, 0.6), gen_multistep(rng, hrs, fun, 0.6)
            m2, v2 = gen_multistep(rng, hrs, arg, 0.6), gen_multistep(rng, hrs, arg, 0.6)
            expected = flat_nf(App(project_ms(m1, v1, hrs), project_ms(m2, v2, hrs)))
            assert project_ms(App(m1, m2), App(v1, v2), hrs) == expected


def test_criterion_3_flattening(criterion):
    names = ORTHOGONAL + ["std"]
    with criterion(3, 120):
        for _, rng, hrs in seeded(500, names):
            s = gen_source(rng, hrs, 3)
            rw = gen_rewrite(rng, hrs, s, 3)
            flat = flatten(rw, hrs)
            for strategy in ("default", "outermost", "innermost"):
                assert normal_leaves(rw, hrs, strategy) == flat
            _, trace = reduce_traced(rw, hrs, rng.choice(["default", "innermost"]))
            for st in trace:
                if st.rule in STRUCTURAL:
                    assert st.after < st.before
            other = gen_rewrite(rng, hrs, ftgt(rw, hrs), 2)
            assert flatten(Seq(rw, other), hrs) == flat + flatten(other, hrs)
            assert fsrc(as_rewrite(flat), hrs) == fsrc(rw, hrs)
            assert ftgt(as_rewrite(flat), hrs) == ftgt(rw, hrs)


def _pairs(n: int):
    """Coinitial pairs: random, split-equivalent, and permuted."""
    for seed, rng, hrs in seeded(n):
        kind = seed % 3
        if kind == 0:
            a, b = gen_coinitial(rng, hrs, 3, 3)
        elif kind == 1:
            a, b = gen_equivalent(rng, hrs)
        else:
            s = gen_source(rng, hrs, 3)
            r = flatten(gen_rewrite(rng, hrs, s, 2), hrs)
            t = flatten(gen_rewrite(rng, hrs, s, 2), hrs)
            a = mk_seq(list(r + project_flat(t, r, hrs)))
            b = mk_seq(list(t + project_flat(r, t, hrs)))
        yield rng, hrs, a, b


def test_criterion_4_equivalence(criterion):
    stats = {"equivalent": 0, "searched": 0}
    with criterion(4, 300):
        for rng, hrs, a, b in _pairs(300):
            v = decide_permeq(a, b, hrs)
            assert v.equivalent == decide_permeq_std(a, b, hrs).equivalent
            if bounded_permeq_search(a, b, hrs, 6, max_states=4000):
                stats["searched"] += 1
                assert v.equivalent
            if v.equivalent:
                stats["equivalent"] += 1
                tau = gen_rewrite(rng, hrs, fsrc(a, hrs), 2)
                assert project(tau, a, hrs) == project(tau, b, hrs)
                assert decide_permeq(as_rewrite(project(a, tau, hrs)), as_rewrite(project(b, tau, hrs)), hrs)
    assert stats["equivalent"] >= 100 and stats["searched"] >= 50, stats


def test_criterion_5_permutation_law(criterion):
    with criterion(5, 120):
        for _, rng, hrs in seeded(300):
            s = gen_source(rng, hrs, 3)
            r = flatten(gen_rewrite(rng, hrs, s, 3), hrs)
            t = flatten(gen_rewrite(rng, hrs, s, 3), hrs)
            left = mk_seq(list(r + project_flat(t, r, hrs)))
            right = mk_seq(list(t + project_flat(r, t, hrs)))
            assert decide_permeq(left, right, hrs)


def test_criterion_6_standardization(criterion):
    with criterion(6, 180):
        fired = 0
        for case in load_corpus(FIXTURES / "corpus"):
            for rw in case.rewrites():
                run = standardize_traced(rw, case.hrs, measure=True)
                for e in run.trace:
                    fired += 1
                    assert e.after < e.before, (case.name, e.rule)
        assert fired > 0
        peaks = 0
        for _, rng, hrs in seeded(400):
            if peaks == 100:
                break
            s = sequentialize(flatten(gen_rewrite(rng, hrs, gen_source(rng, hrs, 2), 3), hrs), hrs)
            succ = successors(s, hrs)
            if len(succ) < 2:
                continue
            (_, t1), (_, t2) = rng.sample(succ, 2)
            assert strong_equiv(standardize(t1, hrs), standardize(t2, hrs), hrs)
            peaks += 1
        assert peaks == 100
        for _, rng, hrs in seeded(100):
            std = standardize(gen_rewrite(rng, hrs, gen_source(rng, hrs, 3), 3), hrs)
            assert strong_equiv(standardize(std, hrs), std, hrs)


def test_criterion_7_robustness(criterion, mu, omega, cd):
    with criterion(7, 60):
        with pytest.raises(NotCoinitial):
            decide_permeq(mu.parse("rho f"), mu.parse("rho g"), mu)
        with pytest.raises(NotCoinitial):
            decide_permeq_std(mu.parse("rho f"), mu.parse("theta (mu g)"), mu)
        with pytest.raises(BudgetExceeded):
            unfold(omega.parse("theta c"), omega)
        with pytest.raises(BudgetExceeded):
            standardize(omega.parse("theta c"), omega)
        flat = flatten(cd.parse(r"(\x. c) rho"), cd)
        assert all(is_empty(m) for m in flat)
