import random

import pytest

from hrsproof.errors import NotCoinitial, NotCompatible
from hrsproof.flattening import flatten, fsrc, ftgt
from hrsproof.normalize import etalong_nf, flat_nf, long_nf
from hrsproof.projection import (
    compatibilize,
    compatible,
    cube_check,
    decide_permeq,
    project,
    project_flat,
    project_ms,
    weak_project,
)
from hrsproof.splitting import enumerate_splits, is_empty
from hrsproof.standardization import decide_permeq_std
from hrsproof.terms import Seq, mk_seq, show
from hrsproof.testkit import gen_coinitial, gen_multistep, gen_rewrite, gen_source

from conftest import seeded

R1 = r"mu (\x. theta x) ; rho (\x. g x)"
R2 = r"rho (\x. f x) ; f (mu (\x. theta x)) ; theta (mu (\x. g x))"


def test_compatibility_judgment(mu):
    assert compatible(mu.parse(r"(\y. mu (\x. y x)) theta"), mu.parse(r"rho (\x. f x)"), mu)
    assert compatible(mu.parse("f (mu f)"), mu.parse("f (mu f)"), mu)
    assert not compatible(mu.parse("rho f"), mu.parse("theta (mu f)"), mu)


def test_weak_projection_example(mu):
    xi = weak_project(mu.parse(r"(\y. mu (\x. y x)) theta"), mu.parse(r"rho (\x. f x)"), mu)
    assert xi == mu.parse(r"(\y. y (mu (\x. y x))) theta")
    assert weak_project(mu.parse("rho g"), mu.parse("rho g"), mu) == mu.parse(r"(\x. x (mu (\y. x y))) g")
    with pytest.raises(NotCompatible):
        weak_project(mu.parse("rho g"), mu.parse("theta (mu g)"), mu)


def test_compatibilize_lines_up_rules(mu):
    a, b = compatibilize(mu.parse("mu theta"), mu.parse("rho f"), mu)
    assert compatible(a, b, mu)
    assert flat_nf(a) == mu.parse("mu theta") and flat_nf(b) == mu.parse("rho f")
    with pytest.raises(NotCoinitial):
        compatibilize(mu.parse("rho f"), mu.parse("rho g"), mu)


def test_projection_examples(mu):
    assert project_ms(mu.parse(r"\x. (\y. f y) x"), mu.parse(r"\x. theta x"), mu) == mu.parse("g")
    m = mu.parse("rho theta")
    assert project_ms(m, m, mu) == ftgt(m, mu)
    assert project_ms(m, fsrc(m, mu), mu) == flat_nf(m)
    assert project_ms(fsrc(m, mu), m, mu) == ftgt(m, mu)


def test_recursion_pair_is_equivalent(mu):
    r1, r2 = mu.parse(R1), mu.parse(R2)
    assert all(is_empty(m) for m in project(r1, r2, mu))
    assert all(is_empty(m) for m in project(r2, r1, mu))
    v = decide_permeq(r1, r2, mu)
    assert v.equivalent and v.witnesses == ()


def test_single_steps_are_inequivalent(mu):
    v = decide_permeq(mu.parse(r"mu (\x. theta x)"), mu.parse(r"rho (\x. f x)"), mu)
    assert not v.equivalent
    assert {w.direction for w in v.witnesses} == {"left//right", "right//left"}
    assert [show(w.step) for w in v.witnesses] == ["theta (mu theta)", "rho g"]


def test_non_coinitial_rejected(mu):
    with pytest.raises(NotCoinitial):
        decide_permeq(mu.parse("rho f"), mu.parse("rho g"), mu)
    with pytest.raises(NotCoinitial):
        project_flat((mu.parse("rho f"),), (mu.parse("theta (mu g)"),), mu)


def test_flat_projection_of_sources(mu):
    rho = flatten(mu.parse(R1), mu)
    src = (fsrc(rho[0], mu),)
    assert project_flat(rho, src, mu) == rho
    assert project_flat(src, rho, mu) == (ftgt(rho[-1], mu),)


def test_projection_is_representative_independent_and_coherent():
    for _, rng, hrs in seeded(60):
        s = gen_source(rng, hrs, 3)
        m, n = gen_multistep(rng, hrs, s, 0.6), gen_multistep(rng, hrs, s, 0.6)
        base = project_ms(m, n, hrs)
        assert project_ms(m, n, hrs, reverse=True) == base
        for rep in (long_nf(m, hrs.sig), etalong_nf(m, hrs.sig)):
            assert project_ms(rep, n, hrs) == base


def test_self_erasure_and_generalization():
    for _, rng, hrs in seeded(60):
        s = gen_source(rng, hrs, 3)
        rho = gen_rewrite(rng, hrs, s, 3)
        assert all(is_empty(m) for m in project(rho, rho, hrs))
        m, n = gen_multistep(rng, hrs, s, 0.6), gen_multistep(rng, hrs, s, 0.6)
        assert project_flat((m,), (n,), hrs) == (project_ms(m, n, hrs),)


def test_projection_of_splittings():
    for _, rng, hrs in seeded(40):
        s = gen_source(rng, hrs, 3)
        m1 = gen_multistep(rng, hrs, s, 0.7)
        rho = flatten(gen_rewrite(rng, hrs, s, 2), hrs)
        for _, a, b in enumerate_splits(m1, hrs):
            a, b = flat_nf(a), flat_nf(b)
            assert project_flat(rho, (m1,), hrs) == project_flat(project_flat(rho, (a,), hrs), (b,), hrs)


def test_sequence_laws():
    for _, rng, hrs in seeded(40):
        s = gen_source(rng, hrs, 3)
        rho = flatten(gen_rewrite(rng, hrs, s, 3), hrs)
        sigma = flatten(gen_rewrite(rng, hrs, s, 3), hrs)
        k = rng.randrange(1, len(rho) + 1) if len(rho) > 1 else 1
        r1, r2 = rho[:k], rho[k:]
        if r2:
            lhs = project_flat(rho, sigma, hrs)
            rhs = project_flat(r1, sigma, hrs) + project_flat(r2, project_flat(sigma, r1, hrs), hrs)
            assert lhs == rhs
        j = rng.randrange(1, len(sigma) + 1) if len(sigma) > 1 else 1
        s1, s2 = sigma[:j], sigma[j:]
        if s2:
            assert project_flat(rho, sigma, hrs) == project_flat(project_flat(rho, s1, hrs), s2, hrs)


def test_cube_on_fixture_permutations(mu):
    ms = [mu.parse(t) for t in ("rho theta", "mu theta", "rho f", "mu f")]
    for a in ms:
        for b in ms:
            for c in ms:
                assert cube_check(a, b, c, mu)


def test_congruence():
    for _, rng, hrs in seeded(40):
        s = gen_source(rng, hrs, 3)
        m = gen_multistep(rng, hrs, s, 0.7)
        chains = []
        for _ in range(2):
            splits = list(enumerate_splits(m, hrs))
            _, a, b = rng.choice(splits)
            chains.append(Seq(a, b))
        tau = gen_rewrite(rng, hrs, s, 2)
        assert decide_permeq(*chains, hrs)
        assert project(tau, chains[0], hrs) == project(tau, chains[1], hrs)
        assert decide_permeq(mk_seq(list(project(chains[0], tau, hrs))), mk_seq(list(project(chains[1], tau, hrs))), hrs)


def test_agrees_with_standardization():
    for _, rng, hrs in seeded(60):
        a, b = gen_coinitial(rng, hrs, 3, 3)
        assert decide_permeq(a, b, hrs).equivalent == decide_permeq_std(a, b, hrs).equivalent
