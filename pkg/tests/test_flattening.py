import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrsproof.flattening import (
    STRUCTURAL,
    as_rewrite,
    flatten,
    flatten_noeta,
    fsrc,
    ftgt,
    normal_leaves,
    reduce_traced,
    show_flat,
)
from hrsproof.normalize import flat_nf
from hrsproof.terms import Seq

from conftest import load_fixture
from hrsproof.testkit import gen_rewrite, gen_source

SYSTEMS = ["mu", "dup", "erase", "cd", "std"]


def _rewrite(seed, name, length=3):
    hrs = load_fixture(name)
    rng = random.Random(seed)
    return hrs, gen_rewrite(rng, hrs, gen_source(rng, hrs, 3), length)


def test_duplicated_composition(cd):
    assert show_flat(flatten(cd.parse(r"(\x. (x ; x)) rho"), cd)) == "c ; rho"


def test_compositions_under_binders(mu):
    flat = flatten(mu.parse(r"mu (\x. theta x) ; rho (\x. g x)"), mu)
    assert flat == (mu.parse("mu theta"), mu.parse("rho g"))


def test_without_eta(mu):
    rw = mu.parse(r"mu (\x. (theta x ; g x))")
    assert show_flat(flatten_noeta(rw, mu)) == "mu (\\x. theta x) ; mu (\\x. g x)"
    assert show_flat(flatten(rw, mu)) == "mu theta ; mu g"


def test_trace_of_duplicated_composition(cd):
    nf, trace = reduce_traced(cd.parse(r"(\x. (x ; x)) rho"), cd)
    assert [s.rule for s in trace][0] == "Abs"
    assert normal_leaves(cd.parse(r"(\x. (x ; x)) rho"), cd) == flatten(cd.parse(r"(\x. (x ; x)) rho"), cd)


@pytest.mark.parametrize("strategy", ["default", "outermost", "innermost"])
def test_strategies_agree_on_examples(mu, strategy):
    rw = mu.parse(r"(\y. y ; \x. g x) (mu (\x. theta x) ; rho (\x. g x))")
    assert normal_leaves(rw, mu, strategy) == flatten(rw, mu)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(SYSTEMS))
def test_strategy_independence(seed, name):
    hrs, rw = _rewrite(seed, name)
    expected = flatten(rw, hrs)
    for strategy in ("default", "outermost", "innermost"):
        assert normal_leaves(rw, hrs, strategy) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(SYSTEMS), st.sampled_from(["default", "innermost"]))
def test_structural_steps_decrease_measure(seed, name, strategy):
    hrs, rw = _rewrite(seed, name)
    _, trace = reduce_traced(rw, hrs, strategy)
    for s in trace:
        if s.rule in STRUCTURAL:
            assert s.after < s.before, s


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(SYSTEMS))
def test_flatten_is_a_homomorphism_and_keeps_endpoints(seed, name):
    hrs, rw = _rewrite(seed, name)
    rng = random.Random(seed + 1)
    other = gen_rewrite(rng, hrs, ftgt(rw, hrs), 2)
    assert flatten(Seq(rw, other), hrs) == flatten(rw, hrs) + flatten(other, hrs)
    flat = flatten(rw, hrs)
    assert fsrc(as_rewrite(flat), hrs) == fsrc(rw, hrs)
    assert ftgt(as_rewrite(flat), hrs) == ftgt(rw, hrs)
    assert tuple(flat_nf(m) for m in flatten_noeta(rw, hrs)) == flat
    for a, b in zip(flat, flat[1:]):
        assert ftgt(a, hrs) == fsrc(b, hrs)
