import pytest

from hrsproof.errors import NonComposable, TypeMismatch
from hrsproof.normalize import beq, flat_nf
from hrsproof.rewrites import check_rewrite, refl, rsrc, rtgt, subrr, subt, subtr
from hrsproof.terms import App, Con, Rule, show
from hrsproof.typesys import Base

O = Base("o")


def test_judgment_of_rule_application(mu):
    j = check_rewrite(None, mu.parse("rho theta"), mu)
    assert show(flat_nf(j.src)) == "mu f"
    assert show(flat_nf(j.tgt)) == "g (mu g)"
    assert j.ty == O


def test_composition_checks_endpoints_modulo_beta_eta(mu):
    check_rewrite(None, mu.parse(r"mu (\x. theta x) ; rho (\x. g x)"), mu)
    with pytest.raises(NonComposable):
        check_rewrite(None, mu.parse("rho f ; rho f"), mu)


def test_ill_typed_rewrite(mu):
    with pytest.raises(TypeMismatch):
        mu.parse("mu rho")
    with pytest.raises(TypeMismatch):
        check_rewrite(None, App(Con("f"), Con("f")), mu)


def test_refl_is_the_term():
    assert refl(Con("c")) == Con("c")
    with pytest.raises(ValueError):
        refl(Rule("rho"))


def test_endpoints_of_composition(mu):
    rw = mu.parse(r"mu (\x. theta x) ; rho (\x. g x)")
    assert show(flat_nf(rsrc(rw, mu))) == "mu f"
    assert show(flat_nf(rtgt(rw, mu))) == "g (mu g)"


def test_substitutions(mu):
    ctx = {"x": O}
    mu.vars["x"] = O
    try:
        body = mu.parse("f x")
        step = mu.parse("theta (mu f)")
        assert show(subt(body, "x", mu.parse("mu f"))) == "f (mu f)"
        assert show(subtr(body, "x", step)) == "f (theta (mu f))"
        both = subrr(mu.parse("theta x"), "x", step, mu)
        check_rewrite(ctx, both, mu)
        assert beq(rsrc(both, mu), mu.parse("f (f (mu f))"))
        assert beq(rtgt(both, mu), mu.parse("g (g (mu f))"))
    finally:
        del mu.vars["x"]
