import random
import time

import pytest

from betaeta import products as P
from betaeta import syntax as S
from betaeta.errors import EqualTerms, IllTyped, IndexOutOfRange, Overflow
from betaeta.normalize import decide_eq
from betaeta.numerals import church

from conftest import random_mixed_type

p, q, r = S.atom("p"), S.atom("q"), S.atom("r")
T = S.TERMINAL


def test_measure_base_cases():
    assert P.measure(p) == 2
    assert P.measure(T) == 2
    assert P.measure(p, atom_weight=3) == 3
    with pytest.raises(ValueError):
        P.measure(p, atom_weight=1)


def test_measure_reference_values():
    assert P.measure(S.arrow(p, S.prod(p, p))) == 36
    assert P.measure(S.prod(S.arrow(p, p), S.arrow(p, p))) == 20
    assert P.measure(S.prod(p, T)) == 6


def test_measure_overflow():
    deep = p
    for _ in range(8):
        deep = S.arrow(deep, deep)
    with pytest.raises(Overflow):
        P.measure(deep, bit_budget=1 << 10)


def test_type_nf_reference_rows():
    out = P.type_nf(S.arrow(S.prod(p, p), q))
    assert out.output is S.arrows(p, p, q)
    assert [s.rule for s in out.steps] == ["curryDom"]

    out = P.type_nf(S.arrow(p, T))
    assert out.output is T
    assert [s.rule for s in out.steps] == ["arrT"]

    out = P.type_nf(S.arrow(p, S.prod(q, T)))
    assert out.output is S.arrow(p, q)
    assert [s.rule for s in out.steps] == ["prodT"]


def test_type_nf_measures_decrease():
    rng = random.Random(3)
    for _ in range(200):
        ty = random_mixed_type(rng, 18)
        trace = P.type_nf(ty)
        for step in trace.steps:
            if step.before is not None and step.after is not None:
                assert step.after < step.before


def test_type_nf_strategies_agree():
    rng = random.Random(5)
    for _ in range(200):
        ty = random_mixed_type(rng, 18)
        inner = P.type_nf(ty, "innermost").output
        outer = P.type_nf(ty, "outermost").output
        assert inner is outer
        assert P.is_product_nf(inner)


def test_components_of_left_nested_product():
    ty = S.prod(S.prod(S.arrow(p, p), S.arrow(q, q)), S.arrow(r, r))
    assert P.components_of(ty) == [S.arrow(p, p), S.arrow(q, q), S.arrow(r, r)]


def test_build_iso_identity_when_normal():
    ty = S.arrows(p, p, q)
    iso = P.build_iso(ty)
    assert iso.target is ty
    x = S.fresh_free("x", ty)
    assert decide_eq(iso.forward, S.bind(x, x))


def test_build_iso_terminal_product():
    ty = S.prod(p, T)
    iso = P.build_iso(ty)
    assert iso.target is p
    x = S.fresh_free("x", ty)
    assert decide_eq(iso.forward, S.bind(S.proj1(x), x))
    a = S.fresh_free("a", p)
    assert decide_eq(iso.backward, S.bind(S.pair(a, S.UNIT), a))


def test_build_iso_round_trips():
    rng = random.Random(9)
    for _ in range(15):
        ty = random_mixed_type(rng, 12)
        iso = P.build_iso(ty)
        x = S.fresh_free("x", ty)
        y = S.fresh_free("y", iso.target)
        assert decide_eq(S.bind(S.app(iso.backward, S.app(iso.forward, x)), x),
                         S.bind(x, x))
        assert decide_eq(S.bind(S.app(iso.forward, S.app(iso.backward, y)), y),
                         S.bind(y, y))


def test_split_marker_and_singleton():
    u = S.parse_term("k")
    assert P.split(u) == P.UNIT_MARKER
    one = church(1, 0)
    parts = P.split(one)
    assert len(parts) == 1 and decide_eq(parts[0], one)


def test_split_pair_components():
    t = S.pair(church(1, 0), church(2, 0))
    parts = P.split(t)
    assert len(parts) == 2
    assert decide_eq(parts[0], church(1, 0))
    assert decide_eq(parts[1], church(2, 0))


def test_split_requires_normal_type():
    t = S.parse_term("\\x:p*p. p1 x")
    with pytest.raises(IllTyped):
        P.split(t)


def test_split_components_are_product_free():
    t = S.pair(S.pair(church(1, 0), church(2, 0)), church(0, 0))
    for part in P.split(t):
        assert S.is_product_free(part.ty)


def _subtypes(ty):
    out = {ty}
    if isinstance(ty, S.TyArrow):
        out |= _subtypes(ty.dom) | _subtypes(ty.cod)
    elif isinstance(ty, S.TyProd):
        out |= _subtypes(ty.left) | _subtypes(ty.right)
    return out


def _subterm_types(t):
    out = {t.ty}
    if isinstance(t, S.Lam):
        out |= _subterm_types(t.body)
    elif isinstance(t, S.App):
        out |= _subterm_types(t.fun) | _subterm_types(t.arg)
    elif isinstance(t, S.Pair):
        out |= _subterm_types(t.fst) | _subterm_types(t.snd)
    elif isinstance(t, (S.Proj1, S.Proj2)):
        out |= _subterm_types(t.arg)
    return out


def test_split_subformula_discipline():
    # every subterm of a component lives at a subtype of the normal form
    t = S.pair(S.pair(church(1, 0), church(2, 0)), church(0, 0))
    allowed = _subtypes(t.ty)
    for part in P.split(t):
        assert _subterm_types(part) <= allowed


def test_split_lengths_agree_for_same_type():
    a = S.parse_term("\\x:p*p. <p1 x, p2 x>")
    b = S.parse_term("\\x:p*p. <p2 x, p1 x>")
    iso = P.build_iso(a.ty)
    assert len(P.split(S.app(iso.forward, a))) == len(P.split(S.app(iso.forward, b)))


def test_differing_component_swap_pair():
    a = S.parse_term("\\x:p*p. <p1 x, p2 x>")
    b = S.parse_term("\\x:p*p. <p2 x, p1 x>")
    iso = P.build_iso(a.ty)
    assert P.differing_component(a, b, iso) == 1


def test_differing_component_product_free():
    iso = P.build_iso(church(1, 0).ty)
    assert P.differing_component(church(1, 0), church(2, 0), iso) == 1


def test_differing_component_equal_raises():
    iso = P.build_iso(church(1, 0).ty)
    with pytest.raises(EqualTerms):
        P.differing_component(church(1, 0), church(1, 0), iso)


def test_projector_shapes():
    ty1 = S.arrow(p, p)
    assert decide_eq(P.projector(1, 1, ty1), S.parse_term("\\x:p->p. x"))
    ty3 = S.prod(S.prod(S.arrow(p, p), S.arrow(p, p)), S.arrow(p, p))
    pr3 = P.projector(3, 3, ty3)
    x = S.fresh_free("x", ty3)
    assert pr3 is S.bind(S.proj2(x), x)
    pr1 = P.projector(3, 1, ty3)
    assert pr1 is S.bind(S.proj1(S.proj1(x)), x)
    with pytest.raises(IndexOutOfRange):
        P.projector(3, 4, ty3)


def test_separate_prod_swap_pair():
    a = S.parse_term("\\x:p*p. <p1 x, p2 x>")
    b = S.parse_term("\\x:p*p. <p2 x, p1 x>")
    cert = P.separate_prod(a, b)
    assert cert.component == 1
    assert cert.n_components == 2
    assert P.verify_product(cert)


def test_separate_prod_degenerate_product_free():
    cert = P.separate_prod(church(1, 0), church(2, 0))
    assert cert.n_components == 1
    assert P.verify_product(cert)


def test_separate_prod_equal_raises():
    with pytest.raises(EqualTerms):
        P.separate_prod(church(1, 0), church(1, 0))
    a = S.parse_term("\\x:p*p. <p1 x, p2 x>")
    ident = S.parse_term("\\x:p*p. x")
    with pytest.raises(EqualTerms):
        P.separate_prod(a, ident)


def test_separate_prod_rejects_open_terms():
    with pytest.raises(IllTyped):
        P.separate_prod(S.free("x", S.prod(p, p)), S.free("x", S.prod(p, p)))


def test_verify_product_detects_component_tampering():
    a = S.parse_term("\\x:p*p. <p1 x, p2 x>")
    b = S.parse_term("\\x:p*p. <p2 x, p1 x>")
    cert = P.separate_prod(a, b)
    cert.component = 2
    try:
        ok = P.verify_product(cert)
    except IllTyped:
        ok = False
    assert not ok
