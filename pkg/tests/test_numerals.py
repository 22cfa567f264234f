import pytest

from betaeta import numerals as N
from betaeta import syntax as S
from betaeta.errors import LevelTooSmall, SideConditionViolated
from betaeta.normalize import beta_nf, decide_eq, long_nf

p = S.atom("p")


def test_church_zero_shape():
    assert N.church(0, 0) is S.parse_term("\\x:p->p. \\y:p. y")


def test_church_two_shape():
    assert N.church(2, 0) is S.parse_term("\\x:p->p. \\y:p. x (x y)")


def test_church_type_is_numeral_type():
    assert N.church(5, 3).ty is S.numeral_type(3)
    assert N.church(5, 3).ty is S.tower_type(5)


def test_cond_selects_on_zero():
    for n in (0, 1, 2):
        want = N.church(4, 1) if n == 0 else N.church(5, 1)
        got = S.apps(N.cond(1), N.church(n, 1), N.church(4, 1), N.church(5, 1))
        assert decide_eq(got, want)


def test_lower_drops_one_level():
    assert decide_eq(S.app(N.lower(0), N.church(3, 1)), N.church(3, 0))


def test_expo_computes_powers():
    got = S.apps(N.expo(0), N.church(2, 1), N.church(3, 1))
    assert decide_eq(got, N.church(9, 0))


def test_add_and_mul():
    assert decide_eq(S.apps(N.add(1), N.church(2, 1), N.church(3, 1)), N.church(5, 1))
    assert decide_eq(S.apps(N.mul(1), N.church(2, 1), N.church(3, 1)), N.church(6, 1))


def test_pairing_laws():
    for a, b in ((0, 0), (1, 2), (3, 1)):
        packed = S.apps(N.pairing(0), N.church(a, 0), N.church(b, 0))
        assert decide_eq(S.app(N.proj_first(0), packed), N.church(a, 0))
        assert decide_eq(S.app(N.proj_second(0), packed), N.church(b, 0))


def test_pred_decrements_and_sticks_at_zero():
    assert decide_eq(S.app(N.pred(0), N.church(4, 3)), N.church(3, 0))
    assert decide_eq(S.app(N.pred(0), N.church(0, 3)), N.church(0, 0))


def test_raise_on_zero_and_one():
    assert decide_eq(S.app(N.raise_one(3), N.church(0, 2)), N.church(0, 3))
    assert decide_eq(S.app(N.raise_one(3), N.church(1, 2)), N.church(1, 3))


def test_raise_requires_eta():
    # without any eta steps the raised zero is not syntactically the
    # next-level zero, although the two are provably equal
    raised = S.app(N.raise_one(2), N.church(0, 1))
    assert beta_nf(raised).term is not beta_nf(N.church(0, 2)).term
    assert long_nf(raised).term is long_nf(N.church(0, 2)).term


def test_check_against_constant():
    assert decide_eq(S.app(N.check(2, 6), N.church(2, 6)), N.church(0, 6))
    assert decide_eq(S.app(N.check(2, 6), N.church(5, 6)), N.church(1, 6))
    assert decide_eq(S.app(N.check(0, 1), N.church(0, 1)), N.church(0, 1))
    assert decide_eq(S.app(N.check(0, 1), N.church(3, 1)), N.church(1, 1))


def test_check_side_condition():
    with pytest.raises(SideConditionViolated):
        N.check(2, 5)


def test_raise_side_condition():
    with pytest.raises(SideConditionViolated):
        N.raise_one(0)


def test_lowering_pair_zero_and_one():
    c1, c2 = N.lowering_pair(2)
    assert decide_eq(S.apps(N.church(0, 2), c1, c2), N.church(0, 0))
    assert decide_eq(S.apps(N.church(1, 2), c1, c2), N.church(1, 0))


def test_lowering_pair_no_contract_at_two():
    c1, c2 = N.lowering_pair(2)
    dropped = S.apps(N.church(2, 2), c1, c2)
    assert not decide_eq(dropped, N.church(2, 0))
    assert decide_eq(dropped, N.church(1, 0))  # what it actually lands on


def test_lowering_pair_iterates_to_ground():
    term = N.church(1, 6)
    for level in (6, 4, 2):
        c1, c2 = N.lowering_pair(level)
        term = S.apps(term, c1, c2)
    assert decide_eq(term, N.church(1, 0))


def test_lowering_pair_level_guard():
    with pytest.raises(LevelTooSmall):
        N.lowering_pair(1)


def test_combinator_dispatch_and_conditions():
    term = N.combinator(N.CombinatorKind("Check", 6, 2))
    assert decide_eq(S.app(term, N.church(2, 6)), N.church(0, 6))
    assert N.combinator(N.CombinatorKind("Pred", 1)).ty is S.arrow(
        S.numeral_type(4), S.numeral_type(1))
    with pytest.raises(SideConditionViolated):
        N.CombinatorKind("Nope", 1)
    with pytest.raises(SideConditionViolated):
        N.CombinatorKind("Cond", 1, 2)  # check constant only for Check


def test_combinators_are_not_prenormalized():
    # the conditional is the defining term, not its normal form
    c = N.cond(0)
    assert c is not long_nf(c).term
