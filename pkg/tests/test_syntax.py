import pytest

from betaeta import syntax as S
from betaeta.errors import IllTyped, ParseError, TypeMismatch, UnboundVariable

p = S.atom("p")
q = S.atom("q")


def test_types_intern_to_identity():
    assert S.arrow(p, q) is S.arrow(p, q)
    assert S.prod(p, q) is not S.prod(q, p)
    assert S.atom("p") is p
    assert S.TERMINAL is S.parse_type("T")


def test_tower_sharing_is_linear():
    assert S.tower_type(0) is p
    assert S.type_node_count(S.tower_type(30)) == 31
    assert S.type_node_count(S.tower_type(64)) == 65


def test_numeral_type_unfolds():
    pp = S.arrow(p, p)
    assert S.numeral_type(0) is S.arrow(pp, pp)
    assert S.numeral_type(3) is S.tower_type(5)


def test_type_of_identity():
    t = S.parse_term("\\x:p. x")
    assert S.type_of(t) is S.arrow(p, p)


def test_type_of_nested_example():
    t = S.parse_term("\\x:(p->p)->p. x \\y:p. x \\z:p. y")
    assert S.type_of(t) is S.arrow(S.arrow(S.arrow(p, p), p), p)


def test_type_of_rejects_atom_application():
    ctx = S.Context([("x", p), ("y", p)])
    with pytest.raises(IllTyped):
        S.parse_term("x y", ctx)


def test_type_of_needs_context_for_free_vars():
    stx = S.parse("\\x:p. y")  # parsing accepts the free variable
    with pytest.raises(UnboundVariable):
        S.elaborate(stx)
    t = S.elaborate(stx, S.Context([("y", p)]))
    assert t.ty is S.arrow(p, p)


def test_substitute_term_basic():
    ctx = S.Context([("x", S.arrow(p, p)), ("y", p)])
    t = S.parse_term("x y", ctx)
    ident = S.parse_term("\\z:p. z")
    out = S.substitute_term(t, "x", ident)
    assert out is S.app(ident, S.free("y", p))


def test_substitute_term_avoids_capture():
    # replacing x by the free variable y under a binder must not capture
    t = S.parse_term("\\w:p. x", S.Context([("x", p)]))
    out = S.substitute_term(t, "x", S.free("y", p))
    assert S.show_term(out) == "\\x1:p. y"
    assert S.free_vars(out) == {"y": p}


def test_substitute_term_no_occurrence():
    t = S.parse_term("\\y:p. y")
    assert S.substitute_term(t, "x", S.free("z", p)) is t


def test_substitute_term_type_mismatch():
    t = S.free("x", p)
    with pytest.raises(TypeMismatch):
        S.substitute_term(t, "x", S.parse_term("\\z:p. z"))


def test_substitute_term_preserves_type():
    ctx = S.Context([("f", S.arrow(p, p)), ("u", p)])
    t = S.parse_term("\\g:p->p. g (f u)", ctx)
    out = S.substitute_term(t, "u", S.free("w", p))
    assert out.ty is t.ty


def test_substitute_types_identity_and_rename():
    t = S.parse_term("\\x:q. x")
    assert S.substitute_types(t, {}) is t
    assert S.substitute_types(t, {"q": p}) is S.parse_term("\\x:p. x")


def test_substitute_types_collapse_all_atoms():
    ctx = S.Context([("f", S.arrow(q, S.atom("r")))])
    t = S.parse_term("\\x:q. f x", ctx)
    out = S.substitute_types(t, {"q": p, "r": p})
    assert S.term_atoms(out) == {"p"}
    assert out.ty is S.arrow(p, p)


def test_parse_print_round_trip():
    samples = [
        "\\x:p. x",
        "\\x1:(p -> p) -> p. x1 (\\x2:p. x1 (\\x3:p. x2))",
        "\\x1:p * p. <p2 x1, p1 x1>",
        "\\x1:T. k",
        "\\x1:p -> p. \\x2:p. x1 (x1 x2)",
    ]
    for text in samples:
        t = S.parse_term(text)
        assert S.parse_term(S.show_term(t)) is t


def test_parse_pair_of_projections():
    ctx = S.Context([("x", S.prod(p, p))])
    t = S.parse_term("<p1 x, p2 x>", ctx)
    assert t is S.pair(S.proj1(S.free("x", S.prod(p, p))), S.proj2(S.free("x", S.prod(p, p))))


def test_alpha_equivalent_sources_parse_identically():
    a = S.parse_term("\\x:p. \\y:p. x")
    b = S.parse_term("\\u:p. \\v:p. u")
    assert a is b


def test_parse_errors_carry_position():
    with pytest.raises(ParseError):
        S.parse_term("\\x:p.")
    with pytest.raises(ParseError):
        S.parse_term("(\\x:p. x")
    with pytest.raises(ParseError):
        S.parse_type("p -> ")


def test_projection_binds_tighter_than_application():
    ctx = S.Context([("x", S.prod(S.arrow(p, p), p))])
    t = S.parse_term("p1 x (p2 x)", ctx)
    assert t is S.app(S.proj1(S.free("x", S.prod(S.arrow(p, p), p))),
                      S.proj2(S.free("x", S.prod(S.arrow(p, p), p))))


def test_type_alias_table_round_trip():
    big = S.numeral_type(12)
    term = S.lam(big, S.var(0, big))
    defs, names = S.type_alias_table([term])
    text = S.show_term(term, names)
    assert len(text) < 200
    aliases = S.parse_alias_table(defs)
    assert S.parse_term(text, aliases=aliases) is term


def test_context_rejects_duplicates():
    with pytest.raises(IllTyped):
        S.Context([("x", p), ("x", q)])
