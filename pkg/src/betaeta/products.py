"""Type reductions into product normal form, isomorphism witnesses, and
the separating construction for terms with products.

A type reduces by flattening products out of codomains, currying product
domains, reassociating products to the left, and absorbing the terminal
type; the result is a left-nested product of pure arrow types (or the
terminal type alone).  Each rewrite strictly decreases an exponential
complexity measure, which witnesses termination.  An isomorphism pair of
closed terms is constructed per step and composed along the trace.

Separation of unequal product-bearing terms moves them through the
isomorphism, splits the long normal form into components, finds one
component pair that still differs, and delegates to the product-free
pipeline; the resulting certificate projects the component and applies
the two projections of a fresh pair variable as final targets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EqualTerms, IllTyped, IndexOutOfRange, Overflow, TypeMismatch
from . import separator as Sep
from . import syntax as S
from .normalize import decide_eq, long_nf
from .syntax import (
    Term, Ty, TyArrow, TyAtom, TyProd, TyTerminal, TERMINAL,
    arrow, atom, prod, subst_type,
)

MEASURE_BIT_BUDGET = 1 << 20

RULES = ("curryCod", "curryDom", "assoc", "arrT", "Tarr", "prodT", "Tprod")


def measure(ty: Ty, atom_weight: int = 2, bit_budget: int = MEASURE_BIT_BUDGET) -> int:
    """Exponential complexity of a type: atoms and the terminal type
    weigh ``atom_weight`` (at least 2), a product weighs (left+1)*right,
    an arrow weighs cod**dom.  Every reduction strictly decreases it."""
    if atom_weight < 2:
        raise ValueError("the atom weight must be at least 2")

    memo: dict[int, int] = {}

    def go(t):
        hit = memo.get(t.uid)
        if hit is not None:
            return hit
        if isinstance(t, (TyAtom, TyTerminal)):
            out = atom_weight
        elif isinstance(t, TyProd):
            out = (go(t.left) + 1) * go(t.right)
        else:
            base = go(t.cod)
            ex = go(t.dom)
            if base.bit_length() * ex > bit_budget:
                raise Overflow("type measure exceeds the bit budget")
            out = base ** ex
        if out.bit_length() > bit_budget:
            raise Overflow("type measure exceeds the bit budget")
        memo[t.uid] = out
        return out

    return go(ty)


def _rule_at(ty: Ty) -> str | None:
    if isinstance(ty, TyArrow):
        if isinstance(ty.cod, TyTerminal):
            return "arrT"
        if isinstance(ty.dom, TyTerminal):
            return "Tarr"
        if isinstance(ty.cod, TyProd):
            return "curryCod"
        if isinstance(ty.dom, TyProd):
            return "curryDom"
    elif isinstance(ty, TyProd):
        if isinstance(ty.right, TyTerminal):
            return "prodT"
        if isinstance(ty.left, TyTerminal):
            return "Tprod"
        if isinstance(ty.right, TyProd):
            return "assoc"
    return None


def _contract(ty: Ty, rule: str) -> Ty:
    if rule == "curryCod":
        return prod(arrow(ty.dom, ty.cod.left), arrow(ty.dom, ty.cod.right))
    if rule == "curryDom":
        return arrow(ty.dom.left, arrow(ty.dom.right, ty.cod))
    if rule == "assoc":
        return prod(prod(ty.left, ty.right.left), ty.right.right)
    if rule == "arrT":
        return TERMINAL
    if rule == "Tarr":
        return ty.cod
    if rule == "prodT":
        return ty.left
    return ty.right


def _children(ty: Ty):
    if isinstance(ty, TyArrow):
        return (("dom", ty.dom), ("cod", ty.cod))
    if isinstance(ty, TyProd):
        return (("left", ty.left), ("right", ty.right))
    return ()


def _find_redex(ty: Ty, path: tuple, innermost: bool):
    here = _rule_at(ty)
    if here is not None and not innermost:
        return path, here
    for label, child in _children(ty):
        found = _find_redex(child, path + (label,), innermost)
        if found is not None:
            return found
    if here is not None and innermost:
        return path, here
    return None


def _apply_at(ty: Ty, path: tuple, rule: str) -> Ty:
    if not path:
        return _contract(ty, rule)
    label, rest = path[0], path[1:]
    if label == "dom":
        return arrow(_apply_at(ty.dom, rest, rule), ty.cod)
    if label == "cod":
        return arrow(ty.dom, _apply_at(ty.cod, rest, rule))
    if label == "left":
        return prod(_apply_at(ty.left, rest, rule), ty.right)
    return prod(ty.left, _apply_at(ty.right, rest, rule))


@dataclass(frozen=True)
class TypeStep:
    path: tuple
    rule: str
    before: int | None
    after: int | None


@dataclass
class TypeNFTrace:
    input: Ty
    steps: list[TypeStep]
    output: Ty


def _measure_opt(ty: Ty, weight: int) -> int | None:
    try:
        return measure(ty, weight)
    except Overflow:
        return None


def type_nf(ty: Ty, strategy: str = "innermost", atom_weight: int = 2) -> TypeNFTrace:
    """Reduce a type to its unique product normal form, recording each
    rewrite with the whole-type measure before and after."""
    if strategy not in ("innermost", "outermost"):
        raise ValueError(f"unknown strategy '{strategy}'")
    steps = []
    current = ty
    m_cur = _measure_opt(current, atom_weight)
    while True:
        found = _find_redex(current, (), strategy == "innermost")
        if found is None:
            break
        path, rule = found
        nxt = _apply_at(current, path, rule)
        m_nxt = _measure_opt(nxt, atom_weight)
        steps.append(TypeStep(path, rule, m_cur, m_nxt))
        current, m_cur = nxt, m_nxt
    return TypeNFTrace(ty, steps, current)


def is_product_nf(ty: Ty) -> bool:
    def pure_arrow(t):
        return S.is_product_free(t) and not isinstance(t, TyTerminal)

    if isinstance(ty, TyTerminal):
        return True
    while isinstance(ty, TyProd):
        if not pure_arrow(ty.right):
            return False
        ty = ty.left
    return pure_arrow(ty)


def components_of(ty: Ty) -> list[Ty]:
    """The factors of a left-nested product normal form, left to right."""
    out = []
    while isinstance(ty, TyProd):
        out.append(ty.right)
        ty = ty.left
    out.append(ty)
    out.reverse()
    return out


# ---------------------------------------------------------------------------
# Isomorphism witnesses

@dataclass
class IsoWitness:
    source: Ty
    target: Ty
    forward: Term
    backward: Term


def _identity(ty: Ty) -> Term:
    x = S.fresh_free("x", ty)
    return S.bind(x, x)


def _primitive_iso(ty: Ty, rule: str) -> tuple[Term, Term]:
    """Forward/backward closed terms between a redex type and its contractum."""
    out = _contract(ty, rule)
    if rule == "curryCod":
        f = S.fresh_free("f", ty)
        a = S.fresh_free("a", ty.dom)
        fwd = S.bind(S.pair(S.bind(S.proj1(S.app(f, a)), a),
                            S.bind(S.proj2(S.app(f, a)), a)), f)
        g = S.fresh_free("g", out)
        a2 = S.fresh_free("a", ty.dom)
        bwd = S.bind(S.bind(S.pair(S.app(S.proj1(g), a2), S.app(S.proj2(g), a2)), a2), g)
        return fwd, bwd
    if rule == "curryDom":
        f = S.fresh_free("f", ty)
        a1 = S.fresh_free("a1", ty.dom.left)
        a2 = S.fresh_free("a2", ty.dom.right)
        fwd = S.bind(S.app(f, S.pair(a1, a2)), f, a1, a2)
        g = S.fresh_free("g", out)
        pr = S.fresh_free("pr", ty.dom)
        bwd = S.bind(S.apps(g, S.proj1(pr), S.proj2(pr)), g, pr)
        return fwd, bwd
    if rule == "assoc":
        x = S.fresh_free("x", ty)
        fwd = S.bind(S.pair(S.pair(S.proj1(x), S.proj1(S.proj2(x))), S.proj2(S.proj2(x))), x)
        y = S.fresh_free("y", out)
        bwd = S.bind(S.pair(S.proj1(S.proj1(y)), S.pair(S.proj2(S.proj1(y)), S.proj2(y))), y)
        return fwd, bwd
    if rule == "arrT":
        f = S.fresh_free("f", ty)
        fwd = S.bind(S.UNIT, f)
        u = S.fresh_free("u", TERMINAL)
        a = S.fresh_free("a", ty.dom)
        bwd = S.bind(S.UNIT, u, a)
        return fwd, bwd
    if rule == "Tarr":
        f = S.fresh_free("f", ty)
        fwd = S.bind(S.app(f, S.UNIT), f)
        b = S.fresh_free("b", out)
        u = S.fresh_free("u", TERMINAL)
        bwd = S.bind(b, b, u)
        return fwd, bwd
    if rule == "prodT":
        x = S.fresh_free("x", ty)
        fwd = S.bind(S.proj1(x), x)
        a = S.fresh_free("a", out)
        bwd = S.bind(S.pair(a, S.UNIT), a)
        return fwd, bwd
    # Tprod
    x = S.fresh_free("x", ty)
    fwd = S.bind(S.proj2(x), x)
    a = S.fresh_free("a", out)
    bwd = S.bind(S.pair(S.UNIT, a), a)
    return fwd, bwd


def _lift_iso(ty: Ty, path: tuple, fwd: Term, bwd: Term) -> tuple[Term, Term]:
    """Lift an isomorphism of the subtype at ``path`` to the whole type.
    Lifting through an arrow domain is contravariant, so the two
    directions trade places."""
    if not path:
        return fwd, bwd
    label, rest = path[0], path[1:]
    if label == "dom":
        inner_f, inner_b = _lift_iso(ty.dom, rest, fwd, bwd)
        new_dom = inner_f.ty.cod
        f = S.fresh_free("f", ty)
        a = S.fresh_free("a", new_dom)
        lifted_f = S.bind(S.app(f, S.app(inner_b, a)), f, a)
        g = S.fresh_free("g", arrow(new_dom, ty.cod))
        a2 = S.fresh_free("a", ty.dom)
        lifted_b = S.bind(S.app(g, S.app(inner_f, a2)), g, a2)
        return lifted_f, lifted_b
    if label == "cod":
        inner_f, inner_b = _lift_iso(ty.cod, rest, fwd, bwd)
        new_cod = inner_f.ty.cod
        f = S.fresh_free("f", ty)
        a = S.fresh_free("a", ty.dom)
        lifted_f = S.bind(S.app(inner_f, S.app(f, a)), f, a)
        g = S.fresh_free("g", arrow(ty.dom, new_cod))
        a2 = S.fresh_free("a", ty.dom)
        lifted_b = S.bind(S.app(inner_b, S.app(g, a2)), g, a2)
        return lifted_f, lifted_b
    if label == "left":
        inner_f, inner_b = _lift_iso(ty.left, rest, fwd, bwd)
        new_left = inner_f.ty.cod
        x = S.fresh_free("x", ty)
        lifted_f = S.bind(S.pair(S.app(inner_f, S.proj1(x)), S.proj2(x)), x)
        y = S.fresh_free("y", prod(new_left, ty.right))
        lifted_b = S.bind(S.pair(S.app(inner_b, S.proj1(y)), S.proj2(y)), y)
        return lifted_f, lifted_b
    inner_f, inner_b = _lift_iso(ty.right, rest, fwd, bwd)
    new_right = inner_f.ty.cod
    x = S.fresh_free("x", ty)
    lifted_f = S.bind(S.pair(S.proj1(x), S.app(inner_f, S.proj2(x))), x)
    y = S.fresh_free("y", prod(ty.left, new_right))
    lifted_b = S.bind(S.pair(S.proj1(y), S.app(inner_b, S.proj2(y))), y)
    return lifted_f, lifted_b


def _compose_terms(second: Term, first: Term) -> Term:
    x = S.fresh_free("x", first.ty.dom)
    return S.bind(S.app(second, S.app(first, x)), x)


def build_iso(ty: Ty, strategy: str = "innermost") -> IsoWitness:
    """An isomorphism pair between a type and its product normal form,
    composed from one primitive witness per reduction step."""
    trace = type_nf(ty, strategy)
    current = ty
    fwd = _identity(ty)
    bwd = _identity(ty)
    for step in trace.steps:
        sub = current
        for label in step.path:
            sub = getattr(sub, {"dom": "dom", "cod": "cod", "left": "left", "right": "right"}[label])
        pf, pb = _primitive_iso(sub, step.rule)
        lf, lb = _lift_iso(current, step.path, pf, pb)
        fwd = _compose_terms(lf, fwd)
        bwd = _compose_terms(bwd, lb)
        current = _apply_at(current, step.path, step.rule)
    return IsoWitness(ty, current, fwd, bwd)


# ---------------------------------------------------------------------------
# Splitting along the normal form

UNIT_MARKER = "unit"


def split(a: Term):
    """Components of the long normal form of a closed term whose type is
    already in product normal form; the terminal type yields a marker."""
    if not is_product_nf(a.ty):
        raise IllTyped("splitting expects a type in product normal form")
    if isinstance(a.ty, TyTerminal):
        return UNIT_MARKER
    nf = long_nf(a).term

    def walk(t):
        if isinstance(t.ty, TyProd):
            if not isinstance(t, S.Pair):
                raise IllTyped("long form of a product is a pair")
            return walk(t.fst) + [t.snd]
        return [t]

    return walk(nf)


def differing_component(a: Term, b: Term, iso: IsoWitness) -> int:
    """The least 1-based index at which the split components of the two
    terms (moved through the isomorphism) are provably unequal."""
    if a.ty is not b.ty:
        raise TypeMismatch("the terms must share a type")
    parts_a = split(S.app(iso.forward, a))
    parts_b = split(S.app(iso.forward, b))
    if parts_a == UNIT_MARKER or parts_b == UNIT_MARKER:
        raise EqualTerms("terminal-typed terms are all equal")
    if len(parts_a) != len(parts_b):
        raise IllTyped("components of equal-typed terms must align")
    for idx, (x, y) in enumerate(zip(parts_a, parts_b), start=1):
        if not decide_eq(x, y):
            return idx
    raise EqualTerms("all components are provably equal")


def projector(n: int, i: int, ty: Ty) -> Term:
    """Closed term projecting the i-th of n left-nested factors."""
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"component {i} of {n}")
    x = S.fresh_free("x", ty)
    body = x
    if n > 1:
        for _ in range(n - i):
            body = S.proj1(body)
        if i > 1:
            body = S.proj2(body)
    return S.bind(body, x)


# ---------------------------------------------------------------------------
# Separation with products

@dataclass
class ProductCertificate:
    a_source: Term
    b_source: Term
    a_prime: Term
    b_prime: Term
    iso_forward: Term
    component: int
    n_components: int
    inner: Sep.SeparationCertificate

    @property
    def level(self):
        return self.inner.level


def separate_prod(a: Term, b: Term, max_base: int = 3,
                  level_override: int | None = None) -> ProductCertificate:
    """Separating certificate for closed unequal terms with products:
    project one differing component of the normal-form image and reuse
    the product-free pipeline on it, with the two projections of a fresh
    pair variable as targets."""
    if a.ty is not b.ty:
        raise TypeMismatch("the terms to separate must share a type")
    if S.free_vars(a) or S.free_vars(b):
        raise IllTyped("product separation expects closed terms")
    if decide_eq(a, b):
        raise EqualTerms("the terms are provably equal")

    iso = build_iso(a.ty)
    idx = differing_component(a, b, iso)
    parts_a = split(S.app(iso.forward, a))
    parts_b = split(S.app(iso.forward, b))
    inner = Sep.separate_two(parts_a[idx - 1], parts_b[idx - 1],
                             max_base=max_base, level_override=level_override)
    sub = _instance_sub(inner)
    names = S.term_atoms(a) | S.term_atoms(b) | S.term_atoms(iso.forward)
    mapping = {name: sub for name in names}
    return ProductCertificate(
        a_source=a, b_source=b,
        a_prime=S.substitute_types(a, mapping),
        b_prime=S.substitute_types(b, mapping),
        iso_forward=S.substitute_types(iso.forward, mapping),
        component=idx,
        n_components=len(parts_a),
        inner=inner,
    )


def _instance_sub(inner: Sep.SeparationCertificate) -> Ty:
    """The type every atom is replaced by: the numeral type at the
    certificate's level, over the target type of the inner separation."""
    return subst_type(S.numeral_type(inner.level), {"p": inner.target_c.ty})


def verify_product(cert: ProductCertificate) -> bool:
    """Replay: project the chosen component of the instantiated terms
    through the instantiated isomorphism, apply the inner head arguments
    and the two projections of a fresh pair variable, and check both
    projection equalities by normalization."""
    p = atom("p")
    x = S.free("x", prod(p, p))
    e, f = S.proj1(x), S.proj2(x)
    proj = projector(cert.n_components, cert.component, cert.iso_forward.ty.cod)
    for source, want in ((cert.a_prime, e), (cert.b_prime, f)):
        lhs = S.app(proj, S.app(cert.iso_forward, source))
        lhs = S.apps(lhs, *cert.inner.head_args)
        lhs = S.apps(lhs, e, f)
        if lhs.ty is not want.ty:
            raise IllTyped("certificate sides and targets differ in type")
        if not decide_eq(lhs, want):
            return False
    return True
